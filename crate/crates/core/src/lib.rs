//! Multidimensional Gabor-like filters obtained as the inverse discrete
//! Fourier transform of Gaussian functions placed on logarithmic frequency
//! axes.
//!
//! The pipeline is:
//!
//! 1. [`grid`]: centered odd-sized grids and the log-frequency mapping
//!    `k -> s(N) * k / |k| * ln(|k| + 1)`.
//! 2. [`synth`]: real frequency weights, a Gaussian around `mu` on the mapped
//!    axes with the period-`N` wrap-around terms folded back in.
//! 3. [`transform`]: centered inverse DFT (direct sum and FFT paths) giving a
//!    complex spatial filter whose real part is even and imaginary part odd.
//! 4. [`bank`]: ring layouts of Gaussian centers, normalization, coverage and
//!    identity-approximation checks.
//! 5. [`apply`]: frequency-domain application of filters and banks to signals.
//! 6. [`io`]: the `LGFB1` tensor container, PGM export and JSON configs.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are the types used by the file formats and the CLI.

pub mod apply;
pub mod bank;
mod error;
pub mod grid;
pub mod io;
mod scalar;
pub mod synth;
pub mod transform;

pub use apply::{
    apply_bank, apply_filters, convolve, response_energy, spectral_energy, Mode, ResponseSet,
    Signal,
};
pub use bank::{
    build_bank, coverage_sum, identity_check, identity_residual, normalize, ring_centers,
    theta_from_chord, BankFilter, BankSpec, Center, CenterLayout, FilterBank, PruneRule, ThetaStep,
};
pub use error::{Error, Result};
pub use grid::{axis_scale, log_freq_map, GridShape, LogFreqAxis, LogFreqPoint};
pub use scalar::Real;
pub use synth::{build_weights, gaussian_weight, FreqWeights, GaussianSpec};
pub use transform::{idft_fast, idft_naive, sum_check, ComplexFilter};

pub type GaussianSpec64 = GaussianSpec<f64>;
pub type FreqWeights64 = FreqWeights<f64>;
pub type ComplexFilter64 = ComplexFilter<f64>;
pub type BankSpec64 = BankSpec<f64>;
pub type FilterBank64 = FilterBank<f64>;
pub type Signal64 = Signal<f64>;
pub type ResponseSet64 = ResponseSet<f64>;

pub type GaussianSpec32 = GaussianSpec<f32>;
pub type FreqWeights32 = FreqWeights<f32>;
pub type ComplexFilter32 = ComplexFilter<f32>;
pub type BankSpec32 = BankSpec<f32>;
pub type FilterBank32 = FilterBank<f32>;
pub type Signal32 = Signal<f32>;
