//! Centered inverse DFT from frequency weights to spatial filters.
//!
//! Both paths compute `Psi(n) = sum_k w(k) exp(2 pi i n.k / N)` with `n` and
//! `k` on the centered grid and no normalization constant. [`idft_naive`] is
//! the direct sum and serves as the oracle for [`idft_fast`].

use ndarray::{ArrayD, Axis, IxDyn, Zip};
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::scalar::Real;
use crate::synth::{FreqWeights, GaussianSpec};

/// Spatial filter over a centered grid. The real part is the even filter and
/// the imaginary part the odd one.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFilter<T> {
    shape: GridShape,
    re: ArrayD<T>,
    im: ArrayD<T>,
    source: Option<GaussianSpec<T>>,
}

impl<T: Real> ComplexFilter<T> {
    pub fn from_parts(
        shape: GridShape,
        re: ArrayD<T>,
        im: ArrayD<T>,
        source: Option<GaussianSpec<T>>,
    ) -> Result<Self> {
        let extent = shape.extent();
        for part in [&re, &im] {
            if part.shape() != extent.as_slice() {
                return Err(Error::ShapeMismatch {
                    expected: extent,
                    got: part.shape().to_vec(),
                });
            }
        }
        Ok(Self {
            shape,
            re: re.as_standard_layout().into_owned(),
            im: im.as_standard_layout().into_owned(),
            source,
        })
    }

    fn from_complex(
        shape: GridShape,
        data: &ArrayD<Complex<T>>,
        source: Option<GaussianSpec<T>>,
    ) -> Self {
        Self {
            shape,
            re: data.mapv(|c| c.re),
            im: data.mapv(|c| c.im),
            source,
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn re(&self) -> &ArrayD<T> {
        &self.re
    }

    pub fn im(&self) -> &ArrayD<T> {
        &self.im
    }

    pub fn source(&self) -> Option<&GaussianSpec<T>> {
        self.source.as_ref()
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut ArrayD<T>, &mut ArrayD<T>) {
        (&mut self.re, &mut self.im)
    }

    /// Value at centered spatial coordinate `n`. Panics off the grid.
    pub fn at(&self, n: &[i64]) -> Complex<T> {
        let i = self.shape.flat_index(n).expect("position outside the grid");
        Complex::new(
            self.re.as_slice().unwrap()[i],
            self.im.as_slice().unwrap()[i],
        )
    }

    /// `sum re^2`.
    pub fn energy_re(&self) -> T {
        self.re.iter().map(|&v| v * v).sum()
    }

    /// `sum im^2`.
    pub fn energy_im(&self) -> T {
        self.im.iter().map(|&v| v * v).sum()
    }

    /// `sum re * im`; zero on a symmetric grid when re is even and im odd.
    pub fn parts_inner(&self) -> T {
        self.re
            .iter()
            .zip(self.im.iter())
            .map(|(&a, &b)| a * b)
            .sum()
    }

    /// `(sum re, sum im)`.
    pub fn sums(&self) -> (T, T) {
        (self.re.iter().copied().sum(), self.im.iter().copied().sum())
    }

    pub fn to_complex(&self) -> ArrayD<Complex<T>> {
        let mut out = ArrayD::from_elem(self.re.raw_dim(), Complex::new(T::zero(), T::zero()));
        Zip::from(&mut out)
            .and(&self.re)
            .and(&self.im)
            .for_each(|o, &r, &i| *o = Complex::new(r, i));
        out
    }
}

/// Direct evaluation of the centered inverse DFT, `O(N^(2D))`.
pub fn idft_naive<T: Real>(w: &FreqWeights<T>) -> ComplexFilter<T> {
    let shape = w.shape();
    let n = shape.size() as i64;
    let d = shape.dims();
    let tau = T::TAU() / T::from_int(n);
    let twiddles: Vec<Complex<T>> = (0..n)
        .map(|p| Complex::from_polar(T::one(), tau * T::from_int(p)))
        .collect();
    let coords: Vec<i64> = (0..shape.len()).flat_map(|i| shape.coords(i)).collect();
    let weights = w.values().as_slice().expect("standard layout");

    let data: Vec<Complex<T>> = coords
        .par_chunks_exact(d)
        .map(|pos| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (freq, &wk) in coords.chunks_exact(d).zip(weights) {
                let phase: i64 = pos.iter().zip(freq).map(|(a, b)| a * b).sum();
                acc += twiddles[phase.rem_euclid(n) as usize] * wk;
            }
            acc
        })
        .collect();
    let data = ArrayD::from_shape_vec(IxDyn(&shape.extent()), data).expect("grid extent");
    ComplexFilter::from_complex(shape, &data, w.source().cloned())
}

/// FFT evaluation of the centered inverse DFT; same contract as [`idft_naive`].
pub fn idft_fast<T: Real>(w: &FreqWeights<T>) -> ComplexFilter<T> {
    let shape = w.shape();
    let h = shape.half() as usize;
    let spectrum = w.values().mapv(|v| Complex::new(v, T::zero()));
    let mut standard = cyclic_shift(&spectrum, &vec![h + 1; shape.dims()]);
    fftn(&mut standard, FftDirection::Inverse);
    let centered = cyclic_shift(&standard, &vec![h; shape.dims()]);
    ComplexFilter::from_complex(shape, &centered, w.source().cloned())
}

/// Returns `(sum re - N^D * w(0), sum im)`; both vanish up to rounding when
/// `f` is the transform of `w`.
pub fn sum_check<T: Real>(f: &ComplexFilter<T>, w: &FreqWeights<T>) -> (T, T) {
    let shape = w.shape();
    let dc = w.at(&vec![0; shape.dims()]) * T::from_usize(shape.len()).unwrap();
    let (re, im) = f.sums();
    (re - dc, im)
}

/// Moves element `i` on each axis to `(i + shift) mod len`.
pub(crate) fn cyclic_shift<A: Clone>(src: &ArrayD<A>, shifts: &[usize]) -> ArrayD<A> {
    let mut cur = src.to_owned();
    for (ax, &shift) in shifts.iter().enumerate() {
        let len = cur.len_of(Axis(ax));
        let shift = shift % len;
        if shift == 0 {
            continue;
        }
        let mut next = cur.clone();
        next.slice_axis_mut(Axis(ax), (shift..len).into())
            .assign(&cur.slice_axis(Axis(ax), (0..len - shift).into()));
        next.slice_axis_mut(Axis(ax), (0..shift).into())
            .assign(&cur.slice_axis(Axis(ax), (len - shift..len).into()));
        cur = next;
    }
    cur
}

/// Unnormalized multidimensional FFT in standard layout, axis by axis.
pub(crate) fn fftn<T: Real>(data: &mut ArrayD<Complex<T>>, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    for ax in 0..data.ndim() {
        let len = data.len_of(Axis(ax));
        if len < 2 {
            continue;
        }
        let fft = planner.plan_fft(len, direction);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
        for mut lane in data.lanes_mut(Axis(ax)) {
            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                *b = *v;
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (v, b) in lane.iter_mut().zip(&buf) {
                *v = *b;
            }
        }
    }
}
