//! Ring-layout filter banks in two dimensions.
//!
//! Gaussian centers sit on rings of increasing radius around the frequency
//! origin, plus one low-pass center at the origin itself. The angular step
//! can be derived from the chord rule: adjacent centers on the outermost
//! ring are as far apart as adjacent rings.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::scalar::Real;
use crate::synth::{build_weights, FreqWeights, GaussianSpec};
use crate::transform::{idft_fast, ComplexFilter};

/// Angular step between centers on a ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaStep<T> {
    Fixed(T),
    /// Solve the chord rule on the outermost ring, then snap to the nearest
    /// step that divides the angular range evenly.
    Auto,
}

/// Which centers near the Nyquist boundary are dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PruneRule<T> {
    /// `(N-1)/2 - 2 sqrt(sigma ln 2)`.
    Auto,
    Limit(T),
    Disabled,
}

/// Declarative bank geometry.
///
/// `theta_range` is closed, except that an angle congruent (mod 2 pi) to the
/// start of the range is never repeated, so `[0, 2 pi]` yields a full turn
/// without a duplicate.
#[derive(Clone, Debug, PartialEq)]
pub struct BankSpec<T> {
    pub shape: GridShape,
    pub sigma: T,
    pub radii: Vec<T>,
    pub theta_step: ThetaStep<T>,
    pub theta_range: (T, T),
    pub prune: PruneRule<T>,
}

impl<T: Real> BankSpec<T> {
    /// A spec with automatic angular step over `[0, pi/2]` and automatic pruning.
    pub fn new(shape: GridShape, sigma: T, radii: Vec<T>) -> Self {
        Self {
            shape,
            sigma,
            radii,
            theta_step: ThetaStep::Auto,
            theta_range: (T::zero(), T::FRAC_PI_2()),
            prune: PruneRule::Auto,
        }
    }

    /// `N = 101`, `sigma = 100`, radii `6, 12, ..., 42`, angles
    /// `0, pi/22, ..., pi/2`, nothing pruned.
    pub fn reference() -> Self {
        let shape = GridShape::new(2, 101).expect("valid grid");
        let radii = (1..=7).map(|i| T::from_int(6 * i)).collect();
        Self {
            prune: PruneRule::Disabled,
            ..Self::new(shape, T::lit(100.0), radii)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidBank(msg));
        if !(self.sigma > T::zero() && self.sigma.is_finite()) {
            return Err(Error::InvalidSigma(self.sigma.as_f64()));
        }
        if !self.radii.is_empty() && self.shape.dims() != 2 {
            return bad(format!(
                "ring layouts need a 2-D grid, got {} dimensions",
                self.shape.dims()
            ));
        }
        let h = T::from_int(self.shape.half());
        if self
            .radii
            .iter()
            .any(|&r| !(r > T::zero() && r < h && r.is_finite()))
        {
            return bad(format!("radii must lie in (0, {h})"));
        }
        if self.radii.windows(2).any(|p| p[0] >= p[1]) {
            return bad("radii must be strictly ascending".into());
        }
        if let ThetaStep::Fixed(step) = self.theta_step {
            if !(step > T::zero() && step <= T::PI()) {
                return bad(format!("theta step {step} outside (0, pi]"));
            }
        }
        let (start, end) = self.theta_range;
        if !(start.is_finite() && end.is_finite() && start <= end) {
            return bad(format!("theta range [{start}, {end}] is not an interval"));
        }
        if let PruneRule::Limit(limit) = self.prune {
            if limit.is_nan() || limit <= T::zero() {
                return bad(format!("prune limit {limit} must be positive"));
            }
        }
        Ok(())
    }

    /// Radial spacing used by the chord rule: the last ring gap, or the first
    /// radius when there is a single ring.
    pub fn radial_step(&self) -> Option<T> {
        match self.radii.as_slice() {
            [] => None,
            [r] => Some(*r),
            [.., a, b] => Some(*b - *a),
        }
    }

    pub fn resolved_theta_step(&self) -> Result<T> {
        let span = self.theta_range.1 - self.theta_range.0;
        match self.theta_step {
            ThetaStep::Fixed(step) => Ok(step),
            ThetaStep::Auto => {
                let (Some(&r_max), Some(dr)) = (self.radii.last(), self.radial_step()) else {
                    return Ok(if span > T::zero() { span } else { T::PI() });
                };
                let chord = theta_from_chord(r_max, dr)?;
                if span <= T::zero() {
                    return Ok(chord);
                }
                let divisions = (span / chord).round().max(T::one());
                Ok(span / divisions)
            }
        }
    }

    /// Angles of one ring in ascending order.
    pub fn angles(&self) -> Result<Vec<T>> {
        let step = self.resolved_theta_step()?;
        let (start, end) = self.theta_range;
        let tol = T::epsilon() * T::lit(64.0) * (end - start).abs().max(T::one());
        let mut out = Vec::new();
        for j in 0.. {
            let theta = start + step * T::from_int(j);
            if theta > end + tol || (j > 0 && theta - start >= T::TAU() - tol) {
                break;
            }
            out.push(theta);
        }
        Ok(out)
    }

    pub fn prune_limit(&self) -> Option<T> {
        match self.prune {
            PruneRule::Auto => {
                let h = T::from_int(self.shape.half());
                Some(h - T::lit(2.0) * (self.sigma * T::LN_2()).sqrt())
            }
            PruneRule::Limit(limit) => Some(limit),
            PruneRule::Disabled => None,
        }
    }

    /// The coverage layout: a full turn of angles at this spec's resolved
    /// step, with one extra ring added if it still fits inside the grid.
    pub fn full_circle(&self) -> Result<Self> {
        let step = self.resolved_theta_step()?;
        let mut radii = self.radii.clone();
        if let (Some(&last), Some(dr)) = (radii.last(), self.radial_step()) {
            if last + dr < T::from_int(self.shape.half()) {
                radii.push(last + dr);
            }
        }
        Ok(Self {
            radii,
            theta_step: ThetaStep::Fixed(step),
            theta_range: (T::zero(), T::TAU()),
            ..self.clone()
        })
    }
}

/// One Gaussian center of a bank layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Center<T> {
    pub mu: Vec<T>,
    pub radius: T,
    pub theta: T,
    /// `(ring index, angle index)`; `None` for the low-pass center.
    pub ring: Option<(usize, usize)>,
}

impl<T: Real> Center<T> {
    fn lowpass(dims: usize) -> Self {
        Self {
            mu: vec![T::zero(); dims],
            radius: T::zero(),
            theta: T::zero(),
            ring: None,
        }
    }

    pub fn is_lowpass(&self) -> bool {
        self.ring.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterLayout<T> {
    /// Low-pass first, then ordered by `(radius, theta)`.
    pub kept: Vec<Center<T>>,
    pub pruned: Vec<Center<T>>,
}

/// Exact solution of `|(r cos t, r sin t) - (r, 0)| = delta_r`, i.e.
/// `t = 2 asin(delta_r / (2 r))`.
pub fn theta_from_chord<T: Real>(r_max: T, delta_r: T) -> Result<T> {
    let two = T::lit(2.0);
    if !(r_max > T::zero() && delta_r > T::zero() && delta_r <= two * r_max) {
        return Err(Error::NoChordSolution {
            r_max: r_max.as_f64(),
            delta_r: delta_r.as_f64(),
        });
    }
    Ok(two * (delta_r / (two * r_max)).asin())
}

/// The low-pass center followed by every ring center, split into kept and
/// pruned by `spec.prune`.
pub fn ring_centers<T: Real>(spec: &BankSpec<T>) -> Result<CenterLayout<T>> {
    spec.validate()?;
    let mut kept = vec![Center::lowpass(spec.shape.dims())];
    let mut pruned = Vec::new();
    if spec.radii.is_empty() {
        return Ok(CenterLayout { kept, pruned });
    }
    let angles = spec.angles()?;
    let limit = spec.prune_limit();
    for (ri, &r) in spec.radii.iter().enumerate() {
        for (ai, &theta) in angles.iter().enumerate() {
            let center = Center {
                mu: vec![r * theta.cos(), r * theta.sin()],
                radius: r,
                theta,
                ring: Some((ri, ai)),
            };
            match limit {
                Some(lim) if center.mu.iter().any(|c| c.abs() > lim) => pruned.push(center),
                _ => kept.push(center),
            }
        }
    }
    Ok(CenterLayout { kept, pruned })
}

/// Scales the real part to unit energy and the imaginary part to unit energy,
/// or to exact zero for the low-pass filter and numerically real filters.
pub fn normalize<T: Real>(mut f: ComplexFilter<T>) -> Result<ComplexFilter<T>> {
    let e_re = f.energy_re();
    let e_im = f.energy_im();
    let lowpass = f.source().is_some_and(|s| s.is_lowpass());
    if !(e_re > T::min_positive_value() && e_re.is_finite()) {
        return Err(Error::DegenerateFilter {
            mu: f
                .source()
                .map(|s| s.mu().iter().map(|c| c.as_f64()).collect())
                .unwrap_or_default(),
        });
    }
    let real_only = lowpass || e_im.sqrt() <= T::epsilon() * T::lit(1e4) * e_re.sqrt();
    let re_gain = e_re.sqrt().recip();
    let im_gain = e_im.sqrt().recip();
    let (re, im) = f.parts_mut();
    re.mapv_inplace(|v| v * re_gain);
    if real_only {
        im.fill(T::zero());
    } else {
        im.mapv_inplace(|v| v * im_gain);
    }
    Ok(f)
}

#[derive(Clone, Debug)]
pub struct BankFilter<T> {
    pub center: Center<T>,
    pub filter: ComplexFilter<T>,
}

/// Normalized filters of a layout, low-pass first.
#[derive(Clone, Debug)]
pub struct FilterBank<T> {
    pub spec: BankSpec<T>,
    pub filters: Vec<BankFilter<T>>,
    pub lowpass_index: usize,
    pub pruned: Vec<Center<T>>,
}

impl<T> FilterBank<T> {
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn lowpass(&self) -> &BankFilter<T> {
        &self.filters[self.lowpass_index]
    }
}

fn synthesize<T: Real>(spec: &BankSpec<T>, center: &Center<T>) -> Result<ComplexFilter<T>> {
    let gaussian = GaussianSpec::new(center.mu.clone(), spec.sigma)?;
    let weights = build_weights(&gaussian, spec.shape)?;
    normalize(idft_fast(&weights))
}

/// Synthesizes and normalizes one filter per kept center, in parallel.
pub fn build_bank<T: Real>(spec: &BankSpec<T>) -> Result<FilterBank<T>> {
    let layout = ring_centers(spec)?;
    let filters = layout
        .kept
        .into_par_iter()
        .map(|center| {
            let filter = synthesize(spec, &center)?;
            Ok(BankFilter { center, filter })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FilterBank {
        spec: spec.clone(),
        filters,
        lowpass_index: 0,
        pruned: layout.pruned,
    })
}

/// Sum of the frequency weights of every kept center. With `full_circle`
/// the layout is first widened by [`BankSpec::full_circle`].
pub fn coverage_sum<T: Real>(spec: &BankSpec<T>, full_circle: bool) -> Result<FreqWeights<T>> {
    let spec = if full_circle {
        spec.full_circle()?
    } else {
        spec.clone()
    };
    let layout = ring_centers(&spec)?;
    let mut total: Option<FreqWeights<T>> = None;
    for center in &layout.kept {
        let w = build_weights(
            &GaussianSpec::new(center.mu.clone(), spec.sigma)?,
            spec.shape,
        )?;
        match total.as_mut() {
            Some(t) => t.accumulate(&w)?,
            None => total = Some(w),
        }
    }
    Ok(total.expect("layout always holds the low-pass center"))
}

/// Largest off-origin magnitude of the real part of the inverse transform
/// of `w`, relative to the origin value. Zero for a flat spectrum.
pub fn identity_residual<T: Real>(w: &FreqWeights<T>) -> T {
    let f = idft_fast(w);
    let shape = w.shape();
    let origin = shape
        .flat_index(&vec![0; shape.dims()])
        .expect("origin on grid");
    let re = f.re().as_slice().expect("standard layout");
    let peak = re[origin];
    re.iter()
        .enumerate()
        .filter(|&(i, _)| i != origin)
        .map(|(_, &v)| (v / peak).abs())
        .fold(T::zero(), T::max)
}

/// Identity-approximation residual of the coverage of `spec` as given; pass a
/// full-circle layout (see [`BankSpec::full_circle`]).
pub fn identity_check<T: Real>(spec: &BankSpec<T>) -> Result<T> {
    Ok(identity_residual(&coverage_sum(spec, false)?))
}
