//! Centered integer grids and the logarithmic frequency-axis mapping.
//!
//! A grid of odd size `N` in `D` dimensions holds the index set
//! `{-(N-1)/2, ..., (N-1)/2}^D`. Tensors over a grid are stored row-major with
//! storage index `i` on each axis holding the centered coordinate
//! `i - (N-1)/2`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default cap on `N^D`, the element count of any tensor over a grid.
pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 26;

/// Dimension count and per-axis size of a centered grid.
///
/// Construction checks `N^D` against a memory budget, so every `GridShape`
/// in existence describes tensors that may be allocated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridShape {
    dims: usize,
    size: usize,
}

impl GridShape {
    pub fn new(dims: usize, size: usize) -> Result<Self> {
        Self::with_budget(dims, size, DEFAULT_MAX_ELEMENTS)
    }

    pub fn with_budget(dims: usize, size: usize, max_elements: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidDims);
        }
        if size < 3 || size.is_multiple_of(2) {
            return Err(Error::InvalidSize(size));
        }
        let over = Error::MemoryBudget {
            dims,
            size,
            budget: max_elements,
        };
        let exp = u32::try_from(dims).map_err(|_| over)?;
        match size.checked_pow(exp) {
            Some(len) if len <= max_elements => Ok(Self { dims, size }),
            _ => Err(Error::MemoryBudget {
                dims,
                size,
                budget: max_elements,
            }),
        }
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.dims
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// `(N-1)/2`, the largest centered coordinate.
    #[inline]
    pub fn half(&self) -> i64 {
        (self.size as i64 - 1) / 2
    }

    /// Number of grid points, `N^D`.
    #[inline]
    pub fn len(&self) -> usize {
        self.size.pow(self.dims as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Array extent `[N; D]`.
    pub fn extent(&self) -> Vec<usize> {
        vec![self.size; self.dims]
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        let h = self.half();
        k.len() == self.dims && k.iter().all(|&c| (-h..=h).contains(&c))
    }

    /// Writes the centered coordinates of row-major storage index `flat`.
    pub fn coords_into(&self, mut flat: usize, out: &mut [i64]) {
        debug_assert_eq!(out.len(), self.dims);
        let h = self.half();
        for slot in out.iter_mut().rev() {
            *slot = (flat % self.size) as i64 - h;
            flat /= self.size;
        }
    }

    pub fn coords(&self, flat: usize) -> Vec<i64> {
        let mut out = vec![0; self.dims];
        self.coords_into(flat, &mut out);
        out
    }

    /// Row-major storage index of centered coordinates `k`, if on the grid.
    pub fn flat_index(&self, k: &[i64]) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let h = self.half();
        Some(
            k.iter()
                .fold(0usize, |acc, &c| acc * self.size + (c + h) as usize),
        )
    }

    /// All grid points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.coords(i))
    }
}

/// `s(N) = (N-1) / (2 ln((N+1)/2))`, the scale that makes the mapped
/// log-frequency axis end where the regular axis ends.
pub fn axis_scale<T: Real>(size: usize) -> Result<T> {
    if size < 3 || size.is_multiple_of(2) {
        return Err(Error::InvalidSize(size));
    }
    let half = T::from_usize((size - 1) / 2).unwrap();
    Ok(half / half.ln_1p())
}

/// A point on the mapped (logarithmic) frequency axes.
#[derive(Clone, Debug, PartialEq)]
pub struct LogFreqPoint<T>(Vec<T>);

impl<T: Real> LogFreqPoint<T> {
    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn norm(&self) -> T {
        self.0.iter().map(|&c| c * c).sum::<T>().sqrt()
    }
}

/// The mapping `k -> s(N) * k / |k| * ln(|k| + 1)` for a fixed `N`.
///
/// Total on integer vectors, including the wrap-shifted points `k + l` with
/// `l` in `{-N, 0, N}^D`. The origin maps to the origin.
#[derive(Clone, Copy, Debug)]
pub struct LogFreqAxis<T> {
    scale: T,
}

impl<T: Real> LogFreqAxis<T> {
    pub fn new(size: usize) -> Result<Self> {
        Ok(Self {
            scale: axis_scale(size)?,
        })
    }

    #[inline]
    pub fn scale(&self) -> T {
        self.scale
    }

    /// Mapped radius for an integer squared norm.
    #[inline]
    pub fn radius(&self, norm_sq: i64) -> T {
        let norm = T::from_int(norm_sq).sqrt();
        self.scale * norm.ln_1p()
    }

    pub fn map_into(&self, k: &[i64], out: &mut [T]) {
        debug_assert_eq!(k.len(), out.len());
        let norm_sq: i64 = k.iter().map(|&c| c * c).sum();
        if norm_sq == 0 {
            out.iter_mut().for_each(|o| *o = T::zero());
            return;
        }
        let norm = T::from_int(norm_sq).sqrt();
        let gain = self.scale * norm.ln_1p() / norm;
        for (o, &c) in out.iter_mut().zip(k) {
            *o = gain * T::from_int(c);
        }
    }

    pub fn map(&self, k: &[i64]) -> LogFreqPoint<T> {
        let mut out = vec![T::zero(); k.len()];
        self.map_into(k, &mut out);
        LogFreqPoint(out)
    }
}

/// Maps integer frequency `k` onto the log-frequency axes of an `N`-grid.
pub fn log_freq_map<T: Real>(k: &[i64], size: usize) -> Result<LogFreqPoint<T>> {
    Ok(LogFreqAxis::new(size)?.map(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use twofloat::TwoFloat;

    // Double-double evaluation of the closed form, independent of `axis_scale`.
    fn scale_dd(size: usize) -> TwoFloat {
        let n = TwoFloat::from(size as f64);
        (n - 1.0) / ((((n + 1.0) / 2.0).ln()) * 2.0)
    }

    #[test]
    fn rejects_invalid_shapes() {
        assert!(matches!(GridShape::new(2, 4), Err(Error::InvalidSize(4))));
        assert!(matches!(GridShape::new(2, 1), Err(Error::InvalidSize(1))));
        assert!(matches!(GridShape::new(0, 9), Err(Error::InvalidDims)));
        assert!(matches!(
            GridShape::with_budget(3, 101, 1_000_000),
            Err(Error::MemoryBudget { .. })
        ));
        assert!(matches!(
            GridShape::new(64, 101),
            Err(Error::MemoryBudget { .. })
        ));
        assert!(GridShape::with_budget(3, 101, 1_030_301).is_ok());
    }

    #[test]
    fn coordinates_are_row_major_centered() {
        let g = GridShape::new(2, 3).unwrap();
        let pts: Vec<_> = g.points().collect();
        assert_eq!(pts[0], vec![-1, -1]);
        assert_eq!(pts[1], vec![-1, 0]);
        assert_eq!(pts[4], vec![0, 0]);
        assert_eq!(pts[8], vec![1, 1]);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(g.flat_index(p), Some(i));
        }
        assert_eq!(g.flat_index(&[2, 0]), None);
    }

    #[test]
    fn axis_scale_examples() {
        let s101: f64 = axis_scale(101).unwrap();
        let s3: f64 = axis_scale(3).unwrap();
        // 50-digit reference values.
        assert_relative_eq!(s101, 12.716738907202113, max_relative = 1e-15);
        // twofloat's ln is only accurate to a few 1e-14 near small arguments.
        assert_relative_eq!(s101, scale_dd(101).hi(), max_relative = 1e-13);
        assert_relative_eq!(s3, scale_dd(3).hi(), max_relative = 1e-13);
        assert_relative_eq!(s3, std::f64::consts::LOG2_E, max_relative = 1e-15);
    }

    #[test]
    fn axis_scale_rejects_even_and_tiny() {
        assert!(axis_scale::<f64>(0).is_err());
        assert!(axis_scale::<f64>(1).is_err());
        assert!(axis_scale::<f64>(100).is_err());
    }

    #[test]
    fn log_freq_map_examples() {
        let origin: LogFreqPoint<f64> = log_freq_map(&[0, 0], 101).unwrap();
        assert_eq!(origin.coords(), &[0.0, 0.0]);

        let p: LogFreqPoint<f64> = log_freq_map(&[3, 4], 101).unwrap();
        assert_relative_eq!(p.coords()[0], 13.671202412808129, max_relative = 1e-14);
        assert_relative_eq!(p.coords()[1], 18.228269883744172, max_relative = 1e-14);

        let edge: LogFreqPoint<f64> = log_freq_map(&[50, 0], 101).unwrap();
        assert_relative_eq!(edge.coords()[0], 50.0, max_relative = 1e-14);
        assert_eq!(edge.coords()[1], 0.0);
    }

    #[test]
    fn boundary_fixpoint_on_every_axis() {
        for size in [3usize, 9, 25, 101, 1001] {
            let h = (size as i64 - 1) / 2;
            let axis = LogFreqAxis::<f64>::new(size).unwrap();
            for d in 0..3 {
                for sign in [-1, 1] {
                    let mut k = vec![0; 3];
                    k[d] = sign * h;
                    let m = axis.map(&k);
                    assert_relative_eq!(m.coords()[d], (sign * h) as f64, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn single_precision_agrees() {
        let s: f32 = axis_scale(101).unwrap();
        assert_relative_eq!(s, 12.716739, max_relative = 1e-6);
        let p: LogFreqPoint<f32> = log_freq_map(&[3, 4], 101).unwrap();
        assert_relative_eq!(p.coords()[1], 18.22827, max_relative = 1e-5);
    }

    proptest! {
        #[test]
        fn monotone_along_rays(dir in prop::collection::vec(-5i64..=5, 2..=3), a in 1i64..20, b in 1i64..20) {
            prop_assume!(dir.iter().any(|&c| c != 0) && a != b);
            let axis = LogFreqAxis::<f64>::new(101).unwrap();
            let (lo, hi) = (a.min(b), a.max(b));
            let k1: Vec<i64> = dir.iter().map(|c| c * lo).collect();
            let k2: Vec<i64> = dir.iter().map(|c| c * hi).collect();
            prop_assert!(axis.map(&k1).norm() < axis.map(&k2).norm());
        }

        #[test]
        fn direction_is_preserved(k in prop::collection::vec(-150i64..=150, 1..=4)) {
            prop_assume!(k.iter().any(|&c| c != 0));
            let m = LogFreqAxis::<f64>::new(101).unwrap().map(&k);
            let kn = (k.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
            let gain = m.norm() / kn;
            prop_assert!(gain > 0.0);
            for (mc, &kc) in m.coords().iter().zip(&k) {
                prop_assert!((mc - gain * kc as f64).abs() <= 1e-12 * m.norm());
            }
        }

        #[test]
        fn norm_depends_only_on_length(k in prop::collection::vec(-50i64..=50, 2..=3), flips in prop::collection::vec(any::<bool>(), 3), rot in 0usize..3) {
            let axis = LogFreqAxis::<f64>::new(101).unwrap();
            let mut other: Vec<i64> = k.iter().zip(&flips).map(|(&c, &f)| if f { -c } else { c }).collect();
            let len = other.len();
            other.rotate_left(rot % len);
            let (a, b) = (axis.map(&k).norm(), axis.map(&other).norm());
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }

        #[test]
        fn mapped_norm_bounded_by_grid_corner(k in prop::collection::vec(-12i64..=12, 2)) {
            let axis = LogFreqAxis::<f64>::new(25).unwrap();
            let corner = axis.map(&[12, 12]).norm();
            prop_assert!(axis.map(&k).norm() <= corner * (1.0 + 1e-15));
        }
    }
}
