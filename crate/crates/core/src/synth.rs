//! Frequency-domain weights: a Gaussian on the logarithmic frequency axes,
//! with the tails that cross the grid boundary folded back by periodicity.
//!
//! For grid point `k` the weight is
//!
//! ```text
//! w(k) = sum over l in {-N, 0, N}^D of exp(-|m(k + l) - mu|^2 / sigma)
//! ```
//!
//! where `m` is [`LogFreqAxis::map`](crate::grid::LogFreqAxis::map). All `3^D`
//! offsets are always summed.

use ndarray::{ArrayD, IxDyn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridShape, LogFreqAxis};
use crate::scalar::Real;

/// Center `mu` (in mapped log-frequency coordinates) and width `sigma` of a
/// Gaussian. `sigma` divides the squared distance directly; it is not a
/// standard deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSpec<T> {
    mu: Vec<T>,
    sigma: T,
}

impl<T: Real> GaussianSpec<T> {
    pub fn new(mu: Vec<T>, sigma: T) -> Result<Self> {
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(Error::InvalidSigma(sigma.as_f64()));
        }
        if mu.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if mu.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCenter);
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn dims(&self) -> usize {
        self.mu.len()
    }

    /// True for the Gaussian at the frequency origin, whose filter is real.
    pub fn is_lowpass(&self) -> bool {
        self.mu.iter().all(|c| c.is_zero())
    }

    fn check_dims(&self, shape: &GridShape) -> Result<()> {
        if self.mu.len() != shape.dims() {
            return Err(Error::DimensionMismatch {
                expected: shape.dims(),
                got: self.mu.len(),
            });
        }
        Ok(())
    }
}

/// Real weights over a centered frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqWeights<T> {
    shape: GridShape,
    values: ArrayD<T>,
    source: Option<GaussianSpec<T>>,
}

impl<T: Real> FreqWeights<T> {
    /// Wraps an arbitrary real tensor laid out row-major over the centered grid.
    pub fn from_values(shape: GridShape, values: ArrayD<T>) -> Result<Self> {
        if values.shape() != shape.extent().as_slice() {
            return Err(Error::ShapeMismatch {
                expected: shape.extent(),
                got: values.shape().to_vec(),
            });
        }
        Ok(Self {
            shape,
            values: values.as_standard_layout().into_owned(),
            source: None,
        })
    }

    pub(crate) fn with_source(mut self, source: Option<GaussianSpec<T>>) -> Self {
        self.source = source;
        self
    }

    /// Weights equal to one everywhere.
    pub fn flat(shape: GridShape) -> Self {
        Self {
            shape,
            values: ArrayD::from_elem(IxDyn(&shape.extent()), T::one()),
            source: None,
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn values(&self) -> &ArrayD<T> {
        &self.values
    }

    pub fn into_values(self) -> ArrayD<T> {
        self.values
    }

    /// The Gaussian these weights were built from, if any.
    pub fn source(&self) -> Option<&GaussianSpec<T>> {
        self.source.as_ref()
    }

    /// Weight at centered frequency `k`. Panics off the grid.
    pub fn at(&self, k: &[i64]) -> T {
        let i = self
            .shape
            .flat_index(k)
            .expect("frequency outside the grid");
        self.values.as_slice().unwrap()[i]
    }

    /// Elementwise sum; provenance is dropped.
    pub fn accumulate(&mut self, other: &FreqWeights<T>) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.extent(),
                got: other.shape.extent(),
            });
        }
        self.values += &other.values;
        self.source = None;
        Ok(())
    }
}

/// Precomputed mapping and wrap offsets for one Gaussian on one grid.
struct WeightKernel<'a, T> {
    axis: LogFreqAxis<T>,
    offsets: Vec<i64>,
    dims: usize,
    spec: &'a GaussianSpec<T>,
}

impl<'a, T: Real> WeightKernel<'a, T> {
    fn new(spec: &'a GaussianSpec<T>, shape: &GridShape) -> Result<Self> {
        spec.check_dims(shape)?;
        let dims = shape.dims();
        let n = shape.size() as i64;
        let count = 3usize.pow(dims as u32);
        let mut offsets = Vec::with_capacity(count * dims);
        for mut code in 0..count {
            let start = offsets.len();
            offsets.resize(start + dims, 0);
            for slot in offsets[start..].iter_mut().rev() {
                *slot = (code % 3) as i64 * n - n;
                code /= 3;
            }
        }
        Ok(Self {
            axis: LogFreqAxis::new(shape.size())?,
            offsets,
            dims,
            spec,
        })
    }

    fn eval(&self, k: &[i64], shifted: &mut [i64], mapped: &mut [T]) -> T {
        let neg_inv_sigma = -self.spec.sigma.recip();
        self.offsets
            .chunks_exact(self.dims)
            .map(|l| {
                for ((s, &kc), &lc) in shifted.iter_mut().zip(k).zip(l) {
                    *s = kc + lc;
                }
                self.axis.map_into(shifted, mapped);
                let dist_sq: T = mapped
                    .iter()
                    .zip(&self.spec.mu)
                    .map(|(&m, &c)| (m - c) * (m - c))
                    .sum();
                (dist_sq * neg_inv_sigma).exp()
            })
            .sum()
    }
}

/// Weight of the Gaussian `spec` at grid frequency `k`, wrap terms included.
pub fn gaussian_weight<T: Real>(k: &[i64], spec: &GaussianSpec<T>, shape: &GridShape) -> Result<T> {
    if k.len() != shape.dims() {
        return Err(Error::DimensionMismatch {
            expected: shape.dims(),
            got: k.len(),
        });
    }
    let kernel = WeightKernel::new(spec, shape)?;
    let d = shape.dims();
    Ok(kernel.eval(k, &mut vec![0; d], &mut vec![T::zero(); d]))
}

/// Evaluates [`gaussian_weight`] over every grid point.
///
/// Far-tail weights may underflow to exactly zero in finite precision.
pub fn build_weights<T: Real>(spec: &GaussianSpec<T>, shape: GridShape) -> Result<FreqWeights<T>> {
    let kernel = WeightKernel::new(spec, &shape)?;
    let d = shape.dims();
    let data: Vec<T> = (0..shape.len())
        .into_par_iter()
        .map_init(
            || (vec![0i64; d], vec![0i64; d], vec![T::zero(); d]),
            |(k, shifted, mapped), i| {
                shape.coords_into(i, k);
                kernel.eval(k, shifted, mapped)
            },
        )
        .collect();
    let values =
        ArrayD::from_shape_vec(IxDyn(&shape.extent()), data).expect("extent matches grid length");
    Ok(FreqWeights {
        shape,
        values,
        source: Some(spec.clone()),
    })
}
