//! Frequency-domain application of filters and banks to real signals.
//!
//! The response to signal `s` is `r(x) = sum_n f(n) s(x - n)`, with the real
//! and imaginary filter parts applied together as one complex kernel. A unit
//! impulse at `c` therefore yields the filter, as stored, centered at `c`.
//! Signals may have any per-axis size; the filter is zero-padded to the
//! signal extent before transforming.

use ndarray::{ArrayD, Axis, IxDyn, Slice, Zip};
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::bank::FilterBank;
use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::scalar::Real;
use crate::transform::{cyclic_shift, fftn, ComplexFilter};

/// Boundary handling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Periodic signal; the filter must fit inside the signal on every axis.
    Circular,
    /// Zero-pad by `(N-1)/2` per side, convolve, crop back to the signal extent.
    Padded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signal<T> {
    values: ArrayD<T>,
}

impl<T: Real> Signal<T> {
    pub fn new(values: ArrayD<T>) -> Result<Self> {
        if values.ndim() == 0 || values.shape().contains(&0) {
            return Err(Error::InvalidSignal(values.shape().to_vec()));
        }
        Ok(Self {
            values: values.as_standard_layout().into_owned(),
        })
    }

    /// Zeros everywhere except a one at `at`.
    pub fn impulse(extent: &[usize], at: &[usize]) -> Result<Self> {
        let mut values = ArrayD::zeros(IxDyn(extent));
        values[IxDyn(at)] = T::one();
        Self::new(values)
    }

    pub fn values(&self) -> &ArrayD<T> {
        &self.values
    }

    pub fn extent(&self) -> &[usize] {
        self.values.shape()
    }
}

/// Per-filter responses of a bank, in bank order.
#[derive(Clone, Debug)]
pub struct ResponseSet<T> {
    pub responses: Vec<ArrayD<Complex<T>>>,
    /// L2 norm of each complex response.
    pub energies: Vec<T>,
}

struct Prepared<T> {
    spectrum: ArrayD<Complex<T>>,
    crop: Option<(usize, Vec<usize>)>,
}

impl<T: Real> Prepared<T> {
    fn new(signal: &Signal<T>, shape: GridShape, mode: Mode) -> Result<Self> {
        let extent = signal.extent();
        if extent.len() != shape.dims() {
            return Err(Error::DimensionMismatch {
                expected: shape.dims(),
                got: extent.len(),
            });
        }
        let h = shape.half() as usize;
        let complex = signal.values.mapv(|v| Complex::new(v, T::zero()));
        let (mut work, crop) = match mode {
            Mode::Circular => {
                if let Some((axis, &len)) =
                    extent.iter().enumerate().find(|(_, &l)| l < shape.size())
                {
                    return Err(Error::FilterTooLarge {
                        axis,
                        filter: shape.size(),
                        signal: len,
                    });
                }
                (complex, None)
            }
            Mode::Padded => {
                let padded: Vec<usize> = extent.iter().map(|l| l + 2 * h).collect();
                let mut work =
                    ArrayD::from_elem(IxDyn(&padded), Complex::new(T::zero(), T::zero()));
                let mut window = work.view_mut();
                for (ax, &len) in extent.iter().enumerate() {
                    window.slice_axis_inplace(Axis(ax), Slice::from(h..h + len));
                }
                window.assign(&complex);
                (work, Some((h, extent.to_vec())))
            }
        };
        fftn(&mut work, FftDirection::Forward);
        Ok(Self {
            spectrum: work,
            crop,
        })
    }

    fn filter_spectrum(&self, f: &ComplexFilter<T>) -> ArrayD<Complex<T>> {
        let extent = self.spectrum.shape().to_vec();
        let n = f.shape().size();
        let h = f.shape().half() as usize;
        let mut embedded = ArrayD::from_elem(IxDyn(&extent), Complex::new(T::zero(), T::zero()));
        let mut corner = embedded.view_mut();
        for ax in 0..extent.len() {
            corner.slice_axis_inplace(Axis(ax), Slice::from(0..n));
        }
        corner.assign(&f.to_complex());
        // Storage index i holds coordinate i - h; move it to (i - h) mod L.
        let shifts: Vec<usize> = extent.iter().map(|&l| l - h).collect();
        let mut embedded = cyclic_shift(&embedded, &shifts);
        fftn(&mut embedded, FftDirection::Forward);
        embedded
    }

    fn product(&self, f: &ComplexFilter<T>) -> ArrayD<Complex<T>> {
        let mut spec = self.filter_spectrum(f);
        Zip::from(&mut spec)
            .and(&self.spectrum)
            .for_each(|a, &b| *a *= b);
        spec
    }

    fn respond(&self, f: &ComplexFilter<T>) -> ArrayD<Complex<T>> {
        let mut out = self.product(f);
        fftn(&mut out, FftDirection::Inverse);
        let scale = T::from_usize(out.len()).unwrap().recip();
        out.mapv_inplace(|c| c * scale);
        match &self.crop {
            None => out,
            Some((h, extent)) => {
                let mut view = out.view();
                for (ax, &len) in extent.iter().enumerate() {
                    view.slice_axis_inplace(Axis(ax), Slice::from(*h..*h + len));
                }
                view.to_owned()
            }
        }
    }
}

/// L2 norm of a complex tensor.
pub fn response_energy<T: Real>(r: &ArrayD<Complex<T>>) -> T {
    r.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Complex response of one filter.
pub fn convolve<T: Real>(
    signal: &Signal<T>,
    f: &ComplexFilter<T>,
    mode: Mode,
) -> Result<ArrayD<Complex<T>>> {
    Ok(Prepared::new(signal, f.shape(), mode)?.respond(f))
}

/// Circular-mode response energy computed from the spectra alone, by
/// Parseval: `sqrt(sum |S F|^2 / M)`.
pub fn spectral_energy<T: Real>(signal: &Signal<T>, f: &ComplexFilter<T>) -> Result<T> {
    let prepared = Prepared::new(signal, f.shape(), Mode::Circular)?;
    let product = prepared.product(f);
    let m = T::from_usize(product.len()).unwrap();
    Ok((product.iter().map(|c| c.norm_sqr()).sum::<T>() / m).sqrt())
}

/// Responses of every bank filter, computed in parallel from one signal
/// spectrum.
pub fn apply_bank<T: Real>(
    signal: &Signal<T>,
    bank: &FilterBank<T>,
    mode: Mode,
) -> Result<ResponseSet<T>> {
    let filters: Vec<&ComplexFilter<T>> = bank.filters.iter().map(|bf| &bf.filter).collect();
    apply_filters(signal, &filters, mode)
}

/// Like [`apply_bank`] for a loose list of filters sharing one grid.
pub fn apply_filters<T: Real>(
    signal: &Signal<T>,
    filters: &[&ComplexFilter<T>],
    mode: Mode,
) -> Result<ResponseSet<T>> {
    let Some(first) = filters.first() else {
        return Ok(ResponseSet {
            responses: Vec::new(),
            energies: Vec::new(),
        });
    };
    let shape = first.shape();
    if let Some(other) = filters.iter().find(|f| f.shape() != shape) {
        return Err(Error::ShapeMismatch {
            expected: shape.extent(),
            got: other.shape().extent(),
        });
    }
    let prepared = Prepared::new(signal, shape, mode)?;
    let responses: Vec<_> = filters.par_iter().map(|f| prepared.respond(f)).collect();
    let energies = responses.iter().map(response_energy).collect();
    Ok(ResponseSet {
        responses,
        energies,
    })
}
