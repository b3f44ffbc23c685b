//! `LGFB1` tensor container.
//!
//! ```text
//! "LGFB1" | header length: u32 LE | header: UTF-8 JSON | payload: f64 LE
//! ```
//!
//! Complex payloads interleave real and imaginary parts per element. Element
//! order is row-major; over a centered grid, storage index `i` holds
//! coordinate `i - (N-1)/2`.

use std::fmt;
use std::path::Path;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::apply::Signal;
use crate::grid::GridShape;
use crate::scalar::Real;
use crate::synth::{FreqWeights, GaussianSpec};
use crate::transform::ComplexFilter;

pub const MAGIC: &[u8; 5] = b"LGFB1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F64,
    C128,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::F64 => 8,
            Dtype::C128 => 16,
        }
    }
}

impl fmt::Display for Dtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dtype::F64 => "f64",
            Dtype::C128 => "c128",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    RowMajorCentered,
    RowMajor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantic {
    FreqWeights,
    Filter,
    Response,
    Signal,
}

impl fmt::Display for Semantic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantic::FreqWeights => "freq-weights",
            Semantic::Filter => "filter",
            Semantic::Response => "response",
            Semantic::Signal => "signal",
        })
    }
}

/// Gaussian provenance of weights and filters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorMeta {
    pub mu: Vec<f64>,
    pub sigma: f64,
    pub n: usize,
    pub d: usize,
}

impl TensorMeta {
    fn from_source<T: Real>(source: Option<&GaussianSpec<T>>, shape: GridShape) -> Option<Self> {
        source.map(|s| Self {
            mu: s.mu().iter().map(|c| c.as_f64()).collect(),
            sigma: s.sigma().as_f64(),
            n: shape.size(),
            d: shape.dims(),
        })
    }

    fn to_spec(&self) -> Result<GaussianSpec<f64>, FormatError> {
        Ok(GaussianSpec::new(self.mu.clone(), self.sigma)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorHeader {
    pub dtype: Dtype,
    pub shape: Vec<usize>,
    pub layout: Layout,
    pub semantic: Semantic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<TensorMeta>,
}

impl TensorHeader {
    fn payload_len(&self) -> Option<usize> {
        self.shape
            .iter()
            .try_fold(self.dtype.width(), |acc, &d| acc.checked_mul(d))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TensorData {
    Real(ArrayD<f64>),
    Complex { re: ArrayD<f64>, im: ArrayD<f64> },
}

impl TensorData {
    pub fn shape(&self) -> &[usize] {
        match self {
            TensorData::Real(v) => v.shape(),
            TensorData::Complex { re, .. } => re.shape(),
        }
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            TensorData::Real(_) => Dtype::F64,
            TensorData::Complex { .. } => Dtype::C128,
        }
    }
}

/// A header plus its tensor; the header's dtype and shape always describe
/// the data.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorFile {
    header: TensorHeader,
    data: TensorData,
}

impl TensorFile {
    pub fn new(
        semantic: Semantic,
        layout: Layout,
        data: TensorData,
        meta: Option<TensorMeta>,
    ) -> Result<Self, FormatError> {
        let data = match data {
            TensorData::Real(v) => TensorData::Real(v.as_standard_layout().into_owned()),
            TensorData::Complex { re, im } => {
                if re.shape() != im.shape() {
                    return Err(FormatError::ShapeMismatch {
                        shape: re.shape().to_vec(),
                        expected: re.len() * 8,
                        actual: im.len() * 8,
                    });
                }
                TensorData::Complex {
                    re: re.as_standard_layout().into_owned(),
                    im: im.as_standard_layout().into_owned(),
                }
            }
        };
        Ok(Self {
            header: TensorHeader {
                dtype: data.dtype(),
                shape: data.shape().to_vec(),
                layout,
                semantic,
                meta,
            },
            data,
        })
    }

    pub fn from_weights<T: Real>(w: &FreqWeights<T>) -> Self {
        let data = TensorData::Real(w.values().mapv(|v| v.as_f64()));
        let meta = TensorMeta::from_source(w.source(), w.shape());
        Self::new(Semantic::FreqWeights, Layout::RowMajorCentered, data, meta)
            .expect("weights are well formed")
    }

    pub fn from_filter<T: Real>(f: &ComplexFilter<T>) -> Self {
        let data = TensorData::Complex {
            re: f.re().mapv(|v| v.as_f64()),
            im: f.im().mapv(|v| v.as_f64()),
        };
        let meta = TensorMeta::from_source(f.source(), f.shape());
        Self::new(Semantic::Filter, Layout::RowMajorCentered, data, meta)
            .expect("filter parts share a shape")
    }

    pub fn from_response<T: Real>(r: &ArrayD<Complex<T>>) -> Self {
        let data = TensorData::Complex {
            re: r.mapv(|c| c.re.as_f64()),
            im: r.mapv(|c| c.im.as_f64()),
        };
        Self::new(Semantic::Response, Layout::RowMajor, data, None).expect("same shape")
    }

    pub fn from_signal<T: Real>(s: &Signal<T>) -> Self {
        let data = TensorData::Real(s.values().mapv(|v| v.as_f64()));
        Self::new(Semantic::Signal, Layout::RowMajor, data, None).expect("real data")
    }

    pub fn header(&self) -> &TensorHeader {
        &self.header
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn into_data(self) -> TensorData {
        self.data
    }

    fn expect_semantic(&self, expected: Semantic) -> Result<(), FormatError> {
        if self.header.semantic != expected {
            return Err(FormatError::SemanticMismatch {
                expected,
                found: self.header.semantic,
            });
        }
        Ok(())
    }

    fn grid(&self) -> Result<GridShape, FormatError> {
        let shape = &self.header.shape;
        let size = shape.first().copied().unwrap_or(0);
        if shape.iter().any(|&s| s != size) {
            return Err(FormatError::MalformedHeader(format!(
                "shape {shape:?} is not a square grid"
            )));
        }
        Ok(GridShape::new(shape.len(), size)?)
    }

    pub fn into_real(self) -> Result<ArrayD<f64>, FormatError> {
        match self.data {
            TensorData::Real(v) => Ok(v),
            TensorData::Complex { .. } => Err(FormatError::DtypeMismatch {
                expected: Dtype::F64,
                found: Dtype::C128,
            }),
        }
    }

    pub fn into_complex(self) -> Result<(ArrayD<f64>, ArrayD<f64>), FormatError> {
        match self.data {
            TensorData::Complex { re, im } => Ok((re, im)),
            TensorData::Real(_) => Err(FormatError::DtypeMismatch {
                expected: Dtype::C128,
                found: Dtype::F64,
            }),
        }
    }

    pub fn into_weights(self) -> Result<FreqWeights<f64>, FormatError> {
        self.expect_semantic(Semantic::FreqWeights)?;
        let shape = self.grid()?;
        let source = self
            .header
            .meta
            .as_ref()
            .map(TensorMeta::to_spec)
            .transpose()?;
        Ok(FreqWeights::from_values(shape, self.into_real()?)?.with_source(source))
    }

    pub fn into_filter(self) -> Result<ComplexFilter<f64>, FormatError> {
        self.expect_semantic(Semantic::Filter)?;
        let shape = self.grid()?;
        let source = self
            .header
            .meta
            .as_ref()
            .map(TensorMeta::to_spec)
            .transpose()?;
        let (re, im) = self.into_complex()?;
        Ok(ComplexFilter::from_parts(shape, re, im, source)?)
    }

    pub fn into_signal(self) -> Result<Signal<f64>, FormatError> {
        self.expect_semantic(Semantic::Signal)?;
        Ok(Signal::new(self.into_real()?)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header).expect("header serializes");
        let payload_len = self.header.payload_len().unwrap_or(0);
        let mut out = Vec::with_capacity(MAGIC.len() + 4 + header.len() + payload_len);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        match &self.data {
            TensorData::Real(v) => {
                for x in v.iter() {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
            TensorData::Complex { re, im } => {
                for (a, b) in re.iter().zip(im.iter()) {
                    out.extend_from_slice(&a.to_le_bytes());
                    out.extend_from_slice(&b.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(FormatError::BadMagic);
        }
        let rest = &bytes[MAGIC.len()..];
        let len_bytes: [u8; 4] = rest
            .get(..4)
            .and_then(|b| b.try_into().ok())
            .ok_or_else(|| FormatError::MalformedHeader("missing header length".into()))?;
        let header_len = u32::from_le_bytes(len_bytes) as usize;
        let header_bytes = rest
            .get(4..4 + header_len)
            .ok_or_else(|| FormatError::MalformedHeader("header cut short".into()))?;
        let header: TensorHeader = serde_json::from_slice(header_bytes)
            .map_err(|e| FormatError::MalformedHeader(e.to_string()))?;
        let expected = header
            .payload_len()
            .ok_or_else(|| FormatError::MalformedHeader("shape overflows".into()))?;
        let payload = &rest[4 + header_len..];
        if payload.len() < expected {
            return Err(FormatError::TruncatedPayload {
                expected,
                actual: payload.len(),
            });
        }
        if payload.len() > expected {
            return Err(FormatError::ShapeMismatch {
                shape: header.shape.clone(),
                expected,
                actual: payload.len(),
            });
        }
        let floats: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let dim = IxDyn(&header.shape);
        let data = match header.dtype {
            Dtype::F64 => {
                TensorData::Real(ArrayD::from_shape_vec(dim, floats).expect("length checked"))
            }
            Dtype::C128 => {
                let re = floats.iter().step_by(2).copied().collect();
                let im = floats.iter().skip(1).step_by(2).copied().collect();
                TensorData::Complex {
                    re: ArrayD::from_shape_vec(dim.clone(), re).expect("length checked"),
                    im: ArrayD::from_shape_vec(dim, im).expect("length checked"),
                }
            }
        };
        Ok(Self { header, data })
    }
}

pub fn write_tensor(t: &TensorFile, path: impl AsRef<Path>) -> Result<(), FormatError> {
    std::fs::write(path, t.to_bytes())?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<TensorFile, FormatError> {
    TensorFile::from_bytes(&std::fs::read(path)?)
}
