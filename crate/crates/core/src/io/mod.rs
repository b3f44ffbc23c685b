//! On-disk formats: the `LGFB1` tensor container, 8-bit PGM images and the
//! JSON bank/filter configuration files.

mod config;
mod image;
mod tensor;

use thiserror::Error;

pub use config::{
    load_bank_config, load_filter_config, BankConfigFile, FilterConfigFile, PruneSetting,
    ThetaStepSetting,
};
pub use image::{
    decode_pgm, encode_pgm, export_image, mosaic, read_pgm, to_gray, write_pgm, Normalization,
};
pub use tensor::{
    read_tensor, write_tensor, Dtype, Layout, Semantic, TensorData, TensorFile, TensorHeader,
    TensorMeta, MAGIC,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("missing LGFB1 magic")]
    BadMagic,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("payload of {actual} bytes does not match shape {shape:?} ({expected} bytes)")]
    ShapeMismatch {
        shape: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("expected dtype {expected}, found {found}")]
    DtypeMismatch { expected: Dtype, found: Dtype },
    #[error("expected a {expected} tensor, found {found}")]
    SemanticMismatch { expected: Semantic, found: Semantic },
    #[error("image export needs a 2-D tensor, got {0} dimensions")]
    NotTwoDimensional(usize),
    #[error("malformed PGM: {0}")]
    MalformedImage(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] crate::Error),
}
