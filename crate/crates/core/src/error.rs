use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be odd and at least 3, got {0}")]
    InvalidSize(usize),
    #[error("grid must have at least one dimension")]
    InvalidDims,
    #[error("grid {size}^{dims} exceeds the memory budget of {budget} elements")]
    MemoryBudget {
        dims: usize,
        size: usize,
        budget: usize,
    },
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("center has a non-finite component")]
    NonFiniteCenter,
    #[error("tensor of shape {got:?} does not match grid extent {expected:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("chord {delta_r} has no solution on a ring of radius {r_max}")]
    NoChordSolution { r_max: f64, delta_r: f64 },
    #[error("invalid bank spec: {0}")]
    InvalidBank(String),
    #[error("filter at mu = {mu:?} has a zero-energy real part")]
    DegenerateFilter { mu: Vec<f64> },
    #[error("signal must have at least one axis and no empty axes, got {0:?}")]
    InvalidSignal(Vec<usize>),
    #[error("filter extent {filter} exceeds signal extent {signal} on axis {axis}")]
    FilterTooLarge {
        axis: usize,
        filter: usize,
        signal: usize,
    },
}
