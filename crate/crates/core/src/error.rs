use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("empty integration span: start {start} is not below end {end}")]
    EmptySpan { start: f64, end: f64 },

    #[error("non-finite value while evaluating the vector field at y = {y}")]
    Diverged { y: f64 },

    #[error("inadmissible dimension d = {d} for {model} (requires d > {min})")]
    InadmissibleDimension { model: &'static str, d: f64, min: f64 },

    #[error("vector field evaluated at y = {0}; the origin is handled by the series launch")]
    Domain(f64),

    #[error("invalid origin data: {0}")]
    InvalidOrigin(String),

    #[error("series order {requested} exceeds the supported maximum {max}")]
    SeriesOrder { requested: usize, max: usize },

    #[error("y = {y} lies on the pole of the explicit profile (pole at {pole})")]
    Pole { y: f64, pole: f64 },

    #[error("{0} is only defined for the harmonic-map model")]
    Unsupported(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bracket [{a_lo}, {a_hi}] dissolved: shooting functional has the same sign at both ends")]
    BracketDissolved { a_lo: f64, a_hi: f64 },

    #[error("two-sided matching did not converge: residual {residual:e} after {iterations} iterations")]
    MatchFailed { residual: f64, iterations: usize },

    #[error("candidate at a = {a} deviates from the equator by {deviation:e} at the match point, below the noise level {noise:e}")]
    Unresolved { a: f64, deviation: f64, noise: f64 },

    #[error("eigensolve did not converge: residual {residual:e}")]
    Eigensolve { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
