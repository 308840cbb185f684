use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("moment c[{0},{1}] is not available")]
    MissingMoment(i64, i64),
    #[error("density sample {value:e} at grid point ({i},{j}) is not positive")]
    NonPositiveDensitySample { i: usize, j: usize, value: f64 },
    #[error("c[0,0] must be real, got imaginary part {0:e}")]
    NonRealCenter(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("moment matrix is not positive definite at level ({n},{m})")]
    NotPositiveDefinite { n: usize, m: usize },
    #[error(transparent)]
    Inadmissible(#[from] Inadmissible),
    #[error("trigonometric polynomial is not strictly positive (minimum {min_value:e})")]
    NotStrictlyPositive { min_value: f64 },
}

/// The admissibility condition that failed during synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    CenterNotPositive,
    AxisReflection,
    AxisReflectionT,
    KContraction,
    K1Contraction,
    CornerDefect,
    Factorization,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Condition::CenterNotPositive => "u[0,0] must be real and positive",
            Condition::AxisReflection => "|u[i,0]| < 1",
            Condition::AxisReflectionT => "|u[0,j]| < 1",
            Condition::KContraction => "||K|| < 1",
            Condition::K1Contraction => "||K1|| < 1",
            Condition::CornerDefect => "corner defect h3 < 1",
            Condition::Factorization => "defect matrix not positive definite",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("inadmissible parameters at level ({n},{m}): {condition} fails (value {value:.6e})")]
pub struct Inadmissible {
    pub n: usize,
    pub m: usize,
    pub condition: Condition,
    pub value: f64,
}

pub type Result<T> = std::result::Result<T, Error>;
