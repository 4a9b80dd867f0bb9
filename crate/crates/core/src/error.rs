use thiserror::Error;

/// Which compatibility predicate failed when assembling a structure triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompatibilityCheck {
    /// `s = C J` is not symmetric.
    Symmetry,
    /// `s = C J` is symmetric but not positive definite.
    Positivity,
}

impl std::fmt::Display for CompatibilityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompatibilityCheck::Symmetry => f.write_str("s = CJ is not symmetric"),
            CompatibilityCheck::Positivity => f.write_str("s = CJ is not positive definite"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension {dim} is outside the supported range {min}..={max}")]
    DimensionOutOfRange { dim: usize, min: usize, max: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("matrix is not Hermitean (residual {residual:e})")]
    NotHermitean { residual: f64 },

    #[error("matrix is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },

    #[error("J is not a complex structure: |J^2 + 1| = {residual:e}")]
    NotComplexStructure { residual: f64 },

    #[error("incompatible structures: {check} (residual {residual:e})")]
    Incompatible {
        check: CompatibilityCheck,
        residual: f64,
    },

    #[error("not Hamiltonian w.r.t. C: A C^-1 is asymmetric (residual {residual:e})")]
    NotHamiltonian { residual: f64 },

    #[error("T is not a symmetry of A: |T^-1 A T - A| = {residual:e}")]
    NotASymmetry { residual: f64 },

    #[error("transported relation {relation} violated (residual {residual:e})")]
    TransportFailed {
        relation: &'static str,
        residual: f64,
    },

    #[error("table entry {index} is not positive ({value})")]
    NonPositive { index: usize, value: f64 },

    #[error("singular modes {modes:?}: the alternative Hamiltonian vanishes there")]
    SingularModes { modes: Vec<usize> },

    #[error("f vanishes at n = {index}, inside the requested range")]
    ZeroOfF { index: usize },

    #[error("table has {found} entries, at least {required} required")]
    TableTooShort { required: usize, found: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
