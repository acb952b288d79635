use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scalar kinds differ between operands")]
    KindMismatch,
    #[error("ANTISYMMETRY_VIOLATION: c[{i}][{j}][{k}] != -c[{j}][{i}][{k}]")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },
    #[error("JACOBI_VIOLATION: Jacobi sum for (e{i}, e{j}, e{k}) has nonzero e{l} component")]
    JacobiViolation { i: usize, j: usize, k: usize, l: usize },
    #[error("SINGULAR: {0}")]
    Singular(String),
    #[error("J does not square to -Id")]
    NotComplexStructure,
    #[error("NON_INTEGRABLE: Nijenhuis tensor is nonzero")]
    NonIntegrable,
    #[error("metric is not symmetric positive-definite")]
    DegenerateMetric,
    #[error("metric is not J-invariant")]
    NotHermitian,
    #[error("IDEAL_NOT_ABELIAN: {0}")]
    IdealNotAbelian(String),
    #[error("J_NOT_COMPATIBLE: {0}")]
    JNotCompatible(String),
    #[error("adapted basis needs an irrational normalization; use the float kernel")]
    IrrationalNormalization,
    #[error("not almost abelian: no codimension-one abelian ideal")]
    NotAlmostAbelian,
    #[error("PRECONDITION: {0}")]
    Precondition(String),
    #[error("BAD_DIMENSION: {0}")]
    BadDimension(String),
    #[error("NOT_ADMISSIBLE: {0}")]
    NotAdmissible(String),
    #[error("CONSTRAINT_VIOLATION: {0}")]
    ConstraintViolation(String),
    #[error("WITNESS_FAILURE: {0}")]
    WitnessFailure(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("syntax error at line {line}, column {column} (offset {offset}): {message}")]
    Syntax { offset: usize, line: usize, column: usize, message: String },
    #[error("index out of range at line {line}, column {column}: {message}")]
    IndexOutOfRange { offset: usize, line: usize, column: usize, message: String },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
}

impl Error {
    /// Errors caused by malformed input rather than by the mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::KindMismatch
                | Error::AntisymmetryViolation { .. }
                | Error::JacobiViolation { .. }
                | Error::NotComplexStructure
                | Error::DegenerateMetric
                | Error::NotHermitian
                | Error::Syntax { .. }
                | Error::IndexOutOfRange { .. }
                | Error::UnboundParameter(_)
                | Error::UnknownEntry(_)
                | Error::BadDimension(_)
                | Error::ConstraintViolation(_)
        )
    }
}
