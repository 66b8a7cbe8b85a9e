use thiserror::Error;

/// Every failure the pipeline can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands come from different backends or variable contexts")]
    BackendMismatch,
    #[error("jet order budget exhausted")]
    JetOrderExhausted,
    #[error("a denominator vanishes at the requested point")]
    SingularPoint,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("complementary submatrix for the requested pivots is singular")]
    BadPivots,
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("division by the identically zero function")]
    ZeroDenominator,
    #[error("degenerate vector field: {0}")]
    DegenerateField(String),
    #[error("subset must keep every coordinate field and at least one more: {0}")]
    BadSubset(String),
    #[error("multi-index order exceeds the table bound")]
    OrderOverflow,
    #[error("matrix rank {found} differs from the expected {expected}")]
    RankDeficient { expected: usize, found: usize },
    #[error("prolonged system is inconsistent at equation {label}")]
    InconsistentProlongation { label: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
