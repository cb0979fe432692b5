use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u64),
    #[error("the zero polynomial vanishes everywhere")]
    ZeroPolynomial,

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is rank deficient (pivot {pivot:e} at column {column})")]
    RankDeficient { column: usize, pivot: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("Gram matrix is singular for N = {n} < p = {p}")]
    SingularGram { p: usize, n: u64 },
    #[error("Weingarten table is not a class function at {0}")]
    NotClassFunction(String),

    #[error("matrices are not proportional")]
    NonScalarMismatch,

    #[error("invalid QAMD parameters: {0}")]
    InvalidParams(String),
    #[error("identity tampering (x = z = 0) is excluded")]
    IdentityTampering,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("invalid input: {0}")]
    Input(String),
}
