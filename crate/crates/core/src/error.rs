use thiserror::Error;

/// Errors surfaced by the library. Mathematical precondition violations are
/// distinguished from search-budget exhaustion so callers can map them to
/// different exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("operands belong to different coefficient fields")]
    FieldMismatch,
    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("generators span a module of rank < 2")]
    RankDeficient,
    #[error("matrix is singular over the fraction field")]
    Singular,
    #[error("polynomial is not square-free: {0}")]
    NotSquareFree(String),
    #[error("infinite place splits: the field k(sqrt({0})) is real")]
    RealField(String),
    #[error("constant D gives a degenerate constant-field extension")]
    DegenerateConstantField,
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("polynomial is not irreducible: {0}")]
    NotIrreducible(String),
    #[error("first lattice is not contained in the second")]
    NotContained,
    #[error("lattice is not a module over the given order")]
    OrderMismatch,
    #[error("quotient is not cyclic")]
    NotCyclic,
    #[error("moduli point level does not match the quotient index")]
    LevelMismatch,
    #[error("{0} does not divide {1}")]
    NotDivisor(String, String),
    #[error("arguments are not coprime: gcd contains {0}")]
    NotCoprime(String),
    #[error("module is not proper: multiplier ring is strictly larger than the given order")]
    NotProper,
    #[error("ideal is not invertible over the given order")]
    NotInvertible,
    #[error("scaling a lattice by zero")]
    ZeroScale,
    #[error("enumeration budget exceeded (limit {0})")]
    BudgetExceeded(usize),
    #[error("zeta-function class number oracle is only defined for ramified (odd-degree) D")]
    InertCaseUnsupported,
    #[error("prime {0} does not split in K")]
    NonSplitPrime(String),
    #[error("tower prime divides the level n")]
    PDividesN,
    #[error("level n must be square-free")]
    NotSquareFreeLevel,
    #[error("no admissible theta element below the horizon; raise the horizon or the degree bound")]
    NoWitnessInHorizon,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
