use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^62")]
    InvalidFieldModulus(u64),
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("unsupported discriminant {d}: {reason}")]
    UnsupportedDiscriminant { d: i64, reason: String },
    #[error("form ({a}, {b}, {c}) is not a primitive positive definite form")]
    NonPrimitiveForm { a: i64, b: i64, c: i64 },
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("prime {l} divides the conductor of {d}")]
    PrimeDividesConductor { l: u64, d: i64 },
    #[error("candidate generators exhausted after reaching {found} of {h} classes")]
    GeneratorsExhausted { found: u64, h: u64 },
    #[error("modular polynomial for l = {0} is not in the database")]
    MissingModularPolynomial(u64),
    #[error("modular polynomial database: {0}")]
    ModPolyDb(String),
    #[error("unsupported torsion level N = {0}")]
    UnsupportedTorsion(u32),
    #[error("parametrization degenerate after {0} attempts")]
    DegenerateParametrization(u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("prime p = {p} failed: {reason}")]
    PrimeFailure { p: u64, reason: String },
    #[error("no solution to 4q = t^2 - v^2 D for D = {d}, q = {q}")]
    NoCmSolution { d: i64, q: u64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
