use thiserror::Error;

/// Errors surfaced by the library. Each variant carries a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not a prime power")]
    NotPrimePower(String),

    #[error("gcd({p}, {modulus}) != 1")]
    NotCoprime { p: u64, modulus: u64 },

    #[error("type {{{m},{n}}} is not hyperbolic")]
    NotHyperbolic { m: u64, n: u64 },

    #[error("genus is not integral for m={m}, n={n}, q={q}")]
    NonIntegralGenus { m: u64, n: u64, q: String },

    #[error("inadmissible (m, n, p) = ({m}, {n}, {p}): {reason}")]
    Inadmissible { m: u64, n: u64, p: u64, reason: String },

    #[error("bad reduction: {what} is not squarefree mod {p}")]
    BadReduction { what: String, p: u64 },

    #[error("degenerate trace class at p={p}: s = 0")]
    DegenerateTrace { p: u64 },

    #[error("unsupported m = {0}; only m in {{3, 4, 6}} have rational ω²")]
    UnsupportedM(u64),

    #[error("leading coefficient vanishes mod {0}")]
    LeadingCoefficientVanishes(u64),

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("elements belong to different field contexts")]
    MixedContexts,

    #[error("exact division left a nonzero remainder: {0}")]
    InexactDivision(String),

    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("no prediction available for an unknown Galois structure (n = {0})")]
    NoPrediction(u64),

    #[error("matrix oracle found no solvable x for {0}")]
    OracleNoSolution(String),

    #[error("parity rule violated at (m, n, p) = ({m}, {n}, {p})")]
    ParityViolation { m: u64, n: u64, p: u64 },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable identifier printed by the CLI next to diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NotPrimePower(_) => "not-prime-power",
            Error::NotCoprime { .. } => "not-coprime",
            Error::NotHyperbolic { .. } => "not-hyperbolic",
            Error::NonIntegralGenus { .. } => "non-integral-genus",
            Error::Inadmissible { .. } => "inadmissible",
            Error::BadReduction { .. } => "bad-reduction",
            Error::DegenerateTrace { .. } => "degenerate-trace",
            Error::UnsupportedM(_) => "unsupported-m",
            Error::LeadingCoefficientVanishes(_) => "leading-coefficient-vanishes",
            Error::DivisionByZero(_) => "division-by-zero",
            Error::MixedContexts => "mixed-contexts",
            Error::InexactDivision(_) => "inexact-division",
            Error::BoundExceeded(_) => "bound-exceeded",
            Error::NoPrediction(_) => "no-prediction",
            Error::OracleNoSolution(_) => "oracle-no-solution",
            Error::ParityViolation { .. } => "parity-violation",
            Error::Inconsistent(_) => "internal-inconsistency",
            Error::Io(_) => "io",
            Error::Format(_) => "format",
        }
    }

    /// Domain errors are the expected failure modes of a well-formed request
    /// (bad reduction, inadmissible type); everything else is a usage or
    /// internal error.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::NotHyperbolic { .. }
                | Error::NonIntegralGenus { .. }
                | Error::Inadmissible { .. }
                | Error::BadReduction { .. }
                | Error::DegenerateTrace { .. }
                | Error::UnsupportedM(_)
                | Error::NotCoprime { .. }
                | Error::NotPrimePower(_)
                | Error::NoPrediction(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
