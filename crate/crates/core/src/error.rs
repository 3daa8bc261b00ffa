use alloc::string::String;
use core::fmt;

/// Crate-wide error type.
///
/// `BudgetExceeded` is the one refusal callers are expected to branch on
/// (the CLI maps it to a dedicated exit code); everything else is a domain
/// error on the inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A work estimate exceeded the configured budget.
    BudgetExceeded {
        required: u128,
        budget: u64,
        what: &'static str,
    },
    /// An argument fell outside its documented range.
    OutOfRange { what: &'static str },
    /// An intermediate value would not fit in 63-bit unsigned arithmetic.
    Overflow { what: &'static str },
    /// `gcd(a, n) != 1` where a unit was required.
    NotCoprime { a: u64, n: u64 },
    /// CRT moduli must be pairwise coprime.
    ModuliNotCoprime { m1: u64, m2: u64 },
    /// A prime modulus was required.
    NotPrime { n: u64 },
    /// A prime-power modulus `p^m` was required.
    NotPrimePower { q: u64 },
    /// All polynomial coefficients vanished after reduction.
    ZeroPolynomial,
    /// The coefficient content shares a factor with the modulus.
    ContentNotCoprime { gcd: u64 },
    /// Polynomial exponents must be at least 1.
    ExponentZero,
    /// Empty input where at least one element was required.
    EmptyInput { what: &'static str },
    /// The generator seed must be a unit.
    ZeroSeed,
    /// Negative indices need a purely periodic sequence.
    NotPurelyPeriodic,
    /// The exponent matrix of a monomial system must be triangular.
    NotTriangular,
    /// A coefficient polynomial has a zero over the field.
    ZeroValueFound { witness: u64 },
    /// Zero-freeness could not be verified and was not asserted by the caller.
    UnverifiedZeroFreeness,
    /// Ill-formed input with a free-form description.
    Invalid(String),
}

impl Error {
    /// True for refusals that should map to the budget exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BudgetExceeded {
                required,
                budget,
                what,
            } => {
                write!(
                    f,
                    "budget exceeded for {what}: needs {required}, budget is {budget}"
                )
            }
            Error::OutOfRange { what } => write!(f, "argument out of range: {what}"),
            Error::Overflow { what } => write!(f, "63-bit overflow in {what}"),
            Error::NotCoprime { a, n } => write!(f, "{a} is not a unit modulo {n}"),
            Error::ModuliNotCoprime { m1, m2 } => {
                write!(f, "moduli {m1} and {m2} are not coprime")
            }
            Error::NotPrime { n } => write!(f, "{n} is not prime"),
            Error::NotPrimePower { q } => write!(f, "{q} is not a prime power"),
            Error::ZeroPolynomial => write!(f, "all coefficients vanish modulo q"),
            Error::ContentNotCoprime { gcd } => {
                write!(f, "gcd of coefficients and modulus is {gcd}, expected 1")
            }
            Error::ExponentZero => write!(f, "exponents must be >= 1"),
            Error::EmptyInput { what } => write!(f, "empty input: {what}"),
            Error::ZeroSeed => write!(f, "generator seed must be nonzero modulo p"),
            Error::NotPurelyPeriodic => {
                write!(f, "negative indices require a purely periodic sequence")
            }
            Error::NotTriangular => write!(f, "exponent matrix is not triangular"),
            Error::ZeroValueFound { witness } => {
                write!(
                    f,
                    "coefficient polynomial vanishes at a point (witness {witness})"
                )
            }
            Error::UnverifiedZeroFreeness => {
                write!(f, "zero-freeness not verified; pass an explicit assertion")
            }
            Error::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
