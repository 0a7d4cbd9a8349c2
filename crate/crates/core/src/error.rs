use thiserror::Error;

/// Errors raised by the toolkit. Variants map onto the CLI exit codes:
/// [`Error::BudgetExceeded`] is exit code 3, everything else is a
/// validation failure (exit code 2).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("binary form must have degree at least 1 (got {0} coefficients)")]
    MalformedForm(usize),
    #[error("degree {0} is not supported here (even degree >= 2 required)")]
    UnsupportedDegree(usize),
    #[error("the form has zero discriminant")]
    DegenerateForm,
    #[error("the form has zero leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("the form reduces to zero modulo {0}")]
    ZeroForm(u128),
    #[error("the reduction modulo {0} is not separable")]
    NotSeparable(u128),
    #[error("{0} is not prime")]
    NotPrime(u128),
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: String },
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("point does not lie on the curve")]
    NotOnCurve,
    #[error("point coordinates (x, y) are not coprime")]
    NonPrimitivePoint,
    #[error("Weierstrass point (z = 0) is not supported")]
    WeierstrassPoint,
    #[error("elements belong to different algebras")]
    MismatchedForms,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("the form has a rational root; the linear element is a zero divisor")]
    RationalRoot,
    #[error("ideal basis is linearly dependent")]
    DependentBasis,
    #[error("pair data is not integral: product ({0}, {1}) leaves the target ideal")]
    NonIntegralPairData(usize, usize),
    #[error("no primes of good reduction found below {0}")]
    NoGoodPrimes(u64),
    #[error("zero samples requested")]
    ZeroSamples,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
