use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over F_{0}")]
    Reducible(u32),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeLimit { what: &'static str, size: u128, limit: u128 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{m} does not divide {n}")]
    NotADivisor { m: u32, n: u32 },
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("operation needs odd characteristic")]
    EvenCharacteristic,
    #[error("bad exponent {0}")]
    BadExponent(i128),
    #[error("domain mismatch: {0}")]
    DomainMismatch(&'static str),
    #[error("map is not a permutation")]
    NotPermutation,
    #[error("x -> f(x) - x is not a permutation")]
    NotOrthomorphism,
    #[error("c must avoid 0 and 1")]
    BadC,
    #[error("bad twist: {0}")]
    BadTwist(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("A - I is singular")]
    ShiftSingular,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("function is not quadratic")]
    NotQuadratic,
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("orthomorphism is not linearized")]
    NotLinearOrtho,
    #[error("{0} and {1} are not coprime")]
    NotCoprime(i128, i128),
    #[error("{0} is not positive")]
    NonPositive(i128),
    #[error("expression error: {0}")]
    Expr(String),
    #[error("undefined: {0}")]
    Undefined(String),
}
