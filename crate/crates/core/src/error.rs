use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different rings: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact")]
    NonExactDivision,
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    #[error("substitution is undefined: {0}")]
    UndefinedSubstitution(String),
    #[error("coefficient denominator is divisible by {0}")]
    CoefficientNotInvertible(u64),
    #[error("image denominator vanishes modulo {0}")]
    DenominatorVanishesModP(u64),
    #[error("both polynomials are constant in `{0}`")]
    ConstantInVariable(String),
    #[error("expected degree {expected} in `{var}`, found {found}")]
    WrongDegree { var: String, expected: u32, found: u32 },
    #[error("leading coefficient in `{0}` is identically zero")]
    ZeroLeadingCoefficient(String),
    #[error("elimination collapsed to zero")]
    DegenerateElimination,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
