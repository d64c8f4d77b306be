use thiserror::Error;

/// Errors raised by the algebra kernels.
///
/// Failed verifications are not errors: they are reported through the
/// various report types. An `Error` means an operation was asked to do
/// something outside its contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields (conductors {0} and {1})")]
    FieldMismatch(u32, u32),
    #[error("conductor {from} does not divide {to}")]
    NotDivisible { from: u32, to: u32 },
    #[error("operands live in different polynomial rings")]
    RingMismatch,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("negative exponent at byte {0}")]
    NegativeExponent(usize),
    #[error("invalid variable list: {0}")]
    InvalidVariables(String),
    #[error("the zero polynomial has no order")]
    ZeroPolynomial,
    #[error("coprimality undecidable here: `{0}` is not a monomial")]
    NotMonomial(String),
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("incompatible factorizations: {0}")]
    Incompatible(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("{0} is not a primitive root of unity of order {1}")]
    NotPrimitiveRoot(String, u32),
}

pub type Result<T> = std::result::Result<T, Error>;
