use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("bad characteristic: {0}")]
    BadCharacteristic(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("coordinate change has a non-invertible linear part")]
    NonInvertibleLinearPart,
    #[error("no maximal contact: order {ord} differs from a1 = {a1}")]
    NoContact { ord: String, a1: String },
    #[error("milling requires characteristic zero")]
    NotCharZero,
    #[error("the ideal is the unit ideal at the point")]
    UnitIdeal,
    #[error("center weights are not integral: {0}")]
    NonIntegralWeights(String),
    #[error("center is not admissible: {0}")]
    NonAdmissible(String),
    #[error("input is not weighted homogeneous")]
    NotHomogeneous,
    #[error("vector is not in the interior of the cone")]
    VNotInterior,
    #[error("vector is not in the support of the fan")]
    VNotInSupport,
    #[error("variable sets do not match: {0}")]
    RingMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
