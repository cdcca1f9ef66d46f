use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("zero argument where a unit is required")]
    ZeroArgument,
    #[error("form is isotropic at the infinite place")]
    NotDefinite,
    #[error("singular Gram matrix")]
    SingularForm,
    #[error("degenerate local form")]
    DegenerateForm,
    #[error("work budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("insufficient Laurent precision: exponent {wanted} requested, known down to {known}")]
    InsufficientPrecision { wanted: i64, known: i64 },
    #[error("spectrum bound too small to determine the answer")]
    InsufficientBound,
    #[error("rational function has a pole at a prime other than the chosen one")]
    PoleAtOtherPrime,
    #[error("mismatched characteristic: {0} vs {1}")]
    MismatchedCharacteristic(u32, u32),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
