use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {0} exceeds the table limit")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element encoding {0} does not belong to a field of order {1}")]
    ForeignElement(u32, usize),
    #[error("element is not in the subfield GF(q)")]
    NotInSubfield,
    #[error("squareness test is only meaningful for odd q")]
    EvenCharacteristic,
    #[error("tower has no epsilon basis (q = 2)")]
    EpsBasisUnavailable,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("empty point set")]
    EmptySet,
    #[error("point multiset does not span the ambient space (rank {rank}, need {needed})")]
    NotSpanning { rank: usize, needed: usize },
    #[error("operation budget exceeded: need {needed} operations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
