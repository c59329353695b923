use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set mismatch: {left} vs {right}")]
    GroundMismatch { left: u32, right: u32 },

    #[error("set size mismatch: {left} vs {right}")]
    SizeMismatch { left: u32, right: u32 },

    #[error("element {element} outside ground set [1, {ground_n}]")]
    ElementOutOfRange { element: u32, ground_n: u32 },

    #[error("duplicate element {0} in set")]
    DuplicateElement(u32),

    #[error("ground set size {0} unsupported (must be 1..=64)")]
    GroundTooLarge(u32),

    #[error("rank {rank} out of range for C({n},{k}) = {total}")]
    RankOutOfRange { n: u32, k: u32, rank: u64, total: u64 },

    /// A named precondition of a bound or engine does not hold.
    #[error("{context}: precondition violated: {condition}")]
    Precondition {
        context: &'static str,
        condition: &'static str,
    },

    #[error("{0}: families are not cross-intersecting")]
    NotCrossIntersecting(&'static str),

    #[error("budget exceeded in {what}: need {required}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pre(context: &'static str, condition: &'static str) -> Self {
        Error::Precondition { context, condition }
    }
}
