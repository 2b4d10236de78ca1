use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field characteristic {0} is below 5")]
    FieldTooSmall(u64),
    #[error("field characteristic {0} exceeds 2^31")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields (F_{left} vs F_{right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("curve is singular")]
    SingularCurve,
    #[error("hyperelliptic polynomial must have odd degree >= 5, got degree {0}")]
    BadDegree(usize),
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("basis functions must be evaluated at affine points")]
    EvalAtInfinity,
    #[error("operation requires a genus 1 curve, got genus {0}")]
    WrongGenus(usize),

    #[error("group of order 1 has no nontrivial character")]
    TrivialGroup,
    #[error("invalid invariant factors: {0}")]
    InvalidGroup(String),
    #[error("element does not belong to the group")]
    ElementOutOfRange,
    #[error("cycle type weights sum to {sum}, expected {t}")]
    InvalidCycleType { sum: usize, t: usize },
    #[error("character is trivial")]
    TrivialCharacter,
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("duplicate evaluation point")]
    DuplicatePoint,
    #[error("degree m = {m} outside ({lo}, {hi}]")]
    DegreeOutOfRange { m: usize, lo: i64, hi: usize },
    #[error("every share-code word vanishes at the secret position")]
    SecretPositionDegenerate,
    #[error("player set is not qualified")]
    NotQualified,
    #[error("player index {0} out of range")]
    BadPlayerIndex(usize),

    #[error("t = m - {0} is not supported by the exact elliptic count")]
    UnsupportedOffset(usize),
    #[error("m - t = {offset} is not in regime I (needs < g = {genus})")]
    RegimeMismatch { offset: usize, genus: usize },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
}
