use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    BadGeneratorName(String),
    #[error("operation requires a nonempty word")]
    EmptyWord,
}

/// Which resource ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhausted {
    Depth,
    Length,
    Calls,
    Vertices,
}

impl std::fmt::Display for Exhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Exhausted::Depth => "recursion depth",
            Exhausted::Length => "rewritten word length",
            Exhausted::Calls => "oracle calls",
            Exhausted::Vertices => "ball vertex count",
        };
        f.write_str(s)
    }
}

/// Budget exhaustion. Callers treat this as "inconclusive", never as an answer.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("budget exceeded: {0}")]
pub struct BudgetExceeded(pub Exhausted);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("ball exceeds {0} vertices")]
    BallTooLarge(usize),
    #[error("path leaves the ball of radius {0}")]
    PathEscapesBall(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("inconclusive: {0}")]
    Inconclusive(#[from] BudgetExceeded),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
}
