use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("division by non-positive integer {0}")]
    DivideByNonPositive(i64),
    #[error("operation undefined on an infinite value")]
    SentinelOperand,
    #[error("comparison undecided after maximal refinement of generator enclosures")]
    Undecidable,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("divisor is not monic")]
    NonMonicDivisor,
    #[error("divisor has degree zero")]
    ConstantDivisor,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expression is not polynomial in `{0}`")]
    NotPolynomial(String),

    #[error("key polynomial is not monic")]
    NonMonicKey,
    #[error("invalid valuation spec: {0}")]
    InvalidSpec(String),
    #[error("residue undefined: {0}")]
    ResidueUndefined(String),

    #[error("value is not in the divisible hull of the lattice")]
    NotInDivisibleHull,
    #[error("key is maximal: its value is not in the divisible hull of lower values")]
    MaximalKey,
    #[error("not an immediate successor: {0}")]
    NotASuccessor(String),
    #[error("factor has nonzero value: {0}")]
    NonUnitFactor(String),
    #[error("multiplier needs negative powers of a lower key")]
    NonPolynomialMultiplier,

    #[error("blow-up center touches protected parameter {0}")]
    ProtectedCenter(usize),
    #[error("blow-up center needs at least two parameters")]
    EmptyCenter,
    #[error("parameter index {0} out of range")]
    BadIndex(usize),
    #[error("element is degenerate with respect to the frame")]
    DegenerateInput,
    #[error("empty monomial ideal")]
    EmptyIdeal,
    #[error("residue field extension: {0}")]
    ResidueFieldExtension(String),

    #[error("input is not a binomial of the expected shape: {0}")]
    NonBinomialInput(String),
    #[error("delta is {0}, expected 1")]
    DeltaNotOne(usize),
    #[error("recursion budget exceeded: {0}")]
    RecursionBudgetExceeded(String),
    #[error("key could not be monomialized: {0}")]
    KeyNotMonomialized(String),

    #[error("blow-up budget exceeded")]
    BudgetExceeded,
    #[error("a limit successor must be supplied after key {0}")]
    LimitSuccessorRequired(String),
    #[error("task `{task}` failed: {source}")]
    Task {
        task: String,
        #[source]
        source: Box<Error>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
