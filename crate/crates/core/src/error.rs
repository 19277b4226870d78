use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("set system is not normal: {0}")]
    NotNormal(String),
    #[error("coalition {member} is not contained in ground {ground}")]
    OutOfGround { member: String, ground: String },
    #[error("agent {0} is outside the supported range 1..=20")]
    AgentOutOfRange(u32),
    #[error("grounds cover {covered} but N = {expected}")]
    CoverageViolation { covered: String, expected: String },
    #[error("product digraph has {size} vertices, cap is {cap}")]
    SizeCap { size: u128, cap: u128 },
    #[error("number of blocks must be in 1..=8, got {0}")]
    BlockCount(usize),
    #[error("unknown agent {0}")]
    UnknownAgent(u32),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("cut is not a partition separating source from sink: {0}")]
    NotAPartition(String),
    #[error("digraph is not weakly connected")]
    NotConnected,
    #[error("charges sum to {0}, expected 0")]
    NonZeroSum(String),
    #[error("flow is not unitary: {0}")]
    NotUnitary(String),
    #[error("axiom violated: {0}")]
    AxiomViolated(String),
    #[error("no coalition S containing block {0} carries nonzero hypercube flow")]
    NoNonzeroWitness(usize),
    #[error("Dirac game of the empty profile")]
    EmptyProfile,
    #[error("coalition {0} is not feasible in block {1}")]
    InfeasibleCoalition(String, usize),
    #[error("block {0} is not a full power set")]
    NotPowerSet(usize),
    #[error("missing worth for coalition {0}")]
    MissingWorth(String),
    #[error("reduction condition violated at edge {0}")]
    ConditionViolated(String),
    #[error("unknown profile {0}")]
    UnknownProfile(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotNormal(_) => "NotNormal",
            Error::OutOfGround { .. } => "OutOfGround",
            Error::AgentOutOfRange(_) => "AgentOutOfRange",
            Error::CoverageViolation { .. } => "CoverageViolation",
            Error::SizeCap { .. } => "SizeCap",
            Error::BlockCount(_) => "BlockCount",
            Error::UnknownAgent(_) => "UnknownAgent",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::NotAPartition(_) => "NotAPartition",
            Error::NotConnected => "NotConnected",
            Error::NonZeroSum(_) => "NonZeroSum",
            Error::NotUnitary(_) => "NotUnitary",
            Error::AxiomViolated(_) => "AxiomViolated",
            Error::NoNonzeroWitness(_) => "NoNonzeroWitness",
            Error::EmptyProfile => "EmptyProfile",
            Error::InfeasibleCoalition(..) => "InfeasibleCoalition",
            Error::NotPowerSet(_) => "NotPowerSet",
            Error::MissingWorth(_) => "MissingWorth",
            Error::ConditionViolated(_) => "ConditionViolated",
            Error::UnknownProfile(_) => "UnknownProfile",
            Error::Parse(_) => "ParseError",
            Error::Validation { .. } => "ValidationError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
