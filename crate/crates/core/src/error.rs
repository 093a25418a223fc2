use thiserror::Error;

/// Rejected scenario parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("ring needs at least 3 nodes, got {0}")]
    RingTooSmall(usize),
    #[error("node {0} is outside the ring")]
    NodeOutOfRange(usize),
    #[error("{agents} agents do not fit in a ring of {n} nodes")]
    TooManyAgents { agents: usize, n: usize },
    #[error("homebase {0} is the black hole")]
    HomebaseOnBlackHole(usize),
    #[error("homebase {0} is used twice")]
    DuplicateHomebase(usize),
    #[error("bad port labeling: {0}")]
    BadLabeling(String),
    #[error("at most two tokens per agent are supported, got {0}")]
    TooManyTokens(u8),
    #[error("invalid parameters: {0}")]
    Params(String),
}

/// A round that cannot be executed. Every variant except `NoLiveAgents`
/// indicates a bug in the protocol being simulated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("no live agent left to step")]
    NoLiveAgents,
    #[error("agent {agent} in state {state} reached FAULT")]
    Fault { agent: usize, state: String },
    #[error("agents pick {picks} tokens at node {node} holding {present}")]
    TokenConflict { node: usize, picks: u8, present: u8 },
    #[error("node {node} would hold {count} tokens")]
    TokenCapacity { node: usize, count: u8 },
    #[error("agent {agent} would carry more than {budget} tokens")]
    CarryOverflow { agent: usize, budget: u8 },
    #[error("agent {agent} tried to cross the marked link at node {node}")]
    MarkedLinkTraversal { agent: usize, node: usize },
    #[error("agent {agent} has no unambiguous agent to align with")]
    AlignmentTarget { agent: usize },
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("trace has no header")]
    MissingHeader,
    #[error("trace has no end record")]
    MissingEnd,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
