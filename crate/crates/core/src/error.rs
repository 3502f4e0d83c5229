use thiserror::Error;

/// Errors produced by graph construction, policy setup and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed edge-list or activation-family text.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested operation exceeds a size guard (e.g. subset enumeration on large graphs).
    #[error("unsupported: {0}")]
    Capability(String),

    /// An internal consistency check failed; indicates a policy bug.
    #[error("logic error: {0}")]
    Logic(String),

    /// A randomized rate table violates the per-edge feasibility bound.
    #[error("infeasible rate allocation: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
