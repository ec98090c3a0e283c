use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
///
/// The `Display` text of every variant starts with the subsystem that raised
/// it (`config:`, `quadrature:`, ...), which is what the CLI prints.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("config: missing {0}")]
    MissingKey(String),
    #[error("config: invariant {0}")]
    Invariant(String),
    #[error("config: {0}")]
    Parse(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("pattern: {0}")]
    Pattern(String),
    #[error("entanglement: {0}")]
    Entanglement(String),
    #[error("oracle: {0}")]
    Oracle(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
