use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("solver did not converge after {sweeps} sweeps (residual {residual:e})")]
    SolverFailure { sweeps: usize, residual: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tie between best and second-best action values (gap {gap:e})")]
    Tie { gap: f64 },
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sampled a step from terminal state {0}")]
    TerminalState(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
