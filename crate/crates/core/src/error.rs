use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("rate pair ({r1}, {r2}) needs source powers beyond the caps")]
    InfeasibleRate { r1: f64, r2: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("solver numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate solution: {0}")]
    Degenerate(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
