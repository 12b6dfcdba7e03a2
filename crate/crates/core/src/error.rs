use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid instance: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("generation failed for satellite {satellite} / task {task}: {message}")]
    Generation {
        satellite: String,
        task: String,
        message: String,
    },
    #[error("schedule is structurally inconsistent with its instance: {0}")]
    Structural(String),
    #[error("schedule is infeasible: {0} violation(s)")]
    Infeasible(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
