use thiserror::Error;

/// Error type shared by all piperoute modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside valid domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("size error: {0}")]
    Size(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid task: {0}")]
    Task(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("{path}: {msg}")]
    Data { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn data(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Data {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
