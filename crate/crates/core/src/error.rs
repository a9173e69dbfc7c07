use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A tree that cannot be evaluated against the given data shape.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("cannot merge populations: {0}")]
    Merge(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown gene id {0}")]
    UnknownGene(usize),

    #[error("unknown model id {0}")]
    UnknownModel(usize),

    #[error("unknown export format `{0}`")]
    UnknownFormat(String),

    #[error("{0}")]
    Invalid(String),
}
