use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Problem-file error; `path` is a dotted location such as `ep.xbar[1]`.
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] gcoupling::Error),
}

impl CliError {
    pub fn schema(path: impl Into<String>, message: impl ToString) -> Self {
        CliError::Schema { path: path.into(), message: message.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
