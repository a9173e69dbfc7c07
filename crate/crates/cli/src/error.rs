use std::path::{Path, PathBuf};

/// Failures surfaced to the command line as `error[CODE]: message`.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Archive(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(String),
    #[error("unknown export format '{0}' (expected infix, latex, c or json)")]
    Format(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "E_CONFIG",
            CliError::Data(_) => "E_DATA",
            CliError::Archive(_) => "E_ARCHIVE",
            CliError::Io { .. } => "E_IO",
            CliError::Usage(_) => "E_USAGE",
            CliError::Model(_) => "E_MODEL",
            CliError::Format(_) => "E_FORMAT",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Data(_) => 4,
            CliError::Archive(_) => 5,
            CliError::Io { .. } => 6,
            CliError::Model(_) => 7,
            CliError::Format(_) => 8,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// The single diagnostic line printed on failure.
    pub fn render(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}]: {msg}", self.code())
    }
}

impl From<mgsr_core::Error> for CliError {
    fn from(e: mgsr_core::Error) -> CliError {
        use mgsr_core::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::Data(m) => CliError::Data(m),
            E::Merge(m) => CliError::Archive(m),
            E::UnknownFormat(f) => CliError::Format(f),
            E::UnknownGene(id) => CliError::Model(format!("unknown gene ID {id}")),
            E::UnknownModel(id) => CliError::Model(format!("unknown model ID {id}")),
            other => CliError::Model(other.to_string()),
        }
    }
}

pub(crate) fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
