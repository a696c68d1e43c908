/// Process exit status for a failed command.
pub const EXIT_ERROR: i32 = 1;
/// Process exit status when an ingested graph disagrees with its metadata.
pub const EXIT_META_MISMATCH: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid configuration; one message per violated field.
    #[error("invalid configuration:{}", bullet_list(.0))]
    Config(Vec<String>),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] gnncost_core::Error),
    /// A failed sweep point, with the partition count that failed.
    #[error("sweep point k = {k}: {source}")]
    Point { k: usize, source: Box<CliError> },
    /// Observed graph statistics fall outside the metadata tolerance.
    #[error("metadata mismatch: {0}")]
    MetaMismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::MetaMismatch(_) => EXIT_META_MISMATCH,
            Self::Point { source, .. } => source.exit_code(),
            _ => EXIT_ERROR,
        }
    }
}

fn bullet_list(msgs: &[String]) -> String {
    msgs.iter().map(|m| format!("\n  - {m}")).collect()
}
