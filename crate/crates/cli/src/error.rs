use crate::fetch::FetchError;

/// Exit codes: 0 certified, 1 uncertified or failed check, 2 invalid input
/// or usage, 3 curve data unavailable.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema error in {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] iwasawa_core::Error),
    #[error(transparent)]
    Fetch(#[from] FetchError),
}

pub const EXIT_UNCERTIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FETCH: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use iwasawa_core::Error as E;
        match self {
            CliError::Core(E::PrecisionExhausted { .. } | E::Indeterminate { .. }) => EXIT_UNCERTIFIED,
            CliError::Fetch(FetchError::BadLabel(_)) => EXIT_INPUT,
            CliError::Fetch(_) => EXIT_FETCH,
            _ => EXIT_INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Schema(_) => "schema",
            CliError::Io(_) => "io",
            CliError::Core(_) => "computation",
            CliError::Fetch(_) => "fetch",
        }
    }
}
