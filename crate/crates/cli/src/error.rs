use qcreg_core::QcError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Core {
        context: &'static str,
        #[source]
        source: QcError,
    },

    #[error("invariant violation: {}", .0.join("; "))]
    Violations(Vec<String>),

    #[error("output {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn core(context: &'static str) -> impl FnOnce(QcError) -> CliError {
        move |source| CliError::Core { context, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => EXIT_USAGE,
            CliError::Violations(_) => EXIT_INVARIANT,
            CliError::Core { source, .. } => match source {
                QcError::InvalidParameter(_)
                | QcError::UnknownMap { .. }
                | QcError::BadSpec(_)
                | QcError::FieldFile(_)
                | QcError::EmptyDomain
                | QcError::Unsorted
                | QcError::Io(_)
                | QcError::Csv(_)
                | QcError::Json(_) => EXIT_USAGE,
                QcError::BoundExceeded { .. }
                | QcError::NegativeJacobian { .. }
                | QcError::Asymmetric { .. }
                | QcError::Ellipticity { .. }
                | QcError::NotDetNormalized { .. } => EXIT_INVARIANT,
                QcError::Singular(_)
                | QcError::NonFinite { .. }
                | QcError::Degenerate(_)
                | QcError::Inconsistent { .. } => EXIT_NUMERICAL,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
