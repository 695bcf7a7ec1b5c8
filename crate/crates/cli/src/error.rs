use std::fmt;

use ring_dynamics::dynamics::IntegrateError;
use ring_dynamics::potential::FieldError;
use ring_dynamics::search::SearchError;
use ring_dynamics::verify::VerifyError;

/// Exit status 1: a check failed or a search did not converge.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status 2: bad usage or a point outside the domain.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn failure(msg: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, msg: msg.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::OnSource { .. } | FieldError::Singular => {
                let m = e.to_string();
                if m.starts_with("point on source") {
                    CliError::usage(m)
                } else {
                    CliError::usage(format!("point on source: {m}"))
                }
            }
            _ => CliError::usage(e.to_string()),
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::Field(f) => f.into(),
            IntegrateError::Config(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Parameter(_) | SearchError::Field(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Unbounded(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::failure(format!("io: {e}"))
    }
}
