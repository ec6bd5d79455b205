//! Command-line front end for the `qdilate` pipeline and its JSON formats.
//!
//! Exit codes: 0 success, 1 verification or internal assertion failure,
//! 2 input error (unreadable or malformed files, invalid objects).

pub mod commands;
pub mod formats;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed {what} document: {source}")]
    Parse {
        what: &'static str,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] qdilate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if is_assertion(e) => 1,
            _ => 2,
        }
    }

    /// Stable short name of the failure, e.g. `NotNormalized`.
    pub fn kind(&self) -> String {
        match self {
            CliError::Io { .. } => "Io".into(),
            CliError::Parse { .. } => "Parse".into(),
            CliError::Input(_) => "Input".into(),
            CliError::Library(e) => format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect(),
        }
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

/// Failures of a check the library performs on its own output.
fn is_assertion(e: &qdilate::Error) -> bool {
    use qdilate::Error::*;
    matches!(
        e,
        TheoremViolation { .. } | Inconsistent(_) | NotADilation { .. } | ReconstructionFailed { .. }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let bad_input = CliError::Library(qdilate::Error::NotNormalized {
            residual: 0.5,
            deficit: qdilate::CMatrix::identity(1),
        });
        assert_eq!(bad_input.exit_code(), 2);
        assert_eq!(bad_input.kind(), "NotNormalized");
        let assertion = CliError::Library(qdilate::Error::TheoremViolation { residual: 1.0 });
        assert_eq!(assertion.exit_code(), 1);
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(assertion.diagnostic()["error"], "TheoremViolation");
    }
}
