use serde_json::json;

/// Exit code 2 for caller mistakes, 3 for numerical failures.
#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Numeric(String),
}

impl CliError {
    pub fn domain(msg: impl Into<String>) -> Self {
        CliError::Domain(msg.into())
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Domain(m) | CliError::Numeric(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Domain(m) => json!({ "error": "domain", "message": m }),
            CliError::Numeric(m) => json!({ "error": "numeric", "message": m }),
        }
    }
}

impl From<rnc_core::Error> for CliError {
    fn from(e: rnc_core::Error) -> Self {
        if e.is_domain() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("i/o: {e}"))
    }
}
