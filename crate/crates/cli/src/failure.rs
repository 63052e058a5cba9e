use std::fmt;

/// A command failure with a stable `kind` for the JSON error report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
        }
    }

    pub fn context(self, prefix: impl fmt::Display) -> Self {
        Failure {
            kind: self.kind,
            message: format!("{prefix}: {}", self.message),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

/// Error kind for the JSON report: ours, then the library's, else `internal`.
pub fn kind_of(err: &anyhow::Error) -> &'static str {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return f.kind;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<stancevec_core::Error>() {
            return e.kind();
        }
        if let Some(e) = cause.downcast_ref::<std::io::Error>() {
            return if e.kind() == std::io::ErrorKind::NotFound {
                "missing_input"
            } else {
                "io"
            };
        }
    }
    "internal"
}
