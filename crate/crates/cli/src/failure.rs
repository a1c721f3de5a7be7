use std::fmt;
use std::path::Path;

use progset::Error;
use serde_json::json;

/// A failed run, mapped to the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Input(String),
    Io(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    /// 2: inconclusive at the precision cap; 3: invalid input; 4: certificate rejected.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::Inconclusive { .. }) => 2,
            Failure::Core(Error::Certificate(_)) => 4,
            _ => 3,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Failure::Core(e) => match e {
                Error::DivisionByZero => "division_by_zero",
                Error::InvalidInterval(_) => "invalid_interval",
                Error::InfiniteMeasure => "infinite_measure",
                Error::InvalidParameter { .. } => "invalid_parameter",
                Error::NegativeDepth(_) => "negative_depth",
                Error::Domain(_) => "domain",
                Error::Inconclusive { .. } => "inconclusive",
                Error::HorizonShortfall(_) => "horizon_shortfall",
                Error::InsufficientDepth(_) => "insufficient_depth",
                Error::CoverNotFound(_) => "cover_not_found",
                Error::Schedule(_) => "schedule",
                Error::Parse(_) => "parse",
                Error::Certificate(_) => "certificate",
            },
            Failure::Input(_) => "invalid_input",
            Failure::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.tag(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("bad JSON: {e}"))
    }
}
