use std::fmt;

use backward_dmc::ErrorKind;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Resource(String),
    Invariant(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Resource(_) => 3,
            Failure::Invariant(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Resource(m) => write!(f, "resource limit: {m}"),
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
            Failure::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<backward_dmc::Error> for Failure {
    fn from(e: backward_dmc::Error) -> Self {
        match e.kind() {
            ErrorKind::Config => Failure::Config(e.to_string()),
            ErrorKind::Resource => Failure::Resource(e.to_string()),
            ErrorKind::Invariant => Failure::Invariant(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
