use std::fmt;

/// A failed run, split by exit status: bad input (1) or a failure while running (2).
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid configuration: {m}"),
            Failure::Runtime(m) => write!(f, "run failed: {m}"),
        }
    }
}

impl From<seedbank::Error> for Failure {
    fn from(e: seedbank::Error) -> Self {
        use seedbank::Error::*;
        match e {
            Range { .. } | DegenerateK(_) | SpecViolation(_) | BudgetExceeded { .. } => Failure::Invalid(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}
