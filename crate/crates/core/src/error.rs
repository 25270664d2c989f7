use std::fmt;

use thiserror::Error;

/// One broken well-formedness rule found while validating a structure description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub symbol: Option<String>,
    pub tuple_index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.symbol, self.tuple_index) {
            (Some(s), Some(i)) => write!(f, "relation `{s}`, tuple #{i}: {}", self.message),
            (Some(s), None) => write!(f, "relation `{s}`: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid structure: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("{family} axiom `{rule}` violated, witness {witness:?}")]
    Family {
        family: &'static str,
        rule: &'static str,
        witness: Vec<usize>,
    },

    #[error("size {base}^{exponent} does not fit the index width")]
    Overflow { base: usize, exponent: usize },

    #[error("{what} has {size} elements, limit is {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("signatures of source and target differ")]
    SignatureMismatch,

    #[error("pinned values violate relation `{symbol}` on source tuple {tuple:?}")]
    InconsistentPins { symbol: String, tuple: Vec<usize> },

    #[error("map is not a partial polymorphism: relation `{symbol}` fails on rows {rows:?}")]
    NotPartialPolymorphism { symbol: String, rows: Vec<Vec<usize>> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
