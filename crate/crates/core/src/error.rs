// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use thiserror::Error;

use crate::cra::CopylessViolation;
use crate::semiring::{SemiringKind, TropicalValue};

/// Errors raised by constructions and evaluations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("value {value} does not belong to the {kind} semiring")]
    NotInSemiring {
        value: TropicalValue,
        kind: SemiringKind,
    },

    #[error("semiring kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: SemiringKind,
        found: SemiringKind,
    },

    #[error("invalid machine: {0}")]
    Invalid(String),

    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),

    #[error("automaton has epsilon transitions; eliminate them first")]
    EpsilonPresent,

    #[error("epsilon cycle through state `{0}`")]
    EpsilonCycle(String),

    #[error("machine is not copyless: {0}")]
    NotCopyless(CopylessViolation),

    #[error("construction would be nondeterministic: {0}")]
    Nondeterministic(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid document: {0}")]
    Document(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// An enumeration stopped because it reached its budget. `partial` holds
/// everything computed before the cut-off.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exhausted<T> {
    pub partial: T,
    pub budget: u64,
}

impl<T> fmt::Display for Exhausted<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "enumeration budget of {} exceeded", self.budget)
    }
}

impl<T: fmt::Debug> std::error::Error for Exhausted<T> {}
