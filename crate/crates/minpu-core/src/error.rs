//! Error type shared by the solver library.

use alloc::string::String;
use core::fmt;

use crate::geom::GenericityReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A coordinate token was not a plain decimal literal.
    BadDecimal(String),
    /// A square corner coordinate is an integer, so the square owns no
    /// unique lattice point.
    NotGeneric { square: usize },
    /// A point or square index referenced something outside the instance.
    IndexOutOfRange { index: usize, len: usize },
    /// The requested parameter is outside its feasible range.
    InfeasibleParameter { name: &'static str, value: i64 },
    /// A brute-force enumeration would exceed the configured guard.
    EnumerationBudgetExceeded { needed: u128, guard: u128 },
    /// The configuration search grew past the configured state cap.
    StateBudgetExceeded { states: usize, cap: usize },
    /// No jitter within the retry budget restored genericity.
    PerturbationFailed { attempts: u32 },
    /// The instance fails the genericity checks; solvers refuse to run.
    Genericity(GenericityReport),
    /// A claimed path contains an inadmissible transition.
    NotAPath { step: usize, reason: String },
    /// The threshold scan ran out of budgets without crossing.
    NoFeasibleIndex { p: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadDecimal(s) => write!(f, "not a decimal literal: {:?}", s),
            Error::NotGeneric { square } => {
                write!(f, "square {} has an integer corner coordinate", square)
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {} out of range (len {})", index, len)
            }
            Error::InfeasibleParameter { name, value } => {
                write!(f, "parameter {} = {} is out of range", name, value)
            }
            Error::EnumerationBudgetExceeded { needed, guard } => {
                write!(f, "enumeration needs {} subsets, guard is {}", needed, guard)
            }
            Error::StateBudgetExceeded { states, cap } => {
                write!(f, "state budget exceeded: {} states, cap {}", states, cap)
            }
            Error::PerturbationFailed { attempts } => {
                write!(f, "perturbation failed after {} attempts", attempts)
            }
            Error::Genericity(report) => {
                write!(f, "instance is not generic: {} violation(s)", report.violations.len())
            }
            Error::NotAPath { step, reason } => {
                write!(f, "not a path at step {}: {}", step, reason)
            }
            Error::NoFeasibleIndex { p } => {
                write!(f, "no budget index reached the threshold for p = {}", p)
            }
        }
    }
}

impl core::error::Error for Error {}
