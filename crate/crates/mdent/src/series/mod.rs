//! Exact rational polynomial and truncated-series algebra, and the formal
//! machinery built on it: the saddle-point extraction of the `1/d` expansion,
//! its rearrangement in powers of `p`, and the residual of the
//! dimension-recursion ansatz.

mod dseries;
mod poly;
mod residual;
mod saddle;

pub use dseries::DSeries;
pub use poly::RationalPoly;
pub use residual::{ansatz_sign_conditions, residual_check, SignConditions};
pub use saddle::{rearrange_in_p, saddle_solve, saddle_solve_with_state, SaddleExpansion, SaddleState};

use std::fmt;

/// Errors from the series layer. These are contract violations by the caller
/// (bad truncation orders, inexact divisions) or internal consistency checks
/// that must never fire on correct input data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Division by `x^k` hit a nonzero coefficient below degree `k`.
    NotDivisible { power: u32 },
    /// `exp` or `log(1 + .)` applied to a series with a nonzero order-0 term.
    NonzeroConstantTerm,
    /// A requested power of `p` is not determined by the supplied cluster data.
    PowerUnavailable { requested: u32, available: u32 },
    /// The series is not truncated deep enough in `1/d` for the request.
    InsufficientOrder { requested: u32, trunc: u32 },
    /// No usable cluster coefficients were supplied.
    EmptyClusterData,
    /// An identity that should hold exactly failed; the payload names it.
    ConsistencyFailure(&'static str),
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::NotDivisible { power } => {
                write!(f, "series is not exactly divisible by x^{power}")
            }
            SeriesError::NonzeroConstantTerm => {
                write!(f, "series operation requires a vanishing order-0 term")
            }
            SeriesError::PowerUnavailable { requested, available } => write!(
                f,
                "coefficient of p^{requested} is not determined (cluster data covers p^{available})"
            ),
            SeriesError::InsufficientOrder { requested, trunc } => write!(
                f,
                "request needs 1/d order {requested} but the series is truncated at {trunc}"
            ),
            SeriesError::EmptyClusterData => write!(f, "no nonzero cluster coefficients supplied"),
            SeriesError::ConsistencyFailure(what) => {
                write!(f, "internal consistency check failed: {what}")
            }
        }
    }
}

impl std::error::Error for SeriesError {}
