//! Boundary conventions for entropy-style expressions.
//!
//! Every formula in this crate that multiplies something by its own logarithm
//! goes through [`xlogx`], so the convention `0 * log 0 = 0` lives in exactly
//! one place.

/// `x * ln(x)` with the convention that the limit value `0` is returned at
/// `x = 0`.
///
/// Negative arguments are a caller bug: they produce NaN, which is the
/// loudest thing a float can do short of panicking.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
