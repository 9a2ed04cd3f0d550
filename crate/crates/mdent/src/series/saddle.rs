//! Formal saddle-point extraction of the `1/d` expansion from cluster data.
//!
//! The occupancy exponent at dimer density `p` and per-order occupancies
//! `alpha_k` is stationary where
//!
//! ```text
//! alpha_k = Jbar_k * p^k * exp(Fhat_k),
//! Fhat_k  = k * (log(1 - 2j/p) - 2 log(1 - 2j)),      j = sum_k k * alpha_k.
//! ```
//!
//! Everything here is free of `log p`: the would-be `k log p` part of the
//! stationarity condition is absorbed into the `p^k` prefactor, and the
//! matching `j log p` part of the exponent cancels against it, which is why
//! the ratio `u = j/p` must divide exactly. If that division ever fails, the
//! cluster data violates the `p`-power window and the solver reports it
//! rather than silently keeping a logarithm.
//!
//! Each fixed-point sweep gains one order in `1/d`, so `K + 1` sweeps suffice
//! at truncation `K`; the loop runs until the update is the identity and
//! checks that this happens within budget.

use num_rational::BigRational;
use std::collections::BTreeMap;

use super::poly::{rat, RationalPoly};
use super::{DSeries, SeriesError};

/// The extracted correction series `sum_k c_k(p) / d^k` together with the
/// largest power of `p` its coefficients are reliable for. Cluster input
/// through order `s` determines every `p`-power up to `s` (higher powers
/// would need deeper cluster data and are truncated away).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleExpansion {
    pub coefficients: DSeries,
    pub p_power_limit: u32,
}

impl SaddleExpansion {
    /// The coefficient of `1/d^k`, complete as a polynomial only while
    /// `2k <= p_power_limit`.
    pub fn c_poly(&self, k: u32) -> RationalPoly {
        self.coefficients.coeff(k)
    }
}

/// Solver state exposed for inspection: the per-order occupancies, their
/// weighted sum `j`, and the stationarity exponents `Fhat_k`.
#[derive(Debug, Clone)]
pub struct SaddleState {
    pub alpha: BTreeMap<u32, DSeries>,
    pub j: DSeries,
    pub fhat: BTreeMap<u32, DSeries>,
}

fn two() -> BigRational {
    rat(2, 1)
}

/// One sweep of the fixed-point map. Returns the new occupancies plus the
/// `(j, A, B)` data they were computed from.
fn sweep(
    jbars: &BTreeMap<u32, DSeries>,
    alpha: &BTreeMap<u32, DSeries>,
    trunc: u32,
) -> Result<(BTreeMap<u32, DSeries>, DSeries, DSeries, DSeries), SeriesError> {
    let mut j = DSeries::zero(trunc);
    for (&k, a) in alpha {
        j = j.add(&a.scale(&rat(k as i64, 1)));
    }
    let u = j.div_p_exact(1)?;
    let a_log = u.scale(&-two()).log1p()?;
    let b_log = j.scale(&-two()).log1p()?;
    let mut next = BTreeMap::new();
    for (&k, jb) in jbars {
        let fhat = a_log.sub(&b_log.scale(&two())).scale(&rat(k as i64, 1));
        let alpha_k = jb.mul(&fhat.exp()?).mul_p_poly(&RationalPoly::monomial(k, rat(1, 1)));
        next.insert(k, alpha_k);
    }
    Ok((next, j, a_log, b_log))
}

/// Runs the fixed-point iteration on the given cluster coefficients (each a
/// polynomial in `1/d`, keyed by order `s`) and assembles the correction
/// series truncated at `1/d^k_order`.
pub fn saddle_solve_with_state(
    jbars: &BTreeMap<u32, RationalPoly>,
    k_order: u32,
) -> Result<(SaddleExpansion, SaddleState), SeriesError> {
    let trunc = k_order;
    let jbar_series: BTreeMap<u32, DSeries> = jbars
        .iter()
        .filter(|(_, poly)| !poly.is_zero())
        .map(|(&s, poly)| (s, DSeries::from_invd_poly(poly, trunc)))
        .collect();
    if jbar_series.is_empty() {
        return Err(SeriesError::EmptyClusterData);
    }
    let smax = *jbar_series.keys().next_back().expect("nonempty");

    let mut alpha: BTreeMap<u32, DSeries> =
        jbar_series.keys().map(|&k| (k, DSeries::zero(trunc))).collect();
    let mut converged = false;
    for _ in 0..=trunc + 1 {
        let (next, _, _, _) = sweep(&jbar_series, &alpha, trunc)?;
        if next == alpha {
            converged = true;
            break;
        }
        alpha = next;
    }
    if !converged {
        return Err(SeriesError::ConsistencyFailure(
            "saddle iteration did not reach its fixed point within the order budget",
        ));
    }

    let (_, j, a_log, b_log) = sweep(&jbar_series, &alpha, trunc)?;
    let mut fhat = BTreeMap::new();
    let mut total = DSeries::zero(trunc);
    for (&k, alpha_k) in &alpha {
        let f_k = a_log.sub(&b_log.scale(&two())).scale(&rat(k as i64, 1));
        total = total.add(alpha_k).sub(&alpha_k.mul(&f_k));
        fhat.insert(k, f_k);
    }
    // Entropy part: (1 - 2j) log(1 - 2j) + j - (p/2 - j) log(1 - 2j/p).
    let one = DSeries::from_p_poly(&RationalPoly::one(), trunc);
    let half_p = DSeries::from_p_poly(&RationalPoly::monomial(1, rat(1, 2)), trunc);
    let entropy = one
        .sub(&j.scale(&two()))
        .mul(&b_log)
        .add(&j)
        .sub(&half_p.sub(&j).mul(&a_log));
    total = total.add(&entropy);

    if !total.coeff(0).is_zero() {
        return Err(SeriesError::ConsistencyFailure(
            "saddle series has a nonzero d^0 term",
        ));
    }
    let expansion = SaddleExpansion {
        coefficients: total.truncate_p_deg(smax),
        p_power_limit: smax,
    };
    Ok((expansion, SaddleState { alpha, j, fhat }))
}

/// As [`saddle_solve_with_state`], dropping the state.
pub fn saddle_solve(
    jbars: &BTreeMap<u32, RationalPoly>,
    k_order: u32,
) -> Result<SaddleExpansion, SeriesError> {
    saddle_solve_with_state(jbars, k_order).map(|(e, _)| e)
}

/// Rearranges the `1/d` expansion into coefficients of `p^s`: returns, for
/// each `2 <= s <= p_max`, the polynomial in `1/d` multiplying `p^s`.
pub fn rearrange_in_p(
    expansion: &SaddleExpansion,
    p_max: u32,
) -> Result<BTreeMap<u32, RationalPoly>, SeriesError> {
    if p_max > expansion.p_power_limit {
        return Err(SeriesError::PowerUnavailable {
            requested: p_max,
            available: expansion.p_power_limit,
        });
    }
    // The p^s coefficient draws on c_k for k up to s - 1.
    if p_max > 0 && p_max - 1 > expansion.coefficients.trunc() {
        return Err(SeriesError::InsufficientOrder {
            requested: p_max - 1,
            trunc: expansion.coefficients.trunc(),
        });
    }
    let mut out = BTreeMap::new();
    for s in 2..=p_max {
        let mut poly = RationalPoly::zero();
        for (k, c_k) in expansion.coefficients.iter() {
            let coeff = c_k.coeff(s);
            poly = &poly + &RationalPoly::monomial(k, coeff);
        }
        out.insert(s, poly);
    }
    Ok(out)
}
