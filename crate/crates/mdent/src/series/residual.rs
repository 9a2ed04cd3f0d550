//! Residual of the dimension-recursion ansatz.
//!
//! The candidate two-correction form
//!
//! ```text
//! L_d(p) = (p/2) log(2d) - (p/2) log p - (1-p) log(1-p) - p/2
//!          + a p^2 / d + (b p^4 + c p^3) / (96 d^2)
//! ```
//!
//! is pushed through the one-step lower-bound recursion at the distinguished
//! density `q = p (1 - 1/d)`, and the difference (recursion output minus
//! `L_d(p)` itself) is expanded in `1/d`. All logarithms are carried
//! symbolically -- `log 2`, `log d`, `log p`, `log(1-p)`, `log(1-q)` -- and
//! must cancel identically; only `log(1 - 1/d)` and `log(1 - p/(2d))` are
//! expanded as series. What survives is a pure polynomial series whose first
//! two orders decide whether the ansatz respects the recursion.

use num_rational::BigRational;
use num_traits::Signed;
use std::collections::BTreeMap;

use super::poly::{rat, RationalPoly};
use super::{DSeries, SeriesError};

const TRUNC: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Sym {
    Log2,
    LogD,
    LogP,
    LogOneMinusP,
    LogOneMinusQ,
}

/// A linear combination `unit + sum_sym coeff_sym * sym` with `DSeries`
/// coefficients.
struct SymSeries {
    unit: DSeries,
    logs: BTreeMap<Sym, DSeries>,
}

impl SymSeries {
    fn zero() -> Self {
        SymSeries { unit: DSeries::zero(TRUNC), logs: BTreeMap::new() }
    }

    fn add_unit(&mut self, s: &DSeries) {
        self.unit = self.unit.add(s);
    }

    fn add_log(&mut self, sym: Sym, coeff: &DSeries) {
        let entry = self.logs.entry(sym).or_insert_with(|| DSeries::zero(TRUNC));
        *entry = entry.add(coeff);
    }

    fn sub(mut self, rhs: &SymSeries) -> SymSeries {
        self.unit = self.unit.sub(&rhs.unit);
        for (sym, coeff) in &rhs.logs {
            let entry = self.logs.entry(*sym).or_insert_with(|| DSeries::zero(TRUNC));
            *entry = entry.sub(coeff);
        }
        self
    }
}

fn const_series(poly: RationalPoly) -> DSeries {
    DSeries::from_p_poly(&poly, TRUNC)
}

fn monomial_x(order: u32, poly: RationalPoly) -> DSeries {
    DSeries::from_invd_poly(&RationalPoly::monomial(order, rat(1, 1)), TRUNC).mul_p_poly(&poly)
}

/// The ansatz at `(d, p)`, all logs symbolic.
fn ansatz_here(a: &BigRational, b: &BigRational, c: &BigRational) -> SymSeries {
    let mut s = SymSeries::zero();
    let half_p = RationalPoly::monomial(1, rat(1, 2));
    s.add_log(Sym::Log2, &const_series(half_p.clone()));
    s.add_log(Sym::LogD, &const_series(half_p.clone()));
    s.add_log(Sym::LogP, &const_series(half_p.scale(&rat(-1, 1))));
    let one_minus_p = RationalPoly::from_terms(&[(0, 1, 1), (1, -1, 1)]);
    s.add_log(Sym::LogOneMinusP, &const_series(one_minus_p.scale(&rat(-1, 1))));
    s.add_unit(&const_series(RationalPoly::monomial(1, rat(-1, 2))));
    s.add_unit(&monomial_x(1, RationalPoly::monomial(2, rat(1, 1)).scale(a)));
    let quartic = &RationalPoly::monomial(4, rat(1, 96)).scale(b)
        + &RationalPoly::monomial(3, rat(1, 96)).scale(c);
    s.add_unit(&monomial_x(2, quartic));
    s
}

/// The recursion output: the ansatz at `(d - 1, q)` with `q = p (1 - 1/d)`,
/// plus the one-step correction terms.
fn recursion_output(a: &BigRational, b: &BigRational, c: &BigRational) -> SymSeries {
    let mut s = SymSeries::zero();

    // q as a series in 1/d, and its small powers.
    let p1 = RationalPoly::monomial(1, rat(1, 1));
    let q = const_series(p1.clone()).sub(&monomial_x(1, p1.clone()));
    let q2 = q.mul(&q);
    let q3 = q2.mul(&q);
    let q4 = q2.mul(&q2);
    let half_q = q.scale(&rat(1, 2));

    // Expanded logs: log(1 - 1/d) and log(1 - p/(2d)).
    let log_shift = monomial_x(1, RationalPoly::one()).neg().log1p().expect("no constant term");
    let log_small = monomial_x(1, RationalPoly::monomial(1, rat(1, 2))).neg()
        .log1p()
        .expect("no constant term");

    // 1/(d-1) = 1/d + 1/d^2 + 1/d^3 + ... and its square.
    let inv_dm1 = DSeries::from_invd_poly(
        &RationalPoly::from_terms(&[(1, 1, 1), (2, 1, 1), (3, 1, 1)]),
        TRUNC,
    );
    let inv_dm1_sq = inv_dm1.mul(&inv_dm1);

    // Ansatz at (d-1, q): (q/2) log(2(d-1)) - (q/2) log q - (1-q) log(1-q)
    //                     - q/2 + a q^2/(d-1) + (b q^4 + c q^3)/(96 (d-1)^2).
    s.add_log(Sym::Log2, &half_q);
    s.add_log(Sym::LogD, &half_q);
    s.add_unit(&half_q.mul(&log_shift)); // from log(d-1) = log d + log(1-1/d)
    s.add_log(Sym::LogP, &half_q.neg());
    s.add_unit(&half_q.mul(&log_shift).neg()); // from log q = log p + log(1-1/d)
    let one = const_series(RationalPoly::one());
    s.add_log(Sym::LogOneMinusQ, &one.sub(&q).neg());
    s.add_unit(&half_q.neg());
    s.add_unit(&q2.scale(a).mul(&inv_dm1));
    s.add_unit(&q4.scale(&(b / rat(96, 1))).add(&q3.scale(&(c / rat(96, 1)))).mul(&inv_dm1_sq));

    // One-step correction with p - q = p/d:
    //   (1-q) log(1-q) - (p/(2d)) log(p/(2d)) + (1 - p/(2d)) log(1 - p/(2d))
    //   - (1-p) log(1-p).
    s.add_log(Sym::LogOneMinusQ, &one.sub(&q));
    let half_p_over_d = monomial_x(1, RationalPoly::monomial(1, rat(1, 2)));
    s.add_log(Sym::LogP, &half_p_over_d.neg());
    s.add_log(Sym::Log2, &half_p_over_d);
    s.add_log(Sym::LogD, &half_p_over_d);
    s.add_unit(&one.sub(&half_p_over_d).mul(&log_small));
    let one_minus_p = RationalPoly::from_terms(&[(0, 1, 1), (1, -1, 1)]);
    s.add_log(Sym::LogOneMinusP, &const_series(one_minus_p).neg());
    s
}

/// Expands (recursion output) minus (ansatz) through `1/d^3` and returns the
/// surviving polynomial series. Every symbolic logarithm must cancel exactly;
/// a failure there means the algebra above is wrong, not the inputs.
pub fn residual_check(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> Result<DSeries, SeriesError> {
    let diff = recursion_output(a, b, c).sub(&ansatz_here(a, b, c));
    for (_, coeff) in &diff.logs {
        if !coeff.is_zero() {
            return Err(SeriesError::ConsistencyFailure(
                "a symbolic logarithm failed to cancel in the recursion residual",
            ));
        }
    }
    Ok(diff.unit)
}

/// Pass/fail verdicts for the three sign conditions on `(a, b, c)`.
/// `part_b` and `part_c` are `None` when their hypotheses do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignConditions {
    /// `a >= 1/8` (forced by positivity of the leading residual order).
    pub part_a: bool,
    /// Given `a = 1/8`: `-2 + 2bp + c >= 0` on `p` in `[0, 1]`.
    pub part_b: Option<bool>,
    /// Given `a = 1/8` and `c = 2`: `b >= 0`.
    pub part_c: Option<bool>,
}

impl SignConditions {
    pub fn all_pass(&self) -> bool {
        self.part_a && self.part_b.unwrap_or(true) && self.part_c.unwrap_or(true)
    }
}

/// Evaluates the sign conditions the recursion forces on the ansatz
/// coefficients.
pub fn ansatz_sign_conditions(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> SignConditions {
    let eighth = rat(1, 8);
    let two = rat(2, 1);
    let part_a = *a >= eighth;
    let part_b = if *a == eighth {
        // Linear in p, so the endpoints decide.
        let at0 = c - &two;
        let at1 = &(b * &two) + &(c - &two);
        Some(!at0.is_negative() && !at1.is_negative())
    } else {
        None
    };
    let part_c = if *a == eighth && *c == two {
        Some(!b.is_negative())
    } else {
        None
    };
    SignConditions { part_a, part_b, part_c }
}
