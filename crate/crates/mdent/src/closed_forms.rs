//! Scalar functions with closed expressions, and the embedded exact constant
//! tables (series coefficients, cluster coefficients, planar reference
//! values) that the rest of the crate checks itself against.
//!
//! All entropies are in nats per lattice site. Dimer density `p` means the
//! expected fraction of sites covered by dimers, so `p = 1` is a perfect
//! matching and `p = 0` is the empty configuration.

use num_rational::BigRational;
use serde_json::{json, Map, Value};
use std::fmt;

use crate::series::RationalPoly;
use crate::xlog::xlogx;

/// Domain violations for the scalar functions.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainError {
    DensityOutOfRange(f64),
    DimensionZero,
    SeriesIndexTooSmall(u32),
    ExpansionOrderOutOfRange(u32),
    OccupancyOutOfRange { p: f64, j: f64 },
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::DensityOutOfRange(p) => {
                write!(f, "dimer density {p} outside [0, 1]")
            }
            DomainError::DimensionZero => write!(f, "dimension must be at least 1"),
            DomainError::SeriesIndexTooSmall(k) => {
                write!(f, "series coefficient index {k} is below 2")
            }
            DomainError::ExpansionOrderOutOfRange(k) => {
                write!(f, "expansion order {k} outside the tabulated range 2..=6")
            }
            DomainError::OccupancyOutOfRange { p, j } => {
                write!(f, "occupancy j = {j} outside [0, p/2] for p = {p}")
            }
        }
    }
}

impl std::error::Error for DomainError {}

fn check_p(p: f64) -> Result<(), DomainError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(DomainError::DensityOutOfRange(p))
    }
}

fn check_d(d: u32) -> Result<(), DomainError> {
    if d >= 1 {
        Ok(())
    } else {
        Err(DomainError::DimensionZero)
    }
}

/// The exact one-dimensional entropy curve
/// `(1 - p/2) log(1 - p/2) - (p/2) log(p/2) - (1 - p) log(1 - p)`.
pub fn lambda1_exact(p: f64) -> Result<f64, DomainError> {
    check_p(p)?;
    Ok(xlogx(1.0 - p / 2.0) - xlogx(p / 2.0) - xlogx(1.0 - p))
}

/// Coefficient of `p^k` in the expansion of the one-dimensional curve around
/// the mean-field term: `1 / ((k-1) k 2^k)` for `k >= 2`.
pub fn lambda1_series_coeff(k: u32) -> Result<BigRational, DomainError> {
    if k < 2 {
        return Err(DomainError::SeriesIndexTooSmall(k));
    }
    let den = BigRational::from_integer(((k - 1) as i64 * k as i64).into())
        * BigRational::from_integer(2i64.pow(k).into());
    Ok(den.recip())
}

/// The mean-field entropy
/// `(1/2) (p log(2d) - p log p - 2 (1-p) log(1-p) - p)`.
pub fn mean_field(d: u32, p: f64) -> Result<f64, DomainError> {
    check_d(d)?;
    check_p(p)?;
    let two_d = 2.0 * f64::from(d);
    Ok(0.5 * (p * two_d.ln() - xlogx(p) - 2.0 * xlogx(1.0 - p) - p))
}

/// Partial sum of the `1/d` expansion in its rearranged form: the mean-field
/// term plus `sum_{k=2}^{kmax} a_k(d) p^k`, for `kmax` in `2..=6`.
pub fn expansion_eval(d: u32, p: f64, kmax: u32) -> Result<f64, DomainError> {
    check_d(d)?;
    check_p(p)?;
    if !(2..=6).contains(&kmax) {
        return Err(DomainError::ExpansionOrderOutOfRange(kmax));
    }
    let consts = ReferenceConstants::new();
    let inv_d = BigRational::new(1.into(), i64::from(d).into());
    let mut sum = mean_field(d, p)?;
    for k in 2..=kmax {
        let a_k = rational_to_f64(&consts.a(k).eval_rat(&inv_d));
        sum += a_k * p.powi(k as i32);
    }
    Ok(sum)
}

/// The regular-graph (matching-conjecture) curve for degree `2d`:
/// `(1/2) [p log(2d) - p log p - 2 (1-p) log(1-p) + (2d - p) log(1 - p/(2d))]`.
pub fn lamc_omega(d: u32, p: f64) -> Result<f64, DomainError> {
    check_d(d)?;
    check_p(p)?;
    let two_d = 2.0 * f64::from(d);
    Ok(0.5
        * (p * two_d.ln() - xlogx(p) - 2.0 * xlogx(1.0 - p)
            + (two_d - p) * (1.0 - p / two_d).ln()))
}

/// The factorial sandwich `(1/2) log(2d) - 1/2  <=  log((2d)!)/(4d)  <=`
/// `(1/2) log(2d) - 1/2 + log(4 pi d)/(4d) + 1/(48 d^2)`, returned as
/// `(lower, middle, upper)`.
pub fn factorial_bounds(d: u32) -> Result<(f64, f64, f64), DomainError> {
    check_d(d)?;
    let two_d = 2.0 * f64::from(d);
    let lower = 0.5 * two_d.ln() - 0.5;
    let middle = ln_factorial(2 * d as u64) / (2.0 * two_d);
    let upper = lower + (2.0 * std::f64::consts::PI * two_d).ln() / (2.0 * two_d)
        + 1.0 / (48.0 * f64::from(d) * f64::from(d));
    Ok((lower, middle, upper))
}

/// The introductory sandwich for `lambda_d(p)`: the mean-field lower bound
/// and the factorial upper bound
/// `(1/2) (p log((2d)!)/(2d) - p log p - 2 (1-p) log(1-p))`.
pub fn intro_bounds(d: u32, p: f64) -> Result<(f64, f64), DomainError> {
    check_d(d)?;
    check_p(p)?;
    let lower = mean_field(d, p)?;
    let upper = 0.5
        * (p * ln_factorial(2 * d as u64) / (2.0 * f64::from(d)) - xlogx(p)
            - 2.0 * xlogx(1.0 - p));
    Ok((lower, upper))
}

/// The occupancy exponent
/// `H(p, j) = (1 - 2j) log(1 - 2j) + j + (p/2) log p - (p/2 - j) log(p - 2j)`
/// for `0 <= 2j <= p <= 1`.
pub fn h_exponent(p: f64, j: f64) -> Result<f64, DomainError> {
    check_p(p)?;
    if !(0.0..=p / 2.0).contains(&j) {
        return Err(DomainError::OccupancyOutOfRange { p, j });
    }
    Ok(xlogx(1.0 - 2.0 * j) + j + 0.5 * xlogx(p) - 0.5 * xlogx(p - 2.0 * j))
}

/// `dH/dj = log(p - 2j) - 2 log(1 - 2j)`, on the open part of the domain.
pub fn h_exponent_dj(p: f64, j: f64) -> Result<f64, DomainError> {
    check_p(p)?;
    if j < 0.0 || 2.0 * j >= p {
        return Err(DomainError::OccupancyOutOfRange { p, j });
    }
    Ok((p - 2.0 * j).ln() - 2.0 * (1.0 - 2.0 * j).ln())
}

/// `log(n!)` by direct summation; exact enough for the dimensions in play
/// and free of platform `lgamma` quirks.
fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// The embedded exact constants: correction polynomials `c_k(p)`, rearranged
/// coefficients `a_k` as polynomials in `1/d`, cluster coefficients `Jbar_s`
/// as polynomials in `1/d`, and the planar reference curve.
pub struct ReferenceConstants {
    c: Vec<RationalPoly>,
    a: Vec<RationalPoly>,
    jbar: Vec<RationalPoly>,
}

/// Planar reference values `(p, lambda_2(p))` derived from the known exact
/// solution of the planar monomer-dimer model, used as the `exact` column of
/// the reference table.
pub const PLANAR_REFERENCE: [(f64, f64); 6] = [
    (0.0, 0.0),
    (0.14870, 0.30887),
    (0.26030, 0.45284),
    (0.50426, 0.63495),
    (0.77053, 0.63086),
    (1.0, 0.29156),
];

impl ReferenceConstants {
    pub fn new() -> Self {
        let c = vec![
            RationalPoly::from_terms(&[(2, 1, 8)]),
            RationalPoly::from_terms(&[(3, 1, 48), (4, 1, 32)]),
            RationalPoly::from_terms(&[(4, -5, 192), (5, 1, 16), (6, 1, 24)]),
        ];
        let a = vec![
            RationalPoly::from_terms(&[(1, 1, 8)]),
            RationalPoly::from_terms(&[(2, 1, 48)]),
            RationalPoly::from_terms(&[(2, 1, 32), (3, -5, 192)]),
            RationalPoly::from_terms(&[(3, 1, 16), (4, -39, 640)]),
            RationalPoly::from_terms(&[(3, 1, 24), (4, -1, 32), (5, -19, 1920)]),
        ];
        let jbar = vec![
            RationalPoly::zero(),
            RationalPoly::from_terms(&[(1, 1, 8)]),
            RationalPoly::from_terms(&[(2, 1, 12)]),
            RationalPoly::from_terms(&[(2, -3, 32), (3, 3, 64)]),
            RationalPoly::from_terms(&[(3, -1, 8), (4, -3, 80)]),
            RationalPoly::from_terms(&[(3, 7, 48), (4, -5, 64), (5, -1, 6)]),
        ];
        ReferenceConstants { c, a, jbar }
    }

    /// Correction polynomial `c_k(p)` for `k` in `1..=3`.
    pub fn c(&self, k: u32) -> &RationalPoly {
        &self.c[(k - 1) as usize]
    }

    /// Rearranged coefficient `a_k` as a polynomial in `1/d`, `k` in `2..=6`.
    pub fn a(&self, k: u32) -> &RationalPoly {
        &self.a[(k - 2) as usize]
    }

    /// Cluster coefficient `Jbar_s` as a polynomial in `1/d`, `s` in `1..=6`.
    pub fn jbar(&self, s: u32) -> &RationalPoly {
        &self.jbar[(s - 1) as usize]
    }

    /// All constants as JSON, rationals rendered as `num/den` strings.
    pub fn manifest(&self) -> Value {
        fn poly_json(p: &RationalPoly) -> Value {
            let mut map = Map::new();
            for (e, c) in p.iter() {
                map.insert(e.to_string(), Value::String(c.to_string()));
            }
            Value::Object(map)
        }
        let c: Map<String, Value> = (1..=3u32)
            .map(|k| (k.to_string(), poly_json(self.c(k))))
            .collect();
        let a: Map<String, Value> = (2..=6u32)
            .map(|k| (k.to_string(), poly_json(self.a(k))))
            .collect();
        let jbar: Map<String, Value> = (1..=6u32)
            .map(|s| (s.to_string(), poly_json(self.jbar(s))))
            .collect();
        let planar: Vec<Value> = PLANAR_REFERENCE
            .iter()
            .map(|(p, v)| json!({ "p": p, "lambda2": v }))
            .collect();
        json!({
            "schema": "1",
            "c_polynomials_in_p": c,
            "a_coefficients_in_inv_d": a,
            "jbar_in_inv_d": jbar,
            "planar_reference": planar,
        })
    }
}

impl Default for ReferenceConstants {
    fn default() -> Self {
        ReferenceConstants::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::RationalPoly;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lambda1_endpoints_and_interior() {
        assert_eq!(lambda1_exact(0.0).unwrap(), 0.0);
        assert!(lambda1_exact(1.0).unwrap().abs() < 1e-15);
        let v = lambda1_exact(2.0 / 3.0).unwrap();
        assert!((v - (2.0 / 3.0) * std::f64::consts::LN_2).abs() < 1e-12);
        assert!(lambda1_exact(1.5).is_err());
        assert!(lambda1_exact(-0.1).is_err());
    }

    #[test]
    fn lambda1_series_coefficients() {
        assert_eq!(lambda1_series_coeff(2).unwrap(), rat(1, 8));
        assert_eq!(lambda1_series_coeff(3).unwrap(), rat(1, 48));
        assert_eq!(lambda1_series_coeff(6).unwrap(), rat(1, 1920));
        assert!(lambda1_series_coeff(1).is_err());
    }

    #[test]
    fn rearranged_coefficients_collapse_at_d1() {
        // At d = 1 each a_k sums to the one-dimensional series coefficient.
        let consts = ReferenceConstants::new();
        for k in 2..=6 {
            assert_eq!(
                consts.a(k).eval_rat(&BigRational::one()),
                lambda1_series_coeff(k).unwrap(),
                "a_{k}(1) mismatch"
            );
        }
    }

    #[test]
    fn mean_field_values() {
        assert_eq!(mean_field(2, 0.0).unwrap(), 0.0);
        let v = mean_field(2, 1.0).unwrap();
        assert!((v - 0.5 * (4.0f64.ln() - 1.0)).abs() < 1e-12);
        assert!((mean_field(1, 1.0).unwrap() + 0.153426).abs() < 1e-6);
        assert!(mean_field(0, 0.5).is_err());
        assert!(mean_field(2, 1.2).is_err());
    }

    #[test]
    fn expansion_partial_sums_match_reference_sequences() {
        let d2 = [0.2556, 0.2609, 0.2654, 0.2694, 0.2724];
        let d3 = [0.4375, 0.4399, 0.4424, 0.4439, 0.4450];
        for (i, k) in (2..=6).enumerate() {
            assert!((expansion_eval(2, 1.0, k).unwrap() - d2[i]).abs() < 5e-5);
            assert!((expansion_eval(3, 1.0, k).unwrap() - d3[i]).abs() < 5e-5);
        }
        assert!(expansion_eval(2, 1.0, 7).is_err());
        assert!(expansion_eval(2, 1.0, 1).is_err());
    }

    #[test]
    fn omega_curve_values() {
        // Degree 2 is the one-dimensional curve's conjectured value at p = 1.
        assert!(lamc_omega(1, 1.0).unwrap().abs() < 1e-15);
        assert_eq!(lamc_omega(2, 0.0).unwrap(), 0.0);
        let v = lamc_omega(2, 1.0).unwrap();
        assert!((v - 0.2616241).abs() < 5e-7);
    }

    #[test]
    fn factorial_sandwich() {
        let (lo, mid, hi) = factorial_bounds(1).unwrap();
        assert!((lo + 0.153426).abs() < 1e-6);
        assert!((mid - 0.173287).abs() < 1e-6);
        assert!(lo <= mid && mid <= hi);
        let (lo3, mid3, hi3) = factorial_bounds(3).unwrap();
        assert!((lo3 - 0.395880).abs() < 1e-6);
        assert!(lo3 <= mid3 && mid3 <= hi3);
        for d in 1..10 {
            let (lo, mid, hi) = factorial_bounds(d).unwrap();
            assert!(lo <= mid && mid <= hi, "sandwich fails at d = {d}");
        }
    }

    #[test]
    fn intro_sandwich() {
        assert_eq!(intro_bounds(3, 0.0).unwrap(), (0.0, 0.0));
        let (lo, hi) = intro_bounds(1, 1.0).unwrap();
        assert!((lo + 0.153426).abs() < 1e-6);
        assert!((hi - 0.173287).abs() < 1e-6);
        let (lo2, _) = intro_bounds(2, 1.0).unwrap();
        assert!((lo2 - 0.193147).abs() < 1e-6);
    }

    #[test]
    fn occupancy_exponent_values() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            assert_eq!(h_exponent(p, 0.0).unwrap(), 0.0);
        }
        assert!((h_exponent(1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let v = h_exponent(0.5, 0.125).unwrap();
        let expected = 0.75 * f64::ln(0.75) + 0.125;
        assert!((v - expected).abs() < 1e-12);
        assert!(h_exponent(0.5, 0.3).is_err());
    }

    #[test]
    fn occupancy_derivative_matches_finite_difference() {
        let (p, j, h) = (0.8, 0.1, 1e-6);
        let num = (h_exponent(p, j + h).unwrap() - h_exponent(p, j - h).unwrap()) / (2.0 * h);
        assert!((num - h_exponent_dj(p, j).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn manifest_is_well_formed() {
        let m = ReferenceConstants::new().manifest();
        assert_eq!(m["schema"], "1");
        assert_eq!(m["c_polynomials_in_p"]["1"]["2"], "1/8");
        assert_eq!(m["jbar_in_inv_d"]["4"]["2"], "-3/32");
        assert_eq!(m["planar_reference"][5]["lambda2"], 0.29156);
    }

    #[test]
    fn jbar_table_round_trip() {
        let consts = ReferenceConstants::new();
        assert!(consts.jbar(1).is_zero());
        assert_eq!(*consts.jbar(2), RationalPoly::from_terms(&[(1, 1, 8)]));
        assert_eq!(
            *consts.jbar(6),
            RationalPoly::from_terms(&[(3, 7, 48), (4, -5, 64), (5, -1, 6)])
        );
    }
}
