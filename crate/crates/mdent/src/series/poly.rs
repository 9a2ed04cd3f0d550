//! Sparse univariate polynomials with `BigRational` coefficients.
//!
//! The indeterminate is contextual: the same type holds polynomials in the
//! density `p` and polynomials in `1/d`. Display takes the variable name as
//! an argument for that reason.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::SeriesError;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalPoly {
    /// Exponent -> coefficient; zero coefficients are never stored.
    coeffs: BTreeMap<u32, BigRational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        RationalPoly::default()
    }

    pub fn one() -> Self {
        RationalPoly::monomial(0, BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        RationalPoly::monomial(0, c)
    }

    pub fn monomial(exp: u32, c: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        RationalPoly { coeffs }
    }

    /// Builds a polynomial from `(exponent, numerator, denominator)` triples.
    pub fn from_terms(terms: &[(u32, i64, i64)]) -> Self {
        let mut p = RationalPoly::zero();
        for &(exp, num, den) in terms {
            p.add_term(exp, &rat(num, den));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, exp: u32) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    fn add_term(&mut self, exp: u32, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return RationalPoly::zero();
        }
        RationalPoly {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn mul_xpow(&self, k: u32) -> Self {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// Divides by `x^k`, failing unless every exponent present is `>= k`.
    pub fn div_xpow_exact(&self, k: u32) -> Result<Self, SeriesError> {
        if let Some(min) = self.min_exponent() {
            if min < k {
                return Err(SeriesError::NotDivisible { power: k });
            }
        }
        Ok(RationalPoly {
            coeffs: self.coeffs.iter().map(|(e, v)| (e - k, v.clone())).collect(),
        })
    }

    /// Drops every term of degree `> max_deg`.
    pub fn truncate_deg(&self, max_deg: u32) -> Self {
        RationalPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| **e <= max_deg)
                .map(|(e, v)| (*e, v.clone()))
                .collect(),
        }
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        // Horner over the dense range is wasteful for sparse data; walk terms
        // from the top reusing powers instead.
        let mut acc = BigRational::zero();
        let mut last_exp: Option<u32> = None;
        for (&e, c) in self.coeffs.iter().rev() {
            match last_exp {
                None => acc = c.clone(),
                Some(prev) => {
                    for _ in e..prev {
                        acc *= x;
                    }
                    acc += c;
                }
            }
            last_exp = Some(e);
        }
        if let Some(e) = last_exp {
            for _ in 0..e {
                acc *= x;
            }
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * x.powi(*e as i32))
            .sum()
    }

    /// Renders the polynomial with the given variable name, lowest degree
    /// first, e.g. `1/48 * p^3 + 1/32 * p^4`. The variable name may itself be
    /// a reciprocal like `1/d`, in which case powers render as `1/d^2`.
    pub fn format_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (&e, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let var_part = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => {
                    if let Some(rest) = var.strip_prefix("1/") {
                        format!("1/{rest}^{e}")
                    } else {
                        format!("{var}^{e}")
                    }
                }
            };
            if var_part.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&var_part);
            } else {
                out.push_str(&format!("{mag} * {var_part}"));
            }
        }
        out
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        for (&e, c) in rhs.coeffs.iter() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        for (&e, c) in rhs.coeffs.iter() {
            out.add_term(e, &(-c.clone()));
        }
        out
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (&e1, c1) in self.coeffs.iter() {
            for (&e2, c2) in rhs.coeffs.iter() {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}
