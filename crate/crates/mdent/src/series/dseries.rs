//! Truncated formal series in `1/d` whose coefficients are polynomials in `p`.
//!
//! A `DSeries` with truncation `K` knows the coefficients of `(1/d)^0` through
//! `(1/d)^K` exactly and nothing beyond; arithmetic propagates the minimum
//! truncation of its operands, so accuracy bookkeeping is automatic.

use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

use super::poly::RationalPoly;
use super::SeriesError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSeries {
    trunc: u32,
    /// Power of `1/d` -> polynomial in `p`; zero polynomials are not stored.
    coeffs: BTreeMap<u32, RationalPoly>,
}

impl DSeries {
    pub fn zero(trunc: u32) -> Self {
        DSeries { trunc, coeffs: BTreeMap::new() }
    }

    /// A series whose order-0 coefficient is the given polynomial in `p`.
    pub fn from_p_poly(poly: &RationalPoly, trunc: u32) -> Self {
        let mut s = DSeries::zero(trunc);
        s.set_coeff(0, poly.clone());
        s
    }

    /// Interprets a polynomial in `1/d` as a series: each term `c * (1/d)^k`
    /// becomes a constant-in-`p` coefficient at order `k`. Terms beyond the
    /// truncation are dropped.
    pub fn from_invd_poly(poly: &RationalPoly, trunc: u32) -> Self {
        let mut s = DSeries::zero(trunc);
        for (k, c) in poly.iter() {
            if k <= trunc {
                s.set_coeff(k, RationalPoly::constant(c.clone()));
            }
        }
        s
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn coeff(&self, k: u32) -> RationalPoly {
        self.coeffs.get(&k).cloned().unwrap_or_else(RationalPoly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &RationalPoly)> {
        self.coeffs.iter().map(|(k, p)| (*k, p))
    }

    fn set_coeff(&mut self, k: u32, poly: RationalPoly) {
        if poly.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, poly);
        }
    }

    pub fn add(&self, rhs: &DSeries) -> DSeries {
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = DSeries::zero(trunc);
        for k in 0..=trunc {
            let sum = &self.coeff(k) + &rhs.coeff(k);
            out.set_coeff(k, sum);
        }
        out
    }

    pub fn sub(&self, rhs: &DSeries) -> DSeries {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> DSeries {
        DSeries {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(k, p)| (*k, -p)).collect(),
        }
    }

    pub fn mul(&self, rhs: &DSeries) -> DSeries {
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = DSeries::zero(trunc);
        for (&k1, p1) in self.coeffs.iter() {
            if k1 > trunc {
                continue;
            }
            for (&k2, p2) in rhs.coeffs.iter() {
                let k = k1 + k2;
                if k > trunc {
                    continue;
                }
                let sum = &out.coeff(k) + &(p1 * p2);
                out.set_coeff(k, sum);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> DSeries {
        if c.is_zero() {
            return DSeries::zero(self.trunc);
        }
        DSeries {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    /// Multiplies every coefficient by a polynomial in `p`.
    pub fn mul_p_poly(&self, poly: &RationalPoly) -> DSeries {
        if poly.is_zero() {
            return DSeries::zero(self.trunc);
        }
        DSeries {
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(k, p)| (*k, p * poly)).collect(),
        }
    }

    /// Divides every coefficient by `p^k`, failing if any is not divisible.
    pub fn div_p_exact(&self, k: u32) -> Result<DSeries, SeriesError> {
        let mut out = DSeries::zero(self.trunc);
        for (&ord, poly) in self.coeffs.iter() {
            out.set_coeff(ord, poly.div_xpow_exact(k)?);
        }
        Ok(out)
    }

    /// Drops every `p`-power above `max_deg` in every coefficient.
    pub fn truncate_p_deg(&self, max_deg: u32) -> DSeries {
        let mut out = DSeries::zero(self.trunc);
        for (&ord, poly) in self.coeffs.iter() {
            out.set_coeff(ord, poly.truncate_deg(max_deg));
        }
        out
    }

    /// `exp` of a series with no order-0 term.
    pub fn exp(&self) -> Result<DSeries, SeriesError> {
        if !self.coeff(0).is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let mut result = DSeries::from_p_poly(&RationalPoly::one(), self.trunc);
        let mut term = DSeries::from_p_poly(&RationalPoly::one(), self.trunc);
        for n in 1..=self.trunc {
            term = term.mul(self).scale(&BigRational::new(1.into(), n.into()));
            if term.is_zero() {
                break;
            }
            result = result.add(&term);
        }
        Ok(result)
    }

    /// `log(1 + self)` for a series with no order-0 term.
    pub fn log1p(&self) -> Result<DSeries, SeriesError> {
        if !self.coeff(0).is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let mut result = DSeries::zero(self.trunc);
        let mut power = DSeries::from_p_poly(&RationalPoly::one(), self.trunc);
        for n in 1..=self.trunc {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            let sign: i64 = if n % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale(&BigRational::new(sign.into(), n.into())));
        }
        Ok(result)
    }

    /// Numerical evaluation `sum_k coeff_k(p) / d^k`.
    pub fn eval_f64(&self, d: f64, p: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, poly)| poly.eval_f64(p) / d.powi(*k as i32))
            .sum()
    }

    /// Renders nonzero terms as `poly / d^k` blocks, lowest order first.
    pub fn format_terms(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&k, poly) in self.coeffs.iter() {
            let body = poly.format_in("p");
            match k {
                0 => parts.push(body),
                1 => parts.push(format!("({body}) / d")),
                _ => parts.push(format!("({body}) / d^{k}")),
            }
        }
        parts.join(" + ")
    }

    /// Evaluates each rational coefficient to `f64` for reporting.
    pub fn coeff_f64(&self, k: u32, p: f64) -> f64 {
        self.coeff(k).eval_f64(p)
    }
}

/// Rational-to-float helper that keeps unwrap noise out of call sites.
#[cfg(test)]
pub(crate) fn rat_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
