//! Recursive lower bound, the two upper bounds, and the dimension chain.
//!
//! The lower bound relates `lambda_d` at density `p` to `lambda_{d-1}` at a
//! chosen occupancy `q <= p`; maximizing over `q` gives the best member of
//! the family, and the distinguished choice `q = p(1 - 1/d)` reproduces the
//! classical recursive inequality. The two upper bounds maximize over the
//! density `u` spent on the distinguished axis, with `u` restricted to
//! `[0, p/d]`. Chaining either bound from the exact one-dimensional curve
//! walks the dimension up, carrying sampled base curves.
//!
//! Upper bounds at `d >= 3` are conditional on the punctured-box counting
//! conjecture for the lower dimension; `d = 2` is rigorous. Every report
//! carries that flag.

use crate::closed_forms::{expansion_eval, lambda1_exact, lamc_omega, mean_field};
use crate::xlog::xlogx;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    DimensionTooSmall(u32),
    DensityOutOfRange(f64),
    ParameterOutOfRange { name: &'static str, value: f64 },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::DimensionTooSmall(d) => {
                write!(f, "bounds require dimension >= 2, got {d}")
            }
            BoundsError::DensityOutOfRange(p) => {
                write!(f, "density must lie in [0, 1], got {p}")
            }
            BoundsError::ParameterOutOfRange { name, value } => {
                write!(f, "parameter {name} = {value} outside its admissible range")
            }
        }
    }
}

impl std::error::Error for BoundsError {}

fn check_p(p: f64) -> Result<(), BoundsError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(BoundsError::DensityOutOfRange(p))
    }
}

fn check_d(d: u32) -> Result<(), BoundsError> {
    if d >= 2 {
        Ok(())
    } else {
        Err(BoundsError::DimensionTooSmall(d))
    }
}

/// Number of sample points carried by a [`SampledCurve`] on `[0, 1]`.
pub const CURVE_SAMPLES: usize = 4097;

/// A curve on `[0, 1]` stored as equispaced samples with piecewise-linear
/// interpolation; used to pass one dimension's bound up to the next.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    values: Vec<f64>,
}

impl SampledCurve {
    pub fn from_fn(f: impl Fn(f64) -> f64) -> SampledCurve {
        let n = CURVE_SAMPLES;
        let values = (0..n).map(|i| f(i as f64 / (n - 1) as f64)).collect();
        SampledCurve { values }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let t = x.clamp(0.0, 1.0) * (n - 1) as f64;
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// How the base curve for `lambda_{d-1}` was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseCurveId {
    ExactLambda1,
    Chained,
    Expansion,
}

impl BaseCurveId {
    pub fn as_str(self) -> &'static str {
        match self {
            BaseCurveId::ExactLambda1 => "exact-lambda1",
            BaseCurveId::Chained => "chained",
            BaseCurveId::Expansion => "expansion",
        }
    }
}

enum BaseForm {
    Lambda1,
    Omega(u32),
    MeanField(u32),
    Expansion { d: u32, kmax: u32 },
    Samples(SampledCurve),
}

/// The curve standing in for `lambda_{d-1}` on `[0, 1]`.
pub struct BaseCurve {
    id: BaseCurveId,
    form: BaseForm,
}

impl BaseCurve {
    /// The exact one-dimensional entropy; the rigorous base for `d = 2`.
    pub fn exact_lambda1() -> BaseCurve {
        BaseCurve { id: BaseCurveId::ExactLambda1, form: BaseForm::Lambda1 }
    }

    /// The closed-form fixed-point curve of the recursion at dimension `d`.
    pub fn omega(d: u32) -> BaseCurve {
        BaseCurve { id: BaseCurveId::Expansion, form: BaseForm::Omega(d) }
    }

    /// The mean-field approximate entropy at dimension `d`.
    pub fn mean_field(d: u32) -> BaseCurve {
        BaseCurve { id: BaseCurveId::Expansion, form: BaseForm::MeanField(d) }
    }

    /// Mean field plus the `1/d` correction series through order `kmax`.
    pub fn expansion(d: u32, kmax: u32) -> BaseCurve {
        BaseCurve { id: BaseCurveId::Expansion, form: BaseForm::Expansion { d, kmax } }
    }

    /// A sampled curve chained up from the previous dimension.
    pub fn chained_samples(curve: SampledCurve) -> BaseCurve {
        BaseCurve { id: BaseCurveId::Chained, form: BaseForm::Samples(curve) }
    }

    pub fn id(&self) -> BaseCurveId {
        self.id
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.form {
            BaseForm::Lambda1 => lambda1_exact(x).expect("x clamped"),
            BaseForm::Omega(d) => lamc_omega(*d, x).expect("x clamped"),
            BaseForm::MeanField(d) => mean_field(*d, x).expect("x clamped"),
            BaseForm::Expansion { d, kmax } => {
                expansion_eval(*d, x, *kmax).expect("x clamped")
            }
            BaseForm::Samples(curve) => curve.eval(x),
        }
    }
}

/// Dense grid scan plus golden-section polish. The grid guards against
/// secondary maxima; golden section only refines the best grid cell. Seeds
/// are evaluated alongside the grid so distinguished points can never be
/// lost to grid placement.
fn maximize(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, seeds: &[f64]) -> (f64, f64) {
    const GRID: usize = 2048;
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    if !(hi > lo) {
        return (f(lo), lo);
    }
    let step = (hi - lo) / GRID as f64;
    let mut best_x = lo;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    for &s in seeds {
        if (lo..=hi).contains(&s) {
            let v = f(s);
            if v > best_v {
                best_v = v;
                best_x = s;
            }
        }
    }
    let mut a = (best_x - step).max(lo);
    let mut b = (best_x + step).min(hi);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-9 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let vm = f(mid);
    if vm > best_v {
        (vm, mid)
    } else {
        (best_v, best_x)
    }
}

fn lower_objective(p: f64, q: f64, base: &BaseCurve) -> f64 {
    let r = ((p - q) / 2.0).max(0.0);
    base.eval(q) + xlogx((1.0 - q).max(0.0)) - xlogx(r) + xlogx((1.0 - r).max(0.0))
        - xlogx((1.0 - p).max(0.0))
}

/// One member of the lower-bound family: relates the entropy at `(d, p)` to
/// the base curve at occupancy `q`.
pub fn lower_bound_at_q(d: u32, p: f64, q: f64, base: &BaseCurve) -> Result<f64, BoundsError> {
    check_d(d)?;
    check_p(p)?;
    if !(0.0..=p).contains(&q) {
        return Err(BoundsError::ParameterOutOfRange { name: "q", value: q });
    }
    Ok(lower_objective(p, q, base))
}

/// Best member of the lower-bound family over `q` in `[0, p]`.
pub fn lower_bound(d: u32, p: f64, base: &BaseCurve) -> Result<(f64, f64), BoundsError> {
    check_d(d)?;
    check_p(p)?;
    let recur_q = p * (1.0 - 1.0 / f64::from(d));
    Ok(maximize(&|q| lower_objective(p, q, base), 0.0, p, &[recur_q]))
}

/// The lower bound at the distinguished occupancy `q = p(1 - 1/d)`.
pub fn recur_bound(d: u32, p: f64, base: &BaseCurve) -> Result<f64, BoundsError> {
    check_d(d)?;
    check_p(p)?;
    Ok(lower_objective(p, p * (1.0 - 1.0 / f64::from(d)), base))
}

/// Which `u`-interval the upper-bound maximizations scan. The standard
/// window `[0, p/d]` follows the expected axis load; the complement is kept
/// available for exploration only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum URange {
    Standard,
    Complement,
}

/// Objective of [`upper_bound_a`] at a fixed axis density `u`.
pub fn upper_objective_a(p: f64, u: f64, base: &BaseCurve) -> f64 {
    let q = if 1.0 - u > 0.0 { ((p - u) / (1.0 - u)).clamp(0.0, 1.0) } else { 1.0 };
    xlogx((1.0 - u / 2.0).max(0.0)) - xlogx((u / 2.0).max(0.0)) - xlogx((1.0 - u).max(0.0))
        + (1.0 - u) * base.eval(q)
}

/// Objective of [`upper_bound_b`] at a fixed axis density `u`.
pub fn upper_objective_b(p: f64, u: f64, base: &BaseCurve) -> f64 {
    let q = ((p - u) / (1.0 - u / 2.0)).clamp(0.0, 1.0);
    xlogx((1.0 - p + u / 2.0).max(0.0)) - xlogx((u / 2.0).max(0.0))
        - xlogx((1.0 - p).max(0.0))
        + (1.0 - u / 2.0) * base.eval(q)
}

fn u_interval(d: u32, p: f64, range: URange) -> (f64, f64) {
    let split = p / f64::from(d);
    match range {
        URange::Standard => (0.0, split),
        URange::Complement => (split, 1.0),
    }
}

pub fn upper_bound_a_in(
    d: u32,
    p: f64,
    base: &BaseCurve,
    range: URange,
) -> Result<(f64, f64), BoundsError> {
    check_d(d)?;
    check_p(p)?;
    let (lo, hi) = u_interval(d, p, range);
    Ok(maximize(&|u| upper_objective_a(p, u, base), lo, hi, &[]))
}

pub fn upper_bound_b_in(
    d: u32,
    p: f64,
    base: &BaseCurve,
    range: URange,
) -> Result<(f64, f64), BoundsError> {
    check_d(d)?;
    check_p(p)?;
    let (lo, hi) = u_interval(d, p, range);
    Ok(maximize(&|u| upper_objective_b(p, u, base), lo, hi, &[]))
}

/// First upper bound, maximized over `u` in `[0, p/d]`.
pub fn upper_bound_a(d: u32, p: f64, base: &BaseCurve) -> Result<(f64, f64), BoundsError> {
    upper_bound_a_in(d, p, base, URange::Standard)
}

/// Second (sharper) upper bound, maximized over `u` in `[0, p/d]`.
pub fn upper_bound_b(d: u32, p: f64, base: &BaseCurve) -> Result<(f64, f64), BoundsError> {
    upper_bound_b_in(d, p, base, URange::Standard)
}

/// Pointwise difference of the two upper-bound braces when the base is the
/// mean-field curve: `(1/2)(p-u) log((1-u/2)/(1-u))`. Positive for `u < p`.
pub fn brace_gap(p: f64, u: f64) -> Result<f64, BoundsError> {
    check_p(p)?;
    if !(0.0..=p).contains(&u) {
        return Err(BoundsError::ParameterOutOfRange { name: "u", value: u });
    }
    if u == p {
        return Ok(0.0);
    }
    Ok(0.5 * (p - u) * ((1.0 - u / 2.0) / (1.0 - u)).ln())
}

/// All bounds at one `(d, p)` point, plus the maximizer locations and the
/// provenance of the base curve.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub d: u32,
    pub p: f64,
    pub lower_value: f64,
    pub lower_q_star: f64,
    pub recur_value: f64,
    pub upper_a_value: f64,
    pub upper_a_u_star: f64,
    pub upper_b_value: f64,
    pub upper_b_u_star: f64,
    pub base_curve_id: BaseCurveId,
    /// Upper bounds at `d >= 3` assume the punctured-box conjecture.
    pub conditional: bool,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str =
        "d,p,lb,q_star,recur,ubA,uA_star,ubB,uB_star,conditional";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            self.d,
            self.p,
            self.lower_value,
            self.lower_q_star,
            self.recur_value,
            self.upper_a_value,
            self.upper_a_u_star,
            self.upper_b_value,
            self.upper_b_u_star,
            self.conditional,
        )
    }
}

fn report_with(
    d: u32,
    p: f64,
    lower_base: &BaseCurve,
    upper_base: &BaseCurve,
    id: BaseCurveId,
) -> Result<BoundReport, BoundsError> {
    let (lower_value, lower_q_star) = lower_bound(d, p, lower_base)?;
    let recur_value = recur_bound(d, p, lower_base)?;
    let (upper_a_value, upper_a_u_star) = upper_bound_a(d, p, upper_base)?;
    let (upper_b_value, upper_b_u_star) = upper_bound_b(d, p, upper_base)?;
    Ok(BoundReport {
        d,
        p,
        lower_value,
        lower_q_star,
        recur_value,
        upper_a_value,
        upper_a_u_star,
        upper_b_value,
        upper_b_u_star,
        base_curve_id: id,
        conditional: d >= 3,
    })
}

/// Every bound at one point, with the same base curve on both sides.
pub fn report_at(d: u32, p: f64, base: &BaseCurve) -> Result<BoundReport, BoundsError> {
    report_with(d, p, base, base, base.id())
}

/// Chains bounds from the exact one-dimensional curve up to `d_target`,
/// emitting one report per `(d, p)`. The lower chain feeds each level's
/// maximized lower bound to the next; the upper chain feeds the sharper
/// upper bound.
pub fn chain(d_target: u32, p_grid: &[f64]) -> Result<Vec<BoundReport>, BoundsError> {
    check_d(d_target)?;
    for &p in p_grid {
        check_p(p)?;
    }
    let mut reports = Vec::with_capacity(p_grid.len() * (d_target as usize - 1));
    let mut lower_base = BaseCurve::exact_lambda1();
    let mut upper_base = BaseCurve::exact_lambda1();
    for d in 2..=d_target {
        let id = if d == 2 { BaseCurveId::ExactLambda1 } else { BaseCurveId::Chained };
        for &p in p_grid {
            reports.push(report_with(d, p, &lower_base, &upper_base, id)?);
        }
        if d < d_target {
            let lb = SampledCurve::from_fn(|x| {
                lower_bound(d, x, &lower_base).expect("sampler stays in range").0
            });
            let ub = SampledCurve::from_fn(|x| {
                upper_bound_b(d, x, &upper_base).expect("sampler stays in range").0
            });
            lower_base = BaseCurve::chained_samples(lb);
            upper_base = BaseCurve::chained_samples(ub);
        }
    }
    Ok(reports)
}
