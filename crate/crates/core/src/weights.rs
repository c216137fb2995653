//! Piecewise power-log weights `c · t^a · (ln(1+t))^l` and their calculus:
//! evaluation, running essential suprema and moment integrals.

use crate::error::{Error, Result};
use crate::num::powprod;
use crate::quadrature::{self, QuadOptions};
use serde::{Deserialize, Serialize};

/// `c · t^a · (ln(1+t))^l` on `[from, to)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub from: f64,
    #[serde(with = "crate::ext")]
    pub to: f64,
    pub c: f64,
    pub a: f64,
    pub l: f64,
}

impl Piece {
    pub fn new(from: f64, to: f64, c: f64, a: f64, l: f64) -> Piece {
        Piece { from, to, c, a, l }
    }

    /// Formula value at `t > 0`, ignoring the interval.
    pub fn formula(&self, t: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        powprod(&[(self.c, 1.0), (t, self.a), (t.ln_1p(), self.l)])
    }

    /// `formula^s · t^m`, evaluated in log space.
    fn formula_pow(&self, t: f64, s: f64, m: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        powprod(&[(self.c, s), (t, self.a * s + m), (t.ln_1p(), self.l * s)])
    }

    /// One-sided limit of the formula at `x ∈ {0, ∞}` or value at finite `x > 0`.
    fn limit_at(&self, x: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            // ln(1+t) ~ t, so the formula behaves like c t^{a+l}.
            let e = self.a + self.l;
            if e < 0.0 {
                f64::INFINITY
            } else if e == 0.0 {
                self.c
            } else {
                0.0
            }
        } else if x.is_infinite() {
            if self.a > 0.0 || (self.a == 0.0 && self.l > 0.0) {
                f64::INFINITY
            } else if self.a < 0.0 || self.l < 0.0 {
                0.0
            } else {
                self.c
            }
        } else {
            self.formula(x)
        }
    }

    /// Supremum of the formula on the open interval `(lo, hi)`.
    fn sup_open(&self, lo: f64, hi: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let mut best = self.limit_at(lo).max(self.limit_at(hi));
        if self.l > 0.0 && self.a < 0.0 && -self.a / self.l < 1.0 {
            let x = critical_point(-self.a / self.l);
            if x > lo && x < hi {
                best = best.max(self.formula(x));
            }
        }
        best
    }
}

/// Solves `x / ((1+x) ln(1+x)) = k` for `k ∈ (0, 1)`; the left side decreases
/// from 1 to 0 on `(0, ∞)`.
fn critical_point(k: f64) -> f64 {
    let g = |u: f64| {
        let x = u.exp();
        x / ((1.0 + x) * x.ln_1p()) - k
    };
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// A moment integral value; `+∞` carries the divergent endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    #[serde(with = "crate::ext")]
    pub value: f64,
    #[serde(with = "crate::ext::opt")]
    pub abs_error: Option<f64>,
    #[serde(with = "crate::ext::opt")]
    pub divergent_at: Option<f64>,
}

impl MomentValue {
    pub fn finite(value: f64, abs_error: f64) -> Self {
        MomentValue { value, abs_error: Some(abs_error), divergent_at: None }
    }

    pub fn divergent(at: f64) -> Self {
        MomentValue { value: f64::INFINITY, abs_error: None, divergent_at: Some(at) }
    }

    pub fn is_finite(&self) -> bool {
        self.divergent_at.is_none() && self.value.is_finite()
    }
}

/// A non-negative weight on `(0, ∞)`; zero outside its pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pieces: Vec<Piece>,
}

impl Weight {
    /// Validates and sorts the pieces; overlapping pieces are rejected.
    pub fn piecewise(mut pieces: Vec<Piece>) -> Result<Weight> {
        for p in &pieces {
            if !(p.from >= 0.0 && p.from.is_finite()) {
                return Err(Error::InvalidWeight(format!("piece start {} must be finite and >= 0", p.from)));
            }
            if !(p.to > p.from) {
                return Err(Error::InvalidWeight(format!("empty piece [{}, {})", p.from, p.to)));
            }
            if !(p.c >= 0.0 && p.c.is_finite()) {
                return Err(Error::InvalidWeight(format!("coefficient {} must be finite and >= 0", p.c)));
            }
            if !(p.a.is_finite() && p.l.is_finite()) {
                return Err(Error::InvalidWeight("exponents must be finite".into()));
            }
        }
        pieces.sort_by(|x, y| x.from.total_cmp(&y.from));
        for w in pieces.windows(2) {
            if w[0].to > w[1].from {
                return Err(Error::InvalidWeight(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].from, w[0].to, w[1].from, w[1].to
                )));
            }
        }
        pieces.retain(|p| p.c > 0.0);
        Ok(Weight { pieces })
    }

    /// Power-law interpolation between samples, zero outside the table. A
    /// segment with a zero endpoint is zero on the open segment.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Weight> {
        if samples.len() < 2 {
            return Err(Error::InvalidWeight("a table needs at least two samples".into()));
        }
        for &(t, v) in samples {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidWeight(format!("abscissa {t} must be positive and finite")));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidWeight(format!("value {v} must be finite and >= 0")));
            }
        }
        let mut pieces = Vec::with_capacity(samples.len() - 1);
        for w in samples.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if !(t1 > t0) {
                return Err(Error::InvalidWeight("abscissae must be strictly increasing".into()));
            }
            if v0 > 0.0 && v1 > 0.0 {
                let a = (v1 / v0).ln() / (t1 / t0).ln();
                let c = (v0.ln() - a * t0.ln()).exp();
                pieces.push(Piece::new(t0, t1, c, a, 0.0));
            }
        }
        Weight::piecewise(pieces)
    }

    pub fn zero() -> Weight {
        Weight { pieces: vec![] }
    }

    pub fn constant(c: f64) -> Weight {
        Weight::piecewise(vec![Piece::new(0.0, f64::INFINITY, c, 0.0, 0.0)]).expect("valid constant")
    }

    /// `c · t^a` on `(0, ∞)`.
    pub fn power(c: f64, a: f64) -> Weight {
        Weight::piecewise(vec![Piece::new(0.0, f64::INFINITY, c, a, 0.0)]).expect("valid power")
    }

    /// Indicator of `[lo, hi)`.
    pub fn indicator(lo: f64, hi: f64) -> Weight {
        Weight::piecewise(vec![Piece::new(lo, hi, 1.0, 0.0, 0.0)]).expect("valid indicator")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Hull of the support, `None` for the zero weight.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.from, self.pieces.last()?.to))
    }

    /// Sorted finite positive piece endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> =
            self.pieces.iter().flat_map(|p| [p.from, p.to]).filter(|x| *x > 0.0 && x.is_finite()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// The weight multiplied by `t^m`.
    pub fn times_power(&self, m: f64) -> Weight {
        Weight { pieces: self.pieces.iter().map(|p| Piece { a: p.a + m, ..*p }).collect() }
    }

    /// The weight multiplied by `k ≥ 0`.
    pub fn scaled(&self, k: f64) -> Weight {
        if k == 0.0 {
            return Weight::zero();
        }
        Weight { pieces: self.pieces.iter().map(|p| Piece { c: p.c * k, ..*p }).collect() }
    }

    fn piece_at(&self, t: f64) -> Option<&Piece> {
        let i = self.pieces.partition_point(|p| p.from <= t);
        if i == 0 {
            return None;
        }
        let p = &self.pieces[i - 1];
        (t < p.to).then_some(p)
    }

    /// Pointwise value at `t > 0` (pieces are right-open).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveArgument(t));
        }
        Ok(self.value(t))
    }

    /// Pointwise value without the argument check; `0` for `t ≤ 0`.
    pub fn value(&self, t: f64) -> f64 {
        self.piece_at(t).map_or(0.0, |p| p.formula(t))
    }

    /// Value from the left at `t`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.from < t);
        if i == 0 {
            return 0.0;
        }
        let p = &self.pieces[i - 1];
        if t <= p.to {
            p.formula(t)
        } else {
            0.0
        }
    }

    /// Average of the one-sided limits; equals `value` off breakpoints.
    pub fn eval_mid(&self, t: f64) -> f64 {
        let (l, r) = (self.left_limit(t), self.value(t));
        if l == r {
            r
        } else {
            0.5 * (l + r)
        }
    }

    /// `esssup_{lo < x < hi} v(x)` for `0 ≤ lo < hi ≤ ∞`.
    pub fn sup_between(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::EmptyInterval { lo, hi });
        }
        let mut best = 0.0f64;
        for p in &self.pieces {
            let (a, b) = (p.from.max(lo), p.to.min(hi));
            if a < b {
                best = best.max(p.sup_open(a, b));
            }
        }
        Ok(best)
    }

    /// `v̄_{c1}(t) = esssup_{c1 < x < t} v(x)`.
    pub fn running_sup(&self, c1: f64, t: f64) -> Result<f64> {
        self.sup_between(c1, t)
    }

    /// Whether `∫_0^t v^s < ∞` for every finite `t`.
    pub fn locally_integrable(&self, s: f64) -> bool {
        self.pieces.iter().all(|p| p.from > 0.0 || (p.a + p.l) * s > -1.0)
    }

    /// `∫_{lo}^{hi} v(t)^s t^m dt` for `s > 0`, `0 ≤ lo < hi ≤ ∞`.
    pub fn moment(&self, s: f64, m: f64, lo: f64, hi: f64) -> MomentValue {
        assert!(s > 0.0, "moment power must be positive");
        let mut total = 0.0;
        let mut err = 0.0;
        for p in &self.pieces {
            let (a, b) = (p.from.max(lo), p.to.min(hi));
            if a >= b {
                continue;
            }
            let mv = piece_moment(p, s, m, a, b);
            if let Some(at) = mv.divergent_at {
                return MomentValue::divergent(at);
            }
            total += mv.value;
            err += mv.abs_error.unwrap_or(0.0);
        }
        if total.is_infinite() {
            // Overflow of a convergent integral; reported as divergence at `hi`.
            return MomentValue::divergent(hi);
        }
        MomentValue::finite(total, err)
    }

    /// `moment` with argument checks.
    pub fn moment_integral(&self, s: f64, m: f64, lo: f64, hi: f64) -> Result<MomentValue> {
        if !(s > 0.0) {
            return Err(Error::ParameterDomain(format!("moment power s must be positive, got {s}")));
        }
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::EmptyInterval { lo, hi });
        }
        Ok(self.moment(s, m, lo, hi))
    }
}

fn piece_moment(p: &Piece, s: f64, m: f64, a: f64, b: f64) -> MomentValue {
    let e = p.a * s + m;
    if p.l == 0.0 {
        let e1 = e + 1.0;
        if e1 == 0.0 {
            if a == 0.0 {
                return MomentValue::divergent(0.0);
            }
            if b.is_infinite() {
                return MomentValue::divergent(f64::INFINITY);
            }
            return MomentValue::finite(p.c.powf(s) * (b / a).ln(), 0.0);
        }
        if a == 0.0 && e1 < 0.0 {
            return MomentValue::divergent(0.0);
        }
        if b.is_infinite() && e1 > 0.0 {
            return MomentValue::divergent(f64::INFINITY);
        }
        let v = if a == 0.0 {
            powprod(&[(p.c, s), (b, e1)]) / e1
        } else if b.is_infinite() {
            -powprod(&[(p.c, s), (a, e1)]) / e1
        } else {
            powprod(&[(p.c, s), (a, e1)]) * (e1 * (b / a).ln()).exp_m1() / e1
        };
        return MomentValue::finite(v, 0.0);
    }
    if a == 0.0 && (p.a + p.l) * s + m <= -1.0 {
        return MomentValue::divergent(0.0);
    }
    if b.is_infinite() && (e > -1.0 || (e == -1.0 && p.l * s >= -1.0)) {
        return MomentValue::divergent(f64::INFINITY);
    }
    let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
    match quadrature::integrate_with(&|t: f64| p.formula_pow(t, s, m), a, b, &opts) {
        Ok(r) if r.value.is_finite() => MomentValue::finite(r.value, r.abs_error),
        Ok(r) => MomentValue::divergent(if r.divergent_at_zero() { 0.0 } else { f64::INFINITY }),
        Err(_) => MomentValue::divergent(b),
    }
}
