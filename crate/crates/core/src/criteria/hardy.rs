use super::{breaks_of, integral_value, make_curve, sup_value, CriterionCurve, CriterionValue, Entry, REL_TOL};
use crate::error::{Error, Result};
use crate::num::powprod;
use crate::params::{case_of, Case, Exponents, OperatorKind};
use crate::weights::Weight;
use serde::{Deserialize, Serialize};

/// `H f(x) = ψ(x) ∫_{c1}^x f φ` or its dual `H* f(x) = ψ(x) ∫_x^{c2} f φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyDirection {
    Forward,
    Dual,
}

impl HardyDirection {
    fn star(self) -> &'static str {
        match self {
            HardyDirection::Forward => "",
            HardyDirection::Dual => "*",
        }
    }
}

/// `∫_{lo}^{hi} u^s`, zero on empty ranges.
pub(crate) fn mass(u: &Weight, s: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        0.0
    } else {
        u.moment(s, 0.0, lo, hi).value
    }
}

fn esssup(u: &Weight, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        0.0
    } else {
        u.sup_between(lo, hi).unwrap_or(0.0)
    }
}

/// `(Φ, Ψ)` at `t` for the given direction: `(Φ_{c1}(t), Ψ_t(c2))` forward,
/// `(Φ_t(c2), Ψ_{c1}(t))` dual.
fn masses(phi: &Weight, psi: &Weight, pc: f64, q: f64, c: (f64, f64), t: f64, dir: HardyDirection) -> (f64, f64) {
    match dir {
        HardyDirection::Forward => (mass(phi, pc, c.0, t), mass(psi, q, t, c.1)),
        HardyDirection::Dual => (mass(phi, pc, t, c.1), mass(psi, q, c.0, t)),
    }
}

fn local_sup(phi: &Weight, c: (f64, f64), t: f64, dir: HardyDirection) -> f64 {
    match dir {
        HardyDirection::Forward => esssup(phi, c.0, t),
        HardyDirection::Dual => esssup(phi, t, c.1),
    }
}

pub(crate) fn hardy_a(
    name: &str,
    exps: &Exponents,
    phi: &Weight,
    psi: &Weight,
    c: (f64, f64),
    dir: HardyDirection,
) -> Result<CriterionCurve> {
    let (pc, q) = (exps.pc(), exps.qf());
    let (ph, ps) = (phi.clone(), psi.clone());
    let f = move |t: f64| {
        let (a, b) = masses(&ph, &ps, pc, q, c, t, dir);
        powprod(&[(a, 1.0 / pc), (b, 1.0 / q)])
    };
    make_curve(name, f, c, &breaks_of(&[phi, psi]), true)
}

pub(crate) fn hardy_b(
    name: &str,
    exps: &Exponents,
    phi: &Weight,
    psi: &Weight,
    c: (f64, f64),
    dir: HardyDirection,
) -> Result<CriterionValue> {
    let (p, pc, q, r) = (exps.pf(), exps.pc(), exps.qf(), exps.rf());
    let f = |t: f64| {
        let s = psi.value(t);
        if s == 0.0 {
            return 0.0;
        }
        let (a, b) = masses(phi, psi, pc, q, c, t, dir);
        powprod(&[(a, r / pc), (b, r / p), (s, q)])
    };
    integral_value(name, &f, c.0, c.1, &breaks_of(&[phi, psi]), 1.0 / r, REL_TOL)
}

pub(crate) fn hardy_b_q_lt1(
    name: &str,
    exps: &Exponents,
    phi: &Weight,
    psi: &Weight,
    c: (f64, f64),
    dir: HardyDirection,
) -> Result<CriterionValue> {
    let q = exps.qf();
    let e = q / (1.0 - q);
    let f = |t: f64| {
        let s = psi.value(t);
        if s == 0.0 {
            return 0.0;
        }
        let (_, b) = masses(phi, psi, 1.0, q, c, t, dir);
        powprod(&[(local_sup(phi, c, t, dir), e), (b, e), (s, q)])
    };
    integral_value(name, &f, c.0, c.1, &breaks_of(&[phi, psi]), (1.0 - q) / q, REL_TOL)
}

pub(crate) fn hardy_b_1_le_q(
    name: &str,
    exps: &Exponents,
    phi: &Weight,
    psi: &Weight,
    c: (f64, f64),
    dir: HardyDirection,
) -> Result<CriterionValue> {
    let q = exps.qf();
    let (ph, ps) = (phi.clone(), psi.clone());
    let f = move |t: f64| {
        let (_, b) = masses(&ph, &ps, 1.0, q, c, t, dir);
        powprod(&[(local_sup(&ph, c, t, dir), 1.0), (b, 1.0 / q)])
    };
    let curve = make_curve(name, f, c, &breaks_of(&[phi, psi]), false)?;
    Ok(sup_value(name, &curve.sup))
}

/// The branch-appropriate Hardy functional for weights `φ` (inner) and `ψ`
/// (outer) on `(c1, c2)`: `A` for `1 < p ≤ q`, `B` for `q < p`, `p > 1`,
/// `B_q<1` for `q < 1 = p` and `B_1<=q` for `p = 1 ≤ q`; starred for the dual.
pub fn hardy_criteria(
    exps: &Exponents,
    phi: &Weight,
    psi: &Weight,
    interval: (f64, f64),
    dir: HardyDirection,
) -> Result<Vec<Entry>> {
    let (c1, c2) = interval;
    if !(c1 >= 0.0 && c2 > c1 && c1.is_finite()) {
        return Err(Error::EmptyInterval { lo: c1, hi: c2 });
    }
    let star = dir.star();
    Ok(match case_of(exps, OperatorKind::Hardy) {
        Case::I => vec![Entry::Curve(hardy_a(&format!("A{star}"), exps, phi, psi, interval, dir)?)],
        Case::II => vec![Entry::Value(hardy_b(&format!("B{star}"), exps, phi, psi, interval, dir)?)],
        Case::III => vec![Entry::Value(hardy_b_q_lt1(&format!("B{star}_q<1"), exps, phi, psi, interval, dir)?)],
        Case::IV => vec![Entry::Value(hardy_b_1_le_q(&format!("B{star}_1<=q"), exps, phi, psi, interval, dir)?)],
        _ => return Err(Error::BranchMismatch(format!("no Hardy criterion for p = {}, q = {}", exps.p, exps.q))),
    })
}
