use super::hardy::{hardy_a, hardy_b, hardy_b_1_le_q, hardy_b_q_lt1, mass, HardyDirection};
use super::{
    breaks_of, integral_value, limit_tol, make_curve, sum_curve, sup_opts, sup_value, AltForm, CriterionCurve,
    CriterionSequence, CriterionValue, Entry, INNER_TOL, OUTER_TOL, REL_TOL,
};
use crate::error::{Error, Result};
use crate::num::powprod;
use crate::params::{case_of, Case, Exponents, OperatorKind};
use crate::quadrature::{
    classify_limit, integrate_with, sup_on_interval, Endpoint, LimitKind, LimitVerdict, QuadOptions, SupOptions,
};
use crate::weights::Weight;

const FULL: (f64, f64) = (0.0, f64::INFINITY);

/// `∫_0^∞ u^s(x) (1 + (x/t)^λ)^{−s} dx`, so that
/// `∫ u^s/(x^λ + t^λ)^s = t^{−λs}` times this.
fn kernel_mass(u: &Weight, s: f64, lam: f64, t: f64, breaks: &[f64]) -> f64 {
    if u.is_zero() {
        return 0.0;
    }
    let f = |x: f64| {
        let ux = u.value(x);
        if ux == 0.0 {
            0.0
        } else {
            (s * (ux.ln() - (x / t).powf(lam).ln_1p())).exp()
        }
    };
    let mut bp = breaks.to_vec();
    bp.push(t);
    let opts = QuadOptions { rel_tol: INNER_TOL, breakpoints: bp, ..QuadOptions::default() };
    integrate_with(&f, 0.0, f64::INFINITY, &opts).map_or(f64::NAN, |r| r.value)
}

/// `esssup_y v(y)/(1 + (y/t)^λ)`.
fn kernel_sup(v: &Weight, lam: f64, t: f64, breaks: &[f64]) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let f = |y: f64| v.eval_mid(y) / (1.0 + (y / t).powf(lam));
    let opts = SupOptions { points_per_decade: 16, ..sup_opts(breaks) };
    sup_on_interval(&f, 0.0, f64::INFINITY, &opts).map_or(f64::NAN, |s| s.value)
}

fn need(cond: bool, what: &str, exps: &Exponents) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BranchMismatch(format!("{what} is not defined for p = {}, q = {}", exps.p, exps.q)))
    }
}

/// The curve `A_S(t)` with its limits for `1 < p ≤ q < ∞`; for `p = 1 ≤ q`
/// the curve with `esssup_y` in place of the `v` integral, named `A_1S`,
/// together with its supremum as a value.
pub fn stieltjes_a(exps: &Exponents, v: &Weight, w: &Weight) -> Result<(CriterionCurve, Vec<CriterionValue>)> {
    let ok = exps.q.finite().is_some() && exps.p.finite().is_some_and(|p| p >= 1.0 && p <= exps.qf());
    need(ok, "A_S", exps)?;
    let (lam, p, q, pc) = (exps.lambda, exps.pf(), exps.qf(), exps.pc());
    let breaks = breaks_of(&[v, w]);
    let (vv, ww, bb) = (v.clone(), w.clone(), breaks.clone());
    if p == 1.0 {
        let f = move |t: f64| {
            powprod(&[(t, -lam), (kernel_mass(&ww, q, lam, t, &bb), 1.0 / q), (kernel_sup(&vv, lam, t, &bb), 1.0)])
        };
        let curve = make_curve("A_1S", f, FULL, &breaks, false)?;
        let value = sup_value("A_1S", &curve.sup);
        return Ok((curve, vec![value]));
    }
    let f = move |t: f64| {
        powprod(&[
            (t, -lam),
            (kernel_mass(&ww, q, lam, t, &bb), 1.0 / q),
            (kernel_mass(&vv, pc, lam, t, &bb), 1.0 / pc),
        ])
    };
    Ok((make_curve("A_S", f, FULL, &breaks, true)?, vec![]))
}

/// `B_S` for `1 < q < p < ∞` and the exact `L^p → L^1` norm `Λ` for
/// `q = 1 < p`, both by nested quadrature.
pub fn stieltjes_b(exps: &Exponents, v: &Weight, w: &Weight) -> Result<Vec<CriterionValue>> {
    need(exps.r.is_some() && exps.pf() > 1.0 && exps.qf() >= 1.0, "B_S", exps)?;
    let (lam, q, pc, r) = (exps.lambda, exps.qf(), exps.pc(), exps.rf());
    let breaks = breaks_of(&[v, w]);
    if q == 1.0 {
        let f = |t: f64| {
            let vt = v.value(t);
            if vt == 0.0 {
                return 0.0;
            }
            powprod(&[(t, -lam * pc), (kernel_mass(w, 1.0, lam, t, &breaks), pc), (vt, pc)])
        };
        return Ok(vec![integral_value("Lambda", &f, 0.0, f64::INFINITY, &breaks, 1.0 / pc, OUTER_TOL)?]);
    }
    let qc = q / (q - 1.0);
    let f = |t: f64| {
        let vt = v.value(t);
        if vt == 0.0 {
            return 0.0;
        }
        powprod(&[
            (t, -lam * r),
            (kernel_mass(w, q, lam, t, &breaks), r / q),
            (kernel_mass(v, pc, lam, t, &breaks), r / qc),
            (vt, pc),
        ])
    };
    Ok(vec![integral_value("B_S", &f, 0.0, f64::INFINITY, &breaks, 1.0 / r, OUTER_TOL)?])
}

/// `(q/p′)^{1/r} (∫ Φ^{r/q′} Ψ^{r/q} φ^{p′})^{1/r}`, the second form of a
/// `B` functional for `q > 1`.
fn b_by_parts(exps: &Exponents, phi: &Weight, psi: &Weight, dir: HardyDirection) -> Result<f64> {
    let (pc, q, r) = (exps.pc(), exps.qf(), exps.rf());
    let qc = q / (q - 1.0);
    let f = |t: f64| {
        let ph = phi.value(t);
        if ph == 0.0 {
            return 0.0;
        }
        let (a, b) = match dir {
            HardyDirection::Forward => (mass(phi, pc, 0.0, t), mass(psi, q, t, f64::INFINITY)),
            HardyDirection::Dual => (mass(phi, pc, t, f64::INFINITY), mass(psi, q, 0.0, t)),
        };
        powprod(&[(a, r / qc), (b, r / q), (ph, pc)])
    };
    let v = integral_value("", &f, 0.0, f64::INFINITY, &breaks_of(&[phi, psi]), 1.0 / r, REL_TOL)?;
    Ok(powprod(&[(q / pc, 1.0 / r), (v.value, 1.0)]))
}

/// `S_{H*}`-type factor `t^{−λ} v̄_t(c)`.
fn dual_sup(v: &Weight, lam: f64, t: f64, c: f64) -> f64 {
    if c <= t {
        return 0.0;
    }
    powprod(&[(t, -lam), (v.sup_between(t, c).unwrap_or(0.0), 1.0)])
}

fn b_1h_star(exps: &Exponents, v: &Weight, w: &Weight) -> Result<CriterionValue> {
    let (lam, q) = (exps.lambda, exps.qf());
    let e = q / (1.0 - q);
    let f = |t: f64| {
        let wt = w.value(t);
        if wt == 0.0 {
            return 0.0;
        }
        powprod(&[(dual_sup(v, lam, t, f64::INFINITY), e), (mass(w, q, 0.0, t), e), (wt, q)])
    };
    integral_value("B_1H*", &f, 0.0, f64::INFINITY, &breaks_of(&[v, w]), (1.0 - q) / q, REL_TOL)
}

/// `S_H(t) = v̄_0(t) 𝒲_t(∞)^{1/q}` style sums for `p = 1`: the pair
/// `S_{H,c}(t) + S_{H*,c}(t)` with `v̄`, `𝒲`, `W` restricted to `(lo, hi)`.
#[allow(clippy::too_many_arguments)]
fn s_pair(v: &Weight, psi: &Weight, w: &Weight, lam: f64, q: f64, lo: f64, hi: f64, t: f64) -> f64 {
    let fwd = powprod(&[(v.sup_between(lo, t).unwrap_or(0.0), 1.0), (mass(psi, q, t, hi), 1.0 / q)]);
    let dual = powprod(&[(dual_sup(v, lam, t, hi), 1.0), (mass(w, q, lo, t), 1.0 / q)]);
    fwd + dual
}

fn s_values(exps: &Exponents, v: &Weight, w: &Weight) -> Result<Vec<CriterionValue>> {
    let (lam, q) = (exps.lambda, exps.qf());
    let psi = w.times_power(-lam);
    let s_h = hardy_b_1_le_q("S_H", exps, v, &psi, FULL, HardyDirection::Forward)?;
    let (vv, ww) = (v.clone(), w.clone());
    let f = move |t: f64| powprod(&[(dual_sup(&vv, lam, t, f64::INFINITY), 1.0), (mass(&ww, q, 0.0, t), 1.0 / q)]);
    let curve = make_curve("S_H*", f, FULL, &breaks_of(&[v, w]), false)?;
    Ok(vec![s_h, sup_value("S_H*", &curve.sup)])
}

/// Criteria in terms of the Hardy pair `H`, `H*` bracketing the operator.
pub fn stieltjes_hardy_form(exps: &Exponents, v: &Weight, w: &Weight) -> Result<Vec<Entry>> {
    let lam = exps.lambda;
    let psi = w.times_power(-lam);
    let phi = v.times_power(-lam);
    let (fwd, dual) = (HardyDirection::Forward, HardyDirection::Dual);
    Ok(match case_of(exps, OperatorKind::Stieltjes) {
        Case::I => {
            let a = hardy_a("A_H", exps, v, &psi, FULL, fwd)?;
            let a_star = hardy_a("A_H*", exps, &phi, w, FULL, dual)?;
            let sum = sum_curve("A_H+A_H*", &[&a, &a_star], &breaks_of(&[v, w]))?;
            vec![Entry::Curve(a), Entry::Curve(a_star), Entry::Curve(sum)]
        }
        Case::II => {
            let mut b = hardy_b("B_H", exps, v, &psi, FULL, fwd)?;
            let mut b_star = hardy_b("B_H*", exps, &phi, w, FULL, dual)?;
            if exps.qf() > 1.0 {
                let label = "q > 1 form".to_string();
                b.alt = Some(AltForm { label: label.clone(), value: b_by_parts(exps, v, &psi, fwd)? });
                b_star.alt = Some(AltForm { label, value: b_by_parts(exps, &phi, w, dual)? });
            }
            vec![Entry::Value(b), Entry::Value(b_star)]
        }
        Case::III => {
            vec![Entry::Value(hardy_b_q_lt1("B_1H", exps, v, &psi, FULL, fwd)?), Entry::Value(b_1h_star(exps, v, w)?)]
        }
        Case::IV => s_values(exps, v, w)?.into_iter().map(Entry::Value).collect(),
        _ => return Err(Error::BranchMismatch(format!("no Hardy-form criteria for p = {}, q = {}", exps.p, exps.q))),
    })
}

/// Decades probed before a truncation sequence is declared undecided.
const MAX_DECADES: usize = 40;

fn truncation_sequence<F: Fn(f64) -> f64>(name: &str, endpoint: Endpoint, f: F, tol: f64) -> CriterionSequence {
    let mut points = Vec::new();
    let (mut kind, mut e) = (LimitKind::Inconclusive, f64::NAN);
    for k in 0..=MAX_DECADES {
        let c = match endpoint {
            Endpoint::Zero => 10f64.powi(-(k as i32)),
            _ => 10f64.powi(k as i32),
        };
        points.push((c, f(c)));
        if points.len() >= 12 {
            (kind, e) = classify_limit(endpoint, &points, tol);
            if kind != LimitKind::Inconclusive {
                break;
            }
        }
    }
    let limit = LimitVerdict { kind, endpoint, samples: points.clone(), fitted_exponent: e };
    CriterionSequence { name: name.into(), points, limit }
}

/// `S_H`, `S_{H*}` and the truncated sequences
/// `a ↦ sup_{0<t<a} [S_{H,a} + S_{H*,a}]` (`a = 10^{−k}`) and
/// `b ↦ sup_{t>b} [S_{H,b} + S_{H*,b}]` (`b = 10^k`) for `p = 1 ≤ q < ∞`.
pub fn stieltjes_p1(exps: &Exponents, v: &Weight, w: &Weight) -> Result<Vec<Entry>> {
    need(exps.p.finite() == Some(1.0) && exps.q.finite().is_some_and(|q| q >= 1.0), "S_H", exps)?;
    let (lam, q) = (exps.lambda, exps.qf());
    let vals = s_values(exps, v, w)?;
    let tol = limit_tol(vals.iter().map(|c| c.value).sum());
    let psi = w.times_power(-lam);
    let breaks = breaks_of(&[v, w]);
    let sup_of = |lo: f64, hi: f64| {
        let f = |t: f64| s_pair(v, &psi, w, lam, q, lo, hi, t);
        let opts = SupOptions { points_per_decade: 16, ..sup_opts(&breaks) };
        sup_on_interval(&f, lo, hi, &opts).map_or(f64::NAN, |s| s.value)
    };
    let sa = truncation_sequence("S_a", Endpoint::Zero, |a| sup_of(0.0, a), tol);
    let sb = truncation_sequence("S_b", Endpoint::Infinity, |b| sup_of(b, f64::INFINITY), tol);
    let mut out: Vec<Entry> = vals.into_iter().map(Entry::Value).collect();
    out.push(Entry::Sequence(sa));
    out.push(Entry::Sequence(sb));
    Ok(out)
}
