use super::{
    breaks_of, integral_value, make_curve, sup_value, tail_power, AltForm, CriterionCurve, CriterionValue, Entry,
    REL_TOL,
};
use crate::error::{Error, Result};
use crate::num::powprod;
use crate::params::{Exponent, Exponents};
use crate::weights::Weight;

fn need(cond: bool, what: &str, exps: &Exponents) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::BranchMismatch(format!("{what} is not defined for p = {}, q = {}", exps.p, exps.q)))
    }
}

fn check_interval(c1: f64, c2: f64) -> Result<()> {
    if c1 >= 0.0 && c2 > c1 && c1.is_finite() {
        Ok(())
    } else {
        Err(Error::EmptyInterval { lo: c1, hi: c2 })
    }
}

/// `V_{c1}(t) = ∫_{c1}^t v^{p′}`.
pub(crate) fn v_integral(v: &Weight, pc: f64, c1: f64, t: f64) -> f64 {
    if t <= c1 {
        0.0
    } else {
        v.moment(pc, 0.0, c1, t).value
    }
}

/// The curve `(t^{−λ} − c2^{−λ})^{1/q} V_{c1}(t)^{1/p′}` on `(c1, c2)` with
/// its endpoint limits, and `D = c2^{−λ/q} V_{c1}(c2)^{1/p′}` (`0` for `c2 = ∞`).
pub fn laplace_a(exps: &Exponents, v: &Weight, interval: (f64, f64)) -> Result<(CriterionCurve, CriterionValue)> {
    need(exps.p.finite().is_some_and(|p| p > 1.0) && exps.q.finite().is_some(), "A_L", exps)?;
    let (c1, c2) = interval;
    check_interval(c1, c2)?;
    let (lam, q, pc) = (exps.lambda, exps.qf(), exps.pc());
    let vv = v.clone();
    let f = move |t: f64| powprod(&[(tail_power(t, c2, lam), 1.0 / q), (v_integral(&vv, pc, c1, t), 1.0 / pc)]);
    let curve = make_curve("A_L", f, interval, &breaks_of(&[v]), true)?;
    let d = if c2.is_infinite() { 0.0 } else { powprod(&[(c2, -lam / q), (v_integral(v, pc, c1, c2), 1.0 / pc)]) };
    Ok((curve, CriterionValue::exact("D", d)))
}

/// `B_L` directly and, on the full axis, by integration by parts; `B_p` when
/// `q = 1`.
pub fn laplace_b(exps: &Exponents, v: &Weight, interval: (f64, f64)) -> Result<Vec<CriterionValue>> {
    need(exps.r.is_some() && exps.pf() > 1.0, "B_L", exps)?;
    let (c1, c2) = interval;
    check_interval(c1, c2)?;
    let (lam, q, pc, r) = (exps.lambda, exps.qf(), exps.pc(), exps.rf());
    let breaks = breaks_of(&[v]);
    let mut out = Vec::new();
    if q == 1.0 {
        let m = v.moment(pc, -lam * pc, c1, c2);
        let mut b = CriterionValue::exact("B_p", powprod(&[(m.value, 1.0 / pc)]));
        b.divergent_at = m.divergent_at;
        b.abs_error = m.abs_error;
        out.push(b);
    }
    // r/q′ = r(1 − 1/q); negative for q < 1.
    let rq_conj = r * (1.0 - 1.0 / q);
    let direct = |t: f64| {
        let vt = v.value(t);
        if vt == 0.0 {
            return 0.0;
        }
        powprod(&[(tail_power(t, c2, lam), r / q), (v_integral(v, pc, c1, t), rq_conj), (vt, pc)])
    };
    let mut b = integral_value("B_L", &direct, c1, c2, &breaks, 1.0 / r, REL_TOL)?;
    let full = c1 == 0.0 && c2.is_infinite();
    if full && (v.locally_integrable(pc) || q > 1.0) {
        let by_parts = |t: f64| powprod(&[(v_integral(v, pc, 0.0, t), r / pc), (t, -lam * r / q - 1.0)]);
        let bp = integral_value("B_L", &by_parts, 0.0, f64::INFINITY, &breaks, 1.0 / r, REL_TOL)?;
        let value = powprod(&[(lam * pc / q, 1.0 / r), (bp.value, 1.0)]);
        b.alt = Some(AltForm { label: "integration by parts".into(), value });
    }
    out.push(b);
    Ok(out)
}

/// `‖B_q‖_{p′} = (∫ t^{−λp′/q} v^{p′})^{1/p′}`.
pub(crate) fn bq_pconj_norm(exps: &Exponents, v: &Weight) -> Result<CriterionValue> {
    need(exps.pf() > 1.0 && exps.q.finite().is_some(), "||B_q||_p'", exps)?;
    let (lam, q, pc) = (exps.lambda, exps.qf(), exps.pc());
    let m = v.moment(pc, -lam * pc / q, 0.0, f64::INFINITY);
    let mut c = CriterionValue::exact("||B_q||_p'", powprod(&[(m.value, 1.0 / pc)]));
    c.abs_error = m.abs_error;
    c.divergent_at = m.divergent_at;
    Ok(c)
}

/// `p = 1` functionals: `esssup B_q`, the curve `B̄_q` with its limits, and
/// `B_{q′}` when `q < 1`.
pub fn laplace_bq(exps: &Exponents, v: &Weight, interval: (f64, f64)) -> Result<Vec<Entry>> {
    need(exps.p == Exponent::Finite(1.0) && exps.q.finite().is_some(), "B_q", exps)?;
    let (c1, c2) = interval;
    check_interval(c1, c2)?;
    let (lam, q) = (exps.lambda, exps.qf());
    let breaks = breaks_of(&[v]);
    let vv = v.clone();
    let bq = move |t: f64| powprod(&[(t, -lam / q), (vv.eval_mid(t), 1.0)]);
    let bq_curve = make_curve("B_q", bq, interval, &breaks, false)?;
    let mut out = vec![Entry::Value(sup_value("B_q", &bq_curve.sup))];
    let vv = v.clone();
    let bbar = move |t: f64| powprod(&[(t, -lam / q), (vv.running_sup(c1, t).unwrap_or(0.0), 1.0)]);
    out.push(Entry::Curve(make_curve("Bbar_q", bbar, interval, &breaks, true)?));
    if q < 1.0 {
        let e = q / (1.0 - q);
        let dens = |t: f64| {
            let s = v.running_sup(c1, t).unwrap_or(0.0);
            powprod(&[(tail_power(t, c2, lam), e), (t, -lam - 1.0), (s, e)])
        };
        out.push(Entry::Value(integral_value("B_q'", &dens, c1, c2, &breaks, (1.0 - q) / q, REL_TOL)?));
    }
    Ok(out)
}

/// Corner constants for infinite exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    /// `‖v‖_1`
    C1,
    /// `(∫ t^{−λ} (∫_0^t v)^{q−1} v(t) dt)^{1/q}`
    CqGt1,
    /// `∫ y^{−λ} v`
    CqEq1,
    /// `∫ t^{−λ/q} v`
    CqLt1,
    /// `‖v‖_∞`
    CInf,
    /// `‖v‖_{p′}`
    CpConj,
}

impl Extreme {
    pub fn tag(self) -> &'static str {
        match self {
            Extreme::C1 => "C_1",
            Extreme::CqGt1 => "C_q>1",
            Extreme::CqEq1 => "C_q=1",
            Extreme::CqLt1 => "C_q<1",
            Extreme::CInf => "C_inf",
            Extreme::CpConj => "C_p'",
        }
    }
}

fn from_moment(tag: &str, m: crate::weights::MomentValue, power: f64) -> CriterionValue {
    let mut c = CriterionValue::exact(tag, powprod(&[(m.value, power)]));
    c.abs_error = m.abs_error;
    c.divergent_at = m.divergent_at;
    c
}

pub fn laplace_extreme(which: Extreme, exps: &Exponents, v: &Weight) -> Result<CriterionValue> {
    let lam = exps.lambda;
    let inf = f64::INFINITY;
    Ok(match which {
        Extreme::C1 => from_moment(which.tag(), v.moment(1.0, 0.0, 0.0, inf), 1.0),
        Extreme::CqEq1 => from_moment(which.tag(), v.moment(1.0, -lam, 0.0, inf), 1.0),
        Extreme::CqLt1 | Extreme::CqGt1 => {
            let q = exps.q.finite().ok_or_else(|| Error::BranchMismatch(format!("{} needs finite q", which.tag())))?;
            if which == Extreme::CqLt1 {
                from_moment(which.tag(), v.moment(1.0, -lam / q, 0.0, inf), 1.0)
            } else {
                let f = |t: f64| {
                    let vt = v.value(t);
                    if vt == 0.0 {
                        return 0.0;
                    }
                    powprod(&[(t, -lam), (v.moment(1.0, 0.0, 0.0, t).value, q - 1.0), (vt, 1.0)])
                };
                integral_value(which.tag(), &f, 0.0, inf, &breaks_of(&[v]), 1.0 / q, REL_TOL)?
            }
        }
        Extreme::CInf => CriterionValue::exact(which.tag(), v.sup_between(0.0, inf)?),
        Extreme::CpConj => {
            let pc = exps.pc();
            if pc.is_infinite() {
                CriterionValue::exact(which.tag(), v.sup_between(0.0, inf)?)
            } else {
                from_moment(which.tag(), v.moment(pc, 0.0, 0.0, inf), 1.0 / pc)
            }
        }
    })
}

/// The constants named for the active `(p, q)` corner.
pub fn laplace_extremes(exps: &Exponents, v: &Weight) -> Result<Vec<CriterionValue>> {
    use Extreme::*;
    let which: Vec<Extreme> = match (exps.p, exps.q) {
        (Exponent::Infinite, Exponent::Infinite) => vec![C1],
        (Exponent::Infinite, Exponent::Finite(q)) if q > 1.0 => vec![CqGt1],
        (Exponent::Infinite, Exponent::Finite(1.0)) => vec![CqEq1],
        (Exponent::Infinite, _) => vec![CqGt1, CqLt1],
        (Exponent::Finite(1.0), Exponent::Infinite) => vec![CInf],
        (_, Exponent::Infinite) => vec![CpConj],
        _ => return Err(Error::BranchMismatch("corner constants need p = inf or q = inf".into())),
    };
    which.into_iter().map(|x| laplace_extreme(x, exps, v)).collect()
}
