use super::{breaks_of, integral_value, CriterionValue, INNER_TOL, OUTER_TOL};
use crate::error::{Error, Result};
use crate::num::powprod;
use crate::params::Exponents;
use crate::quadrature::{integrate_with, QuadOptions};
use crate::weights::Weight;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `e^{−x y^λ}`, outer weight ignored.
    Laplace,
    /// `1/(x^λ + y^λ)`.
    Stieltjes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleNorm {
    /// `M = ‖ ‖w(x) k(x,·) v(·) χ_{(a,b)}(·)‖_{p′} ‖_q`.
    pub value: CriterionValue,
    /// Closed-form upper bound on `M` (Laplace with `0 < a < b < ∞` only).
    #[serde(with = "crate::ext::opt")]
    pub bound: Option<f64>,
}

/// The mixed norm of the kernel with the inner variable restricted to
/// `(a, b)`, by nested quadrature. Needs `1 < p < ∞`, `1 ≤ q < ∞`.
pub fn double_norm(
    exps: &Exponents,
    kernel: KernelKind,
    v: &Weight,
    w: &Weight,
    interval: (f64, f64),
) -> Result<DoubleNorm> {
    let p_ok = exps.p.finite().is_some_and(|p| p > 1.0);
    let q_ok = exps.q.finite().is_some_and(|q| q >= 1.0);
    if !(p_ok && q_ok) {
        return Err(Error::BranchMismatch(format!("M is not defined for p = {}, q = {}", exps.p, exps.q)));
    }
    let (a, b) = interval;
    if !(a >= 0.0 && b > a && a.is_finite()) {
        return Err(Error::EmptyInterval { lo: a, hi: b });
    }
    let (lam, q, pc) = (exps.lambda, exps.qf(), exps.pc());
    let vb = breaks_of(&[v]);
    let inner_opts = QuadOptions { rel_tol: INNER_TOL, breakpoints: vb.clone(), ..QuadOptions::default() };
    let inner = |x: f64| -> f64 {
        let g = |y: f64| {
            let vy = v.value(y);
            if vy == 0.0 {
                return 0.0;
            }
            let log_k = match kernel {
                KernelKind::Laplace => -x * y.powf(lam),
                KernelKind::Stieltjes => -(x.powf(lam) + y.powf(lam)).ln(),
            };
            (pc * (log_k + vy.ln())).exp()
        };
        integrate_with(&g, a, b, &inner_opts).map_or(f64::NAN, |r| r.value)
    };
    let outer = |x: f64| {
        let wx = match kernel {
            KernelKind::Laplace => 1.0,
            KernelKind::Stieltjes => w.value(x),
        };
        if wx == 0.0 {
            return 0.0;
        }
        powprod(&[(wx, q), (inner(x), q / pc)])
    };
    let outer_breaks = match kernel {
        KernelKind::Laplace => vec![],
        KernelKind::Stieltjes => breaks_of(&[w]),
    };
    let value = integral_value("M", &outer, 0.0, f64::INFINITY, &outer_breaks, 1.0 / q, OUTER_TOL)?;
    let bound = (kernel == KernelKind::Laplace && a > 0.0 && b.is_finite()).then(|| {
        let va = v.moment(pc, 0.0, a, b).value;
        powprod(&[(va, 1.0 / pc), (a.powf(lam) * q, -1.0 / q)])
    });
    Ok(DoubleNorm { value, bound })
}
