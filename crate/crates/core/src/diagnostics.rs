//! Discrete compactness probes: norms of truncated discretizations near
//! `0` and `∞`, singular-value spectra under span extension, and a
//! consistency check of both against an analytic verdict.
//!
//! These are signatures, not proofs: every discretization is finite rank.

use crate::criteria::{Answer, Verdict};
use crate::discretize::{build, target_grid, truncate, DiscretizedOperator, Grid};
use crate::error::{Error, Result};
use crate::normest::{norm_op, NormOptions};
use crate::num::{powprod, slope};
use crate::par;
use crate::params::{case_of, classify, constants, Case, Exponent, Exponents, OperatorKind};
use crate::quadrature::{classify_limit, sup_on_interval, Endpoint, LimitKind, LimitVerdict, SupOptions};
use crate::weights::Weight;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagOptions {
    pub points_per_decade: usize,
    /// Cuts `a_k = 10^{−k}`, `b_k = 10^k` for `k = 1..=splits`.
    pub splits: usize,
    /// Log-length, in decades, of the source window beyond each cut.
    pub window_decades: usize,
    /// Extra decades of grid past the outermost window.
    pub margin_decades: usize,
    /// Half-span, in decades, of the base spectrum grid; the extended grid doubles it.
    pub spectrum_decades: usize,
    pub spectrum_k: usize,
    pub rank_eps: f64,
}

impl Default for DiagOptions {
    fn default() -> Self {
        DiagOptions {
            points_per_decade: 16,
            splits: 4,
            window_decades: 4,
            margin_decades: 2,
            spectrum_decades: 4,
            spectrum_k: 20,
            rank_eps: 1e-3,
        }
    }
}

/// `‖T‖ ≤ ‖T_0‖ + ‖T_1‖ + ‖T_2‖` for the split at the first cut pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleCheck {
    pub a: f64,
    pub b: f64,
    pub full: f64,
    /// Middle, lower and upper pieces.
    pub parts: [f64; 3],
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailDecayReport {
    pub a_sequence: Vec<f64>,
    pub b_sequence: Vec<f64>,
    /// Norm of the operator restricted to sources in `[a·10^{−D}, a]`.
    pub lower_tails: Vec<f64>,
    /// Norm of the operator restricted to sources in `[b, b·10^D]`.
    pub upper_tails: Vec<f64>,
    /// Upper bounds on the continuum tails where the theory gives them.
    pub analytic_lower: Option<Vec<f64>>,
    pub analytic_upper: Option<Vec<f64>>,
    pub window_decades: usize,
    pub grid_span: (f64, f64),
    pub points_per_decade: usize,
    pub full_norm: f64,
    pub triangle: TriangleCheck,
    /// Limits of the lower and upper tail sequences.
    pub verdict: (LimitVerdict, LimitVerdict),
}

fn tail_grid(v: &Weight, w: &Weight, opts: &DiagOptions) -> Result<Grid> {
    let d = (opts.splits + opts.window_decades + opts.margin_decades) as i32;
    let mut breaks = v.breakpoints();
    breaks.extend(w.breakpoints());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    Grid::log_grid_with_breaks(10f64.powi(-d), 10f64.powi(d), opts.points_per_decade, &breaks)
}

fn source_window(op: &DiscretizedOperator, lo: f64, hi: f64) -> DiscretizedOperator {
    let eps = 1e-9;
    truncate(op, (lo * (1.0 - eps), hi * (1.0 + eps)), (0.0, f64::INFINITY))
}

/// Laplace-i tail bounds `2β_1 sup_{t<a} t^{−λ/q} V_0(t)^{1/p′}` and
/// `β_1 sup_{t>b} t^{−λ/q} V_b(t)^{1/p′}`.
fn laplace_tail_bounds(exps: &Exponents, v: &Weight, a: &[f64], b: &[f64]) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    if case_of(exps, OperatorKind::Laplace) != Case::I {
        return Ok(None);
    }
    let Some(beta) = constants(&classify(exps, OperatorKind::Laplace), exps)?.upper else {
        return Ok(None);
    };
    let (lam, q, pc) = (exps.lambda, exps.qf(), exps.pc());
    let opts = SupOptions { points_per_decade: 16, extra_points: v.breakpoints(), ..SupOptions::default() };
    let functional = |c1: f64, t: f64| {
        let m = if t > c1 { v.moment(pc, 0.0, c1, t).value } else { 0.0 };
        powprod(&[(t, -lam / q), (m, 1.0 / pc)])
    };
    let lower = a
        .iter()
        .map(|&a| Ok(2.0 * beta * sup_on_interval(&|t| functional(0.0, t), 0.0, a, &opts)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let upper = b
        .iter()
        .map(|&b| Ok(beta * sup_on_interval(&|t| functional(b, t), b, f64::INFINITY, &opts)?.value))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Some((lower, upper)))
}

fn sequence_verdict(endpoint: Endpoint, cuts: &[f64], values: &[f64], tol: f64) -> LimitVerdict {
    let samples: Vec<(f64, f64)> = cuts.iter().copied().zip(values.iter().copied()).collect();
    let (kind, e) = classify_limit(endpoint, &samples, tol);
    LimitVerdict { kind, endpoint, samples, fitted_exponent: e }
}

/// Norms of source-truncated discretizations along `a_k = 10^{−k}` and
/// `b_k = 10^k` on one fixed grid, with the splitting triangle check at
/// `(a_1, b_1)` and, for Laplace-i, the analytic tail bounds.
pub fn tail_decay(
    kind: OperatorKind,
    exps: &Exponents,
    v: &Weight,
    w: &Weight,
    opts: &DiagOptions,
    norm: &NormOptions,
) -> Result<TailDecayReport> {
    if opts.splits < 3 {
        return Err(Error::SpanExtension("at least three splits are needed for a limit verdict".into()));
    }
    let grid = tail_grid(v, w, opts)?;
    let target = target_grid(kind, exps.lambda, &grid, opts.points_per_decade)?;
    let op = build(kind, exps, v, w, &grid, &target);
    let span = grid.span();
    let dw = 10f64.powi(opts.window_decades as i32);
    let a_seq: Vec<f64> = (1..=opts.splits).map(|k| 10f64.powi(-(k as i32))).collect();
    let b_seq: Vec<f64> = (1..=opts.splits).map(|k| 10f64.powi(k as i32)).collect();
    if a_seq.last().is_some_and(|a| a / dw < span.0) || b_seq.last().is_some_and(|b| b * dw > span.1) {
        return Err(Error::SpanExtension(format!(
            "grid [{:e}, {:e}] does not contain all tail windows",
            span.0, span.1
        )));
    }
    // Jobs: full norm, three split pieces, then lower and upper windows.
    let (a1, b1) = (a_seq[0], b_seq[0]);
    let mut windows: Vec<(f64, f64)> = vec![(0.0, f64::INFINITY), (a1, b1), (0.0, a1), (b1, f64::INFINITY)];
    windows.extend(a_seq.iter().map(|&a| (a / dw, a)));
    windows.extend(b_seq.iter().map(|&b| (b, b * dw)));
    let norms = par::map(&windows, |&(lo, hi)| {
        let sub = if hi.is_infinite() && lo == 0.0 { op.clone() } else { source_window(&op, lo, hi) };
        norm_op(&sub, norm).map(|e| e.lower_bound)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let full = norms[0];
    let parts = [norms[1], norms[2], norms[3]];
    let n = opts.splits;
    let lower_tails = norms[4..4 + n].to_vec();
    let upper_tails = norms[4 + n..].to_vec();
    let triangle =
        TriangleCheck { a: a1, b: b1, full, parts, ok: full <= parts.iter().sum::<f64>() * (1.0 + 1e-3) + 1e-12 };
    let bounds = match kind {
        OperatorKind::Laplace => laplace_tail_bounds(exps, v, &a_seq, &b_seq)?,
        _ => None,
    };
    let tol = crate::criteria::limit_tol(full);
    let verdict = (
        sequence_verdict(Endpoint::Zero, &a_seq, &lower_tails, tol),
        sequence_verdict(Endpoint::Infinity, &b_seq, &upper_tails, tol),
    );
    Ok(TailDecayReport {
        a_sequence: a_seq,
        b_sequence: b_seq,
        lower_tails,
        upper_tails,
        analytic_lower: bounds.as_ref().map(|b| b.0.clone()),
        analytic_upper: bounds.map(|b| b.1),
        window_decades: opts.window_decades,
        grid_span: span,
        points_per_decade: opts.points_per_decade,
        full_norm: full,
        triangle,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    /// The numerical rank is stable when the span grows.
    Decaying,
    /// The numerical rank grows with the span.
    Plateau,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanGrowth {
    pub grid_span: (f64, f64),
    #[serde(with = "crate::ext")]
    pub sigma_1: f64,
    pub rank_eps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Leading singular values, non-increasing.
    pub singular_values: Vec<f64>,
    /// Slope of `ln σ_k` against `ln k` over the reported values.
    #[serde(with = "crate::ext")]
    pub decay_exponent: f64,
    pub eps: f64,
    /// Smallest `k` with `σ_{k+1} < eps · σ_1`.
    pub rank_eps: usize,
    pub extended: Option<SpanGrowth>,
    pub signature: Signature,
}

fn singular_values(op: &DiscretizedOperator) -> Vec<f64> {
    let m = &op.matrix;
    if m.rows() == 0 || m.cols() == 0 {
        return vec![];
    }
    let dm = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.data());
    let mut s: Vec<f64> = dm.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn rank_eps(s: &[f64], eps: f64) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().take_while(|&&x| x >= eps * top && x > 0.0).count()
}

fn decay_exponent(s: &[f64]) -> f64 {
    let top = s.first().copied().unwrap_or(0.0);
    let (lx, ly): (Vec<f64>, Vec<f64>) = s
        .iter()
        .enumerate()
        .take_while(|(_, &x)| x > 1e-14 * top)
        .map(|(k, &x)| (((k + 1) as f64).ln(), x.ln()))
        .unzip();
    if lx.len() < 2 {
        f64::NAN
    } else {
        slope(&lx, &ly)
    }
}

fn need_l2(exps: &Exponents) -> Result<()> {
    if exps.p == Exponent::Finite(2.0) && exps.q == Exponent::Finite(2.0) {
        Ok(())
    } else {
        Err(Error::BranchMismatch("the spectrum is defined for p = q = 2 only".into()))
    }
}

/// Leading `k` singular values of the `ℓ^2` matrix of `op` (a dense SVD).
pub fn spectrum(op: &DiscretizedOperator, k: usize, eps: f64) -> Result<SpectrumReport> {
    need_l2(&op.exps)?;
    let s = singular_values(op);
    let top: Vec<f64> = s.iter().copied().take(k.min(s.len())).collect();
    Ok(SpectrumReport {
        decay_exponent: decay_exponent(&top),
        singular_values: top,
        eps,
        rank_eps: rank_eps(&s, eps),
        extended: None,
        signature: Signature::Undetermined,
    })
}

/// Spectra on a base grid and on one with twice its log-span; a numerical
/// rank that grows with the span is the non-compact signature.
pub fn spectral_probe(
    kind: OperatorKind,
    exps: &Exponents,
    v: &Weight,
    w: &Weight,
    opts: &DiagOptions,
) -> Result<SpectrumReport> {
    need_l2(exps)?;
    let mut breaks = v.breakpoints();
    breaks.extend(w.breakpoints());
    let grid = |d: usize| {
        let t = 10f64.powi(d as i32);
        Grid::log_grid_with_breaks(1.0 / t, t, opts.points_per_decade, &breaks)
    };
    let (g0, g1) = (grid(opts.spectrum_decades)?, grid(2 * opts.spectrum_decades)?);
    let op = |g: &Grid| {
        Ok::<_, Error>(build(kind, exps, v, w, g, &target_grid(kind, exps.lambda, g, opts.points_per_decade)?))
    };
    let mut rep = spectrum(&op(&g0)?, opts.spectrum_k, opts.rank_eps)?;
    let s1 = singular_values(&op(&g1)?);
    let ext = SpanGrowth {
        grid_span: g1.span(),
        sigma_1: s1.first().copied().unwrap_or(0.0),
        rank_eps: rank_eps(&s1, opts.rank_eps),
    };
    let base = rep.rank_eps;
    rep.signature = if rep.singular_values.first().copied().unwrap_or(0.0) == 0.0 {
        Signature::Decaying
    } else if ext.rank_eps >= base + (base / 4).max(2) {
        Signature::Plateau
    } else {
        Signature::Decaying
    };
    rep.extended = Some(ext);
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub issues: Vec<Issue>,
}

impl ConsistencyReport {
    pub fn errors(&self) -> usize {
        self.issues.iter().filter(|i| i.severity == Severity::Error).count()
    }

    pub fn warnings(&self) -> usize {
        self.issues.iter().filter(|i| i.severity == Severity::Warning).count()
    }

    pub fn consistent(&self) -> bool {
        self.errors() == 0
    }
}

/// Analytic endpoint limits `[lower, upper]` from the verdict evidence.
fn analytic_limits(v: &Verdict) -> Option<(LimitKind, LimitKind)> {
    v.evidence.iter().find(|e| e.limits.len() == 2).map(|e| (e.limits[0], e.limits[1]))
}

/// Compares discrete signatures with an analytic verdict. Never changes the
/// verdict.
pub fn cross_validate(
    analytic: &Verdict,
    tails: Option<&TailDecayReport>,
    spectral: Option<&SpectrumReport>,
) -> ConsistencyReport {
    let mut issues = Vec::new();
    let mut push = |severity, message: String| issues.push(Issue { severity, message });
    if let Some(t) = tails {
        if !t.triangle.ok {
            push(Severity::Error, format!("split norms violate the triangle inequality: {:?}", t.triangle));
        }
        for (side, num, ana) in
            [("lower", &t.lower_tails, &t.analytic_lower), ("upper", &t.upper_tails, &t.analytic_upper)]
        {
            if let Some(ana) = ana {
                for (x, y) in num.iter().zip(ana) {
                    if *x > y * 1.02 + 1e-12 {
                        push(Severity::Error, format!("{side} tail {x:e} exceeds its analytic bound {y:e}"));
                    }
                }
            }
        }
        let sides = [("lower", t.verdict.0.kind), ("upper", t.verdict.1.kind)];
        match analytic.compact {
            Answer::Yes => {
                for (side, k) in sides {
                    if k.is_obstruction() {
                        push(Severity::Error, format!("compact verdict but {side} tails do not vanish ({k:?})"));
                    } else if k == LimitKind::Inconclusive {
                        push(Severity::Warning, format!("compact verdict but {side} tail decay is undecided"));
                    }
                }
            }
            Answer::No if analytic.bounded == Answer::Yes => {
                if let Some((lo, hi)) = analytic_limits(analytic) {
                    for ((side, k), a) in sides.into_iter().zip([lo, hi]) {
                        if a.is_obstruction() && k == LimitKind::Zero {
                            push(Severity::Error, format!("analytic {side} limit {a:?} but {side} tails vanish"));
                        }
                    }
                }
                if sides.iter().all(|(_, k)| *k == LimitKind::Zero) {
                    push(Severity::Warning, "non-compact verdict but all tails vanish".into());
                }
            }
            _ => {}
        }
    }
    if let Some(s) = spectral {
        match (analytic.compact, s.signature) {
            (Answer::Yes, Signature::Plateau) => {
                push(Severity::Warning, "compact verdict but the numerical rank grows with the span".into())
            }
            (Answer::No, Signature::Decaying) if analytic.bounded == Answer::Yes => {
                push(Severity::Warning, "non-compact verdict but the numerical rank is stable under span growth".into())
            }
            _ => {}
        }
    }
    ConsistencyReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{compactness_verdict, criterion_set};

    fn ex(p: f64, q: f64) -> Exponents {
        Exponents::derive(1.0, p, q).unwrap()
    }

    fn small() -> DiagOptions {
        DiagOptions { points_per_decade: 8, ..DiagOptions::default() }
    }

    #[test]
    fn tails_vanish_for_compact_support() {
        let chi = Weight::indicator(1.0, 2.0);
        let r =
            tail_decay(OperatorKind::Laplace, &ex(2.0, 2.0), &chi, &Weight::zero(), &small(), &NormOptions::default())
                .unwrap();
        assert!(r.lower_tails.iter().chain(&r.upper_tails).all(|x| *x == 0.0));
        assert_eq!((r.verdict.0.kind, r.verdict.1.kind), (LimitKind::Zero, LimitKind::Zero));
        assert!(r.triangle.ok);
    }

    #[test]
    fn tails_plateau_for_unit_weight() {
        let one = Weight::constant(1.0);
        let r =
            tail_decay(OperatorKind::Laplace, &ex(2.0, 2.0), &one, &one, &small(), &NormOptions::default()).unwrap();
        assert!(matches!(r.verdict.0.kind, LimitKind::Positive { .. }), "{:?}", r.lower_tails);
        assert!(matches!(r.verdict.1.kind, LimitKind::Positive { .. }), "{:?}", r.upper_tails);
        let bound = r.analytic_lower.as_ref().unwrap();
        assert!(r.lower_tails.iter().zip(bound).all(|(x, b)| x <= b));
    }

    #[test]
    fn analytic_bounds_only_for_laplace() {
        let one = Weight::constant(1.0);
        let r =
            tail_decay(OperatorKind::Stieltjes, &ex(2.0, 2.0), &one, &one, &small(), &NormOptions::default()).unwrap();
        assert!(r.analytic_lower.is_none() && r.analytic_upper.is_none());
        assert!(matches!(r.verdict.1.kind, LimitKind::Positive { .. }), "{:?}", r.upper_tails);
    }

    #[test]
    fn zero_weight_tails() {
        let r = tail_decay(
            OperatorKind::Laplace,
            &ex(2.0, 2.0),
            &Weight::zero(),
            &Weight::zero(),
            &small(),
            &NormOptions::default(),
        )
        .unwrap();
        assert_eq!(r.full_norm, 0.0);
        assert!(r.lower_tails.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn split_points_outside_grid_rejected() {
        let opts = DiagOptions { splits: 2, ..small() };
        assert!(tail_decay(
            OperatorKind::Laplace,
            &ex(2.0, 2.0),
            &Weight::zero(),
            &Weight::zero(),
            &opts,
            &NormOptions::default()
        )
        .is_err());
    }

    #[test]
    fn spectrum_rank_one() {
        let g = Grid::from_nodes(vec![1.0, 2.0]).unwrap();
        let e = ex(2.0, 2.0);
        let k = crate::matrix::Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let mut op = DiscretizedOperator::custom(e, g.clone(), g, k.clone()).unwrap();
        op.matrix = k;
        let s = spectrum(&op, 5, 1e-3).unwrap();
        assert_eq!(s.singular_values.len(), 2);
        assert!((s.singular_values[0] - 2.0).abs() < 1e-12 && s.singular_values[1].abs() < 1e-12);
        assert_eq!(s.rank_eps, 1);
    }

    #[test]
    fn sigma_one_matches_norm() {
        let g = Grid::log_grid(1e-3, 1e3, 8).unwrap();
        let op = build(OperatorKind::Laplace, &ex(2.0, 2.0), &Weight::indicator(1.0, 2.0), &Weight::zero(), &g, &g);
        let s = spectrum(&op, 3, 1e-3).unwrap();
        let n = norm_op(&op, &NormOptions::default()).unwrap();
        assert!((s.singular_values[0] - n.lower_bound).abs() <= 1e-6 * n.lower_bound);
    }

    #[test]
    fn spectral_signatures() {
        let chi = Weight::indicator(1.0, 2.0);
        let one = Weight::constant(1.0);
        let e = ex(2.0, 2.0);
        let s = spectral_probe(OperatorKind::Laplace, &e, &chi, &one, &small()).unwrap();
        assert_eq!(s.signature, Signature::Decaying, "{s:?}");
        let s = spectral_probe(OperatorKind::Stieltjes, &e, &one, &one, &small()).unwrap();
        assert_eq!(s.signature, Signature::Plateau, "{s:?}");
        assert!(spectral_probe(OperatorKind::Laplace, &ex(3.0, 2.0), &chi, &one, &small()).is_err());
    }

    #[test]
    fn cross_validation_rules() {
        let chi = Weight::indicator(1.0, 2.0);
        let one = Weight::constant(1.0);
        let e = ex(2.0, 2.0);
        let compact = compactness_verdict(&criterion_set(OperatorKind::Laplace, &e, &chi, &one).unwrap()).unwrap();
        let tails = tail_decay(OperatorKind::Laplace, &e, &chi, &one, &small(), &NormOptions::default()).unwrap();
        assert!(cross_validate(&compact, Some(&tails), None).issues.is_empty());
        let mut undecided = tails.clone();
        undecided.verdict.0.kind = LimitKind::Inconclusive;
        let r = cross_validate(&compact, Some(&undecided), None);
        assert_eq!((r.errors(), r.warnings()), (0, 1));
        let non =
            compactness_verdict(&criterion_set(OperatorKind::Laplace, &e, &Weight::indicator(0.0, 1.0), &one).unwrap())
                .unwrap();
        let r = cross_validate(&non, Some(&tails), None);
        assert!(r.errors() >= 1, "{r:?}");
    }
}
