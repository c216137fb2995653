//! `ℓ^p → ℓ^q` norm estimation for non-negative matrices. Every estimate is a
//! certified lower bound: it is the ratio `‖Mf‖_q / ‖f‖_p` of a stored vector.

use crate::criteria::CriterionSet;
use crate::discretize::{truncate, DiscretizedOperator};
use crate::error::{Error, Result};
use crate::matrix::{lp_norm, Matrix};
use crate::par;
use crate::params::Exponent;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Use the iterative path even where a closed form exists (`p = 1`).
    #[serde(skip)]
    pub force_iterative: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { restarts: 8, max_iter: 1000, tol: 1e-10, seed: DEFAULT_SEED, force_iterative: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactColumn,
    ExactRow,
    ExactOnes,
    Svd,
    NonlinearPower,
    BruteForce,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(self, Method::ExactColumn | Method::ExactRow | Method::ExactOnes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    #[serde(with = "crate::ext")]
    pub lower_bound: f64,
    pub method: Method,
    #[serde(with = "crate::ext::vec")]
    pub extremal: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// Quasi-norm (`q < 1`) result without a global-optimality argument.
    pub heuristic: bool,
    pub seed: u64,
}

/// `‖Mf‖_q / ‖f‖_p`.
pub fn ratio(m: &Matrix, f: &[f64], p: Exponent, q: Exponent) -> f64 {
    let d = lp_norm(f, p);
    if d == 0.0 {
        return 0.0;
    }
    lp_norm(&m.mul_vec(f), q) / d
}

fn normalize(f: &mut [f64], p: Exponent) {
    let n = lp_norm(f, p);
    if n > 0.0 && n.is_finite() {
        f.iter_mut().for_each(|x| *x /= n);
    }
}

/// Norm estimate for a discretized operator at its own exponents.
pub fn norm_op(op: &DiscretizedOperator, opts: &NormOptions) -> Result<NormEstimate> {
    norm_pq(&op.matrix, op.exps.p, op.exps.q, opts)
}

pub fn norm_pq(m: &Matrix, p: Exponent, q: Exponent, opts: &NormOptions) -> Result<NormEstimate> {
    if let Exponent::Finite(x) = p {
        if !(x >= 1.0) {
            return Err(Error::ParameterDomain(format!("p must be >= 1, got {x}")));
        }
    }
    if let Exponent::Finite(x) = q {
        if !(x > 0.0) {
            return Err(Error::ParameterDomain(format!("q must be > 0, got {x}")));
        }
    }
    if !m.is_nonnegative() {
        return Err(Error::DimensionMismatch("matrix must be non-negative".into()));
    }
    let heuristic = q.finite().is_some_and(|x| x < 1.0);
    let base = NormEstimate {
        lower_bound: 0.0,
        method: Method::ExactOnes,
        extremal: vec![1.0; m.cols()],
        iterations: 0,
        restarts: 0,
        converged: true,
        heuristic,
        seed: opts.seed,
    };
    if m.cols() == 0 || m.rows() == 0 {
        return Ok(base);
    }
    let finish = |mut e: NormEstimate| {
        e.lower_bound = ratio(m, &e.extremal, p, q);
        e
    };
    let p1 = p == Exponent::Finite(1.0);
    let q_ge_1 = q.value() >= 1.0;
    if q.is_infinite() && !(p1 && opts.force_iterative) {
        return Ok(finish(NormEstimate { method: Method::ExactRow, extremal: exact_row(m, p), ..base }));
    }
    if p1 && q_ge_1 && !opts.force_iterative {
        let j = best_column(m, q);
        let mut f = vec![0.0; m.cols()];
        f[j] = 1.0;
        return Ok(finish(NormEstimate { method: Method::ExactColumn, extremal: f, ..base }));
    }
    if p.is_infinite() {
        return Ok(finish(NormEstimate { method: Method::ExactOnes, ..base }));
    }
    if p == Exponent::Finite(2.0) && q == Exponent::Finite(2.0) && !opts.force_iterative {
        let (f, it, conv) = power_iteration(m, opts.max_iter.max(20000), 1e-13);
        return Ok(finish(NormEstimate { method: Method::Svd, extremal: f, iterations: it, converged: conv, ..base }));
    }
    let starts = start_vectors(m, q, opts);
    let mt = m.transpose();
    let runs: Vec<(Vec<f64>, f64, usize, bool)> = par::map_range(starts.len(), |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
        let (f, it, conv) = if p1 {
            if q_ge_1 {
                vertex_iteration(m, &mt, q, &starts[k], opts.max_iter)
            } else {
                simplex_ascent(m, &mt, q, &starts[k], opts.max_iter, opts.tol)
            }
        } else {
            nonlinear_power(m, &mt, p, q, &starts[k], opts.max_iter, opts.tol)
        };
        let f = if heuristic { hill_climb(m, p, q, f, &mut rng) } else { f };
        let v = ratio(m, &f, p, q);
        (f, v, it, conv)
    });
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.1 > runs[best].1 {
            best = k;
        }
    }
    let iterations = runs.iter().map(|r| r.2).sum();
    let (f, _, _, conv) = runs.into_iter().nth(best).unwrap();
    Ok(finish(NormEstimate {
        method: Method::NonlinearPower,
        extremal: f,
        iterations,
        restarts: starts.len(),
        converged: conv,
        ..base
    }))
}

fn exact_row(m: &Matrix, p: Exponent) -> Vec<f64> {
    let pc = p.conj().expect("p >= 1");
    let norms: Vec<f64> = (0..m.rows()).map(|i| lp_norm(m.row(i), pc)).collect();
    let i = argmax(&norms);
    let row = m.row(i);
    match pc {
        // p = 1: a unit vector at the largest entry.
        Exponent::Infinite => {
            let mut f = vec![0.0; m.cols()];
            f[argmax(row)] = 1.0;
            f
        }
        Exponent::Finite(1.0) => vec![1.0; m.cols()],
        Exponent::Finite(s) => {
            let scale = row.iter().fold(0.0f64, |a, b| a.max(*b));
            let mut f: Vec<f64> =
                row.iter().map(|x| if scale > 0.0 { (x / scale).powf(s - 1.0) } else { 0.0 }).collect();
            normalize(&mut f, p);
            f
        }
    }
}

fn argmax(x: &[f64]) -> usize {
    let mut b = 0;
    for (i, v) in x.iter().enumerate() {
        if *v > x[b] {
            b = i;
        }
    }
    b
}

fn column_norms(m: &Matrix, q: Exponent) -> Vec<f64> {
    let t = m.transpose();
    (0..t.rows()).map(|j| lp_norm(t.row(j), q)).collect()
}

fn best_column(m: &Matrix, q: Exponent) -> usize {
    argmax(&column_norms(m, q))
}

fn start_vectors(m: &Matrix, q: Exponent, opts: &NormOptions) -> Vec<Vec<f64>> {
    let n = m.cols();
    let total = opts.restarts.max(1);
    let mut starts = vec![vec![1.0; n]];
    let norms = column_norms(m, q);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| norms[*b].total_cmp(&norms[*a]).then(a.cmp(b)));
    for &j in order.iter().take(2) {
        if starts.len() >= total {
            break;
        }
        let mut f = vec![0.0; n];
        f[j] = 1.0;
        starts.push(f);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < total {
        starts.push((0..n).map(|_| rng.random_range(0.05..1.0)).collect());
    }
    starts
}

/// `f ← normalize_p((Mᵀ (Mf)^{q−1})^{1/(p−1)})`, stopped on relative change
/// below `tol` or on a decrease (the best iterate is kept).
fn nonlinear_power(
    m: &Matrix,
    mt: &Matrix,
    p: Exponent,
    q: Exponent,
    start: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, usize, bool) {
    let pv = p.finite().expect("finite p");
    let qv = q.finite().expect("finite q");
    let mut f = start.to_vec();
    normalize(&mut f, p);
    let mut val = ratio(m, &f, p, q);
    for it in 0..max_iter {
        let g = m.mul_vec(&f);
        let gmax = g.iter().fold(0.0f64, |a, b| a.max(*b));
        if gmax == 0.0 {
            return (f, it, true);
        }
        let psi: Vec<f64> = g
            .iter()
            .map(|&x| {
                let x = x / gmax;
                if x > 0.0 {
                    x.powf(qv - 1.0)
                } else if qv == 1.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let h = mt.mul_vec(&psi);
        let hmax = h.iter().fold(0.0f64, |a, b| a.max(*b));
        if hmax == 0.0 || !hmax.is_finite() {
            return (f, it, false);
        }
        let mut next: Vec<f64> = h.iter().map(|&x| (x / hmax).powf(1.0 / (pv - 1.0))).collect();
        normalize(&mut next, p);
        let nv = ratio(m, &next, p, q);
        if !(nv >= val) {
            return (f, it + 1, (val - nv).abs() <= tol * val);
        }
        let change = (nv - val) / nv;
        f = next;
        val = nv;
        if change < tol {
            return (f, it + 1, true);
        }
    }
    (f, max_iter, false)
}

/// `p = 1`, `q ≥ 1`: jumps to the best vertex for the current gradient.
fn vertex_iteration(m: &Matrix, mt: &Matrix, q: Exponent, start: &[f64], max_iter: usize) -> (Vec<f64>, usize, bool) {
    let qv = q.value();
    let one = Exponent::Finite(1.0);
    let mut f = start.to_vec();
    normalize(&mut f, one);
    let mut val = ratio(m, &f, one, q);
    for it in 0..max_iter {
        let g = m.mul_vec(&f);
        let psi: Vec<f64> = g.iter().map(|&x| if qv == 1.0 { 1.0 } else { x.powf(qv - 1.0) }).collect();
        let h = mt.mul_vec(&psi);
        let mut next = vec![0.0; f.len()];
        next[argmax(&h)] = 1.0;
        let nv = ratio(m, &next, one, q);
        if nv <= val {
            return (f, it + 1, true);
        }
        f = next;
        val = nv;
    }
    (f, max_iter, false)
}

/// `p = 1`, `q < 1`: exponentiated-gradient ascent of the concave map
/// `f ↦ ‖Mf‖_q` on the simplex.
fn simplex_ascent(
    m: &Matrix,
    mt: &Matrix,
    q: Exponent,
    start: &[f64],
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, usize, bool) {
    let qv = q.value();
    let one = Exponent::Finite(1.0);
    let mut f: Vec<f64> = start.iter().map(|x| x.max(1e-12)).collect();
    normalize(&mut f, one);
    let mut val = ratio(m, &f, one, q);
    let mut eta = 1.0;
    for it in 0..max_iter {
        let g = m.mul_vec(&f);
        let psi: Vec<f64> = g.iter().map(|&x| if x > 0.0 { x.powf(qv - 1.0) } else { 0.0 }).collect();
        let h = mt.mul_vec(&psi);
        let hmax = h.iter().fold(0.0f64, |a, b| a.max(*b));
        if hmax == 0.0 || !hmax.is_finite() {
            return (f, it, false);
        }
        loop {
            let mut next: Vec<f64> = f.iter().zip(&h).map(|(x, d)| x * (eta * d / hmax).exp()).collect();
            normalize(&mut next, one);
            let nv = ratio(m, &next, one, q);
            if nv >= val {
                let change = (nv - val) / nv;
                f = next;
                val = nv;
                eta = (eta * 2.0).min(1e6);
                if change < tol {
                    return (f, it + 1, true);
                }
                break;
            }
            eta *= 0.5;
            if eta < 1e-12 {
                return (f, it + 1, true);
            }
        }
    }
    (f, max_iter, false)
}

/// Random multiplicative perturbations, accepted when they improve the ratio.
fn hill_climb(m: &Matrix, p: Exponent, q: Exponent, mut f: Vec<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut val = ratio(m, &f, p, q);
    let mut sigma = 0.5;
    let floor = f.iter().fold(0.0f64, |a, b| a.max(*b)) * 1e-9;
    for _ in 0..400 {
        let cand: Vec<f64> =
            f.iter().map(|x| (x.max(floor)) * (sigma * (rng.random::<f64>() * 2.0 - 1.0)).exp()).collect();
        let v = ratio(m, &cand, p, q);
        if v > val {
            val = v;
            f = cand;
        } else {
            sigma = (sigma * 0.97).max(1e-6);
        }
    }
    normalize(&mut f, p);
    f
}

/// Largest singular value by power iteration on `MᵀM` from the ones vector.
fn power_iteration(m: &Matrix, max_iter: usize, tol: f64) -> (Vec<f64>, usize, bool) {
    let g = m.gram();
    let mut f = vec![1.0; m.cols()];
    normalize(&mut f, Exponent::Finite(2.0));
    let mut prev = 0.0;
    for it in 0..max_iter {
        let mut h = g.mul_vec(&f);
        let rq: f64 = h.iter().zip(&f).map(|(a, b)| a * b).sum();
        normalize(&mut h, Exponent::Finite(2.0));
        if lp_norm(&h, Exponent::Finite(2.0)) == 0.0 {
            return (f, it, true);
        }
        f = h;
        if it > 0 && (rq - prev).abs() <= tol * rq {
            return (f, it + 1, true);
        }
        prev = rq;
    }
    (f, max_iter, false)
}

/// Exhaustive angular search over the non-negative part of the unit sphere
/// followed by local refinement; `cols ≤ 3`.
pub fn brute_force_norm(m: &Matrix, p: Exponent, q: Exponent, resolution: usize) -> Result<f64> {
    let n = m.cols();
    if n > 3 {
        return Err(Error::TooManyColumns(n));
    }
    if n == 0 || m.rows() == 0 {
        return Ok(0.0);
    }
    let obj = |f: &[f64]| ratio(m, f, p, q);
    let mut best = 0.0f64;
    // Corners of the cube: unit vectors and 0/1 combinations.
    for mask in 1..(1u32 << n) {
        let f: Vec<f64> = (0..n).map(|j| if mask & (1 << j) != 0 { 1.0 } else { 0.0 }).collect();
        best = best.max(obj(&f));
    }
    if n == 1 {
        return Ok(best);
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let dir2 = |t: f64| vec![t.cos().max(0.0), t.sin().max(0.0)];
    let dir3 = |a: f64, b: f64| vec![a.cos().max(0.0), (a.sin() * b.cos()).max(0.0), (a.sin() * b.sin()).max(0.0)];
    let clamp = |t: f64| t.clamp(0.0, half_pi);
    let res = resolution.max(8);
    let h = half_pi / res as f64;
    if n == 2 {
        let vals: Vec<f64> = (0..=res).map(|k| obj(&dir2(k as f64 * h))).collect();
        let mut order: Vec<usize> = (0..=res).collect();
        order.sort_by(|a, b| vals[*b].total_cmp(&vals[*a]));
        for &k in order.iter().take(4) {
            best = best.max(vals[k]);
            let (mut a, mut b) = (clamp((k as f64 - 1.0) * h), clamp((k as f64 + 1.0) * h));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            while b - a > 1e-13 {
                let x1 = b - g * (b - a);
                let x2 = a + g * (b - a);
                if obj(&dir2(x1)) >= obj(&dir2(x2)) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            best = best.max(obj(&dir2(0.5 * (a + b))));
        }
        return Ok(best);
    }
    let grid: Vec<(usize, usize, f64)> = par::map_range((res + 1) * (res + 1), |k| {
        let (i, j) = (k / (res + 1), k % (res + 1));
        (i, j, obj(&dir3(i as f64 * h, j as f64 * h)))
    });
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|a, b| grid[*b].2.total_cmp(&grid[*a].2));
    for &k in order.iter().take(6) {
        let (i, j, v) = grid[k];
        best = best.max(v);
        let (mut a, mut b) = (i as f64 * h, j as f64 * h);
        let mut cur = v;
        let mut step = h;
        while step > 1e-13 {
            let mut moved = false;
            for (da, db) in
                [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)]
            {
                let (na, nb) = (clamp(a + da * step), clamp(b + db * step));
                let nv = obj(&dir3(na, nb));
                if nv > cur {
                    cur = nv;
                    a = na;
                    b = nb;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.max(cur);
    }
    Ok(best)
}

/// Share of `‖Mf‖_q` carried by the first and last source columns at the
/// extremal vector; large values flag span sensitivity.
pub fn boundary_share(op: &DiscretizedOperator, est: &NormEstimate) -> f64 {
    let n = est.extremal.len();
    if n == 0 {
        return 0.0;
    }
    let full = lp_norm(&op.matrix.mul_vec(&est.extremal), op.exps.q);
    if full == 0.0 {
        return 0.0;
    }
    let mut fb = vec![0.0; n];
    fb[0] = est.extremal[0];
    fb[n - 1] = est.extremal[n - 1];
    lp_norm(&op.matrix.mul_vec(&fb), op.exps.q) / full
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanPoint {
    /// `ln(t_max / t_min)` of the window.
    pub log_length: f64,
    pub estimate: f64,
}

/// Estimates on nested windows of one grid and the continuum value obtained
/// by fitting `N(L) = N_∞ + b/L² + c/L³` through them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanExtrapolation {
    pub windows: Vec<SpanPoint>,
    #[serde(with = "crate::ext")]
    pub extrapolated: f64,
}

/// Window fractions of the full log-span used by [`span_extrapolate`].
pub const SPAN_FRACTIONS: [f64; 3] = [0.75, 0.875, 1.0];

pub fn span_extrapolate(op: &DiscretizedOperator, opts: &NormOptions) -> Result<SpanExtrapolation> {
    let window = |g: &crate::discretize::Grid, frac: f64| {
        let (lo, hi) = g.span();
        let c = (lo.ln() + hi.ln()) * 0.5;
        let h = (hi.ln() - lo.ln()) * 0.5 * frac;
        ((c - h).exp() * (1.0 - 1e-12), (c + h).exp() * (1.0 + 1e-12), 2.0 * h)
    };
    let mut windows = Vec::with_capacity(SPAN_FRACTIONS.len());
    for &frac in &SPAN_FRACTIONS {
        let (a, b, l) = window(&op.source, frac);
        let (c, d, _) = window(&op.target, frac);
        let sub = if frac == 1.0 { op.clone() } else { truncate(op, (a, b), (c, d)) };
        let est = norm_op(&sub, opts)?;
        windows.push(SpanPoint { log_length: l, estimate: est.lower_bound });
    }
    let extrapolated = fit_span(&windows);
    Ok(SpanExtrapolation { windows, extrapolated })
}

/// Exact fit of `a + b/L² + c/L³` through three points; returns `a`.
fn fit_span(pts: &[SpanPoint]) -> f64 {
    let last = pts.last().map_or(0.0, |p| p.estimate);
    if pts.len() < 3 || pts.iter().any(|p| !p.estimate.is_finite()) {
        return last;
    }
    let spread = pts.iter().map(|p| (p.estimate - last).abs()).fold(0.0, f64::max);
    if spread <= 1e-12 * last.abs() {
        return last;
    }
    let rows: Vec<[f64; 4]> =
        pts[pts.len() - 3..].iter().map(|p| [1.0, p.log_length.powi(-2), p.log_length.powi(-3), p.estimate]).collect();
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = [
        [rows[0][0], rows[0][1], rows[0][2]],
        [rows[1][0], rows[1][1], rows[1][2]],
        [rows[2][0], rows[2][1], rows[2][2]],
    ];
    let d = det3(a);
    if d == 0.0 {
        return last;
    }
    let mut a0 = a;
    for i in 0..3 {
        a0[i][0] = rows[i][3];
    }
    det3(a0) / d
}

/// Relative slacks of [`bound_check`]: `opt` absorbs optimizer shortfall on
/// the lower side, `quad` absorbs discretization error on the upper side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundTolerances {
    pub opt: f64,
    pub quad: f64,
}

impl Default for BoundTolerances {
    fn default() -> Self {
        BoundTolerances { opt: 0.05, quad: 0.02 }
    }
}

/// One side of the bracket `α·C_lo ≤ ‖T‖ ≤ β·C_hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSide {
    pub criterion: String,
    #[serde(with = "crate::ext")]
    pub criterion_value: f64,
    #[serde(with = "crate::ext")]
    pub constant: f64,
    /// `constant · criterion_value`.
    #[serde(with = "crate::ext")]
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "crate::ext")]
    pub estimate: f64,
    pub tolerances: BoundTolerances,
    pub lower: Option<BoundSide>,
    pub upper: Option<BoundSide>,
    /// Criterion the ratio refers to.
    pub ratio_criterion: Option<String>,
    #[serde(with = "crate::ext::opt")]
    pub ratio: Option<f64>,
}

impl BoundReport {
    pub fn lower_ok(&self) -> Option<bool> {
        self.lower.as_ref().map(|s| s.ok)
    }

    pub fn upper_ok(&self) -> Option<bool> {
        self.upper.as_ref().map(|s| s.ok)
    }
}

/// Checks `estimate.lower_bound` against the explicit constants of the
/// criterion set. Branches without constants get a ratio-only report.
pub fn bound_check(estimate: &NormEstimate, cs: &CriterionSet, tol: &BoundTolerances) -> BoundReport {
    bound_check_value(estimate.lower_bound, cs, tol)
}

/// [`bound_check`] for a bare estimate, e.g. a span-extrapolated value.
pub fn bound_check_value(estimate: f64, cs: &CriterionSet, tol: &BoundTolerances) -> BoundReport {
    let c = &cs.constants;
    let side = |tag: &Option<String>, k: Option<f64>, lower: bool| -> Option<BoundSide> {
        let tag = tag.as_ref()?;
        let (k, val) = (k?, cs.value(tag)?);
        let bound = k * val;
        let ok = if lower { estimate >= bound * (1.0 - tol.opt) } else { estimate <= bound * (1.0 + tol.quad) };
        Some(BoundSide { criterion: tag.clone(), criterion_value: val, constant: k, bound, ok })
    };
    let lower = side(&c.lower_criterion, c.lower, true);
    let upper = side(&c.upper_criterion, c.upper, false);
    let ratio_criterion = c
        .upper_criterion
        .clone()
        .filter(|t| cs.entries.contains_key(t))
        .or_else(|| cs.required_tags().into_iter().find(|t| cs.entries.contains_key(t)));
    let ratio = ratio_criterion.as_ref().and_then(|t| cs.value(t)).map(|v| estimate / v);
    BoundReport { estimate, tolerances: *tol, lower, upper, ratio_criterion, ratio }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(x: f64) -> Exponent {
        Exponent::from(x)
    }

    #[test]
    fn examples() {
        let one = Matrix::from_rows(&[vec![3.0]]).unwrap();
        for (p, q) in [(1.0, 2.0), (2.0, 2.0), (3.0, 1.5), (f64::INFINITY, 0.5), (1.5, f64::INFINITY)] {
            let r = norm_pq(&one, e(p), e(q), &NormOptions::default()).unwrap();
            assert!((r.lower_bound - 3.0).abs() < 1e-12, "p={p} q={q} {}", r.lower_bound);
        }
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let r = norm_pq(&m, e(1.0), e(2.0), &NormOptions::default()).unwrap();
        assert!((r.lower_bound - 5f64.sqrt()).abs() < 1e-14);
        assert_eq!(r.method, Method::ExactColumn);
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = norm_pq(&m, e(2.0), e(2.0), &NormOptions::default()).unwrap();
        assert!((r.lower_bound - 2.0).abs() < 1e-12);
        assert_eq!(r.method, Method::Svd);
    }

    #[test]
    fn rejects_bad_input() {
        let m = Matrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(matches!(norm_pq(&m, e(0.5), e(2.0), &NormOptions::default()), Err(Error::ParameterDomain(_))));
        let m4 = Matrix::zeros(2, 4);
        assert!(matches!(brute_force_norm(&m4, e(2.0), e(2.0), 50), Err(Error::TooManyColumns(4))));
    }

    #[test]
    fn brute_force_examples() {
        let col = Matrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        assert!((brute_force_norm(&col, e(2.0), e(2.0), 50).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(brute_force_norm(&Matrix::zeros(2, 2), e(2.0), e(2.0), 50).unwrap(), 0.0);
        let m = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.2, 1.0]]).unwrap();
        let bf = brute_force_norm(&m, e(3.0), e(1.5), 400).unwrap();
        let est = norm_pq(&m, e(3.0), e(1.5), &NormOptions::default()).unwrap();
        assert!((bf - est.lower_bound).abs() < 1e-4, "{bf} vs {}", est.lower_bound);
    }

    #[test]
    fn certified_lower_bound() {
        let m = Matrix::from_rows(&[vec![1.0, 0.3, 0.0], vec![0.2, 0.7, 0.9]]).unwrap();
        for (p, q) in [(1.5, 3.0), (4.0, 2.0), (2.0, 0.5), (1.0, 0.5)] {
            let r = norm_pq(&m, e(p), e(q), &NormOptions::default()).unwrap();
            let again = ratio(&m, &r.extremal, e(p), e(q));
            assert!((again - r.lower_bound).abs() <= 1e-12 * r.lower_bound);
            assert_eq!(r.heuristic, q < 1.0);
        }
    }

    #[test]
    fn forced_iterative_matches_column_formula() {
        let m = Matrix::from_rows(&[vec![1.0, 0.3, 0.4], vec![0.2, 0.7, 0.9], vec![0.5, 0.5, 0.1]]).unwrap();
        let exact = norm_pq(&m, e(1.0), e(2.5), &NormOptions::default()).unwrap();
        let opts = NormOptions { force_iterative: true, ..Default::default() };
        let it = norm_pq(&m, e(1.0), e(2.5), &opts).unwrap();
        assert!((exact.lower_bound - it.lower_bound).abs() <= 1e-9 * exact.lower_bound);
    }

    #[test]
    fn span_fit_recovers_model() {
        let pts: Vec<SpanPoint> = [10.0, 12.0, 14.0]
            .iter()
            .map(|&l: &f64| SpanPoint { log_length: l, estimate: 3.0 - 5.0 / (l * l) + 7.0 / (l * l * l) })
            .collect();
        assert!((fit_span(&pts) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn bound_check_laplace_bracket() {
        use crate::criteria::criterion_set;
        use crate::params::Exponents;
        use crate::weights::Weight;
        let one = Weight::constant(1.0);
        let cs = criterion_set(crate::OperatorKind::Laplace, &Exponents::derive(1.0, 2.0, 2.0).unwrap(), &one, &one)
            .unwrap();
        let tol = BoundTolerances::default();
        let b = bound_check_value(std::f64::consts::PI.sqrt(), &cs, &tol);
        assert_eq!((b.lower_ok(), b.upper_ok()), (Some(true), Some(true)));
        assert!((b.upper.as_ref().unwrap().bound - 2.0).abs() < 1e-9);
        assert!((b.ratio.unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-6);
        assert_eq!(bound_check_value(2.05, &cs, &tol).upper_ok(), Some(false));
        assert_eq!(bound_check_value(2.03, &cs, &tol).upper_ok(), Some(true));
        assert_eq!(bound_check_value(0.6, &cs, &tol).lower_ok(), Some(false));
    }

    #[test]
    fn bound_check_ratio_only_without_constants() {
        use crate::criteria::criterion_set;
        use crate::params::Exponents;
        use crate::weights::Weight;
        let one = Weight::constant(1.0);
        let cs = criterion_set(crate::OperatorKind::Stieltjes, &Exponents::derive(1.0, 2.0, 2.0).unwrap(), &one, &one)
            .unwrap();
        let b = bound_check_value(std::f64::consts::PI, &cs, &BoundTolerances::default());
        assert!(b.lower.is_none() && b.upper.is_none());
        assert_eq!(b.ratio_criterion.as_deref(), Some("A_S"));
        assert!((b.ratio.unwrap() - std::f64::consts::PI).abs() < 1e-6);
    }
}
