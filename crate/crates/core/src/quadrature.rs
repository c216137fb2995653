//! Integration, supremum search and endpoint-limit probing on `(0, ∞)` for
//! integrands with power-law endpoint behavior.

use crate::error::{Error, Result};
use crate::num::slope;
use crate::par;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Exponent margin below which a power-law tail counts as divergent.
const DIVERGENCE_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Interior points where the integrand may have kinks or jumps.
    pub breakpoints: Vec<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-8, abs_tol: 0.0, breakpoints: vec![], max_subdivisions: 4000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    #[serde(with = "crate::ext")]
    pub value: f64,
    #[serde(with = "crate::ext")]
    pub abs_error: f64,
    /// Fitted local exponents `e` (integrand `~ t^e`) at the lower and upper
    /// endpoints when those are `0` or `∞`.
    #[serde(with = "crate::ext::opt")]
    pub exponent_at_zero: Option<f64>,
    #[serde(with = "crate::ext::opt")]
    pub exponent_at_infinity: Option<f64>,
    pub subdivisions: usize,
    pub converged: bool,
}

impl IntegralResult {
    pub fn divergent_at_zero(&self) -> bool {
        self.value.is_infinite() && self.exponent_at_zero.is_some_and(|e| e + 1.0 <= DIVERGENCE_MARGIN)
    }
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn check(t: f64, y: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { t, value: y })
    }
}

/// G7K15 on `[a, b]` in `u = ln t` for the integrand `f(e^u) e^u`.
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let g = |u: f64| -> Result<f64> {
        let t = u.exp();
        let y = check(t, f(t))?;
        Ok(if y == 0.0 { 0.0 } else { y * t })
    };
    let fc = g(c)?;
    let mut k = fc * WGK[7];
    let mut gs = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = g(c - x)? + g(c + x)?;
        k += WGK[i] * s;
        if i % 2 == 1 {
            gs += WG[i / 2] * s;
        }
    }
    let (k, gs) = (k * h, gs * h);
    Ok(Segment { a, b, value: k, err: (k - gs).abs() })
}

/// Adaptive integration of `f` over `[lo, hi]`, `0 < lo < hi < ∞`.
fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<(f64, f64, usize, bool)> {
    let (ua, ub) = (lo.ln(), hi.ln());
    let mut cuts: Vec<f64> = vec![ua];
    let mut inner: Vec<f64> = opts.breakpoints.iter().filter(|&&b| b > lo && b < hi).map(|b| b.ln()).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    for &u in inner.iter().chain(std::iter::once(&ub)) {
        let last = *cuts.last().unwrap();
        let n = ((u - last) / 2.0).ceil().max(1.0) as usize;
        for i in 1..n {
            cuts.push(last + (u - last) * i as f64 / n as f64);
        }
        if u > last {
            cuts.push(u);
        }
    }
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let s = gk15(f, w[0], w[1])?;
        total += s.value;
        err += s.err;
        heap.push(s);
    }
    let mut n = heap.len();
    let mut converged = true;
    loop {
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            break;
        }
        if n >= opts.max_subdivisions {
            converged = false;
            break;
        }
        let s = heap.pop().expect("non-empty heap");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            heap.push(s);
            converged = false;
            break;
        }
        let (l, r) = (gk15(f, s.a, m)?, gk15(f, m, s.b)?);
        total += l.value + r.value - s.value;
        err += l.err + r.err - s.err;
        heap.push(l);
        heap.push(r);
        n += 1;
    }
    // Deterministic left-to-right sum over sorted segments.
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let total: f64 = segs.iter().map(|s| s.value).sum();
    let err: f64 = segs.iter().map(|s| s.err).sum();
    Ok((total, err, n, converged))
}

/// Tail fit at `0` (`toward_zero`) or `∞` from `edge`: returns
/// `(tail integral, fitted exponent, stable)`.
fn fit_tail<F: Fn(f64) -> f64 + ?Sized>(f: &F, edge: f64, toward_zero: bool) -> Result<(f64, Option<f64>, bool)> {
    let dir = if toward_zero { -1.0 } else { 1.0 };
    let ts: Vec<f64> = (0..=4).map(|j| edge * 10f64.powf(dir * j as f64 / 4.0)).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| check(t, f(t))).collect::<Result<_>>()?;
    if ys.iter().any(|&y| y <= 0.0) {
        return Ok((0.0, None, true));
    }
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let e = slope(&lx, &ly);
    let e1 = slope(&lx[..3], &ly[..3]);
    let e2 = slope(&lx[2..], &ly[2..]);
    let stable = (e1 - e2).abs() <= 1e-3 * e.abs().max(1.0);
    let tail = if toward_zero {
        if e + 1.0 <= DIVERGENCE_MARGIN {
            f64::INFINITY
        } else {
            ys[0] * edge / (e + 1.0)
        }
    } else if e + 1.0 >= -DIVERGENCE_MARGIN {
        f64::INFINITY
    } else {
        ys[0] * edge / (-(e + 1.0))
    };
    Ok((tail, Some(e), stable))
}

/// `∫_{c1}^{c2} f` with the default options and the given relative tolerance.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, c1: f64, c2: f64, rel_tol: f64) -> Result<IntegralResult> {
    integrate_with(f, c1, c2, &QuadOptions { rel_tol, ..QuadOptions::default() })
}

/// `∫_{c1}^{c2} f` for non-negative `f`, `0 ≤ c1 < c2 ≤ ∞`. Endpoints at `0`
/// and `∞` are handled by fitting a power law on the last decade and
/// integrating it analytically; a divergent fit yields `+∞`.
pub fn integrate_with<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    c1: f64,
    c2: f64,
    opts: &QuadOptions,
) -> Result<IntegralResult> {
    if !(c1 >= 0.0 && c2 > c1) || c1.is_infinite() {
        return Err(Error::EmptyInterval { lo: c1, hi: c2 });
    }
    let pos_breaks: Vec<f64> = opts.breakpoints.iter().copied().filter(|b| *b > c1 && *b < c2).collect();
    let mut lo = c1;
    let mut hi = c2;
    if c1 == 0.0 {
        let mut r = if c2.is_finite() { c2.min(1.0) } else { 1.0 };
        if let Some(b) = pos_breaks.first() {
            r = r.min(*b);
        }
        lo = r * 1e-12;
    }
    if c2.is_infinite() {
        let mut r = c1.max(1.0);
        if let Some(b) = pos_breaks.last() {
            r = r.max(*b);
        }
        hi = r * 1e12;
    }
    let (mut value, mut err, mut subdivisions, mut converged) = adaptive(f, lo, hi, opts)?;
    let mut exponent_at_zero = None;
    let mut exponent_at_infinity = None;
    if c1 == 0.0 {
        let mut rounds = 0;
        loop {
            let (tail, e, stable) = fit_tail(f, lo, true)?;
            if !stable && rounds < 8 && lo > 1e-280 {
                let new_lo = lo * 1e-4;
                let (v, er, n, c) = adaptive(f, new_lo, lo, opts)?;
                value += v;
                err += er;
                subdivisions += n;
                converged &= c;
                lo = new_lo;
                rounds += 1;
                continue;
            }
            exponent_at_zero = e;
            if tail.is_infinite() {
                return Ok(IntegralResult {
                    value: f64::INFINITY,
                    abs_error: f64::INFINITY,
                    exponent_at_zero: e,
                    exponent_at_infinity: None,
                    subdivisions,
                    converged,
                });
            }
            value += tail;
            err += if stable { 1e-6 * tail } else { 0.1 * tail };
            break;
        }
    }
    if c2.is_infinite() {
        let mut rounds = 0;
        loop {
            let (tail, e, stable) = fit_tail(f, hi, false)?;
            if !stable && rounds < 8 && hi < 1e280 {
                let new_hi = hi * 1e4;
                let (v, er, n, c) = adaptive(f, hi, new_hi, opts)?;
                value += v;
                err += er;
                subdivisions += n;
                converged &= c;
                hi = new_hi;
                rounds += 1;
                continue;
            }
            exponent_at_infinity = e;
            if tail.is_infinite() {
                return Ok(IntegralResult {
                    value: f64::INFINITY,
                    abs_error: f64::INFINITY,
                    exponent_at_zero,
                    exponent_at_infinity: e,
                    subdivisions,
                    converged,
                });
            }
            value += tail;
            err += if stable { 1e-6 * tail } else { 0.1 * tail };
            break;
        }
    }
    if value.is_infinite() {
        err = f64::INFINITY;
    }
    Ok(IntegralResult { value, abs_error: err, exponent_at_zero, exponent_at_infinity, subdivisions, converged })
}

/// Location of a supremum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgMax {
    At(f64),
    /// Approached at the lower end of the interval.
    LowerEnd,
    /// Approached at the upper end of the interval.
    UpperEnd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    #[serde(with = "crate::ext")]
    pub value: f64,
    pub argmax: ArgMax,
    pub plateau: bool,
    /// Every evaluated `(t, f(t))`, sorted by `t`.
    #[serde(with = "crate::ext::pairs")]
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct SupOptions {
    pub points_per_decade: usize,
    /// Default grid span used for open endpoints at `0` and `∞`.
    pub span: (f64, f64),
    /// Golden-section stopping width in `ln t`.
    pub refine_rel: f64,
    /// Extra sample points (weight breakpoints are passed here).
    pub extra_points: Vec<f64>,
    /// Farthest extension, in decades, beyond the default span.
    pub max_extension_decades: f64,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions {
            points_per_decade: 64,
            span: (1e-9, 1e9),
            refine_rel: 1e-6,
            extra_points: vec![],
            max_extension_decades: 90.0,
        }
    }
}

fn eval_points<F: Fn(f64) -> f64 + Sync + ?Sized>(f: &F, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    let ys = par::map(ts, |&t| f(t));
    ts.iter()
        .zip(ys)
        .map(|(&t, y)| if y.is_nan() { Err(Error::NonFinite { t, value: y }) } else { Ok((t, y)) })
        .collect()
}

fn log_points(lo: f64, hi: f64, ppd: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * ppd as f64).ceil() as usize).max(16) + 1;
    crate::num::geomspace(lo, hi, n)
}

/// Supremum of `f` on the open interval `(c1, c2)`, `0 ≤ c1 < c2 ≤ ∞`.
pub fn sup_on_interval<F: Fn(f64) -> f64 + Sync + ?Sized>(
    f: &F,
    c1: f64,
    c2: f64,
    opts: &SupOptions,
) -> Result<SupResult> {
    if !(c1 >= 0.0 && c2 > c1) || c1.is_infinite() {
        return Err(Error::EmptyInterval { lo: c1, hi: c2 });
    }
    let nudge = 1e-12;
    let mut lo = if c1 > 0.0 {
        c1 * (1.0 + nudge)
    } else {
        opts.span.0.min(if c2.is_finite() { c2 * 1e-9 } else { f64::INFINITY })
    };
    let mut hi =
        if c2.is_finite() { c2 * (1.0 - nudge) } else { opts.span.1.max(if c1 > 0.0 { c1 * 1e9 } else { 0.0 }) };
    if !(hi > lo) {
        let m = if c2.is_finite() { 0.5 * (c1 + c2) } else { 2.0 * c1 };
        lo = m;
        hi = m;
    }
    let mut ts = if hi > lo { log_points(lo, hi, opts.points_per_decade) } else { vec![lo] };
    for &b in &opts.extra_points {
        for x in [b * (1.0 - 1e-9), b * (1.0 + 1e-9)] {
            if x > lo && x < hi {
                ts.push(x);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut samples = eval_points(f, &ts)?;
    let ppd = opts.points_per_decade.max(4);
    let block = 4.0;

    // Extend toward open endpoints while the function still grows there.
    let growing = |a: f64, b: f64| b > a && (b - a) > 1e-3 * a.abs().max(b.abs());
    let mut ext_lo = 0.0;
    while c1 == 0.0 && ext_lo < opts.max_extension_decades {
        let (t0, y0) = samples[0];
        let y1 = value_near(&samples, t0 * 10.0);
        if !growing(y1, y0) || y0.is_infinite() {
            break;
        }
        let new: Vec<f64> = log_points(t0 * 10f64.powf(-block), t0, ppd);
        let mut add = eval_points(f, &new[..new.len() - 1])?;
        add.append(&mut samples);
        samples = add;
        ext_lo += block;
    }
    let mut ext_hi = 0.0;
    while c2.is_infinite() && ext_hi < opts.max_extension_decades {
        let (tn, yn) = *samples.last().unwrap();
        let y1 = value_near(&samples, tn / 10.0);
        if !growing(y1, yn) || yn.is_infinite() {
            break;
        }
        let new: Vec<f64> = log_points(tn, tn * 10f64.powf(block), ppd);
        samples.extend(eval_points(f, &new[1..])?);
        ext_hi += block;
    }

    let max = samples.iter().map(|s| s.1).fold(0.0f64, f64::max);
    if max == 0.0 {
        return Ok(SupResult { value: 0.0, argmax: ArgMax::At(samples[0].0), plateau: true, samples });
    }
    // Unbounded growth toward an open endpoint.
    let n = samples.len();
    if c1 == 0.0 && endpoint_blowup(&samples[..], true) {
        return Ok(SupResult { value: f64::INFINITY, argmax: ArgMax::LowerEnd, plateau: false, samples });
    }
    if c2.is_infinite() && endpoint_blowup(&samples[..], false) {
        return Ok(SupResult { value: f64::INFINITY, argmax: ArgMax::UpperEnd, plateau: false, samples });
    }
    if max.is_infinite() {
        let i = samples.iter().position(|s| s.1.is_infinite()).unwrap();
        return Ok(SupResult { value: f64::INFINITY, argmax: ArgMax::At(samples[i].0), plateau: false, samples });
    }
    let near = |y: f64| (max - y).abs() <= 1e-9 * max;
    let i = samples.iter().position(|s| near(s.1)).unwrap();
    let run = samples[i..].iter().take_while(|s| near(s.1)).count();
    if run >= 3 {
        return Ok(SupResult { value: max, argmax: ArgMax::At(samples[i].0), plateau: true, samples });
    }
    let imax = samples.iter().enumerate().fold(0, |b, (j, s)| if s.1 > samples[b].1 { j } else { b });
    let a = samples[imax.saturating_sub(1)].0.ln();
    let b = samples[(imax + 1).min(n - 1)].0.ln();
    let (mut value, mut argmax) = (samples[imax].1, samples[imax].0);
    if b > a {
        let (t, y) = golden_max(f, a, b, opts.refine_rel)?;
        if y > value {
            value = y;
            argmax = t;
            let pos = samples.partition_point(|s| s.0 < t);
            samples.insert(pos, (t, y));
        }
    }
    Ok(SupResult { value, argmax: ArgMax::At(argmax), plateau: false, samples })
}

fn value_near(samples: &[(f64, f64)], t: f64) -> f64 {
    let i = samples.partition_point(|s| s.0 < t).min(samples.len() - 1);
    samples[i].1
}

/// Power-law growth with exponent beyond 0.05 on the last decade toward the end.
fn endpoint_blowup(samples: &[(f64, f64)], lower: bool) -> bool {
    let pick: Vec<(f64, f64)> = if lower {
        let t0 = samples[0].0;
        samples.iter().copied().take_while(|s| s.0 <= t0 * 10.0 * (1.0 + 1e-9)).collect()
    } else {
        let tn = samples.last().unwrap().0;
        let mut v: Vec<(f64, f64)> =
            samples.iter().rev().copied().take_while(|s| s.0 >= tn / 10.0 * (1.0 - 1e-9)).collect();
        v.reverse();
        v
    };
    if pick.len() < 3 || pick.iter().any(|s| !(s.1 > 0.0)) {
        return pick.first().is_some_and(|s| s.1.is_infinite()) || pick.last().is_some_and(|s| s.1.is_infinite());
    }
    if pick.iter().any(|s| s.1.is_infinite()) {
        return true;
    }
    let lx: Vec<f64> = pick.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = pick.iter().map(|s| s.1.ln()).collect();
    let e = slope(&lx, &ly);
    if lower {
        e < -0.05
    } else {
        e > 0.05
    }
}

fn golden_max<F: Fn(f64) -> f64 + ?Sized>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let eval = |u: f64| -> Result<f64> {
        let t = u.exp();
        let y = f(t);
        if y.is_nan() {
            Err(Error::NonFinite { t, value: y })
        } else {
            Ok(y)
        }
    };
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = eval(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1.exp(), f1) } else { (x2.exp(), f2) })
}

/// Endpoint approached by a limit probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Zero,
    Infinity,
    /// `t → c` from below.
    Below(f64),
    /// `t → c` from above.
    Above(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitKind {
    Zero,
    Positive {
        #[serde(with = "crate::ext")]
        c: f64,
    },
    Infinite,
    Inconclusive,
}

impl LimitKind {
    /// Violates a vanishing-limit condition.
    pub fn is_obstruction(self) -> bool {
        matches!(self, LimitKind::Positive { .. } | LimitKind::Infinite)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub kind: LimitKind,
    pub endpoint: Endpoint,
    #[serde(with = "crate::ext::pairs")]
    pub samples: Vec<(f64, f64)>,
    /// Slope of `ln f` against `ln d`, with `d` the coordinate `t` (or
    /// `|t − c|` at a finite endpoint).
    #[serde(with = "crate::ext")]
    pub fitted_exponent: f64,
}

fn probe_point(endpoint: Endpoint, k: usize) -> Option<f64> {
    let k = k as f64;
    match endpoint {
        Endpoint::Zero => Some(10f64.powf(-k)),
        Endpoint::Infinity => Some(10f64.powf(k)),
        Endpoint::Below(c) => {
            let t = c - c * 10f64.powf(-k - 1.0);
            (t < c && k < 15.0).then_some(t)
        }
        Endpoint::Above(c) => {
            let t = c + c * 10f64.powf(-k - 1.0);
            (t > c && k < 15.0).then_some(t)
        }
    }
}

fn coordinate(endpoint: Endpoint, t: f64) -> f64 {
    match endpoint {
        Endpoint::Zero | Endpoint::Infinity => t,
        Endpoint::Below(c) | Endpoint::Above(c) => (t - c).abs(),
    }
}

/// Exponent band within which a probed sequence counts as flat.
const FLAT_GROWTH: f64 = 0.005;

/// Classifies the last three probe values against `tol`. Slow power laws
/// (exponent between the flat band and `0.05`) stay `Inconclusive`.
pub fn classify_limit(endpoint: Endpoint, samples: &[(f64, f64)], tol: f64) -> (LimitKind, f64) {
    let n = samples.len();
    if n < 3 {
        return (LimitKind::Inconclusive, f64::NAN);
    }
    let last = &samples[n - 3..];
    // Growth exponent: positive when f increases toward the endpoint.
    let toward_large = matches!(endpoint, Endpoint::Infinity);
    if last.iter().any(|s| s.1.is_nan()) {
        return (LimitKind::Inconclusive, f64::NAN);
    }
    if last.iter().any(|s| s.1 == f64::INFINITY) {
        return (LimitKind::Infinite, f64::NAN);
    }
    if last[2].1 == 0.0 {
        let e = if toward_large { f64::NEG_INFINITY } else { f64::INFINITY };
        return (LimitKind::Zero, e);
    }
    if last.iter().any(|s| s.1 <= 0.0) {
        return (LimitKind::Inconclusive, f64::NAN);
    }
    let lx: Vec<f64> = last.iter().map(|s| coordinate(endpoint, s.0).ln()).collect();
    let ly: Vec<f64> = last.iter().map(|s| s.1.ln()).collect();
    let e = slope(&lx, &ly);
    let growth = if toward_large { e } else { -e };
    let kind = if last.iter().all(|s| s.1 < tol) && growth < -FLAT_GROWTH {
        LimitKind::Zero
    } else if growth.abs() < FLAT_GROWTH && last[2].1 > tol {
        LimitKind::Positive { c: last[2].1 }
    } else if growth >= 0.05 {
        LimitKind::Infinite
    } else {
        LimitKind::Inconclusive
    };
    (kind, e)
}

/// Probes `f` along a ratio-10 sequence toward `endpoint` (12 points from 1,
/// extended up to 100 decades while undecided).
pub fn limit_probe<F: Fn(f64) -> f64 + ?Sized>(f: &F, endpoint: Endpoint, tol: f64) -> LimitVerdict {
    let mut samples = Vec::new();
    let mut k = 0;
    let (mut kind, mut e) = (LimitKind::Inconclusive, f64::NAN);
    while let Some(t) = probe_point(endpoint, k) {
        if k > 100 {
            break;
        }
        let y = f(t);
        samples.push((t, if y.is_nan() { f64::NAN } else { y }));
        k += 1;
        if samples.len() >= 12 || probe_point(endpoint, k).is_none() {
            (kind, e) = classify_limit(endpoint, &samples, tol);
            if kind != LimitKind::Inconclusive {
                break;
            }
        }
    }
    LimitVerdict { kind, endpoint, samples, fitted_exponent: e }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrate_examples() {
        let r = integrate(&|x: f64| (-2.0 * x).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9, "{}", r.value);
        let r = integrate(&|x: f64| x.powi(-3), 1.0, f64::INFINITY, 1e-10).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9, "{}", r.value);
        assert!((r.exponent_at_infinity.unwrap() + 3.0).abs() < 1e-9);
        let r = integrate(&|x: f64| 1.0 / x, 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        assert!((r.exponent_at_zero.unwrap() + 1.0).abs() < 1e-9);
        assert!(r.divergent_at_zero());
    }

    #[test]
    fn integrate_breakpoints_and_nonfinite() {
        let f = |x: f64| {
            if x < 1.0 {
                1.0
            } else if x < 2.0 {
                3.0
            } else {
                0.0
            }
        };
        let opts = QuadOptions { breakpoints: vec![1.0, 2.0], rel_tol: 1e-12, ..Default::default() };
        let r = integrate_with(&f, 0.0, f64::INFINITY, &opts).unwrap();
        assert!((r.value - 4.0).abs() < 1e-10, "{}", r.value);
        let bad = integrate(&|x: f64| if x > 0.5 && x < 0.6 { f64::NAN } else { 1.0 }, 0.1, 1.0, 1e-8);
        assert!(matches!(bad, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn integrate_sqrt_singularity() {
        let r = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn sup_examples() {
        let o = SupOptions::default();
        let f = |t: f64| t.powf(-0.5) * t.min(1.0).powf(0.5);
        let s = sup_on_interval(&f, 0.0, f64::INFINITY, &o).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(s.plateau);
        match s.argmax {
            ArgMax::At(t) => assert!(t <= 1e-9 * 1.0001, "argmax {t}"),
            _ => panic!("expected a point"),
        }
        let g = |t: f64| if t > 1.0 { (t - 1.0).sqrt() / t } else { 0.0 };
        let s = sup_on_interval(&g, 0.0, f64::INFINITY, &o).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        match s.argmax {
            ArgMax::At(t) => assert!((t - 2.0).abs() < 1e-5, "argmax {t}"),
            _ => panic!("expected a point"),
        }
        let z = sup_on_interval(&|_t: f64| 0.0, 0.0, f64::INFINITY, &o).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.plateau);
    }

    #[test]
    fn sup_detects_blowup() {
        let o = SupOptions::default();
        let s = sup_on_interval(&|t: f64| t.powf(-0.5), 0.0, f64::INFINITY, &o).unwrap();
        assert_eq!(s.value, f64::INFINITY);
        assert_eq!(s.argmax, ArgMax::LowerEnd);
        let s = sup_on_interval(&|t: f64| t.powf(0.2), 0.0, f64::INFINITY, &o).unwrap();
        assert_eq!(s.argmax, ArgMax::UpperEnd);
    }

    #[test]
    fn limit_examples() {
        let v = limit_probe(&|t: f64| t.sqrt(), Endpoint::Zero, 1e-6);
        assert_eq!(v.kind, LimitKind::Zero);
        assert!((v.fitted_exponent - 0.5).abs() < 1e-9);
        let v = limit_probe(&|t: f64| t.powf(-0.5) * t.min(1.0).powf(0.5), Endpoint::Zero, 1e-6);
        assert_eq!(v.kind, LimitKind::Positive { c: 1.0 });
        let v = limit_probe(&|t: f64| t.powf(-0.1), Endpoint::Zero, 1e-6);
        assert_eq!(v.kind, LimitKind::Infinite);
        let v = limit_probe(&|t: f64| t.powf(-0.5), Endpoint::Infinity, 1e-6);
        assert_eq!(v.kind, LimitKind::Zero);
        assert!(v.fitted_exponent < 0.0);
    }

    #[test]
    fn limit_finite_endpoint() {
        let v = limit_probe(&|t: f64| (2.0 - t).sqrt(), Endpoint::Below(2.0), 1e-5);
        assert_eq!(v.kind, LimitKind::Zero);
        let v = limit_probe(&|_t: f64| 3.0, Endpoint::Above(1.0), 1e-5);
        assert_eq!(v.kind, LimitKind::Positive { c: 3.0 });
    }
}
