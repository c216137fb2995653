//! Criterion functionals and the verdict engine.
//!
//! A [`CriterionSet`] holds the functionals named by one branch of the
//! regime table in [`crate::params::classify`]. The verdict functions combine
//! their finiteness with endpoint-limit probes according to the roles
//! (necessary, sufficient, equivalent) attached to that branch.

mod double_norm;
mod hardy;
mod laplace;
mod stieltjes;

pub use double_norm::{double_norm, DoubleNorm, KernelKind};
pub use hardy::{hardy_criteria, HardyDirection};
pub use laplace::{laplace_a, laplace_b, laplace_bq, laplace_extreme, laplace_extremes, Extreme};
pub use stieltjes::{stieltjes_a, stieltjes_b, stieltjes_hardy_form, stieltjes_p1};

use crate::error::{Error, Result};
use crate::par;
use crate::params::{
    classify, constants, Direction, Exponents, LimitRequirement, OperatorKind, PaperConstants, Regime,
};
use crate::quadrature::{
    integrate_with, limit_probe, sup_on_interval, ArgMax, Endpoint, LimitKind, LimitVerdict, QuadOptions, SupOptions,
    SupResult,
};
use crate::weights::Weight;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Relative tolerance of single-level criterion integrals.
pub(crate) const REL_TOL: f64 = 1e-10;
/// Inner and outer tolerances of nested integrals.
pub(crate) const INNER_TOL: f64 = 1e-11;
pub(crate) const OUTER_TOL: f64 = 1e-9;

/// A second computed form of the same functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AltForm {
    pub label: String,
    #[serde(with = "crate::ext")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionValue {
    pub name: String,
    #[serde(with = "crate::ext")]
    pub value: f64,
    #[serde(with = "crate::ext::opt")]
    pub abs_error: Option<f64>,
    pub argmax: Option<ArgMax>,
    #[serde(with = "crate::ext::opt")]
    pub divergent_at: Option<f64>,
    /// Quadrature could not decide convergence.
    pub inconclusive: bool,
    pub alt: Option<AltForm>,
}

impl CriterionValue {
    pub fn exact(name: &str, value: f64) -> Self {
        CriterionValue {
            name: name.into(),
            value,
            abs_error: Some(0.0),
            argmax: None,
            divergent_at: None,
            inconclusive: false,
            alt: None,
        }
    }

    /// Relative discrepancy between the two forms, if a second form exists.
    pub fn form_discrepancy(&self) -> Option<f64> {
        self.alt.as_ref().map(|a| crate::num::rel_diff(self.value, a.value))
    }
}

/// `t ↦ value` of a curve; not serialized.
#[derive(Clone)]
pub struct PointFn(pub Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl PointFn {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        PointFn(Arc::new(f))
    }
}

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PointFn")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionCurve {
    pub name: String,
    /// Open interval of the curve.
    #[serde(with = "crate::ext::pairs")]
    pub interval: Vec<(f64, f64)>,
    pub sup: SupResult,
    /// Limits at the lower and upper interval ends.
    pub limits: Option<(LimitVerdict, LimitVerdict)>,
    #[serde(skip)]
    pub point: Option<PointFn>,
}

impl PartialEq for CriterionCurve {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.interval == o.interval && self.sup == o.sup && self.limits == o.limits
    }
}

impl CriterionCurve {
    pub fn eval(&self, t: f64) -> Option<f64> {
        self.point.as_ref().map(|p| (p.0)(t))
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.interval[0]
    }

    /// Sampled `(t, value)` pairs as CSV with a `t,value` header.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, y) in &self.sup.samples {
            writeln!(w, "{t:e},{y:e}")?;
        }
        Ok(())
    }
}

/// Values of a functional along a sequence tending to an endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionSequence {
    pub name: String,
    #[serde(with = "crate::ext::pairs")]
    pub points: Vec<(f64, f64)>,
    pub limit: LimitVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Entry {
    Value(CriterionValue),
    Curve(CriterionCurve),
    Sequence(CriterionSequence),
}

impl Entry {
    pub fn name(&self) -> &str {
        match self {
            Entry::Value(v) => &v.name,
            Entry::Curve(c) => &c.name,
            Entry::Sequence(s) => &s.name,
        }
    }

    /// The scalar the entry contributes to a finiteness test.
    pub fn value(&self) -> f64 {
        match self {
            Entry::Value(v) => v.value,
            Entry::Curve(c) => c.sup.value,
            Entry::Sequence(s) => s.points.iter().map(|p| p.1).fold(0.0, f64::max),
        }
    }

    pub fn finiteness(&self) -> Finiteness {
        match self {
            Entry::Value(v) if v.inconclusive => Finiteness::Unknown,
            _ => {
                let x = self.value();
                if x.is_finite() {
                    Finiteness::Finite
                } else if x == f64::INFINITY {
                    Finiteness::Infinite
                } else {
                    Finiteness::Unknown
                }
            }
        }
    }

    pub fn as_value(&self) -> Option<&CriterionValue> {
        match self {
            Entry::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_curve(&self) -> Option<&CriterionCurve> {
        match self {
            Entry::Curve(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionSet {
    pub regime: Regime,
    pub exps: Exponents,
    pub entries: BTreeMap<String, Entry>,
    pub constants: PaperConstants,
    pub notes: Vec<String>,
}

impl CriterionSet {
    pub fn get(&self, tag: &str) -> Option<&Entry> {
        self.entries.get(tag)
    }

    /// Scalar value of an entry.
    pub fn value(&self, tag: &str) -> Option<f64> {
        self.get(tag).map(Entry::value)
    }

    pub fn curves(&self) -> impl Iterator<Item = &CriterionCurve> {
        self.entries.values().filter_map(Entry::as_curve)
    }

    /// Every tag the regime roles need, including limit carriers.
    pub fn required_tags(&self) -> Vec<String> {
        let mut out = Vec::new();
        for role in &self.regime.roles {
            out.extend(role.tags.iter().cloned());
            match &role.limits {
                LimitRequirement::None => {}
                LimitRequirement::CurveEnds(c) => out.push(c.clone()),
                LimitRequirement::Sequences(a, b) => {
                    out.push(a.clone());
                    out.push(b.clone());
                }
            }
        }
        out
    }

    fn check_complete(&self) -> Result<()> {
        for tag in self.required_tags() {
            if !self.entries.contains_key(&tag) {
                return Err(Error::IncompleteCriterionSet(format!("{tag} for {}", self.regime.tag())));
            }
        }
        for role in &self.regime.roles {
            if let LimitRequirement::CurveEnds(c) = &role.limits {
                let ok = self.entries.get(c).and_then(Entry::as_curve).is_some_and(|c| c.limits.is_some());
                if !ok {
                    return Err(Error::IncompleteCriterionSet(format!("limit verdicts of {c}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

/// The conclusion an evidence record licenses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    BoundedYes,
    BoundedNo,
    CompactYes,
    CompactNo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub criterion: String,
    #[serde(with = "crate::ext")]
    pub value: f64,
    pub limits: Vec<LimitKind>,
    pub branch: String,
    pub direction: Direction,
    pub conclusion: Option<Conclusion>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bounded: Answer,
    pub compact: Answer,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    pub fn has_inconclusive(&self) -> bool {
        self.bounded == Answer::Inconclusive || self.compact == Answer::Inconclusive
    }
}

fn role_sum(cs: &CriterionSet, tags: &[String]) -> (f64, Finiteness) {
    let mut total = 0.0;
    let mut status = Finiteness::Finite;
    for t in tags {
        let e = &cs.entries[t];
        total += e.value();
        match e.finiteness() {
            Finiteness::Infinite => status = Finiteness::Infinite,
            Finiteness::Unknown if status == Finiteness::Finite => status = Finiteness::Unknown,
            _ => {}
        }
    }
    (total, status)
}

/// Limit kinds of the role's vanishing conditions, and whether they hold.
fn role_limits(cs: &CriterionSet, req: &LimitRequirement) -> (Vec<LimitKind>, Finiteness) {
    let kinds: Vec<LimitKind> = match req {
        LimitRequirement::None => return (vec![], Finiteness::Finite),
        LimitRequirement::CurveEnds(c) => {
            let (a, b) = cs.entries[c].as_curve().and_then(|c| c.limits.clone()).expect("checked");
            vec![a.kind, b.kind]
        }
        LimitRequirement::Sequences(a, b) => [a, b]
            .iter()
            .map(|t| match &cs.entries[*t] {
                Entry::Sequence(s) => s.limit.kind,
                _ => LimitKind::Inconclusive,
            })
            .collect(),
    };
    // `Finite` here means every limit vanishes; `Infinite` that one does not.
    let status = if kinds.iter().all(|k| *k == LimitKind::Zero) {
        Finiteness::Finite
    } else if kinds.iter().any(|k| k.is_obstruction()) {
        Finiteness::Infinite
    } else {
        Finiteness::Unknown
    };
    (kinds, status)
}

fn evidence(
    cs: &CriterionSet,
    label: String,
    value: f64,
    limits: Vec<LimitKind>,
    direction: Direction,
    conclusion: Option<Conclusion>,
    note: Option<&str>,
) -> Evidence {
    Evidence {
        criterion: label,
        value,
        limits,
        branch: cs.regime.tag(),
        direction,
        conclusion,
        note: note.map(str::to_string),
    }
}

fn decide_bounded(cs: &CriterionSet, ev: &mut Vec<Evidence>) -> Answer {
    let mut yes = false;
    let mut no = false;
    for role in cs.regime.roles.iter().filter(|r| r.scope.bounded()) {
        let (v, st) = role_sum(cs, &role.tags);
        let concl = match (role.direction, st) {
            (Direction::Equivalent | Direction::Sufficient, Finiteness::Finite) => Some(Conclusion::BoundedYes),
            (Direction::Equivalent | Direction::Necessary, Finiteness::Infinite) => Some(Conclusion::BoundedNo),
            _ => None,
        };
        let note = match (role.direction, st) {
            (Direction::Sufficient, Finiteness::Infinite) => Some("sufficient condition fails; no conclusion"),
            (Direction::Necessary, Finiteness::Finite) => Some("necessary condition holds; no conclusion"),
            (_, Finiteness::Unknown) => Some("finiteness undecided by quadrature"),
            _ => None,
        };
        yes |= concl == Some(Conclusion::BoundedYes);
        no |= concl == Some(Conclusion::BoundedNo);
        ev.push(evidence(cs, role.label(), v, vec![], role.direction, concl, note));
    }
    match (yes, no) {
        (true, false) => Answer::Yes,
        (false, true) => Answer::No,
        _ => Answer::Inconclusive,
    }
}

fn decide_compact(cs: &CriterionSet, ev: &mut Vec<Evidence>) -> Answer {
    if cs.regime.never_compact {
        let zero = cs.regime.roles.iter().all(|r| role_sum(cs, &r.tags).0 == 0.0);
        let (label, v) = cs.regime.roles.first().map(|r| (r.label(), role_sum(cs, &r.tags).0)).unwrap_or_default();
        return if zero {
            ev.push(evidence(
                cs,
                label,
                v,
                vec![],
                Direction::Equivalent,
                Some(Conclusion::CompactYes),
                Some("zero operator"),
            ));
            Answer::Yes
        } else {
            ev.push(evidence(
                cs,
                label,
                v,
                vec![],
                Direction::Necessary,
                Some(Conclusion::CompactNo),
                Some("never compact from L^1 to L^inf unless zero"),
            ));
            Answer::No
        };
    }
    let mut yes = false;
    let mut no = false;
    for role in cs.regime.roles.iter().filter(|r| r.scope.compact()) {
        let (v, st) = role_sum(cs, &role.tags);
        let (kinds, lim) = role_limits(cs, &role.limits);
        let cond = match (st, lim) {
            (Finiteness::Infinite, _) | (_, Finiteness::Infinite) => Finiteness::Infinite,
            (Finiteness::Finite, Finiteness::Finite) => Finiteness::Finite,
            _ => Finiteness::Unknown,
        };
        let concl = match (role.direction, cond) {
            (Direction::Equivalent | Direction::Sufficient, Finiteness::Finite) => Some(Conclusion::CompactYes),
            (Direction::Equivalent | Direction::Necessary, Finiteness::Infinite) => Some(Conclusion::CompactNo),
            _ => None,
        };
        let note = if lim == Finiteness::Unknown && st == Finiteness::Finite {
            Some("limit probe inconclusive")
        } else if lim == Finiteness::Infinite && st == Finiteness::Finite {
            Some("vanishing-limit condition fails")
        } else {
            None
        };
        yes |= concl == Some(Conclusion::CompactYes);
        no |= concl == Some(Conclusion::CompactNo);
        ev.push(evidence(cs, role.label(), v, kinds, role.direction, concl, note));
    }
    match (yes, no) {
        (true, false) => Answer::Yes,
        (false, true) => Answer::No,
        _ => Answer::Inconclusive,
    }
}

/// Boundedness from the roles of the branch; compactness is only filled in
/// when boundedness fails.
pub fn boundedness_verdict(cs: &CriterionSet) -> Result<Verdict> {
    cs.check_complete()?;
    let mut evidence = Vec::new();
    let bounded = decide_bounded(cs, &mut evidence);
    let compact = if bounded == Answer::No {
        evidence.push(unbounded_note(cs));
        Answer::No
    } else {
        Answer::Inconclusive
    };
    Ok(Verdict { bounded, compact, evidence })
}

fn unbounded_note(cs: &CriterionSet) -> Evidence {
    evidence(
        cs,
        "unbounded".into(),
        f64::INFINITY,
        vec![],
        Direction::Necessary,
        Some(Conclusion::CompactNo),
        Some("a compact operator is bounded"),
    )
}

/// Full verdict. `compact = Yes` always comes with `bounded = Yes`.
pub fn compactness_verdict(cs: &CriterionSet) -> Result<Verdict> {
    cs.check_complete()?;
    let mut evidence = Vec::new();
    let mut bounded = decide_bounded(cs, &mut evidence);
    let mut compact = decide_compact(cs, &mut evidence);
    if bounded == Answer::No {
        if compact == Answer::Yes {
            compact = Answer::Inconclusive;
            bounded = Answer::Inconclusive;
        } else if compact != Answer::No {
            compact = Answer::No;
            evidence.push(unbounded_note(cs));
        }
    } else if compact == Answer::Yes && bounded == Answer::Inconclusive {
        bounded = Answer::Yes;
        evidence.push(evidence_from_compact(cs));
    }
    Ok(Verdict { bounded, compact, evidence })
}

fn evidence_from_compact(cs: &CriterionSet) -> Evidence {
    evidence(
        cs,
        "compact".into(),
        0.0,
        vec![],
        Direction::Sufficient,
        Some(Conclusion::BoundedYes),
        Some("a compact operator is bounded"),
    )
}

/// Computes every functional the branch for `(kind, exps)` names. `w` is
/// ignored for the Laplace operator.
pub fn criterion_set(kind: OperatorKind, exps: &Exponents, v: &Weight, w: &Weight) -> Result<CriterionSet> {
    use crate::params::Case;
    let regime = classify(exps, kind);
    let consts = constants(&regime, exps)?;
    let mut notes = Vec::new();
    type Job<'a> = Box<dyn Fn() -> Result<Vec<Entry>> + Send + Sync + 'a>;
    let full = (0.0, f64::INFINITY);
    let mut jobs: Vec<Job> = Vec::new();
    match (kind, regime.case) {
        (OperatorKind::Laplace, case) => {
            if !w.pieces().is_empty() && *w != Weight::constant(1.0) {
                notes.push("outer weight w is ignored for the Laplace operator".into());
            }
            match case {
                Case::I => jobs.push(Box::new(move || Ok(vec![Entry::Curve(laplace_a(exps, v, full)?.0)]))),
                Case::II if exps.qf() == 1.0 => {
                    jobs.push(Box::new(move || Ok(laplace_b(exps, v, full)?.into_iter().map(Entry::Value).collect())))
                }
                Case::II | Case::III => {
                    jobs.push(Box::new(move || Ok(laplace_b(exps, v, full)?.into_iter().map(Entry::Value).collect())));
                    if case == Case::III {
                        jobs.push(Box::new(move || Ok(vec![Entry::Value(laplace::bq_pconj_norm(exps, v)?)])));
                    }
                }
                Case::IV | Case::V => jobs.push(Box::new(move || laplace_bq(exps, v, full))),
                Case::Ext => {
                    jobs.push(Box::new(move || Ok(laplace_extremes(exps, v)?.into_iter().map(Entry::Value).collect())))
                }
            }
        }
        (OperatorKind::Stieltjes, case) => match case {
            Case::I => {
                jobs.push(Box::new(move || Ok(vec![Entry::Curve(stieltjes_a(exps, v, w)?.0)])));
                jobs.push(Box::new(move || stieltjes_hardy_form(exps, v, w)));
            }
            Case::II => {
                if exps.qf() != 1.0 {
                    jobs.push(Box::new(move || stieltjes_hardy_form(exps, v, w)));
                }
                if exps.qf() >= 1.0 {
                    jobs.push(Box::new(move || Ok(stieltjes_b(exps, v, w)?.into_iter().map(Entry::Value).collect())));
                }
            }
            Case::III => jobs.push(Box::new(move || stieltjes_hardy_form(exps, v, w))),
            Case::IV => {
                jobs.push(Box::new(move || stieltjes_p1(exps, v, w)));
                jobs.push(Box::new(move || {
                    let (_, a1) = stieltjes_a(exps, v, w)?;
                    Ok(a1.into_iter().map(Entry::Value).collect())
                }));
            }
            Case::V | Case::Ext => {
                notes.push("no criteria are stated for the Stieltjes operator with an infinite exponent".into())
            }
        },
        (OperatorKind::Hardy | OperatorKind::HardyDual, Case::Ext) => {
            notes.push("no criteria are stated for the Hardy operators with an infinite exponent".into())
        }
        (OperatorKind::Hardy, _) => {
            let psi = w.times_power(-exps.lambda);
            jobs.push(Box::new(move || hardy_criteria(exps, v, &psi, full, HardyDirection::Forward)));
        }
        (OperatorKind::HardyDual, _) => {
            let phi = v.times_power(-exps.lambda);
            jobs.push(Box::new(move || hardy_criteria(exps, &phi, w, full, HardyDirection::Dual)));
        }
    }
    let results = par::map(&jobs, |job| job());
    let mut entries = BTreeMap::new();
    for r in results {
        for e in r? {
            entries.insert(e.name().to_string(), e);
        }
    }
    if matches!(regime.case, Case::III | Case::IV) && matches!(kind, OperatorKind::Hardy | OperatorKind::HardyDual) {
        notes.push("compactness is not characterized on this branch".into());
    }
    Ok(CriterionSet { regime, exps: *exps, entries, constants: consts, notes })
}

/// Sup options with the weight breakpoints as extra sample points.
pub(crate) fn sup_opts(breaks: &[f64]) -> SupOptions {
    SupOptions { extra_points: breaks.to_vec(), ..SupOptions::default() }
}

pub(crate) fn breaks_of(ws: &[&Weight]) -> Vec<f64> {
    let mut b: Vec<f64> = ws.iter().flat_map(|w| w.breakpoints()).filter(|x| *x > 0.0 && x.is_finite()).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Tolerance below which a probed curve counts as vanishing.
pub(crate) fn limit_tol(scale: f64) -> f64 {
    if scale.is_finite() && scale > 0.0 {
        1e-9 * scale
    } else {
        1e-12
    }
}

pub(crate) fn lower_endpoint(c1: f64) -> Endpoint {
    if c1 == 0.0 {
        Endpoint::Zero
    } else {
        Endpoint::Above(c1)
    }
}

pub(crate) fn upper_endpoint(c2: f64) -> Endpoint {
    if c2.is_infinite() {
        Endpoint::Infinity
    } else {
        Endpoint::Below(c2)
    }
}

/// Sup over `(c1, c2)` plus endpoint limits of `f`.
pub(crate) fn make_curve<F>(
    name: &str,
    f: F,
    interval: (f64, f64),
    breaks: &[f64],
    with_limits: bool,
) -> Result<CriterionCurve>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let sup = sup_on_interval(&f, interval.0, interval.1, &sup_opts(breaks))?;
    let limits = with_limits.then(|| {
        let tol = limit_tol(sup.value);
        (limit_probe(&f, lower_endpoint(interval.0), tol), limit_probe(&f, upper_endpoint(interval.1), tol))
    });
    Ok(CriterionCurve { name: name.into(), interval: vec![interval], sup, limits, point: Some(PointFn::new(f)) })
}

/// Sum of curves on a common interval.
pub(crate) fn sum_curve(name: &str, parts: &[&CriterionCurve], breaks: &[f64]) -> Result<CriterionCurve> {
    let fs: Vec<PointFn> = parts.iter().map(|c| c.point.clone().expect("computed curve")).collect();
    let interval = parts[0].bounds();
    make_curve(name, move |t| fs.iter().map(|f| (f.0)(t)).sum(), interval, breaks, true)
}

pub(crate) fn sup_value(name: &str, sup: &SupResult) -> CriterionValue {
    CriterionValue {
        name: name.into(),
        value: sup.value,
        abs_error: None,
        argmax: Some(sup.argmax),
        divergent_at: match sup.argmax {
            _ if sup.value.is_finite() => None,
            ArgMax::LowerEnd => Some(0.0),
            ArgMax::UpperEnd => Some(f64::INFINITY),
            ArgMax::At(t) => Some(t),
        },
        inconclusive: false,
        alt: None,
    }
}

/// `(∫_{lo}^{hi} f)^{power}` as a criterion value.
pub(crate) fn integral_value<F>(
    name: &str,
    f: &F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    power: f64,
    rel_tol: f64,
) -> Result<CriterionValue>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let opts = QuadOptions { rel_tol, breakpoints: breaks.to_vec(), ..QuadOptions::default() };
    let r = integrate_with(f, lo, hi, &opts)?;
    let value = crate::num::powprod(&[(r.value, power)]);
    let divergent_at = if r.value.is_infinite() { Some(if r.divergent_at_zero() { lo } else { hi }) } else { None };
    let abs_error = if r.value > 0.0 && r.value.is_finite() {
        Some((power * value / r.value * r.abs_error).abs())
    } else {
        Some(0.0)
    };
    let inconclusive = !r.converged && r.value.is_finite() && r.abs_error > 1e-6 * r.value;
    Ok(CriterionValue { name: name.into(), value, abs_error, argmax: None, divergent_at, inconclusive, alt: None })
}

/// `max(0, t^{−λ} − c^{−λ})` without cancellation for `t` close to `c`.
pub(crate) fn tail_power(t: f64, c: f64, lambda: f64) -> f64 {
    if c.is_infinite() {
        t.powf(-lambda)
    } else {
        (t.powf(-lambda) * -(lambda * (t / c).ln()).exp_m1()).max(0.0)
    }
}

#[cfg(test)]
mod tests;
