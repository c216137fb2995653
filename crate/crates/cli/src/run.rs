//! The `run` pipeline: criteria, norm estimate, bound checks, verdicts and
//! diagnostics, in that order.

use crate::config::{Job, JobConfig, Task};
use crate::report::{DiagnosticsSection, NormSection, Outcome, Report, VerdictSection};
use anyhow::Result;
use lpq_core::criteria::{boundedness_verdict, compactness_verdict, criterion_set, Answer};
use lpq_core::diagnostics::{cross_validate, spectral_probe, tail_decay};
use lpq_core::discretize::{build, target_grid, Grid};
use lpq_core::normest::{bound_check, boundary_share, norm_op, span_extrapolate, BoundReport, BoundTolerances};
use lpq_core::params::classify;
use lpq_core::Exponent;
use std::time::Instant;

pub fn run_config(config: JobConfig) -> Result<Report> {
    let start = Instant::now();
    let Job { config, exps, v, w, mut notes } = config.validate()?;
    let kind = config.operator;
    let wants = |t: Task| config.wants(t);

    let need_criteria = wants(Task::Criteria) || wants(Task::Verify) || wants(Task::Compactness);
    let cs = if need_criteria { Some(criterion_set(kind, &exps, &v, &w)?) } else { None };
    if let Some(cs) = &cs {
        notes.extend(cs.notes.iter().cloned());
    }

    let normest = if wants(Task::Normest) || wants(Task::Verify) {
        let g = &config.grid;
        let mut breaks = v.breakpoints();
        breaks.extend(w.breakpoints());
        let grid = Grid::log_grid_with_breaks(g.t_min, g.t_max, g.points_per_decade, &breaks)?;
        let target = target_grid(kind, exps.lambda, &grid, g.points_per_decade)?;
        let op = build(kind, &exps, &v, &w, &grid, &target);
        let estimate = norm_op(&op, &config.normest)?;
        if estimate.heuristic {
            notes.push("q < 1: the norm estimate is a quasi-norm heuristic".into());
        }
        let share = boundary_share(&op, &estimate);
        let span = if wants(Task::Normest) { Some(span_extrapolate(&op, &config.normest)?) } else { None };
        Some(NormSection { grid_points: grid.len(), estimate, boundary_share: share, span })
    } else {
        None
    };

    let bounds = match (&cs, &normest) {
        (Some(cs), Some(n)) if wants(Task::Verify) => {
            let b = bound_check(&n.estimate, cs, &BoundTolerances::default());
            if b.lower.is_none() && b.upper.is_none() {
                notes.push("no explicit constants on this branch: ratio-only bound report".into());
            }
            Some(b)
        }
        _ => None,
    };

    let verdicts = match &cs {
        Some(cs) if wants(Task::Compactness) => Some(VerdictSection {
            bounded_requested: wants(Task::Criteria),
            compact_requested: true,
            verdict: compactness_verdict(cs)?,
        }),
        Some(cs) if wants(Task::Criteria) => Some(VerdictSection {
            bounded_requested: true,
            compact_requested: false,
            verdict: boundedness_verdict(cs)?,
        }),
        _ => None,
    };

    let diagnostics = if wants(Task::Compactness) || wants(Task::Spectrum) {
        let mut d = DiagnosticsSection::default();
        let l2 = exps.p == Exponent::Finite(2.0) && exps.q == Exponent::Finite(2.0);
        if wants(Task::Spectrum) {
            if l2 {
                d.spectrum = Some(spectral_probe(kind, &exps, &v, &w, &config.diagnostics)?);
            } else {
                d.skipped.push("spectrum: singular values describe p = q = 2 only".into());
            }
        }
        if let Some(vs) = verdicts.as_ref().filter(|_| wants(Task::Compactness)) {
            if classify(&exps, kind).never_compact {
                d.skipped.push("tail_decay: the operator is never compact on this branch".into());
            } else {
                d.tail_decay = Some(tail_decay(kind, &exps, &v, &w, &config.diagnostics, &config.normest)?);
            }
            d.consistency = Some(cross_validate(&vs.verdict, d.tail_decay.as_ref(), d.spectrum.as_ref()));
        }
        Some(d)
    } else {
        None
    };

    let (outcome, findings) = assess(bounds.as_ref(), verdicts.as_ref(), diagnostics.as_ref());

    Ok(Report {
        tool: "lpq".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        regime: classify(&exps, kind).tag(),
        constants: cs.as_ref().map(|c| c.constants.clone()),
        criteria: cs,
        config,
        notes,
        normest,
        bounds,
        verdicts,
        diagnostics,
        outcome,
        findings,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

/// Exit semantics: an upper-bound violation dominates; a lower-bound
/// shortfall, an inconclusive requested verdict or a consistency error gives
/// `Inconclusive`.
pub fn assess(
    bounds: Option<&BoundReport>,
    verdicts: Option<&VerdictSection>,
    diagnostics: Option<&DiagnosticsSection>,
) -> (Outcome, Vec<String>) {
    let mut findings = Vec::new();
    let mut violation = false;
    let mut inconclusive = false;
    if let Some(b) = bounds {
        if let Some(u) = b.upper.as_ref().filter(|s| !s.ok) {
            violation = true;
            findings.push(format!(
                "upper bound violated: estimate {:e} > {} x {} = {:e}",
                b.estimate, u.constant, u.criterion, u.bound
            ));
        }
        if let Some(l) = b.lower.as_ref().filter(|s| !s.ok) {
            inconclusive = true;
            findings.push(format!(
                "estimate {:e} below the lower bound {} x {} = {:e}: optimizer or grid too coarse",
                b.estimate, l.constant, l.criterion, l.bound
            ));
        }
    }
    if let Some(vs) = verdicts {
        if vs.bounded_requested && vs.verdict.bounded == Answer::Inconclusive {
            inconclusive = true;
            findings.push("boundedness verdict is inconclusive".into());
        }
        if vs.compact_requested && vs.verdict.compact == Answer::Inconclusive {
            inconclusive = true;
            findings.push("compactness verdict is inconclusive".into());
        }
    }
    if let Some(c) = diagnostics.and_then(|d| d.consistency.as_ref()) {
        if !c.consistent() {
            inconclusive = true;
            findings.push(format!("{} consistency errors between verdict and diagnostics", c.errors()));
        }
    }
    let outcome = if violation {
        Outcome::BoundViolation
    } else if inconclusive {
        Outcome::Inconclusive
    } else {
        Outcome::Ok
    };

    (outcome, findings)
}
