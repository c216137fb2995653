//! The JSON report and its CSV side files.

use crate::config::JobConfig;
use anyhow::{Context, Result};
use lpq_core::criteria::{Answer, CriterionSet, Verdict};
use lpq_core::diagnostics::{ConsistencyReport, SpectrumReport, TailDecayReport};
use lpq_core::normest::{BoundReport, NormEstimate, SpanExtrapolation};
use lpq_core::params::PaperConstants;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSection {
    pub grid_points: usize,
    pub estimate: NormEstimate,
    /// Share of the image norm carried by the two extreme source nodes.
    pub boundary_share: f64,
    /// Fitted continuum value from nested windows; not certified.
    pub span: Option<SpanExtrapolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSection {
    pub bounded_requested: bool,
    pub compact_requested: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSection {
    pub tail_decay: Option<TailDecayReport>,
    pub spectrum: Option<SpectrumReport>,
    pub consistency: Option<ConsistencyReport>,
    pub skipped: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    Inconclusive,
    BoundViolation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Inconclusive => 2,
            Outcome::BoundViolation => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: JobConfig,
    pub regime: String,
    pub notes: Vec<String>,
    pub criteria: Option<CriterionSet>,
    pub constants: Option<PaperConstants>,
    pub normest: Option<NormSection>,
    pub bounds: Option<BoundReport>,
    pub verdicts: Option<VerdictSection>,
    pub diagnostics: Option<DiagnosticsSection>,
    pub outcome: Outcome,
    /// Reasons behind a non-`ok` outcome.
    pub findings: Vec<String>,
    /// Seconds; the only field that differs between identical runs.
    pub wall_clock_s: f64,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").with_context(|| format!("cannot write {}", path.display()))
    }

    /// One CSV per criterion curve, named after the curve; returns the paths.
    pub fn write_csv(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let mut out = Vec::new();
        for c in self.criteria.iter().flat_map(|cs| cs.curves()) {
            let path = dir.join(format!("{}.csv", file_stem(&c.name)));
            let f = std::fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
            let mut f = std::io::BufWriter::new(f);
            c.write_csv(&mut f)?;
            f.flush()?;
            out.push(path);
        }
        Ok(out)
    }

    /// Human-readable digest for the terminal.
    pub fn summary(&self) -> String {
        let mut s = format!("regime {}\n", self.regime);
        for n in &self.notes {
            s += &format!("note: {n}\n");
        }
        if let Some(cs) = &self.criteria {
            for (tag, e) in &cs.entries {
                s += &format!("  {tag:<14} {:.6e}\n", e.value());
            }
        }
        if let Some(n) = &self.normest {
            s += &format!(
                "norm >= {:.6e} ({:?}, converged {}, seed {:#x})\n",
                n.estimate.lower_bound, n.estimate.method, n.estimate.converged, n.estimate.seed
            );
            if let Some(sp) = &n.span {
                s += &format!("span-extrapolated norm {:.6e}\n", sp.extrapolated);
            }
        }
        if let Some(b) = &self.bounds {
            for (label, side) in [("lower", &b.lower), ("upper", &b.upper)] {
                if let Some(side) = side {
                    s += &format!(
                        "{label} bound {:.6} x {} = {:.6e}: {}\n",
                        side.constant,
                        side.criterion,
                        side.bound,
                        if side.ok { "ok" } else { "FAILED" }
                    );
                }
            }
            if let (Some(r), Some(c)) = (b.ratio, &b.ratio_criterion) {
                s += &format!("ratio estimate / {c} = {r:.6}\n");
            }
        }
        if let Some(v) = &self.verdicts {
            let show = |a: Answer| format!("{a:?}").to_lowercase();
            if v.bounded_requested {
                s += &format!("bounded: {}\n", show(v.verdict.bounded));
            }
            if v.compact_requested {
                s += &format!("compact: {}\n", show(v.verdict.compact));
            }
        }
        if let Some(c) = self.diagnostics.as_ref().and_then(|d| d.consistency.as_ref()) {
            s += &format!("consistency: {} errors, {} warnings\n", c.errors(), c.warnings());
            for i in &c.issues {
                s += &format!("  {:?}: {}\n", i.severity, i.message);
            }
        }
        for f in &self.findings {
            s += &format!("finding: {f}\n");
        }
        s += &format!("outcome: {:?} (exit {})\n", self.outcome, self.outcome.exit_code());
        s
    }
}

/// `A_H*` becomes `A_H_star`; other characters outside `[A-Za-z0-9_-]` become `_`.
pub fn file_stem(name: &str) -> String {
    let mut s = String::new();
    for ch in name.chars() {
        match ch {
            '*' => s.push_str("_star"),
            c if c.is_ascii_alphanumeric() || c == '_' || c == '-' => s.push(c),
            _ => s.push('_'),
        }
    }
    s
}
