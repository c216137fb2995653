//! Job configuration files.

use anyhow::{bail, Context, Result};
use lpq_core::diagnostics::DiagOptions;
use lpq_core::normest::NormOptions;
use lpq_core::weights::Piece;
use lpq_core::{Exponent, Exponents, OperatorKind, Weight};
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Criteria,
    Normest,
    Verify,
    Compactness,
    Spectrum,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Criteria, Task::Normest, Task::Verify, Task::Compactness, Task::Spectrum];
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Task, String> {
        Ok(match s.trim() {
            "criteria" => Task::Criteria,
            "normest" => Task::Normest,
            "verify" => Task::Verify,
            "compactness" => Task::Compactness,
            "spectrum" => Task::Spectrum,
            other => {
                return Err(format!(
                    "unknown task '{other}' (expected criteria, normest, verify, compactness or spectrum)"
                ))
            }
        })
    }
}

/// `c · t^a · (ln(1+t))^l` on `[from, to)`; `c` defaults to 1, `a` and `l` to 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceLiteral {
    pub from: f64,
    #[serde(with = "lpq_core::ext")]
    pub to: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub l: f64,
}

fn one() -> f64 {
    1.0
}

/// Either a list of power pieces or `{"table": [[t, v], ...]}`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightLiteral {
    Pieces(Vec<PieceLiteral>),
    Table(Vec<(f64, f64)>),
}

impl WeightLiteral {
    pub fn to_weight(&self) -> lpq_core::Result<Weight> {
        match self {
            WeightLiteral::Pieces(ps) => {
                Weight::piecewise(ps.iter().map(|p| Piece::new(p.from, p.to, p.c, p.a, p.l)).collect())
            }
            WeightLiteral::Table(t) => Weight::tabulated(t),
        }
    }
}

#[derive(Serialize)]
struct TableRef<'a> {
    table: &'a [(f64, f64)],
}

impl Serialize for WeightLiteral {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WeightLiteral::Pieces(p) => p.serialize(s),
            WeightLiteral::Table(t) => TableRef { table: t }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for WeightLiteral {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = WeightLiteral;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of {from, to, c, a, l} pieces or {\"table\": [[t, v], ...]}")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<WeightLiteral, A::Error> {
                let mut out = Vec::new();
                while let Some(p) = seq.next_element::<PieceLiteral>()? {
                    out.push(p);
                }
                Ok(WeightLiteral::Pieces(out))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<WeightLiteral, A::Error> {
                let mut table = None;
                while let Some(key) = map.next_key::<String>()? {
                    if key != "table" {
                        return Err(de::Error::unknown_field(&key, &["table"]));
                    }
                    if table.is_some() {
                        return Err(de::Error::duplicate_field("table"));
                    }
                    table = Some(map.next_value::<Vec<(f64, f64)>>()?);
                }
                table.map(WeightLiteral::Table).ok_or_else(|| de::Error::missing_field("table"))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { t_min: 1e-4, t_max: 1e4, points_per_decade: 64 }
    }
}

fn default_tasks() -> Vec<Task> {
    Task::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub operator: OperatorKind,
    pub lambda: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub v: WeightLiteral,
    /// Required except for the Laplace operator, which ignores it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<WeightLiteral>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub normest: NormOptions,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub diagnostics: DiagOptions,
}

/// A configuration with its weights and exponents validated.
#[derive(Debug)]
pub struct Job {
    pub config: JobConfig,
    pub exps: Exponents,
    pub v: Weight,
    pub w: Weight,
    pub notes: Vec<String>,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<JobConfig> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            anyhow::anyhow!("field '{path}': {inner}")
        })
    }

    pub fn load(path: &Path) -> Result<JobConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        JobConfig::from_json(&text).with_context(|| format!("malformed config {}", path.display()))
    }

    pub fn validate(self) -> Result<Job> {
        let exps = Exponents::derive(self.lambda, self.p, self.q)?;
        let g = &self.grid;
        if !(g.t_min > 0.0 && g.t_max > g.t_min && g.t_max.is_finite()) {
            bail!("field 'grid': need 0 < t_min < t_max < inf, got [{}, {}]", g.t_min, g.t_max);
        }
        if g.points_per_decade == 0 {
            bail!("field 'grid.points_per_decade': must be positive");
        }
        if self.normest.restarts == 0
            || self.normest.max_iter == 0
            || self.normest.tol.is_nan()
            || self.normest.tol <= 0.0
        {
            bail!("field 'normest': restarts and max_iter must be positive and tol > 0");
        }
        if self.tasks.is_empty() {
            bail!("field 'tasks': at least one task is required");
        }
        let v = self.v.to_weight().context("field 'v'")?;
        let mut notes = Vec::new();
        let w = match (&self.w, self.operator) {
            (Some(_), OperatorKind::Laplace) => {
                notes.push("w is ignored for the Laplace operator (outer weight fixed to 1)".into());
                Weight::constant(1.0)
            }
            (None, OperatorKind::Laplace) => Weight::constant(1.0),
            (Some(w), _) => w.to_weight().context("field 'w'")?,
            (None, k) => bail!("field 'w': required for the {k} operator"),
        };
        Ok(Job { config: self, exps, v, w, notes })
    }

    pub fn wants(&self, t: Task) -> bool {
        self.tasks.contains(&t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"operator": "laplace", "lambda": 1, "p": 2, "q": 2,
        "v": [{"from": 0, "to": "inf", "c": 1, "a": 0, "l": 0}]}"#;

    #[test]
    fn defaults_fill_in() {
        let c = JobConfig::from_json(BASE).unwrap();
        assert_eq!(c.grid, GridConfig::default());
        assert_eq!(c.tasks, Task::ALL.to_vec());
        assert_eq!(c.normest, NormOptions::default());
        let job = c.validate().unwrap();
        assert_eq!(job.v.value(3.0), 1.0);
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let bad = BASE.replace("\"lambda\"", "\"lamda\"");
        let e = JobConfig::from_json(&bad).unwrap_err().to_string();
        assert!(e.contains("lamda"), "{e}");
        let bad = BASE.replace("\"l\": 0", "\"l\": 0, \"b\": 1");
        let e = JobConfig::from_json(&bad).unwrap_err().to_string();
        assert!(e.contains("v[0]") && e.contains("`b`"), "{e}");
    }

    #[test]
    fn table_literal_and_infinite_exponent() {
        let c = JobConfig::from_json(
            r#"{"operator": "stieltjes", "lambda": 2, "p": "inf", "q": 1.5,
                "v": {"table": [[0.5, 1], [1, 2], [4, 0.5]]},
                "w": [{"from": 1, "to": 2}], "tasks": ["criteria"]}"#,
        )
        .unwrap();
        assert_eq!(c.p, Exponent::Infinite);
        assert!(matches!(c.v, WeightLiteral::Table(ref t) if t.len() == 3));
        let job = c.validate().unwrap();
        assert_eq!(job.w.value(1.5), 1.0);
        assert_eq!(job.w.value(2.5), 0.0);
    }

    #[test]
    fn literal_round_trips() {
        let c = JobConfig::from_json(BASE).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(JobConfig::from_json(&s).unwrap(), c);
    }

    #[test]
    fn domain_and_missing_weight_errors() {
        let bad = BASE.replace("\"p\": 2", "\"p\": 0.5");
        let e = JobConfig::from_json(&bad).unwrap().validate().unwrap_err().to_string();
        assert!(e.contains("parameter domain"), "{e}");
        let hardy = BASE.replace("laplace", "hardy");
        let e = JobConfig::from_json(&hardy).unwrap().validate().unwrap_err().to_string();
        assert!(e.contains("'w'"), "{e}");
    }

    #[test]
    fn task_parsing() {
        assert_eq!("verify".parse::<Task>().unwrap(), Task::Verify);
        assert!("verfy".parse::<Task>().is_err());
    }
}
