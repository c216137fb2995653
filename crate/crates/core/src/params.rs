//! Exponent bookkeeping and dispatch of `(λ, p, q, operator)` to a criterion
//! branch together with the roles of its criteria and its explicit constants.

use crate::error::{Error, Result};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

/// A Lebesgue exponent; `∞` is a distinguished value, never a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(x) => Some(x),
            Exponent::Infinite => None,
        }
    }

    /// The value as an extended real.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(x) => x,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// `1/s`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(x) => 1.0 / x,
            Exponent::Infinite => 0.0,
        }
    }

    /// Hölder conjugate for `s ≥ 1`: `1 ↦ ∞`, `∞ ↦ 1`.
    pub fn conj(self) -> Option<Exponent> {
        match self {
            Exponent::Infinite => Some(Exponent::Finite(1.0)),
            Exponent::Finite(1.0) => Some(Exponent::Infinite),
            Exponent::Finite(x) if x > 1.0 => Some(Exponent::Finite(x / (x - 1.0))),
            Exponent::Finite(_) => None,
        }
    }

    /// Parses a number or the token `"inf"`.
    pub fn parse(s: &str) -> Option<Exponent> {
        let t = s.trim();
        if let Some(v) = crate::ext::parse_token(t) {
            return (v == f64::INFINITY).then_some(Exponent::Infinite);
        }
        t.parse::<f64>().ok().map(Exponent::from)
    }
}

impl From<f64> for Exponent {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Exponent::Infinite
        } else {
            Exponent::Finite(x)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(x) => s.serialize_f64(*x),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::from(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                Exponent::parse(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_any(V)
    }
}

/// `(λ, p, q)` with derived conjugates. Fields undefined on a branch are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub lambda: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub p_conj: Exponent,
    pub q_conj: Option<Exponent>,
    pub r: Option<f64>,
}

impl Exponents {
    pub fn derive(lambda: f64, p: impl Into<Exponent>, q: impl Into<Exponent>) -> Result<Exponents> {
        let (p, q) = (p.into(), q.into());
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::ParameterDomain(format!("lambda must be positive and finite, got {lambda}")));
        }
        match p {
            Exponent::Finite(x) if !(x >= 1.0 && x.is_finite()) => {
                return Err(Error::ParameterDomain(format!("p must lie in [1, inf], got {x}")))
            }
            _ => {}
        }
        match q {
            Exponent::Finite(x) if !(x > 0.0 && x.is_finite()) => {
                return Err(Error::ParameterDomain(format!("q must lie in (0, inf], got {x}")))
            }
            _ => {}
        }
        let p_conj = p.conj().expect("p >= 1 has a conjugate");
        let q_conj = match q {
            Exponent::Finite(x) if x > 1.0 => q.conj(),
            Exponent::Infinite => q.conj(),
            _ => None,
        };
        let r = match (p, q) {
            (Exponent::Finite(pp), Exponent::Finite(qq)) if qq < pp => Some(pp * qq / (pp - qq)),
            _ => None,
        };
        Ok(Exponents { lambda, p, q, p_conj, q_conj, r })
    }

    /// Finite `p`, panicking on `∞`; only called on branches where `p < ∞`.
    pub fn pf(&self) -> f64 {
        self.p.finite().expect("finite p required on this branch")
    }

    pub fn qf(&self) -> f64 {
        self.q.finite().expect("finite q required on this branch")
    }

    /// `p′` as an extended real.
    pub fn pc(&self) -> f64 {
        self.p_conj.value()
    }

    /// `q/(q−1)` for any finite `q ≠ 1`, negative when `q < 1`.
    pub fn q_ratio(&self) -> f64 {
        let q = self.qf();
        q / (q - 1.0)
    }

    pub fn rf(&self) -> f64 {
        self.r.expect("r defined only for q < p")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laplace,
    Stieltjes,
    Hardy,
    HardyDual,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Laplace => "Laplace",
            OperatorKind::Stieltjes => "Stieltjes",
            OperatorKind::Hardy => "Hardy",
            OperatorKind::HardyDual => "HardyDual",
        })
    }
}

/// Criterion case within an operator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
    Ext,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            Case::I => "i",
            Case::II => "ii",
            Case::III => "iii",
            Case::IV => "iv",
            Case::V => "v",
            Case::Ext => "ext",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Necessary,
    Sufficient,
    Equivalent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Boundedness,
    Compactness,
    Both,
}

impl Scope {
    pub fn bounded(self) -> bool {
        matches!(self, Scope::Boundedness | Scope::Both)
    }

    pub fn compact(self) -> bool {
        matches!(self, Scope::Compactness | Scope::Both)
    }
}

/// Limit conditions attached to a compactness role.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitRequirement {
    None,
    /// Both endpoint limits of the named curve must vanish.
    CurveEnds(String),
    /// The named sequences (toward 0, toward ∞) must vanish.
    Sequences(String, String),
}

/// One condition of a criterion branch: the finiteness of the sum of the
/// tagged functionals, with its logical direction and scope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionRole {
    pub tags: Vec<String>,
    pub direction: Direction,
    pub scope: Scope,
    pub limits: LimitRequirement,
}

impl CriterionRole {
    fn new(tags: &[&str], direction: Direction, scope: Scope) -> Self {
        CriterionRole {
            tags: tags.iter().map(|s| s.to_string()).collect(),
            direction,
            scope,
            limits: LimitRequirement::None,
        }
    }

    fn with_curve_limits(mut self, curve: &str) -> Self {
        self.limits = LimitRequirement::CurveEnds(curve.to_string());
        self
    }

    pub fn label(&self) -> String {
        self.tags.join("+")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: OperatorKind,
    pub case: Case,
    pub roles: Vec<CriterionRole>,
    /// The operator cannot be compact unless it vanishes (`L^1 → L^∞`).
    pub never_compact: bool,
}

impl Regime {
    pub fn tag(&self) -> String {
        format!("{}-{}", self.kind, self.case)
    }
}

/// The unique branch for `(p, q)`; comparisons are exact.
pub fn case_of(exps: &Exponents, kind: OperatorKind) -> Case {
    let (p, q) = (exps.p, exps.q);
    if p.is_infinite() || q.is_infinite() {
        return Case::Ext;
    }
    let (p, q) = (p.value(), q.value());
    match kind {
        OperatorKind::Laplace => {
            if p > 1.0 && p <= q {
                Case::I
            } else if q >= 1.0 && q < p {
                Case::II
            } else if q < 1.0 && p > 1.0 {
                Case::III
            } else if q < 1.0 {
                Case::IV
            } else {
                Case::V
            }
        }
        OperatorKind::Stieltjes | OperatorKind::Hardy | OperatorKind::HardyDual => {
            if p > 1.0 && p <= q {
                Case::I
            } else if p > 1.0 {
                Case::II
            } else if q < 1.0 {
                Case::III
            } else {
                Case::IV
            }
        }
    }
}

pub fn classify(exps: &Exponents, kind: OperatorKind) -> Regime {
    use Direction::*;
    use Scope::*;
    let case = case_of(exps, kind);
    let mut never_compact = false;
    let roles = match (kind, case) {
        (OperatorKind::Laplace, Case::I) => {
            vec![CriterionRole::new(&["A_L"], Equivalent, Both).with_curve_limits("A_L")]
        }
        (OperatorKind::Laplace, Case::II) => {
            if exps.qf() == 1.0 {
                vec![CriterionRole::new(&["B_p"], Equivalent, Both)]
            } else {
                vec![CriterionRole::new(&["B_L"], Equivalent, Both)]
            }
        }
        (OperatorKind::Laplace, Case::III) => {
            vec![CriterionRole::new(&["B_L"], Sufficient, Both), CriterionRole::new(&["||B_q||_p'"], Necessary, Both)]
        }
        (OperatorKind::Laplace, Case::IV) => {
            vec![CriterionRole::new(&["B_q'"], Sufficient, Both), CriterionRole::new(&["B_q"], Necessary, Both)]
        }
        (OperatorKind::Laplace, Case::V) => {
            vec![CriterionRole::new(&["Bbar_q"], Equivalent, Both).with_curve_limits("Bbar_q")]
        }
        (OperatorKind::Laplace, _) => match (exps.p, exps.q) {
            (Exponent::Infinite, Exponent::Infinite) => vec![CriterionRole::new(&["C_1"], Equivalent, Both)],
            (Exponent::Infinite, Exponent::Finite(q)) if q > 1.0 => {
                vec![CriterionRole::new(&["C_q>1"], Equivalent, Both)]
            }
            (Exponent::Infinite, Exponent::Finite(1.0)) => {
                vec![CriterionRole::new(&["C_q=1"], Equivalent, Both)]
            }
            (Exponent::Infinite, _) => {
                vec![CriterionRole::new(&["C_q>1"], Sufficient, Both), CriterionRole::new(&["C_q<1"], Necessary, Both)]
            }
            (Exponent::Finite(1.0), _) => {
                never_compact = true;
                vec![CriterionRole::new(&["C_inf"], Equivalent, Boundedness)]
            }
            _ => vec![CriterionRole::new(&["C_p'"], Equivalent, Both)],
        },
        (OperatorKind::Stieltjes, Case::I) => vec![
            CriterionRole::new(&["A_S"], Equivalent, Boundedness),
            CriterionRole::new(&["A_H", "A_H*"], Equivalent, Both).with_curve_limits("A_H+A_H*"),
        ],
        (OperatorKind::Stieltjes, Case::II) => {
            let q = exps.qf();
            if q == 1.0 {
                vec![CriterionRole::new(&["Lambda"], Equivalent, Both)]
            } else {
                let mut v = vec![CriterionRole::new(&["B_H", "B_H*"], Equivalent, Both)];
                if q > 1.0 {
                    v.push(CriterionRole::new(&["B_S"], Equivalent, Boundedness));
                }
                v
            }
        }
        (OperatorKind::Stieltjes, Case::III) => vec![CriterionRole::new(&["B_1H", "B_1H*"], Equivalent, Both)],
        (OperatorKind::Stieltjes, Case::IV) => vec![
            CriterionRole {
                tags: vec!["S_H".into(), "S_H*".into()],
                direction: Equivalent,
                scope: Both,
                limits: LimitRequirement::Sequences("S_a".into(), "S_b".into()),
            },
            CriterionRole::new(&["A_1S"], Equivalent, Boundedness),
        ],
        (OperatorKind::Hardy | OperatorKind::HardyDual, c) => {
            let star = if kind == OperatorKind::HardyDual { "*" } else { "" };
            match c {
                Case::I => {
                    let a = format!("A{star}");
                    vec![CriterionRole::new(&[&a], Equivalent, Both).with_curve_limits(&a)]
                }
                Case::II => vec![CriterionRole::new(&[&format!("B{star}")], Equivalent, Both)],
                Case::III => vec![CriterionRole::new(&[&format!("B{star}_q<1")], Equivalent, Boundedness)],
                Case::IV => vec![CriterionRole::new(&[&format!("B{star}_1<=q")], Equivalent, Boundedness)],
                _ => vec![],
            }
        }
        (OperatorKind::Stieltjes, _) => vec![],
    };
    Regime { kind, case, roles, never_compact }
}

/// `α` with `α^q = min{2, 2^{q−1}}`.
pub fn alpha(q: f64) -> f64 {
    2f64.min(2f64.powf(q - 1.0)).powf(1.0 / q)
}

/// `β` with `β^q = 2/(q−1)` for `1 < q ≤ 2` and `2^{q−1}` for `q > 2`.
pub fn beta(q: f64) -> f64 {
    if q <= 2.0 {
        (2.0 / (q - 1.0)).powf(1.0 / q)
    } else {
        2f64.powf((q - 1.0) / q)
    }
}

/// Explicit two-sided norm constants for a branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperConstants {
    /// `α` and `β` where defined (`1 < q < ∞`).
    #[serde(with = "crate::ext::opt")]
    pub alpha_q: Option<f64>,
    #[serde(with = "crate::ext::opt")]
    pub beta_q: Option<f64>,
    /// Index `i` of `α_i, β_i` when the branch is one of Laplace i–iv.
    pub index: Option<u8>,
    #[serde(with = "crate::ext::opt")]
    pub lower: Option<f64>,
    #[serde(with = "crate::ext::opt")]
    pub upper: Option<f64>,
    /// Criterion multiplied by `lower` / `upper` in the bracket.
    pub lower_criterion: Option<String>,
    pub upper_criterion: Option<String>,
    /// `2^{−λ}` for `p = q = 1`.
    #[serde(with = "crate::ext::opt")]
    pub laplace_l1_lower: Option<f64>,
    /// No explicit value is known; always absent.
    #[serde(with = "crate::ext::opt")]
    pub gamma_s: Option<f64>,
    /// The bracket is an equality (`lower = upper` on the same criterion).
    pub exact: bool,
    /// Only equivalence holds; constants are not explicit.
    pub unspecified: bool,
}

impl PaperConstants {
    fn unspecified(exps: &Exponents) -> Self {
        let (alpha_q, beta_q) = match exps.q {
            Exponent::Finite(q) if q > 1.0 => (Some(alpha(q)), Some(beta(q))),
            _ => (None, None),
        };
        PaperConstants {
            alpha_q,
            beta_q,
            index: None,
            lower: None,
            upper: None,
            lower_criterion: None,
            upper_criterion: None,
            laplace_l1_lower: None,
            gamma_s: None,
            exact: false,
            unspecified: true,
        }
    }

    fn bracket(exps: &Exponents, index: Option<u8>, lo: f64, lo_c: &str, hi: f64, hi_c: &str) -> Self {
        let mut c = PaperConstants::unspecified(exps);
        c.index = index;
        c.lower = Some(lo);
        c.upper = Some(hi);
        c.lower_criterion = Some(lo_c.into());
        c.upper_criterion = Some(hi_c.into());
        c.exact = lo == hi && lo_c == hi_c;
        c.unspecified = false;
        c
    }
}

/// `(α_i, β_i)` for Laplace branch `i ∈ 1..=4`.
pub fn alpha_beta(i: u8, exps: &Exponents) -> Result<(f64, f64)> {
    let case = case_of(exps, OperatorKind::Laplace);
    let want = match i {
        1 => Case::I,
        2 => Case::II,
        3 => Case::III,
        4 => Case::IV,
        _ => return Err(Error::BranchMismatch(format!("no constants with index {i}"))),
    };
    if case != want {
        return Err(Error::BranchMismatch(format!(
            "alpha_{i}/beta_{i} requested for Laplace-{case} (p = {}, q = {})",
            exps.p, exps.q
        )));
    }
    let lam = exps.lambda;
    Ok(match i {
        1 => {
            let q = exps.qf();
            let qc = exps.q_conj.expect("q > 1").value();
            (alpha(q) * q.powf(-2.0 / q), beta(q) * qc.powf(1.0 / exps.pc()))
        }
        2 => {
            let q = exps.qf();
            let pc = exps.pc();
            let r = exps.rf();
            if q == 1.0 {
                // ‖L‖ = B_p exactly.
                (1.0, 1.0)
            } else {
                let qc = exps.q_conj.expect("q > 1").value();
                (alpha(q) * (pc * q / r).powf(1.0 / qc) * q.powf(-1.0 / q), beta(q) * pc.powf(1.0 / qc))
            }
        }
        3 => {
            let (p, q, r) = (exps.pf(), exps.qf(), exps.rf());
            let pc = exps.pc();
            let qc = exps.q_ratio();
            (q.powf(-1.0 / q), p.powf(1.0 / p) * pc.powf(1.0 / qc) * q.powf(-2.0 / q) * r.powf(1.0 / r))
        }
        _ => {
            let q = exps.qf();
            (q.powf(-1.0 / q), lam.powf((1.0 - q) / q) * q.powf(-2.0 / q) * (1.0 - q).powf(-(1.0 - q) / q))
        }
    })
}

/// Constants for the regime; errors when the regime does not match `exps`.
pub fn constants(regime: &Regime, exps: &Exponents) -> Result<PaperConstants> {
    let case = case_of(exps, regime.kind);
    if case != regime.case {
        return Err(Error::BranchMismatch(format!(
            "regime {} does not match exponents (p = {}, q = {}) which select {}-{}",
            regime.tag(),
            exps.p,
            exps.q,
            regime.kind,
            case
        )));
    }
    if regime.kind != OperatorKind::Laplace {
        return Ok(PaperConstants::unspecified(exps));
    }
    let lam = exps.lambda;
    Ok(match case {
        Case::I => {
            let (a, b) = alpha_beta(1, exps)?;
            PaperConstants::bracket(exps, Some(1), a, "A_L", b, "A_L")
        }
        Case::II if exps.qf() == 1.0 => PaperConstants::bracket(exps, Some(2), 1.0, "B_p", 1.0, "B_p"),
        Case::II => {
            let (a, b) = alpha_beta(2, exps)?;
            PaperConstants::bracket(exps, Some(2), a, "B_L", b, "B_L")
        }
        Case::III => {
            let (a, b) = alpha_beta(3, exps)?;
            PaperConstants::bracket(exps, Some(3), a, "||B_q||_p'", b, "B_L")
        }
        Case::IV => {
            let (a, b) = alpha_beta(4, exps)?;
            PaperConstants::bracket(exps, Some(4), a, "B_q", b, "B_q'")
        }
        Case::V => {
            let q = exps.qf();
            if q == 1.0 {
                let mut c = PaperConstants::bracket(exps, None, 2f64.powf(-lam), "Bbar_q", 1.0, "Bbar_q");
                c.laplace_l1_lower = Some(2f64.powf(-lam));
                c
            } else {
                let f = q.powf(-1.0 / q);
                PaperConstants::bracket(exps, None, f, "B_q", f, "B_q")
            }
        }
        Case::Ext => match (exps.p, exps.q) {
            (Exponent::Infinite, Exponent::Infinite) => PaperConstants::bracket(exps, None, 1.0, "C_1", 1.0, "C_1"),
            (Exponent::Infinite, Exponent::Finite(1.0)) => {
                PaperConstants::bracket(exps, None, 1.0, "C_q=1", 1.0, "C_q=1")
            }
            (Exponent::Infinite, _) => PaperConstants::unspecified(exps),
            (Exponent::Finite(1.0), _) => PaperConstants::bracket(exps, None, 1.0, "C_inf", 1.0, "C_inf"),
            _ => PaperConstants::bracket(exps, None, 1.0, "C_p'", 1.0, "C_p'"),
        },
    })
}
