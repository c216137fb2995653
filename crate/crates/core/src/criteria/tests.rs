use super::*;
use crate::params::Exponents;
use crate::quadrature::LimitKind;

fn ex(lambda: f64, p: f64, q: f64) -> Exponents {
    Exponents::derive(lambda, p, q).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn limits(c: &CriterionCurve) -> (LimitKind, LimitKind) {
    let l = c.limits.as_ref().unwrap();
    (l.0.kind, l.1.kind)
}

const FULL: (f64, f64) = (0.0, f64::INFINITY);

#[test]
fn laplace_a_indicator_at_origin() {
    let (a, d) = laplace_a(&ex(1.0, 2.0, 2.0), &Weight::indicator(0.0, 1.0), FULL).unwrap();
    assert!(close(a.sup.value, 1.0, 1e-9), "{}", a.sup.value);
    let (lo, hi) = limits(&a);
    assert!(matches!(lo, LimitKind::Positive { c } if close(c, 1.0, 1e-6)), "{lo:?}");
    assert_eq!(hi, LimitKind::Zero);
    assert_eq!(d.value, 0.0);
}

#[test]
fn laplace_a_critical_power_is_constant() {
    // λ = 2, p = q = 2: v = t^{1/2}, V_0(t) = t²/2, A_L(t) = 2^{-1/2}.
    let c = laplace_a(&ex(2.0, 2.0, 2.0), &Weight::power(1.0, 0.5), FULL).unwrap().0;
    for t in [1e-3, 1.0, 1e4] {
        assert!(close(c.eval(t).unwrap(), 0.5f64.sqrt(), 1e-12));
    }
    let (lo, hi) = limits(&c);
    assert!(matches!(lo, LimitKind::Positive { .. }) && matches!(hi, LimitKind::Positive { .. }));
}

#[test]
fn laplace_a_on_bounded_interval_has_d_term() {
    // V_0(2) = 1 for v = χ_[0,1]; D = 2^{-1/2}.
    let (_, d) = laplace_a(&ex(1.0, 2.0, 2.0), &Weight::indicator(0.0, 1.0), (0.0, 2.0)).unwrap();
    assert!(close(d.value, 0.5f64.sqrt(), 1e-14));
}

#[test]
fn laplace_b_forms_agree() {
    // p = 4, q = 2: r = 4.
    let e = ex(1.0, 4.0, 2.0);
    let b = laplace_b(&e, &Weight::indicator(0.0, 1.0), FULL).unwrap();
    let bl = b.iter().find(|c| c.name == "B_L").unwrap();
    assert!(bl.value.is_finite() && bl.value > 0.0);
    assert!(bl.form_discrepancy().unwrap() < 1e-7, "{:?}", bl);
}

#[test]
fn laplace_bp_closed_form() {
    // q = 1, p = 2, λ = 1, v = χ_[1,2]: B_p² = ∫_1^2 y^{-2} = 1/2.
    let b = laplace_b(&ex(1.0, 2.0, 1.0), &Weight::indicator(1.0, 2.0), FULL).unwrap();
    let bp = b.iter().find(|c| c.name == "B_p").unwrap();
    assert!(close(bp.value, 0.5f64.sqrt(), 1e-12));
}

#[test]
fn laplace_bq_family() {
    // p = 1, q = 1, λ = 1, v = χ_[0,1]: B̄_q(t) = 1/t on (0,1), unbounded.
    let e = laplace_bq(&ex(1.0, 1.0, 1.0), &Weight::indicator(0.0, 1.0), FULL).unwrap();
    assert_eq!(e[0].value(), f64::INFINITY);
    // v = χ_[1,2]: sup B_q = 1 at t → 1+.
    let e = laplace_bq(&ex(1.0, 1.0, 1.0), &Weight::indicator(1.0, 2.0), FULL).unwrap();
    assert!(close(e[0].value(), 1.0, 1e-6), "{}", e[0].value());
    let bbar = e[1].as_curve().unwrap();
    assert_eq!(limits(bbar), (LimitKind::Zero, LimitKind::Zero));
    // q = 1/2 adds B_q'.
    let e = laplace_bq(&ex(1.0, 1.0, 0.5), &Weight::indicator(1.0, 2.0), FULL).unwrap();
    assert_eq!(e.len(), 3);
    assert!(e[2].value().is_finite());
}

#[test]
fn extremes_closed_forms() {
    let chi = Weight::indicator(0.0, 1.0);
    let c1 = laplace_extreme(Extreme::C1, &ex(1.0, f64::INFINITY, f64::INFINITY), &chi).unwrap();
    assert!(close(c1.value, 1.0, 1e-14));
    let ci = laplace_extreme(Extreme::CInf, &ex(1.0, 1.0, f64::INFINITY), &chi).unwrap();
    assert_eq!(ci.value, 1.0);
    let cp = laplace_extreme(Extreme::CpConj, &ex(1.0, 2.0, f64::INFINITY), &chi).unwrap();
    assert!(close(cp.value, 1.0, 1e-14));
    let cq1 = laplace_extreme(Extreme::CqEq1, &ex(1.0, f64::INFINITY, 1.0), &chi).unwrap();
    assert_eq!(cq1.value, f64::INFINITY);
    let cq = laplace_extreme(Extreme::CqGt1, &ex(1.0, f64::INFINITY, 2.0), &Weight::indicator(1.0, 2.0)).unwrap();
    assert!(close(cq.value, (1.0 - 2f64.ln()).sqrt(), 1e-8), "{}", cq.value);
}

#[test]
fn stieltjes_a_unit_weights() {
    let (a, extra) = stieltjes_a(&ex(1.0, 2.0, 2.0), &Weight::constant(1.0), &Weight::constant(1.0)).unwrap();
    assert!(extra.is_empty());
    assert!(close(a.sup.value, 1.0, 1e-6), "{}", a.sup.value);
    for t in [1e-4, 1.0, 1e5] {
        assert!(close(a.eval(t).unwrap(), 1.0, 1e-8));
    }
}

#[test]
fn stieltjes_a_compact_support() {
    let chi = Weight::indicator(1.0, 2.0);
    let (a, _) = stieltjes_a(&ex(1.0, 2.0, 2.0), &chi, &chi).unwrap();
    assert!(a.sup.value.is_finite() && a.sup.value > 0.0);
    assert_eq!(limits(&a), (LimitKind::Zero, LimitKind::Zero));
    // Direct quadrature at t = 1: (∫_1^2 (x+1)^{-2})^{1/2} twice: 1/2 - 1/3 = 1/6.
    assert!(close(a.eval(1.0).unwrap(), 1.0 / 6.0, 1e-9));
}

#[test]
fn stieltjes_a_zero_weight() {
    let (a, _) = stieltjes_a(&ex(1.0, 2.0, 2.0), &Weight::zero(), &Weight::constant(1.0)).unwrap();
    assert_eq!(a.sup.value, 0.0);
}

#[test]
fn stieltjes_a1s() {
    // p = 1, q = 2, v = w = χ_[1,2], λ = 1:
    // A_1S(t) = t (1/(1+t) - 1/(2+t))^{1/2} / (t + 1).
    let chi = Weight::indicator(1.0, 2.0);
    let (c, vals) = stieltjes_a(&ex(1.0, 1.0, 2.0), &chi, &chi).unwrap();
    let f = |t: f64| t * (1.0 / (1.0 + t) - 1.0 / (2.0 + t)).sqrt() / (t + 1.0);
    for t in [0.3, 1.0, 5.0] {
        assert!(close(c.eval(t).unwrap(), f(t), 1e-6), "{t}: {} vs {}", c.eval(t).unwrap(), f(t));
    }
    let brute = (1..20000).map(|k| f(k as f64 * 1e-3)).fold(0.0, f64::max);
    assert!(close(vals[0].value, brute, 1e-5));
}

#[test]
fn stieltjes_lambda_nested_against_closed_inner() {
    let chi = Weight::indicator(1.0, 2.0);
    let vals = stieltjes_b(&ex(1.0, 2.0, 1.0), &chi, &chi).unwrap();
    assert_eq!(vals[0].name, "Lambda");
    let g = |t: f64| ((2.0 + t) / (1.0 + t)).ln().powi(2);
    let n = 2000;
    let h = 1.0 / n as f64;
    let simpson: f64 = (0..=n)
        .map(|k| {
            let wgt = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            wgt * g(1.0 + k as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    assert!(close(vals[0].value, simpson.sqrt(), 1e-9), "{} vs {}", vals[0].value, simpson.sqrt());
}

#[test]
fn stieltjes_b_zero_weights() {
    let e = ex(1.0, 4.0, 2.0);
    let one = Weight::constant(1.0);
    assert_eq!(stieltjes_b(&e, &Weight::zero(), &one).unwrap()[0].value, 0.0);
    assert_eq!(stieltjes_b(&e, &Weight::indicator(1.0, 2.0), &Weight::zero()).unwrap()[0].value, 0.0);
}

#[test]
fn hardy_a_unit() {
    let e = ex(1.0, 2.0, 2.0);
    let psi = Weight::constant(1.0).times_power(-1.0);
    let out = hardy_criteria(&e, &Weight::constant(1.0), &psi, FULL, HardyDirection::Forward).unwrap();
    let a = out[0].as_curve().unwrap();
    assert_eq!(a.name, "A");
    assert!(close(a.sup.value, 1.0, 1e-9));
}

#[test]
fn hardy_b_closed_form() {
    // p = 4, q = 2, λ = 1, φ = χ_[0,1], ψ = x^{-1}: B^4 = ∫_0^1 1 + ∫_1^∞ t^{-3} = 3/2.
    let e = ex(1.0, 4.0, 2.0);
    let psi = Weight::constant(1.0).times_power(-1.0);
    let out = hardy_criteria(&e, &Weight::indicator(0.0, 1.0), &psi, FULL, HardyDirection::Forward).unwrap();
    assert_eq!(out[0].name(), "B");
    assert!(close(out[0].value(), 1.5f64.powf(0.25), 1e-8), "{}", out[0].value());
}

#[test]
fn hardy_zero_inner_weight() {
    let e = ex(1.0, 2.0, 2.0);
    let out = hardy_criteria(&e, &Weight::zero(), &Weight::constant(1.0), FULL, HardyDirection::Dual).unwrap();
    assert_eq!(out[0].name(), "A*");
    assert_eq!(out[0].value(), 0.0);
}

#[test]
fn hardy_form_unit_weights() {
    let one = Weight::constant(1.0);
    let out = stieltjes_hardy_form(&ex(1.0, 2.0, 2.0), &one, &one).unwrap();
    for e in &out {
        let c = e.as_curve().unwrap();
        let expect = if c.name == "A_H+A_H*" { 2.0 } else { 1.0 };
        assert!(close(c.sup.value, expect, 1e-8), "{}: {}", c.name, c.sup.value);
        let (lo, hi) = limits(c);
        assert!(matches!(lo, LimitKind::Positive { .. }) && matches!(hi, LimitKind::Positive { .. }));
    }
}

#[test]
fn hardy_form_b_forms_agree() {
    let out =
        stieltjes_hardy_form(&ex(1.0, 4.0, 2.0), &Weight::indicator(0.0, 1.0), &Weight::indicator(0.5, 3.0)).unwrap();
    for e in &out {
        let v = e.as_value().unwrap();
        assert!(v.value > 0.0 && v.value.is_finite());
        assert!(v.form_discrepancy().unwrap() < 1e-7, "{v:?}");
    }
}

#[test]
fn stieltjes_p1_compact_support() {
    let chi = Weight::indicator(1.0, 2.0);
    let out = stieltjes_p1(&ex(1.0, 1.0, 2.0), &chi, &chi).unwrap();
    let get = |n: &str| out.iter().find(|e| e.name() == n).unwrap();
    assert!(close(get("S_H").value(), 0.5f64.sqrt(), 1e-6), "{}", get("S_H").value());
    assert!(close(get("S_H*").value(), 0.5, 1e-6), "{}", get("S_H*").value());
    for n in ["S_a", "S_b"] {
        let Entry::Sequence(s) = get(n) else { panic!() };
        assert_eq!(s.limit.kind, LimitKind::Zero, "{n}");
    }
}

#[test]
fn stieltjes_p1_unit_weights_unbounded() {
    let one = Weight::constant(1.0);
    let out = stieltjes_p1(&ex(1.0, 1.0, 2.0), &one, &one).unwrap();
    assert_eq!(out[0].value(), f64::INFINITY);
}

#[test]
fn double_norm_laplace() {
    let m = double_norm(&ex(1.0, 2.0, 2.0), KernelKind::Laplace, &Weight::constant(1.0), &Weight::zero(), (1.0, 2.0))
        .unwrap();
    assert!(close(m.value.value, (2f64.ln() / 2.0).sqrt(), 1e-8), "{}", m.value.value);
    assert!(close(m.bound.unwrap(), 0.5f64.sqrt(), 1e-14));
    let z = double_norm(&ex(1.0, 2.0, 2.0), KernelKind::Laplace, &Weight::zero(), &Weight::zero(), (1.0, 2.0)).unwrap();
    assert_eq!(z.value.value, 0.0);
}

#[test]
fn double_norm_stieltjes() {
    // ∫_1^2∫_1^2 (x+y)^{-2} = ln(9/8); cross-checked by a 2-D midpoint sum.
    let chi = Weight::indicator(1.0, 2.0);
    let m = double_norm(&ex(1.0, 2.0, 2.0), KernelKind::Stieltjes, &chi, &chi, (1.0, 2.0)).unwrap();
    let n = 400;
    let h = 1.0 / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (1.0 + (i as f64 + 0.5) * h, 1.0 + (j as f64 + 0.5) * h);
            s += h * h / (x + y).powi(2);
        }
    }
    assert!(close(m.value.value, s.sqrt(), 1e-5));
    assert!(close(m.value.value, (9f64 / 8.0).ln().sqrt(), 1e-9));
}

#[test]
fn verdict_laplace_corpus() {
    let e = ex(1.0, 2.0, 2.0);
    let one = Weight::constant(1.0);
    let cs = criterion_set(OperatorKind::Laplace, &e, &Weight::indicator(0.0, 1.0), &one).unwrap();
    let v = compactness_verdict(&cs).unwrap();
    assert_eq!((v.bounded, v.compact), (Answer::Yes, Answer::No));
    let cs = criterion_set(OperatorKind::Laplace, &e, &Weight::indicator(1.0, 2.0), &one).unwrap();
    let v = compactness_verdict(&cs).unwrap();
    assert_eq!((v.bounded, v.compact), (Answer::Yes, Answer::Yes));
    let cs = criterion_set(OperatorKind::Laplace, &e, &one, &one).unwrap();
    let v = compactness_verdict(&cs).unwrap();
    assert_eq!((v.bounded, v.compact), (Answer::Yes, Answer::No));
    let cs = criterion_set(OperatorKind::Laplace, &e, &Weight::power(1.0, 0.5), &one).unwrap();
    let v = boundedness_verdict(&cs).unwrap();
    assert_eq!((v.bounded, v.compact), (Answer::No, Answer::No));
}

#[test]
fn verdict_stieltjes() {
    let one = Weight::constant(1.0);
    let cs = criterion_set(OperatorKind::Stieltjes, &ex(1.0, 2.0, 2.0), &one, &one).unwrap();
    let v = compactness_verdict(&cs).unwrap();
    assert_eq!((v.bounded, v.compact), (Answer::Yes, Answer::No));
    let cs = criterion_set(OperatorKind::Stieltjes, &ex(1.0, 1.0, 2.0), &one, &one).unwrap();
    let v = compactness_verdict(&cs).unwrap();
    assert_eq!(v.bounded, Answer::No);
    let chi = Weight::indicator(1.0, 2.0);
    let cs = criterion_set(OperatorKind::Stieltjes, &ex(1.0, 1.0, 2.0), &chi, &chi).unwrap();
    let v = compactness_verdict(&cs).unwrap();
    assert_eq!((v.bounded, v.compact), (Answer::Yes, Answer::Yes));
}

#[test]
fn incomplete_set_rejected() {
    let one = Weight::constant(1.0);
    let mut cs = criterion_set(OperatorKind::Laplace, &ex(1.0, 2.0, 2.0), &one, &one).unwrap();
    cs.entries.clear();
    assert!(boundedness_verdict(&cs).is_err());
}

#[test]
fn tail_power_no_cancellation() {
    let t: f64 = 2.0 * (1.0 - 1e-12);
    let direct = t.powf(-1.0) - 0.5;
    assert!(close(tail_power(t, 2.0, 1.0), direct, 1e-3));
    assert_eq!(tail_power(3.0, 2.0, 1.0), 0.0);
    assert_eq!(tail_power(4.0, f64::INFINITY, 1.0), 0.25);
}
