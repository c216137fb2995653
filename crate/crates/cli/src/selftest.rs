//! Built-in closed-form corpus and oracle agreement suite.

use anyhow::{anyhow, Result};
use lpq_core::criteria::criterion_set;
use lpq_core::discretize::{build, compose_check, compose_x_grid, Grid};
use lpq_core::matrix::Matrix;
use lpq_core::normest::{
    bound_check_value, brute_force_norm, norm_op, norm_pq, span_extrapolate, BoundTolerances, NormOptions,
};
use lpq_core::{Exponent, Exponents, OperatorKind, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<String>,
}

const GRID: (f64, f64, usize) = (1e-4, 1e4, 64);

fn grid() -> Result<Grid> {
    Ok(Grid::log_grid(GRID.0, GRID.1, GRID.2)?)
}

fn within(label: &str, got: f64, want: f64, rel: f64) -> Result<String> {
    let err = (got - want).abs() / want.abs();
    let msg = format!("{label} = {got:.8} (expected {want:.8}, rel err {err:.2e}, tol {rel:.0e})");
    if err <= rel {
        Ok(msg)
    } else {
        Err(anyhow!(msg))
    }
}

/// Span-extrapolated norm of `kind` with unit weights, `λ = 1`, `p = q = 2`.
fn classical(kind: OperatorKind, want: f64) -> Result<String> {
    let exps = Exponents::derive(1.0, 2.0, 2.0)?;
    let one = Weight::constant(1.0);
    let g = grid()?;
    let op = build(kind, &exps, &one, &one, &g, &g);
    let sp = span_extrapolate(&op, &NormOptions::default())?;
    within("norm", sp.extrapolated, want, 0.02)
}

fn laplace_sqrt_pi() -> Result<String> {
    classical(OperatorKind::Laplace, PI.sqrt())
}

fn stieltjes_pi() -> Result<String> {
    classical(OperatorKind::Stieltjes, PI)
}

fn hardy_two() -> Result<String> {
    classical(OperatorKind::Hardy, 2.0)
}

fn unit_criterion(kind: OperatorKind, tag: &str) -> Result<String> {
    let exps = Exponents::derive(1.0, 2.0, 2.0)?;
    let one = Weight::constant(1.0);
    let cs = criterion_set(kind, &exps, &one, &one)?;
    let v = cs.value(tag).ok_or_else(|| anyhow!("{tag} missing"))?;
    within(tag, v, 1.0, 1e-6)
}

fn a_l_unit() -> Result<String> {
    unit_criterion(OperatorKind::Laplace, "A_L")
}

fn a_s_unit() -> Result<String> {
    unit_criterion(OperatorKind::Stieltjes, "A_S")
}

fn laplace_bracket() -> Result<String> {
    let exps = Exponents::derive(1.0, 2.0, 2.0)?;
    let one = Weight::constant(1.0);
    let cs = criterion_set(OperatorKind::Laplace, &exps, &one, &one)?;
    let g = grid()?;
    let op = build(OperatorKind::Laplace, &exps, &one, &one, &g, &g);
    let est = span_extrapolate(&op, &NormOptions::default())?.extrapolated;
    let b = bound_check_value(est, &cs, &BoundTolerances::default());
    let (lo, hi) =
        (b.lower.ok_or_else(|| anyhow!("no lower bound"))?, b.upper.ok_or_else(|| anyhow!("no upper bound"))?);
    let msg = format!("{:.5} <= {est:.5} <= {:.5}", lo.bound, hi.bound);
    if lo.ok && hi.ok {
        Ok(msg)
    } else {
        Err(anyhow!(msg))
    }
}

fn exact_column() -> Result<String> {
    let exps = Exponents::derive(1.0, 1.0, 2.0)?;
    let v = Weight::indicator(1.0, 2.0);
    let g = Grid::log_grid_with_breaks(GRID.0, GRID.1, GRID.2, &v.breakpoints())?;
    let op = build(OperatorKind::Laplace, &exps, &v, &v, &g, &g);
    let est = norm_op(&op, &NormOptions::default())?;
    let (lo, hi) = (est.lower_bound - 1e-3, est.lower_bound + 1e-3);
    let want = 0.5f64.sqrt();
    let msg = format!("norm_pq = {:.8}, closed form {want:.8}", est.lower_bound);
    if (lo..=hi).contains(&want) {
        Ok(msg)
    } else {
        Err(anyhow!(msg))
    }
}

fn compose() -> Result<String> {
    let exps = Exponents::derive(1.0, 2.0, 2.0)?;
    let one = Weight::constant(1.0);
    let gy = grid()?;
    let gx = compose_x_grid(&gy, 1.0, GRID.2)?;
    let dev = compose_check(&exps, &one, &one, &gy, &gx);
    let msg = format!("max relative deviation {dev:.2e}");
    if dev < 1e-4 {
        Ok(msg)
    } else {
        Err(anyhow!(msg))
    }
}

fn oracle() -> Result<String> {
    let ps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY].map(Exponent::from);
    let qs = [0.5, 1.0, 2.0, 3.0, f64::INFINITY].map(Exponent::from);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let (p, q) = (ps[i % 5], qs[(i / 5) % 5]);
        let rows = rng.random_range(1..=4);
        let cols = rng.random_range(1..=3);
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(0.0..1.0)).collect();
        let m = Matrix::from_vec(rows, cols, data)?;
        let quasi = q.finite().is_some_and(|q| q < 1.0);
        let opts = NormOptions { restarts: if quasi { 32 } else { 8 }, ..NormOptions::default() };
        let est = norm_pq(&m, p, q, &opts)?.lower_bound;
        let bf = brute_force_norm(&m, p, q, 200)?;
        let gap = if quasi { bf - est } else { (est - bf).abs() };
        worst = worst.max(gap);
        if gap > if quasi { 1e-3 } else { 1e-4 } {
            return Err(anyhow!("matrix {i} (p = {p}, q = {q}): norm_pq {est:.8} vs brute force {bf:.8}"));
        }
    }
    Ok(format!("200 matrices agree (worst gap {worst:.1e})"))
}

pub const CHECKS: &[Check] = &[
    Check { name: "laplace norm = sqrt(pi)", run: laplace_sqrt_pi },
    Check { name: "stieltjes norm = pi", run: stieltjes_pi },
    Check { name: "hardy norm = 2", run: hardy_two },
    Check { name: "A_L = 1 for v = 1", run: a_l_unit },
    Check { name: "A_S = 1 for v = w = 1", run: a_s_unit },
    Check { name: "laplace two-sided bracket", run: laplace_bracket },
    Check { name: "p = 1 column formula", run: exact_column },
    Check { name: "compose_check", run: compose },
    Check { name: "oracle agreement", run: oracle },
];

/// Prints one line per check and returns the exit code.
pub fn run_all() -> i32 {
    let mut failed = 0;
    println!("{:<28} {:<6} {:>8}  detail", "check", "result", "seconds");
    for c in CHECKS {
        let t = Instant::now();
        let r = (c.run)();
        let secs = t.elapsed().as_secs_f64();
        let (status, detail) = match r {
            Ok(d) => ("pass", d),
            Err(e) => {
                failed += 1;
                ("FAIL", format!("{e:#}"))
            }
        };
        println!("{:<28} {status:<6} {secs:>8.2}  {detail}", c.name);
    }
    println!("{} of {} checks passed", CHECKS.len() - failed, CHECKS.len());
    i32::from(failed > 0)
}
