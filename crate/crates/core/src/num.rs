//! Small numeric helpers shared across modules.

/// `Π base_i^{exp_i}` evaluated in log space with the conventions
/// `0^0 = ∞^0 = 1` and `0 · ∞ = 0` for the product.
pub fn powprod(factors: &[(f64, f64)]) -> f64 {
    let mut log_sum = 0.0;
    let mut has_zero = false;
    let mut has_inf = false;
    for &(b, e) in factors {
        if e == 0.0 {
            continue;
        }
        if b.is_nan() || e.is_nan() || b < 0.0 {
            return f64::NAN;
        }
        if b == 0.0 {
            if e > 0.0 {
                has_zero = true;
            } else {
                has_inf = true;
            }
        } else if b.is_infinite() {
            if e > 0.0 {
                has_inf = true;
            } else {
                has_zero = true;
            }
        } else {
            log_sum += e * b.ln();
        }
    }
    if has_zero {
        0.0
    } else if has_inf {
        f64::INFINITY
    } else {
        log_sum.exp()
    }
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `n` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Relative difference `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 || a == b {
        0.0
    } else {
        (a - b).abs() / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powprod_conventions() {
        assert_eq!(powprod(&[(0.0, 1.0), (f64::INFINITY, 1.0)]), 0.0);
        assert_eq!(powprod(&[(0.0, -1.0)]), f64::INFINITY);
        assert_eq!(powprod(&[(0.0, 0.0), (2.0, 1.0)]), 2.0);
        assert!((powprod(&[(4.0, 0.5), (8.0, 1.0 / 3.0)]) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 3.0, 5.0];
        assert!((slope(&x, &y) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn geomspace_endpoints_exact() {
        let g = geomspace(1e-3, 1e3, 7);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1e3);
        assert!((g[3] - 1.0).abs() < 1e-14);
    }
}
