#![allow(dead_code)]

use lpq_core::weights::Piece;
use lpq_core::Weight;
use rand::Rng;

/// One to three adjacent power pieces `c t^a (ln(1+t))^l` on `[lo, hi]` with
/// `lo ∈ [lo_min, 1]` and `hi ≤ hi_max`, log-uniformly placed.
pub fn random_weight<R: Rng>(rng: &mut R, lo_min: f64, hi_max: f64) -> Weight {
    let lo = (rng.random_range(lo_min.ln()..0.0)).exp();
    let hi = (rng.random_range((lo * 2.0).ln()..hi_max.ln())).exp();
    let n = rng.random_range(1..=3);
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random_range(lo.ln()..hi.ln()).exp()).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let pieces = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let l = if rng.random_bool(0.25) { rng.random_range(0.0..1.0) } else { 0.0 };
            Piece::new(w[0], w[1], rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0), l)
        })
        .collect();
    Weight::piecewise(pieces).expect("valid random weight")
}
