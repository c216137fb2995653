//! Nyström discretizations of the Laplace, Stieltjes and Hardy operators on
//! logarithmic grids with trapezoid-in-log quadrature.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::params::{Exponent, Exponents, OperatorKind};
use crate::weights::Weight;
use serde::{Deserialize, Serialize};

/// Relative offset of the node pair inserted around a weight breakpoint.
const BREAK_OFFSET: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Geometric nodes from `t_min` to `t_max`, `round(decades · ppd) + 1` of them.
    pub fn log_grid(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Grid> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) || points_per_decade == 0 {
            return Err(Error::DegenerateGrid(format!(
                "span [{t_min}, {t_max}] with {points_per_decade} points per decade"
            )));
        }
        let decades = (t_max / t_min).log10();
        let n = ((decades * points_per_decade as f64).round() as usize).max(1) + 1;
        Grid::from_nodes(crate::num::geomspace(t_min, t_max, n))
    }

    /// Trapezoid-in-log weights for arbitrary strictly increasing nodes; a
    /// single node gets weight 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Grid> {
        if nodes.is_empty() {
            return Err(Error::DegenerateGrid("no nodes".into()));
        }
        if nodes.iter().any(|t| !(*t > 0.0 && t.is_finite())) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateGrid("nodes must be positive, finite and strictly increasing".into()));
        }
        let n = nodes.len();
        if n == 1 {
            return Ok(Grid { nodes, weights: vec![1.0] });
        }
        let u: Vec<f64> = nodes.iter().map(|t| t.ln()).collect();
        let weights = (0..n)
            .map(|j| {
                let left = if j > 0 { u[j] - u[j - 1] } else { 0.0 };
                let right = if j + 1 < n { u[j + 1] - u[j] } else { 0.0 };
                nodes[j] * 0.5 * (left + right)
            })
            .collect();
        Ok(Grid { nodes, weights })
    }

    /// The log grid with a node pair `b(1 ∓ 1e-10)` around each breakpoint
    /// inside the span, so each side of a jump is sampled by its own value.
    pub fn log_grid_with_breaks(t_min: f64, t_max: f64, points_per_decade: usize, breaks: &[f64]) -> Result<Grid> {
        let base = Grid::log_grid(t_min, t_max, points_per_decade)?;
        let inside: Vec<f64> = breaks.iter().copied().filter(|b| *b > t_min && *b < t_max).collect();
        if inside.is_empty() {
            return Ok(base);
        }
        let mut nodes: Vec<f64> =
            base.nodes.into_iter().filter(|t| inside.iter().all(|b| (t / b - 1.0).abs() > 1e-8)).collect();
        for b in inside {
            nodes.push(b * (1.0 - BREAK_OFFSET));
            nodes.push(b * (1.0 + BREAK_OFFSET));
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        Grid::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    /// Whether the node spacing is log-uniform to relative `1e-12`.
    pub fn is_log_uniform(&self) -> bool {
        let u: Vec<f64> = self.nodes.iter().map(|t| t.ln()).collect();
        if u.len() < 3 {
            return true;
        }
        let h = u[1] - u[0];
        u.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(u[0].abs().max(1.0)) * 16.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteKind {
    Laplace,
    Stieltjes,
    Hardy,
    HardyDual,
    Custom,
}

impl From<OperatorKind> for DiscreteKind {
    fn from(k: OperatorKind) -> Self {
        match k {
            OperatorKind::Laplace => DiscreteKind::Laplace,
            OperatorKind::Stieltjes => DiscreteKind::Stieltjes,
            OperatorKind::Hardy => DiscreteKind::Hardy,
            OperatorKind::HardyDual => DiscreteKind::HardyDual,
        }
    }
}

/// `kernel[i][j] = w(x_i) k(x_i, y_j) v(y_j)`; `matrix` additionally carries
/// the quadrature scaling `σ_i^{1/q} · ρ_j^{1/p′}` so that its `ℓ^p → ℓ^q`
/// norm approximates the `L^p → L^q` norm.
#[derive(Clone, Debug)]
pub struct DiscretizedOperator {
    pub kind: DiscreteKind,
    pub exps: Exponents,
    pub source: Grid,
    pub target: Grid,
    pub kernel: Matrix,
    pub matrix: Matrix,
}

fn scale_factor(weight: f64, s: Exponent) -> f64 {
    match s {
        Exponent::Infinite => 1.0,
        Exponent::Finite(x) => weight.powf(1.0 / x),
    }
}

fn scaled(kernel: &Matrix, exps: &Exponents, source: &Grid, target: &Grid) -> Matrix {
    let rs: Vec<f64> = source.weights.iter().map(|&r| scale_factor(r, exps.p_conj)).collect();
    let ss: Vec<f64> = target.weights.iter().map(|&s| scale_factor(s, exps.q)).collect();
    Matrix::from_fn(kernel.rows(), kernel.cols(), |i, j| ss[i] * kernel.get(i, j) * rs[j])
}

impl DiscretizedOperator {
    /// An operator from an explicit raw kernel; quadrature weights come from the grids.
    pub fn custom(exps: Exponents, source: Grid, target: Grid, kernel: Matrix) -> Result<DiscretizedOperator> {
        if kernel.rows() != target.len() || kernel.cols() != source.len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel {}x{} for grids {}x{}",
                kernel.rows(),
                kernel.cols(),
                target.len(),
                source.len()
            )));
        }
        let matrix = scaled(&kernel, &exps, &source, &target);
        Ok(DiscretizedOperator { kind: DiscreteKind::Custom, exps, source, target, kernel, matrix })
    }

    /// `(Tf)(x_i) ≈ Σ_j kernel_ij ρ_j f_j`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = f.iter().zip(&self.source.weights).map(|(a, r)| a * r).collect();
        self.kernel.mul_vec(&g)
    }

    /// The same operator with the quadrature scaling of other exponents.
    pub fn with_exponents(&self, exps: Exponents) -> DiscretizedOperator {
        let matrix = scaled(&self.kernel, &exps, &self.source, &self.target);
        DiscretizedOperator { exps, matrix, ..self.clone() }
    }
}

/// Assembles the discretization of `kind` with weights `v` (inner) and `w`
/// (outer; ignored for Laplace). Weights are sampled by the average of their
/// one-sided limits.
pub fn build(
    kind: OperatorKind,
    exps: &Exponents,
    v: &Weight,
    w: &Weight,
    source: &Grid,
    target: &Grid,
) -> DiscretizedOperator {
    let lam = exps.lambda;
    let ys = source.nodes();
    let xs = target.nodes();
    let vy: Vec<f64> = ys.iter().map(|&y| v.eval_mid(y)).collect();
    let yl: Vec<f64> = ys.iter().map(|&y| y.powf(lam)).collect();
    let xl: Vec<f64> = xs.iter().map(|&x| x.powf(lam)).collect();
    let wx: Vec<f64> = match kind {
        OperatorKind::Laplace => vec![1.0; xs.len()],
        _ => xs.iter().map(|&x| w.eval_mid(x)).collect(),
    };
    let kernel = Matrix::from_fn(xs.len(), ys.len(), |i, j| {
        if vy[j] == 0.0 || wx[i] == 0.0 {
            return 0.0;
        }
        let k = match kind {
            OperatorKind::Laplace => (-xs[i] * yl[j]).exp(),
            OperatorKind::Stieltjes => 1.0 / (xl[i] + yl[j]),
            OperatorKind::Hardy => {
                if ys[j] <= xs[i] {
                    1.0 / xl[i]
                } else {
                    0.0
                }
            }
            OperatorKind::HardyDual => {
                if ys[j] > xs[i] {
                    1.0 / yl[j]
                } else {
                    0.0
                }
            }
        };
        wx[i] * k * vy[j]
    });
    let matrix = scaled(&kernel, exps, source, target);
    DiscretizedOperator {
        kind: kind.into(),
        exps: *exps,
        source: source.clone(),
        target: target.clone(),
        kernel,
        matrix,
    }
}

/// Zeroes source columns outside `[a, b]` and target rows outside `[c, d]`.
pub fn truncate(op: &DiscretizedOperator, source_window: (f64, f64), target_window: (f64, f64)) -> DiscretizedOperator {
    let keep_col: Vec<bool> = op.source.nodes().iter().map(|&y| y >= source_window.0 && y <= source_window.1).collect();
    let keep_row: Vec<bool> = op.target.nodes().iter().map(|&x| x >= target_window.0 && x <= target_window.1).collect();
    let mask = |m: &Matrix| {
        Matrix::from_fn(m.rows(), m.cols(), |i, j| if keep_row[i] && keep_col[j] { m.get(i, j) } else { 0.0 })
    };
    DiscretizedOperator { kernel: mask(&op.kernel), matrix: mask(&op.matrix), ..op.clone() }
}

/// Target grid matching `source`: the Laplace image of sources in
/// `[lo, hi]` lives on `x ∈ [hi^{−λ}, lo^{−λ}]`, the other kernels compare
/// `x` with `y` directly and reuse the source nodes.
pub fn target_grid(kind: OperatorKind, lambda: f64, source: &Grid, points_per_decade: usize) -> Result<Grid> {
    if kind != OperatorKind::Laplace || lambda == 1.0 {
        return Ok(source.clone());
    }
    let (lo, hi) = source.span();
    Grid::log_grid(hi.powf(-lambda), lo.powf(-lambda), points_per_decade)
}

/// An x-grid resolving `e^{−x(y^λ+z^λ)}` for every node pair of `grid_y`:
/// truncation below contributes relative `< 1e-7`, above `< e^{−50}`.
pub fn compose_x_grid(grid_y: &Grid, lambda: f64, points_per_decade: usize) -> Result<Grid> {
    let (lo, hi) = grid_y.span();
    let s_min = 2.0 * lo.powf(lambda);
    let s_max = 2.0 * hi.powf(lambda);
    Grid::log_grid(1e-7 / s_max, 50.0 / s_min, points_per_decade)
}

/// Maximum relative deviation between the composition `L_w* L_v` (with
/// x-quadrature on `grid_x`) and the direct Stieltjes matrix on `grid_y`.
pub fn compose_check(exps: &Exponents, v: &Weight, w: &Weight, grid_y: &Grid, grid_x: &Grid) -> f64 {
    let lam = exps.lambda;
    let ys = grid_y.nodes();
    let xs = grid_x.nodes();
    let sx = grid_x.weights();
    let vy: Vec<f64> = ys.iter().map(|&y| v.eval_mid(y)).collect();
    let wy: Vec<f64> = ys.iter().map(|&y| w.eval_mid(y)).collect();
    let yl: Vec<f64> = ys.iter().map(|&y| y.powf(lam)).collect();
    // E[k][i] = e^{−x_k y_i^λ}, stored by x rows.
    let e = Matrix::from_fn(xs.len(), ys.len(), |k, i| (-xs[k] * yl[i]).exp());
    let et = e.transpose();
    let rows = crate::par::map_range(ys.len(), |i| {
        let mut worst = 0.0f64;
        let ei = et.row(i);
        for j in 0..ys.len() {
            let scale = wy[i] * vy[j];
            if scale == 0.0 {
                continue;
            }
            let ej = et.row(j);
            let composed: f64 = (0..xs.len()).map(|k| sx[k] * ei[k] * ej[k]).sum::<f64>() * scale;
            let direct = scale / (yl[i] + yl[j]);
            worst = worst.max(((composed - direct) / direct).abs());
        }
        worst
    });
    rows.into_iter().fold(0.0, f64::max)
}
