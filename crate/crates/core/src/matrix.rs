//! Dense row-major matrices and the vector norms used by the estimators.

use crate::error::{Error, Result};
use crate::par;
use crate::params::Exponent;
use serde::{Deserialize, Serialize};

/// Rows at or above this count are processed in parallel.
const PAR_ROWS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Matrix::from_vec(r, c, rows.concat())
    }

    /// Entries `f(i, j)`, assembled by rows.
    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Matrix
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let mut data = vec![0.0; rows * cols];
        par::for_each_row(&mut data, cols, |i, row| {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        });
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| *x >= 0.0)
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in mul_vec");
        let dot = |i: usize| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        if self.rows >= PAR_ROWS {
            par::map_range(self.rows, dot)
        } else {
            (0..self.rows).map(dot).collect()
        }
    }

    /// `Mᵀ M`, symmetric.
    pub fn gram(&self) -> Matrix {
        let t = self.transpose();
        Matrix::from_fn(self.cols, self.cols, |i, j| t.row(i).iter().zip(t.row(j)).map(|(a, b)| a * b).sum())
    }

    /// Dense binary layout: magic `LPQOP1`, rows and cols as little-endian
    /// `u64`, then row-major little-endian `f64`.
    pub fn write_binary<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"LPQOP1")?;
        w.write_all(&(self.rows as u64).to_le_bytes())?;
        w.write_all(&(self.cols as u64).to_le_bytes())?;
        for x in &self.data {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: std::io::Read>(mut r: R) -> Result<Matrix> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic)?;
        if &magic != b"LPQOP1" {
            return Err(Error::Io("bad magic".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let rows = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let cols = u64::from_le_bytes(b8) as usize;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            r.read_exact(&mut b8)?;
            data.push(f64::from_le_bytes(b8));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// One CSV line per row.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|x| format!("{x:e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// `‖x‖_s` for `s ∈ (0, ∞]`; a quasi-norm when `s < 1`.
pub fn lp_norm(x: &[f64], s: Exponent) -> f64 {
    match s {
        Exponent::Infinite => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Exponent::Finite(s) => {
            let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            // Scaled to avoid overflow and underflow.
            let sum: f64 = x.iter().map(|v| (v.abs() / m).powf(s)).sum();
            m * sum.powf(1.0 / s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.5]]).unwrap();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..6], b"LPQOP1");
        assert_eq!(buf.len(), 6 + 16 + 6 * 8);
        assert_eq!(Matrix::read_binary(&buf[..]).unwrap(), m);
    }

    #[test]
    fn norms() {
        let x = [3.0, 4.0];
        assert!((lp_norm(&x, Exponent::Finite(2.0)) - 5.0).abs() < 1e-15);
        assert_eq!(lp_norm(&x, Exponent::Infinite), 4.0);
        assert!((lp_norm(&[1.0, 1.0], Exponent::Finite(0.5)) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn gram_and_transpose() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let g = m.gram();
        assert_eq!(g.get(0, 0), 35.0);
        assert_eq!(g.get(0, 1), 44.0);
        assert_eq!(m.transpose().get(1, 2), 6.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
    }
}
