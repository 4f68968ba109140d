//! Small dense-matrix helpers: storage, cyclic Jacobi eigenvalues for
//! symmetric matrices, power iteration, and a spectral-radius estimate for
//! general square matrices. The matrices here are diagnostic-sized (a few
//! hundred rows at most), so no external linear-algebra backend is used.

use std::fmt;

/// Dense row-major square-or-rectangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn matmul(&self, other: &DMatrix) -> DMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Symmetric part `(A + A^T) / 2`.
    pub fn symmetric_part(&self) -> DMatrix {
        assert_eq!(self.rows, self.cols);
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> DMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|a| *a *= factor);
        out
    }
}

impl fmt::Display for DMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{:12.5e} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation scheme.
///
/// Sweeps annihilate each off-diagonal element in turn until the off-diagonal
/// mass falls below a scale-relative threshold. Returns the eigenvalues in
/// ascending order. Panics if the input is not square.
pub fn jacobi_eigenvalues(matrix: &DMatrix) -> Vec<f64> {
    assert_eq!(matrix.rows(), matrix.cols(), "jacobi needs a square matrix");
    let n = matrix.rows();
    let mut a = matrix.clone();
    if n == 1 {
        return vec![a.get(0, 0)];
    }

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    const MAX_SWEEPS: usize = 64;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                // stable tangent of the rotation angle
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp - s * (akq + tau * akp));
                    a.set(p, k, a.get(k, p));
                    a.set(k, q, akq + s * (akp - tau * akq));
                    a.set(q, k, a.get(k, q));
                }
            }
        }
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigenvalues
}

/// Dominant eigenvalue of a square matrix by power iteration with a fixed
/// deterministic start. Suited to matrices with a simple dominant eigenvalue,
/// e.g. irreducible nonnegative ones; returns the Rayleigh-quotient estimate.
pub fn power_iteration_dominant(matrix: &DMatrix, max_iter: usize, tol: f64) -> f64 {
    assert_eq!(matrix.rows(), matrix.cols());
    let n = matrix.rows();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let mut w = matrix.matvec(&v);
        let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = norm2(&w);
        if norm <= f64::MIN_POSITIVE {
            return 0.0;
        }
        w.iter_mut().for_each(|a| *a /= norm);
        let delta = (next - lambda).abs();
        lambda = next;
        v = w;
        if delta <= tol * lambda.abs().max(1.0) {
            break;
        }
    }
    lambda
}

/// Spectral radius of a general square matrix.
///
/// Symmetric input goes through the Jacobi eigensolver. Otherwise the radius
/// is estimated by the norm-of-powers limit `||A^k||^(1/k)` with `k = 2^40`,
/// evaluated by repeated squaring with per-step normalization.
pub fn spectral_radius(matrix: &DMatrix) -> f64 {
    assert_eq!(matrix.rows(), matrix.cols());
    if matrix.is_symmetric(1e-12 * matrix.frobenius_norm().max(1e-300)) {
        return jacobi_eigenvalues(&matrix.symmetric_part())
            .into_iter()
            .fold(0.0, |acc, l| acc.max(l.abs()));
    }
    let mut m = matrix.clone();
    let mut log_scale = 0.0f64;
    let squarings = 40;
    for _ in 0..squarings {
        let norm = m.frobenius_norm();
        if norm <= f64::MIN_POSITIVE {
            return 0.0;
        }
        m = m.scaled(1.0 / norm);
        m = m.matmul(&m);
        log_scale = 2.0 * (log_scale + norm.ln());
    }
    ((m.frobenius_norm().ln() + log_scale) / 2f64.powi(squarings)).exp()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|a| *a /= n);
    }
}
