//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the usual real Jacobi rotation, so a complex
//! Hermitian pivot is annihilated by a single 2x2 unitary
//!
//! ```text
//! G = [ c          s        ]
//!     [ -s e^{-iφ}  c e^{-iφ} ]     (rows/cols p, q)
//! ```
//!
//! applied as `A ← G† A G`, `V ← V G`.

use num_complex::Complex;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{abs2, Real};

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Eigen<T> {
    /// `Σ λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.values.len();
        let mut m = Matrix::zeros(n);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            m.add_scaled(lambda, &Matrix::outer(v));
        }
        m
    }

    /// Largest entrywise deviation of the eigenvector Gram matrix from I.
    pub fn gram_deviation(&self) -> T {
        let mut worst = T::zero();
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate() {
                let dot = u
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| {
                        acc + a.conj() * b
                    });
                let target = if i == j { T::one() } else { T::zero() };
                let d = (dot - Complex::new(target, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn min_value(&self) -> T {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max_value(&self) -> T {
        self.values[0]
    }
}

/// Stopping rule for the Jacobi iteration.
#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions {
    /// Convergence once the off-diagonal Frobenius norm is at most
    /// `tolerance · max(1, ‖A‖_F)`.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl JacobiOptions {
    pub fn for_scalar<T: Real>() -> Self {
        Self {
            tolerance: T::JACOBI_TOL,
            max_sweeps: 100,
        }
    }
}

/// Eigendecomposition of a Hermitian matrix with the default stopping rule.
pub fn hermitian_eigen<T: Real>(m: &Matrix<T>) -> Result<Eigen<T>> {
    hermitian_eigen_with(m, JacobiOptions::for_scalar::<T>())
}

pub fn hermitian_eigen_with<T: Real>(m: &Matrix<T>, opts: JacobiOptions) -> Result<Eigen<T>> {
    let mut a = m.require_hermitian()?;
    let n = a.dim();
    let mut v = Matrix::<T>::identity(n);

    let scale = a.frobenius_norm().max(T::one());
    let threshold = T::c(opts.tolerance) * scale;
    let zero = Complex::new(T::zero(), T::zero());

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _sweep in 0..opts.max_sweeps {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == T::zero() {
                    continue;
                }
                // e^{-iφ} where a_pq = r e^{iφ}
                let phase = apq.conj() / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (T::c(2.0) * r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                let g_qp = -phase * s;
                let g_qq = phase * c;

                // A ← A G (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * g_qp;
                    a[(k, q)] = akp * s + akq * g_qq;
                }
                // A ← G† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * g_qp.conj();
                    a[(q, k)] = apk * s + aqk * g_qq.conj();
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                a[(p, p)] = Complex::new(app - t * r, T::zero());
                a[(q, q)] = Complex::new(aqq + t * r, T::zero());

                // V ← V G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * g_qp;
                    v[(k, q)] = vkp * s + vkq * g_qq;
                }
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > threshold {
        return Err(Error::NoConvergence {
            sweeps: opts.max_sweeps,
            off_norm: off.to_f64_lossy(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[(k, i)]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &Matrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += abs2(a[(i, j)]);
            }
        }
    }
    s.sqrt()
}
