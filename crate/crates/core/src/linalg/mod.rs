//! Dense complex matrix kernel.
//!
//! [`Matrix`] is a square, row-major complex matrix with finite entries. The
//! free functions in this module are the handful of operations the entropy
//! code is built on: Kronecker products, partial traces, a Hermitian
//! eigensolver and two entrywise quadratic forms.
//!
//! Bipartite index convention: subsystem A is always the slow (left) tensor
//! factor, so basis state `|i⟩⊗|k⟩` has flat index `i * dim_b + k`.

mod eigen;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{abs2, Real};

pub use eigen::{hermitian_eigen, hermitian_eigen_with, Eigen, JacobiOptions};

/// Largest dimension [`tensor_product`] will build unless a cap is passed
/// explicitly.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, rejecting empty, ragged or
    /// non-finite input.
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let expected = dim.checked_mul(dim).ok_or(Error::TooLarge {
            dim,
            max: DEFAULT_MAX_DIM,
        })?;
        if data.len() != expected {
            return Err(Error::Shape {
                dim,
                expected,
                got: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Shape {
                    dim,
                    expected: dim * dim,
                    got: row.len() * dim,
                });
            }
            data.extend(row);
        }
        Self::new(dim, data)
    }

    /// Convenience constructor for real matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&x| Complex::new(T::c(x), T::zero()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::identity(dim).scale(T::one() / T::from_usize_exact(dim))
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[Complex<T>]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.data.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim)
            .map(|i| self[(i, i)])
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// Real parts of the diagonal.
    pub fn diagonal_real(&self) -> Vec<T> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row_k = &other.data[k * n..(k + 1) * n];
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(row_k) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in apply");
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| {
                        acc + a * b
                    })
            })
            .collect()
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn max_hermitian_deviation(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let half = T::c(0.5);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * half;
            }
        }
        out
    }

    /// Symmetrized copy if within the Hermitian tolerance, error otherwise.
    pub fn require_hermitian(&self) -> Result<Self> {
        let dev = self.max_hermitian_deviation();
        if dev > T::c(T::HERMITIAN_TOL) || dev.is_nan() {
            return Err(Error::NotHermitian {
                max_deviation: dev.to_f64_lossy(),
            });
        }
        Ok(self.hermitian_part())
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&z| abs2(z)).sum::<T>().sqrt()
    }

    /// Largest entrywise modulus of `self · self† - I`.
    pub fn unitary_deviation(&self) -> T {
        let p = self.matmul(&self.adjoint());
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { T::one() } else { T::zero() };
                let d = (p[(i, j)] - Complex::new(target, T::zero())).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Converts entries to another scalar type.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::c(z.re.to_f64_lossy()), U::c(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs)
    }
}

/// Factor dimensions of a bipartite space `A ⊗ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteSplit {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteSplit {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::SplitMismatch {
                dim: dim_a * dim_b,
                dim_a,
                dim_b,
            });
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Errors unless `dim = dim_a · dim_b`.
    pub fn check(&self, dim: usize) -> Result<()> {
        if self.dim_a == 0 || self.dim_b == 0 || self.total() != dim {
            return Err(Error::SplitMismatch {
                dim,
                dim_a: self.dim_a,
                dim_b: self.dim_b,
            });
        }
        Ok(())
    }
}

/// Which factor of a bipartite space an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product `a ⊗ b` with `a` as the slow index.
pub fn tensor_product<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    tensor_product_capped(a, b, DEFAULT_MAX_DIM)
}

pub fn tensor_product_capped<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    max_dim: usize,
) -> Result<Matrix<T>> {
    let (na, nb) = (a.dim, b.dim);
    let n = na.saturating_mul(nb);
    if n > max_dim {
        return Err(Error::TooLarge {
            dim: n,
            max: max_dim,
        });
    }
    let mut out = Matrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let x = a[(i, j)];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two vectors, `u` as the slow index.
pub fn tensor_vec<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Vec<Complex<T>> {
    u.iter()
        .flat_map(|&x| v.iter().map(move |&y| x * y))
        .collect()
}

/// Partial trace over `traced`: tracing out B leaves a `dim_a × dim_a`
/// matrix, tracing out A leaves `dim_b × dim_b`.
pub fn partial_trace<T: Real>(
    m: &Matrix<T>,
    split: BipartiteSplit,
    traced: Subsystem,
) -> Result<Matrix<T>> {
    split.check(m.dim)?;
    let BipartiteSplit { dim_a, dim_b } = split;
    let zero = Complex::new(T::zero(), T::zero());
    let out = match traced {
        Subsystem::B => {
            let mut r = Matrix::zeros(dim_a);
            for i in 0..dim_a {
                for j in 0..dim_a {
                    r[(i, j)] = (0..dim_b)
                        .map(|k| m[(i * dim_b + k, j * dim_b + k)])
                        .fold(zero, |a, b| a + b);
                }
            }
            r
        }
        Subsystem::A => {
            let mut r = Matrix::zeros(dim_b);
            for k in 0..dim_b {
                for l in 0..dim_b {
                    r[(k, l)] = (0..dim_a)
                        .map(|i| m[(i * dim_b + k, i * dim_b + l)])
                        .fold(zero, |a, b| a + b);
                }
            }
            r
        }
    };
    Ok(out)
}

/// `tr(m²)` for Hermitian `m`, evaluated as `Σ |m_ij|²`.
pub fn trace_of_square<T: Real>(m: &Matrix<T>) -> Result<T> {
    let dev = m.max_hermitian_deviation();
    if dev > T::c(T::HERMITIAN_TOL) || dev.is_nan() {
        return Err(Error::NotHermitian {
            max_deviation: dev.to_f64_lossy(),
        });
    }
    Ok(m.data.iter().map(|&z| abs2(z)).sum())
}

/// `Σ |a_ij - b_ij|²`, which is `tr((a - b)²)` for Hermitian inputs.
pub fn frobenius_distance_sq<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<T> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    for m in [a, b] {
        let dev = m.max_hermitian_deviation();
        if dev > T::c(T::HERMITIAN_TOL) || dev.is_nan() {
            return Err(Error::NotHermitian {
                max_deviation: dev.to_f64_lossy(),
            });
        }
    }
    Ok(a.data.iter().zip(&b.data).map(|(&x, &y)| abs2(x - y)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = Matrix::<f64>::identity(2);
        assert_eq!(tensor_product(&i2, &i2).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn diagonal_tensor_diagonal() {
        let a = Matrix::<f64>::from_diagonal(&[2.0, 3.0]);
        let b = Matrix::<f64>::from_diagonal(&[5.0, 7.0]);
        let p = tensor_product(&a, &b).unwrap();
        assert_eq!(p, Matrix::from_diagonal(&[10.0, 14.0, 15.0, 21.0]));
    }

    #[test]
    fn tensor_shape_and_index_law() {
        let a = Matrix::<f64>::new(2, (0..4).map(|x| c(x as f64, 1.0)).collect()).unwrap();
        let b = Matrix::<f64>::new(3, (0..9).map(|x| c(1.0, x as f64)).collect()).unwrap();
        let p = tensor_product(&a, &b).unwrap();
        assert_eq!(p.dim(), 6);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(p[(i * 3 + k, j * 3 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_respects_cap() {
        let a = Matrix::<f64>::identity(4);
        let err = tensor_product_capped(&a, &a, 15).unwrap_err();
        assert_eq!(err, Error::TooLarge { dim: 16, max: 15 });
    }

    #[test]
    fn bell_state_marginal_by_index_sum() {
        let s = 1.0 / 2f64.sqrt();
        let psi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = Matrix::outer(&psi);
        // tr_B by explicit index sum over the 4x4 entries
        let mut expected = [[c(0.0, 0.0); 2]; 2];
        for (i, row) in expected.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    *entry += rho.as_slice()[(2 * i + k) * 4 + (2 * j + k)];
                }
            }
        }
        let reduced =
            partial_trace(&rho, BipartiteSplit::new(2, 2).unwrap(), Subsystem::B).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((reduced[(i, j)] - expected[i][j]).norm() < 1e-15);
            }
        }
        assert!(reduced.max_abs_diff(&Matrix::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_and_maximally_mixed() {
        let rho = Matrix::<f64>::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]).unwrap();
        let sigma = Matrix::<f64>::from_diagonal(&[0.2, 0.5, 0.3]);
        let split = BipartiteSplit::new(2, 3).unwrap();
        let joint = tensor_product(&rho, &sigma).unwrap();
        assert!(
            partial_trace(&joint, split, Subsystem::B)
                .unwrap()
                .max_abs_diff(&rho)
                < 1e-15
        );
        assert!(
            partial_trace(&joint, split, Subsystem::A)
                .unwrap()
                .max_abs_diff(&sigma)
                < 1e-15
        );

        let mixed = Matrix::<f64>::maximally_mixed(4);
        let r = partial_trace(&mixed, BipartiteSplit::new(2, 2).unwrap(), Subsystem::A).unwrap();
        assert!(r.max_abs_diff(&Matrix::maximally_mixed(2)) < 1e-15);
    }

    #[test]
    fn partial_trace_split_mismatch() {
        let m = Matrix::<f64>::identity(5);
        let err = partial_trace(&m, BipartiteSplit::new(2, 2).unwrap(), Subsystem::B).unwrap_err();
        assert_eq!(
            err,
            Error::SplitMismatch {
                dim: 5,
                dim_a: 2,
                dim_b: 2
            }
        );
    }

    #[test]
    fn trace_of_square_examples() {
        let s = 1.0 / 3f64.sqrt();
        let pure = Matrix::outer(&[c(s, 0.0), c(0.0, s), c(-s, 0.0)]);
        assert!((trace_of_square(&pure).unwrap() - 1.0).abs() < 1e-15);
        for d in 1..6 {
            let m = Matrix::<f64>::maximally_mixed(d);
            assert!((trace_of_square(&m).unwrap() - 1.0 / d as f64).abs() < 1e-15);
        }
        let m = Matrix::<f64>::from_diagonal(&[0.75, 0.25]);
        assert_eq!(trace_of_square(&m).unwrap(), 0.625);
    }

    #[test]
    fn trace_of_square_rejects_non_hermitian() {
        let m = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(
            matches!(trace_of_square(&m), Err(Error::NotHermitian { max_deviation }) if max_deviation == 1.0)
        );
    }

    #[test]
    fn frobenius_distance_examples() {
        let a = Matrix::<f64>::from_diagonal(&[1.0, 0.0]);
        let b = Matrix::<f64>::maximally_mixed(2);
        assert_eq!(frobenius_distance_sq(&a, &a).unwrap(), 0.0);
        assert_eq!(frobenius_distance_sq(&a, &b).unwrap(), 0.5);
        assert_eq!(frobenius_distance_sq(&b, &a).unwrap(), 0.5);
        let err = frobenius_distance_sq(&a, &Matrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert_eq!(
            Matrix::<f64>::new(0, vec![]).unwrap_err(),
            Error::EmptyMatrix
        );
        assert!(matches!(
            Matrix::<f64>::new(2, vec![c(0.0, 0.0); 3]),
            Err(Error::Shape { .. })
        ));
        let mut data = vec![c(0.0, 0.0); 4];
        data[3] = c(f64::NAN, 0.0);
        assert_eq!(
            Matrix::<f64>::new(2, data).unwrap_err(),
            Error::NonFinite { row: 1, col: 1 }
        );
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::<f32>::from_diagonal(&[0.75, 0.25]);
        assert!((trace_of_square(&a).unwrap() - 0.625).abs() < 1e-7);
        let p = tensor_product(&a, &Matrix::maximally_mixed(2)).unwrap();
        let r = partial_trace(&p, BipartiteSplit::new(2, 2).unwrap(), Subsystem::B).unwrap();
        assert!(r.max_abs_diff(&a) < 1e-7);
    }
}
