//! Validated quantum states and instance generators.
//!
//! [`Density`] and [`Ket`] can only be obtained through validating
//! constructors (or from operations that provably preserve validity), so the
//! entropy functions never re-check their inputs.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::entropy::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, partial_trace, tensor_product, tensor_vec, BipartiteSplit, Matrix, Subsystem,
};
use crate::scalar::{abs2, Real};

/// A Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Density<T> {
    matrix: Matrix<T>,
}

impl<T: Real> Density<T> {
    /// Validates `m` as a density matrix. Input within the Hermitian tolerance
    /// is symmetrized first.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        let m = m.require_hermitian()?;
        let trace = m.trace().re;
        let deviation = (trace - T::one()).abs();
        if deviation > T::c(T::TRACE_TOL) {
            return Err(Error::Trace {
                trace: trace.to_f64_lossy(),
                deviation: deviation.to_f64_lossy(),
            });
        }
        let min = hermitian_eigen(&m)?.min_value();
        if min < -T::c(T::PSD_TOL) {
            return Err(Error::NotPositive {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        Ok(Self { matrix: m })
    }

    /// Wraps a matrix already known to be a density matrix.
    pub(crate) fn from_trusted(matrix: Matrix<T>) -> Self {
        debug_assert!(matrix.max_hermitian_deviation() <= T::c(T::HERMITIAN_TOL));
        Self { matrix }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: Matrix::maximally_mixed(dim),
        }
    }

    /// Diagonal density from a probability vector.
    pub fn diagonal(p: &ProbabilityVector<T>) -> Self {
        Self {
            matrix: Matrix::from_diagonal(p.as_slice()),
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        Ok(hermitian_eigen(&self.matrix)?.values)
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: tensor_product(&self.matrix, &other.matrix)?,
        })
    }

    /// Reduced state after tracing out `traced`.
    pub fn partial_trace(&self, split: BipartiteSplit, traced: Subsystem) -> Result<Self> {
        Ok(Self {
            matrix: partial_trace(&self.matrix, split, traced)?.hermitian_part(),
        })
    }

    /// `U ρ U†`; `u` must be unitary.
    pub fn conjugate_by(&self, u: &Matrix<T>) -> Self {
        Self {
            matrix: self.matrix.conjugate_by(u).hermitian_part(),
        }
    }

    /// `λ self + (1 - λ) other` for `λ ∈ [0, 1]`.
    pub fn convex_combination(&self, lambda: T, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(Error::Probability(format!(
                "mixing weight {lambda} outside [0, 1]"
            )));
        }
        let mut m = self.matrix.scale(lambda);
        m.add_scaled(T::one() - lambda, &other.matrix);
        Ok(Self { matrix: m })
    }
}

/// Builds a validated density matrix; see [`Density::new`].
pub fn make_density<T: Real>(m: Matrix<T>) -> Result<Density<T>> {
    Density::new(m)
}

/// Unit-norm state vector, optionally tagged with a bipartite split.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket<T> {
    amplitudes: Vec<Complex<T>>,
    split: Option<BipartiteSplit>,
}

impl<T: Real> Ket<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let norm = amplitudes.iter().map(|&z| abs2(z)).sum::<T>().sqrt();
        if !norm.is_finite() || (norm - T::one()).abs() > T::c(T::TRACE_TOL) {
            return Err(Error::NotNormalized {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self {
            amplitudes,
            split: None,
        })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes.iter().map(|&z| abs2(z)).sum::<T>().sqrt();
        if !(norm > T::zero() && norm.is_finite()) {
            return Err(Error::NotNormalized {
                norm: norm.to_f64_lossy(),
            });
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self {
            amplitudes,
            split: None,
        })
    }

    pub fn with_split(mut self, split: BipartiteSplit) -> Result<Self> {
        split.check(self.amplitudes.len())?;
        self.split = Some(split);
        Ok(self)
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn split(&self) -> Option<BipartiteSplit> {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> Density<T> {
        Density::from_trusted(Matrix::outer(&self.amplitudes))
    }

    /// `|ψ⟩ ⊗ |φ⟩` tagged with the corresponding split.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes),
            split: Some(BipartiteSplit {
                dim_a: self.dim(),
                dim_b: other.dim(),
            }),
        }
    }
}

/// Convex combination `Σ p_i ρ_i` kept in expanded form.
#[derive(Clone, Debug)]
pub struct Mixture<T> {
    weights: ProbabilityVector<T>,
    components: Vec<Density<T>>,
}

impl<T: Real> Mixture<T> {
    pub fn new(weights: ProbabilityVector<T>, components: Vec<Density<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Ensemble("no components".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::Ensemble(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        let dim = components[0].dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        Ok(Self {
            weights,
            components,
        })
    }

    pub fn weights(&self) -> &ProbabilityVector<T> {
        &self.weights
    }

    pub fn components(&self) -> &[Density<T>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// `Σ p_i ρ_i`.
    pub fn state(&self) -> Density<T> {
        let mut m = Matrix::zeros(self.dim());
        for (&p, c) in self.weights.as_slice().iter().zip(&self.components) {
            m.add_scaled(p, c.matrix());
        }
        Density::from_trusted(m)
    }
}

/// Schmidt form `Σ_k c_k |a_k⟩ ⊗ |b_k⟩` of a bipartite pure state.
#[derive(Clone, Debug)]
pub struct Schmidt<T> {
    /// Descending, strictly positive.
    pub coefficients: Vec<T>,
    pub left: Vec<Vec<Complex<T>>>,
    pub right: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Schmidt<T> {
    pub fn reconstruct(&self) -> Vec<Complex<T>> {
        let len = self.left[0].len() * self.right[0].len();
        let mut out = vec![Complex::new(T::zero(), T::zero()); len];
        for ((&c, a), b) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (o, z) in out.iter_mut().zip(tensor_vec(a, b)) {
                *o += z * c;
            }
        }
        out
    }
}

/// Purification `|η⟩ = Σ_i √λ_i |e_i⟩ ⊗ |i⟩` over the numerically non-zero
/// eigenvalues of `rho`, split as `(d, r)`.
pub fn purify<T: Real>(rho: &Density<T>) -> Result<Ket<T>> {
    let eig = hermitian_eigen(rho.matrix())?;
    let d = rho.dim();
    let kept: Vec<usize> = (0..d)
        .filter(|&i| eig.values[i] > T::c(T::RANK_CUTOFF))
        .collect();
    let r = kept.len();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); d * r];
    for (slot, &i) in kept.iter().enumerate() {
        let w = eig.values[i].sqrt();
        for (a, &e) in eig.vectors[i].iter().enumerate() {
            amps[a * r + slot] = e * w;
        }
    }
    Ket::new(amps)?.with_split(BipartiteSplit { dim_a: d, dim_b: r })
}

/// Schmidt decomposition through the eigendecomposition of `C C†`, where `C`
/// is the `dim_a × dim_b` coefficient matrix of `psi`. Coefficients with
/// `c² ≤ RANK_CUTOFF` are dropped, matching the cutoff of [`purify`].
pub fn schmidt<T: Real>(psi: &Ket<T>) -> Result<Schmidt<T>> {
    let split = psi.split().ok_or(Error::MissingSplit)?;
    split.check(psi.dim())?;
    let BipartiteSplit { dim_a, dim_b } = split;
    let coeff = |i: usize, k: usize| psi.amplitudes()[i * dim_b + k];

    let mut gram = Matrix::<T>::zeros(dim_a);
    for i in 0..dim_a {
        for j in 0..dim_a {
            gram[(i, j)] = (0..dim_b).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + coeff(i, k) * coeff(j, k).conj()
            });
        }
    }
    let eig = hermitian_eigen(&gram)?;

    let cutoff = T::c(T::RANK_CUTOFF);
    let mut out = Schmidt {
        coefficients: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
    };
    // columns of W in C = U S W†; the B-factor vectors are their conjugates
    let mut w_cols: Vec<Vec<Complex<T>>> = Vec::new();
    for (lambda, u) in eig.values.iter().zip(&eig.vectors) {
        // the Gram route resolves s² only to round-off, so the cutoff applies to s²
        if *lambda <= cutoff || w_cols.len() == dim_a.min(dim_b) {
            continue;
        }
        let s = lambda.sqrt();
        if s <= T::zero() {
            continue;
        }
        // C† u = s w
        let mut w: Vec<Complex<T>> = (0..dim_b)
            .map(|k| {
                (0..dim_a).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
                    acc + coeff(i, k).conj() * u[i]
                })
            })
            .collect();
        let before = norm(&w);
        for prev in &w_cols {
            let overlap = inner(prev, &w);
            for (x, &p) in w.iter_mut().zip(prev) {
                *x -= p * overlap;
            }
        }
        let after = norm(&w);
        // residual collapsed: the direction was round-off, not a Schmidt vector
        if after.is_nan() || after <= T::c(0.5) * before {
            continue;
        }
        for x in &mut w {
            *x /= after;
        }
        out.coefficients.push(s);
        out.left.push(u.clone());
        out.right.push(w.iter().map(|z| z.conj()).collect());
        w_cols.push(w);
    }
    Ok(out)
}

/// Complex Gaussian `dim × rank` matrix `G`, returned as `G G† / tr(G G†)`.
pub fn random_density_with<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<Density<T>> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let g: Vec<Complex<T>> = (0..dim * rank).map(|_| complex_normal(rng)).collect();
    let mut m = Matrix::<T>::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = (0..rank).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + g[i * rank + k] * g[j * rank + k].conj()
            });
        }
    }
    let tr = m.trace().re;
    Ok(Density::from_trusted(
        m.scale(T::one() / tr).hermitian_part(),
    ))
}

/// Deterministic random density matrix for `(dim, rank, seed)`.
pub fn random_density<T: Real>(dim: usize, rank: usize, seed: u64) -> Result<Density<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(dim, rank, &mut rng)
}

/// Uniformly random pure state.
pub fn random_ket<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket<T> {
    let v = (0..dim).map(|_| complex_normal(rng)).collect();
    Ket::normalized(v).expect("Gaussian vector is non-zero with probability one")
}

/// Haar-distributed unitary: Gram–Schmidt on the columns of a complex
/// Gaussian matrix, with the diagonal of `R` made positive.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_normal(rng)).collect())
        .collect();
    for j in 0..dim {
        // second pass restores orthogonality lost to cancellation
        for _ in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let overlap = inner(&head[i], &tail[0]);
                for (x, &q) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= q * overlap;
                }
            }
        }
        let n = norm(&cols[j]);
        for x in &mut cols[j] {
            *x /= n;
        }
    }
    let mut u = Matrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Dirichlet(1, …, 1) sample of length `n`.
pub fn random_probability_vector<T: Real, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> ProbabilityVector<T> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityVector::new(raw.iter().map(|x| T::c(x / total)).collect())
        .expect("normalized Dirichlet sample")
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&x, &y)| {
            acc + x.conj() * y
        })
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|&z| abs2(z)).sum::<T>().sqrt()
}

/// Complex standard normal: real and imaginary parts i.i.d. N(0, 1/2).
pub(crate) fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(
        T::c(re * std::f64::consts::FRAC_1_SQRT_2),
        T::c(im * std::f64::consts::FRAC_1_SQRT_2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_of_square;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn validation_gate() {
        assert!(make_density(Matrix::<f64>::maximally_mixed(2)).is_ok());
        let err = make_density(Matrix::<f64>::from_diagonal(&[1.5, -0.5])).unwrap_err();
        assert!(
            matches!(err, Error::NotPositive { min_eigenvalue } if (min_eigenvalue + 0.5).abs() < 1e-15)
        );
        let err = make_density(Matrix::<f64>::from_diagonal(&[0.5, 0.4])).unwrap_err();
        assert!(matches!(err, Error::Trace { deviation, .. } if (deviation - 0.1).abs() < 1e-15));
        let err = make_density(Matrix::<f64>::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn rank_one_sample_is_pure() {
        for seed in 0..20 {
            let rho = random_density::<f64>(5, 1, seed).unwrap();
            assert!((trace_of_square(rho.matrix()).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn full_rank_sample_is_positive_definite() {
        for seed in 0..20 {
            let rho = random_density::<f64>(4, 4, seed).unwrap();
            assert!(rho.eigenvalues().unwrap()[3] > 0.0);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(
            random_density::<f64>(3, 2, 99).unwrap(),
            random_density::<f64>(3, 2, 99).unwrap()
        );
        assert_ne!(
            random_density::<f64>(3, 2, 99).unwrap(),
            random_density::<f64>(3, 2, 100).unwrap()
        );
    }

    #[test]
    fn rank_out_of_range() {
        assert_eq!(
            random_density::<f64>(3, 4, 0).unwrap_err(),
            Error::RankOutOfRange { rank: 4, dim: 3 }
        );
        assert_eq!(
            random_density::<f64>(3, 0, 0).unwrap_err(),
            Error::RankOutOfRange { rank: 0, dim: 3 }
        );
    }

    #[test]
    fn purify_pure_state() {
        let psi = Ket::normalized(vec![c(1.0), Complex::new(0.0, 2.0), c(-1.0)]).unwrap();
        let eta = purify(&psi.projector()).unwrap();
        assert_eq!(eta.split(), Some(BipartiteSplit { dim_a: 3, dim_b: 1 }));
        // |ψ⟩⊗|0⟩ up to a global phase
        let overlap = psi
            .amplitudes()
            .iter()
            .zip(eta.amplitudes())
            .fold(c(0.0), |a, (&x, &y)| a + x.conj() * y);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purify_maximally_mixed_qubit() {
        let eta = purify(&Density::<f64>::maximally_mixed(2)).unwrap();
        let s = schmidt(&eta).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.coefficients.len(), 2);
        assert!(s.coefficients.iter().all(|&x| (x - h).abs() < 1e-12));
    }

    #[test]
    fn schmidt_examples() {
        let a = Ket::normalized(vec![c(1.0), c(2.0)]).unwrap();
        let b = Ket::normalized(vec![c(0.0), Complex::new(1.0, 1.0), c(3.0)]).unwrap();
        let s = schmidt(&a.tensor(&b)).unwrap();
        assert_eq!(s.coefficients.len(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Ket::new(vec![c(h), c(0.0), c(0.0), c(h)])
            .unwrap()
            .with_split(BipartiteSplit::new(2, 2).unwrap())
            .unwrap();
        let s = schmidt(&bell).unwrap();
        assert_eq!(s.coefficients.len(), 2);
        assert!(s.coefficients.iter().all(|&x| (x - h).abs() < 1e-12));
        let back = s.reconstruct();
        assert!(back
            .iter()
            .zip(bell.amplitudes())
            .all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn schmidt_requires_split() {
        let psi = Ket::<f64>::new(vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(schmidt(&psi).unwrap_err(), Error::MissingSplit);
    }

    #[test]
    fn ket_norm_checked() {
        assert!(matches!(
            Ket::<f64>::new(vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 1..9 {
            let u = random_unitary::<f64, _>(d, &mut rng);
            assert!(u.unitary_deviation() < 1e-12);
        }
    }

    #[test]
    fn mixture_checks_shape() {
        let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let one = vec![Density::<f64>::maximally_mixed(2)];
        assert!(matches!(
            Mixture::new(p.clone(), one),
            Err(Error::Ensemble(_))
        ));
        let mixed = vec![Density::maximally_mixed(2), Density::maximally_mixed(3)];
        assert!(matches!(
            Mixture::new(p, mixed),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
