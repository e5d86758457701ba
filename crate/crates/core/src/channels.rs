//! State transformations: Lüders measurement, flag-register mixing and the
//! discrete Weyl twirl that realizes `ρ_AB ↦ tr_B(ρ_AB) ⊗ I/b` as a mixture of
//! local unitaries.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;

use crate::entropy::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::{BipartiteSplit, Matrix};
use crate::qstate::{random_unitary, Density, Mixture};
use crate::scalar::Real;

/// Orthogonal projectors summing to the identity.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement<T> {
    projectors: Vec<Matrix<T>>,
}

impl<T: Real> ProjectiveMeasurement<T> {
    pub fn new(projectors: Vec<Matrix<T>>) -> Result<Self> {
        let Some(first) = projectors.first() else {
            return Err(Error::Measurement("no projectors".into()));
        };
        let dim = first.dim();
        let tol = T::c(T::HERMITIAN_TOL);
        let mut total = Matrix::zeros(dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::Measurement(format!(
                    "projector {i} has dimension {}, expected {dim}",
                    p.dim()
                )));
            }
            let dev = p.max_hermitian_deviation();
            if dev > tol {
                return Err(Error::Measurement(format!(
                    "projector {i} is not Hermitian (deviation {dev:e})"
                )));
            }
            total.add_scaled(T::one(), p);
        }
        let dev = total.max_abs_diff(&Matrix::identity(dim));
        if dev > tol {
            return Err(Error::Measurement(format!(
                "projectors do not sum to the identity (deviation {dev:e})"
            )));
        }
        for (i, p) in projectors.iter().enumerate() {
            for (j, q) in projectors.iter().enumerate() {
                let target = if i == j {
                    q.clone()
                } else {
                    Matrix::zeros(dim)
                };
                let dev = p.matmul(q).max_abs_diff(&target);
                if dev > tol {
                    return Err(Error::Measurement(format!(
                        "P_{i} P_{j} deviates from δ_ij P_j by {dev:e}"
                    )));
                }
            }
        }
        Ok(Self { projectors })
    }

    /// Rank-one projectors onto the computational basis.
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|i| {
                let mut p = Matrix::zeros(dim);
                p[(i, i)] = Complex::new(T::one(), T::zero());
                p
            })
            .collect();
        Self { projectors }
    }

    /// Groups consecutive columns of the unitary `basis` into projectors of
    /// the given ranks.
    pub fn from_basis_groups(basis: &Matrix<T>, ranks: &[usize]) -> Result<Self> {
        let dim = basis.dim();
        if ranks.iter().sum::<usize>() != dim || ranks.contains(&0) {
            return Err(Error::Measurement(format!(
                "ranks {ranks:?} do not compose dimension {dim}"
            )));
        }
        let mut projectors = Vec::with_capacity(ranks.len());
        let mut col = 0;
        for &r in ranks {
            let mut p = Matrix::zeros(dim);
            for c in col..col + r {
                let v: Vec<Complex<T>> = (0..dim).map(|i| basis[(i, c)]).collect();
                p.add_scaled(T::one(), &Matrix::outer(&v));
            }
            projectors.push(p);
            col += r;
        }
        Self::new(projectors)
    }

    pub fn projectors(&self) -> &[Matrix<T>] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }
}

/// Random measurement: Haar basis split by a uniformly random composition of
/// `dim`, so both rank-one and coarse projectors occur.
pub fn random_measurement<T: Real, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> ProjectiveMeasurement<T> {
    let basis = random_unitary::<T, R>(dim, rng);
    let mut ranks = vec![1usize];
    for _ in 1..dim {
        if rng.random_bool(0.5) {
            ranks.push(1);
        } else {
            *ranks.last_mut().expect("non-empty") += 1;
        }
    }
    ProjectiveMeasurement::from_basis_groups(&basis, &ranks)
        .expect("Haar basis yields a valid measurement")
}

/// Post-measurement state `Σ_i P_i ρ P_i`.
pub fn measure<T: Real>(rho: &Density<T>, m: &ProjectiveMeasurement<T>) -> Result<Density<T>> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: m.dim(),
        });
    }
    let mut out = Matrix::zeros(rho.dim());
    for p in &m.projectors {
        out.add_scaled(T::one(), &p.matmul(rho.matrix()).matmul(p));
    }
    Density::new(out)
}

/// Block-diagonal state `Σ_i p_i ρ_i ⊗ |i⟩⟨i|` on `d·k`, split `(d, k)`.
pub fn mix_with_flags<T: Real>(ensemble: &Mixture<T>) -> (Density<T>, BipartiteSplit) {
    let d = ensemble.dim();
    let k = ensemble.len();
    let mut m = Matrix::zeros(d * k);
    for (flag, (&p, rho)) in ensemble
        .weights()
        .as_slice()
        .iter()
        .zip(ensemble.components())
        .enumerate()
    {
        for i in 0..d {
            for j in 0..d {
                m[(i * k + flag, j * k + flag)] = rho.matrix()[(i, j)] * p;
            }
        }
    }
    (
        Density::from_trusted(m),
        BipartiteSplit { dim_a: d, dim_b: k },
    )
}

/// Probability-weighted set of unitaries of one dimension.
#[derive(Clone, Debug)]
pub struct UnitaryMixture<T> {
    weights: ProbabilityVector<T>,
    unitaries: Vec<Matrix<T>>,
}

impl<T: Real> UnitaryMixture<T> {
    pub fn new(weights: ProbabilityVector<T>, unitaries: Vec<Matrix<T>>) -> Result<Self> {
        if weights.len() != unitaries.len() || unitaries.is_empty() {
            return Err(Error::Probability(format!(
                "{} weights for {} unitaries",
                weights.len(),
                unitaries.len()
            )));
        }
        let dim = unitaries[0].dim();
        for (index, u) in unitaries.iter().enumerate() {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: u.dim(),
                });
            }
            let deviation = u.unitary_deviation();
            if deviation > T::c(T::HERMITIAN_TOL) {
                return Err(Error::NotUnitary {
                    index,
                    deviation: deviation.to_f64_lossy(),
                });
            }
        }
        Ok(Self { weights, unitaries })
    }

    pub fn weights(&self) -> &ProbabilityVector<T> {
        &self.weights
    }

    pub fn unitaries(&self) -> &[Matrix<T>] {
        &self.unitaries
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].dim()
    }

    /// `Σ_j p_j U_j M U_j†`, accumulated in list order.
    pub fn apply(&self, m: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(m.dim());
        for (&p, u) in self.weights.as_slice().iter().zip(&self.unitaries) {
            out.add_scaled(p, &m.conjugate_by(u));
        }
        out
    }
}

/// Generalized Pauli operators `X^a Z^c`, `a, c ∈ 0..b`, uniformly weighted.
/// Ordered by `a`, then `c`.
pub fn weyl_mixture<T: Real>(b: usize) -> Result<UnitaryMixture<T>> {
    if b < 2 {
        return Err(Error::WeylDimension(b));
    }
    let mut unitaries = Vec::with_capacity(b * b);
    for a in 0..b {
        for c in 0..b {
            let mut w = Matrix::zeros(b);
            for k in 0..b {
                let angle = 2.0 * PI * ((k * c) % b) as f64 / b as f64;
                w[((k + a) % b, k)] = Complex::new(T::c(angle.cos()), T::c(angle.sin()));
            }
            unitaries.push(w);
        }
    }
    UnitaryMixture::new(ProbabilityVector::uniform(b * b), unitaries)
}

/// Applies `{p_j, I_A ⊗ U_j}` from [`weyl_mixture`]`(dim_b)` to a bipartite
/// state. The result is `tr_B(ρ) ⊗ I/b`.
pub fn twirl_subsystem_b<T: Real>(
    rho_ab: &Density<T>,
    split: BipartiteSplit,
) -> Result<Density<T>> {
    split.check(rho_ab.dim())?;
    let mixture = weyl_mixture::<T>(split.dim_b)?;
    let BipartiteSplit { dim_a, dim_b } = split;
    let m = rho_ab.matrix();
    let mut out = Matrix::zeros(m.dim());
    let mut block = Matrix::zeros(dim_b);
    for (&p, u) in mixture.weights().as_slice().iter().zip(mixture.unitaries()) {
        // (I ⊗ U) ρ (I ⊗ U)† acts block-wise on the dim_b × dim_b blocks ρ_ij
        for i in 0..dim_a {
            for j in 0..dim_a {
                for k in 0..dim_b {
                    for l in 0..dim_b {
                        block[(k, l)] = m[(i * dim_b + k, j * dim_b + l)];
                    }
                }
                let rotated = block.conjugate_by(u);
                for k in 0..dim_b {
                    for l in 0..dim_b {
                        out[(i * dim_b + k, j * dim_b + l)] += rotated[(k, l)] * p;
                    }
                }
            }
        }
    }
    Ok(Density::from_trusted(out.hermitian_part()))
}
