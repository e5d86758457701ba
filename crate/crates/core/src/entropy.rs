//! Entropy measures.
//!
//! The quantum logical entropy `L(ρ) = tr ρ(1 - ρ) = 1 - tr ρ²` is computed
//! from the entrywise sum `Σ |ρ_ij|²`, never from a spectrum; the spectral
//! form `1 - Σ λ_i²` is exposed separately so callers can cross-check the two.
//! The classical counterpart over partitions of a finite set is evaluated in
//! exact rational arithmetic.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance_sq, trace_of_square};
use crate::qstate::Density;
use crate::scalar::Real;

/// Non-negative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector<T> {
    entries: Vec<T>,
}

impl<T: Real> ProbabilityVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Probability("empty".into()));
        }
        let upper = T::one() + T::c(T::CLAMP_TOL);
        if let Some((i, p)) = entries
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p >= T::zero() && p <= upper))
        {
            return Err(Error::Probability(format!(
                "entry {i} = {p} outside [0, 1]"
            )));
        }
        let sum: T = entries.iter().copied().sum();
        if (sum - T::one()).abs() > T::c(T::TRACE_TOL) {
            return Err(Error::Probability(format!("entries sum to {sum}")));
        }
        Ok(Self { entries })
    }

    /// Spectrum of a density matrix as a distribution; round-off negatives
    /// down to `-PSD_TOL` are set to zero.
    pub fn from_spectrum(values: &[T]) -> Result<Self> {
        let floor = -T::c(T::PSD_TOL);
        let cleaned = values
            .iter()
            .map(|&x| {
                if x < T::zero() && x >= floor {
                    T::zero()
                } else {
                    x
                }
            })
            .collect();
        Self::new(cleaned)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform distribution needs at least one outcome");
        Self {
            entries: vec![T::one() / T::from_usize_exact(n); n],
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Partition of `{0, …, n-1}` into non-empty disjoint blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalPartition {
    universe_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl ClassicalPartition {
    pub fn new(universe_size: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if universe_size == 0 {
            return Err(Error::Partition("empty universe".into()));
        }
        let mut seen = vec![false; universe_size];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Partition(format!("block {b} is empty")));
            }
            for &u in block {
                if u >= universe_size {
                    return Err(Error::Partition(format!(
                        "element {u} outside universe of size {universe_size}"
                    )));
                }
                if std::mem::replace(&mut seen[u], true) {
                    return Err(Error::Partition(format!(
                        "element {u} appears in more than one block"
                    )));
                }
            }
        }
        if let Some(u) = seen.iter().position(|&s| !s) {
            return Err(Error::Partition(format!("element {u} is not covered")));
        }
        Ok(Self {
            universe_size,
            blocks,
        })
    }

    /// Partition induced by a block label per element.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index: Vec<Option<usize>> = Vec::new();
        for (u, &label) in labels.iter().enumerate() {
            if label >= index.len() {
                index.resize(label + 1, None);
            }
            let b = *index[label].get_or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(u);
        }
        Self::new(labels.len(), blocks)
    }

    /// The one-block partition.
    pub fn indiscrete(n: usize) -> Result<Self> {
        Self::new(n, vec![(0..n).collect()])
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|u| vec![u]).collect())
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `p_B = |B| / |U|`, exact.
    pub fn block_probabilities(&self) -> Vec<Ratio<u64>> {
        let n = self.universe_size as u64;
        self.blocks
            .iter()
            .map(|b| Ratio::new(b.len() as u64, n))
            .collect()
    }
}

/// Number of ordered pairs `(u, u')` lying in different blocks.
pub fn dit_count(pi: &ClassicalPartition) -> u64 {
    let n = pi.universe_size as u64;
    n * n
        - pi.blocks
            .iter()
            .map(|b| (b.len() as u64).pow(2))
            .sum::<u64>()
}

/// `|dit(π)| / |U×U|` as an exact fraction.
pub fn partition_entropy_by_counting(pi: &ClassicalPartition) -> Ratio<u64> {
    let n = pi.universe_size as u64;
    Ratio::new(dit_count(pi), n * n)
}

/// `1 - Σ_B p_B²` as an exact fraction.
pub fn partition_entropy_by_blocks(pi: &ClassicalPartition) -> Ratio<u64> {
    let collision = pi
        .block_probabilities()
        .into_iter()
        .fold(Ratio::from_integer(0), |acc, p| acc + p * p);
    Ratio::from_integer(1) - collision
}

/// Logical entropy `h(π)` of a partition.
pub fn classical_logical_entropy<T: Real>(pi: &ClassicalPartition) -> T {
    let h = partition_entropy_by_blocks(pi);
    T::c(*h.numer() as f64 / *h.denom() as f64)
}

/// `1 - Σ p_i²`: the probability that two independent draws differ.
pub fn distribution_logical_entropy<T: Real>(p: &ProbabilityVector<T>) -> T {
    T::one() - p.entries.iter().map(|&x| x * x).sum::<T>()
}

/// `L(ρ) = 1 - tr ρ²`.
pub fn logical_entropy<T: Real>(rho: &Density<T>) -> Result<T> {
    clamp_entropy(T::one() - trace_of_square(rho.matrix())?)
}

/// `1 - Σ λ_i²` over the eigenvalues of `ρ`.
pub fn logical_entropy_spectral<T: Real>(rho: &Density<T>) -> Result<T> {
    let values = rho.eigenvalues()?;
    clamp_entropy(T::one() - values.iter().map(|&x| x * x).sum::<T>())
}

fn clamp_entropy<T: Real>(value: T) -> Result<T> {
    if value < -T::c(T::PSD_TOL) {
        return Err(Error::NegativeEntropy(value.to_f64_lossy()));
    }
    Ok(value.max(T::zero()).min(T::one()))
}

/// `d(ρ‖σ) = ½ tr(ρ - σ)²`.
pub fn logical_divergence<T: Real>(rho: &Density<T>, sigma: &Density<T>) -> Result<T> {
    Ok(T::c(0.5) * frobenius_distance_sq(rho.matrix(), sigma.matrix())?)
}

/// The three terms of `d(ρ‖σ) = tr ρ(1-σ) - ½ tr ρ(1-ρ) - ½ tr σ(1-σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceTerms<T> {
    /// `tr ρ(1 - σ)`
    pub cross: T,
    /// `½ tr ρ(1 - ρ)`
    pub half_entropy_rho: T,
    /// `½ tr σ(1 - σ)`
    pub half_entropy_sigma: T,
}

impl<T: Real> DivergenceTerms<T> {
    pub fn value(&self) -> T {
        self.cross - self.half_entropy_rho - self.half_entropy_sigma
    }
}

pub fn divergence_terms<T: Real>(
    rho: &Density<T>,
    sigma: &Density<T>,
) -> Result<DivergenceTerms<T>> {
    let (a, b) = (rho.matrix(), sigma.matrix());
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let n = a.dim();
    // tr(ρσ) = Σ_ij ρ_ij σ_ji
    let mut overlap = T::zero();
    for i in 0..n {
        for j in 0..n {
            overlap += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    let half = T::c(0.5);
    Ok(DivergenceTerms {
        cross: T::one() - overlap,
        half_entropy_rho: half * (T::one() - trace_of_square(a)?),
        half_entropy_sigma: half * (T::one() - trace_of_square(b)?),
    })
}

/// `(1 - Σ λ_i^q) / (q - 1)`.
pub fn tsallis_entropy<T: Real>(rho: &Density<T>, q: T) -> Result<T> {
    if !q.is_finite() || q <= T::zero() || q == T::one() {
        return Err(Error::TsallisIndex(q.to_f64_lossy()));
    }
    let power_sum: T = rho
        .eigenvalues()?
        .into_iter()
        .map(|x| x.max(T::zero()).powf(q))
        .sum();
    Ok((T::one() - power_sum) / (q - T::one()))
}

/// `-Σ λ ln λ` over eigenvalues above the rank cutoff.
pub fn von_neumann_entropy<T: Real>(rho: &Density<T>) -> Result<T> {
    let cutoff = T::c(T::RANK_CUTOFF);
    Ok(rho
        .eigenvalues()?
        .into_iter()
        .filter(|&x| x > cutoff)
        .map(|x| -x * x.ln())
        .sum::<T>()
        .max(T::zero()))
}
