//! Randomized property checker.
//!
//! Every [`TheoremId`] names one universally quantified statement about
//! logical entropy or divergence. [`run_check`] draws `trials` independent
//! instances for it and evaluates a *slack*: a real number that is
//! non-negative exactly when the statement holds on that instance. A trial
//! fails when `slack < -tolerance`.
//!
//! Trial `t` of a check draws all its randomness from a ChaCha8 stream keyed
//! by `(seed, theorem, t)`, so trials can run in parallel and any failure can
//! be replayed in isolation from its [`FailureRecord`].
//!
//! Instance families:
//! - states: complex Ginibre `G G† / tr(G G†)` with rank uniform in `1..=d`
//!   unless the statement fixes it;
//! - unitaries and measurement bases: Haar (Gram–Schmidt of a Gaussian matrix);
//! - mixture weights: Dirichlet(1, …, 1).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{measure, mix_with_flags, random_measurement, twirl_subsystem_b};
use crate::entropy::{
    distribution_logical_entropy, divergence_terms, logical_divergence, logical_entropy,
    ProbabilityVector,
};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance_sq, tensor_product, BipartiteSplit, Matrix, Subsystem};
use crate::qstate::{
    random_density_with, random_ket, random_probability_vector, random_unitary, schmidt, Density,
    Mixture,
};

/// The checked statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    Klein,
    PureZero,
    MaxMixed,
    PureMarginals,
    ProductFormula,
    DiagSubadditivity,
    MeasurementMonotone,
    ConcavityOrthogonal,
    ConcavityBounds,
    JointConvexity,
    DivergenceMonotone,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Klein,
        TheoremId::PureZero,
        TheoremId::MaxMixed,
        TheoremId::PureMarginals,
        TheoremId::ProductFormula,
        TheoremId::DiagSubadditivity,
        TheoremId::MeasurementMonotone,
        TheoremId::ConcavityOrthogonal,
        TheoremId::ConcavityBounds,
        TheoremId::JointConvexity,
        TheoremId::DivergenceMonotone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Klein => "KLEIN",
            TheoremId::PureZero => "PURE_ZERO",
            TheoremId::MaxMixed => "MAX_MIXED",
            TheoremId::PureMarginals => "PURE_MARGINALS",
            TheoremId::ProductFormula => "PRODUCT_FORMULA",
            TheoremId::DiagSubadditivity => "DIAG_SUBADDITIVITY",
            TheoremId::MeasurementMonotone => "MEASUREMENT_MONOTONE",
            TheoremId::ConcavityOrthogonal => "CONCAVITY_ORTHOGONAL",
            TheoremId::ConcavityBounds => "CONCAVITY_BOUNDS",
            TheoremId::JointConvexity => "JOINT_CONVEXITY",
            TheoremId::DivergenceMonotone => "DIVERGENCE_MONOTONE",
        }
    }

    /// The statement being checked, in formula form.
    pub fn statement(self) -> &'static str {
        match self {
            TheoremId::Klein => "d(ρ‖σ) = ½ tr(ρ-σ)² ≥ 0, with d(ρ‖ρ) = 0",
            TheoremId::PureZero => "L(|ψ⟩⟨ψ|) = 0",
            TheoremId::MaxMixed => "L(ρ) ≤ 1 - 1/d, with equality at I/d",
            TheoremId::PureMarginals => "L(tr_B |ψ⟩⟨ψ|) = L(tr_A |ψ⟩⟨ψ|)",
            TheoremId::ProductFormula => "L(ρ⊗σ) = L(ρ) + L(σ) - L(ρ)L(σ)",
            TheoremId::DiagSubadditivity => {
                "L(A,B) ≤ L(A) + L(B) for states diagonal in a product basis"
            }
            TheoremId::MeasurementMonotone => "L(Σ P_i ρ P_i) ≥ L(ρ)",
            TheoremId::ConcavityOrthogonal => "Σ p_i L(ρ_i) < L(Σ p_i ρ_i) for orthogonal supports",
            TheoremId::ConcavityBounds => {
                "Σ p_i L(ρ_i) - L(p) ≤ L(Σ p_i ρ_i) ≤ Σ p_i L(ρ_i) + L(p)"
            }
            TheoremId::JointConvexity => {
                "d(λρ₁+(1-λ)ρ₂ ‖ λσ₁+(1-λ)σ₂) ≤ λ d(ρ₁‖σ₁) + (1-λ) d(ρ₂‖σ₂)"
            }
            TheoremId::DivergenceMonotone => "d(ρ_A⊗I/b ‖ σ_A⊗I/b) ≤ d(ρ_AB ‖ σ_AB)",
        }
    }

    /// Whether instances are indexed by `(dim_a, dim_b)` pairs.
    pub fn is_bipartite(self) -> bool {
        matches!(
            self,
            TheoremId::PureMarginals
                | TheoremId::ProductFormula
                | TheoremId::DiagSubadditivity
                | TheoremId::DivergenceMonotone
        )
    }

    pub fn default_dims(self) -> Vec<DimSpec> {
        use DimSpec::{Pair, Single};
        match self {
            TheoremId::Klein | TheoremId::MaxMixed => {
                vec![Single(2), Single(3), Single(4), Single(8)]
            }
            TheoremId::PureZero | TheoremId::MeasurementMonotone => {
                vec![Single(2), Single(4), Single(8)]
            }
            TheoremId::ConcavityOrthogonal | TheoremId::ConcavityBounds => {
                vec![Single(2), Single(3), Single(4)]
            }
            TheoremId::JointConvexity => vec![Single(2), Single(4)],
            TheoremId::PureMarginals => vec![Pair(2, 2), Pair(2, 3), Pair(3, 4)],
            TheoremId::ProductFormula | TheoremId::DiagSubadditivity => {
                vec![Pair(2, 2), Pair(2, 3), Pair(3, 3)]
            }
            TheoremId::DivergenceMonotone => vec![Pair(2, 2), Pair(2, 3), Pair(3, 2)],
        }
    }

    fn index(self) -> u64 {
        Self::ALL
            .iter()
            .position(|&t| t == self)
            .expect("listed in ALL") as u64
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL
                    .iter()
                    .map(|t| t.name().to_ascii_lowercase())
                    .collect();
                Error::Config(format!(
                    "unknown theorem '{s}'; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

/// Instance dimension: a single system or a bipartite `A ⊗ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimSpec {
    Single(usize),
    Pair(usize, usize),
}

impl DimSpec {
    pub fn total(self) -> usize {
        match self {
            DimSpec::Single(d) => d,
            DimSpec::Pair(a, b) => a * b,
        }
    }

    /// Parses a comma-separated list such as `2x2,2x3` or `2,4,8`.
    pub fn parse_list(s: &str) -> Result<Vec<DimSpec>> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for DimSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimSpec::Single(d) => write!(f, "{d}"),
            DimSpec::Pair(a, b) => write!(f, "{a}x{b}"),
        }
    }
}

impl FromStr for DimSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid dimension '{s}' (expected e.g. 4 or 2x3)"));
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&d| d >= 1)
                .ok_or_else(bad)
        };
        match s.trim().split_once(['x', 'X']) {
            Some((a, b)) => Ok(DimSpec::Pair(parse(a)?, parse(b)?)),
            None => Ok(DimSpec::Single(parse(s)?)),
        }
    }
}

/// Parameters of a check run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Instance dimensions, used round-robin over trials. Empty selects the
    /// theorem's defaults.
    pub dims: Vec<DimSpec>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            dims: Vec::new(),
            trials: 200,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

impl CheckConfig {
    pub fn new(dims: Vec<DimSpec>, trials: usize, seed: u64) -> Self {
        Self {
            dims,
            trials,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Dimensions this config assigns to `theorem`.
    fn dims_for(&self, theorem: TheoremId) -> Result<Vec<DimSpec>> {
        let dims = if self.dims.is_empty() {
            theorem.default_dims()
        } else {
            self.dims.clone()
        };
        for &d in &dims {
            if theorem.is_bipartite() && matches!(d, DimSpec::Single(_)) {
                return Err(Error::Config(format!(
                    "{theorem} needs bipartite dimensions such as 2x2, got {d}"
                )));
            }
            if theorem == TheoremId::ConcavityOrthogonal && d.total() < 2 {
                return Err(Error::Config(format!(
                    "{theorem} needs dimension at least 2, got {d}"
                )));
            }
        }
        Ok(dims)
    }

    /// Per-theorem config for [`run_all`]: keeps only the dimensions of the
    /// right kind, falling back to the defaults when none remain.
    fn derive_for(&self, theorem: TheoremId) -> CheckConfig {
        let dims: Vec<DimSpec> = self
            .dims
            .iter()
            .copied()
            .filter(|d| theorem.is_bipartite() == matches!(d, DimSpec::Pair(..)))
            .filter(|d| theorem != TheoremId::ConcavityOrthogonal || d.total() >= 2)
            .collect();
        CheckConfig {
            dims,
            ..self.clone()
        }
    }
}

/// Enough to regenerate one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub seed: u64,
    pub trial: usize,
    pub dims: DimSpec,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} trial={} dims={}",
            self.seed, self.trial, self.dims
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance: Instance,
    pub slack: f64,
}

/// Outcome of one [`run_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem: TheoremId,
    pub trials_run: usize,
    pub failures: usize,
    /// Smallest slack observed over all trials.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub failing_seeds: Vec<FailureRecord>,
    /// Named secondary diagnostics, each aggregated to its worst value.
    pub margins: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Copy, Debug)]
enum Worst {
    Min,
    Max,
}

#[derive(Debug)]
struct TrialOutcome {
    slack: f64,
    extras: Vec<(&'static str, f64, Worst)>,
}

impl TrialOutcome {
    fn new(slack: f64) -> Self {
        Self {
            slack,
            extras: Vec::new(),
        }
    }

    fn with(mut self, name: &'static str, value: f64, worst: Worst) -> Self {
        self.extras.push((name, value, worst));
        self
    }
}

/// Runs `config.trials` instances of `theorem`.
pub fn run_check(theorem: TheoremId, config: &CheckConfig) -> Result<CheckReport> {
    config.validate()?;
    let dims = config.dims_for(theorem)?;
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let instance = Instance {
                seed: config.seed,
                trial,
                dims: dims[trial % dims.len()],
            };
            run_trial(theorem, instance)
        })
        .collect::<Result<_>>()?;

    let mut report = CheckReport {
        theorem,
        trials_run: outcomes.len(),
        failures: 0,
        worst_margin: f64::INFINITY,
        tolerance: config.tolerance,
        failing_seeds: Vec::new(),
        margins: BTreeMap::new(),
    };
    for (trial, outcome) in outcomes.iter().enumerate() {
        report.worst_margin = report.worst_margin.min(outcome.slack);
        if outcome.slack < -config.tolerance || outcome.slack.is_nan() {
            report.failures += 1;
            report.failing_seeds.push(FailureRecord {
                instance: Instance {
                    seed: config.seed,
                    trial,
                    dims: dims[trial % dims.len()],
                },
                slack: outcome.slack,
            });
        }
        for &(name, value, worst) in &outcome.extras {
            let entry = report.margins.entry(name.to_string()).or_insert(value);
            *entry = match worst {
                Worst::Min => entry.min(value),
                Worst::Max => entry.max(value),
            };
        }
    }
    Ok(report)
}

/// Runs every theorem, deriving per-theorem dimensions from `config`.
pub fn run_all(config: &CheckConfig) -> Result<Vec<CheckReport>> {
    config.validate()?;
    TheoremId::ALL
        .iter()
        .map(|&t| run_check(t, &config.derive_for(t)))
        .collect()
}

/// Recomputes the slack of a single trial.
pub fn replay(theorem: TheoremId, instance: Instance) -> Result<f64> {
    Ok(run_trial(theorem, instance)?.slack)
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_rank<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> usize {
    rng.random_range(1..=dim)
}

fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Density<f64>> {
    let rank = random_rank(dim, rng);
    random_density_with(dim, rank, rng)
}

fn split_of(dims: DimSpec) -> Result<BipartiteSplit> {
    match dims {
        DimSpec::Pair(a, b) => BipartiteSplit::new(a, b),
        DimSpec::Single(d) => Err(Error::Config(format!(
            "bipartite dimensions required, got {d}"
        ))),
    }
}

fn run_trial(theorem: TheoremId, instance: Instance) -> Result<TrialOutcome> {
    let mut rng = trial_rng(
        instance.seed,
        (theorem.index() << 32) | instance.trial as u64,
    );
    let rng = &mut rng;
    let d = instance.dims.total();
    match theorem {
        TheoremId::Klein => klein(d, rng),
        TheoremId::PureZero => pure_zero(d, rng),
        TheoremId::MaxMixed => max_mixed(d, rng),
        TheoremId::PureMarginals => pure_marginals(split_of(instance.dims)?, rng),
        TheoremId::ProductFormula => product_formula(split_of(instance.dims)?, rng),
        TheoremId::DiagSubadditivity => diag_subadditivity(split_of(instance.dims)?, rng),
        TheoremId::MeasurementMonotone => measurement_monotone(d, rng),
        TheoremId::ConcavityOrthogonal => concavity_orthogonal(d, rng),
        TheoremId::ConcavityBounds => concavity_bounds(d, rng),
        TheoremId::JointConvexity => joint_convexity(d, rng),
        TheoremId::DivergenceMonotone => divergence_monotone(split_of(instance.dims)?, rng),
    }
}

fn klein(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rho = random_state(d, rng)?;
    let sigma = random_state(d, rng)?;
    let div = logical_divergence(&rho, &sigma)?;
    let self_div = logical_divergence(&rho, &rho)?;
    let two_path = (divergence_terms(&rho, &sigma)?.value() - div).abs();
    Ok(TrialOutcome::new(div.min(-self_div).min(-two_path))
        .with("min_divergence", div, Worst::Min)
        .with("max_self_divergence", self_div, Worst::Max)
        .with("max_two_path_gap", two_path, Worst::Max))
}

fn pure_zero(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rho = random_density_with::<f64, _>(d, 1, rng)?;
    let l = logical_entropy(&rho)?;
    Ok(TrialOutcome::new(-l).with("max_entropy", l, Worst::Max))
}

fn max_mixed(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let bound = 1.0 - 1.0 / d as f64;
    let rho = random_state(d, rng)?;
    let l = logical_entropy(&rho)?;
    let equality = (logical_entropy(&Density::<f64>::maximally_mixed(d))? - bound).abs();
    Ok(TrialOutcome::new((bound - l).min(-equality))
        .with("min_gap_to_bound", bound - l, Worst::Min)
        .with("max_equality_residual", equality, Worst::Max))
}

fn pure_marginals(split: BipartiteSplit, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let psi = random_ket::<f64, _>(split.total(), rng).with_split(split)?;
    let joint = psi.projector();
    let la = logical_entropy(&joint.partial_trace(split, Subsystem::B)?)?;
    let lb = logical_entropy(&joint.partial_trace(split, Subsystem::A)?)?;
    // both marginals share the squared Schmidt coefficients as spectrum
    let spectral = 1.0
        - schmidt(&psi)?
            .coefficients
            .iter()
            .map(|c| c.powi(4))
            .sum::<f64>();
    let gap = (la - lb).abs();
    let schmidt_gap = (la - spectral).abs();
    Ok(TrialOutcome::new(-gap.max(schmidt_gap))
        .with("max_marginal_gap", gap, Worst::Max)
        .with("max_schmidt_gap", schmidt_gap, Worst::Max))
}

fn product_formula(split: BipartiteSplit, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rho = random_state(split.dim_a, rng)?;
    let sigma = random_state(split.dim_b, rng)?;
    let (la, lb) = (logical_entropy(&rho)?, logical_entropy(&sigma)?);
    let joint = logical_entropy(&rho.tensor(&sigma)?)?;
    let gap = (joint - (la + lb - la * lb)).abs();
    Ok(TrialOutcome::new(-gap).with("max_formula_gap", gap, Worst::Max))
}

/// Joint distribution on the product basis, sparsified at random so that
/// low-rank (and rank-one, equality) cases occur, then rotated by a random
/// local unitary `U_A ⊗ U_B`.
fn diag_subadditivity(split: BipartiteSplit, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let n = split.total();
    let mut weights: Vec<f64> = random_probability_vector::<f64, _>(n, rng)
        .as_slice()
        .to_vec();
    let keep: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    if keep.iter().any(|&k| k) {
        for (w, &k) in weights.iter_mut().zip(&keep) {
            if !k {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
    }
    let diag = Matrix::from_diagonal(&weights);
    let ua = random_unitary::<f64, _>(split.dim_a, rng);
    let ub = random_unitary::<f64, _>(split.dim_b, rng);
    let local = tensor_product(&ua, &ub)?;
    let joint = Density::new(diag.conjugate_by(&local))?;
    let l_ab = logical_entropy(&joint)?;
    let l_a = logical_entropy(&joint.partial_trace(split, Subsystem::B)?)?;
    let l_b = logical_entropy(&joint.partial_trace(split, Subsystem::A)?)?;
    let slack = l_a + l_b - l_ab;
    Ok(TrialOutcome::new(slack).with("min_subadditivity_gap", slack, Worst::Min))
}

fn measurement_monotone(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rho = random_state(d, rng)?;
    let m = random_measurement::<f64, _>(d, rng);
    let after = measure(&rho, &m)?;
    let gain = logical_entropy(&after)? - logical_entropy(&rho)?;
    let fixed_point = measure(&after, &m)?.matrix().max_abs_diff(after.matrix());
    Ok(TrialOutcome::new(gain)
        .with("min_entropy_gain", gain, Worst::Min)
        .with("max_fixed_point_residual", fixed_point, Worst::Max)
        .with(
            "min_projector_count",
            m.projectors().len() as f64,
            Worst::Min,
        )
        .with(
            "max_projector_count",
            m.projectors().len() as f64,
            Worst::Max,
        ))
}

/// `σ` embedded into the span of the orthonormal `columns`.
fn embed(sigma: &Density<f64>, columns: &[Vec<Complex<f64>>], dim: usize) -> Result<Density<f64>> {
    let mut m = Matrix::zeros(dim);
    for (a, u) in columns.iter().enumerate() {
        for (b, v) in columns.iter().enumerate() {
            let s = sigma.matrix()[(a, b)];
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += u[i] * s * v[j].conj();
                }
            }
        }
    }
    Density::new(m)
}

/// Weights `0.8·Dirichlet + 0.2·uniform`, so every weight is at least
/// `0.2/k` (for two components, `λ ∈ [0.1, 0.9]`).
fn non_degenerate_weights(k: usize, rng: &mut ChaCha8Rng) -> Result<ProbabilityVector<f64>> {
    let raw = random_probability_vector::<f64, _>(k, rng);
    ProbabilityVector::new(
        raw.as_slice()
            .iter()
            .map(|p| 0.8 * p + 0.2 / k as f64)
            .collect(),
    )
}

fn concavity_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let k = rng.random_range(2..=d.min(4));
    // k consecutive non-empty column groups
    let mut cuts: Vec<usize> = (1..d).collect();
    for i in 0..cuts.len() {
        let j = rng.random_range(i..cuts.len());
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(d);

    let basis = random_unitary::<f64, _>(d, rng);
    let column = |c: usize| (0..d).map(|i| basis[(i, c)]).collect::<Vec<_>>();
    let mut components = Vec::with_capacity(k);
    for w in cuts.windows(2) {
        let cols: Vec<_> = (w[0]..w[1]).map(column).collect();
        let local = random_state(cols.len(), rng)?;
        components.push(embed(&local, &cols, d)?);
    }
    let weights = non_degenerate_weights(k, rng)?;
    let mixture = Mixture::new(weights, components)?;
    let gap = logical_entropy(&mixture.state())? - average_entropy(&mixture)?;
    Ok(TrialOutcome::new(gap).with("min_gap", gap, Worst::Min))
}

fn average_entropy(mixture: &Mixture<f64>) -> Result<f64> {
    mixture
        .weights()
        .as_slice()
        .iter()
        .zip(mixture.components())
        .map(|(&p, rho)| Ok(p * logical_entropy(rho)?))
        .sum()
}

fn concavity_bounds(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let k = rng.random_range(1..=4usize);
    let components = (0..k)
        .map(|_| random_state(d, rng))
        .collect::<Result<Vec<_>>>()?;
    let weights = random_probability_vector::<f64, _>(k, rng);
    let classical = distribution_logical_entropy(&weights);
    let mixture = Mixture::new(weights, components)?;
    let l = logical_entropy(&mixture.state())?;
    let avg = average_entropy(&mixture)?;
    let lower = l - (avg - classical);
    let upper = avg + classical - l;

    // L(ρ) ≤ L(ρ_AB) ≤ L(ρ) + L(p) on the flagged extension
    let (flagged, split) = mix_with_flags(&mixture);
    let l_joint = logical_entropy(&flagged)?;
    let l_system = logical_entropy(&flagged.partial_trace(split, Subsystem::B)?)?;
    let l_flags = logical_entropy(&flagged.partial_trace(split, Subsystem::A)?)?;
    let chain = (l_joint - l_system).min(l_system + l_flags - l_joint);

    Ok(TrialOutcome::new(lower.min(upper).min(chain))
        .with("lower_margin", lower, Worst::Min)
        .with("upper_margin", upper, Worst::Min)
        .with("flag_chain_margin", chain, Worst::Min))
}

fn joint_convexity(d: usize, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let r1 = random_state(d, rng)?;
    let r2 = random_state(d, rng)?;
    let s1 = random_state(d, rng)?;
    let s2 = random_state(d, rng)?;
    let lambda: f64 = rng.random();
    let lhs = logical_divergence(
        &r1.convex_combination(lambda, &r2)?,
        &s1.convex_combination(lambda, &s2)?,
    )?;
    let rhs =
        lambda * logical_divergence(&r1, &s1)? + (1.0 - lambda) * logical_divergence(&r2, &s2)?;
    Ok(TrialOutcome::new(rhs - lhs).with("min_convexity_gap", rhs - lhs, Worst::Min))
}

fn divergence_monotone(split: BipartiteSplit, rng: &mut ChaCha8Rng) -> Result<TrialOutcome> {
    let rho = random_state(split.total(), rng)?;
    let sigma = random_state(split.total(), rng)?;
    let b = split.dim_b;
    let flat = Matrix::<f64>::maximally_mixed(b);

    let direct = |s: &Density<f64>| -> Result<Density<f64>> {
        let reduced = s.partial_trace(split, Subsystem::B)?;
        Density::new(tensor_product(reduced.matrix(), &flat)?)
    };
    let (tw_rho, tw_sigma) = (
        twirl_subsystem_b(&rho, split)?,
        twirl_subsystem_b(&sigma, split)?,
    );
    let (dir_rho, dir_sigma) = (direct(&rho)?, direct(&sigma)?);
    let residual = frobenius_distance_sq(tw_rho.matrix(), dir_rho.matrix())?
        .sqrt()
        .max(frobenius_distance_sq(tw_sigma.matrix(), dir_sigma.matrix())?.sqrt());

    let full = logical_divergence(&rho, &sigma)?;
    let twirled = logical_divergence(&tw_rho, &tw_sigma)?;
    let two_path = (twirled - logical_divergence(&dir_rho, &dir_sigma)?).abs();
    // equivalent reduced form: d(ρ_A‖σ_A) ≤ b·d(ρ_AB‖σ_AB)
    let reduced = b as f64 * full
        - logical_divergence(
            &rho.partial_trace(split, Subsystem::B)?,
            &sigma.partial_trace(split, Subsystem::B)?,
        )?;

    Ok(
        TrialOutcome::new((full - twirled).min(-two_path).min(-residual))
            .with("min_monotonicity_gap", full - twirled, Worst::Min)
            .with("min_reduced_gap", reduced, Worst::Min)
            .with("max_two_path_gap", two_path, Worst::Max)
            .with("max_twirl_residual", residual, Worst::Max),
    )
}

/// Distribution of bipartite states explored by
/// [`search_subadditivity_violation_in`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFamily {
    /// Ginibre states of random rank on the joint space.
    Generic,
    /// `ρ_A ⊗ ρ_B`.
    Product,
    /// Diagonal in a random product basis.
    ProductDiagonal,
}

/// A state with `L(A,B) > L(A) + L(B) + tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityViolation {
    pub instance: Instance,
    pub family: SampleFamily,
    pub joint: f64,
    pub marginal_a: f64,
    pub marginal_b: f64,
}

impl SubadditivityViolation {
    pub fn excess(&self) -> f64 {
        self.joint - self.marginal_a - self.marginal_b
    }
}

/// Generic-state search; see [`search_subadditivity_violation_in`].
pub fn search_subadditivity_violation(
    config: &CheckConfig,
) -> Result<Option<SubadditivityViolation>> {
    search_subadditivity_violation_in(config, SampleFamily::Generic)
}

/// Samples `config.trials` bipartite states from `family` and returns the
/// first one that violates subadditivity by more than the tolerance.
pub fn search_subadditivity_violation_in(
    config: &CheckConfig,
    family: SampleFamily,
) -> Result<Option<SubadditivityViolation>> {
    config.validate()?;
    let dims = if config.dims.is_empty() {
        vec![DimSpec::Pair(2, 2), DimSpec::Pair(2, 3)]
    } else {
        config.dims.clone()
    };
    for trial in 0..config.trials {
        let instance = Instance {
            seed: config.seed,
            trial,
            dims: dims[trial % dims.len()],
        };
        let found = subadditivity_sample(family, instance)?;
        if found.excess() > config.tolerance {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Regenerates the sample of one search trial.
pub fn subadditivity_sample(
    family: SampleFamily,
    instance: Instance,
) -> Result<SubadditivityViolation> {
    let split = split_of(instance.dims)?;
    let stream = (u64::from(u32::MAX) << 32) | instance.trial as u64;
    let mut rng = trial_rng(instance.seed, stream);
    let rng = &mut rng;
    let joint = match family {
        SampleFamily::Generic => random_state(split.total(), rng)?,
        SampleFamily::Product => {
            random_state(split.dim_a, rng)?.tensor(&random_state(split.dim_b, rng)?)?
        }
        SampleFamily::ProductDiagonal => {
            let p = random_probability_vector::<f64, _>(split.total(), rng);
            let local = tensor_product(
                &random_unitary::<f64, _>(split.dim_a, rng),
                &random_unitary::<f64, _>(split.dim_b, rng),
            )?;
            Density::new(Matrix::from_diagonal(p.as_slice()).conjugate_by(&local))?
        }
    };
    Ok(SubadditivityViolation {
        instance,
        family,
        joint: logical_entropy(&joint)?,
        marginal_a: logical_entropy(&joint.partial_trace(split, Subsystem::B)?)?,
        marginal_b: logical_entropy(&joint.partial_trace(split, Subsystem::A)?)?,
    })
}
