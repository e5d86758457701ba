//! # logent
//!
//! Quantum logical entropy `L(ρ) = tr ρ(1 - ρ) = 1 - tr ρ²` and the logical
//! divergence `d(ρ‖σ) = ½ tr(ρ - σ)²`, together with the linear algebra,
//! state constructions and channels needed to evaluate them, and a randomized
//! engine that checks their structural properties (non-negativity, bounds,
//! product formula, concavity, monotonicity under measurement and partial
//! trace) on generated instances.
//!
//! The numeric code is generic over the real scalar type ([`Real`], with
//! impls for `f32` and `f64`). The aliases at the crate root fix the scalar
//! to `f64`, which is what the property checker and the CLI use.
//!
//! ```
//! use logent::{DensityMatrix, logical_entropy};
//!
//! let rho = DensityMatrix::maximally_mixed(4);
//! assert!((logical_entropy(&rho).unwrap() - 0.75).abs() < 1e-15);
//! ```

#![forbid(unsafe_code)]

pub mod channels;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod qstate;
pub mod scalar;
pub mod theorems;

pub use channels::{
    measure, mix_with_flags, random_measurement, twirl_subsystem_b, weyl_mixture,
    ProjectiveMeasurement, UnitaryMixture,
};
pub use entropy::{
    classical_logical_entropy, distribution_logical_entropy, dit_count, divergence_terms,
    logical_divergence, logical_entropy, logical_entropy_spectral, tsallis_entropy,
    von_neumann_entropy, ClassicalPartition, DivergenceTerms, ProbabilityVector,
};
pub use error::{Error, Result};
pub use linalg::{
    frobenius_distance_sq, hermitian_eigen, partial_trace, tensor_product, trace_of_square,
    BipartiteSplit, Eigen, Matrix, Subsystem,
};
pub use qstate::{make_density, purify, random_density, schmidt, Density, Ket, Mixture, Schmidt};
pub use scalar::Real;
pub use theorems::{
    run_all, run_check, search_subadditivity_violation, CheckConfig, CheckReport, DimSpec,
    TheoremId,
};

/// Complex scalar used by the `f64` aliases.
pub type C64 = num_complex::Complex<f64>;

pub type ComplexMatrix = Matrix<f64>;
pub type DensityMatrix = Density<f64>;
pub type PureState = Ket<f64>;
pub type MixtureEnsemble = Mixture<f64>;
pub type SchmidtDecomposition = Schmidt<f64>;
pub type Eigendecomposition = Eigen<f64>;
pub type Probabilities = ProbabilityVector<f64>;
pub type Measurement = ProjectiveMeasurement<f64>;
pub type WeylMixture = UnitaryMixture<f64>;

pub type ComplexMatrixF32 = Matrix<f32>;
pub type DensityMatrixF32 = Density<f32>;
pub type PureStateF32 = Ket<f32>;
