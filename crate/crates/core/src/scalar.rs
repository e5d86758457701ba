//! Real scalar abstraction shared by every numeric module.
//!
//! All matrix and state types are generic over a [`Real`] type; complex
//! entries are `num_complex::Complex<T>`. Each scalar carries its own set of
//! numerical tolerances so that the same code path can run in single or
//! double precision.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// A real floating-point scalar usable as the component type of complex
/// matrices.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Entrywise tolerance for `max |m - m†|`.
    const HERMITIAN_TOL: f64;
    /// Tolerance on `|tr ρ - 1|`.
    const TRACE_TOL: f64;
    /// Lowest admissible eigenvalue of a density matrix is `-PSD_TOL`.
    const PSD_TOL: f64;
    /// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
    const JACOBI_TOL: f64;
    /// Eigenvalues / singular values at or below this are treated as zero.
    const RANK_CUTOFF: f64;
    /// Negative round-off in an entropy value that is silently clamped to zero.
    const CLAMP_TOL: f64;

    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-10;
    const TRACE_TOL: f64 = 1e-10;
    const PSD_TOL: f64 = 1e-10;
    const JACOBI_TOL: f64 = 1e-12;
    const RANK_CUTOFF: f64 = 1e-12;
    const CLAMP_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const HERMITIAN_TOL: f64 = 1e-5;
    const TRACE_TOL: f64 = 1e-5;
    const PSD_TOL: f64 = 1e-5;
    const JACOBI_TOL: f64 = 1e-6;
    const RANK_CUTOFF: f64 = 1e-6;
    const CLAMP_TOL: f64 = 1e-6;
}

/// Squared modulus without the square root.
#[inline]
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}
