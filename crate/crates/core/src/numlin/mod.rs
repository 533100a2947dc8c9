//! Dense complex linear-algebra kernels for desk-scale problems
//! (matrix dimension ≤ 32, polynomial degree ≤ 64).

mod lu;
mod matrix;
mod roots;
mod svd;

pub use lu::determinant;
pub use matrix::{ComplexMatrix, ComplexVector, C64};
pub use roots::{poly_roots, ScalarPolynomial};
pub use svd::{right_svd, singular_values, smallest_singular_triplet, spectral_norm, RightSvd, SingularTriplet};

/// Default relative tolerance used by the regularity and degree tests.
pub const TOL: f64 = 1e-10;

/// Numerical thresholds used across the crate.
///
/// Defaults match the documented constants; the CLI can override `tol`
/// through `--tol` or the `POLYCOND_TOL` environment variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative threshold for treating determinant coefficients as zero and
    /// for the regularity test.
    pub tol: f64,
    /// Eigenpair residual bound, relative to the polynomial scale.
    pub residual: f64,
    /// σ_min above this fraction of the scale means "not an eigenvalue".
    pub eigen_acceptance: f64,
    /// Chordal distance under which two computed eigenvalues form a cluster.
    /// A double root splits by about √(machine epsilon) in floating point,
    /// so this sits well above 1e-8.
    pub cluster: f64,
    /// Relative size of the homogeneous derivative pairing below which an
    /// eigenvalue is not considered simple.
    pub simple_denominator: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: TOL,
            residual: 1e-8,
            eigen_acceptance: 1e-6,
            cluster: 1e-6,
            simple_denominator: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}
