//! Eigenvalue condition numbers for matrix polynomials.
//!
//! For a square matrix polynomial `P(λ) = Σ λ^i B_i` of declared grade `k`
//! this crate computes, for every simple eigenvalue (finite or infinite):
//!
//! * the non-homogeneous absolute and relative condition numbers `κ_a`, `κ_r`;
//! * the homogeneous condition number `κ_h` built from the differential of
//!   the eigenvalue map (2-norm aggregation of the weights);
//! * the homogeneous condition number `κ_θ` measured in the chordal metric
//!   (1-norm aggregation of the weights);
//!
//! and checks the exact identities that tie them together. The [`perturb`]
//! module measures the same quantities empirically by perturbing the
//! coefficients.
//!
//! ```
//! use polycond::{cond, eig, numlin::{ComplexMatrix, C64}, poly::{MatrixPolynomial, WeightScheme}};
//!
//! // P(λ) = λ - 2
//! let p = MatrixPolynomial::new(vec![
//!     ComplexMatrix::from_diagonal(&[C64::new(-2.0, 0.0)]),
//!     ComplexMatrix::identity(1),
//! ]).unwrap();
//! let w = WeightScheme::absolute(1);
//! let triples = eig::eigentriples(&p).unwrap();
//! let report = cond::relation_report(&p, &triples[0], &w).unwrap();
//! assert!((report.kappa_theta - 0.6).abs() < 1e-14);
//! ```

pub mod cond;
pub mod eig;
mod error;
pub mod numlin;
pub mod perturb;
pub mod poly;

pub use error::{Error, Result};
