//! Singular values by one-sided (Hestenes) Jacobi orthogonalization.
//!
//! The column pairs of `A V` are rotated until mutually orthogonal; the
//! column norms are then the singular values and `V` holds the right
//! singular vectors. Dimensions here are small (n ≤ 32), so the O(n³) per
//! sweep cost is irrelevant and Jacobi's high relative accuracy is welcome.

use super::matrix::{ComplexMatrix, ComplexVector, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) and right singular vectors (columns of `v`).
#[derive(Debug, Clone)]
pub struct RightSvd {
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided Jacobi on the columns of `a`.
pub fn right_svd(a: &ComplexMatrix) -> Result<RightSvd> {
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let m = a.rows();
    let n = a.cols();
    // Column-major working copies.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n).map(|j| ComplexVector::unit(n, j).as_slice().to_vec()).collect();

    let tol = f64::EPSILON * (m.max(n) as f64);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s, phase);
                rotate(&mut vcols, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NumericalFailure("Jacobi SVD did not converge".into()));
    }

    let mut order: Vec<(f64, usize)> = cols
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let singular_values = order.iter().map(|&(s, _)| s).collect();
    let v = ComplexMatrix::from_fn(n, n, |i, j| vcols[order[j].1][i]);
    Ok(RightSvd { singular_values, v })
}

// [a_p, a_q] <- [a_p, a_q e^{-iφ}] [[c, s], [-s, c]]
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let back = phase.conj();
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * back;
        let xp = *x;
        *x = xp * c - yq * s;
        *y = xp * s + yq * c;
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    // Jacobi on the wider orientation leaves zero columns; use the tall one.
    if a.rows() < a.cols() {
        return right_svd(&a.adjoint()).map(|s| s.singular_values[..a.rows()].to_vec());
    }
    right_svd(a).map(|s| s.singular_values)
}

/// Largest singular value ‖M‖₂.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Smallest singular value of a square matrix with unit left/right singular vectors.
#[derive(Debug, Clone)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub left: ComplexVector,
    pub right: ComplexVector,
}

/// Smallest singular triplet of a square matrix.
///
/// The left vector comes from an independent Jacobi run on `M*`, so it is
/// accurate even when σ_min is at rounding level. Its phase is aligned so
/// that `left* M right` is real and nonnegative.
pub fn smallest_singular_triplet(a: &ComplexMatrix) -> Result<SingularTriplet> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "smallest singular triplet needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.cols();
    let rs = right_svd(a)?;
    let ls = right_svd(&a.adjoint())?;
    let right = rs.v.column(n - 1).normalized();
    let mut left = ls.v.column(n - 1).normalized();
    let pairing = a.bilinear(&left, &right);
    if pairing.norm() > 0.0 {
        left = left.scale(pairing / pairing.norm());
    }
    // The two runs agree on σ_min up to rounding; report the residual-consistent value.
    let sigma = a.mul_vec(&right).norm();
    Ok(SingularTriplet { sigma, left, right })
}
