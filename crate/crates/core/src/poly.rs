//! Matrix polynomials `P(λ) = Σ λ^i B_i` with a declared grade, their
//! homogeneous form `P(α, β) = Σ α^i β^{k-i} B_i`, and perturbation weights.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{determinant, spectral_norm, ComplexMatrix, ScalarPolynomial, C64, TOL};

/// Square matrix polynomial of declared grade `k`.
///
/// The grade is metadata: `B_k` may be the zero matrix, in which case the
/// polynomial has infinite eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    n: usize,
    coefficients: Vec<ComplexMatrix>,
    norms: Vec<f64>,
}

impl MatrixPolynomial {
    /// `coefficients[i]` is `B_i`; the grade is `coefficients.len() - 1`.
    pub fn new(coefficients: Vec<ComplexMatrix>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidInput("a matrix polynomial needs at least one coefficient".into()))?;
        let n = first.rows();
        for (i, b) in coefficients.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::InvalidInput(format!(
                    "coefficient B_{i} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput(format!("coefficient B_{i} has non-finite entries")));
            }
        }
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        let norms = coefficients.iter().map(spectral_norm).collect::<Result<Vec<_>>>()?;
        Ok(Self { n, coefficients, norms })
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared grade.
    pub fn grade(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[ComplexMatrix] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> &ComplexMatrix {
        &self.coefficients[i]
    }

    /// ‖B_i‖₂ for each coefficient.
    pub fn coefficient_norms(&self) -> &[f64] {
        &self.norms
    }

    /// `max_i ‖B_i‖₂`, the reference scale for residual tests.
    pub fn scale(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    /// Horner evaluation of `Σ λ^i B_i`.
    pub fn evaluate(&self, lambda: C64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for b in self.coefficients.iter().rev() {
            acc = acc.scale(lambda);
            acc.add_scaled(C64::new(1.0, 0.0), b);
        }
        acc
    }

    /// `Σ α^i β^{k-i} B_i`.
    pub fn evaluate_homogeneous(&self, alpha: C64, beta: C64) -> Result<ComplexMatrix> {
        check_nonzero_pair(alpha, beta)?;
        let k = self.grade();
        let pa = powers(alpha, k);
        let pb = powers(beta, k);
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (i, b) in self.coefficients.iter().enumerate() {
            acc.add_scaled(pa[i] * pb[k - i], b);
        }
        Ok(acc)
    }

    /// `P'(λ) = Σ_{i≥1} i λ^{i-1} B_i`.
    pub fn derivative_eval(&self, lambda: C64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (i, b) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = acc.scale(lambda);
            acc.add_scaled(C64::new(i as f64, 0.0), b);
        }
        acc
    }

    /// Partial derivatives `(D_α P, D_β P)` of the homogeneous form.
    pub fn partials_homogeneous(&self, alpha: C64, beta: C64) -> Result<(ComplexMatrix, ComplexMatrix)> {
        check_nonzero_pair(alpha, beta)?;
        let k = self.grade();
        let pa = powers(alpha, k);
        let pb = powers(beta, k);
        let mut da = ComplexMatrix::zeros(self.n, self.n);
        let mut db = ComplexMatrix::zeros(self.n, self.n);
        for (i, b) in self.coefficients.iter().enumerate() {
            if i >= 1 {
                da.add_scaled(pa[i - 1] * pb[k - i] * i as f64, b);
            }
            if i < k {
                db.add_scaled(pa[i] * pb[k - i - 1] * (k - i) as f64, b);
            }
        }
        Ok((da, db))
    }

    /// `rev P(λ) = λ^k P(1/λ)`: same grade, coefficients in reverse order.
    pub fn reversal(&self) -> Self {
        Self {
            n: self.n,
            coefficients: self.coefficients.iter().rev().cloned().collect(),
            norms: self.norms.iter().rev().copied().collect(),
        }
    }

    /// `P + ΔP`; both must share dimension and grade.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.grade() != other.grade() {
            return Err(Error::InvalidInput("polynomials differ in dimension or grade".into()));
        }
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(coefficients)
    }

    /// `c P` for a scalar `c`.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            n: self.n,
            coefficients: self.coefficients.iter().map(|b| b.scale(c)).collect(),
            norms: self.norms.iter().map(|v| v * c.norm()).collect(),
        }
    }

    /// Polynomial with independent standard complex Gaussian entries,
    /// reproducible from `seed`.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let coefficients = (0..=k)
            .map(|_| {
                ComplexMatrix::from_fn(n, n, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re * h, im * h)
                })
            })
            .collect();
        Self::new(coefficients)
    }

    /// Radius of the interpolation circle for the determinant.
    pub fn det_radius(&self) -> f64 {
        let k = self.grade();
        let lead = self.norms[k];
        if k == 0 || lead == 0.0 {
            return 1.0;
        }
        (self.scale() / lead).powf(1.0 / k as f64).max(1.0)
    }

    /// `det P(λ)` as a scalar polynomial of grade `nk`, by interpolation at
    /// `nk + 1` equispaced points on a circle.
    pub fn det_poly(&self) -> DetPolynomial {
        let nk = self.n * self.grade();
        let count = nk + 1;
        let r = self.det_radius();
        let node = |t: f64| C64::from_polar(r, 2.0 * PI * t / count as f64);
        let values: Vec<C64> = (0..count).map(|m| determinant(&self.evaluate(node(m as f64)))).collect();

        // Inverse DFT of the samples, then undo the radius scaling.
        let coefficients: Vec<C64> = (0..count)
            .map(|j| {
                let s: C64 = values
                    .iter()
                    .enumerate()
                    .map(|(m, &d)| d * C64::from_polar(1.0, -2.0 * PI * ((j * m) % count) as f64 / count as f64))
                    .sum();
                s / (count as f64 * r.powi(j as i32))
            })
            .collect();
        let poly = ScalarPolynomial::new(coefficients);

        let sample_scale = values.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let check = (0..3.min(count))
            .map(|m| {
                let z = node(m as f64 + 0.5);
                (determinant(&self.evaluate(z)) - poly.eval(z)).norm()
            })
            .fold(0.0, f64::max);
        let interpolation_residual = if sample_scale > 0.0 { check / sample_scale } else { check };
        DetPolynomial {
            poly,
            radius: r,
            interpolation_residual,
        }
    }

    /// Regularity test with the default tolerance.
    pub fn is_regular(&self) -> Regularity {
        self.is_regular_with(TOL)
    }

    /// `det P ≢ 0`, judged on the radius-scaled determinant coefficients
    /// against `(max_i ‖B_i‖₂ r^i)^n`.
    pub fn is_regular_with(&self, tol: f64) -> Regularity {
        let det = self.det_poly();
        let measure = det.scaled_coefficients().iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = det.radius;
        let scale = self
            .norms
            .iter()
            .enumerate()
            .map(|(i, v)| v * r.powi(i as i32))
            .fold(0.0, f64::max)
            .powi(self.n as i32);
        Regularity {
            regular: measure > tol * scale,
            measure,
            threshold: tol * scale,
            det,
        }
    }
}

fn check_nonzero_pair(alpha: C64, beta: C64) -> Result<()> {
    if alpha.norm() == 0.0 && beta.norm() == 0.0 {
        return Err(Error::InvalidInput("(α, β) = (0, 0) does not define a line".into()));
    }
    Ok(())
}

fn powers(z: C64, k: usize) -> Vec<C64> {
    let mut p = Vec::with_capacity(k + 1);
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..=k {
        p.push(acc);
        acc *= z;
    }
    p
}

/// Determinant polynomial together with its interpolation data.
#[derive(Debug, Clone, PartialEq)]
pub struct DetPolynomial {
    pub poly: ScalarPolynomial,
    /// Radius of the interpolation circle.
    pub radius: f64,
    /// Relative mismatch at off-node check points.
    pub interpolation_residual: f64,
}

impl DetPolynomial {
    /// `|c_j| r^j`: coefficient magnitudes as seen on the interpolation circle.
    pub fn scaled_coefficients(&self) -> Vec<f64> {
        self.poly
            .coefficients()
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * self.radius.powi(j as i32))
            .collect()
    }
}

/// Outcome of the regularity test; carries the determinant as certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    pub measure: f64,
    pub threshold: f64,
    pub det: DetPolynomial,
}

/// How the perturbation weights ω_i were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// ω_i = ‖B_i‖₂
    CoefficientNorms,
    /// ω_i = max_j ‖B_j‖₂
    MaxNorm,
    /// ω_i = 1
    Absolute,
    Custom,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::CoefficientNorms => "coeff",
            WeightMode::MaxNorm => "max",
            WeightMode::Absolute => "abs",
            WeightMode::Custom => "custom",
        }
    }
}

/// Nonnegative weights ω_0..ω_k bounding admissible perturbations ‖ΔB_i‖₂ ≤ ε ω_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    mode: WeightMode,
    weights: Vec<f64>,
}

impl WeightScheme {
    /// Weights derived from `p` according to `mode`; `Custom` is rejected here.
    pub fn for_polynomial(mode: WeightMode, p: &MatrixPolynomial) -> Result<Self> {
        let k = p.grade();
        let weights = match mode {
            WeightMode::CoefficientNorms => p.coefficient_norms().to_vec(),
            WeightMode::MaxNorm => vec![p.scale(); k + 1],
            WeightMode::Absolute => vec![1.0; k + 1],
            WeightMode::Custom => {
                return Err(Error::InvalidInput("custom weights must be given explicitly".into()))
            }
        };
        Self::validated(mode, weights)
    }

    pub fn coefficient_norms(p: &MatrixPolynomial) -> Result<Self> {
        Self::for_polynomial(WeightMode::CoefficientNorms, p)
    }

    pub fn max_norm(p: &MatrixPolynomial) -> Result<Self> {
        Self::for_polynomial(WeightMode::MaxNorm, p)
    }

    /// ω_i = 1 for a grade-`k` polynomial.
    pub fn absolute(k: usize) -> Self {
        Self {
            mode: WeightMode::Absolute,
            weights: vec![1.0; k + 1],
        }
    }

    pub fn custom(weights: Vec<f64>) -> Result<Self> {
        Self::validated(WeightMode::Custom, weights)
    }

    fn validated(mode: WeightMode, weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        if !weights.iter().any(|&w| w > 0.0) {
            return Err(Error::InvalidInput("at least one weight must be positive".into()));
        }
        Ok(Self { mode, weights })
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Grade of the polynomial these weights belong to.
    pub fn grade(&self) -> usize {
        self.weights.len() - 1
    }

    /// Weights for `rev P`: ω_i stays attached to B_i, which sits at index `k - i`.
    pub fn reversed(&self) -> Self {
        Self {
            mode: self.mode,
            weights: self.weights.iter().rev().copied().collect(),
        }
    }

    pub(crate) fn check_grade(&self, p: &MatrixPolynomial) -> Result<()> {
        if self.weights.len() != p.grade() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} weights given for a grade-{} polynomial",
                self.weights.len(),
                p.grade()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_seeded() {
        let a = MatrixPolynomial::random(3, 2, 9).unwrap();
        assert_eq!(a, MatrixPolynomial::random(3, 2, 9).unwrap());
        assert_ne!(a, MatrixPolynomial::random(3, 2, 10).unwrap());
        assert_eq!((a.n(), a.grade()), (3, 2));
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(d)
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    fn example_pencil(eps: f64) -> MatrixPolynomial {
        let b1 = ComplexMatrix::from_rows(&[
            vec![c(1.0 / eps, 0.0), c(1.0 / eps, 0.0)],
            vec![c(1.0 / eps, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let b0 = ComplexMatrix::from_rows(&[vec![c(eps, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        MatrixPolynomial::new(vec![b0, b1]).unwrap()
    }

    #[test]
    fn evaluate_at_eigenvalue_is_zero() {
        let p = MatrixPolynomial::new(vec![diag(&[-2.0, -2.0]), ComplexMatrix::identity(2)]).unwrap();
        assert!(p.evaluate(c(2.0, 0.0)).is_zero());
    }

    #[test]
    fn evaluate_at_zero_is_constant_term() {
        let p = example_pencil(0.3);
        assert_eq!(p.evaluate(c(0.0, 0.0)), *p.coefficient(0));
    }

    #[test]
    fn homogeneous_special_points() {
        let p = example_pencil(0.5);
        let lam = c(0.3, -1.1);
        assert!(close(&p.evaluate_homogeneous(lam, c(1.0, 0.0)).unwrap(), &p.evaluate(lam), 1e-14));
        assert_eq!(p.evaluate_homogeneous(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), *p.coefficient(1));
        assert!(p.evaluate_homogeneous(c(0.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(p.partials_homogeneous(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_of_pure_power() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, 1.0)], vec![c(3.0, 0.0), c(-1.0, 0.0)]]).unwrap();
        let z = ComplexMatrix::zeros(2, 2);
        let p = MatrixPolynomial::new(vec![z.clone(), z, a.clone()]).unwrap();
        assert!(close(&p.derivative_eval(c(1.0, 0.0)), &a.scale(c(2.0, 0.0)), 1e-15));
        let constant = MatrixPolynomial::new(vec![a]).unwrap();
        assert!(constant.derivative_eval(c(0.7, 0.1)).is_zero());
    }

    #[test]
    fn pencil_partials_at_infinity() {
        let p = example_pencil(0.25);
        let (da, db) = p.partials_homogeneous(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(da, *p.coefficient(1));
        assert_eq!(db, *p.coefficient(0));
    }

    #[test]
    fn reversal_of_pencil_and_involution() {
        let p = example_pencil(0.5);
        let r = p.reversal();
        assert_eq!(r.coefficient(0), p.coefficient(1));
        assert_eq!(r.coefficient(1), p.coefficient(0));
        assert_eq!(r.reversal(), p);
        assert_eq!(r.grade(), p.grade());
        assert_eq!(r.n(), p.n());
    }

    #[test]
    fn regularity_certificates() {
        let p = MatrixPolynomial::new(vec![ComplexMatrix::identity(2), diag(&[1.0, 0.0])]).unwrap();
        let reg = p.is_regular();
        assert!(reg.regular);
        let d = reg.det.poly.coefficients();
        assert!((d[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((d[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(d[2].norm() < 1e-14);

        let nil = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let q = MatrixPolynomial::new(vec![nil.clone(), nil]).unwrap();
        assert!(!q.is_regular().regular);
    }

    #[test]
    fn det_of_shifted_identity() {
        let p = MatrixPolynomial::new(vec![diag(&[-1.0, -2.0]), ComplexMatrix::identity(2)]).unwrap();
        let d = p.det_poly();
        let want = [c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)];
        for (g, w) in d.poly.coefficients().iter().zip(want) {
            assert!((g - w).norm() < 1e-13, "{g} vs {w}");
        }
        assert!(d.interpolation_residual < 1e-13);
    }

    #[test]
    fn det_of_scalar_polynomial_is_itself() {
        let coeffs = [c(1.0, -1.0), c(0.5, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        let p = MatrixPolynomial::new(coeffs.iter().map(|&z| ComplexMatrix::from_diagonal(&[z])).collect()).unwrap();
        let d = p.det_poly();
        for (g, w) in d.poly.coefficients().iter().zip(coeffs) {
            assert!((g - w).norm() < 1e-13);
        }
    }

    #[test]
    fn example_pencil_det_matches_cofactor_expansion() {
        let p = example_pencil(0.5);
        let d = p.det_poly();
        for t in 0..10 {
            let lam = c(-1.3 + 0.37 * t as f64, 0.9 - 0.21 * t as f64);
            let m = p.evaluate(lam);
            let cofactor = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            assert!((d.poly.eval(lam) - cofactor).norm() <= 1e-10 * cofactor.norm().max(1.0));
        }
    }

    #[test]
    fn example_reversal_constant_term() {
        let p = example_pencil(0.5);
        let b1 = p.coefficient(1).clone();
        assert_eq!(*p.reversal().coefficient(0), b1);
    }

    #[test]
    fn weight_schemes() {
        let p = example_pencil(0.5);
        let norms = p.coefficient_norms().to_vec();
        let w = WeightScheme::coefficient_norms(&p).unwrap();
        assert_eq!(w.weights(), norms.as_slice());
        let m = WeightScheme::max_norm(&p).unwrap();
        assert!(m.weights().iter().all(|&v| v == p.scale()));
        assert_eq!(WeightScheme::absolute(1).weights(), &[1.0, 1.0]);
        assert_eq!(w.reversed().weights(), &[norms[1], norms[0]]);
        assert!(WeightScheme::custom(vec![0.0, 0.0]).is_err());
        assert!(WeightScheme::custom(vec![-1.0, 2.0]).is_err());
        assert!(WeightScheme::for_polynomial(WeightMode::Custom, &p).is_err());
    }

    #[test]
    fn zero_polynomial_has_no_coefficient_weights() {
        let z = ComplexMatrix::zeros(2, 2);
        let p = MatrixPolynomial::new(vec![z.clone(), z]).unwrap();
        assert!(WeightScheme::coefficient_norms(&p).is_err());
    }

    #[test]
    fn mismatched_coefficients_rejected() {
        let r = MatrixPolynomial::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
        assert!(MatrixPolynomial::new(vec![]).is_err());
    }
}
