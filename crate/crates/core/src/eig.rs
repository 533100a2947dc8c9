//! Eigenvalues of regular matrix polynomials as points of the projective
//! line, with left/right eigenvectors and simplicity certificates.
//!
//! Finite eigenvalues start as roots of `det P(λ)` and are then refined by
//! Newton steps on the matrix problem itself (`λ ← λ - u*P(λ)v / u*P'(λ)v`
//! with `u, v` the smallest singular vectors of `P(λ)`). Roots outside the
//! unit disk are refined on `rev P` at `1/λ`. The number of infinite
//! eigenvalues is the degree deficiency of the determinant.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::cond::chordal_distance;
use crate::error::{Error, Result};
use crate::numlin::{
    poly_roots, singular_values, smallest_singular_triplet, ComplexVector, ScalarPolynomial, Tolerances, C64,
};
use crate::poly::{DetPolynomial, MatrixPolynomial};

/// A line through the origin of C², stored as the representative with
/// `|α|² + |β|² = 1`, `β` real and nonnegative, and `α = 1` when `β = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    alpha: C64,
    beta: C64,
}

impl ProjectivePoint {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("(α, β) must be finite and not both zero".into()));
        }
        let (a, b) = (alpha / n, beta / n);
        if b.norm() == 0.0 {
            return Ok(Self::infinity());
        }
        let phase = b.conj() / b.norm();
        Ok(Self {
            alpha: a * phase,
            beta: C64::new(b.norm(), 0.0),
        })
    }

    /// The line of `(λ, 1)`.
    pub fn from_lambda(lambda: C64) -> Self {
        Self::new(lambda, C64::new(1.0, 0.0)).expect("(λ, 1) is never the zero pair")
    }

    /// The line `(1, 0)`.
    pub fn infinity() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.0),
        }
    }

    /// The line `(0, 1)`.
    pub fn zero() -> Self {
        Self {
            alpha: C64::new(0.0, 0.0),
            beta: C64::new(1.0, 0.0),
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn is_infinite(&self) -> bool {
        self.beta.norm() == 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.norm() == 0.0
    }

    /// `λ = α/β`, or `None` at infinity.
    pub fn lambda(&self) -> Option<C64> {
        (!self.is_infinite()).then(|| self.alpha / self.beta)
    }

    /// `|λ|`, `+∞` at infinity.
    pub fn abs_lambda(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.alpha.norm() / self.beta.norm()
        }
    }

    /// The line `(β, α)`: the eigenvalue `1/λ` of the reversal.
    pub fn reciprocal(&self) -> Self {
        Self::new(self.beta, self.alpha).expect("normalized point is nonzero")
    }

    /// Same line up to the given chordal tolerance.
    pub fn same_line(&self, other: &Self, tol: f64) -> bool {
        chordal_distance(self, other) <= tol
    }

    /// Ordering key: `|λ|`, then phase; infinity sorts last.
    fn sort_key(&self) -> (f64, f64) {
        match self.lambda() {
            Some(l) => (l.norm(), if l.norm() == 0.0 { 0.0 } else { l.arg() }),
            None => (f64::INFINITY, 0.0),
        }
    }

    pub fn display_lambda(&self) -> String {
        match self.lambda() {
            Some(l) => format!("{l}"),
            None => "inf".to_string(),
        }
    }
}

/// Relative difference under which two moduli count as equal when sorting.
const MODULUS_TIE: f64 = 1e-9;

/// Sorts by `|λ|` then phase, infinity last.
pub fn sort_points(points: &mut [ProjectivePoint]) {
    points.sort_by(compare_points);
}

fn compare_points(a: &ProjectivePoint, b: &ProjectivePoint) -> Ordering {
    let (ma, pa) = a.sort_key();
    let (mb, pb) = b.sort_key();
    // Moduli equal up to rounding (conjugate pairs, circles of roots) are ordered by phase.
    if ma.is_finite() && mb.is_finite() && (ma - mb).abs() <= MODULUS_TIE * ma.max(mb) {
        return pa.total_cmp(&pb);
    }
    ma.total_cmp(&mb)
}

/// A distinct eigenvalue and how many computed roots fell into its cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub point: ProjectivePoint,
    pub multiplicity: usize,
}

/// All `nk` eigenvalues of a regular polynomial.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Every computed eigenvalue, repeated by multiplicity, sorted.
    pub points: Vec<ProjectivePoint>,
    /// Distinct eigenvalues (chordal clusters) with multiplicities, sorted.
    pub eigenvalues: Vec<Eigenvalue>,
    pub det: DetPolynomial,
    pub zero_count: usize,
    pub infinite_count: usize,
    pub tolerances: Tolerances,
}

impl Spectrum {
    /// Number of computed eigenvalues within the cluster tolerance of `point`.
    pub fn multiplicity_of(&self, point: &ProjectivePoint) -> usize {
        self.points
            .iter()
            .filter(|q| chordal_distance(point, q) <= self.tolerances.cluster)
            .count()
    }
}

/// Distinct eigenvalues with multiplicities (total `nk`).
pub fn eigenvalues(p: &MatrixPolynomial) -> Result<Vec<Eigenvalue>> {
    Ok(spectrum(p, &Tolerances::default())?.eigenvalues)
}

/// Full eigenvalue computation.
pub fn spectrum(p: &MatrixPolynomial, tol: &Tolerances) -> Result<Spectrum> {
    let reg = p.is_regular_with(tol.tol);
    if !reg.regular {
        return Err(Error::NotRegular);
    }
    let det = reg.det;
    let nk = p.n() * p.grade();
    let scaled = det.scaled_coefficients();
    let peak = scaled.iter().copied().fold(0.0, f64::max);
    let negligible = |v: f64| v <= tol.tol * peak;

    let singular = |i: usize| -> Result<bool> {
        let s = singular_values(p.coefficient(i))?;
        Ok(*s.last().unwrap() <= tol.tol * p.scale())
    };

    // B_0 singular <=> 0 is an eigenvalue; B_k singular <=> ∞ is.
    let mut zero_count = 0;
    if nk > 0 && singular(0)? {
        zero_count = scaled.iter().take_while(|&&v| negligible(v)).count().clamp(1, nk);
    }
    let mut infinite_count = 0;
    if nk > 0 && singular(p.grade())? {
        infinite_count = scaled
            .iter()
            .rev()
            .take_while(|&&v| negligible(v))
            .count()
            .clamp(1, nk - zero_count);
    }

    let mut points = vec![ProjectivePoint::zero(); zero_count];
    let top = nk - infinite_count;
    if top > zero_count {
        let trimmed = ScalarPolynomial::new(det.poly.coefficients()[zero_count..=top].to_vec());
        let roots = poly_roots(&trimmed)?;
        let rev = p.reversal();
        for (i, &z) in roots.iter().enumerate() {
            let others = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| chordal_distance(&ProjectivePoint::from_lambda(z), &ProjectivePoint::from_lambda(w)))
                .fold(f64::INFINITY, f64::min);
            points.push(refine_root(p, &rev, z, others)?);
        }
    }
    let infinite_count = nk - points.len();
    points.extend(std::iter::repeat(ProjectivePoint::infinity()).take(infinite_count));
    sort_points(&mut points);

    let mut groups: Vec<Eigenvalue> = Vec::new();
    for q in &points {
        match groups
            .iter_mut()
            .find(|g| chordal_distance(&g.point, q) <= tol.cluster)
        {
            Some(g) => g.multiplicity += 1,
            None => groups.push(Eigenvalue {
                point: *q,
                multiplicity: 1,
            }),
        }
    }
    groups.sort_by(|a, b| compare_points(&a.point, &b.point));

    Ok(Spectrum {
        points,
        eigenvalues: groups,
        det,
        zero_count,
        infinite_count,
        tolerances: *tol,
    })
}

/// Newton refinement of a determinant root on the matrix problem.
///
/// Works on `P` at `z` inside the unit disk and on `rev P` at `1/z` outside
/// it. A refined value that wandered further than half the distance to the
/// nearest other root is discarded in favour of the unrefined one.
fn refine_root(p: &MatrixPolynomial, rev: &MatrixPolynomial, z: C64, separation: f64) -> Result<ProjectivePoint> {
    let start = ProjectivePoint::from_lambda(z);
    let refined = if z.norm() <= 1.0 {
        ProjectivePoint::from_lambda(newton(p, z)?)
    } else {
        let mu = newton(rev, C64::new(1.0, 0.0) / z)?;
        ProjectivePoint::new(C64::new(1.0, 0.0), mu)?
    };
    if chordal_distance(&start, &refined) > 0.5 * separation {
        return Ok(start);
    }
    Ok(refined)
}

fn newton(p: &MatrixPolynomial, mut z: C64) -> Result<C64> {
    let mut trip = smallest_singular_triplet(&p.evaluate(z))?;
    for _ in 0..30 {
        if trip.sigma == 0.0 {
            break;
        }
        let num = p.evaluate(z).bilinear(&trip.left, &trip.right);
        let den = p.derivative_eval(z).bilinear(&trip.left, &trip.right);
        if den.norm() == 0.0 {
            break;
        }
        let step = num / den;
        let cand = z - step;
        let next = smallest_singular_triplet(&p.evaluate(cand))?;
        if next.sigma < trip.sigma {
            z = cand;
            trip = next;
            if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
                break;
            }
        } else {
            break;
        }
    }
    Ok(z)
}

/// Evidence behind a simplicity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplicityCertificate {
    /// Computed eigenvalues within the cluster tolerance (algebraic multiplicity).
    pub multiplicity: usize,
    /// Second smallest singular value of `P(α₀, β₀)` (geometric test).
    pub second_sigma: f64,
    pub second_sigma_threshold: f64,
    /// `|y*(β̄₀ D_αP − ᾱ₀ D_βP) x|` for unit eigenvectors.
    pub denom: f64,
    /// `simple_denominator · ‖β̄₀ D_αP − ᾱ₀ D_βP‖₂`.
    pub denom_threshold: f64,
}

impl SimplicityCertificate {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1 && self.second_sigma > self.second_sigma_threshold && self.denom > self.denom_threshold
    }
}

/// Eigenvalue with unit left and right eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTriple {
    pub point: ProjectivePoint,
    pub right: ComplexVector,
    pub left: ComplexVector,
    /// ‖P(α₀, β₀) x‖₂ for the stored unit `x`.
    pub residual: f64,
    pub simple: bool,
    pub denom: f64,
    pub certificate: SimplicityCertificate,
}

/// Bound on ‖P(α, β)‖₂ used to make residual tests scale-free.
pub fn homogeneous_scale(p: &MatrixPolynomial, point: &ProjectivePoint) -> f64 {
    let k = p.grade() as i32;
    let (a, b) = (point.alpha().norm(), point.beta().norm());
    p.coefficient_norms()
        .iter()
        .enumerate()
        .map(|(i, w)| a.powi(i as i32) * b.powi(k - i as i32) * w)
        .sum()
}

/// Eigenvectors of `P` at `point`, computing the spectrum for the multiplicity test.
pub fn eigentriple(p: &MatrixPolynomial, point: &ProjectivePoint) -> Result<EigenTriple> {
    let spec = spectrum(p, &Tolerances::default())?;
    eigentriple_in(p, &spec, point)
}

/// Eigenvectors of `P` at `point`, reusing an already computed spectrum.
pub fn eigentriple_in(p: &MatrixPolynomial, spec: &Spectrum, point: &ProjectivePoint) -> Result<EigenTriple> {
    let tol = &spec.tolerances;
    let m = p.evaluate_homogeneous(point.alpha(), point.beta())?;
    let trip = smallest_singular_triplet(&m)?;
    let scale = homogeneous_scale(p, point);
    let threshold = tol.eigen_acceptance * scale;
    if trip.sigma > threshold {
        return Err(Error::NotAnEigenvalue {
            sigma_min: trip.sigma,
            threshold,
        });
    }
    let right = trip.right.with_canonical_phase();
    let left = trip.left.with_canonical_phase();
    let certificate = certify(p, spec, point, &left, &right)?;
    Ok(EigenTriple {
        point: *point,
        residual: m.mul_vec(&right).norm(),
        simple: certificate.is_simple(),
        denom: certificate.denom,
        right,
        left,
        certificate,
    })
}

/// One triple per distinct eigenvalue, in spectrum order.
pub fn eigentriples(p: &MatrixPolynomial) -> Result<Vec<EigenTriple>> {
    eigentriples_with(p, &Tolerances::default())
}

pub fn eigentriples_with(p: &MatrixPolynomial, tol: &Tolerances) -> Result<Vec<EigenTriple>> {
    let spec = spectrum(p, tol)?;
    spec.eigenvalues
        .iter()
        .map(|e| eigentriple_in(p, &spec, &e.point))
        .collect()
}

/// Re-derives the simplicity verdict for a triple.
pub fn is_simple(p: &MatrixPolynomial, t: &EigenTriple) -> Result<bool> {
    let spec = spectrum(p, &Tolerances::default())?;
    Ok(certify(p, &spec, &t.point, &t.left, &t.right)?.is_simple())
}

fn certify(
    p: &MatrixPolynomial,
    spec: &Spectrum,
    point: &ProjectivePoint,
    left: &ComplexVector,
    right: &ComplexVector,
) -> Result<SimplicityCertificate> {
    let tol = &spec.tolerances;
    let m = p.evaluate_homogeneous(point.alpha(), point.beta())?;
    let sv = singular_values(&m)?;
    let second_sigma = if sv.len() >= 2 { sv[sv.len() - 2] } else { f64::INFINITY };
    let g = homogeneous_pairing_matrix(p, point)?;
    let denom = g.bilinear(left, right).norm() / (left.norm() * right.norm());
    let gnorm = crate::numlin::spectral_norm(&g)?;
    Ok(SimplicityCertificate {
        multiplicity: spec.multiplicity_of(point),
        second_sigma,
        second_sigma_threshold: tol.eigen_acceptance * homogeneous_scale(p, point),
        denom,
        denom_threshold: tol.simple_denominator * gnorm,
    })
}

/// `β̄₀ D_αP(α₀, β₀) − ᾱ₀ D_βP(α₀, β₀)`.
pub fn homogeneous_pairing_matrix(
    p: &MatrixPolynomial,
    point: &ProjectivePoint,
) -> Result<crate::numlin::ComplexMatrix> {
    let (da, db) = p.partials_homogeneous(point.alpha(), point.beta())?;
    let mut g = da.scale(point.beta().conj());
    g.add_scaled(-point.alpha().conj(), &db);
    Ok(g)
}
