//! Eigenvalue condition numbers and the exact relations between them.
//!
//! With weights ω_i, unit eigenvectors `x`, `y`, and
//! `v_i = |α₀|^i |β₀|^{k-i} ω_i`:
//!
//! | number | formula |
//! |--------|---------|
//! | `κ_a`  | `Σ|λ₀|^i ω_i ‖x‖‖y‖ / |y* P'(λ₀) x|` |
//! | `κ_r`  | `κ_a / |λ₀|` |
//! | `κ_h`  | `‖v‖₂ ‖x‖‖y‖ / |y* (β̄₀ D_αP − ᾱ₀ D_βP) x|` |
//! | `κ_θ`  | `‖v‖₁ ‖x‖‖y‖ / |y* (β̄₀ D_αP − ᾱ₀ D_βP) x|` |
//!
//! `κ_a` is undefined at ∞ and `κ_r` at 0 and ∞; the homogeneous numbers
//! are defined everywhere on the projective line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eig::{EigenTriple, ProjectivePoint};
use crate::error::{Error, Result};
use crate::numlin::{ComplexVector, C64};
use crate::poly::{MatrixPolynomial, WeightMode, WeightScheme};

/// Guard in the symmetric relative residual.
const TINY: f64 = 1e-300;

/// Chordal distance `|αδ − βγ| / (‖(α,β)‖ ‖(γ,δ)‖)`, the sine of the angle between the lines.
pub fn chordal_distance(p: &ProjectivePoint, q: &ProjectivePoint) -> f64 {
    chordal_distance_raw(p.alpha(), p.beta(), q.alpha(), q.beta())
}

/// Chordal distance between the lines through `(a, b)` and `(c, d)`; any representatives.
pub fn chordal_distance_raw(a: C64, b: C64, c: C64, d: C64) -> f64 {
    let num = (a * d - b * c).norm();
    let den = (a.norm_sqr() + b.norm_sqr()).sqrt() * (c.norm_sqr() + d.norm_sqr()).sqrt();
    (num / den).clamp(0.0, 1.0)
}

/// Angle in `[0, π/2]` between two lines; `sin` of it is the chordal distance.
pub fn line_angle(p: &ProjectivePoint, q: &ProjectivePoint) -> f64 {
    let cos = (p.alpha().conj() * q.alpha() + p.beta().conj() * q.beta()).norm();
    chordal_distance(p, q).atan2(cos)
}

/// `|α₀|^i |β₀|^{k-i} ω_i` for `i = 0..=k`.
pub fn weight_profile(alpha: C64, beta: C64, w: &WeightScheme) -> Vec<f64> {
    let k = w.grade() as i32;
    let (a, b) = (alpha.norm(), beta.norm());
    w.weights()
        .iter()
        .enumerate()
        .map(|(i, om)| a.powi(i as i32) * b.powi(k - i as i32) * om)
        .collect()
}

fn homogeneous_denominator(
    p: &MatrixPolynomial,
    alpha: C64,
    beta: C64,
    x: &ComplexVector,
    y: &ComplexVector,
) -> Result<f64> {
    let (da, db) = p.partials_homogeneous(alpha, beta)?;
    let mut g = da.scale(beta.conj());
    g.add_scaled(-alpha.conj(), &db);
    Ok(g.bilinear(y, x).norm())
}

/// `κ_θ` from the formula with an arbitrary representative `(α, β)` and eigenvector scaling.
pub fn kappa_theta_at(
    p: &MatrixPolynomial,
    alpha: C64,
    beta: C64,
    x: &ComplexVector,
    y: &ComplexVector,
    w: &WeightScheme,
) -> Result<f64> {
    w.check_grade(p)?;
    let l1: f64 = weight_profile(alpha, beta, w).iter().sum();
    Ok(l1 * x.norm() * y.norm() / homogeneous_denominator(p, alpha, beta, x, y)?)
}

/// `κ_h` from the formula with an arbitrary representative and eigenvector scaling.
pub fn kappa_h_at(
    p: &MatrixPolynomial,
    alpha: C64,
    beta: C64,
    x: &ComplexVector,
    y: &ComplexVector,
    w: &WeightScheme,
) -> Result<f64> {
    w.check_grade(p)?;
    let l2 = weight_profile(alpha, beta, w).iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(l2 * x.norm() * y.norm() / homogeneous_denominator(p, alpha, beta, x, y)?)
}

/// `κ_a(λ, P)` from the non-homogeneous formula.
pub fn kappa_a_at(p: &MatrixPolynomial, lambda: C64, x: &ComplexVector, y: &ComplexVector, w: &WeightScheme) -> Result<f64> {
    w.check_grade(p)?;
    let m = lambda.norm();
    let num: f64 = w.weights().iter().enumerate().map(|(i, om)| m.powi(i as i32) * om).sum();
    let den = p.derivative_eval(lambda).bilinear(y, x).norm();
    Ok(num * x.norm() * y.norm() / den)
}

/// `κ_r(λ, P)` from the non-homogeneous formula.
pub fn kappa_r_at(p: &MatrixPolynomial, lambda: C64, x: &ComplexVector, y: &ComplexVector, w: &WeightScheme) -> Result<f64> {
    w.check_grade(p)?;
    let m = lambda.norm();
    let num: f64 = w.weights().iter().enumerate().map(|(i, om)| m.powi(i as i32) * om).sum();
    let den = m * p.derivative_eval(lambda).bilinear(y, x).norm();
    Ok(num * x.norm() * y.norm() / den)
}

fn require_simple(t: &EigenTriple) -> Result<()> {
    if t.simple {
        Ok(())
    } else {
        Err(Error::NotSimple)
    }
}

/// Absolute non-homogeneous condition number of a finite simple eigenvalue.
pub fn kappa_a(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
    let lambda = t.point.lambda().ok_or(Error::UndefinedForInfinite)?;
    require_simple(t)?;
    kappa_a_at(p, lambda, &t.right, &t.left, w)
}

/// Relative non-homogeneous condition number of a finite nonzero simple eigenvalue.
pub fn kappa_r(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
    if t.point.is_infinite() || t.point.is_zero() {
        return Err(Error::UndefinedForZeroOrInfinite);
    }
    require_simple(t)?;
    kappa_r_at(p, t.point.lambda().unwrap(), &t.right, &t.left, w)
}

/// Homogeneous condition number from the differential of the eigenvalue map.
pub fn kappa_h(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
    require_simple(t)?;
    kappa_h_at(p, t.point.alpha(), t.point.beta(), &t.right, &t.left, w)
}

/// Homogeneous condition number measured in the chordal metric.
pub fn kappa_theta(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
    require_simple(t)?;
    kappa_theta_at(p, t.point.alpha(), t.point.beta(), &t.right, &t.left, w)
}

/// `κ_a(1/λ₀, rev P)` with the weights carried along to the reversed coefficients.
/// Defined whenever `λ₀ ≠ 0`, including `λ₀ = ∞`.
pub fn kappa_a_reversal(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
    if t.point.is_zero() {
        return Err(Error::UndefinedForPoint("kappa_a(1/lambda, rev P) needs lambda != 0"));
    }
    require_simple(t)?;
    let mu = t.point.beta() / t.point.alpha();
    kappa_a_at(&p.reversal(), mu, &t.right, &t.left, &w.reversed())
}

/// `κ_r(1/λ₀, rev P)`; needs `λ₀ ∉ {0, ∞}`.
pub fn kappa_r_reversal(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
    if t.point.is_infinite() || t.point.is_zero() {
        return Err(Error::UndefinedForZeroOrInfinite);
    }
    require_simple(t)?;
    let mu = t.point.beta() / t.point.alpha();
    kappa_r_at(&p.reversal(), mu, &t.right, &t.left, &w.reversed())
}

/// Condition numbers of `cot` and `tan` at `θ = angle(point, (1, 0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentConditionNumbers {
    /// `|cot'(θ)| = 1 + |λ₀|²`; needs `β₀ ≠ 0`.
    pub kappa_a_ct: Option<f64>,
    /// `|cot'(θ)| / |cot(θ)| = (1 + |λ₀|²)/|λ₀|`; needs `α₀β₀ ≠ 0`.
    pub kappa_r_ct: Option<f64>,
    /// `|tan'(θ)| = 1 + |1/λ₀|²`; needs `α₀ ≠ 0`.
    pub kappa_a_t: Option<f64>,
}

impl CotangentConditionNumbers {
    pub fn kappa_a_ct(&self) -> Result<f64> {
        self.kappa_a_ct.ok_or(Error::UndefinedForPoint("cotangent condition number at infinity"))
    }

    pub fn kappa_r_ct(&self) -> Result<f64> {
        self.kappa_r_ct
            .ok_or(Error::UndefinedForPoint("relative cotangent condition number at zero or infinity"))
    }

    pub fn kappa_a_t(&self) -> Result<f64> {
        self.kappa_a_t.ok_or(Error::UndefinedForPoint("tangent condition number at zero"))
    }
}

/// Evaluated through the angle θ rather than through `|λ₀|`.
pub fn cotangent_condition_numbers(point: &ProjectivePoint) -> CotangentConditionNumbers {
    let theta = line_angle(point, &ProjectivePoint::infinity());
    let (s, c) = theta.sin_cos();
    let finite = !point.is_infinite();
    let nonzero = !point.is_zero();
    CotangentConditionNumbers {
        kappa_a_ct: finite.then(|| 1.0 / (s * s)),
        kappa_r_ct: (finite && nonzero).then(|| 1.0 / (s * c)),
        kappa_a_t: nonzero.then(|| 1.0 / (c * c)),
    }
}

/// Where `|λ₀|` sits relative to 1, and what that says about `κ_θ` versus `κ_a`, `κ_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Zero,
    Small,
    NearUnit,
    Large,
    Infinite,
}

impl Regime {
    /// `|λ₀| < 1/2` is small, `|λ₀| > 2` is large.
    pub fn classify(point: &ProjectivePoint) -> Self {
        if point.is_infinite() {
            return Regime::Infinite;
        }
        if point.is_zero() {
            return Regime::Zero;
        }
        match point.abs_lambda() {
            m if m < 0.5 => Regime::Small,
            m if m > 2.0 => Regime::Large,
            _ => Regime::NearUnit,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Regime::Zero => "kappa_theta ~ kappa_a; kappa_r undefined",
            Regime::Small => "kappa_theta ~ kappa_a << kappa_r",
            Regime::NearUnit => "kappa_theta ~ kappa_a/2 ~ kappa_r/2",
            Regime::Large => "kappa_theta ~ kappa_a(1/lambda, rev P) << kappa_r << kappa_a",
            Regime::Infinite => "kappa_theta = kappa_a(0, rev P); kappa_a, kappa_r undefined",
        }
    }
}

/// Every condition number of one eigenvalue, with relation residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub point: ProjectivePoint,
    /// `|λ₀|`, `+∞` at infinity.
    pub lambda_abs: f64,
    pub grade: usize,
    pub kappa_a: Option<f64>,
    pub kappa_r: Option<f64>,
    pub kappa_h: f64,
    pub kappa_theta: f64,
    /// `κ_a(1/λ₀, rev P)`.
    pub kappa_a_rev: Option<f64>,
    /// `κ_r(1/λ₀, rev P)`.
    pub kappa_r_rev: Option<f64>,
    pub cotangent: CotangentConditionNumbers,
    /// `|α₀|^i |β₀|^{k-i} ω_i`.
    pub weight_profile: Vec<f64>,
    pub weights_mode: WeightMode,
    pub regime: Regime,
    /// Relative residual of each applicable relation; inequalities report
    /// the size of the violation (0 when satisfied).
    pub identity_residuals: BTreeMap<String, f64>,
}

impl ConditionReport {
    /// Largest residual and its relation name.
    pub fn worst_residual(&self) -> Option<(&str, f64)> {
        self.identity_residuals
            .iter()
            .map(|(k, &v)| (k.as_str(), v))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Recomputes the residual table from the stored values.
    pub fn recheck(&mut self) {
        self.identity_residuals = check_identities(self);
    }
}

/// Symmetric relative difference.
pub fn relative_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(TINY)
}

/// Relative amount by which `lhs ≤ rhs` fails (0 if it holds).
pub fn inequality_violation(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).max(0.0) / lhs.abs().max(rhs.abs()).max(TINY)
}

fn between(lo: f64, x: f64, hi: f64) -> f64 {
    inequality_violation(lo, x).max(inequality_violation(x, hi))
}

/// Evaluates every relation that applies at the report's point.
pub fn check_identities(r: &ConditionReport) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    let mut put = |name: &str, v: f64| {
        out.insert(name.to_string(), v);
    };
    let theta = line_angle(&r.point, &ProjectivePoint::infinity());
    let (sin, cos) = theta.sin_cos();
    let kt = r.kappa_theta;
    let m = r.lambda_abs;

    let l1: f64 = r.weight_profile.iter().sum();
    let l2 = r.weight_profile.iter().map(|v| v * v).sum::<f64>().sqrt();
    put("homogeneous_ratio", relative_residual(r.kappa_h, l2 / l1 * kt));
    let k1 = (r.grade as f64 + 1.0).sqrt();
    put("homogeneous_ratio_bounds", between(1.0 / k1, r.kappa_h / kt, 1.0));

    if let Some(ka) = r.kappa_a {
        put("theta_abs", relative_residual(kt * (1.0 + m * m), ka));
        put("theta_le_abs", inequality_violation(kt, ka));
        put("chordal_inf_sq", relative_residual(sin * sin, 1.0 / (1.0 + m * m)));
        if let Some(act) = r.cotangent.kappa_a_ct {
            put("cotangent_abs", relative_residual(ka, kt * act));
        }
        if m <= 1.0 {
            put("abs_sandwich", between(ka / 2.0, kt, ka));
        }
    }
    if let Some(kar) = r.kappa_a_rev {
        let inv = if m.is_infinite() { 0.0 } else { 1.0 / m };
        put("theta_abs_rev", relative_residual(kt * (1.0 + inv * inv), kar));
        put("chordal_zero_sq", relative_residual(cos * cos, 1.0 / (1.0 + inv * inv)));
        if let Some(at) = r.cotangent.kappa_a_t {
            put("tangent_abs_rev", relative_residual(kar, kt * at));
        }
        if m >= 1.0 {
            put("rev_abs_sandwich", between(kar / 2.0, kt, kar));
        }
    }
    if let Some(kr) = r.kappa_r {
        put("theta_rel", relative_residual(kt * (1.0 + m * m) / m, kr));
        put("theta_le_rel", inequality_violation(kt, kr));
        put("chordal_product", relative_residual(sin * cos, m / (1.0 + m * m)));
        if let Some(rct) = r.cotangent.kappa_r_ct {
            put("cotangent_rel", relative_residual(kr, kt * rct));
        }
        if let Some(kar) = r.kappa_a_rev {
            put("reversal_abs", relative_residual(kar, kr / m));
        }
        if let Some(krr) = r.kappa_r_rev {
            put("reversal_rel", relative_residual(krr, kr));
        }
        if m <= 1.0 {
            put("rel_sandwich_small", between(kr * m / 2.0, kt, kr * m));
        }
        if m >= 1.0 {
            put("rel_sandwich_large", between(kr / (2.0 * m), kt, kr / m));
        }
    }
    out
}

/// All condition numbers of a simple eigenvalue plus the residual of every applicable relation.
pub fn relation_report(p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<ConditionReport> {
    require_simple(t)?;
    w.check_grade(p)?;
    let optional = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedForInfinite | Error::UndefinedForZeroOrInfinite | Error::UndefinedForPoint(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let mut report = ConditionReport {
        point: t.point,
        lambda_abs: t.point.abs_lambda(),
        grade: p.grade(),
        kappa_a: optional(kappa_a(p, t, w))?,
        kappa_r: optional(kappa_r(p, t, w))?,
        kappa_h: kappa_h(p, t, w)?,
        kappa_theta: kappa_theta(p, t, w)?,
        kappa_a_rev: optional(kappa_a_reversal(p, t, w))?,
        kappa_r_rev: optional(kappa_r_reversal(p, t, w))?,
        cotangent: cotangent_condition_numbers(&t.point),
        weight_profile: weight_profile(t.point.alpha(), t.point.beta(), w),
        weights_mode: w.mode(),
        regime: Regime::classify(&t.point),
        identity_residuals: BTreeMap::new(),
    };
    report.recheck();
    Ok(report)
}

/// Which sufficient condition for the pencil lower bounds applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PencilCase {
    /// ω₀ = ω₁ = max(‖B₀‖₂, ‖B₁‖₂).
    MaxNormWeights,
    /// ω_i = ‖B_i‖₂, |λ₀| < 1, ‖B₁‖₂ ≤ ‖B₀‖₂.
    SmallEigenvalue,
    /// ω_i = ‖B_i‖₂, |λ₀| > 1, ‖B₀‖₂ ≤ ‖B₁‖₂.
    LargeEigenvalue,
    /// ω_i = ‖B_i‖₂ and ‖B₁‖₂/‖B₀‖₂ inside [`SIMILAR_NORM_RATIO`].
    SimilarNorms,
}

/// Range of ‖B₁‖₂/‖B₀‖₂ accepted as "similar norms".
pub const SIMILAR_NORM_RATIO: (f64, f64) = (0.5, 2.0);

/// Lower bounds for the condition numbers of a pencil eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilBounds {
    /// `(ω₀ + |λ₀| ω₁) / (‖B₁‖₂ + |λ₀| ‖B₀‖₂)`, a lower bound on `κ_θ`.
    pub kappa_theta_lower: f64,
    pub kappa_theta: f64,
    pub case: Option<PencilCase>,
    pub similar_ratio_range: (f64, f64),
    /// `1 + |λ₀|²`
    pub kappa_a_lower: f64,
    pub kappa_a: f64,
    pub kappa_a_bound_holds: bool,
    /// `(1 + |λ₀|²)/|λ₀|`, absent at `λ₀ = 0`.
    pub kappa_r_lower: Option<f64>,
    pub kappa_r: Option<f64>,
    pub kappa_r_bound_holds: Option<bool>,
}

/// Relative slack allowed when judging whether a computed value meets a bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Pencil lower bounds and which sufficient condition (if any) guarantees them.
pub fn computability_bounds(l: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<PencilBounds> {
    if l.grade() != 1 {
        return Err(Error::PencilOnly(l.grade()));
    }
    require_simple(t)?;
    w.check_grade(l)?;
    let lambda = t.point.lambda().ok_or(Error::UndefinedForInfinite)?;
    let m = lambda.norm();
    let (n0, n1) = (l.coefficient_norms()[0], l.coefficient_norms()[1]);
    let (w0, w1) = (w.weights()[0], w.weights()[1]);

    let case = match w.mode() {
        WeightMode::MaxNorm => Some(PencilCase::MaxNormWeights),
        WeightMode::CoefficientNorms => {
            let ratio = n1 / n0;
            if m < 1.0 && n1 <= n0 {
                Some(PencilCase::SmallEigenvalue)
            } else if m > 1.0 && n0 <= n1 {
                Some(PencilCase::LargeEigenvalue)
            } else if ratio >= SIMILAR_NORM_RATIO.0 && ratio <= SIMILAR_NORM_RATIO.1 {
                Some(PencilCase::SimilarNorms)
            } else {
                None
            }
        }
        _ => None,
    };

    let ka = kappa_a(l, t, w)?;
    let kr = if m > 0.0 { Some(kappa_r(l, t, w)?) } else { None };
    let kappa_a_lower = 1.0 + m * m;
    let kappa_r_lower = (m > 0.0).then(|| (1.0 + m * m) / m);
    Ok(PencilBounds {
        kappa_theta_lower: (w0 + m * w1) / (n1 + m * n0),
        kappa_theta: kappa_theta(l, t, w)?,
        case,
        similar_ratio_range: SIMILAR_NORM_RATIO,
        kappa_a_lower,
        kappa_a: ka,
        kappa_a_bound_holds: ka >= kappa_a_lower * (1.0 - BOUND_SLACK),
        kappa_r_lower,
        kappa_r: kr,
        kappa_r_bound_holds: kr.zip(kappa_r_lower).map(|(v, lo)| v >= lo * (1.0 - BOUND_SLACK)),
    })
}
