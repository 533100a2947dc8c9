//! Empirical condition numbers: perturb the coefficients, re-solve, and
//! compare the eigenvalue displacement with the formula values.
//!
//! Perturbations satisfy `‖ΔB_i‖₂ ≤ ε ω_i`. Every estimate evaluates the
//! rank-one extremal perturbation
//!
//! ```text
//! ΔB_i = sgn(ᾱ₀^i) sgn(β̄₀^{k-i}) ε ω_i y x* / (‖x‖‖y‖),   sgn(0) = 0,
//! ```
//!
//! which attains the supremum to first order. It also evaluates a batch of
//! random directions `ΔB_i = ε ω_i U_i`, where each `U_i` has unit spectral
//! norm. Each random sample draws from its own ChaCha stream, so results do
//! not depend on how samples are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cond::{chordal_distance, kappa_a, kappa_r, kappa_theta};
use crate::eig::{eigentriples, spectrum, sort_points, EigenTriple, ProjectivePoint};
use crate::error::{Error, Result};
use crate::numlin::{spectral_norm, ComplexMatrix, Tolerances, C64};
use crate::poly::{MatrixPolynomial, WeightScheme};

/// Default ε ladder for convergence checks.
pub const DEFAULT_EPSILONS: [f64; 3] = [1e-5, 1e-6, 1e-7];

/// Which displacement is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `|Δλ₀| / ε`
    KappaA,
    /// `|Δλ₀| / (ε |λ₀|)`
    KappaR,
    /// `χ / ε`
    KappaTheta,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::KappaA => "kappa_a",
            Target::KappaR => "kappa_r",
            Target::KappaTheta => "kappa_theta",
        }
    }

    fn check_point(self, point: &ProjectivePoint) -> Result<()> {
        match self {
            Target::KappaA if point.is_infinite() => Err(Error::UndefinedForInfinite),
            Target::KappaR if point.is_infinite() || point.is_zero() => Err(Error::UndefinedForZeroOrInfinite),
            _ => Ok(()),
        }
    }

    /// Formula value of the target condition number.
    pub fn formula(self, p: &MatrixPolynomial, t: &EigenTriple, w: &WeightScheme) -> Result<f64> {
        match self {
            Target::KappaA => kappa_a(p, t, w),
            Target::KappaR => kappa_r(p, t, w),
            Target::KappaTheta => kappa_theta(p, t, w),
        }
    }

    fn ratio(self, from: &ProjectivePoint, to: &ProjectivePoint, chi: f64, eps: f64) -> f64 {
        match self {
            Target::KappaTheta => chi / eps,
            Target::KappaA | Target::KappaR => {
                let (Some(a), Some(b)) = (from.lambda(), to.lambda()) else {
                    return f64::INFINITY;
                };
                let shift = (b - a).norm() / eps;
                if self == Target::KappaR {
                    shift / a.norm()
                } else {
                    shift
                }
            }
        }
    }
}

/// Perturbation magnitude, admissible weights, and Monte-Carlo settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub weights: WeightScheme,
    pub samples: usize,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, weights: WeightScheme, samples: usize, seed: u64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if samples == 0 {
            return Err(Error::InvalidInput("samples must be positive".into()));
        }
        Ok(Self { epsilon, weights, samples, seed })
    }

    /// A warning if `ε · max ω_i > 0.1 · scale(P)`, i.e. first-order theory is unlikely to apply.
    pub fn size_warning(&self, p: &MatrixPolynomial) -> Option<String> {
        let wmax = self.weights.weights().iter().cloned().fold(0.0, f64::max);
        let limit = 0.1 * p.scale();
        (self.epsilon * wmax > limit).then(|| {
            format!(
                "epsilon * max weight = {:e} exceeds 0.1 * scale(P) = {:e}; first-order estimates may be poor",
                self.epsilon * wmax,
                limit
            )
        })
    }
}

/// Outcome of an empirical run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub target: Target,
    pub formula_value: f64,
    pub extremal_ratio: f64,
    pub mc_max_ratio: f64,
    pub epsilon_used: f64,
    pub samples: usize,
    /// `c` with `mc_max_ratio = formula_value · (1 + c ε)`; negative when below the formula.
    pub observed_c: f64,
    pub warning: Option<String>,
}

impl EmpiricalEstimate {
    /// `|extremal_ratio / formula_value − 1|`.
    pub fn extremal_gap(&self) -> f64 {
        (self.extremal_ratio / self.formula_value - 1.0).abs()
    }

    /// `mc_max_ratio / formula_value − 1`.
    pub fn mc_gap(&self) -> f64 {
        self.mc_max_ratio / self.formula_value - 1.0
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon must be positive and finite, got {eps}")))
    }
}

/// `z^i / |z|^i`, with `sgn(0^0) = 1` and `sgn(0^i) = 0` for `i > 0`.
fn sgn_pow(z: C64, i: usize) -> C64 {
    if i == 0 {
        C64::new(1.0, 0.0)
    } else if z.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        (z / z.norm()).powi(i as i32)
    }
}

/// Rank-one perturbation attaining the condition-number supremum to first order.
pub fn extremal_perturbation(
    p: &MatrixPolynomial,
    t: &EigenTriple,
    w: &WeightScheme,
    epsilon: f64,
) -> Result<MatrixPolynomial> {
    check_epsilon(epsilon)?;
    if !t.simple {
        return Err(Error::NotSimple);
    }
    let k = p.grade();
    if w.grade() != k {
        return Err(Error::InvalidInput(format!("{} weights for grade {k}", w.weights().len())));
    }
    let (a, b) = (t.point.alpha().conj(), t.point.beta().conj());
    let yx = t.left.outer(&t.right);
    let denom = t.left.norm() * t.right.norm();
    let coefficients = (0..=k)
        .map(|i| {
            let s = sgn_pow(a, i) * sgn_pow(b, k - i) * (epsilon * w.weights()[i] / denom);
            yx.scale(s)
        })
        .collect();
    MatrixPolynomial::new(coefficients)
}

/// Eigenvalue of `P + dP` nearest to `point`, with its chordal distance from `point`.
pub fn perturbed_eigenvalue_shift(
    p: &MatrixPolynomial,
    dp: &MatrixPolynomial,
    point: &ProjectivePoint,
) -> Result<(ProjectivePoint, f64)> {
    perturbed_shift_with(p, dp, point, &Tolerances::default())
}

fn perturbed_shift_with(
    p: &MatrixPolynomial,
    dp: &MatrixPolynomial,
    point: &ProjectivePoint,
    tol: &Tolerances,
) -> Result<(ProjectivePoint, f64)> {
    let q = p.plus(dp)?;
    let spec = match spectrum(&q, tol) {
        Err(Error::NotRegular) => {
            return Err(Error::NonFinite("perturbed polynomial is not regular".into()));
        }
        other => other?,
    };
    let mut best: Option<(ProjectivePoint, f64)> = None;
    let mut runner_up = f64::INFINITY;
    for e in &spec.eigenvalues {
        let d = chordal_distance(point, &e.point);
        // A cluster of multiplicity m counts as m candidates.
        for _ in 0..e.multiplicity {
            match best {
                Some((_, bd)) if d >= bd => runner_up = runner_up.min(d),
                _ => {
                    if let Some((_, bd)) = best {
                        runner_up = runner_up.min(bd);
                    }
                    best = Some((e.point, d));
                }
            }
        }
    }
    let (new_point, nearest) = best.ok_or_else(|| Error::NumericalFailure("perturbed polynomial has no eigenvalues".into()))?;
    if runner_up <= 2.0 * nearest {
        return Err(Error::AmbiguousMatch { nearest, runner_up });
    }
    Ok((new_point, nearest))
}

/// A unit-spectral-norm complex Gaussian matrix.
fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * scale, im * scale)
    });
    let s = spectral_norm(&g).expect("Gaussian matrices are finite");
    g.scale(C64::new(1.0 / s, 0.0))
}

/// Random perturbation number `index` for `seed`: `ΔB_i = ε ω_i U_i`.
pub fn random_perturbation(n: usize, w: &WeightScheme, epsilon: f64, seed: u64, index: u64) -> MatrixPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let coefficients = w
        .weights()
        .iter()
        .map(|&om| random_direction(&mut rng, n).scale(C64::new(epsilon * om, 0.0)))
        .collect();
    MatrixPolynomial::new(coefficients).expect("random directions are finite and square")
}

/// Measures the target ratio for the extremal perturbation and for `spec.samples` random ones.
pub fn empirical_condition(
    p: &MatrixPolynomial,
    t: &EigenTriple,
    spec: &PerturbationSpec,
    target: Target,
) -> Result<EmpiricalEstimate> {
    check_epsilon(spec.epsilon)?;
    target.check_point(&t.point)?;
    let w = &spec.weights;
    let eps = spec.epsilon;
    let formula_value = target.formula(p, t, w)?;
    let tol = Tolerances::default();

    let measure = |dp: &MatrixPolynomial| -> Result<f64> {
        let (to, chi) = perturbed_shift_with(p, dp, &t.point, &tol)?;
        Ok(target.ratio(&t.point, &to, chi, eps))
    };

    let extremal_ratio = measure(&extremal_perturbation(p, t, w, eps)?)?;
    let ratios: Vec<f64> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|j| measure(&random_perturbation(p.n(), w, eps, spec.seed, j)))
        .collect::<Result<_>>()?;
    let mc_max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    if !mc_max_ratio.is_finite() || !extremal_ratio.is_finite() {
        return Err(Error::NonFinite("perturbed eigenvalue escaped to infinity".into()));
    }

    Ok(EmpiricalEstimate {
        target,
        formula_value,
        extremal_ratio,
        mc_max_ratio,
        epsilon_used: eps,
        samples: spec.samples,
        observed_c: (mc_max_ratio / formula_value - 1.0) / eps,
        warning: spec.size_warning(p),
    })
}

/// Extremal ratios along a decreasing ε ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub target: Target,
    pub formula_value: f64,
    pub epsilons: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Signed relative errors `ratio / formula − 1`.
    pub errors: Vec<f64>,
    /// `errors[j] / errors[j+1]`; ≈ `eps[j] / eps[j+1]` when the error is first order in ε.
    pub reductions: Vec<f64>,
    /// Richardson extrapolation from the last two rungs, assuming an O(ε) error.
    pub extrapolated: f64,
}

/// Extremal-perturbation ratios for each ε and their consistency with an O(ε) error.
pub fn extremal_convergence(
    p: &MatrixPolynomial,
    t: &EigenTriple,
    w: &WeightScheme,
    target: Target,
    epsilons: &[f64],
) -> Result<ConvergenceStudy> {
    if epsilons.len() < 2 {
        return Err(Error::InvalidInput("need at least two epsilons".into()));
    }
    target.check_point(&t.point)?;
    let formula_value = target.formula(p, t, w)?;
    let tol = Tolerances::default();
    let mut ratios = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let dp = extremal_perturbation(p, t, w, eps)?;
        let (to, chi) = perturbed_shift_with(p, &dp, &t.point, &tol)?;
        ratios.push(target.ratio(&t.point, &to, chi, eps));
    }
    let errors: Vec<f64> = ratios.iter().map(|r| r / formula_value - 1.0).collect();
    let reductions = errors.windows(2).map(|e| e[0] / e[1]).collect();
    let m = epsilons.len();
    let q = epsilons[m - 2] / epsilons[m - 1];
    let extrapolated = (q * ratios[m - 1] - ratios[m - 2]) / (q - 1.0);
    Ok(ConvergenceStudy {
        target,
        formula_value,
        epsilons: epsilons.to_vec(),
        ratios,
        errors,
        reductions,
        extrapolated,
    })
}

/// `L(λ) = λ [[1/ε, 1/ε], [1/ε, 1]] + [[ε, 1], [1, 1]]`.
pub fn example_pencil(eps: f64) -> Result<MatrixPolynomial> {
    check_sweep_eps(eps)?;
    let r = |v: f64| C64::new(v, 0.0);
    let b0 = ComplexMatrix::from_rows(&[vec![r(eps), r(1.0)], vec![r(1.0), r(1.0)]])?;
    let b1 = ComplexMatrix::from_rows(&[vec![r(1.0 / eps), r(1.0 / eps)], vec![r(1.0 / eps), r(1.0)]])?;
    MatrixPolynomial::new(vec![b0, b1])
}

fn check_sweep_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {eps}")))
    }
}

/// Both eigenvalues of [`example_pencil`] from `(ε − ε³ ± √(ε²(ε−1)³(ε+3))) / (2ε − 2)`,
/// sorted by modulus then phase.
pub fn closed_form(eps: f64) -> Result<[C64; 2]> {
    check_sweep_eps(eps)?;
    let e = C64::new(eps, 0.0);
    let one = C64::new(1.0, 0.0);
    let disc = (e * e * (e - one).powi(3) * (e + 3.0)).sqrt();
    let den = e * 2.0 - 2.0;
    let mut pts = [
        ProjectivePoint::from_lambda((e - e.powi(3) + disc) / den),
        ProjectivePoint::from_lambda((e - e.powi(3) - disc) / den),
    ];
    sort_points(&mut pts);
    Ok([pts[0].lambda().unwrap(), pts[1].lambda().unwrap()])
}

/// One row of the example sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    /// Computed eigenvalues, sorted by modulus then phase.
    pub lambdas: Vec<C64>,
    pub closed_form: Vec<C64>,
    /// Largest `|λ_computed − λ_closed| / |λ_closed|`.
    pub closed_form_error: f64,
    pub kappa_theta: f64,
    pub kappa_r: f64,
    pub kappa_a: f64,
}

impl SweepRecord {
    pub fn abs_lambdas(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| l.norm()).collect()
    }
}

/// Closed-form tolerance for [`example_sweep`].
pub const CLOSED_FORM_TOL: f64 = 1e-8;

/// Example sweep with `ω_i = ‖B_i‖₂`; records are returned in ascending ε.
pub fn example_sweep(eps_grid: &[f64]) -> Result<Vec<SweepRecord>> {
    for &e in eps_grid {
        check_sweep_eps(e)?;
    }
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&eps| {
            let l = example_pencil(eps)?;
            let w = WeightScheme::coefficient_norms(&l)?;
            let triples = eigentriples(&l)?;
            if triples.len() != 2 || triples.iter().any(|t| t.point.is_infinite()) {
                return Err(Error::NumericalFailure(format!("expected two finite eigenvalues at eps = {eps}")));
            }
            let lambdas: Vec<C64> = triples.iter().map(|t| t.point.lambda().unwrap()).collect();
            let exact = closed_form(eps)?;
            let closed_form_error = lambdas
                .iter()
                .zip(exact.iter())
                .map(|(a, b)| (a - b).norm() / b.norm())
                .fold(0.0, f64::max);
            if closed_form_error > CLOSED_FORM_TOL {
                return Err(Error::NumericalFailure(format!(
                    "eigenvalues at eps = {eps} differ from the closed form by {closed_form_error:e}"
                )));
            }
            let t0 = &triples[0];
            Ok(SweepRecord {
                eps,
                lambdas,
                closed_form: exact.to_vec(),
                closed_form_error,
                kappa_theta: kappa_theta(&l, t0, &w)?,
                kappa_r: kappa_r(&l, t0, &w)?,
                kappa_a: kappa_a(&l, t0, &w)?,
            })
        })
        .collect()
}

/// `points` values log-spaced from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || points < 2 {
        return Err(Error::InvalidInput(format!(
            "need 0 < min <= max and at least two points (min = {min}, max = {max}, points = {points})"
        )));
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            _ if i == points - 1 => max,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
