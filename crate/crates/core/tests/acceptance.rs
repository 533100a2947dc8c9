//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the verdict lines are always printed; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use polycond::cond::{
    chordal_distance, computability_bounds, kappa_a, kappa_h, kappa_r, kappa_theta, relation_report, PencilCase,
};
use polycond::eig::{eigentriples, spectrum, EigenTriple, ProjectivePoint};
use polycond::numlin::{ComplexMatrix, Tolerances, C64};
use polycond::perturb::{
    empirical_condition, example_sweep, extremal_convergence, extremal_perturbation, log_grid, loglog_slope,
    perturbed_eigenvalue_shift, PerturbationSpec, Target,
};
use polycond::poly::{MatrixPolynomial, WeightMode, WeightScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn weights_for(mode: WeightMode, p: &MatrixPolynomial) -> WeightScheme {
    match mode {
        WeightMode::Absolute => WeightScheme::absolute(p.grade()),
        m => WeightScheme::for_polynomial(m, p).unwrap(),
    }
}

const MODES: [WeightMode; 3] = [WeightMode::CoefficientNorms, WeightMode::MaxNorm, WeightMode::Absolute];

/// Relations every simple eigenvalue must satisfy; each name must appear in at
/// least one report so the suite cannot silently skip a family.
const REQUIRED_RELATIONS: [&str; 17] = [
    "theta_abs",
    "theta_abs_rev",
    "theta_rel",
    "theta_le_abs",
    "theta_le_rel",
    "homogeneous_ratio",
    "homogeneous_ratio_bounds",
    "reversal_abs",
    "reversal_rel",
    "chordal_inf_sq",
    "chordal_zero_sq",
    "chordal_product",
    "cotangent_abs",
    "cotangent_rel",
    "tangent_abs_rev",
    "abs_sandwich",
    "rev_abs_sandwich",
];

fn identity_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = (String::new(), 0.0f64);
    let mut seen = std::collections::BTreeSet::new();
    let (mut checked, mut skipped) = (0usize, 0usize);
    for idx in 0..200u64 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=5);
        let p = MatrixPolynomial::random(n, k, 10_000 + idx).unwrap();
        let w = weights_for(MODES[idx as usize % 3], &p);
        let triples = match eigentriples(&p) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("instance {idx} (n={n}, k={k}): {e}")),
        };
        for t in &triples {
            if !t.simple {
                skipped += 1;
                continue;
            }
            let rep = relation_report(&p, t, &w).unwrap();
            checked += 1;
            for (name, &r) in &rep.identity_residuals {
                seen.insert(name.clone());
                if r > worst.1 {
                    worst = (format!("{name} (instance {idx}, |λ|={:.3e})", rep.lambda_abs), r);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let missing: Vec<_> = REQUIRED_RELATIONS.iter().filter(|r| !seen.contains(**r)).collect();
    outcome(
        worst.1 <= 1e-9 && missing.is_empty() && elapsed <= Duration::from_secs(60),
        format!(
            "{checked} simple eigenvalues ({skipped} non-simple skipped), worst residual {:.2e} at {}, missing {missing:?}, {:.1?}",
            worst.1, worst.0, elapsed
        ),
    )
}

/// Simple finite eigenvalue of moderate modulus, or any simple one.
fn pick_triple(triples: &[EigenTriple], rng: &mut ChaCha8Rng) -> Option<EigenTriple> {
    let simple: Vec<_> = triples.iter().filter(|t| t.simple).collect();
    if simple.is_empty() {
        return None;
    }
    Some(simple[rng.gen_range(0..simple.len())].clone())
}

fn extremal_attainment() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut worst_gap, mut worst_reduction_dev) = (0.0f64, 0.0f64);
    let mut instances = 0;
    let mut seed = 20_000u64;
    while instances < 50 {
        seed += 1;
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=3);
        let p = MatrixPolynomial::random(n, k, seed).unwrap();
        let w = weights_for(MODES[instances % 3], &p);
        let Some(t) = pick_triple(&eigentriples(&p).unwrap(), &mut rng) else { continue };
        let eps = 1e-6;
        let dp = extremal_perturbation(&p, &t, &w, eps).unwrap();
        let (_, chi) = perturbed_eigenvalue_shift(&p, &dp, &t.point).unwrap();
        let kt = kappa_theta(&p, &t, &w).unwrap();
        worst_gap = worst_gap.max((chi / eps / kt - 1.0).abs());
        // Halving twice at a larger ε where the O(ε) term dominates round-off.
        let study = extremal_convergence(&p, &t, &w, Target::KappaTheta, &[1e-4, 5e-5, 2.5e-5]).unwrap();
        for r in &study.reductions {
            worst_reduction_dev = worst_reduction_dev.max((r - 2.0).abs());
        }
        instances += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        worst_gap <= 1e-3 && worst_reduction_dev <= 0.25 && elapsed <= Duration::from_secs(120),
        format!(
            "50 instances: worst |χ/ε/κ_θ − 1| = {worst_gap:.2e} at ε=1e-6; error reduction per halving 2 ± {worst_reduction_dev:.3}; {elapsed:.1?}"
        ),
    )
}

fn monte_carlo_bound() -> Outcome {
    let start = Instant::now();
    let eps = 1e-6;
    let mut worst_c = f64::NEG_INFINITY;
    let mut reproducible = true;
    let mut runs = 0;
    for inst in 0..10u64 {
        let p = MatrixPolynomial::random(1 + (inst as usize % 3), 1 + (inst as usize % 2), 30_000 + inst).unwrap();
        let w = weights_for(MODES[inst as usize % 3], &p);
        let triples = eigentriples(&p).unwrap();
        let Some(t) = triples.iter().find(|t| t.simple && !t.point.is_infinite() && !t.point.is_zero()) else {
            continue;
        };
        let spec = PerturbationSpec::new(eps, w, 200, 99 + inst).unwrap();
        for target in [Target::KappaTheta, Target::KappaA, Target::KappaR] {
            let a = empirical_condition(&p, t, &spec, target).unwrap();
            worst_c = worst_c.max(a.observed_c);
            if a.mc_max_ratio > a.formula_value * (1.0 + 10.0 * eps) {
                return outcome(false, format!("instance {inst} {target:?}: mc gap {:.3e}", a.mc_gap()));
            }
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let b = pool.install(|| empirical_condition(&p, t, &spec, target).unwrap());
            reproducible &= a.mc_max_ratio.to_bits() == b.mc_max_ratio.to_bits()
                && a.extremal_ratio.to_bits() == b.extremal_ratio.to_bits();
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        reproducible && runs >= 24,
        format!(
            "{runs} runs × 200 samples: max observed c = {worst_c:.3} (bound 10); parallel vs sequential bit-identical: {reproducible}; {elapsed:.1?}"
        ),
    )
}

fn example_sweep_criterion() -> Outcome {
    let start = Instant::now();
    let grid = log_grid(1e-6, 1e-1, 11).unwrap();
    let recs = match example_sweep(&grid) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let eps: Vec<f64> = recs.iter().map(|r| r.eps).collect();
    let kt: Vec<f64> = recs.iter().map(|r| r.kappa_theta).collect();
    let l0: Vec<f64> = recs.iter().map(|r| r.abs_lambdas()[0]).collect();
    let kr: Vec<f64> = recs.iter().map(|r| r.kappa_r).collect();
    let s_kt = loglog_slope(&eps, &kt);
    let s_l = loglog_slope(&eps, &l0);
    let band = kr.iter().cloned().fold(0.0, f64::max) / kr.iter().cloned().fold(f64::INFINITY, f64::min);
    let cf = recs.iter().map(|r| r.closed_form_error).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    outcome(
        (s_kt - 1.0).abs() <= 0.1
            && (s_l - 1.0).abs() <= 0.1
            && band <= 10.0
            && cf <= 1e-8
            && elapsed <= Duration::from_secs(10),
        format!(
            "slope κ_θ {s_kt:.4}, slope |λ₀| {s_l:.4}, κ_r max/min {band:.3} (κ_r ∈ [{:.3}, {:.3}]), closed-form rel. error {cf:.1e}; {elapsed:.1?}",
            kr.iter().cloned().fold(f64::INFINITY, f64::min),
            kr.iter().cloned().fold(0.0, f64::max)
        ),
    )
}

fn scaled_pencil(seed: u64, s0: f64, s1: f64) -> MatrixPolynomial {
    let p = MatrixPolynomial::random(1 + (seed as usize % 4), 1, seed).unwrap();
    let b0 = p.coefficient(0).scale(c(s0, 0.0));
    let b1 = p.coefficient(1).scale(c(s1, 0.0));
    MatrixPolynomial::new(vec![b0, b1]).unwrap()
}

fn pencil_bounds_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut summary = Vec::new();
    for case in [PencilCase::MaxNormWeights, PencilCase::SmallEigenvalue, PencilCase::LargeEigenvalue] {
        let (mut pencils, mut eigs, mut seed) = (0, 0, 40_000u64);
        while pencils < 100 {
            seed += 1;
            let spread = 10f64.powf(rng.gen_range(0.0..3.0));
            let (l, w) = match case {
                PencilCase::MaxNormWeights => {
                    let l = scaled_pencil(seed, spread, 1.0 / spread);
                    let w = WeightScheme::max_norm(&l).unwrap();
                    (l, w)
                }
                PencilCase::SmallEigenvalue => {
                    let l = scaled_pencil(seed, spread, 1.0);
                    let w = WeightScheme::coefficient_norms(&l).unwrap();
                    (l, w)
                }
                _ => {
                    let l = scaled_pencil(seed, 1.0, spread);
                    let w = WeightScheme::coefficient_norms(&l).unwrap();
                    (l, w)
                }
            };
            let mut used = false;
            for t in eigentriples(&l).unwrap().iter().filter(|t| t.simple && !t.point.is_infinite()) {
                let b = computability_bounds(&l, t, &w).unwrap();
                if b.case != Some(case) {
                    continue;
                }
                used = true;
                eigs += 1;
                worst = worst.min(b.kappa_a / b.kappa_a_lower - 1.0);
                if let (Some(kr), Some(lo)) = (b.kappa_r, b.kappa_r_lower) {
                    worst = worst.min(kr / lo - 1.0);
                }
            }
            pencils += used as usize;
        }
        summary.push(format!("{case:?}: {pencils} pencils/{eigs} eigenvalues"));
    }
    let elapsed = start.elapsed();
    outcome(
        worst >= -1e-9 && elapsed <= Duration::from_secs(30),
        format!("{}; most negative relative slack {worst:.2e}; {elapsed:.1?}", summary.join(", ")),
    )
}

fn hand_fixtures() -> Outcome {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let p = MatrixPolynomial::new(vec![ComplexMatrix::from_real_diagonal(&[-2.0]), ComplexMatrix::identity(1)]).unwrap();
    let w = WeightScheme::absolute(1);
    let t = &eigentriples(&p).unwrap()[0];
    let errs = [
        rel(kappa_a(&p, t, &w).unwrap(), 3.0),
        rel(kappa_r(&p, t, &w).unwrap(), 1.5),
        rel(kappa_theta(&p, t, &w).unwrap(), 0.6),
        rel(kappa_h(&p, t, &w).unwrap(), 5f64.powf(-0.5)),
    ];
    let scalar_worst = errs.iter().cloned().fold(0.0, f64::max);

    let l = MatrixPolynomial::new(vec![ComplexMatrix::identity(2), ComplexMatrix::from_real_diagonal(&[1.0, 0.0])]).unwrap();
    let triples = eigentriples(&l).unwrap();
    let inf = triples.iter().find(|t| t.point.is_infinite());
    let minus_one = triples.iter().any(|t| (t.point.lambda().map(|z| (z + 1.0).norm()).unwrap_or(1.0)) < 1e-12);
    let inf_ok = inf.map_or(false, |t| {
        let rep = relation_report(&l, t, &w).unwrap();
        (rep.kappa_theta - 1.0).abs() <= 1e-12 && rep.kappa_a.is_none() && rep.kappa_r.is_none()
    });
    outcome(
        scalar_worst <= 1e-12 && inf_ok && minus_one && triples.len() == 2,
        format!("λ−2: worst relative error {scalar_worst:.1e}; diag pencil: eigenvalues {{−1, ∞}}, κ_θ(∞)=1 with κ_a/κ_r undefined: {inf_ok}"),
    )
}

/// Random unit complex number times a modulus drawn log-uniformly from [1e-1, 1e1].
fn random_root(rng: &mut ChaCha8Rng) -> C64 {
    let m = 10f64.powf(rng.gen_range(-1.0..1.0));
    C64::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn invertible_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    loop {
        let m = random_matrix(rng, n);
        if polycond::numlin::singular_values(&m).unwrap()[n - 1] > 0.1 {
            return m;
        }
    }
}

fn poly_mul(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let n = a[0].rows();
    let mut out = vec![ComplexMatrix::zeros(n, n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// `P(λ) = M (I + λN) D(λ) V` with `D = diag(Π (λ − r))`, `N` strictly upper
/// triangular (so `det(I + λN) = 1`) and `M`, `V` constant invertible.
///
/// With a polynomial factor, rows 2..n of `D` have degree `k − 1` so the
/// grade stays `k`; the missing `n − 1` degrees are infinite eigenvalues.
/// Returns the polynomial and its eigenvalues with multiplicity.
fn known_polynomial(rng: &mut ChaCha8Rng, n: usize, k: usize, polynomial_factor: bool) -> (MatrixPolynomial, Vec<ProjectivePoint>) {
    let lowered = polynomial_factor && n >= 2 && k >= 2;
    let degrees: Vec<usize> = (0..n).map(|j| if lowered && j > 0 { k - 1 } else { k }).collect();
    let total: usize = degrees.iter().sum();
    let mut roots: Vec<C64> = Vec::new();
    while roots.len() < total {
        let r = random_root(rng);
        let far = roots.iter().all(|q| {
            chordal_distance(&ProjectivePoint::from_lambda(r), &ProjectivePoint::from_lambda(*q)) > 0.05
        });
        if far {
            roots.push(r);
        }
    }
    let mut d = vec![ComplexMatrix::zeros(n, n); k + 1];
    let mut next_root = roots.iter();
    for (j, &deg) in degrees.iter().enumerate() {
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in next_root.by_ref().take(deg) {
            let mut grown = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                grown[i + 1] += a;
                grown[i] -= a * r;
            }
            coeffs = grown;
        }
        for (i, a) in coeffs.iter().enumerate() {
            d[i] = &d[i] + &ComplexMatrix::from_fn(n, n, |r, s| if r == j && s == j { *a } else { c(0.0, 0.0) });
        }
    }
    let mut left = vec![invertible_matrix(rng, n)];
    if lowered {
        let nil = ComplexMatrix::from_fn(n, n, |i, j| if j > i { c(rng.gen_range(-1.0..1.0), 0.0) } else { c(0.0, 0.0) });
        left = poly_mul(&left, &[ComplexMatrix::identity(n), nil]);
    }
    let mut coeffs = poly_mul(&poly_mul(&left, &d), &[invertible_matrix(rng, n)]);
    coeffs.truncate(k + 1);
    let mut points: Vec<ProjectivePoint> = roots.iter().map(|r| ProjectivePoint::from_lambda(*r)).collect();
    points.extend(std::iter::repeat(ProjectivePoint::infinity()).take(n * k - total));
    (MatrixPolynomial::new(coeffs).unwrap(), points)
}

fn eigensolver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_dist, mut worst_res) = (0.0f64, 0.0f64);
    for inst in 0..50usize {
        let n = 1 + inst % 3;
        let k = 1 + (inst / 3) % 3;
        let (p, roots) = known_polynomial(&mut rng, n, k, inst % 2 == 1);
        let spec = spectrum(&p, &Tolerances::default()).unwrap();
        if spec.points.len() != roots.len() {
            return outcome(false, format!("instance {inst}: {} eigenvalues, expected {}", spec.points.len(), roots.len()));
        }
        for rp in &roots {
            let d = spec.points.iter().map(|q| chordal_distance(rp, q)).fold(f64::INFINITY, f64::min);
            worst_dist = worst_dist.max(d);
        }
        for t in eigentriples(&p).unwrap() {
            let scale = polycond::eig::homogeneous_scale(&p, &t.point);
            worst_res = worst_res.max(t.residual / scale);
        }
    }
    outcome(
        worst_dist <= 1e-8 && worst_res <= 1e-8,
        format!("50 polynomials: worst chordal error {worst_dist:.2e}, worst relative eigenvector residual {worst_res:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("identity suite", identity_suite),
        ("extremal attainment", extremal_attainment),
        ("Monte-Carlo bound", monte_carlo_bound),
        ("example sweep", example_sweep_criterion),
        ("pencil lower bounds", pencil_bounds_suite),
        ("hand-value fixtures", hand_fixtures),
        ("eigensolver oracle", eigensolver_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
