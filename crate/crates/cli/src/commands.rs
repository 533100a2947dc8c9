use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use polycond::cond::{chordal_distance_raw, relation_report, ConditionReport, Regime};
use polycond::eig::{eigentriple_in, spectrum, EigenTriple, Eigenvalue, ProjectivePoint};
use polycond::numlin::{Tolerances, C64};
use polycond::perturb::{empirical_condition, example_pencil, example_sweep, log_grid, PerturbationSpec, Target};
use polycond::poly::{MatrixPolynomial, WeightMode, WeightScheme};
use serde_json::{json, Value};

use crate::document::PolynomialDocument;
use crate::error::{CliError, CliResult};
use crate::format::{complex, num, opt, parse_complex};
use crate::{
    AnalyzeArgs, ChordalArgs, EmpiricalArgs, GenerateArgs, OutputFormat, SweepArgs, TargetArg, VerifyArgs, WeightArg,
    WeightOptions,
};

pub struct Context {
    tol: Tolerances,
    digits: usize,
}

impl Context {
    pub fn new(tol: Option<f64>, digits: usize) -> CliResult<Self> {
        let tol = match tol {
            Some(t) if t > 0.0 && t < 1.0 => Tolerances::with_tol(t),
            Some(t) => return Err(CliError::Parse(format!("tolerance must lie in (0, 1), got {t}"))),
            None => Tolerances::default(),
        };
        if !(1..=17).contains(&digits) {
            return Err(CliError::Parse(format!("--digits must lie in 1..=17, got {digits}")));
        }
        Ok(Self { tol, digits })
    }

    fn num(&self, v: f64) -> String {
        num(v, self.digits)
    }

    fn opt(&self, v: Option<f64>, missing: &str) -> String {
        opt(v, self.digits, missing)
    }
}

fn weight_mode(w: &WeightOptions) -> Option<WeightMode> {
    w.weights.map(|a| match a {
        WeightArg::Coeff => WeightMode::CoefficientNorms,
        WeightArg::Max => WeightMode::MaxNorm,
        WeightArg::Abs => WeightMode::Absolute,
        WeightArg::Custom => WeightMode::Custom,
    })
}

fn load(path: &Path, w: &WeightOptions) -> CliResult<(MatrixPolynomial, WeightScheme)> {
    let doc = PolynomialDocument::read(path)?;
    let p = doc.polynomial()?;
    let weights = doc.weights(&p, weight_mode(w), w.weight_values.clone())?;
    Ok((p, weights))
}

/// One distinct eigenvalue with its triple (absent if it is not simple).
struct Row {
    eigenvalue: Eigenvalue,
    triple: EigenTriple,
    report: Option<ConditionReport>,
}

fn rows(ctx: &Context, p: &MatrixPolynomial, w: &WeightScheme) -> CliResult<Vec<Row>> {
    let spec = spectrum(p, &ctx.tol)?;
    spec.eigenvalues
        .iter()
        .map(|e| {
            let triple = eigentriple_in(p, &spec, &e.point)?;
            let report = if triple.simple { Some(relation_report(p, &triple, w)?) } else { None };
            Ok(Row { eigenvalue: *e, triple, report })
        })
        .collect()
}

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::Zero => "zero",
        Regime::Small => "small",
        Regime::NearUnit => "near-unit",
        Regime::Large => "large",
        Regime::Infinite => "infinite",
    }
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn analyze(ctx: &Context, args: &AnalyzeArgs) -> CliResult<()> {
    let (p, w) = load(&args.file, &args.weights)?;
    let rows = rows(ctx, &p, &w)?;
    let mut out = io::stdout().lock();
    match args.format {
        OutputFormat::Text => analyze_text(ctx, &mut out, &p, &w, &rows)?,
        OutputFormat::Json => analyze_json(&mut out, &w, &rows)?,
        OutputFormat::Csv => analyze_csv(ctx, &mut out, &rows)?,
    }
    Ok(())
}

fn analyze_text(ctx: &Context, out: &mut impl Write, p: &MatrixPolynomial, w: &WeightScheme, rows: &[Row]) -> CliResult<()> {
    let ws: Vec<String> = w.weights().iter().map(|&v| ctx.num(v)).collect();
    writeln!(out, "n = {}, k = {}, weights = {} [{}]", p.n(), p.grade(), w.mode().as_str(), ws.join(", "))?;
    for (i, row) in rows.iter().enumerate() {
        let pt = &row.eigenvalue.point;
        writeln!(out)?;
        let Some(r) = &row.report else {
            writeln!(
                out,
                "eigenvalue {}: lambda = {}  NOT SIMPLE (multiplicity {}); condition numbers not defined",
                i + 1,
                lambda_text(ctx, pt),
                row.eigenvalue.multiplicity
            )?;
            continue;
        };
        writeln!(out, "eigenvalue {}: lambda = {}", i + 1, lambda_text(ctx, pt))?;
        writeln!(out, "  (alpha, beta) = ({}, {})", complex(pt.alpha(), ctx.digits), complex(pt.beta(), ctx.digits))?;
        writeln!(out, "  |lambda|      = {}", ctx.num(r.lambda_abs))?;
        writeln!(out, "  kappa_a       = {}", ctx.opt(r.kappa_a, "undefined"))?;
        writeln!(out, "  kappa_r       = {}", ctx.opt(r.kappa_r, "undefined"))?;
        writeln!(out, "  kappa_h       = {}", ctx.num(r.kappa_h))?;
        writeln!(out, "  kappa_theta   = {}", ctx.num(r.kappa_theta))?;
        writeln!(out, "  regime        = {}: {}", regime_label(r.regime), r.regime.description())?;
    }
    Ok(())
}

fn lambda_text(ctx: &Context, pt: &ProjectivePoint) -> String {
    pt.lambda().map_or_else(|| "inf".to_string(), |l| complex(l, ctx.digits))
}

fn analyze_json(out: &mut impl Write, w: &WeightScheme, rows: &[Row]) -> CliResult<()> {
    let eigenvalues: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let pt = &row.eigenvalue.point;
            let mut v = json!({
                "index": i + 1,
                "alpha": pair(pt.alpha()),
                "beta": pair(pt.beta()),
                "lambda": pt.lambda().map_or(json!("inf"), pair),
                "abs_lambda": if pt.is_infinite() { json!("inf") } else { json!(pt.abs_lambda()) },
                "multiplicity": row.eigenvalue.multiplicity,
                "simple": row.triple.simple,
            });
            if let Some(r) = &row.report {
                let obj = v.as_object_mut().unwrap();
                obj.insert("kappa_a".into(), json!(r.kappa_a));
                obj.insert("kappa_r".into(), json!(r.kappa_r));
                obj.insert("kappa_h".into(), json!(r.kappa_h));
                obj.insert("kappa_theta".into(), json!(r.kappa_theta));
                obj.insert("regime".into(), json!(regime_label(r.regime)));
                obj.insert("regime_note".into(), json!(r.regime.description()));
            }
            v
        })
        .collect();
    let doc = json!({
        "weights": { "mode": w.mode().as_str(), "values": w.weights() },
        "eigenvalues": eigenvalues,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))?;
    Ok(())
}

fn analyze_csv(ctx: &Context, out: &mut impl Write, rows: &[Row]) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "index", "alpha_re", "alpha_im", "beta_re", "beta_im", "lambda_re", "lambda_im", "abs_lambda",
        "multiplicity", "simple", "kappa_a", "kappa_r", "kappa_h", "kappa_theta", "regime",
    ])?;
    for (i, row) in rows.iter().enumerate() {
        let pt = &row.eigenvalue.point;
        let (lre, lim) = pt.lambda().map_or((String::new(), String::new()), |l| (ctx.num(l.re), ctx.num(l.im)));
        let r = row.report.as_ref();
        wtr.write_record([
            (i + 1).to_string(),
            ctx.num(pt.alpha().re),
            ctx.num(pt.alpha().im),
            ctx.num(pt.beta().re),
            ctx.num(pt.beta().im),
            lre,
            lim,
            ctx.num(pt.abs_lambda()),
            row.eigenvalue.multiplicity.to_string(),
            row.triple.simple.to_string(),
            ctx.opt(r.and_then(|r| r.kappa_a), ""),
            ctx.opt(r.and_then(|r| r.kappa_r), ""),
            ctx.opt(r.map(|r| r.kappa_h), ""),
            ctx.opt(r.map(|r| r.kappa_theta), ""),
            r.map_or(String::new(), |r| regime_label(r.regime).to_string()),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> CliResult<()> {
    let mut inputs: Vec<(String, MatrixPolynomial, WeightScheme)> = Vec::new();
    if let Some(r) = &args.random {
        let (n, k, seed) = (r[0] as usize, r[1] as usize, r[2]);
        for s in seed..seed + args.count {
            let p = MatrixPolynomial::random(n, k, s)?;
            let doc = PolynomialDocument::from_polynomial(&p, None);
            let w = doc.weights(&p, weight_mode(&args.weights), args.weights.weight_values.clone())?;
            inputs.push((format!("random n={n} k={k} seed={s}"), p, w));
        }
    } else if let Some(path) = &args.file {
        let (p, w) = load(path, &args.weights)?;
        inputs.push((path.display().to_string(), p, w));
    }

    let mut worst: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let (mut simple, mut skipped) = (0usize, 0usize);
    for (_, p, w) in &inputs {
        for row in rows(ctx, p, w)? {
            let Some(mut report) = row.report else {
                skipped += 1;
                continue;
            };
            if let Some(rel) = args.corrupt_kappa_theta {
                report.kappa_theta *= 1.0 + rel;
                report.recheck();
            }
            simple += 1;
            for (name, r) in report.identity_residuals {
                let e = worst.entry(name).or_insert((0.0, 0));
                e.0 = e.0.max(r);
                e.1 += 1;
            }
        }
    }

    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{} polynomial(s), {simple} simple eigenvalue(s), {skipped} non-simple skipped",
        inputs.len()
    )?;
    writeln!(out, "{:<26} {:>24} {:>6}", "relation", "worst_residual", "count")?;
    for (name, (r, count)) in &worst {
        let flag = if *r > args.max_residual { "  FAIL" } else { "" };
        writeln!(out, "{name:<26} {:>24} {count:>6}{flag}", ctx.num(*r))?;
    }
    let overall = worst.iter().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
    match overall {
        Some((name, (r, _))) if *r > args.max_residual => Err(CliError::CheckFailed(format!(
            "{name} residual {} exceeds --max-residual {}",
            ctx.num(*r),
            ctx.num(args.max_residual)
        ))),
        Some((name, (r, _))) => {
            writeln!(out, "worst: {name} = {} (limit {})", ctx.num(*r), ctx.num(args.max_residual))?;
            Ok(())
        }
        None => {
            writeln!(out, "no simple eigenvalues to check")?;
            Ok(())
        }
    }
}

pub fn empirical(ctx: &Context, args: &EmpiricalArgs) -> CliResult<()> {
    let (p, w) = load(&args.file, &args.weights)?;
    let target = match args.target {
        TargetArg::A => Target::KappaA,
        TargetArg::R => Target::KappaR,
        TargetArg::Theta => Target::KappaTheta,
    };
    let spec = PerturbationSpec::new(args.eps, w, args.samples, args.seed)?;
    if let Some(warning) = spec.size_warning(&p) {
        eprintln!("polycond: warning: {warning}");
    }
    let rows = rows(ctx, &p, &spec.weights)?;
    let mut lines = Vec::new();
    let mut first_skip: Option<polycond::Error> = None;
    for (i, row) in rows.iter().enumerate() {
        if !row.triple.simple {
            continue;
        }
        match empirical_condition(&p, &row.triple, &spec, target) {
            Ok(est) => lines.push((i + 1, row.eigenvalue.point, est)),
            Err(
                e @ (polycond::Error::UndefinedForInfinite
                | polycond::Error::UndefinedForZeroOrInfinite
                | polycond::Error::UndefinedForPoint(_)),
            ) => {
                eprintln!("polycond: eigenvalue {} skipped: {e}", i + 1);
                first_skip.get_or_insert(e);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if lines.is_empty() {
        return Err(match first_skip {
            Some(e) => e.into(),
            None => CliError::Numeric("no simple eigenvalues".into()),
        });
    }
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "target = {}, eps = {}, samples = {}, seed = {}, weights = {}",
        target.as_str(),
        ctx.num(args.eps),
        args.samples,
        args.seed,
        spec.weights.mode().as_str()
    )?;
    for (idx, pt, est) in lines {
        writeln!(out)?;
        writeln!(out, "eigenvalue {idx}: lambda = {}", lambda_text(ctx, &pt))?;
        writeln!(out, "  formula        = {}", ctx.num(est.formula_value))?;
        writeln!(out, "  extremal_ratio = {}", ctx.num(est.extremal_ratio))?;
        writeln!(out, "  mc_max_ratio   = {}", ctx.num(est.mc_max_ratio))?;
        writeln!(out, "  extremal_gap   = {}", ctx.num(est.extremal_gap()))?;
        writeln!(out, "  mc_gap         = {}", ctx.num(est.mc_gap()))?;
    }
    Ok(())
}

pub fn sweep(ctx: &Context, args: &SweepArgs) -> CliResult<()> {
    for (name, v) in [("--eps-min", args.eps_min), ("--eps-max", args.eps_max)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(CliError::Parse(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    if args.eps_min > args.eps_max {
        return Err(CliError::Parse("--eps-min exceeds --eps-max".into()));
    }
    if args.points < 2 {
        return Err(CliError::Parse("--points must be at least 2".into()));
    }
    let records = example_sweep(&log_grid(args.eps_min, args.eps_max, args.points)?)?;

    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(["eps", "abs_lambda0", "kappa_theta", "kappa_r", "kappa_a", "abs_lambda1"])?;
    for r in &records {
        let abs = r.abs_lambdas();
        wtr.write_record([
            ctx.num(r.eps),
            ctx.num(abs[0]),
            ctx.num(r.kappa_theta),
            ctx.num(r.kappa_r),
            ctx.num(r.kappa_a),
            ctx.num(abs[1]),
        ])?;
    }
    wtr.flush()?;

    if let (Some(script), Some(csv_path)) = (&args.gnuplot, &args.output) {
        std::fs::write(script, gnuplot_script(csv_path))?;
    }
    Ok(())
}

fn gnuplot_script(csv_path: &Path) -> String {
    let data = csv_path.display().to_string().replace('\'', "''");
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale xy\n\
         set format xy '%.0e'\n\
         set xlabel 'epsilon'\n\
         set title 'Example pencil: |lambda0|, kappa_theta, kappa_r against epsilon'\n\
         plot '{data}' using 1:2 with linespoints title '|lambda0|', \\\n\
         \x20    '' using 1:3 with linespoints title 'kappa_theta', \\\n\
         \x20    '' using 1:4 with linespoints title 'kappa_r'\n"
    )
}

pub fn chordal(ctx: &Context, args: &ChordalArgs) -> CliResult<()> {
    let [a, b, c, d] = [&args.a, &args.b, &args.c, &args.d].map(|s| parse_complex(s));
    let (a, b, c, d) = (a?, b?, c?, d?);
    if a.norm() == 0.0 && b.norm() == 0.0 || c.norm() == 0.0 && d.norm() == 0.0 {
        return Err(CliError::Parse("(0, 0) does not define a line".into()));
    }
    let chi = chordal_distance_raw(a, b, c, d);
    let p = ProjectivePoint::new(a, b)?;
    let q = ProjectivePoint::new(c, d)?;
    let theta = polycond::cond::line_angle(&p, &q);
    let mut out = io::stdout().lock();
    writeln!(out, "chi = {}", ctx.num(chi))?;
    writeln!(out, "theta = {}", ctx.num(theta))?;
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let p = match (&args.random, args.example) {
        (Some(r), _) => MatrixPolynomial::random(r[0] as usize, r[1] as usize, r[2])?,
        (None, Some(eps)) => example_pencil(eps)?,
        (None, None) => unreachable!("clap requires one of --random, --example"),
    };
    let text = PolynomialDocument::from_polynomial(&p, None).to_json() + "\n";
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
