use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use circlefol::bootstrap::{continue_family, ContinuationConfig, RegistryFamily};
use circlefol::cohomology::{solve_cohomological_with, CohomologyOptions};
use circlefol::{
    condition_report, initial_guess, solve as run_solver, verify_aposteriori, BootstrapConfig,
    CircleMap, ConjugacyTriple, ModelRegistry, Params, PeriodicFunction, Schedule, SolutionFile,
    SolverConfig, Thresholds,
};
use serde_json::json;

use crate::{ModelArgs, SolverArgs};

/// Bad command-line input (exit status 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

pub fn report_error(err: &anyhow::Error) -> ExitCode {
    if let Some(u) = err.downcast_ref::<Usage>() {
        eprintln!("usage error: {u}");
        eprintln!("run `circlefol --help` for the command grammar");
        return ExitCode::from(2);
    }
    match err.downcast_ref::<circlefol::Error>() {
        Some(e) => eprintln!("error: {}: {e}", e.name()),
        None => eprintln!("error: {err:#}"),
    }
    ExitCode::from(1)
}

fn parse_params(raw: &[String]) -> Result<Params> {
    let mut p = Params::new();
    for item in raw {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("--param expects NAME=VALUE, got '{item}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("parameter '{k}' has non-numeric value '{v}'")))?;
        p.set(k.trim(), v);
    }
    Ok(p)
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig> {
    let schedule = match args.schedule.as_str() {
        "nash_moser" => Schedule::NashMoser { beta: args.beta, kappa: 1.75 },
        "fixed" => Schedule::fixed(),
        "none" => Schedule::None,
        other => return Err(usage(format!("unknown schedule '{other}'"))),
    };
    if args.ntheta < 2 {
        return Err(usage("--ntheta must be at least 2"));
    }
    Ok(SolverConfig { tol: args.tol, max_iters: args.max_iters, schedule, ..Default::default() })
}

fn thresholds(residual: f64) -> Thresholds {
    Thresholds { residual, ..Default::default() }
}

/// Model name and merged parameters; the registry fills in defaults.
fn resolve_model(args: &ModelArgs, fallback: Option<&SolutionFile>) -> Result<(String, Params)> {
    let overrides = parse_params(&args.params)?;
    let (name, mut params) = match (&args.model, fallback) {
        (Some(name), Some(file)) if *name == file.model.name => (name.clone(), file.model.params.clone()),
        (Some(name), _) => (name.clone(), Params::new()),
        (None, Some(file)) => (file.model.name.clone(), file.model.params.clone()),
        (None, None) => return Err(usage("--model is required")),
    };
    for (k, v) in overrides.iter() {
        params.set(k, v);
    }
    Ok((name, params))
}

fn starting_triple(
    f: &dyn circlefol::MapModel,
    args: &SolverArgs,
) -> Result<ConjugacyTriple> {
    match &args.init {
        Some(path) => Ok(SolutionFile::read(path)?.triple()?),
        None => {
            let cfg = BootstrapConfig {
                n_modes: args.ntheta,
                order: args.order,
                delta: args.delta,
                ..Default::default()
            };
            Ok(initial_guess(f, &cfg)?)
        }
    }
}

pub fn solve(model: &ModelArgs, args: &SolverArgs, out: &Path) -> Result<ExitCode> {
    let cfg = solver_config(args)?;
    let (name, params) = resolve_model(model, None)?;
    let registry = ModelRegistry::builtin();
    let f = registry.create(&name, &params)?;
    let u0 = starting_triple(f.as_ref(), args)?;
    let outcome = run_solver(f.as_ref(), &u0, &cfg)?;
    let report = condition_report(f.as_ref(), &outcome.triple, &thresholds(args.residual_threshold));
    let file = SolutionFile::new(&name, f.params(), &outcome.triple, Some(report.clone()));
    file.write(out)?;
    let summary = json!({
        "model": name,
        "iterations": outcome.iterations(),
        "residual": outcome.residual,
        "history": outcome.history,
        "report": report,
        "out": out.display().to_string(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

struct Sweep {
    parameter: String,
    start: f64,
    end: f64,
    step: f64,
}

fn parse_sweep(raw: &str) -> Result<Sweep> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 4 {
        return Err(usage(format!("--sweep expects param:start:end:step, got '{raw}'")));
    }
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("--sweep value '{s}' is not a number")))
    };
    let sweep = Sweep {
        parameter: parts[0].trim().to_string(),
        start: num(parts[1])?,
        end: num(parts[2])?,
        step: num(parts[3])?.abs(),
    };
    if !(sweep.step > 0.0) {
        return Err(usage("--sweep step must be nonzero"));
    }
    Ok(sweep)
}

pub fn continuation(model: &ModelArgs, args: &SolverArgs, sweep: &str, outdir: &Path) -> Result<ExitCode> {
    let cfg = solver_config(args)?;
    let sweep = parse_sweep(sweep)?;
    let (name, mut params) = resolve_model(model, None)?;
    params.set(&sweep.parameter, sweep.start);
    let registry = ModelRegistry::builtin();
    let f0 = registry.create(&name, &params)?;
    let u0 = starting_triple(f0.as_ref(), args)?;
    fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;

    let family = RegistryFamily {
        registry: registry.clone(),
        model: name.clone(),
        base: params.clone(),
        parameter: sweep.parameter.clone(),
    };
    let th = thresholds(args.residual_threshold);
    let ccfg = ContinuationConfig { step: sweep.step, min_step: sweep.step * 1e-3, ..Default::default() };
    let mut summary = Vec::new();
    let result = continue_family(&family, &u0, sweep.start, sweep.end, &ccfg, &cfg, |pt| {
        let f = circlefol::bootstrap::ModelFamily::at(&family, pt.parameter)?;
        let report = condition_report(f.as_ref(), &pt.outcome.triple, &th);
        let file_name = format!("point_{:03}.json", summary.len());
        let entry = json!({
            "parameter": pt.parameter,
            "iterations": pt.outcome.iterations(),
            "residual": pt.outcome.residual,
            "m_max": if report.m_max.is_finite() { json!(report.m_max) } else { json!("inf") },
            "lambda_star": report.lambda_star,
            "file": file_name,
        });
        SolutionFile::new(&name, f.params(), &pt.outcome.triple, Some(report))
            .write(&outdir.join(&file_name))?;
        println!(
            "{} = {:.6}  iterations {}  residual {:.3e}",
            sweep.parameter,
            pt.parameter,
            pt.outcome.iterations(),
            pt.outcome.residual
        );
        summary.push(entry);
        Ok(())
    });
    fs::write(outdir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    result?;
    Ok(ExitCode::SUCCESS)
}

pub fn verify(model: &ModelArgs, solution: &Path, residual_threshold: f64) -> Result<ExitCode> {
    let file = SolutionFile::read(solution)?;
    let (name, params) = resolve_model(model, Some(&file))?;
    let f = ModelRegistry::builtin().create(&name, &params)?;
    let u = file.triple()?;
    let th = thresholds(residual_threshold);
    let report = condition_report(f.as_ref(), &u, &th);
    let verdict = verify_aposteriori(&report, &th);
    let doc = json!({ "model": name, "report": report, "verdict": verdict });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    if verdict.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        let failed: Vec<&str> = verdict.flags.iter().filter(|f| !f.ok).map(|f| f.name).collect();
        eprintln!("verdict: FAIL ({})", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn read_coefficients(path: &Path) -> Result<PeriodicFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: expected a JSON array of [re, im] pairs ({e})", path.display())))?;
    Ok(PeriodicFunction::from_pairs(&pairs)?)
}

pub fn cohom(l: &Path, a: &Path, eta: &Path, tol: f64) -> Result<ExitCode> {
    let l = read_coefficients(l)?;
    let a = CircleMap::new(read_coefficients(a)?);
    let eta = read_coefficients(eta)?;
    for m in [a.n_modes(), eta.n_modes()] {
        if m != l.n_modes() {
            return Err(circlefol::Error::ModeMismatch { left: l.n_modes(), right: m }.into());
        }
    }
    let sol = solve_cohomological_with(&l, &a, &eta, &CohomologyOptions { tol, ..Default::default() })?;
    let doc = json!({
        "phi": sol.phi.to_pairs(),
        "residual": sol.residual,
        "rounds": sol.rounds,
        "terms": sol.terms,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(ExitCode::SUCCESS)
}

pub fn export(solution: &Path, grid: usize, smax: f64, ns: usize, format: &str, out: &Path) -> Result<ExitCode> {
    if format != "csv" {
        return Err(usage(format!("unsupported export format '{format}' (only csv)")));
    }
    if grid == 0 || ns == 0 {
        return Err(usage("--grid and --ns must be positive"));
    }
    let u = SolutionFile::read(solution)?.triple()?;
    let s_values: Vec<f64> = if ns == 1 {
        vec![0.0]
    } else {
        (0..ns).map(|k| -smax + 2.0 * smax * k as f64 / (ns - 1) as f64).collect()
    };
    let mut w = std::io::BufWriter::new(
        fs::File::create(out).with_context(|| format!("creating {}", out.display()))?,
    );
    writeln!(w, "theta,s,x,y")?;
    for i in 0..grid {
        let theta = i as f64 / grid as f64;
        for &s in &s_values {
            let [x, y] = u.w.eval(theta, s);
            writeln!(w, "{theta},{s},{x},{y}")?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
