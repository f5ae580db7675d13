use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use turan_core::golden::{self, GoldenFile};
use turan_core::ousim::{
    eq5_from_samples, holder_analytic_gap, holder_from_samples, sample_hitting_times,
};
use turan_core::ratio::scan as run_scan;
use turan_core::specfun::{dnu, generator_residual, hermite, identity_residual};
use turan_core::tolerances::{GENERATOR, HOLDER_SIGMAS, IDENTITY, Z_BAND};
use turan_core::{Error, EvalResult, OUParams, Order, QuadratureConfig, ScanKind, SimConfig};

use crate::config::ConfigFile;
use crate::exit::{CliError, Exit};
use crate::output::{csv_line, emit, fmt_f64, Format, Report};
use crate::{
    EqArgsView, EvalArgs, Func, GeneratorArgs, GoldenArgs, HolderArgs, IdentityArgs, OuArgs,
    QuadArgs, ScanArgs, SimArgs, Which,
};

const DEFAULT_GOLDEN_TOL: f64 = 1e-10;

fn quad_config(q: &QuadArgs, cfg: &ConfigFile) -> Result<QuadratureConfig, CliError> {
    let d = QuadratureConfig::default();
    let quad = QuadratureConfig {
        rel_tol: cfg.or(q.rel_tol, "rel_tol", d.rel_tol)?,
        max_subdivisions: cfg.or(q.max_subdivisions, "max_subdivisions", d.max_subdivisions)?,
        tail_sigma: cfg.or(q.tail_sigma, "tail_sigma", d.tail_sigma)?,
    };
    quad.validate()?;
    Ok(quad)
}

fn quad_params(q: &QuadratureConfig) -> Value {
    json!({
        "rel_tol": q.rel_tol,
        "max_subdivisions": q.max_subdivisions,
        "tail_sigma": q.tail_sigma,
    })
}

fn order(cfg: &ConfigFile, flag: Option<f64>) -> Result<Order, CliError> {
    Ok(Order::new(cfg.require(flag, "nu")?)?)
}

fn ou_params(a: &OuArgs, cfg: &ConfigFile) -> Result<OUParams, CliError> {
    Ok(OUParams::new(
        cfg.or(a.mu, "mu", 0.0)?,
        cfg.or(a.sigma, "sigma", 1.0)?,
    )?)
}

fn merge(base: Value, extra: Value) -> Value {
    match (base, extra) {
        (Value::Object(mut a), Value::Object(b)) => {
            a.extend(b);
            Value::Object(a)
        }
        (a, _) => a,
    }
}

fn output_path(flag: &Option<PathBuf>, cfg: &ConfigFile) -> Result<Option<PathBuf>, CliError> {
    cfg.pick(flag.clone(), "output")
}

/// `--seed`, else the config file, else a fresh seed unless `CI_STRICT=1`.
fn resolve_seed(flag: Option<u64>, cfg: &ConfigFile) -> Result<u64, CliError> {
    if let Some(seed) = cfg.pick(flag, "seed")? {
        return Ok(seed);
    }
    if std::env::var("CI_STRICT").is_ok_and(|v| v == "1") {
        return Err(CliError::usage("--seed is required when CI_STRICT=1"));
    }
    let seed = rand::random::<u64>();
    eprintln!("seed: {seed}");
    Ok(seed)
}

fn sim_config(a: &SimArgs, cfg: &ConfigFile) -> Result<SimConfig, CliError> {
    let d = SimConfig::default();
    let no_bridge = cfg.or(a.no_bridge.then_some(true), "no_bridge", false)?;
    let sim = SimConfig {
        dt: cfg.or(a.dt, "dt", d.dt)?,
        t_max: cfg.or(a.t_max, "t_max", d.t_max)?,
        n_paths: cfg.or(a.paths, "paths", d.n_paths)?,
        seed: resolve_seed(a.seed, cfg)?,
        bridge_correction: !no_bridge,
    };
    sim.validate()?;
    Ok(sim)
}

fn sim_params(s: &SimConfig) -> Value {
    json!({
        "paths": s.n_paths,
        "dt": s.dt,
        "t_max": s.t_max,
        "seed": s.seed,
        "bridge_correction": s.bridge_correction,
    })
}

fn verdict_exit(pass: bool, fail: Exit) -> Exit {
    if pass {
        Exit::Ok
    } else {
        fail
    }
}

pub fn eval(a: EvalArgs, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let func: Func = cfg.require(a.func, "fn")?;
    let nu = order(cfg, a.nu)?;
    let x: f64 = cfg.require(a.x, "x")?;
    let quad = quad_config(&a.quad, cfg)?;
    let format = cfg.or(a.out.format, "format", Format::Csv)?;
    let output = output_path(&a.out.output, cfg)?;

    let computed = match func {
        Func::H => hermite(nu, x, &quad),
        Func::D => dnu(nu, x, &quad),
    };
    // A non-converged evaluation still reports its best estimate.
    let (res, converged, failure): (EvalResult, bool, Option<CliError>) = match computed {
        Ok(r) => (r, true, None),
        Err(e @ Error::Convergence { best, .. }) => (best, false, Some(e.into())),
        Err(e) => return Err(e.into()),
    };

    let name = match func {
        Func::H => "H",
        Func::D => "D",
    };
    let value = if res.value.overflows_f64() {
        None
    } else {
        Some(res.value.to_f64())
    };
    let text = match format {
        Format::Csv => {
            let value = value.map_or_else(|| "inf".to_string(), fmt_f64);
            csv_line(&["nu", "x", "fn", "log_value", "value", "rel_err"].map(String::from))
                + &csv_line(&[
                    fmt_f64(nu.get()),
                    fmt_f64(x),
                    name.into(),
                    fmt_f64(res.log_mag()),
                    value,
                    fmt_f64(res.abs_err_log),
                ])
        }
        Format::Json => {
            let params = merge(
                json!({"fn": name, "nu": nu.get(), "x": x}),
                quad_params(&quad),
            );
            let results = json!({
                "nu": nu.get(),
                "x": x,
                "fn": name,
                "log_value": res.log_mag(),
                "value": value.map_or_else(|| json!("inf"), |v| json!(v)),
                "rel_err": res.abs_err_log,
                "converged": converged,
            });
            Report::new("eval", params, results, converged).to_json()
        }
    };
    emit(output.as_deref(), &text)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(Exit::Ok),
    }
}

pub fn scan(a: ScanArgs, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let which: Which = cfg.require(a.which, "which")?;
    let nu = order(cfg, a.nu)?;
    let x_min: f64 = cfg.require(a.xmin, "xmin")?;
    let x_max: f64 = cfg.require(a.xmax, "xmax")?;
    let n: usize = cfg.require(a.n, "n")?;
    let quad = quad_config(&a.quad, cfg)?;
    let format = cfg.or(a.out.format, "format", Format::Csv)?;
    let output = output_path(&a.out.output, cfg)?;
    let summary_path: Option<PathBuf> = cfg.pick(a.summary.clone(), "summary")?;

    let kind = match which {
        Which::RatioH => ScanKind::RatioH,
        Which::RatioD => ScanKind::RatioD,
        Which::Turan => ScanKind::Turan,
        Which::Psi => {
            let p = ou_params(
                &OuArgs {
                    mu: a.mu,
                    sigma: a.sigma,
                },
                cfg,
            )?;
            ScanKind::Psi {
                mu: p.mu(),
                sigma: p.sigma(),
            }
        }
    };
    let report = run_scan(kind, nu, x_min, x_max, n, &quad)?;
    let (left, right) = kind.limits(nu);
    let (lo, hi) = kind.range(nu);

    let mut params = json!({
        "which": which_name(which),
        "nu": nu.get(),
        "xmin": x_min,
        "xmax": x_max,
        "n": n,
    });
    if let ScanKind::Psi { mu, sigma } = kind {
        params = merge(params, json!({"mu": mu, "sigma": sigma}));
    }
    let params = merge(params, quad_params(&quad));
    let mut results = json!({
        "range": [lo, hi],
        "left_limit": left,
        "right_limit": right,
        "left_limit_gap": report.left_limit_gap,
        "right_limit_gap": report.right_limit_gap,
        "monotone_violations": report.monotone_violations,
        "bound_violations": report.bound_violations,
    });
    let clean = report.is_clean();

    match format {
        Format::Csv => {
            let mut csv = csv_line(&["x", "value", "rel_err"].map(String::from));
            for p in &report.points {
                csv += &csv_line(&[fmt_f64(p.x), fmt_f64(p.r), fmt_f64(p.rel_err)]);
            }
            emit(output.as_deref(), &csv)?;
            let summary = Report::new("scan", params, results, clean).to_json();
            match summary_path {
                Some(p) => emit(Some(&p), &summary)?,
                None => eprint!("{summary}"),
            }
        }
        Format::Json => {
            let points: Vec<Value> = report
                .points
                .iter()
                .map(|p| json!({"x": p.x, "value": p.r, "rel_err": p.rel_err}))
                .collect();
            results = merge(results, json!({ "points": points }));
            emit(
                output.as_deref(),
                &Report::new("scan", params, results, clean).to_json(),
            )?;
        }
    }
    Ok(verdict_exit(clean, Exit::PropertyViolation))
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::RatioH => "ratioH",
        Which::RatioD => "ratioD",
        Which::Turan => "turan",
        Which::Psi => "psi",
    }
}

/// Arguments shared by the two Monte Carlo checks.
struct McSetup {
    nu: Order,
    x: f64,
    y: f64,
    ou: OUParams,
    sim: SimConfig,
    quad: QuadratureConfig,
    output: Option<PathBuf>,
}

impl McSetup {
    fn new(v: EqArgsView<'_>, cfg: &ConfigFile) -> Result<Self, CliError> {
        Ok(Self {
            nu: order(cfg, v.nu)?,
            x: cfg.require(v.x, "x")?,
            y: cfg.require(v.y, "y")?,
            ou: ou_params(v.ou, cfg)?,
            quad: quad_config(v.quad, cfg)?,
            output: output_path(v.output, cfg)?,
            sim: sim_config(v.sim, cfg)?,
        })
    }

    fn params(&self) -> Value {
        let base = json!({
            "nu": self.nu.get(),
            "x": self.x,
            "y": self.y,
            "mu": self.ou.mu(),
            "sigma": self.ou.sigma(),
        });
        merge(merge(base, sim_params(&self.sim)), quad_params(&self.quad))
    }
}

pub fn verify_eq5(a: crate::Eq5Args, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let k: u32 = cfg.or(a.k, "k", 0)?;
    let s = McSetup::new(EqArgsView::from(&a), cfg)?;
    // Fail fast on the analytic side before spending time on paths.
    turan_core::ousim::eigen_ratio(s.x, s.y, s.nu, k, &s.ou, &s.quad)?;
    let samples = sample_hitting_times(s.x, s.y, &s.ou, &s.sim)?;
    let r = eq5_from_samples(&samples, s.x, s.y, s.nu, k, &s.ou, &s.quad)?;
    let pass = r.z_score.abs() <= Z_BAND;
    let results = json!({
        "lambda": r.lambda,
        "mc": r.mc,
        "analytic": r.analytic,
        "stderr": r.stderr,
        "z_score": r.z_score,
        "z_band": Z_BAND,
        "censored_bound": r.censored_bound,
        "n_hit": samples.n_hit(),
        "n_censored": samples.n_censored(),
    });
    let params = merge(s.params(), json!({ "k": k }));
    emit(
        s.output.as_deref(),
        &Report::new("verify eq5", params, results, pass).to_json(),
    )?;
    Ok(verdict_exit(pass, Exit::BandViolation))
}

pub fn verify_holder(a: HolderArgs, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let s = McSetup::new(EqArgsView::from(&a), cfg)?;
    let analytic_gap = holder_analytic_gap(s.x, s.y, s.nu, &s.ou, &s.quad)?;
    let samples = sample_hitting_times(s.x, s.y, &s.ou, &s.sim)?;
    let r = holder_from_samples(&samples, s.nu)?;
    let pass = r.is_strict(HOLDER_SIGMAS);
    let results = json!({
        "lhs": r.lhs,
        "rhs": r.rhs,
        "gap": r.gap,
        "stderr": r.stderr,
        "sigmas_required": HOLDER_SIGMAS,
        "analytic_gap": analytic_gap,
        "n_hit": samples.n_hit(),
        "n_censored": samples.n_censored(),
    });
    emit(
        s.output.as_deref(),
        &Report::new("verify holder", s.params(), results, pass).to_json(),
    )?;
    Ok(verdict_exit(pass, Exit::BandViolation))
}

pub fn verify_generator(a: GeneratorArgs, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let nu = order(cfg, a.nu)?;
    let x: f64 = cfg.require(a.x, "x")?;
    let ou = ou_params(&a.ou, cfg)?;
    let quad = quad_config(&a.quad, cfg)?;
    let output = output_path(&a.output, cfg)?;
    let residual = generator_residual(x, &ou, nu, &quad)?;
    let pass = residual <= GENERATOR;
    let params = merge(
        json!({"nu": nu.get(), "x": x, "mu": ou.mu(), "sigma": ou.sigma()}),
        quad_params(&quad),
    );
    let results = json!({"residual": residual, "tolerance": GENERATOR});
    emit(
        output.as_deref(),
        &Report::new("verify generator", params, results, pass).to_json(),
    )?;
    Ok(verdict_exit(pass, Exit::BandViolation))
}

pub fn verify_identity(a: IdentityArgs, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let nu = order(cfg, a.nu)?;
    let x: f64 = cfg.require(a.x, "x")?;
    let quad = quad_config(&a.quad, cfg)?;
    let output = output_path(&a.output, cfg)?;
    let residual = identity_residual(nu, x, &quad)?;
    let pass = residual <= IDENTITY;
    let params = merge(json!({"nu": nu.get(), "x": x}), quad_params(&quad));
    let results = json!({"residual": residual, "tolerance": IDENTITY});
    emit(
        output.as_deref(),
        &Report::new("verify identity", params, results, pass).to_json(),
    )?;
    Ok(verdict_exit(pass, Exit::BandViolation))
}

pub fn golden(a: GoldenArgs, cfg: &ConfigFile) -> Result<Exit, CliError> {
    let input: PathBuf = cfg.require(a.input.clone(), "input")?;
    let rel_tol = cfg.or(a.rel_tol, "rel_tol", DEFAULT_GOLDEN_TOL)?;
    if !(rel_tol > 0.0) {
        return Err(CliError::usage(format!(
            "--rel-tol must be positive, got {rel_tol}"
        )));
    }
    let d = QuadratureConfig::default();
    let quad = QuadratureConfig {
        // The evaluation itself runs well below the comparison tolerance.
        rel_tol: d.rel_tol,
        max_subdivisions: cfg.or(a.max_subdivisions, "max_subdivisions", d.max_subdivisions)?,
        tail_sigma: cfg.or(a.tail_sigma, "tail_sigma", d.tail_sigma)?,
    };
    quad.validate()?;
    let format = cfg.or(a.out.format, "format", Format::Csv)?;
    let output = output_path(&a.out.output, cfg)?;

    let file = GoldenFile::from_path(&input)?;
    if file.entries.is_empty() {
        eprintln!("warning: {} has no entries", input.display());
    }
    let checks = golden::compare(&file, rel_tol, &quad)?;
    let n_fail = checks.iter().filter(|c| !c.pass).count();
    let max_abs = checks.iter().map(|c| c.abs_diff).fold(0.0, f64::max);
    let pass = n_fail == 0;

    let text = match format {
        Format::Csv => {
            let header = [
                "fn",
                "nu",
                "x",
                "reference_log",
                "computed_log",
                "abs_diff",
                "status",
            ];
            let mut csv = csv_line(&header.map(String::from));
            for c in &checks {
                csv += &csv_line(&[
                    format!("{:?}", c.func),
                    fmt_f64(c.nu),
                    fmt_f64(c.x),
                    fmt_f64(c.reference_log),
                    fmt_f64(c.computed_log),
                    fmt_f64(c.abs_diff),
                    if c.pass { "pass" } else { "FAIL" }.into(),
                ]);
            }
            csv
        }
        Format::Json => {
            let params = json!({"input": display(&input), "rel_tol": rel_tol});
            let results = json!({
                "n_entries": checks.len(),
                "n_fail": n_fail,
                "max_abs_diff": max_abs,
                "entries": checks,
            });
            Report::new("golden", params, results, pass).to_json()
        }
    };
    emit(output.as_deref(), &text)?;
    eprintln!(
        "{}/{} entries within tolerance, max |Δ ln| = {}",
        checks.len() - n_fail,
        checks.len(),
        fmt_f64(max_abs)
    );
    Ok(verdict_exit(pass, Exit::GoldenMismatch))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
