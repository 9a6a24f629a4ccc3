use std::fs;
use std::io::Write;
use std::path::Path;

use dochar::operators::Family;
use dochar::perturbation::{fit_eps_series, lambda2_closed_form, rs_step, NumericOptions, PerturbationProblem};
use dochar::regions::{sweep, SweepConfig, SweepReport};
use dochar::solvability::{classify, l2_witness, solvability_probe, ProbeOptions, WitnessOptions};
use dochar::spectral::{refine_until, RefinementLevel};
use dochar::{config::CoeffKindName, Discretization, ModelConfig, OperatorInstance, Region, SolverOptions};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    ClassifyArgs, Cli, Command, FamilyName, Format, MapArgs, ModelArgs, PerturbArgs, RegionName, SpectrumArgs,
    WitnessArgs,
};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Library(dochar::Error),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        use dochar::Error::*;
        match self {
            Failure::Library(BudgetExceeded { .. } | QuadratureBudget(_) | GridBudget(_) | DegreeCap { .. } | Convergence(_)) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<dochar::Error> for Failure {
    fn from(e: dochar::Error) -> Self {
        Failure::Library(e)
    }
}

/// What a command produced: the text to write and the exit status to report.
pub struct Output {
    pub text: String,
    pub status: i32,
}

fn load_config(path: Option<&Path>) -> Result<(ModelConfig, bool), Failure> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            Ok((ModelConfig::from_json(&text)?, true))
        }
        None => Ok((ModelConfig::default(), false)),
    }
}

fn merge(mut cfg: ModelConfig, from_file: bool, m: &ModelArgs) -> Result<ModelConfig, Failure> {
    match m.k {
        Some(k) => cfg.k = k,
        None if !from_file => return Err(Failure::Usage("--k is required when no --config is given".into())),
        None => {}
    }
    if let Some(a0) = m.a0 {
        cfg.a0 = a0;
    }
    if m.flat {
        cfg.coeff_kind = CoeffKindName::Flat;
    }
    if let Some(s) = m.flat_scale {
        cfg.flat_scale = s;
    }
    if let Some(c) = &m.coeffs {
        cfg.coeff_kind = CoeffKindName::Polynomial;
        cfg.coeffs = c.clone();
    }
    if let Some(d) = m.delta0 {
        cfg.delta0 = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn json_text(result: impl Serialize, echo: Value) -> Result<String, Failure> {
    let mut v = serde_json::to_value(result).map_err(|e| Failure::Io(e.to_string()))?;
    match &mut v {
        Value::Object(map) => {
            map.insert("config".into(), echo);
        }
        other => {
            v = json!({ "result": other.clone(), "config": echo });
        }
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Failure::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn echo(cli: &Cli, model: Option<&ModelConfig>, args: impl Serialize) -> Value {
    json!({
        "command": args,
        "model": model.map(ModelConfig::effective),
        "seed": cli.seed,
        "format": cli.format,
    })
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Map(_) | Command::Spectrum(_)) {
        return Err(Failure::Usage("csv output is available for map and spectrum only".into()));
    }
    let (base, from_file) = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Spectrum(a) => spectrum(cli, merge(base, from_file, &a.model)?, a),
        Command::Perturb(a) => perturb(cli, base, from_file, a),
        Command::Map(a) => map(cli, merge(base, from_file, &a.model)?, a),
        Command::Classify(a) => classify_cmd(cli, merge(base, from_file, &a.model)?, a),
        Command::Witness(a) => witness(cli, merge(base, from_file, &a.model)?, a),
    }
}

fn require(v: Option<f64>, name: &str, family: &str) -> Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("family {family} needs --{name}")))
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    eigenvalues: &'a [f64],
    converged: bool,
    est_error: f64,
    disc: Discretization,
    levels: &'a [RefinementLevel],
}

fn spectrum(cli: &Cli, cfg: ModelConfig, a: &SpectrumArgs) -> Result<Output, Failure> {
    let family = match a.family {
        FamilyName::A => Family::A { eta: require(a.eta, "eta", "A")?, tau: require(a.tau, "tau", "A")? },
        FamilyName::B => Family::B { z: require(a.z, "z", "B")?, eps: require(a.eps, "eps", "B")? },
        FamilyName::D => {
            if a.sign_tau.abs() != 1.0 {
                return Err(Failure::Usage("--sign-tau must be 1 or -1".into()));
            }
            Family::D { w: require(a.w, "w", "D")?, eps: require(a.eps, "eps", "D")?, sign_tau: a.sign_tau }
        }
    };
    let (lo, hi) = a.window;
    let op = OperatorInstance::new(family, cfg.k, cfg.coefficient()?).with_cutoff(cfg.cutoff());
    let disc = op.discretization(hi, a.h)?;
    let s = refine_until(&op, &disc, lo, hi, a.tol, &SolverOptions::default())?;
    let text = match cli.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["index", "eigenvalue"]).map_err(|e| Failure::Io(e.to_string()))?;
            for (i, e) in s.eigenvalues.iter().enumerate() {
                w.write_record([i.to_string(), e.to_string()]).map_err(|e| Failure::Io(e.to_string()))?;
            }
            csv_text(w)?
        }
        Format::Json => json_text(
            SpectrumOut {
                eigenvalues: &s.eigenvalues,
                converged: s.converged,
                est_error: s.est_error,
                disc: s.disc,
                levels: &s.levels,
            },
            echo(cli, Some(&cfg), a),
        )?,
    };
    Ok(Output { text, status: 0 })
}

fn perturb(cli: &Cli, base: ModelConfig, from_file: bool, a: &PerturbArgs) -> Result<Output, Failure> {
    let k = match (a.k, from_file) {
        (Some(k), _) => k,
        (None, true) => base.k,
        (None, false) => return Err(Failure::Usage("--k is required when no --config is given".into())),
    };
    if k == 0 {
        return Err(Failure::Usage("k must be >= 1".into()));
    }
    let cfg = ModelConfig { k, a0: 2.0 * a.n as f64 + 1.0, ..base };
    let text = if let Some(grid) = &a.fit {
        let fit = fit_eps_series(k, a.n, grid, &NumericOptions::default())?;
        let closed = lambda2_closed_form(k, a.n).to_string().parse::<f64>().unwrap_or(f64::NAN);
        json_text(
            json!({
                "c0": fit.c0, "c1": fit.c1, "c2": fit.c2, "resid": fit.resid,
                "samples": fit.samples, "lambda2_closed_form": closed,
            }),
            echo(cli, Some(&cfg), a),
        )?
    } else {
        let r = rs_step(&PerturbationProblem::new(k, a.n), 2)?;
        let closed = lambda2_closed_form(k, a.n);
        json_text(
            json!({
                "lambda1": r.lambdas[1].to_string(),
                "lambda2": r.lambdas[2].to_string(),
                "lambda2_closed_form": closed.to_string(),
                "matches_closed_form": r.lambdas[2] == closed,
            }),
            echo(cli, Some(&cfg), a),
        )?
    };
    Ok(Output { text, status: 0 })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    q: i32,
    region: &'a str,
    samples: usize,
    frac_below: f64,
    measure_est: f64,
    failures: usize,
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn map_csv(report: &SweepReport) -> Result<String, Failure> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for s in &report.shells {
        let region = s.region.to_string();
        w.serialize(CsvRow {
            q: s.q,
            region: &region,
            samples: s.samples,
            frac_below: s.frac_below,
            measure_est: s.measure_est,
            failures: s.failures,
        })
        .map_err(|e| Failure::Io(e.to_string()))?;
    }
    csv_text(w)
}

fn map(cli: &Cli, cfg: ModelConfig, a: &MapArgs) -> Result<Output, Failure> {
    let region = match a.region {
        RegionName::C => Region::C,
        RegionName::D => Region::D,
    };
    let mut sc = SweepConfig::new(cfg.k, cfg.coefficient()?);
    sc.cutoff = cfg.cutoff();
    sc.rc = cfg.region_constants();
    sc.h = a.h;
    let report = sweep(&sc, region, &a.q.0, a.m, a.samples, cli.seed)?;
    let status = if report.shells.iter().any(|s| s.unreliable) { 3 } else { 0 };
    let text = match cli.format {
        Format::Csv => map_csv(&report)?,
        Format::Json => json_text(&report, echo(cli, Some(&cfg), a))?,
    };
    Ok(Output { text, status })
}

fn classify_cmd(cli: &Cli, cfg: ModelConfig, a: &ClassifyArgs) -> Result<Output, Failure> {
    let verdict = classify(cfg.k, &cfg.coefficient()?);
    Ok(Output { text: json_text(verdict, echo(cli, Some(&cfg), a))?, status: 0 })
}

fn witness(cli: &Cli, cfg: ModelConfig, a: &WitnessArgs) -> Result<Output, Failure> {
    let coeff = cfg.coefficient()?;
    let text = if a.l2 {
        let r = l2_witness(cfg.k, &coeff, &a.lambdas, &WitnessOptions::default())?;
        json_text(r, echo(cli, Some(&cfg), a))?
    } else {
        let opts = ProbeOptions { grid: a.grid, b_exponent: cfg.b_exponent, ..ProbeOptions::default() };
        let r = solvability_probe(cfg.k, &coeff, &a.lambdas, &opts)?;
        json_text(r, echo(cli, Some(&cfg), a))?
    };
    Ok(Output { text, status: 0 })
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}
