use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "dochar", version, about = "Spectra, perturbation series and solvability checks for -X^2 - Y^2 + i a(x)[X, Y]")]
pub struct Cli {
    /// JSON file with model defaults (k, a0, coeff_kind, coeffs, flat_scale, delta0, tau0, gamma0, gamma1, ...).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of one member of family A, B or D inside a window.
    Spectrum(SpectrumArgs),
    /// Second-order expansion of the small eigenvalue, exactly or by fitting.
    Perturb(PerturbArgs),
    /// Exceptional-set statistics over dyadic shells of a parameter region.
    Map(MapArgs),
    /// Local solvability verdict at the origin.
    Classify(ClassifyArgs),
    /// Numerical nonsolvability witnesses.
    Witness(WitnessArgs),
}

/// Coefficient flags; anything omitted comes from the config file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    /// Use the flat perturbation exp(-1/(scale x)^2).
    #[arg(long)]
    pub flat: bool,
    #[arg(long)]
    pub flat_scale: Option<f64>,
    /// Polynomial perturbation coefficients c0,c1,... of a(x) - a(0); c0 must be 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "flat")]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long)]
    pub delta0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum FamilyName {
    A,
    B,
    D,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub family: FamilyName,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sign_tau: f64,
    /// Eigenvalue window lo,hi.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: (f64, f64),
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Initial grid spacing; chosen from the potential when absent.
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PerturbArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "fit", required_unless_present = "fit")]
    pub exact: bool,
    /// Comma-separated eps values for a least-squares fit.
    #[arg(long, value_delimiter = ',')]
    pub fit: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum RegionName {
    C,
    D,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MapArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, ignore_case = true)]
    pub region: RegionName,
    /// Shell indices: `8..10` (inclusive) or a comma list.
    #[arg(long, value_parser = parse_shells)]
    pub q: ShellList,
    #[arg(long = "M", default_value_t = 8.0)]
    pub m: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.02)]
    pub h: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
    pub lambdas: Vec<f64>,
    /// Run the L2 witness family instead of the a priori inequality probe.
    #[arg(long)]
    pub l2: bool,
    /// Points per axis of the probe grid.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellList(pub Vec<i32>);

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("hi: {e}"))?;
    if !(lo < hi) {
        return Err(format!("window lower end {lo} must be below upper end {hi}"));
    }
    Ok((lo, hi))
}

fn parse_shells(s: &str) -> Result<ShellList, String> {
    let parse = |t: &str| t.trim().parse::<i32>().map_err(|e| format!("{t:?}: {e}"));
    let qs: Vec<i32> = if let Some((a, b)) = s.split_once("..") {
        let r: RangeInclusive<i32> = parse(a)?..=parse(b.trim_start_matches('='))?;
        r.collect()
    } else {
        s.split(',').map(parse).collect::<Result<_, _>>()?
    };
    if qs.is_empty() {
        return Err("empty shell list".into());
    }
    Ok(ShellList(qs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells() {
        assert_eq!(parse_shells("8..10").unwrap().0, vec![8, 9, 10]);
        assert_eq!(parse_shells("9,12").unwrap().0, vec![9, 12]);
        assert!(parse_shells("10..8").is_err());
    }

    #[test]
    fn window() {
        assert_eq!(parse_window("-0.5,10").unwrap(), (-0.5, 10.0));
        assert!(parse_window("5,1").is_err());
    }
}
