use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::QuasiRandom;
use crate::error::{Error, Result};
use crate::operators::{
    chart_c, chart_c_jacobian, chart_d, classify_region, CoefficientSpec, CutoffSpec, Family,
    OperatorInstance, Region, RegionConstants, VanishingOrder,
};
use crate::perturbation::{small_eigenvalue, NumericOptions};
use crate::solvability::is_exceptional;
use crate::spectral::{min_modulus_eigenvalue, SolverOptions};

/// Everything a sweep needs besides the shell index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k: u32,
    pub coeff: CoefficientSpec,
    pub cutoff: CutoffSpec,
    pub rc: RegionConstants,
    /// Grid spacing for per-sample solves.
    pub h: f64,
    /// Number of `eps` slices in the chart-C sublevel estimate.
    pub eps_slices: usize,
    pub solver: SolverOptions,
}

impl SweepConfig {
    pub fn new(k: u32, coeff: CoefficientSpec) -> Self {
        SweepConfig {
            k,
            coeff,
            cutoff: CutoffSpec::default(),
            rc: RegionConstants::default_for(k),
            h: 0.02,
            eps_slices: 6,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellRecord {
    pub q: i32,
    pub region: Region,
    pub samples: usize,
    pub failures: usize,
    /// Fraction of samples with `min |mu| <= |tau|^-M`.
    pub frac_below: f64,
    /// Estimated measure of the exceptional set in the shell.
    pub measure_est: f64,
    /// Smallest `min |mu|` seen.
    pub min_modulus: f64,
    /// Area of shell intersected with the region.
    pub area: f64,
    /// `log2` of the largest chart-C Jacobian over the shell.
    pub jacobian_log2: f64,
    pub unreliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub shells: Vec<ShellRecord>,
    #[serde(rename = "M")]
    pub m: f64,
    /// Mean growth of `log2 J_max` per shell.
    pub r_emp: f64,
    pub notes: Vec<String>,
}

fn eps_c(eta: f64, tau: f64, k: u32) -> f64 {
    let kf = k as f64;
    (eta.abs().powf(-(kf + 1.0) / kf) * tau.abs().powf(1.0 / kf) / kf).sqrt()
}

fn shell_area(region: Region, q: i32, k: u32, rc: &RegionConstants) -> f64 {
    let (t0, t1) = (2f64.powi(q), 2f64.powi(q + 1));
    let p = (k as f64 + 2.0) / (k as f64 + 1.0);
    let lower = |t: f64| 2.0 * rc.gamma0 * t.powf(p) / p;
    match region {
        Region::C => rc.gamma1 * (t1 * t1 - t0 * t0) - (lower(t1) - lower(t0)),
        Region::D => lower(t1) - lower(t0),
        Region::B => f64::NAN,
    }
}

/// Largest `|d(eta,tau)/d(z,eps)|` over the corners of shell `q` in region C.
pub fn shell_jacobian_max(q: i32, k: u32, rc: &RegionConstants) -> f64 {
    let mut best: f64 = 0.0;
    for tau in [2f64.powi(q), 2f64.powi(q + 1)] {
        for eta in [rc.c_lower(tau, k), rc.c_upper(tau)] {
            if let Ok(c) = chart_c(-eta, tau, k) {
                best = best.max(chart_c_jacobian(c.z, c.eps, k));
            }
        }
    }
    best
}

/// Smallest `|mu_j(eta, tau)|` of `A_{eta,tau}`, computed in the chart suited to the point.
pub fn min_modulus_at(eta: f64, tau: f64, region: Region, cfg: &SweepConfig) -> Result<f64> {
    let k = cfg.k;
    let solve = |family: Family| -> Result<f64> {
        let op = OperatorInstance::new(family, k, cfg.coeff.clone()).with_cutoff(cfg.cutoff);
        let disc = op.discretization(10.0, Some(cfg.h))?;
        min_modulus_eigenvalue(&op, &disc, &cfg.solver)
    };
    if region == Region::C {
        if let Ok(c) = chart_c(eta, tau, k) {
            let lam = solve(Family::B { z: c.z, eps: c.eps })?;
            return Ok(lam / (c.eps * c.z).powi(2));
        }
    }
    let d = chart_d(eta, tau, k)?;
    let lam = solve(Family::D { w: d.w, eps: d.eps, sign_tau: d.sign_tau })?;
    Ok(lam * tau.abs().powf(2.0 / (k as f64 + 1.0)))
}

/// Measure of `{|f| <= delta}` for `f ~ c z^m` near its zeros: `2 (delta / c)^(1/m)`.
fn model_sublevel(delta: f64, c: f64, m: u32, cap: f64) -> f64 {
    if c <= 0.0 {
        return cap;
    }
    (2.0 * (delta / c).powf(1.0 / m as f64)).min(cap)
}

/// Chart-C estimate of the exceptional set in shell `q`: the largest Jacobian
/// times the `(z, eps)` measure of `{|lambda(z, eps)| <= 2^{-qM}}`, the latter
/// from the smallest `m`-th `z`-derivative of the small eigenvalue.
fn chart_c_estimate(q: i32, m_exp: f64, order: u32, cfg: &SweepConfig) -> Result<f64> {
    let k = cfg.k;
    let rc = &cfg.rc;
    let t1 = 2f64.powi(q + 1);
    let eps_lo = eps_c(rc.c_upper(t1), t1, k);
    let eps_hi = eps_c(rc.c_lower(t1, k), t1, k);
    let zmax = rc.gamma1.powf(1.0 / k as f64);
    let hz = zmax / 8.0;
    let reach = 0.5 * order as f64 * hz;
    let centers: Vec<f64> = [-0.75, -0.375, 0.0, 0.375, 0.75]
        .iter()
        .map(|s| s * (zmax - reach))
        .collect();
    let delta = 2f64.powf(-(q as f64) * m_exp);
    let slices = cfg.eps_slices.max(1);
    let deps = (eps_hi - eps_lo) / slices as f64;
    let nopts = NumericOptions { theta: 0.5, h: cfg.h, solver: cfg.solver };
    let binom = |m: u32, j: u32| (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64);
    let fact: f64 = (1..=order).map(|i| i as f64).product();
    let per_slice: Vec<f64> = (0..slices)
        .into_par_iter()
        .map(|s| {
            let eps = eps_lo + (s as f64 + 0.5) * deps;
            let lam = |z: f64| {
                let op = OperatorInstance::new(Family::B { z, eps }, k, cfg.coeff.clone())
                    .with_cutoff(cfg.cutoff);
                small_eigenvalue(&op, &nopts)
            };
            let mut cmin = f64::INFINITY;
            for &zc in &centers {
                let mut diff = 0.0;
                for j in 0..=order {
                    let z = zc + (0.5 * order as f64 - j as f64) * hz;
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    diff += sign * binom(order, j) * lam(z)?;
                }
                cmin = cmin.min((diff / hz.powi(order as i32)).abs() / fact);
            }
            Ok(deps * model_sublevel(delta, cmin, order, 2.0 * zmax))
        })
        .collect::<Result<_>>()?;
    Ok(shell_jacobian_max(q, k, rc) * per_slice.iter().sum::<f64>())
}

/// Quasi-random survey of shell `2^q <= tau <= 2^{q+1}` within region C or D.
pub fn sweep_shell(
    cfg: &SweepConfig,
    region: Region,
    q: i32,
    m_exp: f64,
    samples: usize,
    seed: u64,
) -> Result<ShellRecord> {
    let k = cfg.k;
    let rc = &cfg.rc;
    rc.validate(k)?;
    if region == Region::B {
        return Err(Error::InvalidInput("sweeps cover regions C and D".into()));
    }
    if samples < 32 {
        return Err(Error::InvalidInput("need at least 32 samples per shell".into()));
    }
    if 2f64.powi(q) < rc.tau0 {
        return Err(Error::InvalidInput(format!("shell q = {q} lies below tau0 = {}", rc.tau0)));
    }
    let (t0, t1) = (2f64.powi(q), 2f64.powi(q + 1));
    let eta_max = match region {
        Region::C => rc.c_upper(t1),
        _ => rc.c_lower(t1, k),
    };
    let seq = QuasiRandom::new(2, seed ^ (q as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut points = Vec::with_capacity(samples);
    let mut i = 0;
    while points.len() < samples {
        let u = seq.point(i);
        i += 1;
        let tau = t0 + u[0] * (t1 - t0);
        let eta = (2.0 * u[1] - 1.0) * eta_max;
        if classify_region(eta, tau, k, rc) == region {
            points.push((eta, tau));
        }
        if i > 1000 * samples {
            return Err(Error::Domain("shell intersection too thin to sample".into()));
        }
    }
    let results: Vec<Result<f64>> = points
        .par_iter()
        .map(|&(eta, tau)| min_modulus_at(eta, tau, region, cfg))
        .collect();
    let mut failures = 0;
    let mut below = 0;
    let mut min_modulus = f64::INFINITY;
    for (r, &(_, tau)) in results.iter().zip(&points) {
        match r {
            Ok(m) => {
                min_modulus = min_modulus.min(*m);
                if *m <= tau.powf(-m_exp) {
                    below += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let ok = samples - failures;
    let frac_below = if ok == 0 { 0.0 } else { below as f64 / ok as f64 };
    let area = shell_area(region, q, k, rc);
    let order = match cfg.coeff.vanishing_order() {
        VanishingOrder::Finite(m) => Some(m),
        VanishingOrder::Infinite => None,
    };
    let measure_est = match (region, order) {
        (Region::C, Some(m)) if is_exceptional(k, cfg.coeff.a0) && cfg.coeff.a0 > 0.0 => {
            chart_c_estimate(q, m_exp, m, cfg)?
        }
        _ => area * frac_below,
    };
    Ok(ShellRecord {
        q,
        region,
        samples,
        failures,
        frac_below,
        measure_est,
        min_modulus,
        area,
        jacobian_log2: shell_jacobian_max(q, k, rc).log2(),
        unreliable: failures * 100 > samples,
    })
}

pub fn sweep(
    cfg: &SweepConfig,
    region: Region,
    qs: &[i32],
    m_exp: f64,
    samples: usize,
    seed: u64,
) -> Result<SweepReport> {
    let mut qs = qs.to_vec();
    qs.sort_unstable();
    let shells = qs
        .iter()
        .map(|&q| sweep_shell(cfg, region, q, m_exp, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    let r_emp = if shells.len() >= 2 {
        let (a, b) = (&shells[0], &shells[shells.len() - 1]);
        (b.jacobian_log2 - a.jacobian_log2) / (b.q - a.q) as f64
    } else {
        f64::NAN
    };
    let mut notes = vec![
        "frac_below counts samples with min|mu| <= |tau|^-M".to_string(),
    ];
    if region == Region::C && matches!(cfg.coeff.vanishing_order(), VanishingOrder::Finite(_)) {
        notes.push(
            "measure_est: max chart Jacobian times (z,eps)-measure of |lambda| <= 2^(-qM) from the smallest m-th z-derivative"
                .to_string(),
        );
    } else {
        notes.push("measure_est: shell area times frac_below".to_string());
    }
    Ok(SweepReport { shells, m: m_exp, r_emp, notes })
}

/// Least-squares slope of `(x, y)` pairs.
pub fn fitted_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_matches_sampling_box() {
        let rc = RegionConstants::default_for(1);
        let (q, k) = (9, 1);
        let c = shell_area(Region::C, q, k, &rc);
        let d = shell_area(Region::D, q, k, &rc);
        let (t0, t1) = (2f64.powi(q), 2f64.powi(q + 1));
        let n = 2000;
        let mut ac = 0.0;
        let mut ad = 0.0;
        for i in 0..n {
            let t = t0 + (i as f64 + 0.5) / n as f64 * (t1 - t0);
            ac += 2.0 * (rc.c_upper(t) - rc.c_lower(t, k)) * (t1 - t0) / n as f64;
            ad += 2.0 * rc.c_lower(t, k) * (t1 - t0) / n as f64;
        }
        assert!((c - ac).abs() < 1e-6 * c);
        assert!((d - ad).abs() < 1e-6 * d);
    }

    #[test]
    fn slope() {
        let p: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 1.5 * i as f64)).collect();
        assert!((fitted_slope(&p) + 1.5).abs() < 1e-12);
    }
}
