//! Parameter-plane surveys and the auxiliary inequalities used alongside them.

mod sampling;
mod sweep;

pub use sampling::QuasiRandom;
pub use sweep::{
    fitted_slope, min_modulus_at, shell_jacobian_max, sweep, sweep_shell, ShellRecord, SweepConfig,
    SweepReport,
};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    classify_region, CoefficientSpec, CutoffSpec, Family, OperatorInstance, Region, RegionConstants,
};
use crate::spectral::{assemble, eigenvalues_in_window, Discretization, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub samples: usize,
    pub min_eigenvalue: f64,
    /// `1 / min_eigenvalue` when positive.
    pub implied_c: Option<f64>,
    pub violations: Vec<(f64, f64, f64)>,
}

/// Lowest Dirichlet eigenvalue of `A_{eta,tau}` on `[-delta0, delta0]`.
pub fn dirichlet_ground(op: &OperatorInstance, delta0: f64, n: usize, opts: &SolverOptions) -> f64 {
    let disc = Discretization { center: 0.0, half_width: delta0, n };
    assemble(op, &disc).eigenvalue_index(0, opts.tol_eig)
}

/// Samples region B (half with `|tau| <= tau0`, half with `|eta| >= gamma1 |tau|`
/// and `tau0 < |tau| <= 16 tau0`) and checks the local Dirichlet ground state.
pub fn certify_bk_positivity(
    k: u32,
    coeff: &CoefficientSpec,
    cutoff: CutoffSpec,
    rc: &RegionConstants,
    delta0: f64,
    samples: usize,
    seed: u64,
) -> Result<PositivityReport> {
    if !(delta0 > 0.0) || samples == 0 {
        return Err(Error::InvalidInput("need delta0 > 0 and at least one sample".into()));
    }
    let seq = QuasiRandom::new(3, seed);
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let u = seq.point(i);
            let sign = if u[2] < 0.5 { -1.0 } else { 1.0 };
            if i % 2 == 0 {
                ((2.0 * u[1] - 1.0) * rc.tau0, (2.0 * u[0] - 1.0) * rc.tau0)
            } else {
                let tau = sign * rc.tau0 * (1.0 + 15.0 * u[0]);
                let eta = if u[1] < 0.5 { -1.0 } else { 1.0 } * rc.gamma1 * tau.abs() * (1.0 + 6.0 * u[1]);
                (eta, tau)
            }
        })
        .filter(|&(eta, tau)| classify_region(eta, tau, k, rc) == Region::B)
        .collect();
    let opts = SolverOptions::default();
    let lams: Vec<f64> = points
        .par_iter()
        .map(|&(eta, tau)| {
            let op = OperatorInstance::new(Family::A { eta, tau }, k, coeff.clone()).with_cutoff(cutoff);
            dirichlet_ground(&op, delta0, 400, &opts)
        })
        .collect();
    let min_eigenvalue = lams.iter().copied().fold(f64::INFINITY, f64::min);
    let violations = points
        .iter()
        .zip(&lams)
        .filter(|(_, &l)| l <= 0.0)
        .map(|(&(e, t), &l)| (e, t, l))
        .collect();
    Ok(PositivityReport {
        samples: points.len(),
        min_eigenvalue,
        implied_c: (min_eigenvalue > 0.0).then(|| 1.0 / min_eigenvalue),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub count_small: usize,
    pub count_gap: usize,
    pub gap_ok: bool,
    pub eigenvalues: Vec<f64>,
}

/// Counts eigenvalues of `B_{z,eps}` in `[-theta, theta]` and in `theta < |lambda| <= 4 theta`.
pub fn gap_check(
    k: u32,
    coeff: &CoefficientSpec,
    cutoff: CutoffSpec,
    z: f64,
    eps: f64,
    theta: f64,
    h: f64,
) -> Result<GapReport> {
    if !(theta > 0.0) {
        return Err(Error::InvalidInput("theta must be positive".into()));
    }
    let op = OperatorInstance::new(Family::B { z, eps }, k, coeff.clone()).with_cutoff(cutoff);
    let disc = op.discretization(4.0 * theta, Some(h))?;
    let s = eigenvalues_in_window(&op, &disc, -4.0 * theta, 4.0 * theta, false, &SolverOptions::default())?;
    let count_small = s.eigenvalues.iter().filter(|l| l.abs() <= theta).count();
    let count_gap = s.eigenvalues.len() - count_small;
    Ok(GapReport { count_small, count_gap, gap_ok: count_small == 1 && count_gap == 0, eigenvalues: s.eigenvalues })
}

/// Samples of a function on the cell centres of a uniform grid over `[-1, 1]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub dim: usize,
    pub n: usize,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn center(n: usize, i: usize) -> f64 {
        -1.0 + (2.0 * i as f64 + 1.0) / n as f64
    }

    pub fn sample_1d(n: usize, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { dim: 1, n, values: (0..n).map(|i| f(Self::center(n, i))).collect() }
    }

    pub fn sample_2d(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(Self::center(n, i), Self::center(n, j)));
            }
        }
        GridFunction { dim: 2, n, values }
    }
}

/// Cell-counting estimate of the measure of `{|f| <= delta}`.
pub fn sublevel_measure(f: &GridFunction, delta: f64) -> Result<f64> {
    if !(1..=2).contains(&f.dim) || f.n < 256 || f.values.len() != f.n.pow(f.dim as u32) {
        return Err(Error::InvalidInput("grid must be 1D or 2D with >= 256 cells per axis".into()));
    }
    let cell = (2.0 / f.n as f64).powi(f.dim as i32);
    Ok(f.values.iter().filter(|v| v.abs() <= delta).count() as f64 * cell)
}

/// `(||f||, ||f_hat||_{l2(complement of E)})` for the unitary DFT.
pub fn uncertainty_norms(f: &[Complex64], e: &[usize]) -> (f64, f64) {
    let n = f.len();
    let mut buf = f.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    let mut excluded = vec![false; n];
    for &i in e {
        excluded[i % n] = true;
    }
    let tail: f64 = buf
        .iter()
        .zip(&excluded)
        .filter(|(_, &x)| !x)
        .map(|(v, _)| (v * scale).norm_sqr())
        .sum();
    let norm: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    (norm.sqrt(), tail.sqrt())
}

/// Checks `||f|| <= c ||f_hat||_{l2(E^c)}` for `f` supported on at most
/// `support_size` indices with `|E| support_size <= n / c`.
pub fn uncertainty_check(f: &[Complex64], support_size: usize, e: &[usize], c: f64) -> Result<bool> {
    let n = f.len();
    let support = f.iter().filter(|v| v.norm_sqr() > 0.0).count();
    if support > support_size {
        return Err(Error::InvalidInput(format!("f has {support} nonzeros, more than {support_size}")));
    }
    if (e.len() * support_size) as f64 > n as f64 / c {
        return Err(Error::InvalidInput("|E| * support_size exceeds n / C".into()));
    }
    let (lhs, rhs) = uncertainty_norms(f, e);
    Ok(lhs <= c * rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sublevel_intervals() {
        let n = 1000;
        let f = GridFunction::sample_1d(n, |y| y);
        assert!((sublevel_measure(&f, 0.1).unwrap() - 0.2).abs() <= 2.0 / n as f64);
        let g = GridFunction::sample_1d(n, |y| y * y);
        assert!((sublevel_measure(&g, 0.01).unwrap() - 0.2).abs() <= 2.0 / n as f64);
        assert!(sublevel_measure(&GridFunction::sample_1d(100, |y| y), 0.1).is_err());
    }

    #[test]
    fn uncertainty_trivial_cases() {
        let n = 256;
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        f[3] = Complex64::new(1.0, 0.0);
        assert!(uncertainty_check(&f, 1, &[], 16.0).unwrap());
        let (a, b) = uncertainty_norms(&f, &[]);
        assert!((a - b).abs() < 1e-12);
        let e: Vec<usize> = (0..n / 32).collect();
        assert!(uncertainty_check(&f, 1, &e, 16.0).unwrap());
        let too_big: Vec<usize> = (0..n / 16 + 1).collect();
        assert!(uncertainty_check(&f, 1, &too_big, 16.0).is_err());
    }

    #[test]
    fn gap_at_zero_eps_limit() {
        let coeff = CoefficientSpec::constant(1.0);
        let r = gap_check(2, &coeff, CutoffSpec::default(), 0.0, 0.0, 0.3, 0.02).unwrap();
        assert_eq!((r.count_small, r.count_gap), (1, 0));
    }
}
