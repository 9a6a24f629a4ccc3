//! Rayleigh-Schrodinger expansion of the small eigenvalue of family B about
//! the oscillator mode `n`, exactly in the Hermite basis and numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{
    inner_product, int, rat, resolvent, HermiteCoefficients, HermiteFunction, Polynomial, Rational,
    DEFAULT_DEGREE_CAP,
};
use crate::operators::{CoefficientSpec, CutoffSpec, Family, OperatorInstance};
use crate::spectral::{unique_small_eigenvalue, SolverOptions};

/// Expansion of `B_{0,eps}` with `a(0) = 2n + 1` about `eps = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationProblem {
    pub n: usize,
    pub k: u32,
    pub betas: [Polynomial; 2],
}

impl PerturbationProblem {
    pub fn new(k: u32, n: usize) -> Self {
        let (k, m) = (k as i64, 2 * n as i64 + 1);
        // beta1 = (k-1)(y^3 - (2n+1) y)
        let beta1 = Polynomial::new(vec![int(0), int(-(k - 1) * m), int(0), int(k - 1)]);
        // beta2 = (k-1)[(7k-11)/12 y^4 - (2n+1)(k-2)/2 y^2]
        let beta2 = Polynomial::new(vec![
            int(0),
            int(0),
            rat(-(k - 1) * m * (k - 2), 2),
            int(0),
            rat((k - 1) * (7 * k - 11), 12),
        ]);
        PerturbationProblem { n, k: k as u32, betas: [beta1, beta2] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub lambdas: Vec<Rational>,
    pub psis: Vec<HermiteCoefficients>,
}

pub fn rs_step(problem: &PerturbationProblem, order: usize) -> Result<SeriesResult> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidInput(format!("order must be 1 or 2, got {order}")));
    }
    let n = problem.n;
    let psi0 = HermiteFunction::mode(n);
    psi0.ensure_degree(DEFAULT_DEGREE_CAP.saturating_sub(4))?;
    let norm0 = inner_product(&psi0, &psi0);
    let [beta1, beta2] = &problem.betas;

    let b1psi0 = psi0.mul_poly(beta1);
    let lambda1 = inner_product(&b1psi0, &psi0) / &norm0;
    let rhs = HermiteCoefficients::from_function(&b1psi0.sub(&psi0.scale(&lambda1)));
    let psi1 = resolvent(n, &rhs)?.scale(&int(-1));

    let mut lambdas = vec![int(0), lambda1];
    if order == 2 {
        let t = psi0.mul_poly(beta2).add(&psi1.to_function().mul_poly(beta1));
        lambdas.push(inner_product(&psi0, &t) / &norm0);
    }
    Ok(SeriesResult { lambdas, psis: vec![HermiteCoefficients::mode(n), psi1] })
}

/// `(k - 1) n (n + 1) / 2`.
pub fn lambda2_closed_form(k: u32, n: usize) -> Rational {
    let (k, n) = (k as i64, n as i64);
    rat((k - 1) * n * (n + 1), 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericOptions {
    /// Half-width of the small-eigenvalue window.
    pub theta: f64,
    /// Coarse grid spacing; values are extrapolated from `h` and `h/2`.
    pub h: f64,
    pub solver: SolverOptions,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { theta: 0.5, h: 0.02, solver: SolverOptions::default() }
    }
}

/// The unique eigenvalue of `op` in `[-theta, theta]`.
pub fn small_eigenvalue(op: &OperatorInstance, opts: &NumericOptions) -> Result<f64> {
    let disc = op.discretization(opts.theta, Some(opts.h))?;
    unique_small_eigenvalue(op, &disc, opts.theta, &opts.solver)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub resid: f64,
    pub samples: Vec<(f64, f64)>,
}

fn quadratic_fit(samples: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for &(x, y) in samples {
        let phi = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += phi[i] * phi[j];
            }
            b[i] += phi[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for c in col..3 {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut c = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|j| a[row][j] * c[j]).sum();
        c[row] = (b[row] - s) / a[row][row];
    }
    let ss: f64 = samples
        .iter()
        .map(|&(x, y)| (y - c[0] - c[1] * x - c[2] * x * x).powi(2))
        .sum();
    (c[0], c[1], c[2], (ss / samples.len() as f64).sqrt())
}

/// Least-squares fit `lambda(0, eps) ~ c0 + c1 eps + c2 eps^2` with `b = 0`, `a(0) = 2n+1`.
pub fn fit_eps_series(k: u32, n: usize, eps_grid: &[f64], opts: &NumericOptions) -> Result<EpsFit> {
    if eps_grid.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 eps values".into()));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e <= 0.2)) {
        return Err(Error::InvalidInput("eps values must lie in (0, 0.2]".into()));
    }
    let mut distinct = eps_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 distinct eps values".into()));
    }
    let coeff = CoefficientSpec::constant(2.0 * n as f64 + 1.0);
    let samples: Vec<(f64, f64)> = eps_grid
        .par_iter()
        .map(|&eps| {
            let op = OperatorInstance::new(Family::B { z: 0.0, eps }, k, coeff.clone());
            small_eigenvalue(&op, opts).map(|lam| (eps, lam))
        })
        .collect::<Result<_>>()?;
    let (c0, c1, c2, resid) = quadratic_fit(&samples);
    Ok(EpsFit { c0, c1, c2, resid, samples })
}

/// Small eigenvalue of `B_{z,eps}` along `z_grid`.
pub fn eigenvalue_vs_z(
    k: u32,
    n: usize,
    coeff: &CoefficientSpec,
    cutoff: CutoffSpec,
    eps: f64,
    z_grid: &[f64],
    opts: &NumericOptions,
) -> Result<Vec<(f64, f64)>> {
    if (coeff.a0 - (2.0 * n as f64 + 1.0)).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("a(0) = {} but mode {n} needs {}", coeff.a0, 2 * n + 1)));
    }
    z_grid
        .par_iter()
        .map(|&z| {
            let op = OperatorInstance::new(Family::B { z, eps }, k, coeff.clone()).with_cutoff(cutoff);
            small_eigenvalue(&op, opts).map(|lam| (z, lam))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_exact_values() {
        let r = rs_step(&PerturbationProblem::new(3, 1), 2).unwrap();
        assert_eq!(r.lambdas[1], int(0));
        assert_eq!(r.lambdas[2], int(2));
        let r = rs_step(&PerturbationProblem::new(2, 2), 2).unwrap();
        assert_eq!(r.lambdas[2], int(3));
        assert_eq!(rs_step(&PerturbationProblem::new(1, 4), 2).unwrap().lambdas[2], int(0));
        assert!(rs_step(&PerturbationProblem::new(1, 4), 3).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(lambda2_closed_form(2, 1), int(1));
        assert_eq!(lambda2_closed_form(1, 5), int(0));
        assert_eq!(lambda2_closed_form(5, 3), int(24));
    }

    #[test]
    fn quadratic_fit_recovers_parabola() {
        let s: Vec<(f64, f64)> = [0.1, 0.2, 0.3, 0.4].iter().map(|&x| (x, 1.0 - 2.0 * x + 3.0 * x * x)).collect();
        let (a, b, c, r) = quadratic_fit(&s);
        assert!((a - 1.0).abs() < 1e-12 && (b + 2.0).abs() < 1e-12 && (c - 3.0).abs() < 1e-12 && r < 1e-12);
    }
}
