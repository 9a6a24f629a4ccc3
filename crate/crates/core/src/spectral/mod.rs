//! Finite-difference spectra of `-d^2/dx^2 + V` on a truncated interval with
//! Dirichlet ends, via Sturm bisection and inverse iteration.

mod tridiag;

pub use tridiag::SymTridiagonal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorInstance;

pub trait Potential: Sync {
    fn value(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> Potential for F {
    fn value(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Operators are solved in their well-centred variable.
impl Potential for OperatorInstance {
    fn value(&self, x: f64) -> f64 {
        self.centered_potential(x)
    }
}

/// Uniform grid on `[center - R, center + R]` with `n` interior points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub center: f64,
    pub half_width: f64,
    pub n: usize,
}

impl Discretization {
    pub fn new(half_width: f64, n: usize) -> Self {
        Discretization { center: 0.0, half_width, n }
    }

    /// Smallest grid over `[left, right]` with spacing at most `h`.
    pub fn covering(left: f64, right: f64, h: f64) -> Self {
        let half_width = 0.5 * (right - left);
        let n = ((2.0 * half_width / h).ceil() as usize).saturating_sub(1).max(16);
        Discretization { center: 0.5 * (left + right), half_width, n }
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n as f64 + 1.0)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.center - self.half_width + (i as f64 + 1.0) * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 16 || !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::InvalidInput(format!(
                "discretization needs n >= 16 and R > 0 (n = {}, R = {})",
                self.n, self.half_width
            )));
        }
        Ok(())
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Self {
        Discretization { n: 2 * self.n + 1, ..*self }
    }

    /// Half-width scaled by `factor`, spacing kept.
    pub fn widened(&self, factor: f64) -> Self {
        let h = self.h();
        let half_width = self.half_width * factor;
        let n = ((2.0 * half_width / h).round() as usize).saturating_sub(1);
        Discretization { center: self.center, half_width, n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol_eig: f64,
    pub max_iter: usize,
    pub lambda_cap: f64,
    pub max_doublings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol_eig: 1e-9, max_iter: 10, lambda_cap: 50.0, max_doublings: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub n: usize,
    pub h: f64,
    pub half_width: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub converged: bool,
    pub est_error: f64,
    pub disc: Discretization,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub levels: Vec<RefinementLevel>,
}

pub fn assemble<P: Potential + ?Sized>(pot: &P, disc: &Discretization) -> SymTridiagonal {
    let h = disc.h();
    let inv = 1.0 / (h * h);
    let diag = (0..disc.n).map(|i| 2.0 * inv + pot.value(disc.point(i))).collect();
    SymTridiagonal::new(diag, vec![-inv; disc.n - 1])
}

fn eigenvectors_for(
    t: &SymTridiagonal,
    eigenvalues: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<Vec<f64>>> {
    eigenvalues
        .iter()
        .map(|&lam| t.inverse_iteration(lam, opts.max_iter).ok_or(Error::Convergence(lam)))
        .collect()
}

pub fn eigenvalues_in_window<P: Potential + ?Sized>(
    pot: &P,
    disc: &Discretization,
    lo: f64,
    hi: f64,
    want_vectors: bool,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    disc.validate()?;
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let t = assemble(pot, disc);
    let eigenvalues = t.eigenvalues_in(lo, hi, opts.tol_eig);
    let eigenvectors = if want_vectors { Some(eigenvectors_for(&t, &eigenvalues, opts)?) } else { None };
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        converged: false,
        est_error: f64::NAN,
        disc: *disc,
        levels: Vec::new(),
    })
}

/// The lowest `count` eigenvalues.
pub fn lowest_eigenvalues<P: Potential + ?Sized>(
    pot: &P,
    disc: &Discretization,
    count: usize,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    disc.validate()?;
    let t = assemble(pot, disc);
    Ok((0..count.min(disc.n)).map(|j| t.eigenvalue_index(j, opts.tol_eig)).collect())
}

/// Eigenvalue of least modulus.
pub fn min_modulus_eigenvalue<P: Potential + ?Sized>(
    pot: &P,
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<f64> {
    disc.validate()?;
    let t = assemble(pot, disc);
    let below = t.sturm_count(0.0);
    let mut best: Option<f64> = None;
    if below > 0 {
        let lam = t.eigenvalue_index(below - 1, opts.tol_eig);
        if lam >= -opts.lambda_cap {
            best = Some(lam.abs());
        }
    }
    if below < disc.n {
        let lam = t.eigenvalue_index(below, opts.tol_eig).abs();
        best = Some(best.map_or(lam, |b| b.min(lam)));
    }
    best.ok_or(Error::WindowEmpty { lo: -opts.lambda_cap, hi: opts.lambda_cap })
}

/// `int (phi^2 + phi'^2) e^{r w} / int phi^2` for the `eig_index`-th eigenfunction,
/// `w` the distance to the nearest well (or to the grid minimum of `V`).
pub fn decay_diagnostic<P: Potential + ?Sized>(
    pot: &P,
    disc: &Discretization,
    eig_index: usize,
    r: f64,
    wells: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<f64> {
    disc.validate()?;
    let t = assemble(pot, disc);
    let lam = t.eigenvalue_index(eig_index, opts.tol_eig.min(1e-12));
    let phi = t.inverse_iteration(lam, opts.max_iter).ok_or(Error::Convergence(lam))?;
    let xs = disc.points();
    let h = disc.h();
    let centers: Vec<f64> = match wells {
        Some(w) => w.to_vec(),
        None => {
            let i = (0..disc.n)
                .min_by(|&a, &b| pot.value(xs[a]).total_cmp(&pot.value(xs[b])))
                .unwrap_or(0);
            vec![xs[i]]
        }
    };
    let weight = |x: f64| {
        let w = centers.iter().map(|c| (x - c).abs()).fold(f64::INFINITY, f64::min);
        (r * w).exp()
    };
    let mass: f64 = phi.iter().map(|v| v * v).sum::<f64>() * h;
    let mut num = 0.0;
    for i in 0..disc.n {
        num += phi[i] * phi[i] * weight(xs[i]) * h;
    }
    // derivative on the n+1 cell edges, Dirichlet zeros outside
    for i in 0..=disc.n {
        let left = if i == 0 { 0.0 } else { phi[i - 1] };
        let right = if i == disc.n { 0.0 } else { phi[i] };
        let d = (right - left) / h;
        let xm = disc.center - disc.half_width + (i as f64 + 0.5) * h;
        num += d * d * weight(xm) * h;
    }
    Ok(num / mass)
}

/// Interval carrying every eigenfunction with eigenvalue below `hi`:
/// the anchors, extended outward until `V >= hi + 25` and 30 Agmon units
/// of tunnelling have accumulated.
pub fn auto_domain<P: Potential + ?Sized>(pot: &P, anchors: &[f64], hi: f64) -> Result<(f64, f64)> {
    let left0 = anchors.iter().copied().fold(f64::INFINITY, f64::min);
    let right0 = anchors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !left0.is_finite() {
        return Err(Error::InvalidInput("no anchors given".into()));
    }
    let extend = |start: f64, dir: f64| -> Result<f64> {
        let mut x = start;
        let mut agmon = 0.0;
        for _ in 0..2_000_000 {
            let v = pot.value(x);
            if v >= hi + 25.0 && agmon >= 30.0 {
                return Ok(x);
            }
            let excess = (v - hi).max(0.0);
            let step = (0.25 / excess.max(1.0).sqrt()).clamp(1e-5, 0.25);
            agmon += excess.sqrt() * step;
            x += dir * step;
        }
        Err(Error::Domain("potential does not confine".into()))
    };
    Ok((extend(left0, -1.0)?, extend(right0, 1.0)?))
}

/// Grid spacing resolving oscillations up to energy `hi + 25`.
pub fn default_step<P: Potential + ?Sized>(pot: &P, left: f64, right: f64, hi: f64) -> f64 {
    let samples = 4096;
    let vmin = (0..=samples)
        .map(|i| pot.value(left + (right - left) * i as f64 / samples as f64))
        .fold(f64::INFINITY, f64::min);
    let depth = (hi + 25.0 - vmin).max(1.0);
    0.05 / depth.sqrt()
}

impl OperatorInstance {
    /// Grid covering all eigenfunctions below `hi`; spacing `h` or a default.
    pub fn discretization(&self, hi: f64, h: Option<f64>) -> Result<Discretization> {
        let (left, right) = auto_domain(self, &self.anchors(), hi)?;
        let h = h.unwrap_or_else(|| default_step(self, left, right, hi));
        Ok(Discretization::covering(left, right, h))
    }
}

fn boundary_leak(vectors: &[Vec<f64>]) -> bool {
    vectors.iter().any(|v| {
        let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let edge = v[0].abs().max(v[v.len() - 1].abs());
        edge > 1e-10 * max
    })
}

/// Halve the spacing until Richardson-extrapolated eigenvalue lists of two
/// successive levels agree to `tol`, widening the interval by 25% whenever an
/// eigenfunction reaches the boundary. Returns the extrapolated values.
pub fn refine_until<P: Potential + ?Sized>(
    pot: &P,
    initial: &Discretization,
    lo: f64,
    hi: f64,
    tol: f64,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    initial.validate()?;
    let inner = SolverOptions { tol_eig: opts.tol_eig.min(tol * 1e-2), ..*opts };
    let mut disc = *initial;
    let mut levels: Vec<RefinementLevel> = Vec::new();
    let mut prev_extrap: Option<Vec<f64>> = None;
    let mut last_change = f64::INFINITY;
    let mut widenings = 0;
    let mut doublings = 0;
    loop {
        let spec = eigenvalues_in_window(pot, &disc, lo, hi, true, &inner)?;
        let vectors = spec.eigenvectors.as_deref().unwrap_or(&[]);
        if boundary_leak(vectors) && widenings < 16 {
            widenings += 1;
            disc = disc.widened(1.25);
            levels.clear();
            prev_extrap = None;
            continue;
        }
        let extrap = levels.last().and_then(|prev| {
            (prev.eigenvalues.len() == spec.eigenvalues.len()).then(|| {
                spec.eigenvalues
                    .iter()
                    .zip(&prev.eigenvalues)
                    .map(|(fine, coarse)| (4.0 * fine - coarse) / 3.0)
                    .collect::<Vec<f64>>()
            })
        });
        levels.push(RefinementLevel {
            n: disc.n,
            h: disc.h(),
            half_width: disc.half_width,
            eigenvalues: spec.eigenvalues.clone(),
        });
        if let (Some(e), Some(p)) = (&extrap, &prev_extrap) {
            if e.len() == p.len() {
                last_change = e.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if last_change < tol {
                    return Ok(Spectrum {
                        eigenvalues: e.clone(),
                        eigenvectors: spec.eigenvectors,
                        converged: true,
                        est_error: last_change,
                        disc,
                        levels,
                    });
                }
            }
        }
        prev_extrap = extrap;
        if doublings >= opts.max_doublings {
            return Err(Error::BudgetExceeded { levels: levels.len(), last_change });
        }
        doublings += 1;
        disc = disc.refined();
    }
}

/// The small eigenvalue in `[-theta, theta]`, Richardson-extrapolated from
/// grids `h` and `h/2`; exactly one eigenvalue must lie in the window.
pub fn unique_small_eigenvalue<P: Potential + ?Sized>(
    pot: &P,
    disc: &Discretization,
    theta: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    let coarse = eigenvalues_in_window(pot, disc, -theta, theta, false, opts)?.eigenvalues;
    let fine = eigenvalues_in_window(pot, &disc.refined(), -theta, theta, false, opts)?.eigenvalues;
    match (coarse.len(), fine.len()) {
        (_, 0) => Err(Error::WindowEmpty { lo: -theta, hi: theta }),
        (1, 1) => Ok((4.0 * fine[0] - coarse[0]) / 3.0),
        (_, 1) => Ok(fine[0]),
        (_, count) => Err(Error::UniquenessViolated { lo: -theta, hi: theta, count }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_window() {
        let pot = |y: f64| y * y;
        let disc = Discretization::new(12.0, 4000);
        let s = eigenvalues_in_window(&pot, &disc, 0.0, 10.0, false, &SolverOptions::default()).unwrap();
        assert_eq!(s.eigenvalues.len(), 5);
        for (j, lam) in s.eigenvalues.iter().enumerate() {
            assert!((lam - (2 * j + 1) as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn min_modulus_shifted_oscillator() {
        let disc = Discretization::new(10.0, 3000);
        let opts = SolverOptions::default();
        let m = min_modulus_eigenvalue(&|y: f64| y * y, &disc, &opts).unwrap();
        assert!((m - 1.0).abs() < 1e-4);
        let m = min_modulus_eigenvalue(&|y: f64| y * y - 3.0, &disc, &opts).unwrap();
        assert!(m < 1e-4);
    }

    #[test]
    fn decay_weight_zero_is_energy() {
        let disc = Discretization::new(8.0, 800);
        let opts = SolverOptions::default();
        let d = decay_diagnostic(&|y: f64| y * y, &disc, 0, 0.0, None, &opts).unwrap();
        // <phi, (-d^2) phi> = 1/2 for the ground state
        assert!((d - 1.5).abs() < 1e-3);
    }

    #[test]
    fn refine_detects_budget() {
        let disc = Discretization::new(8.0, 100);
        let err = refine_until(&|y: f64| y * y, &disc, 0.0, 4.0, 1e-30, &SolverOptions::default());
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn widened_keeps_spacing() {
        let d = Discretization::new(3.0, 299);
        let w = d.widened(1.25);
        assert!((w.h() - d.h()).abs() < 1e-3 * d.h());
    }
}
