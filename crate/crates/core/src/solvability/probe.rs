use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::packet::{adaptive_packet, Packet, WavePacketParams, Window};
use crate::error::{Error, Result};
use crate::operators::{CoefficientKind, CoefficientSpec, CutoffSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Points per axis of the grid on the support of the cutoff.
    pub grid: usize,
    /// Radius exponent of the test function: `phi` lives within `lambda^{-B}`.
    pub b_exponent: f64,
    /// Points per axis for `int phi psi`.
    pub phi_grid: usize,
    pub max_lambda: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { grid: 64, b_exponent: 2.0, phi_grid: 24, max_lambda: 256.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub lambda: f64,
    /// `|int phi psi| / (||phi||_C0 ||L psi||_C0)`.
    pub rho: f64,
    pub pairing: f64,
    pub l_psi_sup: f64,
    pub psi_sup: f64,
    pub l_psi_ratio: f64,
    pub quadrature_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Growing,
    Bounded,
    Decaying,
    Mixed,
}

impl Trend {
    fn of(factors: &[f64]) -> Trend {
        if factors.is_empty() {
            Trend::Bounded
        } else if factors.iter().all(|&f| f > 1.2) {
            Trend::Growing
        } else if factors.iter().all(|&f| (1.0 / 1.2..=1.2).contains(&f)) {
            Trend::Bounded
        } else if factors.iter().all(|&f| f < 1.0 / 1.2) {
            Trend::Decaying
        } else {
            Trend::Mixed
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub k: u32,
    pub coeff: CoefficientSpec,
    /// `"localized"` for the packet concentrated at `x_lambda`, `"scaled"` for
    /// the dilation family used when `k = 1`.
    pub path: String,
    pub options: ProbeOptions,
    pub rows: Vec<ProbeRow>,
    /// `rho` ratios between consecutive rows.
    pub rho_factors: Vec<f64>,
    pub rho_trend: Trend,
    pub l_psi_trend: Trend,
}

/// One-dimensional factor of a product cutoff: `zeta((v - center) * scale)`
/// with its first two derivatives in `v`.
#[derive(Clone, Copy)]
struct Axis {
    center: f64,
    scale: f64,
}

impl Axis {
    fn jet(&self, v: f64) -> (f64, f64, f64) {
        let (z, d1, d2) = CutoffSpec::new(1.0 / 3.0).jet((v - self.center) * self.scale);
        (z, d1 * self.scale, d2 * self.scale * self.scale)
    }

    fn grid(&self, n: usize) -> Vec<f64> {
        let r = 2.0 / (3.0 * self.scale);
        (0..n).map(|i| self.center - r + 2.0 * r * i as f64 / (n - 1) as f64).collect()
    }
}

struct Setting<'a> {
    k: u32,
    coeff: &'a CoefficientSpec,
    packet: Packet,
    axes: [Axis; 3],
}

/// `sup |L(zeta F)|` and `sup |zeta F|` over the tensor grid on the cutoff support.
fn sup_norms(s: &Setting, n: usize) -> (f64, f64) {
    let xs = s.axes[0].grid(n);
    let ys = s.axes[1].grid(n);
    let ts = s.axes[2].grid(n);
    let zy: Vec<_> = ys.iter().map(|&y| s.axes[1].jet(y)).collect();
    let zt: Vec<_> = ts.iter().map(|&t| s.axes[2].jet(t)).collect();
    let kf = s.k as f64;
    let i = Complex64::new(0.0, 1.0);
    let sups = s.packet.map_slices(&xs, &ys, &ts, |ix, slice| {
        let x = xs[ix];
        let (zx, zx1, zx2) = s.axes[0].jet(x);
        let xk = x.powi(s.k as i32);
        let xk1 = if s.k == 1 { 1.0 } else { x.powi(s.k as i32 - 1) };
        let b = s.coeff.perturbation(x);
        let a = s.coeff.a0 + b;
        let (mut lsup, mut psup): (f64, f64) = (0.0, 0.0);
        for (iy, &(zy0, zy1, zy2)) in zy.iter().enumerate() {
            for (it, &(zt0, zt1, zt2)) in zt.iter().enumerate() {
                let j = slice.jet(iy, it);
                let z = zx * zy0 * zt0;
                let z_x = zx1 * zy0 * zt0;
                let z_xx = zx2 * zy0 * zt0;
                let z_y = zx * zy1 * zt0;
                let z_t = zx * zy0 * zt1;
                let z_yy = zx * zy2 * zt0;
                let z_tt = zx * zy0 * zt2;
                let z_yt = zx * zy1 * zt1;
                let y_z = -z_y + xk * z_t;
                let y_f = -j.fy + j.ft * xk;
                let yy_z = z_yy - 2.0 * xk * z_yt + xk * xk * z_tt;
                let l = i * (kf * xk1 * b * z) * j.ft - 2.0 * z_x * j.fx - 2.0 * y_z * y_f
                    - j.f * (z_xx + yy_z)
                    + i * (a * kf * xk1 * z_t) * j.f;
                lsup = lsup.max(l.norm());
                psup = psup.max((j.f * z).norm());
            }
        }
        (lsup, psup)
    });
    sups.into_iter().fold((0.0, 0.0), |(a, b), (c, d)| (f64::max(a, c), f64::max(b, d)))
}

/// Midpoint rule for `int phi psi` over the box `center ± radius`, with `phi`
/// a radial plateau cutoff equal to 1 within half the radius.
fn pairing(s: &Setting, center: [f64; 3], radius: [f64; 3], n: usize) -> f64 {
    let axis = |c: f64, r: f64| -> Vec<f64> { (0..n).map(|i| c - r + (2 * i + 1) as f64 * r / n as f64).collect() };
    let xs = axis(center[0], radius[0]);
    let ys = axis(center[1], radius[1]);
    let ts = axis(center[2], radius[2]);
    let phi = CutoffSpec::new(1.0 / 3.0);
    let cell: f64 = radius.iter().map(|r| 2.0 * r / n as f64).product();
    let parts = s.packet.map_slices(&xs, &ys, &ts, |ix, slice| {
        let mut acc = Complex64::default();
        let dx = (xs[ix] - center[0]) / radius[0];
        for (iy, &y) in ys.iter().enumerate() {
            let dy = (y - center[1]) / radius[1];
            for (it, &t) in ts.iter().enumerate() {
                let dt = (t - center[2]) / radius[2];
                let rho = (dx * dx + dy * dy + dt * dt).sqrt();
                let w = phi.value(rho / 1.5);
                if w == 0.0 {
                    continue;
                }
                let (zy, _, _) = s.axes[1].jet(y);
                let (zt, _, _) = s.axes[2].jet(t);
                let (zx, _, _) = s.axes[0].jet(xs[ix]);
                acc += slice.jet(iy, it).f * (w * zx * zy * zt);
            }
        }
        acc
    });
    (parts.into_iter().sum::<Complex64>() * cell).norm()
}

/// Numerical probe of the a priori inequality `|int phi psi| <= N ||phi|| ||L psi||`
/// along a family of packets concentrating at the origin.
///
/// Only `a(0) = ±1` is supported: these are the cases with explicit null
/// solutions. The perturbation `b = a - a(0)` enters without cutoff.
pub fn solvability_probe(
    k: u32,
    coeff: &CoefficientSpec,
    lambdas: &[f64],
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    if k == 0 || lambdas.is_empty() {
        return Err(Error::InvalidInput("probe needs k >= 1 and at least one lambda".into()));
    }
    if coeff.a0.abs() != 1.0 {
        return Err(Error::InvalidInput(format!(
            "probe implemented for a(0) = ±1 only, got {}",
            coeff.a0
        )));
    }
    if matches!(coeff.kind, CoefficientKind::Constant) {
        return Err(Error::InvalidInput("probe needs a flat or polynomial perturbation".into()));
    }
    if opts.grid < 8 || opts.phi_grid < 4 {
        return Err(Error::InvalidInput("probe grids too small".into()));
    }
    if let Some(&l) = lambdas.iter().find(|&&l| !(l >= 16.0 && l <= opts.max_lambda)) {
        return Err(Error::GridBudget(format!("lambda = {l} outside [16, {}]", opts.max_lambda)));
    }
    let original = coeff.clone();
    let coeff = if coeff.a0 < 0.0 { coeff.negated() } else { coeff.clone() };
    let (eta_w, tau_w) = (Window::Gaussian { center: 0.0, sigma: 2.0 }, Window::Gaussian { center: 4.0, sigma: 0.45 });
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let (setting, center, radius) = if k == 1 {
            let s = Setting {
                k,
                coeff: &coeff,
                packet: Packet::with_panels(
                    1,
                    eta_w,
                    tau_w,
                    Packet::panels_for(eta_w, 2.0 * lambda.sqrt() / 3.0),
                    Packet::panels_for(tau_w, 2.0 * lambda / 3.0),
                )
                .scaled(lambda),
                axes: [
                    Axis { center: 0.0, scale: lambda.sqrt() },
                    Axis { center: 0.0, scale: lambda.sqrt() },
                    Axis { center: 0.0, scale: lambda },
                ],
            };
            let r = 0.5;
            (s, [0.0; 3], [r / lambda, r / lambda, r / (lambda * lambda)])
        } else {
            let p = WavePacketParams { lambda, k };
            let xl = p.x_lambda();
            let kf = k as f64;
            let axes = [
                Axis { center: xl, scale: lambda.powf(1.0 / (2.0 * kf)) },
                Axis { center: 0.0, scale: lambda.powf(1.0 / (8.0 * kf)) },
                Axis { center: 0.0, scale: lambda.powf(0.125) },
            ];
            let edge = (xl + 0.5 / axes[0].scale, 0.5 / axes[1].scale, 0.5 / axes[2].scale);
            let packet = adaptive_packet(k, p.eta_window(), p.tau_window(), &[(xl, 0.0, 0.0), edge], 1e-4, 256)?;
            let r = lambda.powf(-opts.b_exponent);
            (Setting { k, coeff: &coeff, packet, axes }, [xl, 0.0, 0.0], [r; 3])
        };
        let (l_psi_sup, psi_sup) = sup_norms(&setting, opts.grid);
        let pair = pairing(&setting, center, radius, opts.phi_grid);
        rows.push(ProbeRow {
            lambda,
            rho: pair / l_psi_sup,
            pairing: pair,
            l_psi_sup,
            psi_sup,
            l_psi_ratio: l_psi_sup / psi_sup,
            quadrature_nodes: setting.packet.eta.len() * setting.packet.tau.len(),
        });
    }
    let factors = |f: fn(&ProbeRow) -> f64| -> Vec<f64> { rows.windows(2).map(|w| f(&w[1]) / f(&w[0])).collect() };
    let rho_factors = factors(|r| r.rho);
    let l_psi_trend = Trend::of(&factors(|r| r.l_psi_ratio));
    Ok(ProbeReport {
        k,
        coeff: original,
        path: if k == 1 { "scaled" } else { "localized" }.to_string(),
        options: *opts,
        rho_trend: Trend::of(&rho_factors),
        rho_factors,
        l_psi_trend,
        rows,
    })
}
