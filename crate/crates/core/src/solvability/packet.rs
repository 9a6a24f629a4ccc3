use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::bump;
use crate::quadrature::composite;

const GL_ORDER: usize = 8;

/// Window function in one frequency variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Window {
    /// `bump((v - center) / scale)`, supported in `|v - center| <= scale / 2`.
    Bump { center: f64, scale: f64 },
    /// `exp(-(v - center)^2 / (2 sigma^2))`, truncated at six sigma.
    Gaussian { center: f64, sigma: f64 },
}

impl Window {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Window::Bump { center, scale } => (center - 0.5 * scale, center + 0.5 * scale),
            Window::Gaussian { center, sigma } => (center - 6.0 * sigma, center + 6.0 * sigma),
        }
    }

    pub fn value(&self, v: f64) -> f64 {
        match *self {
            Window::Bump { center, scale } => bump((v - center) / scale),
            Window::Gaussian { center, sigma } => (-(v - center).powi(2) / (2.0 * sigma * sigma)).exp(),
        }
    }

    fn rule(&self, panels: usize) -> Vec<(f64, f64)> {
        let (a, b) = self.support();
        composite(a, b, panels, GL_ORDER)
            .into_iter()
            .map(|(v, w)| (v, w * self.value(v)))
            .filter(|&(_, w)| w != 0.0)
            .collect()
    }
}

/// `log G_{eta,tau}(x)`: `eta x - tau x^{k+1}/(k+1)` minus its value at the
/// critical point `(eta/tau)^{1/k}`, so that `G <= 1` there.
pub fn log_g_normalized(k: u32, eta: f64, tau: f64, x: f64) -> f64 {
    let kf = k as f64;
    let crit = kf / (kf + 1.0) * eta.abs().powf((kf + 1.0) / kf) * tau.powf(-1.0 / kf);
    eta * x - tau * x.powi(k as i32 + 1) / (kf + 1.0) - crit
}

/// Value and first partial derivatives of a packet at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub f: Complex64,
    pub fx: Complex64,
    pub fy: Complex64,
    pub ft: Complex64,
}

/// Per-`x` slice of packet fields on a `(y, t)` grid, row-major in `y`.
pub struct Slice {
    pub x: f64,
    pub nt: usize,
    pub f: Vec<Complex64>,
    pub fx: Vec<Complex64>,
    pub fy: Vec<Complex64>,
    pub ft: Vec<Complex64>,
}

impl Slice {
    pub fn jet(&self, iy: usize, it: usize) -> Jet {
        let i = iy * self.nt + it;
        Jet { f: self.f[i], fx: self.fx[i], fy: self.fy[i], ft: self.ft[i] }
    }
}

/// Discretized superposition `sum w_ij exp(i eta_i y + i tau_j t) G_{eta_i,tau_j}(x)`
/// of null solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub k: u32,
    pub eta: Vec<(f64, f64)>,
    pub tau: Vec<(f64, f64)>,
}

impl Packet {
    pub fn new(k: u32, eta: Window, tau: Window, panels: usize) -> Self {
        Packet::with_panels(k, eta, tau, panels, panels)
    }

    pub fn with_panels(k: u32, eta: Window, tau: Window, eta_panels: usize, tau_panels: usize) -> Self {
        Packet { k, eta: eta.rule(eta_panels), tau: tau.rule(tau_panels) }
    }

    /// Panels needed to resolve `exp(i v s)` for `|s| <= extent` over the window.
    pub fn panels_for(window: Window, extent: f64) -> usize {
        let (a, b) = window.support();
        ((b - a) * extent / std::f64::consts::PI).ceil() as usize + 4
    }

    /// `F(lambda x, lambda y, lambda^{k+1} t)` as a packet in the original variables.
    pub fn scaled(&self, lambda: f64) -> Self {
        let lt = lambda.powi(self.k as i32 + 1);
        Packet {
            k: self.k,
            eta: self.eta.iter().map(|&(v, w)| (lambda * v, w)).collect(),
            tau: self.tau.iter().map(|&(v, w)| (lt * v, w)).collect(),
        }
    }

    pub fn mass(&self) -> f64 {
        let a: f64 = self.eta.iter().map(|p| p.1.abs()).sum();
        let b: f64 = self.tau.iter().map(|p| p.1.abs()).sum();
        a * b
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> Jet {
        let xk = x.powi(self.k as i32);
        let mut jet = Jet::default();
        for &(eta, we) in &self.eta {
            let ey = Complex64::from_polar(we, eta * y);
            for &(tau, wt) in &self.tau {
                let g = log_g_normalized(self.k, eta, tau, x).exp();
                if g == 0.0 {
                    continue;
                }
                let term = ey * Complex64::from_polar(wt * g, tau * t);
                jet.f += term;
                jet.fx += term * (eta - tau * xk);
                jet.fy += term * Complex64::new(0.0, eta);
                jet.ft += term * Complex64::new(0.0, tau);
            }
        }
        jet
    }

    /// Applies `f` to every `x`-slice of the tensor grid, in parallel, in order.
    pub fn map_slices<R: Send>(
        &self,
        xs: &[f64],
        ys: &[f64],
        ts: &[f64],
        f: impl Fn(usize, &Slice) -> R + Sync,
    ) -> Vec<R> {
        let (ne, nt_nodes) = (self.eta.len(), self.tau.len());
        let ey: Vec<Vec<Complex64>> = ys
            .iter()
            .map(|&y| self.eta.iter().map(|&(e, _)| Complex64::from_polar(1.0, e * y)).collect())
            .collect();
        let et: Vec<Vec<Complex64>> = self
            .tau
            .iter()
            .map(|&(tau, _)| ts.iter().map(|&t| Complex64::from_polar(1.0, tau * t)).collect())
            .collect();
        xs.par_iter()
            .enumerate()
            .map(|(ix, &x)| {
                let xk = x.powi(self.k as i32);
                let mut m = vec![0.0; ne * nt_nodes];
                for (i, &(eta, we)) in self.eta.iter().enumerate() {
                    for (j, &(tau, wt)) in self.tau.iter().enumerate() {
                        m[i * nt_nodes + j] = we * wt * log_g_normalized(self.k, eta, tau, x).exp();
                    }
                }
                let (ny, nt) = (ys.len(), ts.len());
                let mut p = vec![Complex64::default(); ny * nt_nodes];
                let mut py = vec![Complex64::default(); ny * nt_nodes];
                let mut px = vec![Complex64::default(); ny * nt_nodes];
                for b in 0..ny {
                    for i in 0..ne {
                        let e = ey[b][i];
                        let eta = self.eta[i].0;
                        let ie = e * Complex64::new(0.0, eta);
                        for j in 0..nt_nodes {
                            let w = m[i * nt_nodes + j];
                            if w == 0.0 {
                                continue;
                            }
                            let u = eta - self.tau[j].0 * xk;
                            p[b * nt_nodes + j] += e * w;
                            py[b * nt_nodes + j] += ie * w;
                            px[b * nt_nodes + j] += e * (w * u);
                        }
                    }
                }
                let mut s = Slice {
                    x,
                    nt,
                    f: vec![Complex64::default(); ny * nt],
                    fx: vec![Complex64::default(); ny * nt],
                    fy: vec![Complex64::default(); ny * nt],
                    ft: vec![Complex64::default(); ny * nt],
                };
                for b in 0..ny {
                    for j in 0..nt_nodes {
                        let (a, ay, ax) = (p[b * nt_nodes + j], py[b * nt_nodes + j], px[b * nt_nodes + j]);
                        if a == Complex64::default() && ax == Complex64::default() {
                            continue;
                        }
                        let at = a * Complex64::new(0.0, self.tau[j].0);
                        for c in 0..nt {
                            let e = et[j][c];
                            let idx = b * nt + c;
                            s.f[idx] += a * e;
                            s.fy[idx] += ay * e;
                            s.fx[idx] += ax * e;
                            s.ft[idx] += at * e;
                        }
                    }
                }
                f(ix, &s)
            })
            .collect()
    }
}

/// Doubles the panel count until the packet values at `checks` settle to
/// `rel_tol` (relative, with an absolute floor of `1e-13` times the mass).
pub fn adaptive_packet(
    k: u32,
    eta: Window,
    tau: Window,
    checks: &[(f64, f64, f64)],
    rel_tol: f64,
    max_panels: usize,
) -> Result<Packet> {
    let mut panels = 2;
    let mut prev: Option<Vec<Complex64>> = None;
    while panels <= max_panels {
        let p = Packet::new(k, eta, tau, panels);
        let vals: Vec<Complex64> = checks.iter().map(|&(x, y, t)| p.eval(x, y, t).f).collect();
        if let Some(old) = &prev {
            let floor = 1e-13 * p.mass();
            if vals.iter().zip(old).all(|(a, b)| (a - b).norm() <= rel_tol * a.norm() + floor) {
                return Ok(p);
            }
        }
        prev = Some(vals);
        panels *= 2;
    }
    Err(Error::QuadratureBudget(max_panels))
}

/// Parameters of the localized packet
/// `F_lambda = iint exp(i eta y + i tau t) G_{eta,tau}(x) h(lambda^{-3/4}(tau - lambda)) h(lambda^{-1/4}(eta - lambda^{1/2}))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketParams {
    pub lambda: f64,
    pub k: u32,
}

impl WavePacketParams {
    pub fn eta_window(&self) -> Window {
        Window::Bump { center: self.lambda.sqrt(), scale: self.lambda.powf(0.25) }
    }

    pub fn tau_window(&self) -> Window {
        Window::Bump { center: self.lambda, scale: self.lambda.powf(0.75) }
    }

    /// `lambda^{-1/(2k)}`.
    pub fn x_lambda(&self) -> f64 {
        self.lambda.powf(-1.0 / (2.0 * self.k as f64))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 16.0) || self.k == 0 {
            return Err(Error::InvalidInput("packet needs lambda >= 16 and k >= 1".into()));
        }
        Ok(())
    }
}

pub fn evaluate_wave_packet(p: &WavePacketParams, x: f64, y: f64, t: f64) -> Result<Complex64> {
    p.validate()?;
    let packet = adaptive_packet(p.k, p.eta_window(), p.tau_window(), &[(x, y, t)], 1e-4, 512)?;
    Ok(packet.eval(x, y, t).f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_peak_is_one() {
        for k in 1..=4 {
            let (eta, tau): (f64, f64) = (1.7, 2.3);
            let xc = (eta / tau).powf(1.0 / k as f64);
            assert!(log_g_normalized(k, eta, tau, xc).abs() < 1e-14);
            assert!(log_g_normalized(k, eta, tau, xc + 0.1) < 0.0);
        }
    }

    #[test]
    fn slices_agree_with_pointwise() {
        let p = Packet::new(2, Window::Bump { center: 4.0, scale: 2.0 }, Window::Bump { center: 16.0, scale: 8.0 }, 2);
        let xs = [0.3, 0.5];
        let ys = [-0.2, 0.0, 0.4];
        let ts = [-0.1, 0.05];
        let out = p.map_slices(&xs, &ys, &ts, |ix, s| {
            let mut err: f64 = 0.0;
            for (iy, &y) in ys.iter().enumerate() {
                for (it, &t) in ts.iter().enumerate() {
                    let a = s.jet(iy, it);
                    let b = p.eval(xs[ix], y, t);
                    err = err.max((a.f - b.f).norm() + (a.fx - b.fx).norm() + (a.fy - b.fy).norm() + (a.ft - b.ft).norm());
                }
            }
            err
        });
        assert!(out.iter().all(|&e| e < 1e-10));
    }

    #[test]
    fn scaling_matches_definition() {
        let p = Packet::new(1, Window::Bump { center: 0.0, scale: 2.0 }, Window::Bump { center: 1.5, scale: 1.0 }, 2);
        let l = 3.0;
        let s = p.scaled(l);
        let (x, y, t) = (0.1, -0.2, 0.05);
        let a = s.eval(x, y, t).f;
        let b = p.eval(l * x, l * y, l * l * t).f;
        assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
    }
}
