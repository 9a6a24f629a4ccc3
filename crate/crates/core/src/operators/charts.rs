use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartC {
    pub z: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartD {
    pub w: f64,
    pub eps: f64,
    pub sign_tau: f64,
}

/// `(eta, tau) -> (z, eps)` with `z^k = -eta/tau`, `eps^2 = |eta|^{-(k+1)/k} |tau|^{1/k} / k`.
///
/// For odd `k` the map only covers `tau > 0`; the other half plane is reached
/// through `A_{-eta,-tau}[-a] = A_{eta,tau}[a]`.
pub fn chart_c(eta: f64, tau: f64, k: u32) -> Result<ChartC> {
    if tau == 0.0 || eta == 0.0 {
        return Err(Error::Domain(format!("chart C needs eta, tau nonzero, got ({eta}, {tau})")));
    }
    if k % 2 == 0 && eta * tau > 0.0 {
        return Err(Error::Domain("chart C: -eta/tau has no real k-th root for even k".into()));
    }
    if k % 2 == 1 && tau < 0.0 {
        return Err(Error::Domain("chart C: odd k needs tau > 0 (reflect a -> -a)".into()));
    }
    let kf = k as f64;
    let z = -eta.signum() * (eta / tau).abs().powf(1.0 / kf);
    let eps2 = eta.abs().powf(-(kf + 1.0) / kf) * tau.abs().powf(1.0 / kf) / kf;
    Ok(ChartC { z, eps: eps2.sqrt() })
}

pub fn chart_c_inverse(z: f64, eps: f64, k: u32) -> (f64, f64) {
    let kf = k as f64;
    let s = 1.0 / (kf * eps * eps);
    (-s / z, s / z.powi(k as i32 + 1))
}

/// `|d(eta, tau)/d(z, eps)| = (2/k) eps^-5 |z|^{-k-3}`.
pub fn chart_c_jacobian(z: f64, eps: f64, k: u32) -> f64 {
    2.0 / k as f64 * eps.powi(-5) * z.abs().powi(-(k as i32) - 3)
}

pub fn chart_d(eta: f64, tau: f64, k: u32) -> Result<ChartD> {
    if tau == 0.0 {
        return Err(Error::Domain("chart D needs tau != 0".into()));
    }
    let eps = tau.abs().powf(-1.0 / (k as f64 + 1.0));
    let sign_tau = tau.signum();
    Ok(ChartD { w: sign_tau * eta * eps, eps, sign_tau })
}

pub fn chart_d_inverse(w: f64, eps: f64, sign_tau: f64, k: u32) -> (f64, f64) {
    (sign_tau * w / eps, sign_tau * eps.powi(-(k as i32) - 1))
}

/// `|d(eta, tau)/d(w, eps)| = (k+1) eps^{-(k+3)}`.
pub fn chart_d_jacobian(eps: f64, k: u32) -> f64 {
    (k as f64 + 1.0) * eps.powi(-(k as i32) - 3)
}
