//! The local solvability classifier and numerical nonsolvability witnesses.
//!
//! Witnesses use the sign convention `Y = -d/dy + x^k d/dt`, under which the
//! null solutions of `L_0 = -X^2 - Y^2 + i a(0) [X, Y]` with `a(0) = 1` are
//! `exp(i eta y + i tau t) g_{eta,tau}(x)`,
//! `g_{eta,tau}(x) = exp(eta x - tau x^{k+1}/(k+1))`.
//! The case `a(0) = -1` reduces to `a(0) = 1` by `t -> -t`.

mod packet;
mod probe;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::CoefficientSpec;
use crate::spectral::Discretization;

pub use packet::{
    adaptive_packet, evaluate_wave_packet, log_g_normalized, Jet, Packet, Slice, WavePacketParams, Window,
};
pub use probe::{solvability_probe, ProbeOptions, ProbeReport, ProbeRow, Trend};
pub use witness::{l2_witness, WitnessOptions, WitnessReport, WitnessRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// `a(0)` outside the exceptional set.
    Subelliptic,
    /// `a(0)` exceptional, but some derivative of `a` at 0 is nonzero.
    PerturbedExceptional,
    /// `a(0)` exceptional and `a - a(0)` flat at 0: not locally solvable.
    FlatExceptional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalSet {
    /// `{±1, ±3, ±5, ...}`, used for `k = 1`.
    OddIntegers,
    /// `{±1}`, used for `k > 1`.
    PlusMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub solvable: bool,
    pub rule: Rule,
    pub exceptional_set_used: ExceptionalSet,
}

/// Whether `a0` lies in the exceptional set for `k`.
pub fn is_exceptional(k: u32, a0: f64) -> bool {
    if k == 1 {
        a0.fract() == 0.0 && a0.abs() < 9.0e15 && (a0 as i64).rem_euclid(2) == 1
    } else {
        a0.abs() == 1.0
    }
}

/// Local solvability at the origin of `-X^2 - Y^2 + i a(x) [X, Y]`.
pub fn classify(k: u32, coeff: &CoefficientSpec) -> Verdict {
    let exceptional_set_used = if k == 1 { ExceptionalSet::OddIntegers } else { ExceptionalSet::PlusMinusOne };
    let rule = if !is_exceptional(k, coeff.a0) {
        Rule::Subelliptic
    } else if coeff.vanishing_order().is_infinite() {
        Rule::FlatExceptional
    } else {
        Rule::PerturbedExceptional
    };
    Verdict { solvable: rule != Rule::FlatExceptional, rule, exceptional_set_used }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullResidual {
    /// `||g' - (eta - tau x^k) g|| / ||g||`.
    pub first_order: f64,
    /// `||(-d^2 + u^2 - u') g_hat|| / ||g_hat||` with `u = eta + tau x^k`.
    pub second_order: f64,
    /// `(eta / tau)^{1/k}`.
    pub critical_point: f64,
    /// Normalized `G_{eta,tau}` at the critical point.
    pub peak: f64,
}

impl NullResidual {
    pub fn max(&self) -> f64 {
        self.first_order.max(self.second_order)
    }
}

/// Finite-difference residuals of the null solutions on `disc`, with
/// second-order central differences at interior points.
pub fn null_solution_residual(k: u32, eta: f64, tau: f64, disc: &Discretization) -> Result<NullResidual> {
    if !(eta > 0.0 && tau > 0.0) || k == 0 {
        return Err(Error::InvalidInput("null solutions need eta, tau > 0 and k >= 1".into()));
    }
    disc.validate()?;
    let kf = k as f64;
    let xs = disc.points();
    let h = disc.h();
    let log_g: Vec<f64> = xs.iter().map(|&x| eta * x - tau * x.powi(k as i32 + 1) / (kf + 1.0)).collect();
    let log_gh: Vec<f64> = xs.iter().map(|&x| -eta * x - tau * x.powi(k as i32 + 1) / (kf + 1.0)).collect();
    for &l in log_g.iter().chain(&log_gh) {
        if l > 700.0 {
            return Err(Error::OverflowGuard(l));
        }
    }
    let g: Vec<f64> = log_g.iter().map(|l| l.exp()).collect();
    let gh: Vec<f64> = log_gh.iter().map(|l| l.exp()).collect();
    let (mut r1, mut n1, mut r2, mut n2) = (0.0, 0.0, 0.0, 0.0);
    for i in 1..xs.len() - 1 {
        let x = xs[i];
        let xk = x.powi(k as i32);
        let d1 = (g[i + 1] - g[i - 1]) / (2.0 * h);
        r1 += (d1 - (eta - tau * xk) * g[i]).powi(2);
        n1 += g[i] * g[i];
        let u = eta + tau * xk;
        let du = kf * tau * x.powi(k as i32 - 1);
        let d2 = (gh[i + 1] - 2.0 * gh[i] + gh[i - 1]) / (h * h);
        r2 += (-d2 + (u * u - du) * gh[i]).powi(2);
        n2 += gh[i] * gh[i];
    }
    let critical_point = (eta / tau).powf(1.0 / kf);
    Ok(NullResidual {
        first_order: (r1 / n1).sqrt(),
        second_order: (r2 / n2).sqrt(),
        critical_point,
        peak: log_g_normalized(k, eta, tau, critical_point).exp(),
    })
}
