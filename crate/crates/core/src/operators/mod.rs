//! Coefficients, the three potential families, parameter charts and the
//! region decomposition of the `(eta, tau)` plane.

mod charts;
mod coefficient;
mod cutoff;
mod region;

pub use charts::{
    chart_c, chart_c_inverse, chart_c_jacobian, chart_d, chart_d_inverse, chart_d_jacobian, ChartC,
    ChartD,
};
pub use coefficient::{CoefficientKind, CoefficientSpec, VanishingOrder};
pub use cutoff::{bump, smooth_step, CutoffSpec};
pub use region::{classify_region, Region, RegionConstants};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    A { eta: f64, tau: f64 },
    B { z: f64, eps: f64 },
    D { w: f64, eps: f64, sign_tau: f64 },
}

/// One member of a family together with its coefficient data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorInstance {
    pub family: Family,
    pub k: u32,
    pub coeff: CoefficientSpec,
    pub cutoff: CutoffSpec,
}

fn real_roots_of_power(k: u32, c: f64) -> Vec<f64> {
    // solutions of x^k = c
    if k % 2 == 1 {
        vec![c.signum() * c.abs().powf(1.0 / k as f64)]
    } else if c >= 0.0 {
        let r = c.powf(1.0 / k as f64);
        vec![-r, r]
    } else {
        vec![]
    }
}

/// `((1 + e y)^k - 1) / (e k)` and its derivative `(1 + e y)^(k-1)`, stable near `e = 0`.
pub(crate) fn shifted_q(k: u32, eps: f64, y: f64) -> (f64, f64) {
    let u = eps * y;
    let mut binom = 1.0;
    let mut sum = 0.0;
    let mut upow = 1.0;
    for j in 1..=k {
        binom = binom * (k - j + 1) as f64 / j as f64;
        sum += binom * upow;
        upow *= u;
    }
    (y * sum / k as f64, (1.0 + u).powi(k as i32 - 1))
}

impl OperatorInstance {
    pub fn new(family: Family, k: u32, coeff: CoefficientSpec) -> Self {
        OperatorInstance { family, k, coeff, cutoff: CutoffSpec::default() }
    }

    pub fn with_cutoff(mut self, cutoff: CutoffSpec) -> Self {
        self.cutoff = cutoff;
        self
    }

    /// `b(s) = (a(s) - a(0)) zeta(s)`.
    pub fn b(&self, s: f64) -> f64 {
        let c = self.cutoff.value(s);
        if c == 0.0 {
            0.0
        } else {
            c * self.coeff.perturbation(s)
        }
    }

    /// The potential in the family's own variable. For family B with `eps = 0`
    /// the wells sit at infinity, so the well-centred variable is used instead.
    pub fn potential(&self, x: f64) -> f64 {
        let k = self.k as i32;
        let kf = self.k as f64;
        let a0 = self.coeff.a0;
        match self.family {
            Family::A { eta, tau } => {
                let u = eta + tau * x.powi(k);
                u * u - (a0 + self.b(x)) * kf * tau * x.powi(k - 1)
            }
            Family::B { z, eps } => {
                if eps == 0.0 {
                    return self.centered_potential(x);
                }
                let q = ((eps * x).powi(k) - 1.0) / (eps * kf);
                let qp = (eps * x).powi(k - 1);
                q * q - (a0 + self.b(eps * z * x)) * qp
            }
            Family::D { w, eps, sign_tau } => {
                let u = x.powi(k) + w;
                u * u - sign_tau * (a0 + self.b(eps * x)) * kf * x.powi(k - 1)
            }
        }
    }

    /// The potential in the solver variable: identical to [`Self::potential`]
    /// except for family B, which is shifted so the right well sits at 0.
    pub fn centered_potential(&self, y: f64) -> f64 {
        match self.family {
            Family::B { z, eps } => {
                let (p, pp) = shifted_q(self.k, eps, y);
                p * p - (self.coeff.a0 + self.b(z * (1.0 + eps * y))) * pp
            }
            _ => self.potential(y),
        }
    }

    /// Points in the solver variable around which eigenfunctions may localize.
    pub fn anchors(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        match self.family {
            Family::A { eta, tau } => {
                if tau != 0.0 {
                    pts.extend(real_roots_of_power(self.k, -eta / tau));
                }
            }
            Family::B { eps, .. } => {
                if self.k % 2 == 0 && eps != 0.0 {
                    pts.push(-2.0 / eps);
                }
            }
            Family::D { w, .. } => pts.extend(real_roots_of_power(self.k, -w)),
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts
    }

    /// Well locations used by the decay weight, in the solver variable.
    pub fn wells(&self) -> Option<Vec<f64>> {
        match self.family {
            Family::B { eps, .. } if eps != 0.0 => Some(vec![-2.0 / eps, 0.0]),
            Family::B { .. } => Some(vec![0.0]),
            _ => None,
        }
    }
}

pub fn evaluate_potential(op: &OperatorInstance, x: f64) -> f64 {
    op.potential(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let a = OperatorInstance::new(Family::A { eta: 0.0, tau: 1.0 }, 1, CoefficientSpec::constant(1.0));
        assert_eq!(a.potential(0.0), -1.0);
        let b = OperatorInstance::new(Family::B { z: 0.3, eps: 0.5 }, 2, CoefficientSpec::constant(1.0));
        assert_eq!(b.potential(2.0), -1.0);
        let d = OperatorInstance::new(
            Family::D { w: 1.0, eps: 0.5, sign_tau: 1.0 },
            2,
            CoefficientSpec::constant(1.0),
        );
        assert_eq!(d.potential(0.0), 1.0);
    }

    #[test]
    fn centered_matches_shifted() {
        let coeff = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0, 1.0]).unwrap();
        for k in 1..=4 {
            let op = OperatorInstance::new(Family::B { z: 0.07, eps: 0.2 }, k, coeff.clone());
            for &y in &[-3.0, -0.5, 0.0, 0.4, 2.0] {
                let lhs = op.centered_potential(y);
                let rhs = op.potential(y + 5.0);
                assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "k={k} y={y}");
            }
        }
    }

    #[test]
    fn zero_eps_is_shifted_oscillator() {
        let op = OperatorInstance::new(Family::B { z: 0.0, eps: 0.0 }, 3, CoefficientSpec::constant(1.0));
        assert_eq!(op.centered_potential(2.0), 3.0);
    }

    #[test]
    fn anchors_include_wells() {
        let op = OperatorInstance::new(Family::B { z: 0.0, eps: 0.1 }, 2, CoefficientSpec::constant(1.0));
        assert_eq!(op.anchors(), vec![-20.0, 0.0]);
        let a = OperatorInstance::new(Family::A { eta: -8.0, tau: 1.0 }, 3, CoefficientSpec::constant(1.0));
        let r = a.anchors();
        assert!(r.iter().any(|&x| (x - 2.0).abs() < 1e-12));
    }
}
