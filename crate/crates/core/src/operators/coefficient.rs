use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of `a(x) - a(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoefficientKind {
    Constant,
    /// `coeffs[m]` is the coefficient of `x^m`; entry 0 must vanish.
    Polynomial { coeffs: Vec<f64> },
    /// `amplitude * exp(-1/(scale x)^2)`, flat at the origin.
    Flat {
        scale: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishingOrder {
    Finite(u32),
    Infinite,
}

impl VanishingOrder {
    pub fn is_infinite(self) -> bool {
        matches!(self, VanishingOrder::Infinite)
    }
}

/// The coefficient function `a(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSpec {
    pub a0: f64,
    pub kind: CoefficientKind,
}

impl CoefficientSpec {
    pub fn constant(a0: f64) -> Self {
        CoefficientSpec { a0, kind: CoefficientKind::Constant }
    }

    /// Polynomial perturbation. Trailing zeros are dropped and an all-zero list
    /// collapses to [`CoefficientKind::Constant`].
    pub fn polynomial(a0: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
        }
        if coeffs.first().is_some_and(|&c| c != 0.0) {
            return Err(Error::InvalidInput(
                "coeffs[0] must be 0: it is the constant term of a(x) - a(0)".into(),
            ));
        }
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Ok(Self::constant(a0));
        }
        Ok(CoefficientSpec { a0, kind: CoefficientKind::Polynomial { coeffs } })
    }

    pub fn flat(a0: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidInput(format!("flat scale must be positive, got {scale}")));
        }
        Ok(CoefficientSpec { a0, kind: CoefficientKind::Flat { scale, amplitude: 1.0 } })
    }

    pub fn vanishing_order(&self) -> VanishingOrder {
        match &self.kind {
            CoefficientKind::Polynomial { coeffs } => match coeffs.iter().position(|&c| c != 0.0) {
                Some(m) => VanishingOrder::Finite(m as u32),
                None => VanishingOrder::Infinite,
            },
            _ => VanishingOrder::Infinite,
        }
    }

    /// `a(x) - a(0)`, without any cutoff.
    pub fn perturbation(&self, x: f64) -> f64 {
        match &self.kind {
            CoefficientKind::Constant => 0.0,
            CoefficientKind::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
            CoefficientKind::Flat { scale, amplitude } => {
                if x == 0.0 {
                    0.0
                } else {
                    let s = scale * x;
                    amplitude * (-1.0 / (s * s)).exp()
                }
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.a0 + self.perturbation(x)
    }

    /// `a^(m)(0) / m!` for `m >= 1`.
    pub fn taylor(&self, m: usize) -> f64 {
        match &self.kind {
            CoefficientKind::Polynomial { coeffs } if m >= 1 => coeffs.get(m).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    /// The coefficient of `-a`.
    pub fn negated(&self) -> Self {
        let kind = match &self.kind {
            CoefficientKind::Constant => CoefficientKind::Constant,
            CoefficientKind::Polynomial { coeffs } => {
                CoefficientKind::Polynomial { coeffs: coeffs.iter().map(|c| -c).collect() }
            }
            CoefficientKind::Flat { scale, amplitude } => {
                CoefficientKind::Flat { scale: *scale, amplitude: -amplitude }
            }
        };
        CoefficientSpec { a0: -self.a0, kind }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishing_orders() {
        let p = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.vanishing_order(), VanishingOrder::Finite(2));
        assert_eq!(CoefficientSpec::flat(1.0, 1.0).unwrap().vanishing_order(), VanishingOrder::Infinite);
        assert_eq!(CoefficientSpec::constant(3.0).vanishing_order(), VanishingOrder::Infinite);
        let z = CoefficientSpec::polynomial(1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(z.kind, CoefficientKind::Constant);
        assert!(CoefficientSpec::polynomial(1.0, vec![2.0]).is_err());
    }

    #[test]
    fn flat_is_zero_at_origin() {
        let f = CoefficientSpec::flat(1.0, 2.0).unwrap();
        assert_eq!(f.perturbation(0.0), 0.0);
        assert_eq!(f.perturbation(1e-3), 0.0);
        assert!(f.perturbation(1.0) > 0.7);
        assert_eq!(f.taylor(4), 0.0);
    }

    #[test]
    fn negation_flips_values() {
        let f = CoefficientSpec::flat(1.0, 1.0).unwrap();
        let g = f.negated();
        for x in [-0.7, 0.2, 1.5] {
            assert_eq!(f.value(x), -g.value(x));
        }
    }
}
