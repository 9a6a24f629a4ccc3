use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    B,
    C,
    D,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionConstants {
    pub tau0: f64,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl RegionConstants {
    /// Defaults for a given `k`: `tau0 = 100`, `gamma1 = 0.1^k` (so chart C
    /// lands in `|z| <= 0.1`), and `gamma0` half of the largest value that
    /// keeps region C nonempty at `tau0`.
    pub fn default_for(k: u32) -> Self {
        let tau0: f64 = 100.0;
        let gamma1 = 0.1f64.powi(k as i32);
        let gamma0 = 0.5 * gamma1 * tau0.powf(k as f64 / (k as f64 + 1.0));
        RegionConstants { tau0, gamma0, gamma1 }
    }

    pub fn validate(&self, k: u32) -> Result<()> {
        if !(self.tau0 > 0.0 && self.gamma0 > 0.0 && self.gamma1 > 0.0) {
            return Err(Error::InvalidInput("region constants must be positive".into()));
        }
        if self.gamma1 >= 1.0 {
            return Err(Error::InvalidInput("gamma1 must be < 1".into()));
        }
        if self.gamma0 * self.tau0.powf(1.0 / (k as f64 + 1.0)) >= self.gamma1 * self.tau0 {
            return Err(Error::InvalidInput(format!(
                "gamma0 tau0^(1/(k+1)) must be below gamma1 tau0 (k = {k})"
            )));
        }
        Ok(())
    }

    /// Lower edge of region C at `|tau|`.
    pub fn c_lower(&self, tau: f64, k: u32) -> f64 {
        self.gamma0 * tau.abs().powf(1.0 / (k as f64 + 1.0))
    }

    /// Upper edge of region C at `|tau|`.
    pub fn c_upper(&self, tau: f64) -> f64 {
        self.gamma1 * tau.abs()
    }
}

pub fn classify_region(eta: f64, tau: f64, k: u32, rc: &RegionConstants) -> Region {
    let (ae, at) = (eta.abs(), tau.abs());
    if at <= rc.tau0 || ae >= rc.c_upper(at) {
        Region::B
    } else if ae >= rc.c_lower(at, k) {
        Region::C
    } else {
        Region::D
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_points() {
        let rc = RegionConstants { tau0: 100.0, gamma0: 10.0, gamma1: 0.01 };
        assert_eq!(classify_region(0.0, 50.0, 1, &rc), Region::B);
        assert_eq!(classify_region(5.0, 1e6, 1, &rc), Region::D);
        assert_eq!(classify_region(1e5, 1e6, 1, &rc), Region::B);
    }

    #[test]
    fn defaults_are_valid() {
        for k in 1..=8 {
            RegionConstants::default_for(k).validate(k).unwrap();
        }
        let bad = RegionConstants { tau0: 100.0, gamma0: 10.0, gamma1: 0.01 };
        assert!(bad.validate(1).is_err());
    }

    #[test]
    fn ties_prefer_b_then_c() {
        let rc = RegionConstants::default_for(1);
        let tau = 400.0;
        assert_eq!(classify_region(rc.c_upper(tau), tau, 1, &rc), Region::B);
        assert_eq!(classify_region(rc.c_lower(tau, 1), tau, 1, &rc), Region::C);
    }
}
