use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::DEFAULT_DEGREE_CAP;
use crate::operators::{CoefficientSpec, CutoffSpec, RegionConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKindName {
    Constant,
    Polynomial,
    Flat,
}

/// Model parameters shared by every command, as read from a JSON config file.
///
/// Missing region constants fall back to [`RegionConstants::default_for`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub k: u32,
    pub a0: f64,
    pub coeff_kind: CoeffKindName,
    pub coeffs: Vec<f64>,
    pub flat_scale: f64,
    pub delta0: f64,
    pub tau0: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma1: Option<f64>,
    pub b_exponent: f64,
    pub degree_cap: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            k: 2,
            a0: 1.0,
            coeff_kind: CoeffKindName::Constant,
            coeffs: Vec::new(),
            flat_scale: 1.0,
            delta0: 0.1,
            tau0: None,
            gamma0: None,
            gamma1: None,
            b_exponent: 2.0,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be >= 1".into()));
        }
        if !self.a0.is_finite() {
            return Err(Error::InvalidInput("a0 must be finite".into()));
        }
        if !(self.delta0 > 0.0 && self.delta0 <= 0.5) {
            return Err(Error::InvalidInput(format!("delta0 must lie in (0, 0.5], got {}", self.delta0)));
        }
        if !(self.b_exponent > 0.0) {
            return Err(Error::InvalidInput("b_exponent must be positive".into()));
        }
        self.coefficient()?;
        self.region_constants().validate(self.k)
    }

    pub fn coefficient(&self) -> Result<CoefficientSpec> {
        match self.coeff_kind {
            CoeffKindName::Constant => Ok(CoefficientSpec::constant(self.a0)),
            CoeffKindName::Polynomial => CoefficientSpec::polynomial(self.a0, self.coeffs.clone()),
            CoeffKindName::Flat => CoefficientSpec::flat(self.a0, self.flat_scale),
        }
    }

    pub fn cutoff(&self) -> CutoffSpec {
        CutoffSpec::new(self.delta0)
    }

    pub fn region_constants(&self) -> RegionConstants {
        let d = RegionConstants::default_for(self.k);
        RegionConstants {
            tau0: self.tau0.unwrap_or(d.tau0),
            gamma0: self.gamma0.unwrap_or(d.gamma0),
            gamma1: self.gamma1.unwrap_or(d.gamma1),
        }
    }

    /// Copy with every optional field filled in.
    pub fn effective(&self) -> Self {
        let rc = self.region_constants();
        ModelConfig { tau0: Some(rc.tau0), gamma0: Some(rc.gamma0), gamma1: Some(rc.gamma1), ..self.clone() }
    }
}
