use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// The three rates of the open-system superatom model, all in 1/us.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperatomParams {
    /// Collectively enhanced emission rate into the forward probe mode.
    pub kappa: f64,
    /// Single-atom decay out of the forward mode (transverse / Raman).
    pub gamma: f64,
    /// Dephasing of the bright state into the dark-state manifold.
    pub gamma_d: f64,
}

impl SuperatomParams {
    pub fn new(kappa: f64, gamma: f64, gamma_d: f64) -> Result<Self> {
        let p = Self { kappa, gamma, gamma_d };
        p.validate()?;
        Ok(p)
    }

    /// Ideal emitter: only forward emission, no loss and no dephasing.
    pub fn ideal(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("gamma", self.gamma), ("gamma_d", self.gamma_d)] {
            ensure(v.is_finite(), || format!("{name} must be finite, got {v}"))?;
            ensure(v >= 0.0, || format!("{name} must be non-negative, got {v}"))?;
        }
        Ok(())
    }

    /// Total decay rate of the bright state |W>.
    pub fn bright_decay(&self) -> f64 {
        self.kappa + self.gamma + self.gamma_d
    }
}
