//! Side-by-side reading of the few-photon solver and the master equation
//! driven by the identical band-limited field.

use serde::{Deserialize, Serialize};

use super::{oracle_evolve, oracle_observables, BandLimitedDrive, OracleConfig};
use crate::correlation::g2_matrix_with;
use crate::error::{Error, Result};
use crate::ode::Tolerances;
use crate::params::SuperatomParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub num_modes: usize,
    pub box_length: f64,
    pub times: Vec<f64>,
    pub oracle_intensity: Vec<f64>,
    pub me_intensity: Vec<f64>,
    pub oracle_g2: Vec<Vec<f64>>,
    pub me_g2: Vec<Vec<f64>>,
    pub truncation_warning: bool,
}

/// Worst pointwise disagreement over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    /// max |I_a / I_b - 1|
    pub intensity: f64,
    /// max |g2_a - g2_b| / max(g2_b, 1)
    pub g2: f64,
}

impl Agreement {
    pub fn within(&self, tol: f64) -> bool {
        self.intensity <= tol && self.g2 <= tol
    }
}

impl Comparison {
    pub fn intensity_ratio(&self, i: usize) -> f64 {
        self.me_intensity[i] / self.oracle_intensity[i]
    }

    /// Master-equation minus oracle g2, scaled by `max(g2_oracle, 1)`.
    pub fn g2_deviation(&self, i: usize, j: usize) -> f64 {
        (self.me_g2[i][j] - self.oracle_g2[i][j]) / self.oracle_g2[i][j].max(1.0)
    }

    /// Discrepancy at this resolution.
    pub fn agreement(&self) -> Agreement {
        let n = self.times.len();
        let mut a = Agreement { intensity: 0.0, g2: 0.0 };
        for i in 0..n {
            a.intensity = a.intensity.max((self.intensity_ratio(i) - 1.0).abs());
            for j in 0..n {
                a.g2 = a.g2.max(self.g2_deviation(i, j).abs());
            }
        }
        a
    }
}

/// Evolves the few-photon state and the master equation (with `Gamma =
/// gamma_D = 0`) under the same truncated drive and reads both on `times`.
pub fn compare(cfg: &OracleConfig, t_end: f64, times: &[f64]) -> Result<Comparison> {
    let state = oracle_evolve(cfg, t_end)?;
    let oracle = oracle_observables(&state, times, 0.0)?;
    let drive = BandLimitedDrive::new(cfg)?;
    let params = SuperatomParams::ideal(cfg.kappa)?;
    let me = g2_matrix_with(&params, &drive, times, 0.0, Tolerances::default())?;
    if oracle.valid.iter().flatten().any(|v| !v) || me.valid.iter().flatten().any(|v| !v) {
        return Err(Error::Undefined("zero intensity at a comparison time".into()));
    }
    let n = times.len();
    Ok(Comparison {
        num_modes: cfg.num_modes,
        box_length: cfg.box_length,
        times: times.to_vec(),
        oracle_intensity: oracle.intensity,
        me_intensity: me.intensity.clone(),
        oracle_g2: oracle.g2,
        me_g2: (0..n).map(|i| (0..n).map(|j| me.get(i, j).unwrap_or(f64::NAN)).collect()).collect(),
        truncation_warning: state.truncation_warning,
    })
}

/// Removes the leading cutoff error from the discrepancy. The truncated drive
/// makes the discrepancy fall as 1/cutoff, so with `fine` at twice the
/// cutoff of `coarse` the combination `2 d_fine - d_coarse` estimates the
/// untruncated limit.
pub fn extrapolated_agreement(coarse: &Comparison, fine: &Comparison) -> Result<Agreement> {
    if coarse.times != fine.times {
        return Err(Error::InvalidInput("comparisons use different grids".into()));
    }
    let ratio = (fine.num_modes as f64 / fine.box_length) / (coarse.num_modes as f64 / coarse.box_length);
    if (ratio - 2.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("fine cutoff must be twice the coarse one, got ratio {ratio}")));
    }
    let n = fine.times.len();
    let mut a = Agreement { intensity: 0.0, g2: 0.0 };
    for i in 0..n {
        let r = 2.0 * fine.intensity_ratio(i) - coarse.intensity_ratio(i);
        a.intensity = a.intensity.max((r - 1.0).abs());
        for j in 0..n {
            let d = 2.0 * fine.g2_deviation(i, j) - coarse.g2_deviation(i, j);
            a.g2 = a.g2.max(d.abs());
        }
    }
    Ok(a)
}

/// Change of the oracle readings between two discretisations.
pub fn oracle_change(reference: &Comparison, other: &Comparison) -> Agreement {
    let n = reference.times.len();
    let mut a = Agreement { intensity: 0.0, g2: 0.0 };
    for i in 0..n {
        a.intensity = a.intensity.max((other.oracle_intensity[i] / reference.oracle_intensity[i] - 1.0).abs());
        for j in 0..n {
            let d = (other.oracle_g2[i][j] - reference.oracle_g2[i][j]) / reference.oracle_g2[i][j].max(1.0);
            a.g2 = a.g2.max(d.abs());
        }
    }
    a
}
