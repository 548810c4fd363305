//! Collective coupling of a Gaussian atomic cloud to a Gaussian probe mode.
//! Lengths in um, rates in 1/us, angular frequencies in rad/us.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudGeometry {
    /// Peak density, 1/um^3. Derived from `total_atoms` when absent.
    #[serde(default)]
    pub n0: Option<f64>,
    pub sigma_z: f64,
    pub sigma_r: f64,
    #[serde(default)]
    pub total_atoms: Option<f64>,
}

impl CloudGeometry {
    pub fn from_total_atoms(total_atoms: f64, sigma_z: f64, sigma_r: f64) -> Self {
        Self { n0: None, sigma_z, sigma_r, total_atoms: Some(total_atoms) }
    }

    pub fn from_peak_density(n0: f64, sigma_z: f64, sigma_r: f64) -> Self {
        Self { n0: Some(n0), sigma_z, sigma_r, total_atoms: None }
    }

    fn gaussian_volume(&self) -> f64 {
        (2.0 * PI).powf(1.5) * self.sigma_z * self.sigma_r * self.sigma_r
    }

    /// Peak density, reconciling `n0` and `total_atoms` if both are set.
    pub fn peak_density(&self) -> Result<f64> {
        for (name, v) in [("sigma_z", self.sigma_z), ("sigma_r", self.sigma_r)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("cloud {name} must be positive")));
            }
        }
        let from_n = self.total_atoms.map(|n| n / self.gaussian_volume());
        let n0 = match (self.n0, from_n) {
            (Some(a), Some(b)) => {
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
                    return Err(Error::InvalidInput(format!(
                        "n0 = {a} disagrees with total_atoms, which implies {b}"
                    )));
                }
                a
            }
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => return Err(Error::InvalidInput("cloud needs n0 or total_atoms".into())),
        };
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::InvalidInput(format!("peak density must be positive, got {n0}")));
        }
        Ok(n0)
    }

    pub fn with_scaled_density(&self, c: f64) -> Self {
        Self { n0: self.n0.map(|v| v * c), total_atoms: self.total_atoms.map(|v| v * c), ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamAndLasers {
    /// Probe waist.
    pub w0: f64,
    /// Optical wavelength of the probe transition.
    pub wavelength: f64,
    /// Decay rate of the intermediate state.
    pub gamma_e: f64,
    /// Control-field Rabi frequency.
    pub omega_c: f64,
    /// Detuning from the intermediate state.
    pub delta: f64,
    pub r_blockade: f64,
}

impl BeamAndLasers {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w0", self.w0),
            ("wavelength", self.wavelength),
            ("gamma_e", self.gamma_e),
            ("omega_c", self.omega_c),
            ("r_blockade", self.r_blockade),
        ] {
            if !(v > 0.0) || v.is_nan() {
                return Err(Error::InvalidInput(format!("beam {name} must be positive, got {v}")));
            }
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidInput("beam delta must be finite".into()));
        }
        Ok(())
    }

    /// Transverse mode area `pi w0^2 / 2`.
    pub fn mode_area(&self) -> f64 {
        0.5 * PI * self.w0 * self.w0
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.w0 * self.w0 / self.wavelength
    }

    /// Adiabatic-elimination factor `(Omega / 2 Delta)^2`.
    pub fn elimination_factor(&self) -> Result<f64> {
        if self.delta == 0.0 {
            return Err(Error::Undefined("resonant intermediate state (delta = 0): adiabatic elimination fails".into()));
        }
        Ok((self.omega_c / (2.0 * self.delta)).powi(2))
    }
}

/// Mode-weighted atom number from the closed form and from quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomNumber {
    pub closed_form: f64,
    pub quadrature: f64,
    /// Thin beam inside a long cloud (`w0 < sigma_r`, `lambda <= w0/5`).
    pub closed_form_reliable: bool,
}

impl AtomNumber {
    /// The closed form where it applies, the quadrature otherwise.
    pub fn value(&self) -> f64 {
        if self.closed_form_reliable {
            self.closed_form
        } else {
            self.quadrature
        }
    }

    pub fn relative_deviation(&self) -> f64 {
        (self.closed_form - self.quadrature).abs() / self.quadrature
    }
}

/// `int |u|^2 n d^3r` for a diverging Gaussian beam with unit peak intensity
/// at the waist, integrated numerically over `z` and the radius.
fn overlap_quadrature(n0: f64, cloud: &CloudGeometry, beam: &BeamAndLasers) -> f64 {
    let zr = beam.rayleigh_range();
    let (zs, zw) = quad::composite(-10.0 * cloud.sigma_z, 10.0 * cloud.sigma_z, 64, 16);
    let mut total = 0.0;
    for (z, wz) in zs.iter().zip(&zw) {
        let w2 = beam.w0 * beam.w0 * (1.0 + (z / zr).powi(2));
        // radial extent of the narrower of the two Gaussians
        let r_max = 10.0 * cloud.sigma_r.min(0.5 * w2.sqrt());
        let (rs, rw) = quad::composite(0.0, r_max, 32, 16);
        let mut radial = 0.0;
        for (r, wr) in rs.iter().zip(&rw) {
            let mode = beam.w0 * beam.w0 / w2 * (-2.0 * r * r / w2).exp();
            let dens = (-r * r / (2.0 * cloud.sigma_r * cloud.sigma_r)).exp();
            radial += wr * 2.0 * PI * r * mode * dens;
        }
        total += wz * radial * (-z * z / (2.0 * cloud.sigma_z * cloud.sigma_z)).exp();
    }
    n0 * total
}

pub fn mean_atom_number(cloud: &CloudGeometry, beam: &BeamAndLasers) -> Result<AtomNumber> {
    beam.validate()?;
    let n0 = cloud.peak_density()?;
    let closed_form = (2.0 * PI).sqrt() * cloud.sigma_z * beam.mode_area() * n0;
    let quadrature = overlap_quadrature(n0, cloud, beam);
    let closed_form_reliable = beam.w0 < cloud.sigma_r && beam.wavelength <= beam.w0 / 5.0;
    Ok(AtomNumber { closed_form, quadrature, closed_form_reliable })
}

/// Collective coupling and forward decay rate, `(g_col, kappa_fwd)`.
pub fn collective_coupling(n_bar: f64, beam: &BeamAndLasers) -> Result<(f64, f64)> {
    beam.validate()?;
    if !(n_bar > 0.0) || !n_bar.is_finite() {
        return Err(Error::InvalidInput(format!("atom number must be positive, got {n_bar}")));
    }
    let g2 = 3.0 * n_bar * beam.gamma_e * beam.wavelength.powi(2) / (2.0 * PI * beam.mode_area());
    Ok((g2.sqrt(), g2 / 4.0))
}

/// Two-photon effective forward decay and Raman loss, `(kappa_eff, gamma_raman)`.
pub fn effective_two_photon(kappa_fwd: f64, beam: &BeamAndLasers) -> Result<(f64, f64)> {
    let f = beam.elimination_factor()?;
    Ok((kappa_fwd * f, beam.gamma_e * f))
}

/// Forward emission cone half-angle and `log10` of the backscatter suppression.
pub fn directionality(cloud: &CloudGeometry, beam: &BeamAndLasers) -> Result<(f64, f64)> {
    let s = beam.wavelength / (PI * beam.w0);
    if !(s <= 1.0) {
        return Err(Error::Geometry(format!("lambda / (pi w0) = {s} exceeds one")));
    }
    let ln_supp = -8.0 * PI * PI * cloud.sigma_z.powi(2) / beam.wavelength.powi(2);
    Ok((s.asin(), ln_supp / LN_10))
}

/// Probability of emitting into the forward mode.
pub fn beta_factor(kappa: f64, gamma: f64) -> Result<f64> {
    if kappa < 0.0 || gamma < 0.0 || !kappa.is_finite() || !gamma.is_finite() {
        return Err(Error::InvalidInput("rates must be finite and non-negative".into()));
    }
    if kappa + gamma == 0.0 {
        return Err(Error::Undefined("beta factor with both rates zero".into()));
    }
    Ok(kappa / (kappa + gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockadeCheck {
    pub passed: bool,
    /// `r_b - 2 sigma_z`.
    pub longitudinal_margin: f64,
    /// `r_b - 2 w0`.
    pub transverse_margin: f64,
}

pub fn blockade_check(cloud: &CloudGeometry, beam: &BeamAndLasers) -> BlockadeCheck {
    let longitudinal_margin = beam.r_blockade - 2.0 * cloud.sigma_z;
    let transverse_margin = beam.r_blockade - 2.0 * beam.w0;
    BlockadeCheck { passed: longitudinal_margin > 0.0 && transverse_margin > 0.0, longitudinal_margin, transverse_margin }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoupling {
    pub n0: f64,
    pub mode_area: f64,
    /// Atom number used downstream.
    pub n_bar: f64,
    pub n_bar_closed_form: f64,
    pub n_bar_quadrature: f64,
    pub n_bar_closed_form_reliable: bool,
    pub kappa_fwd: f64,
    pub g_col: f64,
    pub kappa_eff: f64,
    pub gamma_raman: f64,
    /// `kappa_eff / (kappa_eff + gamma_raman)`.
    pub beta: f64,
    pub theta_max: f64,
    pub log10_backscatter_suppression: f64,
    pub blockade: BlockadeCheck,
    pub warnings: Vec<String>,
}

/// Full chain from geometry and lasers to the effective two-photon rates.
pub fn derive_coupling(cloud: &CloudGeometry, beam: &BeamAndLasers) -> Result<DerivedCoupling> {
    let n0 = cloud.peak_density()?;
    let atoms = mean_atom_number(cloud, beam)?;
    let n_bar = atoms.value();
    let (g_col, kappa_fwd) = collective_coupling(n_bar, beam)?;
    let (kappa_eff, gamma_raman) = effective_two_photon(kappa_fwd, beam)?;
    let (theta_max, log10_backscatter_suppression) = directionality(cloud, beam)?;
    let mut warnings = Vec::new();
    if beam.wavelength > beam.w0 / 5.0 {
        warnings.push(format!("wavelength {} um is not small against w0 = {} um", beam.wavelength, beam.w0));
    }
    if !atoms.closed_form_reliable {
        warnings.push("beam not thin against the cloud: atom number taken from quadrature".into());
    }
    let blockade = blockade_check(cloud, beam);
    if !blockade.passed {
        warnings.push("cloud or beam larger than the blockade radius".into());
    }
    Ok(DerivedCoupling {
        n0,
        mode_area: beam.mode_area(),
        n_bar,
        n_bar_closed_form: atoms.closed_form,
        n_bar_quadrature: atoms.quadrature,
        n_bar_closed_form_reliable: atoms.closed_form_reliable,
        kappa_fwd,
        g_col,
        kappa_eff,
        gamma_raman,
        beta: beta_factor(kappa_eff, gamma_raman)?,
        theta_max,
        log10_backscatter_suppression,
        blockade,
        warnings,
    })
}

/// Cloud of the experiment: 25000 atoms, sigma_z = 6 um, sigma_r = 10 um.
pub fn reference_cloud() -> CloudGeometry {
    CloudGeometry::from_total_atoms(25000.0, 6.0, 10.0)
}

/// Probe and control settings of the experiment on the Rb D2 line.
pub fn reference_beam() -> BeamAndLasers {
    BeamAndLasers {
        w0: 6.5,
        wavelength: 0.78,
        gamma_e: 38.11,
        omega_c: 2.0 * PI * 10.0,
        delta: 2.0 * PI * 100.0,
        r_blockade: 25.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_chain() {
        let d = derive_coupling(&reference_cloud(), &reference_beam()).unwrap();
        assert!((d.n0 - 2.6456).abs() < 1e-3, "{}", d.n0);
        assert!((d.n_bar - 2640.7).abs() < 0.5, "{}", d.n_bar);
        assert!((d.kappa_fwd - d.g_col * d.g_col / 4.0).abs() < 1e-12 * d.kappa_fwd);
        assert!((d.kappa_eff - d.kappa_fwd / 400.0).abs() < 1e-12 * d.kappa_eff);
        assert!((d.kappa_eff / 0.27 - 1.0).abs() < 0.1, "{}", d.kappa_eff);
        assert!((d.gamma_raman - 38.11 / 400.0).abs() < 1e-12);
        assert!((d.theta_max - 0.0382).abs() < 1e-4);
        assert!((d.log10_backscatter_suppression + 2029.0).abs() < 1.0);
        assert!(d.blockade.passed);
    }

    #[test]
    fn quadrature_reduces_to_transverse_overlap() {
        // negligible divergence: ratio 1 / (1 + w0^2 / 4 sigma_r^2)
        let beam = BeamAndLasers { wavelength: 1e-4, ..reference_beam() };
        let cloud = reference_cloud();
        let a = mean_atom_number(&cloud, &beam).unwrap();
        let expect = a.closed_form / (1.0 + beam.w0.powi(2) / (4.0 * cloud.sigma_r.powi(2)));
        assert!((a.quadrature / expect - 1.0).abs() < 1e-9, "{} vs {}", a.quadrature, expect);
    }

    #[test]
    fn consistency_of_density_inputs() {
        let c = reference_cloud();
        let n0 = c.peak_density().unwrap();
        let both = CloudGeometry { n0: Some(n0), ..c };
        assert!(both.peak_density().is_ok());
        let clash = CloudGeometry { n0: Some(n0 * 1.01), ..c };
        assert!(clash.peak_density().is_err());
    }

    #[test]
    fn blockade_thresholds() {
        let beam = reference_beam();
        assert!(!blockade_check(&CloudGeometry { sigma_z: 20.0, ..reference_cloud() }, &beam).passed);
        let huge = BeamAndLasers { r_blockade: f64::INFINITY, ..beam };
        assert!(blockade_check(&reference_cloud(), &huge).passed);
    }

    #[test]
    fn beta_edges() {
        assert!((beta_factor(0.428, 0.069).unwrap() - 0.8612).abs() < 1e-4);
        assert_eq!(beta_factor(0.3, 0.0).unwrap(), 1.0);
        assert_eq!(beta_factor(0.0, 0.3).unwrap(), 0.0);
        assert!(matches!(beta_factor(0.0, 0.0), Err(Error::Undefined(_))));
    }

    #[test]
    fn resonant_intermediate_state_is_rejected() {
        let beam = BeamAndLasers { delta: 0.0, ..reference_beam() };
        assert!(effective_two_photon(100.0, &beam).is_err());
    }

    #[test]
    fn non_paraxial_beam_is_rejected() {
        let beam = BeamAndLasers { w0: 0.2, ..reference_beam() };
        assert!(matches!(directionality(&reference_cloud(), &beam), Err(Error::Geometry(_))));
    }
}
