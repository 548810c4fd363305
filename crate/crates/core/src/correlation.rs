//! Two-time intensity correlations of the transmitted field via the quantum
//! regression theorem.

use serde::{Deserialize, Serialize};

use crate::dynamics::{check_grid, evolve_with, output_rate, propagate};
use crate::error::Result;
use crate::ode::{Stats, Tolerances};
use crate::params::SuperatomParams;
use crate::pulse::Drive;
use crate::state::{trace, DensityMatrix, Mat3, C64, G, W};

/// Entries whose intensity product falls below this are masked.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// Output field operator `E = alpha I - i sqrt(kappa) sigma_GW`.
pub fn field_operator(alpha: C64, kappa: f64) -> Mat3 {
    let mut e = Mat3::identity() * alpha;
    e[(G, W)] = C64::new(0.0, -kappa.sqrt());
    e
}

fn conditional_raw(rho: &Mat3, alpha: C64, kappa: f64) -> Mat3 {
    let e = field_operator(alpha, kappa);
    e * rho * e.adjoint()
}

/// State conditioned on one detected photon, `E rho E^dag`, left
/// un-normalised: its trace is the photon flux.
pub fn conditional_state(rho: &DensityMatrix, alpha: C64, kappa: f64) -> Mat3 {
    conditional_raw(rho.matrix(), alpha, kappa)
}

/// `tr(E^dag E X)` for an arbitrary (possibly unnormalised) operator `X`.
fn intensity_of(x: &Mat3, alpha: C64, kappa: f64) -> f64 {
    let e = field_operator(alpha, kappa);
    trace(&(e.adjoint() * e * x)).re
}

/// Zero-delay correlation at one instant; `None` when the flux vanishes.
pub fn equal_time_g2(rho: &DensityMatrix, alpha: C64, kappa: f64, floor: f64) -> Option<f64> {
    let l1 = conditional_raw(rho.matrix(), alpha, kappa);
    let i1 = trace(&l1).re;
    if i1 * i1 < floor {
        return None;
    }
    let l2 = conditional_raw(&l1, alpha, kappa);
    Some(trace(&l2).re / (i1 * i1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationGrid {
    pub times: Vec<f64>,
    /// Normalised correlation, `NaN` where masked.
    pub g2: Vec<Vec<f64>>,
    /// Unnormalised second-order correlation `G2(s_i, s_j)`.
    pub numerator: Vec<Vec<f64>>,
    pub intensity: Vec<f64>,
    pub valid: Vec<Vec<bool>>,
    pub floor: f64,
    /// Number of conditional forward propagations performed.
    pub propagations: usize,
}

impl CorrelationGrid {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.valid[i][j].then(|| self.g2[i][j])
    }
}

pub fn g2_matrix<Dr: Drive + ?Sized>(params: &SuperatomParams, drive: &Dr, times: &[f64]) -> Result<CorrelationGrid> {
    g2_matrix_with(params, drive, times, DEFAULT_FLOOR, Tolerances::default())
}

/// Row `i` of the upper triangle: `G2(s_i, s_j)` for `j >= i`.
fn numerator_row<Dr: Drive + ?Sized>(
    params: &SuperatomParams,
    drive: &Dr,
    times: &[f64],
    rho: &Mat3,
    alphas: &[C64],
    i: usize,
    tol: Tolerances,
) -> Result<Vec<f64>> {
    let kappa = params.kappa;
    let lambda = conditional_raw(rho, alphas[i], kappa);
    let norm = trace(&lambda).re;
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let start = lambda / C64::new(scale, 0.0);
    let mut stats = Stats::default();
    let later = propagate(start, times[i], &times[i..], params, drive, tol, &mut stats)?;
    Ok(later
        .iter()
        .zip(&alphas[i..])
        .map(|(l, a)| scale * intensity_of(l, *a, kappa))
        .collect())
}

pub fn g2_matrix_with<Dr: Drive + ?Sized>(
    params: &SuperatomParams,
    drive: &Dr,
    times: &[f64],
    floor: f64,
    tol: Tolerances,
) -> Result<CorrelationGrid> {
    check_grid(times)?;
    let traj = evolve_with(params, drive, times, tol)?;
    let n = times.len();
    let intensity: Vec<f64> = traj
        .states
        .iter()
        .zip(&traj.drive)
        .map(|(s, a)| output_rate(s.matrix(), *a, params.kappa))
        .collect();
    let rhos: Vec<Mat3> = traj.states.iter().map(|s| s.into_matrix()).collect();
    let alphas = &traj.drive;

    let row = |i: usize| numerator_row(params, drive, times, &rhos[i], alphas, i, tol);
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<Vec<f64>>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<Vec<f64>>> = (0..n).map(row).collect();

    let mut numerator = vec![vec![0.0; n]; n];
    for (i, r) in rows.into_iter().enumerate() {
        for (k, v) in r?.into_iter().enumerate() {
            numerator[i][i + k] = v;
            numerator[i + k][i] = v;
        }
    }
    let mut g2 = vec![vec![f64::NAN; n]; n];
    let mut valid = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let den = intensity[i] * intensity[j];
            if den >= floor {
                g2[i][j] = numerator[i][j] / den;
                valid[i][j] = true;
            }
        }
    }
    Ok(CorrelationGrid { times: times.to_vec(), g2, numerator, intensity, valid, floor, propagations: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseSpec;
    use crate::state::transition;

    #[test]
    fn no_coupling_scales_state() {
        let rho = DensityMatrix::basis(W);
        let l = conditional_state(&rho, C64::new(1.5, 0.0), 0.0);
        assert!((l - rho.matrix() * C64::new(2.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn emission_branch() {
        let l = conditional_state(&DensityMatrix::basis(W), C64::new(0.0, 0.0), 0.7);
        assert!((l - transition(G, G) * C64::new(0.7, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_emitter_antibunches_without_drive() {
        let g = equal_time_g2(&DensityMatrix::basis(W), C64::new(0.0, 0.0), 1.0, DEFAULT_FLOOR).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn coherent_light_without_coupling() {
        let p = SuperatomParams::new(0.0, 0.05, 0.2).unwrap();
        let pulse = PulseSpec::tukey(0.8, 5.0, 2.6);
        let times: Vec<f64> = (0..12).map(|i| 0.2 + i as f64 * 0.55).collect();
        let g = g2_matrix(&p, &pulse, &times).unwrap();
        assert_eq!(g.propagations, times.len());
        for i in 0..g.len() {
            for j in 0..g.len() {
                if let Some(v) = g.get(i, j) {
                    assert!((v - 1.0).abs() < 1e-12, "({i},{j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn masked_after_the_pulse() {
        let p = SuperatomParams::new(0.428, 0.069, 1.397).unwrap();
        let pulse = PulseSpec::square(1.0, 5.0);
        let times = [0.5, 80.0];
        let g = g2_matrix(&p, &pulse, &times).unwrap();
        assert!(g.get(0, 0).is_some());
        assert!(g.get(1, 1).is_none());
        assert!(g.g2[1][1].is_nan());
    }
}
