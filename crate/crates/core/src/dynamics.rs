//! Driven master equation for the superatom and the single-time observables
//! derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Stats, Tolerances};
use crate::params::SuperatomParams;
use crate::pulse::Drive;
use crate::quad;
use crate::state::{min_eigenvalue, trace, DensityMatrix, Mat3, C64, D, G, W};

/// Adds `rate * L[|a><b|] rho` to `out`.
#[inline]
fn add_dissipator(out: &mut Mat3, rho: &Mat3, a: usize, b: usize, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let half = 0.5 * rate;
    out[(a, a)] += rho[(b, b)] * rate;
    for j in 0..3 {
        out[(b, j)] -= rho[(b, j)] * half;
        out[(j, b)] -= rho[(j, b)] * half;
    }
}

/// Right-hand side without input validation. `rho` need not be normalised,
/// which the regression propagation relies on.
pub(crate) fn rhs(rho: &Mat3, alpha: C64, p: &SuperatomParams) -> Mat3 {
    let sk = p.kappa.sqrt();
    let mut h = Mat3::zeros();
    h[(G, W)] = alpha.conj() * sk;
    h[(W, G)] = alpha * sk;
    let comm = h * rho - rho * h;
    let mut out = comm * C64::new(0.0, -1.0);
    add_dissipator(&mut out, rho, G, W, p.kappa + p.gamma);
    add_dissipator(&mut out, rho, D, W, p.gamma_d);
    add_dissipator(&mut out, rho, G, D, p.gamma);
    out
}

/// Time derivative of the density matrix for a fixed drive amplitude.
pub fn lindblad_rhs(rho: &DensityMatrix, alpha: C64, params: &SuperatomParams) -> Result<Mat3> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidInput(format!("drive amplitude {alpha} is not finite")));
    }
    params.validate()?;
    Ok(rhs(rho.matrix(), alpha, params))
}

/// Integrates `rho0` (given at `t0`) forward and samples it on `samples`,
/// restarting the integrator at every drive breakpoint.
pub(crate) fn propagate<Dr: Drive + ?Sized>(
    rho0: Mat3,
    t0: f64,
    samples: &[f64],
    params: &SuperatomParams,
    drive: &Dr,
    tol: Tolerances,
    stats: &mut Stats,
) -> Result<Vec<Mat3>> {
    let mut out = Vec::with_capacity(samples.len());
    let Some(&t_last) = samples.last() else {
        return Ok(out);
    };
    // cuts closer than rounding noise to an endpoint would leave slivers
    let eps = 1e-12 * t_last.abs().max(t0.abs()).max(1.0);
    let mut cuts: Vec<f64> = drive.breakpoints().into_iter().filter(|&b| b > t0 + eps && b < t_last - eps).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(t_last);

    let f = |t: f64, y: &Mat3| rhs(y, drive.amplitude(t), params);
    let mut y = rho0;
    let mut lo = t0;
    let mut idx = 0usize;
    for hi in cuts {
        let end = samples[idx..].partition_point(|&s| s < hi) + idx;
        // the final segment owns its right endpoint
        let end = if hi == t_last { samples.len() } else { end };
        y = ode::integrate(f, lo, hi, y, &samples[idx..end], &mut out, tol, stats)?;
        idx = end;
        lo = hi;
    }
    Ok(out)
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub drive: Vec<C64>,
    pub stats: Stats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Worst deviations from a physical state over all samples.
    pub fn invariant_report(&self) -> InvariantReport {
        let mut r = InvariantReport { max_trace_drift: 0.0, min_eigenvalue: f64::INFINITY, max_hermiticity_defect: 0.0 };
        for s in &self.states {
            let m = s.matrix();
            r.max_trace_drift = r.max_trace_drift.max((trace(m) - 1.0).norm());
            r.min_eigenvalue = r.min_eigenvalue.min(min_eigenvalue(m));
            r.max_hermiticity_defect = r.max_hermiticity_defect.max(crate::state::hermiticity_defect(m));
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub max_trace_drift: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_defect: f64,
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("time grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Solves the master equation from `|G><G|` and samples it on `grid`.
pub fn evolve<Dr: Drive + ?Sized>(params: &SuperatomParams, drive: &Dr, grid: &[f64]) -> Result<Trajectory> {
    evolve_with(params, drive, grid, Tolerances::default())
}

pub fn evolve_with<Dr: Drive + ?Sized>(
    params: &SuperatomParams,
    drive: &Dr,
    grid: &[f64],
    tol: Tolerances,
) -> Result<Trajectory> {
    params.validate()?;
    check_grid(grid)?;
    let t0 = drive.start_time().min(grid[0]);
    let mut stats = Stats::default();
    let raw = propagate(DensityMatrix::ground().into_matrix(), t0, grid, params, drive, tol, &mut stats)?;
    Ok(Trajectory {
        times: grid.to_vec(),
        states: raw.into_iter().map(DensityMatrix::from_raw).collect(),
        drive: grid.iter().map(|&t| drive.amplitude(t)).collect(),
        stats,
    })
}

/// Photon flux leaving the emitter, `<E^dag E>` with `E = alpha - i sqrt(kappa) sigma_GW`.
pub fn output_rate(rho: &Mat3, alpha: C64, kappa: f64) -> f64 {
    let sk = kappa.sqrt();
    let rho_wg = rho[(W, G)];
    let rho_gw = rho[(G, W)];
    let interference = C64::new(0.0, -sk) * (alpha.conj() * rho_wg - alpha * rho_gw);
    alpha.norm_sqr() + kappa * rho[(W, W)].re + interference.re
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableTrace {
    pub times: Vec<f64>,
    pub in_rate: Vec<f64>,
    pub out_rate: Vec<f64>,
    pub delta_rate: Vec<f64>,
    pub rho_ww: Vec<f64>,
    pub rho_dd: Vec<f64>,
    pub rydberg_population: Vec<f64>,
}

pub fn observables(traj: &Trajectory, params: &SuperatomParams) -> ObservableTrace {
    let n = traj.len();
    let mut o = ObservableTrace {
        times: traj.times.clone(),
        in_rate: Vec::with_capacity(n),
        out_rate: Vec::with_capacity(n),
        delta_rate: Vec::with_capacity(n),
        rho_ww: Vec::with_capacity(n),
        rho_dd: Vec::with_capacity(n),
        rydberg_population: Vec::with_capacity(n),
    };
    for (s, a) in traj.states.iter().zip(&traj.drive) {
        let r_in = a.norm_sqr();
        let r_out = output_rate(s.matrix(), *a, params.kappa);
        o.in_rate.push(r_in);
        o.out_rate.push(r_out);
        o.delta_rate.push(r_in - r_out);
        o.rho_ww.push(s.rho_ww());
        o.rho_dd.push(s.rho_dd());
        o.rydberg_population.push(s.rydberg_population());
    }
    o
}

/// Both sides of the photon bookkeeping identity on `[start, t_end]`:
/// `absorbed = stored + lost`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxBalance {
    /// Integral of `R_in - R_out`.
    pub absorbed: f64,
    /// Excitation left in the emitter at `t_end`.
    pub stored: f64,
    /// `Gamma` times the integrated excitation.
    pub lost: f64,
}

impl FluxBalance {
    pub fn relative_defect(&self) -> f64 {
        let scale = self.absorbed.abs().max(self.stored + self.lost).max(f64::MIN_POSITIVE);
        (self.absorbed - self.stored - self.lost).abs() / scale
    }
}

/// Evaluates the flux integrals by Gauss-Legendre quadrature on the dense
/// solution, with panels aligned to the drive breakpoints.
pub fn flux_balance<Dr: Drive + ?Sized>(params: &SuperatomParams, drive: &Dr, t_end: f64) -> Result<FluxBalance> {
    let t0 = drive.start_time();
    if !(t_end > t0) {
        return Err(Error::InvalidInput("flux balance needs t_end after the pulse start".into()));
    }
    let mut edges: Vec<f64> = drive.breakpoints().into_iter().filter(|&b| b > t0 && b < t_end).collect();
    edges.insert(0, t0);
    edges.push(t_end);
    edges.dedup();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in edges.windows(2) {
        let panels = ((w[1] - w[0]) / 0.05).ceil().max(1.0) as usize;
        let (x, wt) = quad::composite(w[0], w[1], panels, 8);
        nodes.extend(x);
        weights.extend(wt);
    }
    nodes.push(t_end);
    let traj = evolve(params, drive, &nodes)?;
    let obs = observables(&traj, params);
    let mut absorbed = 0.0;
    let mut excit = 0.0;
    for (i, w) in weights.iter().enumerate() {
        absorbed += w * obs.delta_rate[i];
        excit += w * obs.rydberg_population[i];
    }
    Ok(FluxBalance {
        absorbed,
        stored: *obs.rydberg_population.last().unwrap(),
        lost: params.gamma * excit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseSpec;
    use crate::state::transition;

    fn measured() -> SuperatomParams {
        SuperatomParams::new(0.428, 0.069, 1.397).unwrap()
    }

    #[test]
    fn ground_state_is_stationary() {
        let d = lindblad_rhs(&DensityMatrix::ground(), C64::new(0.0, 0.0), &measured()).unwrap();
        assert!(d.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn bright_state_decay_channels() {
        let p = SuperatomParams::new(0.5, 0.2, 0.3).unwrap();
        let d = lindblad_rhs(&DensityMatrix::basis(W), C64::new(0.0, 0.0), &p).unwrap();
        assert!((d[(W, W)].re + 1.0).abs() < 1e-15);
        assert!((d[(G, G)].re - 0.7).abs() < 1e-15);
        assert!((d[(D, D)].re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_drive() {
        let r = lindblad_rhs(&DensityMatrix::ground(), C64::new(f64::NAN, 0.0), &measured());
        assert!(r.is_err());
    }

    #[test]
    fn zero_pulse_keeps_ground_state() {
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let traj = evolve(&measured(), &PulseSpec::zero(), &grid).unwrap();
        for s in &traj.states {
            assert!((s.matrix() - transition(G, G)).norm() < 1e-15);
        }
    }

    #[test]
    fn emission_from_bright_state() {
        let rho = transition(W, W);
        assert_eq!(output_rate(&rho, C64::new(0.0, 0.0), 0.37), 0.37);
    }

    #[test]
    fn no_coupling_means_transparent() {
        let p = SuperatomParams::new(0.0, 0.1, 0.4).unwrap();
        let pulse = PulseSpec::tukey(0.8, 5.0, 12.4);
        let grid: Vec<f64> = (0..70).map(|i| i as f64 * 0.1).collect();
        let obs = observables(&evolve(&p, &pulse, &grid).unwrap(), &p);
        for (a, b) in obs.in_rate.iter().zip(&obs.out_rate) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn trajectory_stays_physical() {
        let pulse = PulseSpec::tukey(0.8, 5.0, 12.4);
        let grid: Vec<f64> = (0..=150).map(|i| i as f64 * 0.1).collect();
        let traj = evolve(&measured(), &pulse, &grid).unwrap();
        let r = traj.invariant_report();
        assert!(r.max_trace_drift < 1e-9, "{r:?}");
        assert!(r.min_eigenvalue > -1e-9, "{r:?}");
        // coherences with the dark state never build up from |G>
        for s in &traj.states {
            assert!(s.matrix()[(G, D)].norm() < 1e-14);
            assert!(s.matrix()[(W, D)].norm() < 1e-14);
        }
    }

    #[test]
    fn flux_balance_closes() {
        let pulse = PulseSpec::tukey(0.8, 5.0, 12.4);
        let fb = flux_balance(&measured(), &pulse, 14.0).unwrap();
        assert!(fb.relative_defect() < 1e-6, "{fb:?}");
    }
}
