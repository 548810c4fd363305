//! Closed-form results for the ideal emitter, the visibility phase diagram
//! and Rabi-maximum prediction for the damped model.

use nalgebra::Matrix5;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, rhs};
use crate::error::{Error, Result};
use crate::params::SuperatomParams;
use crate::pulse::{Drive, PulseSpec};
use crate::state::{Mat3, C64, D, G, W};

/// Radicand `4 kappa R - (kappa/4)^2`, arranged so that it is exactly zero at
/// `R = kappa / 64`.
fn radicand(kappa: f64, rate: f64) -> f64 {
    kappa * (4.0 * rate - kappa / 16.0)
}

/// Effective Rabi frequency of the ideal emitter. Purely imaginary when the
/// drive is too weak to overcome the damping.
pub fn omega_eff_ideal(kappa: f64, rate: f64) -> Complex64 {
    let r = radicand(kappa, rate);
    if r >= 0.0 {
        Complex64::new(r.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-r).sqrt())
    }
}

/// `sin(x)/x` and `sinh(x)/x` close to zero.
fn sinc_series(x2: f64, sign: f64) -> f64 {
    1.0 + sign * x2 / 6.0 + x2 * x2 / 120.0
}

/// Bright-state population of the ideal emitter under constant drive
/// amplitude `alpha`, starting from the ground state at `t = 0`.
pub fn rho_ww_ideal(kappa: f64, alpha: f64, t: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() || !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("alpha and t must be finite and non-negative".into()));
    }
    let a2 = alpha * alpha;
    let amp = 4.0 * a2 / (kappa + 8.0 * a2);
    let b = 0.75 * kappa;
    let r = radicand(kappa, a2);
    // transient = (C + b S) e^{-bt}
    let transient = if r > 0.0 {
        let w = r.sqrt();
        let x = w * t;
        let s = if x < 1e-3 { t * sinc_series(x * x, -1.0) } else { x.sin() / w };
        (x.cos() + b * s) * (-b * t).exp()
    } else if r < 0.0 {
        let w = (-r).sqrt();
        let x = w * t;
        if x < 1e-3 {
            let s = t * sinc_series(x * x, 1.0);
            (x.cosh() + b * s) * (-b * t).exp()
        } else {
            let up = ((w - b) * t).exp();
            let down = (-(w + b) * t).exp();
            0.5 * (up + down) + b * 0.5 * (up - down) / w
        }
    } else {
        (1.0 + b * t) * (-b * t).exp()
    };
    Ok(amp * (1.0 - transient))
}

/// Long-time limit of [`rho_ww_ideal`].
pub fn rho_ww_steady_ideal(kappa: f64, rate: f64) -> f64 {
    4.0 * rate / (kappa + 8.0 * rate)
}

/// Visibility `max_{0<=t<=tau} rho_WW - rho_WW(inf)` for decay rate `kappa`,
/// photon rate `rate` and pulse length `tau`, clipped at zero.
pub fn visibility_scaled(kappa: f64, rate: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let w = omega_eff_ideal(kappa, rate);
    // rho' is proportional to sin(Omega t): the first maximum sits at pi/Omega,
    // later ones are lower, and without oscillation rho only rises.
    let t_star = if w.re > 0.0 { (std::f64::consts::PI / w.re).min(tau) } else { tau };
    let peak = rho_ww_ideal(kappa, rate.sqrt(), t_star)?;
    Ok((peak - rho_ww_steady_ideal(kappa, rate)).max(0.0))
}

/// Visibility in the dimensionless variables `lambda = kappa tau`, `nph = R tau`.
pub fn visibility(lambda: f64, nph: f64) -> Result<f64> {
    if !(lambda > 0.0) || !(nph > 0.0) {
        return Err(Error::InvalidInput("lambda and nph must be positive".into()));
    }
    visibility_scaled(lambda, nph, 1.0)
}

/// Time at which the ideal population first reaches its steady-state value,
/// `None` without oscillation.
pub fn first_crossing_time(kappa: f64, rate: f64) -> Option<f64> {
    let w = omega_eff_ideal(kappa, rate);
    (w.re > 0.0).then(|| (std::f64::consts::PI - (4.0 * w.re / (3.0 * kappa)).atan()) / w.re)
}

/// Photon number at which a pulse of length one first drives the population
/// up to its steady state (`lambda = kappa`).
pub fn crossover_nph(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput("lambda must be positive".into()));
    }
    let reaches = |nph: f64| first_crossing_time(lambda, nph).is_some_and(|t| t <= 1.0);
    let mut lo = lambda / 64.0;
    let mut hi = lo.max(1.0);
    while !reaches(hi) {
        lo = hi;
        hi *= 4.0;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramSpec {
    pub lambda_grid: Vec<f64>,
    pub nph_grid: Vec<f64>,
    #[serde(default = "one")]
    pub tau: f64,
}

fn one() -> f64 {
    1.0
}

/// Log-spaced grid with `n` points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl PhaseDiagramSpec {
    pub fn log_spaced(lambda: (f64, f64, usize), nph: (f64, f64, usize)) -> Self {
        Self { lambda_grid: log_grid(lambda.0, lambda.1, lambda.2), nph_grid: log_grid(nph.0, nph.1, nph.2), tau: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("lambda_grid", &self.lambda_grid), ("nph_grid", &self.nph_grid)] {
            if g.is_empty() || g.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidInput(format!("{name} must be positive and strictly increasing")));
            }
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidInput("tau must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityMap {
    pub lambda_grid: Vec<f64>,
    pub nph_grid: Vec<f64>,
    /// `values[i][j]` belongs to `lambda_grid[i]`, `nph_grid[j]`.
    pub values: Vec<Vec<f64>>,
    /// Critical damping, `nph = lambda / 64`, on `lambda_grid`.
    pub overdamped_boundary: Vec<f64>,
    /// Weakest drive that lifts the population to its steady state within the pulse.
    pub crossover: Vec<f64>,
}

pub fn phase_diagram(spec: &PhaseDiagramSpec) -> Result<VisibilityMap> {
    spec.validate()?;
    let tau = spec.tau;
    let row = |lambda: &f64| -> Result<Vec<f64>> {
        spec.nph_grid.iter().map(|nph| visibility_scaled(lambda / tau, nph / tau, tau)).collect()
    };
    #[cfg(feature = "parallel")]
    let values: Result<Vec<Vec<f64>>> = {
        use rayon::prelude::*;
        spec.lambda_grid.par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<Vec<f64>>> = spec.lambda_grid.iter().map(row).collect();
    Ok(VisibilityMap {
        lambda_grid: spec.lambda_grid.clone(),
        nph_grid: spec.nph_grid.clone(),
        values: values?,
        overdamped_boundary: spec.lambda_grid.iter().map(|l| l / 64.0).collect(),
        crossover: spec.lambda_grid.iter().map(|&l| crossover_nph(l)).collect::<Result<_>>()?,
    })
}

/// Real generator of the constant-drive dynamics on the subspace reachable
/// from `|G>`, in the coordinates `(rho_GG, rho_WW, rho_DD, Re rho_GW, Im rho_GW)`.
pub fn bloch_generator(params: &SuperatomParams, alpha: f64) -> Matrix5<f64> {
    let a = C64::new(alpha, 0.0);
    let basis = |k: usize| -> Mat3 {
        let mut m = Mat3::zeros();
        match k {
            0 => m[(G, G)] = C64::new(1.0, 0.0),
            1 => m[(W, W)] = C64::new(1.0, 0.0),
            2 => m[(D, D)] = C64::new(1.0, 0.0),
            3 => {
                m[(G, W)] = C64::new(1.0, 0.0);
                m[(W, G)] = C64::new(1.0, 0.0);
            }
            _ => {
                m[(G, W)] = C64::new(0.0, 1.0);
                m[(W, G)] = C64::new(0.0, -1.0);
            }
        }
        m
    };
    let mut gen = Matrix5::zeros();
    for k in 0..5 {
        let d = rhs(&basis(k), a, params);
        gen[(0, k)] = d[(G, G)].re;
        gen[(1, k)] = d[(W, W)].re;
        gen[(2, k)] = d[(D, D)].re;
        gen[(3, k)] = d[(G, W)].re;
        gen[(4, k)] = d[(G, W)].im;
    }
    gen
}

/// Local maxima of `values` located by three-point quadratic interpolation.
/// Maxima whose topographic prominence is below `min_prominence` are dropped.
pub fn find_peaks(times: &[f64], values: &[f64], min_prominence: f64) -> Vec<f64> {
    let n = values.len();
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if !(b > a && b >= c) {
            continue;
        }
        let mut left = b;
        for k in (0..i).rev() {
            if values[k] > b {
                break;
            }
            left = left.min(values[k]);
        }
        let mut right = b;
        for &v in &values[i + 1..] {
            if v > b {
                break;
            }
            right = right.min(v);
        }
        if b - left.max(right) < min_prominence {
            continue;
        }
        let denom = a - 2.0 * b + c;
        let shift = if denom != 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
        let h = if shift >= 0.0 { times[i + 1] - times[i] } else { times[i] - times[i - 1] };
        peaks.push(times[i] + shift * h);
    }
    peaks
}

pub const PEAK_PROMINENCE: f64 = 1e-6;

/// Maxima of `rho_WW` on the evolved trajectory for an arbitrary drive.
pub fn trajectory_maxima<Dr: Drive + ?Sized>(params: &SuperatomParams, drive: &Dr, grid: &[f64]) -> Result<Vec<f64>> {
    let traj = evolve(params, drive, grid)?;
    let ww: Vec<f64> = traj.states.iter().map(|s| s.rho_ww()).collect();
    Ok(find_peaks(grid, &ww, PEAK_PROMINENCE))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiMaxima {
    /// Dominant oscillatory eigenvalue of the constant-drive generator.
    pub eigenvalue: Complex64,
    /// Oscillation frequency `|Im eigenvalue|`, 1/us.
    pub omega_eff: f64,
    pub overdamped: bool,
    /// Maxima found on the integrated trajectory, us.
    pub maxima: Vec<f64>,
    /// Maxima predicted from the matrix exponential of the generator, us.
    pub predicted: Vec<f64>,
    /// Output grid step of the trajectory, us.
    pub grid_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiWindow {
    pub t_end: f64,
    pub dt: f64,
}

/// Effective Rabi frequency and maxima for constant drive at `rate`,
/// switched on at `t = 0`.
pub fn rabi_maxima(params: &SuperatomParams, rate: f64) -> Result<RabiMaxima> {
    rabi_maxima_in(params, rate, None)
}

pub fn rabi_maxima_in(params: &SuperatomParams, rate: f64, window: Option<RabiWindow>) -> Result<RabiMaxima> {
    params.validate()?;
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidInput(format!("rate must be positive, got {rate}")));
    }
    let gen = bloch_generator(params, rate.sqrt());
    let eig = gen.complex_eigenvalues();
    let scale = gen.abs().max().max(f64::MIN_POSITIVE);
    let dominant = eig
        .iter()
        .copied()
        .max_by(|a, b| a.im.abs().total_cmp(&b.im.abs()).then(b.im.total_cmp(&a.im)))
        .unwrap();
    let overdamped = dominant.im.abs() <= 1e-9 * scale;
    let omega = if overdamped { 0.0 } else { dominant.im.abs() };
    let eigenvalue = Complex64::new(dominant.re, dominant.im.abs());
    if overdamped {
        return Ok(RabiMaxima { eigenvalue, omega_eff: 0.0, overdamped, maxima: vec![], predicted: vec![], grid_step: 0.0 });
    }
    let window = window.unwrap_or_else(|| {
        let period = 2.0 * std::f64::consts::PI / omega;
        let decay = if dominant.re < 0.0 { 8.0 / -dominant.re } else { f64::INFINITY };
        RabiWindow { t_end: (8.0 * period).min(decay).max(2.0 * period), dt: period / 200.0 }
    });
    let n = (window.t_end / window.dt).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * window.dt).collect();
    let pulse = PulseSpec::square(2.0 * window.t_end + 1.0, rate);
    let maxima = trajectory_maxima(params, &pulse, &grid)?;
    let predicted = spectral_maxima(&gen, window.t_end, window.dt.min(0.25 * std::f64::consts::PI / omega));
    Ok(RabiMaxima { eigenvalue, omega_eff: omega, overdamped, maxima, predicted, grid_step: window.dt })
}

/// Roots of `d rho_WW / dt` (sign change + to -) for `x(t) = exp(M t) x0`,
/// bracketed on a coarse grid and refined by bisection.
fn spectral_maxima(gen: &Matrix5<f64>, t_end: f64, coarse: f64) -> Vec<f64> {
    let x0 = nalgebra::Vector5::new(1.0, 0.0, 0.0, 0.0, 0.0);
    let slope = |t: f64| -> f64 { (gen * (gen * t).exp() * x0)[1] };
    let value = |t: f64| -> f64 { ((gen * t).exp() * x0)[1] };
    let n = (t_end / coarse).ceil() as usize;
    let mut out = Vec::new();
    let mut prev_t = 0.0;
    let mut prev = slope(0.0);
    for k in 1..=n {
        let t = (k as f64 * coarse).min(t_end);
        let cur = slope(t);
        if prev > 0.0 && cur <= 0.0 {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-13 * t_end.max(1.0) {
                    break;
                }
            }
            let tm = 0.5 * (lo + hi);
            // same prominence rule as the sampled search, against the start value
            if value(tm) - value(prev_t.min(tm)).min(value(0.0)) >= PEAK_PROMINENCE || out.is_empty() {
                out.push(tm);
            }
        }
        prev_t = t;
        prev = cur;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_damping_is_exact() {
        for kappa in [0.01, 0.375, 2.2, 7.0, 123.456] {
            assert_eq!(omega_eff_ideal(kappa, kappa / 64.0), Complex64::new(0.0, 0.0));
        }
        let w = omega_eff_ideal(0.8, 0.0);
        assert_eq!(w.re, 0.0);
        assert!((w.im - 0.2).abs() < 1e-15);
        assert!((omega_eff_ideal(0.375, 12.4).re - 4.311752652634425).abs() < 1e-12);
    }

    #[test]
    fn ideal_solution_limits() {
        assert_eq!(rho_ww_ideal(0.4, 3.0, 0.0).unwrap(), 0.0);
        let ss = rho_ww_ideal(0.4, 3.0, 400.0).unwrap();
        assert!((ss - 4.0 * 9.0 / (0.4 + 72.0)).abs() < 1e-12);
        assert!(rho_ww_ideal(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn continuous_across_critical_damping() {
        let kappa = 1.3;
        let rc = kappa / 64.0;
        for t in [0.1, 1.0, 3.0, 10.0] {
            let at = rho_ww_ideal(kappa, rc.sqrt(), t).unwrap();
            let below = rho_ww_ideal(kappa, (rc * (1.0 - 1e-10)).sqrt(), t).unwrap();
            let above = rho_ww_ideal(kappa, (rc * (1.0 + 1e-10)).sqrt(), t).unwrap();
            assert!((at - below).abs() < 1e-8 && (at - above).abs() < 1e-8, "t={t}");
        }
    }

    fn sampled_visibility(lambda: f64, nph: f64) -> f64 {
        let n = 20000;
        let peak = (0..=n)
            .map(|i| rho_ww_ideal(lambda, nph.sqrt(), i as f64 / n as f64).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        (peak - rho_ww_steady_ideal(lambda, nph)).max(0.0)
    }

    #[test]
    fn visibility_closed_form_matches_sampling() {
        for (l, n) in [(2.2, 71.6), (2.2, 15.1), (2.2, 9.0), (0.3, 40.0), (10.0, 300.0), (5.0, 0.01)] {
            let a = visibility(l, n).unwrap();
            let b = sampled_visibility(l, n);
            assert!((a - b).abs() < 1e-6, "({l},{n}): {a} vs {b}");
        }
        assert!(visibility(2.2, 71.6).unwrap() > 0.3);
        assert!(visibility(4.0, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn crossover_separates_zero_visibility() {
        for l in [0.1, 1.0, 2.2, 20.0] {
            let c = crossover_nph(l).unwrap();
            assert!(c > l / 64.0);
            assert_eq!(visibility(l, c * 0.999).unwrap(), 0.0);
            assert!(visibility(l, c * 1.01).unwrap() > 0.0);
        }
    }

    #[test]
    fn peaks_by_quadratic_interpolation() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let v: Vec<f64> = t.iter().map(|x| (x - 3.01f64).powi(2) * -1.0).collect();
        let p = find_peaks(&t, &v, 1e-6);
        assert_eq!(p.len(), 1);
        assert!((p[0] - 3.01).abs() < 1e-12);
    }

    #[test]
    fn generator_matches_ideal_frequency() {
        let p = SuperatomParams::ideal(0.375).unwrap();
        let r = rabi_maxima(&p, 12.4).unwrap();
        assert!((r.omega_eff - omega_eff_ideal(0.375, 12.4).re).abs() < 1e-10);
        assert!(!r.overdamped);
    }

    #[test]
    fn weak_drive_is_overdamped() {
        let p = SuperatomParams::ideal(1.0).unwrap();
        let r = rabi_maxima(&p, 0.5 / 64.0).unwrap();
        assert!(r.overdamped);
        assert!(r.maxima.is_empty());
    }

    #[test]
    fn sampled_and_spectral_maxima_coincide() {
        let p = SuperatomParams::new(0.322, 0.069, 1.326).unwrap();
        let r = rabi_maxima(&p, 12.4).unwrap();
        assert!(!r.maxima.is_empty());
        assert_eq!(r.maxima.len(), r.predicted.len(), "{r:?}");
        for (a, b) in r.maxima.iter().zip(&r.predicted) {
            assert!((a - b).abs() <= 0.5 * r.grid_step, "{a} vs {b} (step {})", r.grid_step);
        }
    }
}
