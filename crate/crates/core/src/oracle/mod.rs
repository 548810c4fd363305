//! Few-photon reference solver: a two-level emitter coupled to a discretised
//! unidirectional continuum, evolved exactly in the sectors with one and two
//! excitations.
//!
//! Modes live on a ring of length `L` (time units, `c = 1`) with momenta
//! `k_m = 2 pi (m - M/2) / L` and coupling `g = sqrt(kappa / L)`. A wave
//! packet with amplitudes `f_m` has the real-space profile
//! `phi(x) = L^{-1/2} sum_m f_m e^{i k_m x}`; light that reached the emitter
//! at time `s` sits at `x = t - s` at time `t`.

pub mod bessel;
pub mod chebyshev;
mod compare;

pub use compare::{compare, extrapolated_agreement, oracle_change, Agreement, Comparison};

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{Drive, PulseShape, PulseSpec};
use crate::quad;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleInput {
    /// One photon whose intensity profile follows the pulse rate.
    Fock1 { envelope: PulseSpec },
    /// Two photons in the same temporal mode.
    Fock2 { envelope: PulseSpec },
    /// Coherent pulse truncated to at most two photons.
    WeakCoherent { pulse: PulseSpec },
}

impl OracleInput {
    fn pulse(&self) -> &PulseSpec {
        match self {
            Self::Fock1 { envelope } | Self::Fock2 { envelope } => envelope,
            Self::WeakCoherent { pulse } => pulse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub kappa: f64,
    pub num_modes: usize,
    /// Ring length in time units.
    pub box_length: f64,
    pub input: OracleInput,
}

/// Poisson weight above which two-photon truncation is no longer trusted.
pub const TRUNCATION_WARNING: f64 = 0.05;

/// Inverse of the shortest time scale in a pulse.
fn pulse_bandwidth(p: &PulseSpec) -> f64 {
    let shortest = match &p.shape {
        PulseShape::Tukey { rise, uptime, .. } => if *rise > 0.0 { *rise } else { *uptime },
        PulseShape::Square { duration, .. } => *duration,
        PulseShape::Sampled { times, .. } => times.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
    };
    1.0 / shortest.max(f64::MIN_POSITIVE)
}

impl OracleConfig {
    pub fn modes(&self) -> Vec<f64> {
        let m = self.num_modes as f64;
        (0..self.num_modes).map(|i| 2.0 * PI * (i as f64 - (m / 2.0).floor()) / self.box_length).collect()
    }

    pub fn coupling(&self) -> f64 {
        (self.kappa / self.box_length).sqrt()
    }

    /// Momentum cutoff `pi M / L`.
    pub fn cutoff(&self) -> f64 {
        PI * self.num_modes as f64 / self.box_length
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidInput("oracle kappa must be finite and non-negative".into()));
        }
        if !(self.box_length > 0.0) || !self.box_length.is_finite() {
            return Err(Error::InvalidInput("oracle box_length must be positive".into()));
        }
        let p = self.input.pulse();
        p.validate()?;
        if p.photon_count() <= 0.0 {
            return Err(Error::InvalidInput("oracle input pulse carries no light".into()));
        }
        if self.num_modes < 64 {
            return Err(Error::Resolution(format!("{} modes, at least 64 required", self.num_modes)));
        }
        if self.kappa > 0.0 && self.kappa * self.box_length < 20.0 {
            return Err(Error::Resolution(format!(
                "kappa * box_length = {} is below 20",
                self.kappa * self.box_length
            )));
        }
        let density = self.num_modes as f64 / self.box_length;
        let need = 10.0 * self.kappa.max(pulse_bandwidth(p));
        if density < need {
            return Err(Error::Resolution(format!("{density} modes per unit time, at least {need} required")));
        }
        let (start, end) = p.support();
        if start < 0.0 || end >= self.box_length {
            return Err(Error::Resolution(format!("pulse support [{start}, {end}] does not fit in [0, {})", self.box_length)));
        }
        Ok(())
    }

    /// Normalised input mode amplitudes and the norm captured before
    /// normalisation.
    pub fn input_modes(&self) -> (Vec<C64>, f64) {
        let p = self.input.pulse();
        let n_ph = p.photon_count();
        let k = self.modes();
        let l = self.box_length;
        let pref = 1.0 / (l * n_ph).sqrt();
        let f: Vec<C64> = match &p.shape {
            PulseShape::Square { duration, rate } => {
                let (t0, t1) = (p.start_time, p.start_time + duration);
                let a0 = rate.sqrt();
                k.iter()
                    .map(|&km| {
                        let integral = if km == 0.0 {
                            C64::new(t1 - t0, 0.0)
                        } else {
                            (C64::new(0.0, km * t1).exp() - C64::new(0.0, km * t0).exp()) / C64::new(0.0, km)
                        };
                        integral * (a0 * pref)
                    })
                    .collect()
            }
            _ => {
                let mut edges = p.breakpoints();
                let (s0, s1) = p.support();
                edges.retain(|&b| b >= s0 && b <= s1);
                let h = 0.5 / self.cutoff();
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for w in edges.windows(2) {
                    let panels = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
                    let (x, wt) = quad::composite(w[0], w[1], panels, 8);
                    nodes.extend(x);
                    weights.extend(wt);
                }
                let amp: Vec<f64> = nodes.iter().map(|&s| p.amplitude_at(s)).collect();
                k.iter()
                    .map(|&km| {
                        let mut acc = C64::new(0.0, 0.0);
                        for ((s, w), a) in nodes.iter().zip(&weights).zip(&amp) {
                            acc += C64::new(0.0, km * s).exp() * (w * a);
                        }
                        acc * pref
                    })
                    .collect()
            }
        };
        let norm: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        let s = norm.sqrt();
        (f.into_iter().map(|z| z / s).collect(), norm)
    }
}

/// Coherent drive reconstructed from the retained modes; this is the field
/// the oracle actually sees, so master-equation comparisons use it.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimitedDrive {
    k: Vec<f64>,
    f: Vec<C64>,
    scale: f64,
}

impl BandLimitedDrive {
    pub fn new(cfg: &OracleConfig) -> Result<Self> {
        cfg.validate()?;
        let (f, _) = cfg.input_modes();
        let n_ph = cfg.input.pulse().photon_count();
        Ok(Self { k: cfg.modes(), f, scale: (n_ph / cfg.box_length).sqrt() })
    }
}

impl Drive for BandLimitedDrive {
    fn amplitude(&self, t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, f) in self.k.iter().zip(&self.f) {
            acc += f * C64::new(0.0, -k * t).exp();
        }
        acc * self.scale
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn start_time(&self) -> f64 {
        0.0
    }
}

/// Transmission amplitude of a single photon detuned by `k` from resonance.
pub fn single_photon_transmission(k: f64, kappa: f64) -> C64 {
    C64::new(k, -0.5 * kappa) / C64::new(k, 0.5 * kappa)
}

/// Amplitudes at `t_end` in the one- and two-excitation sectors.
///
/// Sector one is `[e, phi_0 .. phi_{M-1}]`. Sector two is
/// `[chi_0 .. chi_{M-1}, psi_00 .. psi_{M-1,M-1}]` for
/// `|Psi> = sum chi_m s+ b_m^dag |0> + 2^{-1/2} sum psi_mn b_m^dag b_n^dag |0>`
/// with symmetric `psi`, so the norm is `sum |chi|^2 + sum |psi|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FewPhotonState {
    pub t_end: f64,
    pub box_length: f64,
    pub k: Vec<f64>,
    pub sector1: Option<Vec<C64>>,
    pub sector2: Option<Vec<C64>>,
    /// Renormalised probabilities of 0, 1 and 2 input photons.
    pub weights: [f64; 3],
    /// Fraction of the ideal pulse representable by the retained modes.
    pub captured_norm: f64,
    pub truncation_warning: bool,
}

impl FewPhotonState {
    pub fn sector_norms(&self) -> (Option<f64>, Option<f64>) {
        let n = |v: &Vec<C64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (self.sector1.as_ref().map(n), self.sector2.as_ref().map(n))
    }

    /// Bare emitter amplitude in sector one.
    pub fn emitter_amplitude(&self) -> Option<C64> {
        self.sector1.as_ref().map(|v| v[0])
    }

    /// Photon profile of sector one on the ring, `phi(x)`.
    pub fn photon_profile(&self, x: f64) -> Option<C64> {
        let v = self.sector1.as_ref()?;
        Some(row(&self.k, self.box_length, x).iter().zip(&v[1..]).map(|(e, p)| e * p).sum())
    }
}

/// `e^{i k_m x} / sqrt(L)` for all modes.
fn row(k: &[f64], l: f64, x: f64) -> Vec<C64> {
    let s = 1.0 / l.sqrt();
    k.iter().map(|km| C64::new(0.0, km * x).exp() * s).collect()
}

fn apply_sector1(k: &[f64], g: f64, x: &[C64], y: &mut [C64]) {
    let photons = &x[1..];
    y[0] = photons.iter().sum::<C64>() * g;
    let e = x[0] * g;
    for ((yo, p), km) in y[1..].iter_mut().zip(photons).zip(k) {
        *yo = p * km + e;
    }
}

fn apply_sector2(k: &[f64], g: f64, x: &[C64], y: &mut [C64]) {
    let m = k.len();
    let (chi, psi) = x.split_at(m);
    let (ychi, ypsi) = y.split_at_mut(m);
    let up = g * std::f64::consts::SQRT_2;
    let down = g / std::f64::consts::SQRT_2;
    for (i, yc) in ychi.iter_mut().enumerate() {
        *yc = chi[i] * k[i];
    }
    for a in 0..m {
        let r = &psi[a * m..(a + 1) * m];
        let yr = &mut ypsi[a * m..(a + 1) * m];
        let ca = chi[a];
        let ka = k[a];
        let mut row_sum = C64::new(0.0, 0.0);
        for b in 0..m {
            yr[b] = r[b] * (ka + k[b]) + (ca + chi[b]) * down;
            row_sum += r[b];
        }
        // psi is symmetric, so row sums equal column sums
        ychi[a] += row_sum * up;
    }
}

fn spectral_bounds(k: &[f64], offset_scale: f64, coupling_norm: f64) -> (f64, f64) {
    let kmin = k.iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = (kmin.min(offset_scale * kmin), kmax.max(offset_scale * kmax));
    let pad = 1.01 * coupling_norm + 1e-9;
    (lo - pad, hi + pad)
}

/// Exact evolution of the truncated input from `t = 0` to `t_end`.
pub fn oracle_evolve(cfg: &OracleConfig, t_end: f64) -> Result<FewPhotonState> {
    cfg.validate()?;
    if !(t_end > 0.0) || t_end >= cfg.box_length {
        return Err(Error::Resolution(format!("t_end = {t_end} must lie in (0, box_length = {})", cfg.box_length)));
    }
    let (start, end) = cfg.input.pulse().support();
    if end - start >= cfg.box_length - 0.0 || t_end - start >= cfg.box_length - (end - t_end).max(0.0) {
        return Err(Error::Resolution("outgoing light would wrap around the ring".into()));
    }
    let k = cfg.modes();
    let m = k.len();
    let g = cfg.coupling();
    let (f, captured_norm) = cfg.input_modes();

    let (want1, want2, weights) = match &cfg.input {
        OracleInput::Fock1 { .. } => (true, false, [0.0, 1.0, 0.0]),
        OracleInput::Fock2 { .. } => (false, true, [0.0, 0.0, 1.0]),
        OracleInput::WeakCoherent { pulse } => {
            let n = pulse.photon_count();
            let p = [1.0, n, 0.5 * n * n];
            let s: f64 = p.iter().sum();
            (true, true, [p[0] / s, p[1] / s, p[2] / s])
        }
    };
    let truncation_warning = weights[2] > TRUNCATION_WARNING;

    let sector1 = want1.then(|| {
        let mut psi0 = Vec::with_capacity(m + 1);
        psi0.push(C64::new(0.0, 0.0));
        psi0.extend_from_slice(&f);
        let (lo, hi) = spectral_bounds(&k, 1.0, g * (m as f64).sqrt());
        chebyshev::propagate(|x, y| apply_sector1(&k, g, x, y), &psi0, t_end, lo, hi)
    });
    let sector2 = want2.then(|| {
        let mut psi0 = vec![C64::new(0.0, 0.0); m + m * m];
        for a in 0..m {
            for b in 0..m {
                psi0[m + a * m + b] = f[a] * f[b];
            }
        }
        let (lo, hi) = spectral_bounds(&k, 2.0, g * (2.0 * m as f64).sqrt());
        chebyshev::propagate(|x, y| apply_sector2(&k, g, x, y), &psi0, t_end, lo, hi)
    });

    let state = FewPhotonState {
        t_end,
        box_length: cfg.box_length,
        k,
        sector1,
        sector2,
        weights,
        captured_norm,
        truncation_warning,
    };
    check_wrap(&state, cfg, start, end)?;
    Ok(state)
}

/// Light scattered by the emitter must stay inside `[0, t_end]` on the ring.
fn check_wrap(state: &FewPhotonState, cfg: &OracleConfig, start: f64, end: f64) -> Result<()> {
    let Some(v) = &state.sector1 else { return Ok(()) };
    let m = state.k.len();
    let l = state.box_length;
    let (f, _) = cfg.input_modes();
    let dx = l / m as f64;
    let mut outside = 0.0;
    for j in 0..m {
        let x = j as f64 * dx;
        let e = row(&state.k, l, x);
        let mut scattered = C64::new(0.0, 0.0);
        for (i, ei) in e.iter().enumerate() {
            let free = f[i] * C64::new(0.0, -state.k[i] * state.t_end).exp();
            scattered += ei * (v[1 + i] - free);
        }
        let w = scattered.norm_sqr() * dx;
        let emitted = x <= state.t_end - start;
        let pending = x >= l + state.t_end - end;
        if !emitted && !pending {
            outside += w;
        }
    }
    // the packet has unit norm, so this is a probability
    if outside > 1e-2 {
        return Err(Error::Resolution(format!(
            "{outside:.3e} of the scattered light lies outside the light cone (wrap-around)"
        )));
    }
    Ok(())
}

/// Intensity and unnormalised/normalised second-order correlations read off
/// the final state at emission times `times`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleObservables {
    pub times: Vec<f64>,
    pub intensity: Vec<f64>,
    pub numerator: Vec<Vec<f64>>,
    pub g2: Vec<Vec<f64>>,
    pub valid: Vec<Vec<bool>>,
}

pub fn oracle_observables(state: &FewPhotonState, times: &[f64], floor: f64) -> Result<OracleObservables> {
    let l = state.box_length;
    let m = state.k.len();
    for &s in times {
        if !(s >= 0.0 && s <= state.t_end) {
            return Err(Error::InvalidInput(format!("time {s} outside the evolved window [0, {}]", state.t_end)));
        }
    }
    let rows: Vec<Vec<C64>> = times.iter().map(|s| row(&state.k, l, state.t_end - s)).collect();
    let n = times.len();
    let dot = |e: &[C64], v: &[C64]| -> C64 { e.iter().zip(v).map(|(a, b)| a * b).sum() };

    let i1: Vec<f64> = match &state.sector1 {
        Some(v) => rows.iter().map(|e| dot(e, &v[1..]).norm_sqr()).collect(),
        None => vec![0.0; n],
    };
    let (i2, g2num) = match &state.sector2 {
        Some(v) => {
            let (chi, psi) = v.split_at(m);
            // psi(x_i, n) for every requested point
            let half: Vec<Vec<C64>> = rows
                .iter()
                .map(|e| {
                    let mut out = vec![C64::new(0.0, 0.0); m];
                    for a in 0..m {
                        let ea = e[a];
                        for (o, p) in out.iter_mut().zip(&psi[a * m..(a + 1) * m]) {
                            *o += ea * p;
                        }
                    }
                    out
                })
                .collect();
            let i2: Vec<f64> = rows
                .iter()
                .zip(&half)
                .map(|(e, h)| dot(e, chi).norm_sqr() + 2.0 * h.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .collect();
            let mut num = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    num[i][j] = 2.0 * dot(&rows[j], &half[i]).norm_sqr();
                }
            }
            (i2, num)
        }
        None => (vec![0.0; n], vec![vec![0.0; n]; n]),
    };
    let [_, p1, p2] = state.weights;
    let intensity: Vec<f64> = (0..n).map(|i| p1 * i1[i] + p2 * i2[i]).collect();
    let numerator: Vec<Vec<f64>> = g2num.iter().map(|r| r.iter().map(|v| p2 * v).collect()).collect();
    let mut g2 = vec![vec![f64::NAN; n]; n];
    let mut valid = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let den = intensity[i] * intensity[j];
            if den >= floor && den > 0.0 {
                g2[i][j] = numerator[i][j] / den;
                valid[i][j] = true;
            }
        }
    }
    Ok(OracleObservables { times: times.to_vec(), intensity, numerator, g2, valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector, SymmetricEigen};

    fn fock1(kappa: f64, m: usize, l: f64, pulse: PulseSpec) -> OracleConfig {
        OracleConfig { kappa, num_modes: m, box_length: l, input: OracleInput::Fock1 { envelope: pulse } }
    }

    #[test]
    fn free_propagation_without_coupling() {
        let cfg = fock1(0.0, 256, 20.0, PulseSpec::tukey(1.0, 2.0, 1.0).starting_at(1.0));
        let st = oracle_evolve(&cfg, 6.0).unwrap();
        let (f, _) = cfg.input_modes();
        let v = st.sector1.as_ref().unwrap();
        assert_eq!(v[0].norm(), 0.0);
        for (i, km) in st.k.iter().enumerate() {
            let want = f[i] * C64::new(0.0, -km * 6.0).exp();
            assert!((v[1 + i] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_matches_dense_diagonalisation() {
        let cfg = fock1(1.0, 256, 24.0, PulseSpec::tukey(1.0, 2.0, 1.0).starting_at(1.0));
        let t = 7.5;
        let st = oracle_evolve(&cfg, t).unwrap();
        let k = cfg.modes();
        let g = cfg.coupling();
        let n = k.len() + 1;
        let mut h = DMatrix::<f64>::zeros(n, n);
        for (i, km) in k.iter().enumerate() {
            h[(i + 1, i + 1)] = *km;
            h[(0, i + 1)] = g;
            h[(i + 1, 0)] = g;
        }
        let eig = SymmetricEigen::new(h);
        let (f, _) = cfg.input_modes();
        let mut psi0 = DVector::<C64>::zeros(n);
        for i in 0..k.len() {
            psi0[i + 1] = f[i];
        }
        let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        let mut c = v.transpose() * psi0;
        for (ci, e) in c.iter_mut().zip(eig.eigenvalues.iter()) {
            *ci *= C64::new(0.0, -e * t).exp();
        }
        let dense = v * c;
        let cheb = st.sector1.unwrap();
        let err = cheb.iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "max deviation {err}");
    }

    #[test]
    fn norms_are_conserved() {
        let pulse = PulseSpec::square(2.0, 1e-3 / 2.0).starting_at(1.0);
        let cfg = OracleConfig { kappa: 1.0, num_modes: 256, box_length: 20.0, input: OracleInput::WeakCoherent { pulse } };
        let st = oracle_evolve(&cfg, 8.0).unwrap();
        let (a, b) = st.sector_norms();
        assert!((a.unwrap() - 1.0).abs() < 1e-9);
        assert!((b.unwrap() - 1.0).abs() < 1e-9);
        assert!(!st.truncation_warning);
    }

    #[test]
    fn sectors_do_not_mix() {
        let envelope = PulseSpec::square(2.0, 0.5).starting_at(1.0);
        let cfg = OracleConfig { kappa: 1.0, num_modes: 256, box_length: 20.0, input: OracleInput::Fock1 { envelope } };
        let st = oracle_evolve(&cfg, 8.0).unwrap();
        let (a, b) = st.sector_norms();
        assert!((a.unwrap() - 1.0).abs() < 1e-9);
        assert!(b.is_none());
        assert_eq!(st.weights, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn narrowband_photon_flips_sign() {
        // long smooth envelope: bandwidth far below kappa
        let kappa = 2.0;
        let cfg = fock1(kappa, 1200, 60.0, PulseSpec::tukey(8.0, 4.0, 1.0).starting_at(1.0));
        let t_end = 40.0;
        let st = oracle_evolve(&cfg, t_end).unwrap();
        let (f, _) = cfg.input_modes();
        let v = st.sector1.as_ref().unwrap();
        let mut worst = 0.0f64;
        for (i, km) in st.k.iter().enumerate() {
            let want = f[i] * single_photon_transmission(*km, kappa) * C64::new(0.0, -km * t_end).exp();
            worst = worst.max((v[1 + i] - want).norm());
        }
        // finite cutoff leaves a residue of order kappa / (pi K)
        assert!(worst < 5e-3, "S-matrix deviation {worst}");
        // the resonant mode comes out with unit magnitude and phase pi
        let i0 = st.k.iter().position(|&k| k == 0.0).unwrap();
        let ratio = v[1 + i0] / f[i0];
        assert!((ratio.norm() - 1.0).abs() < 1e-3, "{ratio}");
        assert!((ratio.arg().abs() - PI).abs() < 2e-3, "{ratio}");
    }

    #[test]
    fn coherent_light_is_uncorrelated_without_coupling() {
        let n_ph = 1e-3;
        let pulse = PulseSpec::tukey(1.0, 3.0, n_ph / 4.0).starting_at(1.0);
        let cfg = OracleConfig { kappa: 0.0, num_modes: 128, box_length: 12.0, input: OracleInput::WeakCoherent { pulse } };
        let st = oracle_evolve(&cfg, 7.0).unwrap();
        let times = [1.5, 2.5, 3.0, 4.5, 5.2];
        let obs = oracle_observables(&st, &times, 0.0).unwrap();
        for i in 0..times.len() {
            for j in 0..times.len() {
                assert!((obs.g2[i][j] - 1.0).abs() < 2e-3, "({i},{j}) {}", obs.g2[i][j]);
            }
        }
    }

    #[test]
    fn resolution_guards() {
        let p = PulseSpec::square(2.0, 0.5).starting_at(1.0);
        assert!(matches!(oracle_evolve(&fock1(1.0, 32, 20.0, p.clone()), 5.0), Err(Error::Resolution(_))));
        assert!(matches!(oracle_evolve(&fock1(1.0, 64, 20.0, p.clone()), 5.0), Err(Error::Resolution(_))));
        assert!(matches!(oracle_evolve(&fock1(1.0, 128, 10.0, p.clone()), 5.0), Err(Error::Resolution(_))));
        assert!(matches!(oracle_evolve(&fock1(1.0, 256, 20.0, p.clone()), 25.0), Err(Error::Resolution(_))));
    }

    #[test]
    fn large_coherent_amplitude_warns() {
        let pulse = PulseSpec::square(2.0, 0.5).starting_at(1.0);
        let cfg = OracleConfig { kappa: 1.0, num_modes: 256, box_length: 20.0, input: OracleInput::WeakCoherent { pulse } };
        assert!(oracle_evolve(&cfg, 5.0).unwrap().truncation_warning);
    }
}
