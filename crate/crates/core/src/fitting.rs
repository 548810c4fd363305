//! Weighted least-squares estimation of the superatom rates from time traces.

use nalgebra::{Cholesky, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, observables};
use crate::error::{Error, Result};
use crate::params::SuperatomParams;
use crate::pulse::PulseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    /// Transmitted photon rate, 1/us.
    PhotonRate,
    /// Rydberg excitation number.
    RydbergPopulation,
    /// Absorbed rate `R_in - R_out`, 1/us.
    RateDifference,
}

impl TraceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PhotonRate => "photon_rate",
            Self::RydbergPopulation => "rydberg_population",
            Self::RateDifference => "rate_difference",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "photon_rate" => Some(Self::PhotonRate),
            "rydberg_population" => Some(Self::RydbergPopulation),
            "rate_difference" => Some(Self::RateDifference),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceData {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub sem: Vec<f64>,
    pub kind: TraceKind,
    pub pulse: PulseSpec,
}

impl TraceData {
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if n == 0 || self.values.len() != n || self.sem.len() != n {
            return Err(Error::InvalidInput("trace columns must be non-empty and of equal length".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("trace times must be strictly increasing".into()));
        }
        if let Some(i) = self.sem.iter().position(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidInput(format!("trace sem at row {i} must be positive")));
        }
        if self.values.iter().chain(&self.times).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("trace contains non-finite values".into()));
        }
        self.pulse.validate()
    }
}

/// Fixed detector efficiencies applied to the model before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionScale {
    #[serde(default = "unit")]
    pub photon: f64,
    #[serde(default = "unit")]
    pub population: f64,
}

fn unit() -> f64 {
    1.0
}

impl Default for DetectionScale {
    fn default() -> Self {
        Self { photon: 1.0, population: 1.0 }
    }
}

impl DetectionScale {
    fn factor(&self, kind: TraceKind) -> f64 {
        match kind {
            TraceKind::PhotonRate | TraceKind::RateDifference => self.photon,
            TraceKind::RydbergPopulation => self.population,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamSetting {
    Free { lo: f64, hi: f64 },
    Fixed { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    pub starts: usize,
    pub max_evaluations: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { starts: 5, max_evaluations: 3000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub traces: Vec<TraceData>,
    /// Settings for `kappa`, `gamma`, `gamma_d` in that order.
    pub settings: [ParamSetting; 3],
    pub detection_scale: DetectionScale,
    pub options: FitOptions,
}

pub const PARAM_NAMES: [&str; 3] = ["kappa", "gamma", "gamma_d"];

fn assemble(settings: &[ParamSetting; 3], free: &[f64]) -> [f64; 3] {
    let mut it = free.iter();
    let mut out = [0.0; 3];
    for (o, s) in out.iter_mut().zip(settings) {
        *o = match s {
            ParamSetting::Free { .. } => *it.next().unwrap(),
            ParamSetting::Fixed { value } => *value,
        };
    }
    out
}

impl FitProblem {
    pub fn free_indices(&self) -> Vec<usize> {
        (0..3).filter(|&i| matches!(self.settings[i], ParamSetting::Free { .. })).collect()
    }

    fn log_bounds(&self) -> Vec<(f64, f64)> {
        self.settings
            .iter()
            .filter_map(|s| match s {
                ParamSetting::Free { lo, hi } => Some((lo.ln(), hi.ln())),
                ParamSetting::Fixed { .. } => None,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.traces.is_empty() {
            return Err(Error::InvalidInput("fit needs at least one trace".into()));
        }
        for t in &self.traces {
            t.validate()?;
        }
        for (name, s) in PARAM_NAMES.iter().zip(&self.settings) {
            match *s {
                ParamSetting::Free { lo, hi } => {
                    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                        return Err(Error::InvalidInput(format!("bounds for {name} must satisfy 0 < lo < hi")));
                    }
                }
                ParamSetting::Fixed { value } => {
                    if !(value >= 0.0) || !value.is_finite() {
                        return Err(Error::InvalidInput(format!("fixed {name} must be finite and non-negative")));
                    }
                }
            }
        }
        let nfree = self.free_indices().len();
        if nfree == 0 {
            return Err(Error::InvalidInput("no free parameters".into()));
        }
        let points: usize = self.traces.iter().map(|t| t.times.len()).sum();
        if points < 10 * nfree {
            return Err(Error::InvalidInput(format!("{points} data points for {nfree} free parameters; need 10 per parameter")));
        }
        if self.options.starts < 5 {
            return Err(Error::InvalidInput("at least 5 starts are required".into()));
        }
        for s in [self.detection_scale.photon, self.detection_scale.population] {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidInput("detection scales must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Model prediction for every trace; traces sharing a pulse share one solve.
pub fn forward_models(params: &SuperatomParams, traces: &[TraceData], scale: &DetectionScale) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new(); traces.len()];
    let mut done = vec![false; traces.len()];
    for i in 0..traces.len() {
        if done[i] {
            continue;
        }
        let group: Vec<usize> = (i..traces.len()).filter(|&j| !done[j] && traces[j].pulse == traces[i].pulse).collect();
        let mut grid: Vec<f64> = group.iter().flat_map(|&j| traces[j].times.iter().copied()).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let obs = observables(&evolve(params, &traces[i].pulse, &grid)?, params);
        for &j in &group {
            let t = &traces[j];
            let series = match t.kind {
                TraceKind::PhotonRate => &obs.out_rate,
                TraceKind::RydbergPopulation => &obs.rydberg_population,
                TraceKind::RateDifference => &obs.delta_rate,
            };
            let f = scale.factor(t.kind);
            out[j] = t
                .times
                .iter()
                .map(|x| {
                    let k = grid.partition_point(|g| g < x);
                    series[k] * f
                })
                .collect();
            done[j] = true;
        }
    }
    Ok(out)
}

/// Prediction for a single trace.
pub fn forward_model(params: &SuperatomParams, trace: &TraceData, scale: &DetectionScale) -> Result<Vec<f64>> {
    Ok(forward_models(params, std::slice::from_ref(trace), scale)?.remove(0))
}

/// Weighted sum of squared residuals.
pub fn chi_square(params: &SuperatomParams, traces: &[TraceData], scale: &DetectionScale) -> Result<f64> {
    let models = forward_models(params, traces, scale)?;
    Ok(traces
        .iter()
        .zip(&models)
        .map(|(t, m)| t.values.iter().zip(m).zip(&t.sem).map(|((v, y), s)| ((v - y) / s).powi(2)).sum::<f64>())
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartReport {
    pub initial: [f64; 3],
    pub initial_chi2: f64,
    pub params: [f64; 3],
    pub chi2: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: SuperatomParams,
    pub chi2: f64,
    pub dof: usize,
    /// Covariance of `(kappa, gamma, gamma_d)` from the curvature of chi2;
    /// rows of fixed parameters are zero.
    pub covariance: [[f64; 3]; 3],
    pub covariance_degenerate: bool,
    /// `(value - model) / sem` per trace.
    pub residuals: Vec<Vec<f64>>,
    pub trace_chi2: Vec<f64>,
    pub converged: bool,
    pub warning: Option<String>,
    pub starts: Vec<StartReport>,
    pub best_start: usize,
}

struct Objective<'a> {
    problem: &'a FitProblem,
}

impl Objective<'_> {
    fn params(&self, logx: &[f64]) -> [f64; 3] {
        let free: Vec<f64> = logx.iter().map(|v| v.exp()).collect();
        assemble(&self.problem.settings, &free)
    }

    fn eval(&self, logx: &[f64]) -> f64 {
        let p = self.params(logx);
        let sp = SuperatomParams { kappa: p[0], gamma: p[1], gamma_d: p[2] };
        chi_square(&sp, &self.problem.traces, &self.problem.detection_scale).unwrap_or(f64::INFINITY)
    }
}

struct SimplexOutcome {
    x: Vec<f64>,
    f: f64,
    evaluations: usize,
    converged: bool,
}

const REL_SPREAD: f64 = 1e-8;
const DIAMETER: f64 = 1e-6;

/// Nelder-Mead in log-parameter space; vertices are clamped to the bounds.
fn nelder_mead(obj: &Objective, x0: Vec<f64>, bounds: &[(f64, f64)], max_evals: usize) -> SimplexOutcome {
    let n = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
            *v = v.clamp(*lo, *hi);
        }
    };
    let mut evals = 0usize;
    let f = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        obj.eval(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = f(&x0, &mut evals);
    simplex.push((x0.clone(), fx0));
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = 0.1 * (hi - lo).max(1e-3);
        let mut x = x0.clone();
        x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
        clamp(&mut x);
        let fx = f(&x, &mut evals);
        simplex.push((x, fx));
    }
    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread_ok = worst - best <= REL_SPREAD * best.abs() || worst - best <= 1e-14;
        if spread_ok && diameter < DIAMETER {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect();
            clamp(&mut p);
            p
        };
        let xr = along(1.0);
        let fr = f(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = f(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = along(0.5);
                let v = f(&x, &mut evals);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = f(&x, &mut evals);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, fx) in simplex.iter_mut().skip(1) {
                    for (v, b) in x.iter_mut().zip(&x_best) {
                        *v = b + 0.5 * (*v - b);
                    }
                    *fx = f(x, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    SimplexOutcome { x, f: fx, evaluations: evals, converged }
}

/// Covariance `2 H^{-1}` from a central-difference Hessian of chi2 in the
/// natural parameters.
fn covariance(obj: &Objective, best: &[f64; 3], free: &[usize]) -> ([[f64; 3]; 3], bool) {
    let n = free.len();
    let chi = |p: &[f64; 3]| -> f64 {
        let sp = SuperatomParams { kappa: p[0], gamma: p[1], gamma_d: p[2] };
        chi_square(&sp, &obj.problem.traces, &obj.problem.detection_scale).unwrap_or(f64::NAN)
    };
    let h: Vec<f64> = free.iter().map(|&i| 1e-3 * best[i].abs().max(1e-6)).collect();
    let f0 = chi(best);
    let shifted = |d: &[(usize, f64)]| {
        let mut p = *best;
        for &(k, s) in d {
            p[free[k]] += s;
        }
        chi(&p)
    };
    let mut hess = Matrix3::<f64>::identity();
    for a in 0..n {
        let fp = shifted(&[(a, h[a])]);
        let fm = shifted(&[(a, -h[a])]);
        hess[(a, a)] = (fp - 2.0 * f0 + fm) / (h[a] * h[a]);
        for b in 0..a {
            let fpp = shifted(&[(a, h[a]), (b, h[b])]);
            let fpm = shifted(&[(a, h[a]), (b, -h[b])]);
            let fmp = shifted(&[(a, -h[a]), (b, h[b])]);
            let fmm = shifted(&[(a, -h[a]), (b, -h[b])]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[a] * h[b]);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    let sub = hess.view((0, 0), (n, n)).clone_owned();
    let mut cov = [[0.0; 3]; 3];
    let finite = sub.iter().all(|v| v.is_finite());
    match Cholesky::new(sub) {
        Some(ch) if finite => {
            let inv = ch.inverse();
            for a in 0..n {
                for b in 0..n {
                    cov[free[a]][free[b]] = 2.0 * inv[(a, b)];
                }
            }
            (cov, false)
        }
        _ => {
            for row in cov.iter_mut() {
                row.fill(f64::NAN);
            }
            (cov, true)
        }
    }
}

/// Draws the multi-start initial points, log-uniform inside the bounds.
pub fn start_points(problem: &FitProblem) -> Vec<Vec<f64>> {
    let bounds = problem.log_bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.options.seed);
    (0..problem.options.starts)
        .map(|_| bounds.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect())
        .collect()
}

pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let obj = Objective { problem };
    let bounds = problem.log_bounds();
    let starts = start_points(problem);
    let run = |x0: &Vec<f64>| -> (f64, SimplexOutcome) {
        let f0 = obj.eval(x0);
        (f0, nelder_mead(&obj, x0.clone(), &bounds, problem.options.max_evaluations))
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<(f64, SimplexOutcome)> = {
        use rayon::prelude::*;
        starts.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<(f64, SimplexOutcome)> = starts.iter().map(run).collect();

    let mut best_start = 0;
    for (i, (_, o)) in outcomes.iter().enumerate() {
        if o.f < outcomes[best_start].1.f {
            best_start = i;
        }
    }
    let reports: Vec<StartReport> = starts
        .iter()
        .zip(&outcomes)
        .map(|(x0, (f0, o))| StartReport {
            initial: obj.params(x0),
            initial_chi2: *f0,
            params: obj.params(&o.x),
            chi2: o.f,
            evaluations: o.evaluations,
            converged: o.converged,
        })
        .collect();
    let best = &outcomes[best_start].1;
    if !best.f.is_finite() {
        return Err(Error::Undefined("objective is not finite at any start".into()));
    }
    let p = obj.params(&best.x);
    let params = SuperatomParams::new(p[0], p[1], p[2])?;
    let models = forward_models(&params, &problem.traces, &problem.detection_scale)?;
    let residuals: Vec<Vec<f64>> = problem
        .traces
        .iter()
        .zip(&models)
        .map(|(t, m)| t.values.iter().zip(m).zip(&t.sem).map(|((v, y), s)| (v - y) / s).collect())
        .collect();
    let trace_chi2: Vec<f64> = residuals.iter().map(|r| r.iter().map(|x| x * x).sum()).collect();
    let free = problem.free_indices();
    let (cov, degenerate) = covariance(&obj, &p, &free);
    let points: usize = problem.traces.iter().map(|t| t.times.len()).sum();
    let converged = best.converged;
    Ok(FitResult {
        params,
        chi2: best.f,
        dof: points - free.len(),
        covariance: cov,
        covariance_degenerate: degenerate,
        residuals,
        trace_chi2,
        converged,
        warning: (!converged).then(|| format!("simplex did not converge within {} evaluations", problem.options.max_evaluations)),
        starts: reports,
        best_start,
    })
}

/// Noisy copies of model traces: Gaussian noise with standard deviation
/// `noise * max|model|` per trace, which is also reported as the sem.
pub fn synthesize(
    params: &SuperatomParams,
    templates: &[(TraceKind, PulseSpec, Vec<f64>)],
    noise: f64,
    scale: &DetectionScale,
    seed: u64,
) -> Result<Vec<TraceData>> {
    let mut traces: Vec<TraceData> = templates
        .iter()
        .map(|(kind, pulse, times)| TraceData {
            times: times.clone(),
            values: vec![0.0; times.len()],
            sem: vec![1.0; times.len()],
            kind: *kind,
            pulse: pulse.clone(),
        })
        .collect();
    let models = forward_models(params, &traces, scale)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (t, m) in traces.iter_mut().zip(models) {
        let peak = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let sd = if noise > 0.0 { noise * peak } else { 0.0 };
        let normal = Normal::new(0.0, sd.max(f64::MIN_POSITIVE)).map_err(|e| Error::InvalidInput(e.to_string()))?;
        t.values = m.iter().map(|v| if sd > 0.0 { v + normal.sample(&mut rng) } else { *v }).collect();
        t.sem = vec![if sd > 0.0 { sd } else { 1e-3 * peak.max(1e-12) }; m.len()];
    }
    Ok(traces)
}

/// The four traces of the measurement layout: photon rate and Rydberg
/// population for peak rates 12.4 and 2.6 per us, sampled every 0.1 us.
pub fn reference_templates() -> Vec<(TraceKind, PulseSpec, Vec<f64>)> {
    let times: Vec<f64> = (0..=140).map(|i| i as f64 * 0.1).collect();
    let mut out = Vec::new();
    for rate in [12.4, 2.6] {
        let pulse = PulseSpec::tukey(0.8, 5.0, rate);
        out.push((TraceKind::PhotonRate, pulse.clone(), times.clone()));
        out.push((TraceKind::RydbergPopulation, pulse, times.clone()));
    }
    out
}

pub fn free_bounds(lo: f64, hi: f64) -> ParamSetting {
    ParamSetting::Free { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> SuperatomParams {
        SuperatomParams::new(0.40, 0.07, 1.30).unwrap()
    }

    fn problem(traces: Vec<TraceData>, seed: u64) -> FitProblem {
        FitProblem {
            traces,
            settings: [free_bounds(0.05, 3.0), free_bounds(0.005, 1.0), free_bounds(0.05, 10.0)],
            detection_scale: DetectionScale::default(),
            options: FitOptions { seed, ..FitOptions::default() },
        }
    }

    #[test]
    fn uncoupled_model_returns_input_rate() {
        let p = SuperatomParams::new(0.0, 0.1, 1.0).unwrap();
        let pulse = PulseSpec::tukey(0.8, 5.0, 2.6);
        let times: Vec<f64> = (0..70).map(|i| i as f64 * 0.1).collect();
        let t = TraceData { values: vec![0.0; 70], sem: vec![1.0; 70], times: times.clone(), kind: TraceKind::PhotonRate, pulse: pulse.clone() };
        let m = forward_model(&p, &t, &DetectionScale::default()).unwrap();
        for (x, y) in times.iter().zip(&m) {
            assert!((y - pulse.rate_at(*x)).abs() <= 1e-14 * pulse.rate_at(*x).max(1.0));
        }
    }

    #[test]
    fn empty_pulse_absorbs_nothing() {
        let t = TraceData {
            times: vec![0.0, 1.0, 2.0],
            values: vec![0.0; 3],
            sem: vec![1.0; 3],
            kind: TraceKind::RateDifference,
            pulse: PulseSpec::square(0.0, 5.0),
        };
        let m = forward_model(&truth(), &t, &DetectionScale::default()).unwrap();
        assert!(m.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rydberg_population_stays_below_one() {
        let p = SuperatomParams::new(0.428, 0.069, 1.397).unwrap();
        let times: Vec<f64> = (0..=140).map(|i| i as f64 * 0.05).collect();
        let t = TraceData {
            values: vec![0.0; times.len()],
            sem: vec![1.0; times.len()],
            times,
            kind: TraceKind::RydbergPopulation,
            pulse: PulseSpec::tukey(0.8, 5.0, 12.4),
        };
        let m = forward_model(&p, &t, &DetectionScale::default()).unwrap();
        let peak = m.iter().fold(0.0f64, |a, v| a.max(*v));
        assert!(peak > 0.3 && peak < 1.0, "{peak}");
    }

    #[test]
    fn detection_scale_multiplies() {
        let p = truth();
        let pulse = PulseSpec::tukey(0.8, 5.0, 2.6);
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let t = TraceData { values: vec![0.0; 30], sem: vec![1.0; 30], times, kind: TraceKind::PhotonRate, pulse };
        let a = forward_model(&p, &t, &DetectionScale::default()).unwrap();
        let b = forward_model(&p, &t, &DetectionScale { photon: 0.29, population: 0.30 }).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x * 0.29 - y).abs() <= 1e-15 * x.abs().max(1.0));
        }
    }

    #[test]
    fn noiseless_recovery() {
        let traces = synthesize(&truth(), &reference_templates(), 0.0, &DetectionScale::default(), 1).unwrap();
        let r = fit(&problem(traces, 7)).unwrap();
        for (got, want) in [(r.params.kappa, 0.40), (r.params.gamma, 0.07), (r.params.gamma_d, 1.30)] {
            assert!((got / want - 1.0).abs() < 1e-4, "{:?}", r.params);
        }
        for s in &r.starts {
            assert!(r.chi2 <= s.initial_chi2);
        }
        assert!(!r.covariance_degenerate);
    }

    #[test]
    fn validation_rules() {
        let traces = synthesize(&truth(), &reference_templates(), 0.0, &DetectionScale::default(), 1).unwrap();
        let mut p = problem(traces.clone(), 0);
        p.options.starts = 3;
        assert!(p.validate().is_err());
        let mut q = problem(vec![TraceData { times: vec![0.0, 1.0], values: vec![0.0; 2], sem: vec![1.0; 2], ..traces[0].clone() }], 0);
        assert!(q.validate().is_err());
        q.traces = traces;
        q.settings[0] = ParamSetting::Free { lo: 1.0, hi: 0.5 };
        assert!(q.validate().is_err());
    }
}
