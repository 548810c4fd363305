//! Dormand-Prince 5(4) integrator with continuous extension, specialised to
//! 3x3 complex matrices.

use crate::error::{Error, Result};
use crate::state::{Mat3, C64};

pub const DEFAULT_RTOL: f64 = 1e-9;
pub const DEFAULT_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: DEFAULT_RTOL, atol: DEFAULT_ATOL }
    }
}

/// Work counters, useful for cost assertions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const MAX_STEPS: usize = 5_000_000;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// RMS of the 18 real components, each scaled by `atol + rtol * max(|y0|, |y1|)`.
fn error_norm(err: &Mat3, y0: &Mat3, y1: &Mat3, tol: Tolerances) -> f64 {
    let mut acc = 0.0;
    for ((e, a), b) in err.iter().zip(y0.iter()).zip(y1.iter()) {
        let sr = tol.atol + tol.rtol * a.re.abs().max(b.re.abs());
        let si = tol.atol + tol.rtol * a.im.abs().max(b.im.abs());
        acc += (e.re / sr).powi(2) + (e.im / si).powi(2);
    }
    (acc / 18.0).sqrt()
}

fn rms_scaled(m: &Mat3, scale_src: &Mat3, tol: Tolerances) -> f64 {
    let mut acc = 0.0;
    for (z, s) in m.iter().zip(scale_src.iter()) {
        let sr = tol.atol + tol.rtol * s.re.abs();
        let si = tol.atol + tol.rtol * s.im.abs();
        acc += (z.re / sr).powi(2) + (z.im / si).powi(2);
    }
    (acc / 18.0).sqrt()
}

/// Hairer's starting step heuristic.
fn initial_step<F>(f: &mut F, t0: f64, y0: &Mat3, f0: &Mat3, span: f64, tol: Tolerances, stats: &mut Stats) -> f64
where
    F: FnMut(f64, &Mat3) -> Mat3,
{
    let d0 = rms_scaled(y0, y0, tol);
    let d1 = rms_scaled(f0, y0, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = y0 + f0 * re(h0);
    let f1 = f(t0 + h0, &y1);
    stats.evaluations += 1;
    let d2 = rms_scaled(&(f1 - f0), y0, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1`, writing the dense-output
/// solution at every entry of `samples` (which must be sorted and lie in
/// `[t0, t1]`) into `out`. Returns `y(t1)`.
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: Mat3,
    samples: &[f64],
    out: &mut Vec<Mat3>,
    tol: Tolerances,
    stats: &mut Stats,
) -> Result<Mat3>
where
    F: FnMut(f64, &Mat3) -> Mat3,
{
    let span = t1 - t0;
    if !(span >= 0.0) {
        return Err(Error::InvalidInput(format!("integration interval [{t0}, {t1}] is reversed")));
    }
    let mut next = 0usize;
    let emit_exact = |t: f64, y: &Mat3, next: &mut usize, out: &mut Vec<Mat3>| {
        while *next < samples.len() && samples[*next] <= t {
            out.push(*y);
            *next += 1;
        }
    };
    if span == 0.0 {
        emit_exact(t0, &y0, &mut next, out);
        return Ok(y0);
    }
    if span < 1e-13 * t1.abs().max(1.0) {
        // a sliver below step-size resolution: one Euler step is exact to rounding
        let y1 = y0 + f(t0, &y0) * C64::new(span, 0.0);
        stats.evaluations += 1;
        while next < samples.len() && samples[next] <= t0 {
            out.push(y0);
            next += 1;
        }
        emit_exact(t1, &y1, &mut next, out);
        return Ok(y1);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k1, span, tol, stats);

    // samples sitting exactly on t0
    while next < samples.len() && samples[next] <= t0 {
        out.push(y0);
        next += 1;
    }

    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Stiffness { time: t });
        }
        let last = t + h >= t1 || (t1 - (t + h)) < 1e-12 * t1.abs().max(1.0);
        if last {
            h = t1 - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness { time: t });
        }

        let k2 = f(t + C2 * h, &(y + k1 * re(h * A21)));
        let k3 = f(t + C3 * h, &(y + (k1 * re(A31) + k2 * re(A32)) * re(h)));
        let k4 = f(t + C4 * h, &(y + (k1 * re(A41) + k2 * re(A42) + k3 * re(A43)) * re(h)));
        let k5 = f(
            t + C5 * h,
            &(y + (k1 * re(A51) + k2 * re(A52) + k3 * re(A53) + k4 * re(A54)) * re(h)),
        );
        let k6 = f(
            t + h,
            &(y + (k1 * re(A61) + k2 * re(A62) + k3 * re(A63) + k4 * re(A64) + k5 * re(A65)) * re(h)),
        );
        let y_new = y + (k1 * re(A71) + k3 * re(A73) + k4 * re(A74) + k5 * re(A75) + k6 * re(A76)) * re(h);
        let t_new = if last { t1 } else { t + h };
        let k7 = f(t_new, &y_new);
        stats.evaluations += 6;

        let err = (k1 * re(E1) + k3 * re(E3) + k4 * re(E4) + k5 * re(E5) + k6 * re(E6) + k7 * re(E7)) * re(h);
        let en = error_norm(&err, &y, &y_new, tol);
        if !en.is_finite() {
            stats.rejected += 1;
            h *= FAC_MIN;
            continue;
        }

        if en <= 1.0 {
            stats.accepted += 1;
            if next < samples.len() && samples[next] <= t_new {
                let r1 = y;
                let r2 = y_new - y;
                let r3 = k1 * re(h) - r2;
                let r4 = r2 - k7 * re(h) - r3;
                let r5 = (k1 * re(D1) + k3 * re(D3) + k4 * re(D4) + k5 * re(D5) + k6 * re(D6) + k7 * re(D7)) * re(h);
                while next < samples.len() && samples[next] <= t_new {
                    let s = samples[next];
                    if s >= t_new {
                        out.push(y_new);
                    } else {
                        let th = ((s - t) / h).clamp(0.0, 1.0);
                        let th1 = 1.0 - th;
                        out.push(r1 + (r2 + (r3 + (r4 + r5 * re(th1)) * re(th)) * re(th1)) * re(th));
                    }
                    next += 1;
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            let fac = if en == 0.0 { FAC_MAX } else { SAFETY * en.powf(-0.2) };
            h *= fac.clamp(FAC_MIN, FAC_MAX);
        } else {
            stats.rejected += 1;
            let fac = SAFETY * en.powf(-0.2);
            h *= fac.clamp(FAC_MIN, 1.0);
        }
    }
    // anything left sits numerically at t1
    while next < samples.len() {
        out.push(y);
        next += 1;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> Mat3 {
        let mut m = Mat3::zeros();
        m[(0, 0)] = re(x);
        m
    }

    #[test]
    fn exponential_decay_and_dense_output() {
        let samples: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let mut out = Vec::new();
        let mut stats = Stats::default();
        let end = integrate(|_, y| -y, 0.0, 5.0, scalar(1.0), &samples, &mut out, Tolerances::default(), &mut stats)
            .unwrap();
        assert_eq!(out.len(), samples.len());
        assert!((end[(0, 0)].re - (-5.0f64).exp()).abs() < 1e-10);
        for (s, m) in samples.iter().zip(&out) {
            assert!((m[(0, 0)].re - (-s).exp()).abs() < 1e-9, "t={s}");
        }
    }

    #[test]
    fn harmonic_oscillator_in_complex_plane() {
        // dz/dt = -i w z  -> z = exp(-i w t)
        let w = 3.0;
        let samples: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let mut out = Vec::new();
        let mut stats = Stats::default();
        let f = |_: f64, y: &Mat3| y * C64::new(0.0, -w);
        integrate(f, 0.0, 10.0, scalar(1.0), &samples, &mut out, Tolerances::default(), &mut stats).unwrap();
        for (s, m) in samples.iter().zip(&out) {
            let exact = C64::new(0.0, -w * s).exp();
            assert!((m[(0, 0)] - exact).norm() < 5e-8, "t={s}");
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn singular_rhs_reports_stiffness() {
        // y' = y^2 blows up at t = 1
        let mut out = Vec::new();
        let mut stats = Stats::default();
        let r = integrate(|_, y| y * y, 0.0, 2.0, scalar(1.0), &[], &mut out, Tolerances::default(), &mut stats);
        match r {
            Err(Error::Stiffness { time }) => assert!((time - 1.0).abs() < 1e-3, "time {time}"),
            other => panic!("expected stiffness error, got {other:?}"),
        }
    }
}
