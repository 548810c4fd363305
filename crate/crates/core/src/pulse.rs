//! Probe envelopes. The envelope fixes the photon rate `R_in(t)`; the field
//! amplitude is its real, non-negative square root.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything that supplies a coherent drive amplitude `alpha(t)`.
pub trait Drive: Sync {
    fn amplitude(&self, t: f64) -> Complex64;

    /// Times at which the amplitude or its derivative is discontinuous.
    /// The integrator restarts there instead of stepping across.
    fn breakpoints(&self) -> Vec<f64>;

    /// Instant the drive switches on; the emitter is in `|G>` before it.
    fn start_time(&self) -> f64;

    fn rate(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseShape {
    /// Cosine-tapered flat top.
    Tukey { rise: f64, uptime: f64, peak_rate: f64 },
    Square { duration: f64, rate: f64 },
    /// Piecewise-linear rate through the given nodes.
    Sampled { times: Vec<f64>, rates: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub shape: PulseShape,
    #[serde(default)]
    pub start_time: f64,
}

impl PulseSpec {
    pub fn tukey(rise: f64, uptime: f64, peak_rate: f64) -> Self {
        Self { shape: PulseShape::Tukey { rise, uptime, peak_rate }, start_time: 0.0 }
    }

    pub fn square(duration: f64, rate: f64) -> Self {
        Self { shape: PulseShape::Square { duration, rate }, start_time: 0.0 }
    }

    pub fn sampled(times: Vec<f64>, rates: Vec<f64>) -> Self {
        Self { shape: PulseShape::Sampled { times, rates }, start_time: 0.0 }
    }

    /// No light at all.
    pub fn zero() -> Self {
        Self::square(0.0, 0.0)
    }

    pub fn starting_at(mut self, start_time: f64) -> Self {
        self.start_time = start_time;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("pulse: {what}")));
        if !self.start_time.is_finite() {
            return bad("start_time must be finite");
        }
        match &self.shape {
            PulseShape::Tukey { rise, uptime, peak_rate } => {
                if [*rise, *uptime, *peak_rate].iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return bad("tukey durations and rate must be finite and non-negative");
                }
            }
            PulseShape::Square { duration, rate } => {
                if [*duration, *rate].iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return bad("square duration and rate must be finite and non-negative");
                }
            }
            PulseShape::Sampled { times, rates } => {
                if times.len() != rates.len() {
                    return bad("sampled times and rates differ in length");
                }
                if times.len() < 2 {
                    return bad("sampled pulse needs at least two nodes");
                }
                if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("sampled times must be finite and strictly increasing");
                }
                if rates.iter().any(|r| !r.is_finite() || *r < 0.0) {
                    return bad("sampled rates must be finite and non-negative");
                }
            }
        }
        Ok(())
    }

    /// Support of the envelope, `[start, end]`, in absolute time.
    pub fn support(&self) -> (f64, f64) {
        let s = self.start_time;
        match &self.shape {
            PulseShape::Tukey { rise, uptime, .. } => (s, s + 2.0 * rise + uptime),
            PulseShape::Square { duration, .. } => (s, s + duration),
            PulseShape::Sampled { times, .. } => (s + times[0], s + times[times.len() - 1]),
        }
    }

    pub fn end_time(&self) -> f64 {
        self.support().1
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        let u = t - self.start_time;
        match &self.shape {
            PulseShape::Tukey { rise, uptime, peak_rate } => {
                let (rise, uptime, p) = (*rise, *uptime, *peak_rate);
                if u < 0.0 || u > 2.0 * rise + uptime {
                    0.0
                } else if u < rise {
                    p * 0.5 * (1.0 - (std::f64::consts::PI * u / rise).cos())
                } else if u <= rise + uptime {
                    p
                } else {
                    let v = 2.0 * rise + uptime - u;
                    p * 0.5 * (1.0 - (std::f64::consts::PI * v / rise).cos())
                }
            }
            PulseShape::Square { duration, rate } => {
                if u >= 0.0 && u < *duration {
                    *rate
                } else {
                    0.0
                }
            }
            PulseShape::Sampled { times, rates } => {
                let n = times.len();
                if n == 0 || u < times[0] || u > times[n - 1] {
                    return 0.0;
                }
                let i = times.partition_point(|&x| x <= u);
                if i >= n {
                    return rates[n - 1];
                }
                let (t0, t1) = (times[i - 1], times[i]);
                let w = (u - t0) / (t1 - t0);
                rates[i - 1] * (1.0 - w) + rates[i] * w
            }
        }
    }

    pub fn amplitude_at(&self, t: f64) -> f64 {
        self.rate_at(t).sqrt()
    }

    /// Mean photon number carried by the pulse.
    pub fn photon_count(&self) -> f64 {
        match &self.shape {
            PulseShape::Tukey { rise, uptime, peak_rate } => peak_rate * (uptime + rise),
            PulseShape::Square { duration, rate } => rate * duration,
            PulseShape::Sampled { times, rates } => times
                .windows(2)
                .zip(rates.windows(2))
                .map(|(t, r)| 0.5 * (r[0] + r[1]) * (t[1] - t[0]))
                .sum(),
        }
    }

    /// Rate-weighted duration `N_ph / R_peak`.
    pub fn effective_length(&self) -> f64 {
        let peak = match &self.shape {
            PulseShape::Tukey { peak_rate, .. } => *peak_rate,
            PulseShape::Square { rate, .. } => *rate,
            PulseShape::Sampled { rates, .. } => rates.iter().cloned().fold(0.0, f64::max),
        };
        if peak > 0.0 {
            self.photon_count() / peak
        } else {
            0.0
        }
    }

    /// Instant at which a Tukey pulse has delivered the same area as a square
    /// pulse of equal peak switched on then; the start time for other shapes.
    pub fn effective_onset(&self) -> f64 {
        match &self.shape {
            PulseShape::Tukey { rise, .. } => self.start_time + 0.5 * rise,
            _ => self.support().0,
        }
    }
}

impl Drive for PulseSpec {
    fn amplitude(&self, t: f64) -> Complex64 {
        Complex64::new(self.amplitude_at(t), 0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let s = self.start_time;
        let mut b = match &self.shape {
            PulseShape::Tukey { rise, uptime, .. } => vec![s, s + rise, s + rise + uptime, s + 2.0 * rise + uptime],
            PulseShape::Square { duration, .. } => vec![s, s + duration],
            PulseShape::Sampled { times, .. } => times.iter().map(|t| s + t).collect(),
        };
        b.dedup();
        b
    }

    fn start_time(&self) -> f64 {
        self.support().0
    }

    fn rate(&self, t: f64) -> f64 {
        self.rate_at(t)
    }
}
