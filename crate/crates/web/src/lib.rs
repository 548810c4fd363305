//! Browser bindings: three small computations behind the static demo page
//! in `www/`. Results come back as flat `Float64Array`s so the page needs no
//! JSON round trip.

use superatom::analytics::{log_grid, phase_diagram, PhaseDiagramSpec};
use superatom::correlation::g2_matrix;
use superatom::{evolve, observables, PulseSpec, SuperatomParams};
use wasm_bindgen::prelude::*;

fn js_err(e: superatom::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn setup(kappa: f64, gamma: f64, gamma_d: f64, peak_rate: f64) -> Result<(SuperatomParams, PulseSpec), JsValue> {
    let p = SuperatomParams::new(kappa, gamma, gamma_d).map_err(js_err)?;
    let pulse = PulseSpec::tukey(0.8, 5.0, peak_rate);
    pulse.validate().map_err(js_err)?;
    Ok((p, pulse))
}

fn linspace(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_end * i as f64 / (n.max(2) - 1) as f64).collect()
}

/// Response to the 0.8/5/0.8 us Tukey pulse on `n` points over `[0, t_end]`.
/// Layout: `[time | in_rate | out_rate | rydberg_population]`, each of length `n`.
#[wasm_bindgen]
pub fn time_traces(kappa: f64, gamma: f64, gamma_d: f64, peak_rate: f64, t_end: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    let (p, pulse) = setup(kappa, gamma, gamma_d, peak_rate)?;
    let times = linspace(t_end, n);
    let obs = observables(&evolve(&p, &pulse, &times).map_err(js_err)?, &p);
    Ok([obs.times, obs.in_rate, obs.out_rate, obs.rydberg_population].concat())
}

/// Visibility over log grids; row-major with `lambda` as the slow index.
/// The last `2 * n_lambda` entries are the overdamped and crossover photon
/// numbers per row.
#[wasm_bindgen]
pub fn visibility_map(lambda_lo: f64, lambda_hi: f64, n_lambda: usize, nph_lo: f64, nph_hi: f64, n_nph: usize) -> Result<Vec<f64>, JsValue> {
    let spec = PhaseDiagramSpec { lambda_grid: log_grid(lambda_lo, lambda_hi, n_lambda), nph_grid: log_grid(nph_lo, nph_hi, n_nph), tau: 1.0 };
    let map = phase_diagram(&spec).map_err(js_err)?;
    let mut out: Vec<f64> = map.values.concat();
    out.extend(map.overdamped_boundary);
    out.extend(map.crossover);
    Ok(out)
}

/// `n x n` correlation map on `[0, t_end]`, row-major, `NaN` where masked.
#[wasm_bindgen]
pub fn g2_map(kappa: f64, gamma: f64, gamma_d: f64, peak_rate: f64, t_end: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    let (p, pulse) = setup(kappa, gamma, gamma_d, peak_rate)?;
    let g = g2_matrix(&p, &pulse, &linspace(t_end, n)).map_err(js_err)?;
    Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| g.get(i, j).unwrap_or(f64::NAN)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts() {
        let t = time_traces(0.428, 0.069, 1.397, 12.4, 10.0, 50).unwrap();
        assert_eq!(t.len(), 200);
        assert!(t[150..].iter().all(|v| (0.0..1.0).contains(v)));
        let v = visibility_map(0.1, 10.0, 5, 0.01, 100.0, 7).unwrap();
        assert_eq!(v.len(), 5 * 7 + 10);
        let g = g2_map(0.428, 0.069, 1.397, 2.6, 8.0, 12).unwrap();
        assert_eq!(g.len(), 144);
        assert!(g[0].is_nan());
    }
}
