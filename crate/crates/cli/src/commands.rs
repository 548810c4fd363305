use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use superatom::analytics::{phase_diagram, PhaseDiagramSpec};
use superatom::correlation::g2_matrix_with;
use superatom::coupling::derive_coupling;
use superatom::dynamics::flux_balance;
use superatom::fitting::{fit, synthesize, FitOptions, FitProblem, ParamSetting, TraceKind, PARAM_NAMES};
use superatom::ode::Tolerances;
use superatom::oracle::{compare, extrapolated_agreement, OracleConfig};
use superatom::{evolve, observables};

use crate::config::{check, load_config, require, Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io::{read_trace_csv, write_trace, Outputs, Table, MANIFEST_NAME};

#[derive(Debug, Parser)]
#[command(name = "superatom", version, about = "Superatom dynamics, photon correlations and parameter estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for multi-starts and synthetic noise; overrides `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Table format; overrides `output.formats`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Time traces of rates and populations.
    Simulate,
    /// Two-time g2 matrix with validity mask.
    Correlate,
    /// Oscillation visibility over (lambda, N_ph).
    PhaseDiagram,
    /// Coupling constants from cloud geometry and lasers.
    Coupling,
    /// Least-squares estimate of (kappa, gamma, gamma_d) from trace files.
    Fit,
    /// Noisy trace files from the model, for testing fits.
    Synthesize,
    /// Few-photon reference solver against the master equation.
    Oracle,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Correlate => "correlate",
            Self::PhaseDiagram => "phase-diagram",
            Self::Coupling => "coupling",
            Self::Fit => "fit",
            Self::Synthesize => "synthesize",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    config: &'a RunConfig,
    outputs: &'a [String],
}

/// Config after command-line overrides.
pub fn resolve(flags: &Flags) -> CliResult<RunConfig> {
    let path = flags.config.as_ref().ok_or_else(|| CliError::config("--config", "a config file is required"))?;
    let mut cfg = load_config(path)?;
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(o) = &flags.out {
        cfg.output.directory = o.clone();
    }
    if let Some(f) = flags.format {
        cfg.output.formats = vec![match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }];
    }
    Ok(cfg)
}

/// Runs one subcommand and returns the output directory and written files.
pub fn run(cli: &Cli) -> CliResult<Outputs> {
    let cfg = resolve(&cli.flags)?;
    if let Some(n) = cli.flags.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be at least 1"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut out = Outputs::new(cfg.output.directory.clone());
    match cli.command {
        Command::Simulate => simulate(&cfg, &mut out)?,
        Command::Correlate => correlate(&cfg, &mut out)?,
        Command::PhaseDiagram => phase(&cfg, &mut out)?,
        Command::Coupling => coupling(&cfg, &mut out)?,
        Command::Fit => fit_traces(&cfg, &mut out)?,
        Command::Synthesize => synthesize_traces(&cfg, &mut out)?,
        Command::Oracle => oracle(&cfg, &mut out)?,
    }
    let files = out.files.clone();
    let manifest = Manifest {
        tool: "superatom",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        seed: cfg.seed,
        config: &cfg,
        outputs: &files,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serialises");
    bytes.push(b'\n');
    crate::io::write_atomic(&out.dir.join(MANIFEST_NAME), &bytes)?;
    Ok(out)
}

fn wants(cfg: &RunConfig, f: Format) -> bool {
    cfg.output.formats.contains(&f)
}

fn time_grid(cfg: &RunConfig) -> CliResult<crate::config::GridConfig> {
    let g = *require(&cfg.grid, "grid")?;
    if !(g.t_end > g.t_start) || !g.t_start.is_finite() || !g.t_end.is_finite() {
        return Err(CliError::config("grid", "need finite t_start < t_end"));
    }
    if g.n_points < 2 {
        return Err(CliError::config("grid.n_points", "need at least two points"));
    }
    Ok(g)
}

fn model(cfg: &RunConfig) -> CliResult<(superatom::SuperatomParams, superatom::PulseSpec)> {
    let p = *require(&cfg.params, "params")?;
    check("params", p.validate())?;
    let pulse = require(&cfg.pulse, "pulse")?.clone();
    check("pulse", pulse.validate())?;
    Ok((p, pulse))
}

fn simulate(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let (p, pulse) = model(cfg)?;
    let grid = time_grid(cfg)?;
    let times = grid.points(grid.n_points);
    let traj = evolve(&p, &pulse, &times)?;
    let obs = observables(&traj, &p);
    if wants(cfg, Format::Csv) {
        let mut t = Table::new(&["time_us", "in_rate", "out_rate", "delta_rate", "rho_ww", "rho_dd", "rydberg_pop"]);
        for i in 0..obs.times.len() {
            t.push_floats(&[obs.times[i], obs.in_rate[i], obs.out_rate[i], obs.delta_rate[i], obs.rho_ww[i], obs.rho_dd[i], obs.rydberg_population[i]]);
        }
        out.write_csv("trace.csv", &t)?;
    }
    if wants(cfg, Format::Json) {
        out.write_json("trace.json", &obs)?;
    }
    let flux = if grid.t_end > pulse.start_time { Some(flux_balance(&p, &pulse, grid.t_end)?) } else { None };
    let peak = obs.rydberg_population.iter().copied().fold(0.0, f64::max);
    out.write_json(
        "simulate_report.json",
        &json!({
            "photons_in_pulse": pulse.photon_count(),
            "peak_rydberg_population": peak,
            "invariants": traj.invariant_report(),
            "flux_balance": flux,
            "flux_balance_relative_defect": flux.map(|f| f.relative_defect()),
            "integrator": {"accepted_steps": traj.stats.accepted, "rejected_steps": traj.stats.rejected, "evaluations": traj.stats.evaluations},
        }),
    )
}

fn correlate(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let (p, pulse) = model(cfg)?;
    let grid = time_grid(cfg)?;
    let c = *require(&cfg.correlate, "correlate")?;
    if c.n_grid < 1 {
        return Err(CliError::config("correlate.n_grid", "need at least one point"));
    }
    if !(c.floor >= 0.0) {
        return Err(CliError::config("correlate.floor", "must be non-negative"));
    }
    let times = grid.points(c.n_grid);
    let g = g2_matrix_with(&p, &pulse, &times, c.floor, Tolerances::default())?;
    if wants(cfg, Format::Csv) {
        let mut header = vec!["s1_us\\s2_us".to_string()];
        header.extend(times.iter().map(|t| crate::io::fmt_float(*t)));
        let mut values = Table::new(&header);
        let mut mask = Table::new(&header);
        for i in 0..times.len() {
            let mut row = vec![times[i]];
            row.extend((0..times.len()).map(|j| g.get(i, j).unwrap_or(f64::NAN)));
            values.push_floats(&row);
            let mut m = vec![crate::io::fmt_float(times[i])];
            m.extend((0..times.len()).map(|j| if g.valid[i][j] { "1".to_string() } else { "0".to_string() }));
            mask.rows.push(m);
        }
        out.write_csv("g2.csv", &values)?;
        out.write_csv("g2_valid.csv", &mask)?;
        let mut inten = Table::new(&["time_us", "out_rate"]);
        for (t, v) in times.iter().zip(&g.intensity) {
            inten.push_floats(&[*t, *v]);
        }
        out.write_csv("g2_intensity.csv", &inten)?;
    }
    if wants(cfg, Format::Json) {
        out.write_json("g2.json", &g)?;
    }
    Ok(())
}

fn phase(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let c = *require(&cfg.phase_diagram, "phase_diagram")?;
    let mut spec = PhaseDiagramSpec::log_spaced(c.lambda, c.nph);
    spec.tau = c.tau;
    check("phase_diagram", spec.validate())?;
    let map = phase_diagram(&spec)?;
    if wants(cfg, Format::Csv) {
        let mut t = Table::new(&["lambda", "nph", "visibility"]);
        for (i, l) in map.lambda_grid.iter().enumerate() {
            for (j, n) in map.nph_grid.iter().enumerate() {
                t.push_floats(&[*l, *n, map.values[i][j]]);
            }
        }
        out.write_csv("visibility.csv", &t)?;
        let mut b = Table::new(&["lambda", "overdamped_nph", "crossover_nph"]);
        for (i, l) in map.lambda_grid.iter().enumerate() {
            b.push_floats(&[*l, map.overdamped_boundary[i], map.crossover[i]]);
        }
        out.write_csv("boundaries.csv", &b)?;
    }
    if wants(cfg, Format::Json) {
        out.write_json("visibility.json", &map)?;
    }
    Ok(())
}

fn coupling(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let c = require(&cfg.coupling, "coupling")?;
    check("coupling.cloud", c.cloud.peak_density().map(|_| ()))?;
    check("coupling.beam", c.beam.validate())?;
    let d = derive_coupling(&c.cloud, &c.beam)?;
    out.write_json(
        "coupling.json",
        &json!({
            "peak_density_per_um3": d.n0,
            "mode_area_um2": d.mode_area,
            "n_bar": d.n_bar,
            "n_bar_closed_form": d.n_bar_closed_form,
            "n_bar_quadrature": d.n_bar_quadrature,
            "n_bar_closed_form_reliable": d.n_bar_closed_form_reliable,
            "kappa_fwd_per_us": d.kappa_fwd,
            "g_col_per_us": d.g_col,
            "kappa_eff_per_us": d.kappa_eff,
            "gamma_raman_per_us": d.gamma_raman,
            "beta": d.beta,
            "theta_max_rad": d.theta_max,
            "log10_backscatter_suppression": d.log10_backscatter_suppression,
            "blockade": d.blockade,
            "warnings": d.warnings,
        }),
    )
}

fn fit_traces(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let f = require(&cfg.fit, "fit")?;
    if f.traces.is_empty() {
        return Err(CliError::config("fit.traces", "list at least one trace file"));
    }
    let traces: Vec<_> = f.traces.iter().map(|p| read_trace_csv(p).map(|t| t.trace)).collect::<CliResult<_>>()?;
    let mut settings = [ParamSetting::Fixed { value: 0.0 }; 3];
    for (i, name) in PARAM_NAMES.iter().enumerate() {
        settings[i] = match (f.free.get(i), f.fixed.get(i)) {
            (Some((lo, hi)), None) => ParamSetting::Free { lo, hi },
            (None, Some(value)) => ParamSetting::Fixed { value },
            (Some(_), Some(_)) => return Err(CliError::config(format!("fit.fixed.{name}"), "parameter is both free and fixed")),
            (None, None) => return Err(CliError::config(format!("fit.free.{name}"), "parameter must be either free or fixed")),
        };
    }
    let problem = FitProblem {
        traces,
        settings,
        detection_scale: f.detection_scale,
        options: FitOptions { starts: f.starts, max_evaluations: f.max_evaluations, seed: cfg.seed },
    };
    check("fit", problem.validate())?;
    let r = fit(&problem)?;
    let sd: Vec<f64> = (0..3).map(|i| r.covariance[i][i].sqrt()).collect();
    out.write_json(
        "fit_result.json",
        &json!({
            "params": {"kappa_per_us": r.params.kappa, "gamma_per_us": r.params.gamma, "gamma_d_per_us": r.params.gamma_d},
            "std_error": {"kappa_per_us": sd[0], "gamma_per_us": sd[1], "gamma_d_per_us": sd[2]},
            "chi2": r.chi2,
            "dof": r.dof,
            "reduced_chi2": r.chi2 / r.dof.max(1) as f64,
            "covariance": r.covariance,
            "covariance_degenerate": r.covariance_degenerate,
            "converged": r.converged,
            "warning": r.warning,
            "trace_files": f.traces,
            "trace_chi2": r.trace_chi2,
            "best_start": r.best_start,
            "starts": r.starts,
        }),
    )?;
    let mut t = Table::new(&["trace", "kind", "time_us", "value", "sem", "model", "residual"]);
    for (k, (trace, res)) in problem.traces.iter().zip(&r.residuals).enumerate() {
        for i in 0..trace.times.len() {
            let model = trace.values[i] - res[i] * trace.sem[i];
            let mut row = vec![k.to_string(), trace.kind.as_str().to_string()];
            row.extend([trace.times[i], trace.values[i], trace.sem[i], model, res[i]].iter().map(|v| crate::io::fmt_float(*v)));
            t.rows.push(row);
        }
    }
    out.write_csv("residuals.csv", &t)
}

fn synthesize_traces(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let (p, pulse) = model(cfg)?;
    let grid = time_grid(cfg)?;
    let s = require(&cfg.synthesize, "synthesize")?;
    if !(s.noise >= 0.0) || !s.noise.is_finite() {
        return Err(CliError::config("synthesize.noise", "must be finite and non-negative"));
    }
    let mut templates = Vec::new();
    for (i, k) in s.kinds.iter().enumerate() {
        let kind = TraceKind::parse(k).ok_or_else(|| CliError::config(format!("synthesize.kinds[{i}]"), format!("unknown trace kind `{k}`")))?;
        templates.push((kind, pulse.clone(), grid.points(grid.n_points)));
    }
    let scale = cfg.fit.as_ref().map(|f| f.detection_scale).unwrap_or_default();
    let traces = synthesize(&p, &templates, s.noise, &scale, cfg.seed)?;
    for t in &traces {
        out.write(&format!("trace_{}.csv", t.kind.as_str()), &write_trace(t, Some(MANIFEST_NAME)))?;
    }
    Ok(())
}

fn oracle(cfg: &RunConfig, out: &mut Outputs) -> CliResult<()> {
    let o = require(&cfg.oracle, "oracle")?;
    let oc = OracleConfig { kappa: o.kappa, num_modes: o.modes, box_length: o.box_length, input: o.input.clone() };
    check("oracle", oc.validate())?;
    let cmp = compare(&oc, o.t_end, &o.times)?;
    let extrapolated = if o.extrapolate {
        if o.modes % 2 != 0 {
            return Err(CliError::config("oracle.modes", "extrapolation halves the mode count, so it must be even"));
        }
        let coarse_cfg = OracleConfig { num_modes: o.modes / 2, ..oc.clone() };
        Some(extrapolated_agreement(&compare(&coarse_cfg, o.t_end, &o.times)?, &cmp)?)
    } else {
        None
    };
    let n = o.times.len();
    if wants(cfg, Format::Csv) {
        let mut t = Table::new(&["s1_us", "s2_us", "oracle_intensity_s1", "me_intensity_s1", "oracle_g2", "me_g2", "g2_deviation"]);
        for i in 0..n {
            for j in 0..n {
                t.push_floats(&[o.times[i], o.times[j], cmp.oracle_intensity[i], cmp.me_intensity[i], cmp.oracle_g2[i][j], cmp.me_g2[i][j], cmp.g2_deviation(i, j)]);
            }
        }
        out.write_csv("oracle_comparison.csv", &t)?;
    }
    if wants(cfg, Format::Json) {
        out.write_json("oracle_comparison.json", &cmp)?;
    }
    out.write_json(
        "oracle_report.json",
        &json!({
            "cutoff_per_us": oc.cutoff(),
            "agreement_at_cutoff": cmp.agreement(),
            "agreement_extrapolated": extrapolated,
            "truncation_warning": cmp.truncation_warning,
        }),
    )
}
