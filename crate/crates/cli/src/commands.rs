//! One function per subcommand. Each writes its data files and returns a
//! [`Report`] whose JSON form goes to standard output.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use telegraph_core::analysis::{dwell_statistics, exit_time_mc, smooth, DwellAccumulator, HistogramAccumulator};
use telegraph_core::fokker_planck::{
    analytic_exit_lower, analytic_exit_upper, exit_time_bound, fp_residual, stationary_density,
};
use telegraph_core::integrate::{collapse_path, simulate_ensemble, simulate_model, Reducer, Trajectory};
use telegraph_core::io::{write_density_csv, write_histogram_csv, write_trajectory_csv, Cell};
use telegraph_core::rng::derive_seed;
use telegraph_core::sde::SdeRegistry;
use telegraph_core::{analysis, ModelParams};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Output, TableRow};

/// Margin of the first density grid; extended automatically when needed.
const DENSITY_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub summary: Value,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

impl Report {
    fn new(command: &'static str, cfg: &RunConfig, summary: Value, checks: Vec<Check>, out: Option<&Output>) -> Self {
        Report {
            command,
            config: cfg.clone(),
            summary,
            checks,
            files: out
                .map(|o| o.written().iter().map(|p| p.display().to_string()).collect())
                .unwrap_or_default(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn progress(msg: std::fmt::Arguments) {
    eprintln!("[telegraph] {msg}");
}

/// Seed of a sweep point. Keyed by value so repeated entries repeat exactly.
pub fn point_seed(master: u64, value: f64) -> u64 {
    derive_seed(master, value.to_bits())
}

fn relative_error(measured: f64, expected: f64) -> f64 {
    (measured - expected) / expected
}

pub fn simulate(cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.params()?;
    let registry = SdeRegistry::with_builtins();
    let sde = registry.create(&cfg.model, &params).map_err(|e| CliError::Config(e.to_string()))?;
    let start = Instant::now();
    progress(format_args!("simulate: {} for {} steps", cfg.model, cfg.steps));
    let traj = simulate_model(&*sde, &params, cfg.u0, cfg.steps, cfg.stride, cfg.seed)?;
    progress(format_args!("simulate: done in {:.1} s", start.elapsed().as_secs_f64()));

    let mut out = Output::new(&cfg.out, cfg.format)?;
    write_trajectory(&mut out, "trajectory", &traj)?;
    if let Some(width) = cfg.smooth_width {
        let smoothed = smooth(&traj, width)?;
        write_trajectory(&mut out, "trajectory_smoothed", &smoothed)?;
    }
    let dwell = if traj.variable() == "u3" {
        let kept = traj.skip_time(cfg.burn_in.unwrap_or(0.0));
        Some(dwell_statistics(&kept, cfg.delta)?)
    } else {
        None
    };
    let summary = json!({
        "model": sde.name(),
        "variable": traj.variable(),
        "seed": cfg.seed,
        "n_samples": traj.len(),
        "sample_dt": traj.sample_dt(),
        "duration": traj.duration(),
        "final_value": traj.last(),
        "dwell": dwell,
    });
    Ok(Report::new("simulate", cfg, summary, Vec::new(), Some(&out)))
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    sample_dt: f64,
    variable: &'a str,
    seed: Option<u64>,
    values: &'a [f64],
}

fn write_trajectory(out: &mut Output, stem: &str, traj: &Trajectory) -> CliResult<()> {
    let doc = TrajectoryJson {
        sample_dt: traj.sample_dt(),
        variable: traj.variable(),
        seed: traj.seed(),
        values: traj.values(),
    };
    out.write_either(stem, &doc, |w| write_trajectory_csv(w, traj))?;
    Ok(())
}

/// Dwell statistics of one long run after burn-in, without storing it.
fn stream_dwell(cfg: &RunConfig, params: &ModelParams, seed: u64) -> CliResult<(analysis::DwellReport, usize)> {
    let burn = cfg.burn_in_steps(params);
    let mut acc = DwellAccumulator::new(cfg.delta, params.time_step())?;
    for u in collapse_path(params, cfg.u0, seed)?.skip(burn).take(cfg.steps + 1) {
        acc.push(u);
    }
    Ok((acc.finish()?, burn))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub gt: f64,
    pub pump_rate: f64,
    pub measured_ratio: Option<f64>,
    pub predicted_ratio: f64,
    pub relative_error: Option<f64>,
    pub latched_ratio: Option<f64>,
    pub occupancy: f64,
    pub transitions: u64,
    pub steps: usize,
    pub burn_in_steps: usize,
    pub seed: u64,
}

impl TableRow for RatioRow {
    const HEADER: &'static [&'static str] = &[
        "gt",
        "pump_rate",
        "measured_ratio",
        "predicted_ratio",
        "relative_error",
        "latched_ratio",
        "occupancy",
        "transitions",
        "steps",
        "burn_in_steps",
        "seed",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.gt.into(),
            self.pump_rate.into(),
            self.measured_ratio.into(),
            self.predicted_ratio.into(),
            self.relative_error.into(),
            self.latched_ratio.into(),
            self.occupancy.into(),
            self.transitions.into(),
            self.steps.into(),
            self.burn_in_steps.into(),
            self.seed.to_string().as_str().into(),
        ]
    }
}

/// Relative tolerance of the ratio check.
pub const RATIO_TOLERANCE: f64 = 0.15;

pub fn ratio_sweep(cfg: &RunConfig) -> CliResult<Report> {
    let rows = cfg
        .gt_list
        .par_iter()
        .map(|&gt| -> CliResult<RatioRow> {
            let params = cfg.params_at_gt(gt)?;
            let seed = point_seed(cfg.seed, gt);
            let start = Instant::now();
            let (r, burn) = stream_dwell(cfg, &params, seed)?;
            progress(format_args!(
                "ratio-sweep: GT = {gt} done in {:.1} s",
                start.elapsed().as_secs_f64()
            ));
            Ok(RatioRow {
                gt,
                pump_rate: params.pump_rate(),
                measured_ratio: r.ratio,
                predicted_ratio: gt,
                relative_error: r.ratio.map(|m| relative_error(m, gt)),
                latched_ratio: r.latched_ratio,
                occupancy: r.occupancy(),
                transitions: r.transitions(),
                steps: cfg.steps,
                burn_in_steps: burn,
                seed,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = Output::new(&cfg.out, cfg.format)?;
    out.write_table("ratio_sweep", &rows)?;
    let checks = rows
        .iter()
        .map(|r| {
            let ok = r.relative_error.is_some_and(|e| e.abs() < RATIO_TOLERANCE);
            Check::new(
                format!("ratio at GT = {}", r.gt),
                ok,
                format!("measured {:?}, relative error {:?}", r.measured_ratio, r.relative_error),
            )
        })
        .collect();
    let summary = json!({ "rows": rows });
    Ok(Report::new("ratio-sweep", cfg, summary, checks, Some(&out)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub alpha: f64,
    pub occupancy: f64,
    pub upper_time: f64,
    pub lower_time: f64,
    pub transit_time: f64,
    pub transitions: u64,
    pub steps: usize,
    pub seed: u64,
}

impl TableRow for AlphaRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "occupancy",
        "upper_time",
        "lower_time",
        "transit_time",
        "transitions",
        "steps",
        "seed",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.alpha.into(),
            self.occupancy.into(),
            self.upper_time.into(),
            self.lower_time.into(),
            self.transit_time.into(),
            self.transitions.into(),
            self.steps.into(),
            self.seed.to_string().as_str().into(),
        ]
    }
}

pub fn alpha_sweep(cfg: &RunConfig) -> CliResult<Report> {
    let rows = cfg
        .alpha_list
        .par_iter()
        .map(|&alpha| -> CliResult<AlphaRow> {
            let params = cfg.params_at_alpha(alpha)?;
            let seed = point_seed(cfg.seed, alpha);
            let start = Instant::now();
            let (r, _) = stream_dwell(cfg, &params, seed)?;
            progress(format_args!(
                "alpha-sweep: alpha = {alpha} done in {:.1} s",
                start.elapsed().as_secs_f64()
            ));
            Ok(AlphaRow {
                alpha,
                occupancy: r.occupancy(),
                upper_time: r.upper_time,
                lower_time: r.lower_time,
                transit_time: r.transit_time,
                transitions: r.transitions(),
                steps: cfg.steps,
                seed,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = Output::new(&cfg.out, cfg.format)?;
    out.write_table("alpha_sweep", &rows)?;

    let mut by_alpha: Vec<&AlphaRow> = rows.iter().collect();
    by_alpha.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    by_alpha.dedup_by(|a, b| a.alpha == b.alpha);
    let increasing = by_alpha.windows(2).all(|w| w[1].occupancy > w[0].occupancy);
    let trend: Vec<String> = by_alpha.iter().map(|r| format!("{}: {:.4}", r.alpha, r.occupancy)).collect();
    let checks = vec![Check::new(
        "occupancy increases with alpha",
        increasing,
        trend.join(", "),
    )];
    let summary = json!({ "rows": rows });
    Ok(Report::new("alpha-sweep", cfg, summary, checks, Some(&out)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySummary {
    pub integral: f64,
    pub residual: f64,
    pub total_variation: f64,
    pub mean: f64,
    pub mode: f64,
    pub local_maxima: Vec<f64>,
    pub margin: f64,
    pub ln_normalization: f64,
    pub n_grid: usize,
    pub n_samples: u64,
    pub burn_in_steps: usize,
}

pub const DENSITY_TV_LIMIT: f64 = 0.05;
pub const RESIDUAL_LIMIT: f64 = 1e-3;
pub const INTEGRAL_TOLERANCE: f64 = 1e-6;

pub fn density(cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.params()?;
    let density = stationary_density(&params, cfg.n_grid, DENSITY_MARGIN)?;
    let residual = fp_residual(&density, &params)?;
    let burn = cfg.burn_in_steps(&params);
    let start = Instant::now();
    progress(format_args!("density: sampling {} steps after {burn} burn-in", cfg.steps));
    let mut acc = HistogramAccumulator::new(cfg.bins)?;
    for u in collapse_path(&params, cfg.u0, cfg.seed)?.skip(burn).take(cfg.steps + 1) {
        acc.push(u);
    }
    let hist = acc.finish()?;
    progress(format_args!("density: done in {:.1} s", start.elapsed().as_secs_f64()));
    let exact = density.bin_probabilities(&hist.edges)?;
    let tv = analysis::total_variation(&hist.probs, &exact)?;

    let mut out = Output::new(&cfg.out, cfg.format)?;
    out.write_either("density", &density, |w| write_density_csv(w, &density))?;
    out.write_either("histogram", &hist, |w| write_histogram_csv(w, &hist))?;

    let s = DensitySummary {
        integral: density.integral(),
        residual,
        total_variation: tv,
        mean: density.mean(),
        mode: density.mode(),
        local_maxima: density.local_maxima(),
        margin: density.margin,
        ln_normalization: density.ln_normalization,
        n_grid: density.len(),
        n_samples: hist.n_samples,
        burn_in_steps: burn,
    };
    let checks = vec![
        Check::new(
            "density integrates to one",
            (s.integral - 1.0).abs() < INTEGRAL_TOLERANCE,
            format!("{:.3e}", s.integral - 1.0),
        ),
        Check::new("stationary residual", s.residual < RESIDUAL_LIMIT, format!("{:.3e}", s.residual)),
        Check::new(
            "histogram total variation",
            s.total_variation < DENSITY_TV_LIMIT,
            format!("{:.4}", s.total_variation),
        ),
    ];
    let summary = serde_json::to_value(&s).expect("plain data serializes");
    Ok(Report::new("density", cfg, summary, checks, Some(&out)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandExit {
    pub start: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub n_censored: usize,
    pub analytic: Option<f64>,
    pub relative_error: Option<f64>,
    pub bound: Option<f64>,
    pub batch_means: Vec<f64>,
    pub within_tolerance: bool,
    pub below_bound_in_every_batch: Option<bool>,
}

pub const EXIT_TOLERANCE: f64 = 0.20;
pub const EXIT_RATIO_TOLERANCE: f64 = 0.25;

fn batched_exit(cfg: &RunConfig, params: &ModelParams, start: f64, stream: u64) -> CliResult<BandExit> {
    let base = derive_seed(cfg.seed, stream);
    let (q, r) = (cfg.n_traj / cfg.batches, cfg.n_traj % cfg.batches);
    let batches = (0..cfg.batches)
        .map(|b| {
            let n = q + usize::from(b < r);
            exit_time_mc(params, start, cfg.delta, n, cfg.steps, derive_seed(base, b as u64))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let total: usize = batches.iter().map(|b| b.n_samples).sum();
    let mean = batches.iter().map(|b| b.mean * b.n_samples as f64).sum::<f64>() / total as f64;
    let var_sum: f64 = batches
        .iter()
        .map(|b| (b.n_samples as f64 * b.std_error).powi(2))
        .sum();
    let first = &batches[0];
    let analytic = first.analytic;
    let relative = analytic.map(|a| relative_error(mean, a));
    let below = first
        .bound
        .map(|bound| batches.iter().all(|b| b.mean <= bound));
    Ok(BandExit {
        start,
        mean,
        std_error: var_sum.sqrt() / total as f64,
        n_samples: total,
        n_censored: batches.iter().map(|b| b.n_censored).sum(),
        analytic,
        relative_error: relative,
        bound: first.bound,
        batch_means: batches.iter().map(|b| b.mean).collect(),
        within_tolerance: relative.is_some_and(|e| e.abs() < EXIT_TOLERANCE),
        below_bound_in_every_batch: below,
    })
}

pub fn exit_time(cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.params()?;
    let start = Instant::now();
    progress(format_args!("exit-time: {} runs from each pole", cfg.n_traj));
    let lower = batched_exit(cfg, &params, -1.0, 0)?;
    let upper = batched_exit(cfg, &params, 1.0, 1)?;
    progress(format_args!("exit-time: done in {:.1} s", start.elapsed().as_secs_f64()));
    let gt = params.pump_rate() * cfg.decay_time;
    let ratio = upper.mean / lower.mean;
    let ratio_error = relative_error(ratio, gt);
    let analytic_lower = analytic_exit_lower(cfg.delta, params.pump_rate()).ok();
    let analytic_upper = analytic_exit_upper(cfg.delta, cfg.decay_time).ok();
    let bound = exit_time_bound(cfg.delta, params.pump_rate(), cfg.decay_time).ok();

    let checks = vec![
        Check::new(
            "lower-band exit time",
            lower.within_tolerance,
            format!("{:.5} vs {:?}", lower.mean, analytic_lower),
        ),
        Check::new(
            "lower-band exit below the bound in every batch",
            lower.below_bound_in_every_batch == Some(true),
            format!("batch means {:?}, bound {:?}", lower.batch_means, bound),
        ),
        Check::new(
            "upper-band exit time",
            upper.within_tolerance,
            format!("{:.5} vs {:?}", upper.mean, analytic_upper),
        ),
        Check::new(
            "exit-time ratio",
            ratio_error.abs() < EXIT_RATIO_TOLERANCE,
            format!("{ratio:.4} vs GT = {gt}"),
        ),
    ];
    let report = json!({
        "delta": cfg.delta,
        "lower": lower,
        "upper": upper,
        "analytic_lower": analytic_lower,
        "analytic_upper": analytic_upper,
        "exit_bound": bound,
        "ratio": { "monte_carlo": ratio, "predicted": gt, "relative_error": ratio_error },
        "checks": checks,
    });
    let mut out = Output::new(&cfg.out, cfg.format)?;
    out.write_json("exit_time.json", &report)?;
    Ok(Report::new("exit-time", cfg, report, checks, Some(&out)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BornRow {
    pub u0: f64,
    pub fraction_positive: f64,
    pub expected: f64,
    pub sigma: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub within: bool,
    pub n_traj: usize,
    pub steps: usize,
    pub seed: u64,
}

impl TableRow for BornRow {
    const HEADER: &'static [&'static str] = &[
        "u0",
        "fraction_positive",
        "expected",
        "sigma",
        "ci_low",
        "ci_high",
        "within",
        "n_traj",
        "steps",
        "seed",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.u0.into(),
            self.fraction_positive.into(),
            self.expected.into(),
            self.sigma.into(),
            self.ci_low.into(),
            self.ci_high.into(),
            if self.within { "true" } else { "false" }.into(),
            self.n_traj.into(),
            self.steps.into(),
            self.seed.to_string().as_str().into(),
        ]
    }
}

/// Width of the Born-rule interval in binomial standard deviations.
pub const BORN_SIGMAS: f64 = 3.0;

pub fn born(cfg: &RunConfig) -> CliResult<Report> {
    let params = ModelParams::pure_noise(cfg.alpha, cfg.dt).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rows = Vec::with_capacity(cfg.u0_list.len());
    for &u0 in &cfg.u0_list {
        let seed = point_seed(cfg.seed, u0);
        let start = Instant::now();
        let ens = simulate_ensemble(&params, u0, cfg.steps, cfg.n_traj, seed, Reducer::Terminal)?;
        progress(format_args!("born: u0 = {u0} done in {:.1} s", start.elapsed().as_secs_f64()));
        let expected = (1.0 + u0) / 2.0;
        let fraction = ens.fraction_above(0.0);
        let sigma = (expected * (1.0 - expected) / cfg.n_traj as f64).sqrt();
        let half = BORN_SIGMAS * sigma;
        rows.push(BornRow {
            u0,
            fraction_positive: fraction,
            expected,
            sigma,
            ci_low: expected - half,
            ci_high: expected + half,
            within: (fraction - expected).abs() <= half,
            n_traj: cfg.n_traj,
            steps: cfg.steps,
            seed,
        });
    }
    let mut out = Output::new(&cfg.out, cfg.format)?;
    out.write_table("born", &rows)?;
    let checks = rows
        .iter()
        .map(|r| {
            Check::new(
                format!("Born rule at u0 = {}", r.u0),
                r.within,
                format!("{:.4} vs {:.4} ± {:.4}", r.fraction_positive, r.expected, BORN_SIGMAS * r.sigma),
            )
        })
        .collect();
    Ok(Report::new("born", cfg, json!({ "rows": rows }), checks, Some(&out)))
}

pub fn models(cfg: &RunConfig) -> CliResult<Report> {
    let registry = SdeRegistry::with_builtins();
    let list: Vec<Value> = registry
        .describe()
        .map(|(name, summary)| json!({ "name": name, "summary": summary }))
        .collect();
    Ok(Report::new("models", cfg, json!({ "models": list }), Vec::new(), None))
}
