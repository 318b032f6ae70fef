use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, Overrides};

/// Quantum telegraph switching from a continuous-collapse Bloch model.
///
/// Data files go to `--out` (a directory); a JSON summary goes to standard
/// output and progress to standard error.
#[derive(Debug, Parser)]
#[command(name = "telegraph", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub params: ParamArgs,

    /// TOML file with defaults for any flag (`G`, `alpha`, `gt_list`, ...).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Exit with status 4 when the command's validation checks fail.
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write it as `t,u3`.
    Simulate {
        /// Model from the registry (see `telegraph models`).
        #[arg(long)]
        model: Option<String>,
    },
    /// Upper/lower dwell-time ratio against the prediction GT.
    RatioSweep {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gt_list: Option<Vec<f64>>,
    },
    /// Fraction of time spent in either band as the noise strength varies.
    AlphaSweep {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha_list: Option<Vec<f64>>,
    },
    /// Stationary density next to the histogram of a long run.
    Density,
    /// First-passage times out of both bands against the linearized values.
    ExitTime,
    /// Trapping frequencies of the pure-noise walk.
    Born {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u0_list: Option<Vec<f64>>,
    },
    /// List the registered models.
    Models,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Pump rate.
    #[arg(long = "G", global = true, allow_negative_numbers = true)]
    pub pump_rate: Option<f64>,
    /// Decay time.
    #[arg(long = "T", global = true, allow_negative_numbers = true)]
    pub decay_time: Option<f64>,
    /// Noise strength.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Integration steps per run (after burn-in for statistics).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Keep every n-th sample in written trajectories.
    #[arg(long, global = true)]
    pub stride: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub n_traj: Option<usize>,
    /// Band half-width around ±1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Transient discarded before statistics, in time units.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub burn_in: Option<f64>,
    /// Also write a Gaussian-smoothed copy with this width.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub smooth_width: Option<f64>,
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Grid points of the stationary density.
    #[arg(long, global = true)]
    pub n_grid: Option<usize>,
    /// Initial value of simulated trajectories.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    /// Independent batches for the exit-time bound check.
    #[arg(long, global = true)]
    pub batches: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: $TELEGRAPH_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Cli {
    /// Flag values as an override layer.
    pub fn overrides(&self) -> Overrides {
        let p = self.params.clone();
        let mut o = Overrides {
            pump_rate: p.pump_rate,
            decay_time: p.decay_time,
            alpha: p.alpha,
            dt: p.dt,
            steps: p.steps,
            stride: p.stride,
            seed: p.seed,
            n_traj: p.n_traj,
            delta: p.delta,
            burn_in: p.burn_in,
            smooth_width: p.smooth_width,
            bins: p.bins,
            n_grid: p.n_grid,
            u0: p.u0,
            batches: p.batches,
            out: p.out,
            format: p.format,
            threads: p.threads,
            ..Default::default()
        };
        match &self.command {
            Command::Simulate { model } => o.model = model.clone(),
            Command::RatioSweep { gt_list } => o.gt_list = gt_list.clone(),
            Command::AlphaSweep { alpha_list } => o.alpha_list = alpha_list.clone(),
            Command::Born { u0_list } => o.u0_list = u0_list.clone(),
            Command::Density | Command::ExitTime | Command::Models => {}
        }
        o
    }
}
