//! `readout`: SNR evaluation, sweeps, figure data, oracle checks and Wigner grids
//! for dispersive qubit readout with squeezing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use squeezed_readout::QubitState;

use crate::commands::WignerArgs;
use crate::config::ConfigMap;
use crate::error::{CliError, CliResult};
use crate::figures::FigureOptions;

#[derive(Parser, Debug)]
#[command(name = "readout", version, about = "Dispersive qubit readout with injected, intracavity and combined squeezing")]
struct Cli {
    /// Worker threads for sweeps and figures (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ConfigArgs {
    /// key = value configuration file with [section] headers.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set combined.r=1.5`; repeatable, wins over the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output file (default: stdout). Same as `output.path`.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Scheme (standard|ies|ics|combined). Same as `scheme`.
    #[arg(long)]
    scheme: Option<String>,
    /// Measurement time in units of 1/κ. Same as `params.kappa_tau`.
    #[arg(long = "kappa-tau")]
    kappa_tau: Option<f64>,
}

impl ConfigArgs {
    fn load(&self) -> CliResult<ConfigMap> {
        let mut map = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                ConfigMap::parse(&text)?
            }
            None => ConfigMap::default(),
        };
        for s in &self.sets {
            map.set(s)?;
        }
        if let Some(s) = &self.scheme {
            map.insert("scheme", s)?;
        }
        if let Some(kt) = self.kappa_tau {
            if map.contains("params.tau") {
                return Err(CliError::config("--kappa-tau conflicts with params.tau"));
            }
            map.insert("params.kappa_tau", &format!("{kt:e}"))?;
        }
        if let Some(p) = &self.output {
            map.insert("output.path", &p.to_string_lossy())?;
        }
        Ok(map)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moments, SNR, fidelity and derived parameters at one point.
    Snr {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Figure data with the reference parameter set.
    Figure {
        /// fig2a, fig2b, fig2c, fig3a, fig3b, fig4a, fig4b, figS1 … figS5.
        name: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Points along the κτ (or ω_sq, δ) axis.
        #[arg(long, default_value_t = 81)]
        points: usize,
        #[arg(long, default_value_t = 1e-2)]
        kt_min: f64,
        #[arg(long, default_value_t = 1e2)]
        kt_max: f64,
        /// Wigner grid points per axis.
        #[arg(long, default_value_t = 121)]
        resolution: usize,
        #[arg(long)]
        gnuplot: bool,
    },
    /// One record per value of a swept parameter.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Parameter key, e.g. `kappa_tau` or `ies.r`. Same as `sweep.variable`.
        #[arg(long)]
        var: Option<String>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// linear or log.
        #[arg(long)]
        spacing: Option<String>,
        #[arg(long)]
        gnuplot: bool,
    },
    /// Analytic moments against the discretised Langevin integration.
    OracleCheck {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Coarse bin count K (the oracle also runs 2K); default doubles until converged.
        #[arg(long)]
        steps: Option<usize>,
        /// Scale the analytic noise by (1 + x); a negative control for the comparison.
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb_noise: f64,
    },
    /// Wigner grids and ellipse diagnostics of the integrated output mode.
    Wigner {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// vacuum, figS2, figS4 or figS5 (κτ ∈ {1, 2, 5}); overrides the configured scheme.
        #[arg(long)]
        preset: Option<String>,
        /// up, down or both.
        #[arg(long, default_value = "both")]
        state: String,
        #[arg(long, default_value_t = 121)]
        resolution: usize,
        /// Half-width of the window in standard deviations.
        #[arg(long, default_value_t = 4.0)]
        sigmas: f64,
        /// Output prefix; writes `<prefix>_grid.csv` and `<prefix>_ellipse.csv`.
        #[arg(long, default_value = "wigner")]
        prefix: PathBuf,
        #[arg(long)]
        gnuplot: bool,
    },
    /// Combined-scheme SNR under squeezing-degree and -direction mismatches.
    Mismatch {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Comma-separated δ_p values.
        #[arg(long, default_value = "0.1,0.05,0.01")]
        delta_p: String,
        /// Comma-separated δ_r values.
        #[arg(long, default_value = "0.1")]
        delta_r: String,
        #[arg(long)]
        gnuplot: bool,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::config("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Snr { cfg } => commands::cmd_snr(&cfg.load()?),
        Command::Figure { name, out_dir, points, kt_min, kt_max, resolution, gnuplot } => {
            let opts = FigureOptions { out_dir, points, kt_min, kt_max, resolution, gnuplot };
            for path in figures::run_figure(&name, &opts)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Sweep { cfg, var, start, stop, count, spacing, gnuplot } => {
            let mut map = cfg.load()?;
            for (key, value) in [
                ("sweep.variable", var),
                ("sweep.start", start.map(|x| format!("{x:e}"))),
                ("sweep.stop", stop.map(|x| format!("{x:e}"))),
                ("sweep.count", count.map(|x| x.to_string())),
                ("sweep.spacing", spacing),
            ] {
                if let Some(v) = value {
                    map.insert(key, &v)?;
                }
            }
            commands::cmd_sweep(&map, gnuplot)
        }
        Command::OracleCheck { cfg, steps, perturb_noise } => {
            commands::cmd_oracle_check(&cfg.load()?, steps, perturb_noise)
        }
        Command::Wigner { cfg, preset, state, resolution, sigmas, prefix, gnuplot } => {
            let states = match state.as_str() {
                "up" => vec![QubitState::Up],
                "down" => vec![QubitState::Down],
                "both" => QubitState::BOTH.to_vec(),
                other => return Err(CliError::config(format!("state `{other}` is not up|down|both"))),
            };
            if !(sigmas > 0.0) {
                return Err(CliError::config("--sigmas must be positive"));
            }
            let map = cfg.load()?;
            let args = WignerArgs { preset: preset.as_deref(), states, sigmas, resolution, prefix, gnuplot };
            commands::cmd_wigner(&map, &args)
        }
        Command::Mismatch { cfg, delta_p, delta_r, gnuplot } => {
            let map = cfg.load()?;
            commands::cmd_mismatch(&map, &commands::parse_list(&delta_p)?, &commands::parse_list(&delta_r)?, gnuplot)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("readout: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
