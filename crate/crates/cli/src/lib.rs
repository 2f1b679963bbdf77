//! Command-line driver: parses flags, resolves the run configuration and
//! writes plot-ready CSV or JSON.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qratchet_core::experiments::{
    eta_sweep, find_reversal_strength, kappa_sweep, order_currents, strength_sweep,
    time_series_experiment,
};
use qratchet_core::floquet::band_scan;
use qratchet_core::{KickOrder, RatchetError};
use serde_json::json;
use std::f64::consts::PI;

pub use config::{load_config, Experiment, Format, RunConfig};
use config::{read_config, resolve, Flags};
use output::{num, write_header, write_json};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] RatchetError),
}

impl CliError {
    /// 3 for numerical guards, 2 for everything the user can fix by
    /// changing the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical_guard() => 3,
            _ => 2,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "qratchet", version, about = "Quantum flashing ratchet simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-period observables from the uniform initial state.
    Evolve(Common),
    /// Final current over a list of parameter values.
    Sweep {
        #[command(subcommand)]
        which: SweepKind,
    },
    /// Floquet quasienergy bands on the position fiber.
    Floquet {
        #[command(subcommand)]
        which: FloquetKind,
    },
    /// Relative current difference between the two kick orders.
    Reversal(Common),
    /// Kick strength where the final current changes sign.
    FindReversal(Common),
    /// Runs the experiment named in the config file.
    Run(Common),
}

#[derive(Subcommand, Debug)]
enum SweepKind {
    Eta(Common),
    Strength(Common),
    /// Values are kappa in units of pi.
    Kappa(Common),
}

#[derive(Subcommand, Debug)]
enum FloquetKind {
    Bands(Common),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// kappa in units of pi.
    #[arg(long)]
    kappa_pi: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Kick strength P.
    #[arg(long)]
    pstrength: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    periods: Option<usize>,
    /// v1-first or v2-first.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    x0_points: Option<usize>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    values: Option<Vec<f64>>,
    /// Reversal search bracket, `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    interval: Option<Vec<f64>>,
}

impl Common {
    fn flags(&self) -> Result<Flags, CliError> {
        let kick_order = self
            .order
            .as_deref()
            .map(|s| s.parse::<KickOrder>())
            .transpose()
            .map_err(|e| CliError::Config(format!("--order: {e}")))?;
        let interval = match self.interval.as_deref() {
            None => None,
            Some([lo, hi]) => Some([*lo, *hi]),
            Some(_) => return Err(CliError::Config("--interval takes two values".into())),
        };
        Ok(Flags {
            kappa_pi: self.kappa_pi,
            strength_p: self.pstrength,
            alpha: self.alpha,
            eta: self.eta,
            kick_order,
            tail_tol: self.tail_tol,
            periods: self.periods,
            format: self.format,
            x0_points: self.x0_points,
            values: self.values.clone(),
            interval,
        })
    }
}

fn split(command: Command) -> (Common, Option<Experiment>) {
    match command {
        Command::Evolve(c) => (c, Some(Experiment::Evolve)),
        Command::Sweep { which: SweepKind::Eta(c) } => (c, Some(Experiment::SweepEta)),
        Command::Sweep { which: SweepKind::Strength(c) } => (c, Some(Experiment::SweepStrength)),
        Command::Sweep { which: SweepKind::Kappa(c) } => (c, Some(Experiment::SweepKappa)),
        Command::Floquet { which: FloquetKind::Bands(c) } => (c, Some(Experiment::FloquetBands)),
        Command::Reversal(c) => (c, Some(Experiment::Reversal)),
        Command::FindReversal(c) => (c, Some(Experiment::FindReversal)),
        Command::Run(c) => (c, None),
    }
}

/// Writes the output of one resolved run.
pub fn execute(config: &RunConfig, w: &mut dyn Write) -> Result<(), CliError> {
    let params = config.ratchet_params();
    let run = &config.run;
    let json = run.format == Format::Json;
    if !json {
        write_header(w, config)?;
    }
    match config.experiment {
        Experiment::Evolve => {
            let records = time_series_experiment(&params, run.periods)?;
            if json {
                write_json(w, config, json!({ "records": records }))?;
            } else {
                output::trajectory_csv(w, &records)?;
            }
        }
        Experiment::SweepEta | Experiment::SweepStrength | Experiment::SweepKappa => {
            let result = match config.experiment {
                Experiment::SweepEta => eta_sweep(&params, &run.values, run.periods)?,
                Experiment::SweepStrength => strength_sweep(&params, &run.values, run.periods)?,
                _ => {
                    let kappas: Vec<f64> = run.values.iter().map(|v| v * PI).collect();
                    kappa_sweep(&params, &kappas, run.periods)?
                }
            };
            if json {
                write_json(w, config, serde_json::to_value(&result).map_err(io::Error::from)?)?;
            } else {
                output::sweep_csv(w, &run.values, &result)?;
            }
        }
        Experiment::FloquetBands => {
            let spectrum = band_scan(&params, run.x0_points)?;
            if json {
                let data = json!({
                    "x0": spectrum.x0_grid,
                    "bands": output::bands_columns(&spectrum),
                });
                write_json(w, config, data)?;
            } else {
                output::bands_csv(w, &spectrum)?;
            }
        }
        Experiment::Reversal => {
            let (k1, k2) = order_currents(&params, run.periods)?;
            let metric = qratchet_core::experiments::order_reversal_difference(&params, run.periods)?;
            if json {
                let data = json!({
                    "strength_p": params.strength_p,
                    "mean_k_v1_first": k1,
                    "mean_k_v2_first": k2,
                    "metric": metric,
                });
                write_json(w, config, data)?;
            } else {
                writeln!(w, "strength_p,mean_k_v1_first,mean_k_v2_first,metric")?;
                writeln!(w, "{},{},{},{}", num(params.strength_p), num(k1), num(k2), num(metric))?;
            }
        }
        Experiment::FindReversal => {
            let interval = (run.interval[0], run.interval[1]);
            let p_star = find_reversal_strength(&params, interval, run.periods)?;
            if json {
                write_json(w, config, json!({ "strength_p_star": p_star }))?;
            } else {
                writeln!(w, "strength_p_star")?;
                writeln!(w, "{}", num(p_star))?;
            }
        }
    }
    Ok(())
}

fn run_inner(argv: Vec<OsString>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            return Err(CliError::Usage(e.to_string()));
        }
    };
    let (common, experiment) = split(cli.command);
    let file = common.config.as_deref().map(read_config).transpose()?;
    if experiment.is_none() && file.is_none() {
        return Err(CliError::Usage("run needs --config".into()));
    }
    let config = resolve(file, &common.flags()?, experiment)?;
    match &common.out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            execute(&config, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            execute(&config, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match run_inner(argv.into_iter().map(Into::into).collect()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qratchet: {e}");
            e.exit_code()
        }
    }
}
