//! Run configuration: TOML file, command-line overrides, defaults.

use std::fs;
use std::path::Path;

use qratchet_core::experiments::{DEFAULT_PERIODS, FIGURE_ETAS};
use qratchet_core::params::{DEFAULT_ALPHA, DEFAULT_K_CAP, DEFAULT_TAIL_TOL};
use qratchet_core::{KickOrder, RatchetParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::CliError;

/// First line of every output header.
pub const HEADER_TAG: &str = "qratchet";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Evolve,
    SweepEta,
    SweepStrength,
    SweepKappa,
    FloquetBands,
    Reversal,
    FindReversal,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::SweepEta => "sweep-eta",
            Experiment::SweepStrength => "sweep-strength",
            Experiment::SweepKappa => "sweep-kappa",
            Experiment::FloquetBands => "floquet-bands",
            Experiment::Reversal => "reversal",
            Experiment::FindReversal => "find-reversal",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Physical parameters with `kappa` in units of pi.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub kappa_pi: f64,
    pub strength_p: f64,
    pub alpha: f64,
    pub eta: f64,
    pub kick_order: KickOrder,
    pub tail_tol: f64,
    pub k_cap: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub periods: usize,
    pub format: Format,
    pub x0_points: usize,
    /// Sweep values; `kappa` sweeps list `kappa / pi`.
    pub values: Vec<f64>,
    /// Bracket for the reversal search.
    pub interval: [f64; 2],
}

/// Fully resolved configuration, written verbatim into output headers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Settings where a flag replaced a file value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<String>,
    pub params: ParamsConfig,
    pub run: RunSection,
}

impl RunConfig {
    pub fn ratchet_params(&self) -> RatchetParams {
        let p = &self.params;
        RatchetParams {
            kappa: p.kappa_pi * PI,
            strength_p: p.strength_p,
            alpha: p.alpha,
            eta: p.eta,
            kick_order: p.kick_order,
            tail_tol: p.tail_tol,
            k_cap: p.k_cap,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileParams {
    kappa_pi: Option<f64>,
    strength_p: Option<f64>,
    alpha: Option<f64>,
    eta: Option<f64>,
    kick_order: Option<KickOrder>,
    tail_tol: Option<f64>,
    k_cap: Option<i64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRun {
    periods: Option<usize>,
    format: Option<Format>,
    x0_points: Option<usize>,
    values: Option<Vec<f64>>,
    interval: Option<[f64; 2]>,
}

/// A configuration document as written, before defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    experiment: Option<Experiment>,
    #[serde(default)]
    overrides: Vec<String>,
    #[serde(default)]
    params: FileParams,
    #[serde(default)]
    run: FileRun,
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub kappa_pi: Option<f64>,
    pub strength_p: Option<f64>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub kick_order: Option<KickOrder>,
    pub tail_tol: Option<f64>,
    pub periods: Option<usize>,
    pub format: Option<Format>,
    pub x0_points: Option<usize>,
    pub values: Option<Vec<f64>>,
    pub interval: Option<[f64; 2]>,
}

/// Strips the `# ` prefix from a header written by this tool, so an output
/// file can be passed back as `--config`.
fn header_body(text: &str) -> Option<String> {
    let mut lines = text.lines();
    let first = lines.next()?;
    if !first.starts_with(&format!("# {HEADER_TAG} ")) {
        return None;
    }
    let body: Vec<&str> = lines
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.strip_prefix("# ").unwrap_or(&l[1..]))
        .collect();
    Some(body.join("\n"))
}

pub fn parse_config(text: &str) -> Result<FileConfig, CliError> {
    let body = header_body(text);
    toml::from_str(body.as_deref().unwrap_or(text)).map_err(|e| CliError::Config(e.to_string()))
}

/// Reads a configuration file and applies defaults.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let file = read_config(path)?;
    resolve(Some(file), &Flags::default(), None)
}

pub fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn default_values(experiment: Experiment) -> Vec<f64> {
    match experiment {
        Experiment::SweepEta => FIGURE_ETAS.to_vec(),
        Experiment::SweepStrength => (0..=40).map(|i| i as f64 * 0.1).collect(),
        // Same products as the core grid, `i * 0.05 * pi`.
        Experiment::SweepKappa => (1..=80).map(|i| i as f64 * 0.05).collect(),
        _ => Vec::new(),
    }
}

struct Merge<'a> {
    overrides: &'a mut Vec<String>,
}

impl Merge<'_> {
    fn pick<T: PartialEq + std::fmt::Debug + Clone>(
        &mut self,
        name: &str,
        file: Option<T>,
        flag: Option<T>,
        default: T,
    ) -> T {
        match (file, flag) {
            (Some(f), Some(g)) => {
                if f != g {
                    self.overrides.push(format!("{name} = {g:?} (file: {f:?})"));
                }
                g
            }
            (None, Some(g)) => g,
            (Some(f), None) => f,
            (None, None) => default,
        }
    }
}

/// Combines file, flags and defaults; flags win over the file.
pub fn resolve(
    file: Option<FileConfig>,
    flags: &Flags,
    experiment: Option<Experiment>,
) -> Result<RunConfig, CliError> {
    let file = file.unwrap_or_default();
    let mut overrides = file.overrides.clone();
    let mut m = Merge {
        overrides: &mut overrides,
    };
    let experiment = m.pick("experiment", file.experiment, experiment, Experiment::Evolve);
    let fp = &file.params;
    let params = ParamsConfig {
        kappa_pi: m.pick("params.kappa_pi", fp.kappa_pi, flags.kappa_pi, 1.0),
        strength_p: m.pick("params.strength_p", fp.strength_p, flags.strength_p, 0.5),
        alpha: m.pick("params.alpha", fp.alpha, flags.alpha, DEFAULT_ALPHA),
        eta: m.pick("params.eta", fp.eta, flags.eta, 0.5),
        kick_order: m.pick("params.kick_order", fp.kick_order, flags.kick_order, KickOrder::V1First),
        tail_tol: m.pick("params.tail_tol", fp.tail_tol, flags.tail_tol, DEFAULT_TAIL_TOL),
        k_cap: fp.k_cap.unwrap_or(DEFAULT_K_CAP),
    };
    let fr = &file.run;
    let run = RunSection {
        periods: m.pick("run.periods", fr.periods, flags.periods, DEFAULT_PERIODS),
        format: m.pick("run.format", fr.format, flags.format, Format::Csv),
        x0_points: m.pick("run.x0_points", fr.x0_points, flags.x0_points, 256),
        values: m.pick("run.values", fr.values.clone(), flags.values.clone(), default_values(experiment)),
        interval: m.pick("run.interval", fr.interval, flags.interval, [2.0, 3.0]),
    };
    let config = RunConfig {
        experiment,
        overrides,
        params,
        run,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    let field = |name: &str, msg: String| Err(CliError::Config(format!("{name}: {msg}")));
    let p = &config.params;
    let r = &config.run;
    if !(p.kappa_pi.is_finite() && p.kappa_pi > 0.0) {
        return field("params.kappa_pi", format!("must be positive, got {}", p.kappa_pi));
    }
    if !(p.strength_p.is_finite() && p.strength_p >= 0.0) {
        return field("params.strength_p", format!("must be >= 0, got {}", p.strength_p));
    }
    if !(p.alpha.is_finite() && p.alpha >= 0.0) {
        return field("params.alpha", format!("must be >= 0, got {}", p.alpha));
    }
    if !(p.eta >= 0.0 && p.eta < 1.0) {
        return field("params.eta", format!("must lie in [0, 1), got {}", p.eta));
    }
    if !(p.tail_tol > 0.0 && p.tail_tol < 1e-3) {
        return field("params.tail_tol", format!("must lie in (0, 1e-3), got {}", p.tail_tol));
    }
    if p.k_cap < 16 {
        return field("params.k_cap", format!("must be >= 16, got {}", p.k_cap));
    }
    if r.periods == 0 {
        return field("run.periods", "must be >= 1".into());
    }
    if r.x0_points < 2 {
        return field("run.x0_points", format!("must be >= 2, got {}", r.x0_points));
    }
    if !(r.interval[0] < r.interval[1]) {
        return field("run.interval", format!("must be increasing, got {:?}", r.interval));
    }
    let sweep = matches!(
        config.experiment,
        Experiment::SweepEta | Experiment::SweepStrength | Experiment::SweepKappa
    );
    if sweep && r.values.is_empty() {
        return field("run.values", "sweep needs at least one value".into());
    }
    if let Some(bad) = r.values.iter().find(|v| !v.is_finite()) {
        return field("run.values", format!("non-finite value {bad}"));
    }
    config
        .ratchet_params()
        .validate()
        .or_else(|e| field("params", e.to_string()))
}
