//! Time series and parameter sweeps from the uniform initial state.
//!
//! Sweep points are independent trajectories and run on the rayon pool;
//! results are collected in parameter order, so a sweep is a pure function
//! of its inputs.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{RatchetError, Result};
use crate::params::{KickOrder, RatchetParams};
use crate::propagator::{evolve, TrajectoryRecord};
use crate::state::MomentumState;

/// Time delays compared at `kappa = pi`.
pub const FIGURE_ETAS: [f64; 8] = [
    1.0 / 7.0,
    2.0 / 7.0,
    3.0 / 8.0,
    1.0 / 2.0,
    5.0 / 9.0,
    2.0 / 3.0,
    7.0 / 10.0,
    4.0 / 5.0,
];

/// `(kappa / pi, eta)` pairs of the strength comparison.
pub const STRENGTH_CONFIGURATIONS: [(f64, f64); 4] = [(0.5, 0.5), (0.5, 0.0), (1.0, 0.5), (1.0, 0.0)];

/// Periods averaged for the early-time current.
pub const EARLY_WINDOW: (usize, usize) = (10, 40);

pub const DEFAULT_PERIODS: usize = 200;

/// `kappa = 0.05 pi, 0.10 pi, ..., 4.00 pi`.
pub fn default_kappa_grid() -> Vec<f64> {
    (1..=80).map(|i| i as f64 * 0.05 * PI).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter: String,
    pub values: Vec<f64>,
    pub final_mean_k: Vec<f64>,
    /// Mean `<k>` over `EARLY_WINDOW`; NaN when the run is shorter.
    pub early_mean_k: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<Vec<TrajectoryRecord>>>,
    pub periods: usize,
    pub params: RatchetParams,
}

impl SweepResult {
    /// Row index of the value closest to `v`.
    pub fn index_of(&self, v: f64) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
            .map(|(i, _)| i)
    }
}

/// Full per-period records from the uniform state.
pub fn time_series_experiment(params: &RatchetParams, n_periods: usize) -> Result<Vec<TrajectoryRecord>> {
    Ok(evolve(&MomentumState::uniform(), params, n_periods, false)?.records)
}

/// `<k>` after `n_periods`.
pub fn final_mean_k(params: &RatchetParams, n_periods: usize) -> Result<f64> {
    let records = time_series_experiment(params, n_periods)?;
    Ok(records.last().map(|r| r.mean_k).unwrap_or(0.0))
}

fn early_mean(records: &[TrajectoryRecord]) -> f64 {
    let (a, b) = EARLY_WINDOW;
    let window: Vec<f64> = records
        .iter()
        .filter(|r| r.t >= a && r.t <= b)
        .map(|r| r.mean_k)
        .collect();
    if records.len() < b {
        f64::NAN
    } else {
        window.iter().sum::<f64>() / window.len() as f64
    }
}

fn sweep<F>(
    parameter: &str,
    base: &RatchetParams,
    values: &[f64],
    n_periods: usize,
    keep_series: bool,
    point: F,
) -> Result<SweepResult>
where
    F: Fn(&RatchetParams, f64) -> RatchetParams + Sync,
{
    let runs: Vec<Vec<TrajectoryRecord>> = values
        .par_iter()
        .map(|&v| time_series_experiment(&point(base, v), n_periods))
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        parameter: parameter.to_string(),
        values: values.to_vec(),
        final_mean_k: runs.iter().map(|r| r.last().map_or(0.0, |x| x.mean_k)).collect(),
        early_mean_k: runs.iter().map(|r| early_mean(r)).collect(),
        series: keep_series.then_some(runs),
        periods: n_periods,
        params: *base,
    })
}

/// Current versus time delay; keeps the full series of every row.
pub fn eta_sweep(params: &RatchetParams, etas: &[f64], n_periods: usize) -> Result<SweepResult> {
    sweep("eta", params, etas, n_periods, true, |p, v| RatchetParams { eta: v, ..*p })
}

/// Final current versus kick strength at the given `kappa`, `eta`.
pub fn strength_sweep(params: &RatchetParams, strengths: &[f64], n_periods: usize) -> Result<SweepResult> {
    sweep("strength_p", params, strengths, n_periods, false, |p, v| RatchetParams {
        strength_p: v,
        ..*p
    })
}

/// [`strength_sweep`] for each of [`STRENGTH_CONFIGURATIONS`].
pub fn strength_sweep_configurations(
    params: &RatchetParams,
    strengths: &[f64],
    n_periods: usize,
) -> Result<Vec<SweepResult>> {
    STRENGTH_CONFIGURATIONS
        .iter()
        .map(|&(kappa_pi, eta)| {
            let base = RatchetParams {
                kappa: kappa_pi * PI,
                eta,
                ..*params
            };
            strength_sweep(&base, strengths, n_periods)
        })
        .collect()
}

/// Final current versus `kappa` (radians) at the given `eta` and `P`.
pub fn kappa_sweep(params: &RatchetParams, kappas: &[f64], n_periods: usize) -> Result<SweepResult> {
    sweep("kappa", params, kappas, n_periods, false, |p, v| RatchetParams { kappa: v, ..*p })
}

/// Final currents with `v1` first and with `v2` first.
pub fn order_currents(params: &RatchetParams, n_periods: usize) -> Result<(f64, f64)> {
    let (a, b) = rayon::join(
        || final_mean_k(&params.order(KickOrder::V1First), n_periods),
        || final_mean_k(&params.order(KickOrder::V2First), n_periods),
    );
    Ok((a?, b?))
}

/// `|2 (k1 - k2) / (k1 + k2)|` for the two kick orders.
pub fn order_reversal_difference(params: &RatchetParams, n_periods: usize) -> Result<f64> {
    let (k1, k2) = order_currents(params, n_periods)?;
    let sum = k1 + k2;
    if sum.abs() < 1e-8 {
        return Err(RatchetError::MetricUndefined(format!(
            "currents {k1:e} and {k2:e} sum to {sum:e}"
        )));
    }
    Ok((2.0 * (k1 - k2) / sum).abs())
}

/// Width at which the bisection for the reversal strength stops.
pub const REVERSAL_RESOLUTION: f64 = 0.01;

/// Bisects on the sign of the final current as a function of `P`.
pub fn find_reversal_strength(
    params: &RatchetParams,
    interval: (f64, f64),
    n_periods: usize,
) -> Result<f64> {
    let (mut lo, mut hi) = interval;
    if !(hi > lo) {
        return Err(RatchetError::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
    }
    let current = |p: f64| final_mean_k(&params.strength(p), n_periods);
    let (f_lo, f_hi) = rayon::join(|| current(lo), || current(hi));
    let f_lo = f_lo?;
    if f_lo.signum() == f_hi?.signum() {
        return Err(RatchetError::NoSignChange { lo, hi });
    }
    while hi - lo > REVERSAL_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if current(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
