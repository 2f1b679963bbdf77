//! Expectation values, the per-period force, and line fits of time series.

use crate::error::{RatchetError, Result};
use crate::params::RatchetParams;
use crate::propagator::{slot_potentials, Potential};
use crate::state::MomentumState;

/// `<k> = sum_k k |c_k|^2`
pub fn mean_momentum(state: &MomentumState) -> f64 {
    state.iter().map(|(k, c)| k as f64 * c.norm_sqr()).sum()
}

/// `<k^2> = sum_k k^2 |c_k|^2`
pub fn mean_kinetic(state: &MomentumState) -> f64 {
    state
        .iter()
        .map(|(k, c)| {
            let k = k as f64;
            k * k * c.norm_sqr()
        })
        .sum()
}

/// `(k, |c_k|^2)` for every site above the state's tail tolerance.
pub fn momentum_distribution(state: &MomentumState) -> Vec<(i64, f64)> {
    state
        .iter()
        .map(|(k, c)| (k, c.norm_sqr()))
        .filter(|&(_, p)| p > state.tail_tol())
        .collect()
}

/// `Re sum_k conj(c_{k+shift}) c_k = <cos(shift x)>` for a normalized state.
fn cos_expectation(state: &MomentumState, shift: usize) -> f64 {
    let amps = state.amps();
    if shift >= amps.len() {
        return 0.0;
    }
    amps.iter()
        .zip(&amps[shift..])
        .map(|(lo, hi)| (hi.conj() * lo).re)
        .sum()
}

/// `P <dv/dx>`, contracted exactly from the state's momentum coherences.
pub fn potential_gradient_expectation(
    state: &MomentumState,
    potential: Potential,
    strength_p: f64,
    alpha: f64,
) -> f64 {
    let grad = match potential {
        Potential::V1 => 2.0 * alpha * cos_expectation(state, 2),
        Potential::V2 => cos_expectation(state, 1),
        Potential::Combined => 2.0 * alpha * cos_expectation(state, 2) + cos_expectation(state, 1),
    };
    strength_p * grad
}

/// Sum of the gradient expectations at the two kick instants of a period.
///
/// Normalized so that the change of `<k>` over the period equals
/// `-period_force`.
pub fn period_force(
    pre_first_kick: &MomentumState,
    pre_second_kick: &MomentumState,
    params: &RatchetParams,
) -> f64 {
    let (first, second) = slot_potentials(params.kick_order);
    let (p, a) = (params.strength_p, params.alpha);
    potential_gradient_expectation(pre_first_kick, first, p, a)
        + potential_gradient_expectation(pre_second_kick, second, p, a)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through the points with `t0 <= t <= t1`.
pub fn slope_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<LineFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if pts.len() < 10 {
        return Err(RatchetError::DegenerateWindow(format!(
            "{} points in [{}, {}], need at least 10",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stv: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mv)).sum();
    if stt == 0.0 {
        return Err(RatchetError::DegenerateWindow("all times coincide".into()));
    }
    let slope = stv / stt;
    let intercept = mv - slope * mt;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mv).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}
