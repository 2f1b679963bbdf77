//! One-period evolution: free flight, kick, free flight, kick.
//!
//! Kicks are applied on a position grid (FFT route). [`dense_period_matrix`]
//! builds the same operator from Bessel coefficients as an independent check.
//!
//! Sign convention: `e^{-iP sin x} = sum_m J_m(P) e^{-imx}`, so the kick
//! maps `c_k` to `c'_{k'} = sum_k J_{k - k'}(P) c_k`. Both routes use it.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j_all, kick_bandwidth};
use crate::error::{RatchetError, Result};
use crate::observables;
use crate::params::{KickOrder, RatchetParams, DEFAULT_K_CAP};
use crate::state::{grid_size, MomentumState, EDGE_BAND};

/// Extra sites added on each side when a kick leaks into the window edge.
pub const WINDOW_GROWTH: usize = 64;

/// Spatial profile of a kick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Potential {
    /// `alpha sin 2x`
    V1,
    /// `sin x`
    V2,
    /// `alpha sin 2x + sin x`
    Combined,
}

impl Potential {
    pub fn value(self, x: f64, alpha: f64) -> f64 {
        match self {
            Potential::V1 => alpha * (2.0 * x).sin(),
            Potential::V2 => x.sin(),
            Potential::Combined => alpha * (2.0 * x).sin() + x.sin(),
        }
    }

    pub fn derivative(self, x: f64, alpha: f64) -> f64 {
        match self {
            Potential::V1 => 2.0 * alpha * (2.0 * x).cos(),
            Potential::V2 => x.cos(),
            Potential::Combined => 2.0 * alpha * (2.0 * x).cos() + x.cos(),
        }
    }

    /// Momentum half-width of `e^{-iPv}` beyond which the coupling
    /// probability is below `tol`.
    pub fn bandwidth(self, strength_p: f64, alpha: f64, tol: f64) -> usize {
        match self {
            Potential::V1 => 2 * kick_bandwidth(strength_p * alpha, tol),
            Potential::V2 => kick_bandwidth(strength_p, tol),
            Potential::Combined => {
                kick_bandwidth(strength_p, tol / 2.0) + 2 * kick_bandwidth(strength_p * alpha, tol / 2.0)
            }
        }
    }

    /// Fourier weights `w_d` of `e^{-iPv(x)} = sum_d w_d e^{-idx}` for
    /// `|d| <= max_shift`, stored at index `d + max_shift`.
    pub fn kick_coefficients(self, strength_p: f64, alpha: f64, max_shift: usize) -> Vec<f64> {
        let width = 2 * max_shift + 1;
        let signed = |j: &[f64], m: i64| -> f64 {
            let v = j[m.unsigned_abs() as usize];
            if m < 0 && m % 2 != 0 {
                -v
            } else {
                v
            }
        };
        let sin_x = || {
            let j = bessel_j_all(max_shift, strength_p);
            (0..width)
                .map(|i| signed(&j, i as i64 - max_shift as i64))
                .collect::<Vec<f64>>()
        };
        let sin_2x = || {
            let j = bessel_j_all(max_shift / 2 + 1, strength_p * alpha);
            (0..width)
                .map(|i| {
                    let d = i as i64 - max_shift as i64;
                    if d % 2 == 0 {
                        signed(&j, d / 2)
                    } else {
                        0.0
                    }
                })
                .collect::<Vec<f64>>()
        };
        match self {
            Potential::V2 => sin_x(),
            Potential::V1 => sin_2x(),
            Potential::Combined => {
                // Convolution needs the full V1 weights, not just |d| <= max_shift.
                let wide = 2 * max_shift;
                let j2 = bessel_j_all(wide, strength_p);
                let j1 = bessel_j_all(max_shift + 1, strength_p * alpha);
                (0..width)
                    .map(|i| {
                        let d = i as i64 - max_shift as i64;
                        let mut sum = 0.0;
                        for m in -(max_shift as i64)..=(max_shift as i64) {
                            let rest = d - 2 * m;
                            if rest.unsigned_abs() as usize <= wide {
                                sum += signed(&j1, m) * signed(&j2, rest);
                            }
                        }
                        sum
                    })
                    .collect()
            }
        }
    }
}

/// Potentials occupying the first and second slot of a period.
pub fn slot_potentials(order: KickOrder) -> (Potential, Potential) {
    match order {
        KickOrder::V1First => (Potential::V1, Potential::V2),
        KickOrder::V2First => (Potential::V2, Potential::V1),
    }
}

#[inline]
fn free_phase(k: i64, tau: f64, kappa: f64) -> Complex64 {
    let k2 = (k * k) as f64;
    Complex64::from_polar(1.0, -0.5 * tau * kappa * k2)
}

/// Multiplies every `c_k` by `e^{-i tau kappa k^2 / 2}`. Negative `tau`
/// undoes a free segment.
pub fn free_evolve(state: &MomentumState, tau: f64, kappa: f64) -> MomentumState {
    let mut out = state.clone();
    let k_min = out.k_min();
    for (i, c) in out.amps_mut().iter_mut().enumerate() {
        *c *= free_phase(k_min + i as i64, tau, kappa);
    }
    out
}

/// Applies `e^{-iP v(x)}` with the default `k_cap`.
pub fn kick(
    state: &MomentumState,
    potential: Potential,
    strength_p: f64,
    alpha: f64,
) -> Result<MomentumState> {
    kick_capped(state, potential, strength_p, alpha, DEFAULT_K_CAP)
}

/// Applies `e^{-iP v(x)}` on a position grid sized for the kick bandwidth.
///
/// The output window is trimmed back while the discarded probability per
/// side stays below `tail_tol^2`, then padded by `EDGE_BAND` empty sites.
pub fn kick_capped(
    state: &MomentumState,
    potential: Potential,
    strength_p: f64,
    alpha: f64,
    k_cap: i64,
) -> Result<MomentumState> {
    if strength_p == 0.0 || (potential == Potential::V1 && alpha == 0.0) {
        return Ok(state.clone());
    }
    let tol = state.tail_tol();
    let bandwidth = potential.bandwidth(strength_p, alpha, tol / 4.0);
    let mut margin = bandwidth + EDGE_BAND;
    loop {
        let lo = state.k_min() - margin as i64;
        let hi = state.k_max() + margin as i64;
        if lo < -k_cap || hi > k_cap {
            return Err(RatchetError::WindowOverflow(format!(
                "kick needs momenta [{lo}, {hi}] beyond k_cap = {k_cap}"
            )));
        }
        let n = grid_size(2 * (state.len() + 2 * margin));
        let k_lo = state.k_min() - ((n - state.len()) / 2) as i64;
        let mut samples = state.position_samples(n)?;
        let dx = 2.0 * std::f64::consts::PI / n as f64;
        for (j, s) in samples.iter_mut().enumerate() {
            let v = potential.value(j as f64 * dx, alpha);
            *s *= Complex64::from_polar(1.0, -strength_p * v);
        }
        match MomentumState::from_position_samples(&samples, k_lo, tol) {
            Ok(out) => {
                let out = trim_tails(out, tol * tol);
                return Ok(out.padded(EDGE_BAND, EDGE_BAND));
            }
            Err(RatchetError::WindowOverflow(_)) => margin += WINDOW_GROWTH,
            Err(e) => return Err(e),
        }
    }
}

fn trim_tails(state: MomentumState, budget: f64) -> MomentumState {
    let tol = state.tail_tol();
    // `trimmed` drops up to tail_tol / 8 per side.
    state.with_tail_tol(budget * 8.0).trimmed().with_tail_tol(tol)
}

/// States seen immediately before the two kicks of one period. For
/// coincident kicks both entries hold the same state.
#[derive(Clone, Debug, PartialEq)]
pub struct PreKickStates {
    pub first: MomentumState,
    pub second: MomentumState,
}

fn step_inner(state: &MomentumState, params: &RatchetParams) -> Result<(MomentumState, PreKickStates)> {
    let (first, second) = slot_potentials(params.kick_order);
    let (p, a, kappa) = (params.strength_p, params.alpha, params.kappa);
    if params.coincident() {
        let s = free_evolve(state, 1.0, kappa);
        let out = kick_capped(&s, Potential::Combined, p, a, params.k_cap)?;
        return Ok((
            out,
            PreKickStates {
                first: s.clone(),
                second: s,
            },
        ));
    }
    let s1 = free_evolve(state, params.eta, kappa);
    let after1 = kick_capped(&s1, first, p, a, params.k_cap)?;
    let s2 = free_evolve(&after1, 1.0 - params.eta, kappa);
    let out = kick_capped(&s2, second, p, a, params.k_cap)?;
    Ok((out, PreKickStates { first: s1, second: s2 }))
}

/// One period: free `eta`, first kick, free `1 - eta`, second kick.
/// With `eta = 0` a single free period is followed by one combined kick.
pub fn period_step(state: &MomentumState, params: &RatchetParams) -> Result<MomentumState> {
    params.validate()?;
    step_inner(state, params).map(|(s, _)| s)
}

/// Observables recorded at the end of each period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub mean_k: f64,
    pub mean_k2: f64,
    pub norm_error: f64,
    pub period_force: f64,
    pub k_support: (i64, i64),
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    /// Filled only when half steps were requested.
    pub pre_kick: Vec<PreKickStates>,
    pub final_state: MomentumState,
}

impl Trajectory {
    pub fn mean_k_series(&self) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t as f64, r.mean_k)).collect()
    }
}

/// Norm drift that aborts a run.
pub const NORM_GUARD: f64 = 1e-8;

/// Applies [`period_step`] `n_periods` times and records every period.
pub fn evolve(
    state: &MomentumState,
    params: &RatchetParams,
    n_periods: usize,
    record_half_steps: bool,
) -> Result<Trajectory> {
    params.validate()?;
    if n_periods == 0 {
        return Err(RatchetError::InvalidParameter("n_periods must be >= 1".into()));
    }
    let mut cur = state.clone().with_tail_tol(params.tail_tol);
    let mut records = Vec::with_capacity(n_periods);
    let mut pre_kick = Vec::new();
    for t in 1..=n_periods {
        let (next, pre) = step_inner(&cur, params)?;
        let force = observables::period_force(&pre.first, &pre.second, params);
        let norm_error = (1.0 - next.norm_sqr()).abs();
        if !next.is_finite() || norm_error > NORM_GUARD {
            return Err(RatchetError::Unitarity(format!(
                "norm drift {norm_error:e} at period {t}"
            )));
        }
        records.push(TrajectoryRecord {
            t,
            mean_k: observables::mean_momentum(&next),
            mean_k2: observables::mean_kinetic(&next),
            norm_error,
            period_force: force,
            k_support: next.support(),
        });
        if record_half_steps {
            pre_kick.push(pre);
        }
        cur = next;
    }
    Ok(Trajectory {
        records,
        pre_kick,
        final_state: cur,
    })
}

/// The one-period operator as an explicit matrix on `k_lo..=k_hi`.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub k_min: i64,
    pub matrix: DMatrix<Complex64>,
    /// Sites at each edge excluded from the unitarity check.
    pub margin: usize,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |(M^dagger M - I)_{ij}|` over the interior block.
    pub fn interior_unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let (a, b) = (self.margin, n - self.margin);
        let mut worst = 0.0f64;
        for i in a..b {
            for j in a..b {
                let mut s = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    s += self.matrix[(r, i)].conj() * self.matrix[(r, j)];
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Applies the operator `n` times; amplitudes outside the window are lost.
    pub fn propagate(&self, state: &MomentumState, n: usize) -> MomentumState {
        let dim = self.dim();
        let mut v = nalgebra::DVector::from_iterator(
            dim,
            (0..dim).map(|i| state.amp(self.k_min + i as i64)),
        );
        for _ in 0..n {
            v = &self.matrix * v;
        }
        MomentumState::new(self.k_min, v.iter().copied().collect(), state.tail_tol())
    }
}

fn dense_kick(potential: Potential, p: f64, alpha: f64, dim: usize) -> DMatrix<Complex64> {
    let w = potential.kick_coefficients(p, alpha, dim);
    DMatrix::from_fn(dim, dim, |r, c| {
        // c'_{k'} = sum_k w_{k - k'} c_k
        let d = c as i64 - r as i64;
        Complex64::new(w[(d + dim as i64) as usize], 0.0)
    })
}

fn dense_free(tau: f64, kappa: f64, k_min: i64, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        (0..dim).map(|i| free_phase(k_min + i as i64, tau, kappa)),
    ))
}

/// Builds the period operator from diagonal free phases and Bessel
/// convolution matrices. Fails when the window is too narrow for the
/// interior block to be unitary to `1e-10`.
pub fn dense_period_matrix(params: &RatchetParams, k_range: (i64, i64)) -> Result<DenseOperator> {
    params.validate()?;
    let (lo, hi) = k_range;
    if hi < lo {
        return Err(RatchetError::InvalidParameter(format!("empty k range [{lo}, {hi}]")));
    }
    let dim = (hi - lo + 1) as usize;
    let (p, a, kappa) = (params.strength_p, params.alpha, params.kappa);
    let tol = params.tail_tol / 4.0;
    let (matrix, margin) = if params.coincident() {
        let m = dense_kick(Potential::Combined, p, a, dim) * dense_free(1.0, kappa, lo, dim);
        (m, Potential::Combined.bandwidth(p, a, tol))
    } else {
        let (first, second) = slot_potentials(params.kick_order);
        let m = dense_kick(second, p, a, dim)
            * dense_free(1.0 - params.eta, kappa, lo, dim)
            * dense_kick(first, p, a, dim)
            * dense_free(params.eta, kappa, lo, dim);
        (m, first.bandwidth(p, a, tol) + second.bandwidth(p, a, tol))
    };
    if 2 * margin >= dim {
        return Err(RatchetError::Unitarity(format!(
            "k range of {dim} sites leaves no interior for a one-period bandwidth of {margin}"
        )));
    }
    let op = DenseOperator {
        k_min: lo,
        matrix,
        margin,
    };
    let residual = op.interior_unitarity_residual();
    if residual > 1e-10 {
        return Err(RatchetError::Unitarity(format!(
            "interior residual {residual:e} on [{lo}, {hi}]"
        )));
    }
    Ok(op)
}
