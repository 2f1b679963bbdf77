//! Floquet analysis at the resonance `kappa = pi`.
//!
//! At this resonance the free propagator depends on `k` only through a
//! residue class, so the period operator couples a position `x0` only to
//! the sublattice `x0 + 2 pi l / d`. The resulting `d x d` fiber unitaries
//! give quasienergy bands over `x0`; for `eta = 1/2` (d = 4) they are also
//! available in closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{RatchetError, Result};
use crate::params::{KickOrder, RatchetParams};
use crate::propagator::{free_evolve, kick_capped, slot_potentials, Potential};
use crate::state::{grid_size, MomentumState};

const TWO_PI: f64 = 2.0 * PI;
const PARAM_EPS: f64 = 1e-12;

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Signed angular difference in `(-pi, pi]`.
pub fn circular_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    if d > PI {
        d - TWO_PI
    } else {
        d
    }
}

/// Dimension of the closed fiber for these parameters.
pub fn fiber_dim(params: &RatchetParams) -> Result<usize> {
    let no_fiber = || RatchetError::NoClosedFiber {
        kappa: params.kappa,
        eta: params.eta,
    };
    if (params.kappa - PI).abs() > PARAM_EPS {
        return Err(no_fiber());
    }
    if params.eta == 0.0 {
        Ok(2)
    } else if (params.eta - 0.5).abs() < PARAM_EPS {
        Ok(4)
    } else {
        Err(no_fiber())
    }
}

/// One-period unitary restricted to the sublattice through `x0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberUnitary {
    pub x0: f64,
    pub matrix: DMatrix<Complex64>,
}

impl FiberUnitary {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |(U^dagger U - I)_{ij}|`
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Quasienergies `omega` in `[0, 2 pi)` with eigenvalues `e^{-i omega}`.
    pub fn eigenphases(&self) -> Vec<f64> {
        let schur = self.matrix.clone().schur();
        let (_, t) = schur.unpack();
        (0..self.dim()).map(|i| wrap_phase(-t[(i, i)].arg())).collect()
    }

    /// `|| U v - e^{-i omega} v ||`
    pub fn eigen_residual(&self, omega: f64, v: &[Complex64]) -> f64 {
        let d = self.dim();
        let lambda = cis(-omega);
        (0..d)
            .map(|i| {
                let uv: Complex64 = (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum();
                (uv - lambda * v[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Free propagation over `tau` periods on a `d`-point fiber: `W Lambda W^dagger`
/// with `W_{jm} = e^{i m x_j} / sqrt(d)`.
fn fiber_free(tau: f64, kappa: f64, d: usize, x0: f64) -> Result<DMatrix<Complex64>> {
    let lambda: Vec<Complex64> = (0..d)
        .map(|m| cis(-0.5 * tau * kappa * (m * m) as f64))
        .collect();
    for (m, l) in lambda.iter().enumerate() {
        let shifted = cis(-0.5 * tau * kappa * ((m + d) * (m + d)) as f64);
        if (shifted - l).norm() > 1e-12 {
            return Err(RatchetError::NoClosedFiber {
                kappa,
                eta: tau,
            });
        }
    }
    let scale = 1.0 / (d as f64).sqrt();
    let w = DMatrix::from_fn(d, d, |j, m| {
        let xj = x0 + TWO_PI * j as f64 / d as f64;
        cis(m as f64 * xj) * scale
    });
    let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda));
    Ok(&w * lam * w.adjoint())
}

fn fiber_kick(potential: Potential, p: f64, alpha: f64, d: usize, x0: f64) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|l| {
            let x = x0 + TWO_PI * l as f64 / d as f64;
            cis(-p * potential.value(x, alpha))
        }),
    ))
}

/// Builds the period operator on the fiber through `x0`.
pub fn fiber_unitary(x0: f64, params: &RatchetParams) -> Result<FiberUnitary> {
    let d = fiber_dim(params)?;
    let (p, a, kappa) = (params.strength_p, params.alpha, params.kappa);
    let matrix = if params.coincident() {
        fiber_kick(Potential::Combined, p, a, d, x0) * fiber_free(1.0, kappa, d, x0)?
    } else {
        let (first, second) = slot_potentials(params.kick_order);
        fiber_kick(second, p, a, d, x0)
            * fiber_free(1.0 - params.eta, kappa, d, x0)?
            * fiber_kick(first, p, a, d, x0)
            * fiber_free(params.eta, kappa, d, x0)?
    };
    Ok(FiberUnitary { x0, matrix })
}

struct ClosedForm {
    v2_even: f64,
    v2_odd: f64,
    p1: f64,
    p2: f64,
    s: f64,
    s_bar: f64,
}

fn radicand_checked(x0: f64, value: f64) -> Result<f64> {
    if value < -1e-12 {
        return Err(RatchetError::NegativeRadicand { x0, value });
    }
    Ok(value.max(0.0))
}

fn closed_form(x0: f64, strength_p: f64, alpha: f64) -> Result<ClosedForm> {
    let v1 = strength_p * alpha * (2.0 * x0).sin();
    let v2_even = strength_p * x0.sin();
    let v2_odd = strength_p * (x0 + FRAC_PI_2).sin();
    let p1 = (v1 + FRAC_PI_4).cos();
    let p2 = (v1 - FRAC_PI_4).cos();
    let q1 = (2.0 * v1).sin() - 1.0;
    let q2 = (2.0 * v1).sin() + 1.0;
    let c_even = v2_even.cos();
    let c_odd = v2_odd.cos();
    let r_even = radicand_checked(x0, 1.0 + 0.5 * c_even * c_even * q1)?;
    // The odd-block radicand is 1 - cos^2 p2^2 = 1 - cos^2 q2 / 2.
    let r_odd = radicand_checked(x0, 1.0 - 0.5 * c_odd * c_odd * q2)?;
    Ok(ClosedForm {
        v2_even,
        v2_odd,
        p1,
        p2,
        s: r_even.sqrt().atan2(c_even * p1),
        s_bar: r_odd.sqrt().atan2(c_odd * p2),
    })
}

/// Closed-form quasienergies `[omega^1, omega^2, omega^3, omega^4]` for
/// `kappa = pi`, `eta = 1/2`: `pi/4 -+ S` on the even sublattice (mu = 1, 3)
/// and `pi/4 -+ S_bar` on the odd one (mu = 2, 4). Eigenvalues are
/// `e^{-i omega}`.
pub fn analytic_quasienergies(x0: f64, strength_p: f64, alpha: f64) -> Result<[f64; 4]> {
    let cf = closed_form(x0, strength_p, alpha)?;
    Ok([
        FRAC_PI_4 - cf.s,
        FRAC_PI_4 - cf.s_bar,
        FRAC_PI_4 + cf.s,
        FRAC_PI_4 + cf.s_bar,
    ])
}

const DEGENERATE_DENOM: f64 = 1e-14;
const ADJACENT_STEP: f64 = 1e-3;

fn eigenvectors_at(x0: f64, strength_p: f64, alpha: f64) -> Result<Option<[[Complex64; 4]; 4]>> {
    let cf = closed_form(x0, strength_p, alpha)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = [[zero; 4]; 4];
    // (mu index, sign, sublattice pair, phase base, S, p_num, p_den)
    let blocks = [
        (0usize, 1.0, (0usize, 2usize), cf.v2_even, cf.s, cf.p2, cf.p1),
        (2, -1.0, (0, 2), cf.v2_even, cf.s, cf.p2, cf.p1),
        (1, 1.0, (1, 3), cf.v2_odd, cf.s_bar, cf.p1, cf.p2),
        (3, -1.0, (1, 3), cf.v2_odd, cf.s_bar, cf.p1, cf.p2),
    ];
    for (mu, sign, (a, b), base, s, p_num, p_den) in blocks {
        let phi = base + sign * s;
        let denom2 = 2.0 - 2.0 * p_den * phi.cos();
        if denom2 < DEGENERATE_DENOM {
            return Ok(None);
        }
        let denom = denom2.sqrt();
        out[mu][a] = p_num * cis(-phi) / denom;
        out[mu][b] = Complex64::new(0.0, -1.0) * (Complex64::new(1.0, 0.0) - p_den * cis(-phi)) / denom;
    }
    Ok(Some(out))
}

/// Closed-form eigenvectors `alpha^mu`, `mu = 1..4`, indexed by sublattice
/// `l = 0..3`, paired with [`analytic_quasienergies`].
///
/// Where a normalization denominator vanishes the vector is taken from an
/// adjacent `x0` on either side.
pub fn analytic_eigenvectors(x0: f64, strength_p: f64, alpha: f64) -> Result<[[Complex64; 4]; 4]> {
    if let Some(v) = eigenvectors_at(x0, strength_p, alpha)? {
        return Ok(v);
    }
    for step in [ADJACENT_STEP, -ADJACENT_STEP] {
        if let Some(v) = eigenvectors_at(x0 + step, strength_p, alpha)? {
            return Ok(v);
        }
    }
    Err(RatchetError::InvalidParameter(format!(
        "eigenvectors degenerate in a neighbourhood of x0 = {x0}"
    )))
}

/// Quasienergy bands sampled on an `x0` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BandSpectrum {
    pub x0_grid: Vec<f64>,
    /// `bands[i][b]` is band `labels[b]` at `x0_grid[i]`, in `[0, 2 pi)`.
    pub bands: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl BandSpectrum {
    pub fn band_count(&self) -> usize {
        self.labels.len()
    }

    fn column(&self, label: usize) -> usize {
        self.labels
            .iter()
            .position(|&l| l == label)
            .unwrap_or_else(|| panic!("no band labelled {label}"))
    }

    /// Band `label` unwrapped along `x0`.
    pub fn unwrapped(&self, label: usize) -> Vec<f64> {
        let col = self.column(label);
        let mut out = Vec::with_capacity(self.bands.len());
        for (i, row) in self.bands.iter().enumerate() {
            if i == 0 {
                out.push(row[col]);
            } else {
                let prev = out[i - 1];
                out.push(prev + circular_diff(row[col], prev));
            }
        }
        out
    }

    /// Largest jump between neighbouring grid points over all unwrapped bands.
    pub fn max_jump(&self) -> f64 {
        self.labels
            .iter()
            .flat_map(|&l| {
                let u = self.unwrapped(l);
                u.windows(2).map(|w| (w[1] - w[0]).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    /// Smallest circular distance between two bands on the grid.
    pub fn min_gap(&self, a: usize, b: usize) -> f64 {
        let (ca, cb) = (self.column(a), self.column(b));
        self.bands
            .iter()
            .map(|row| circular_diff(row[ca], row[cb]).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..d).collect(), &mut out);
    out
}

/// Orders `phases` so that entry `b` is closest to `target[b]`.
fn match_to(phases: &[f64], target: &[f64], perms: &[Vec<usize>]) -> Vec<f64> {
    let best = perms
        .iter()
        .min_by(|p, q| {
            let cost = |perm: &Vec<usize>| -> f64 {
                perm.iter()
                    .enumerate()
                    .map(|(b, &e)| circular_diff(phases[e], target[b]).powi(2))
                    .sum()
            };
            cost(p).total_cmp(&cost(q))
        })
        .expect("at least one permutation");
    best.iter().map(|&e| phases[e]).collect()
}

fn closed_form_applies(params: &RatchetParams) -> bool {
    matches!(fiber_dim(params), Ok(4)) && params.kick_order == KickOrder::V1First
}

fn initial_order(phases: Vec<f64>, x0: f64, params: &RatchetParams, perms: &[Vec<usize>]) -> Result<Vec<f64>> {
    if closed_form_applies(params) {
        let target = analytic_quasienergies(x0, params.strength_p, params.alpha)?;
        Ok(match_to(&phases, &target, perms))
    } else {
        let mut sorted = phases;
        sorted.sort_by(f64::total_cmp);
        Ok(sorted)
    }
}

fn extrapolate(prev: &[f64], prev2: Option<&[f64]>) -> Vec<f64> {
    match prev2 {
        None => prev.to_vec(),
        Some(p2) => prev
            .iter()
            .zip(p2)
            .map(|(&a, &b)| a + circular_diff(a, b))
            .collect(),
    }
}

/// Fiber eigenphases on `x0 = i (2 pi / d) / x0_count`, assigned to bands by
/// continuity so that crossings remain crossings.
///
/// For `kappa = pi`, `eta = 1/2` bands carry the closed-form labels `mu`;
/// otherwise labels follow ascending order at `x0 = 0`.
pub fn band_scan(params: &RatchetParams, x0_count: usize) -> Result<BandSpectrum> {
    let d = fiber_dim(params)?;
    if x0_count < 2 {
        return Err(RatchetError::InvalidParameter("x0_count must be >= 2".into()));
    }
    let perms = permutations(d);
    let width = TWO_PI / d as f64;
    let x0_grid: Vec<f64> = (0..x0_count).map(|i| width * i as f64 / x0_count as f64).collect();
    let mut bands: Vec<Vec<f64>> = Vec::with_capacity(x0_count);
    for (i, &x0) in x0_grid.iter().enumerate() {
        let phases = fiber_unitary(x0, params)?.eigenphases();
        let row = if i == 0 {
            initial_order(phases, x0, params, &perms)?
        } else {
            let pred = extrapolate(&bands[i - 1], if i >= 2 { Some(&bands[i - 2]) } else { None });
            match_to(&phases, &pred, &perms)
        };
        bands.push(row);
    }
    Ok(BandSpectrum {
        x0_grid,
        bands,
        labels: (1..=d).collect(),
    })
}

/// A located band crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub x0: f64,
    pub gap: f64,
}

/// Finds sign changes of `omega_a - omega_b` on the scan grid and refines
/// each by bisection on the fiber eigenphases.
pub fn band_crossings(
    params: &RatchetParams,
    spectrum: &BandSpectrum,
    a: usize,
    b: usize,
) -> Result<Vec<Crossing>> {
    let ca = spectrum.column(a);
    let cb = spectrum.column(b);
    let d = spectrum.band_count();
    let perms = permutations(d);
    let diff = |row: &[f64]| circular_diff(row[ca], row[cb]);
    let mut out = Vec::new();
    for i in 0..spectrum.bands.len().saturating_sub(1) {
        let (lo_row, hi_row) = (&spectrum.bands[i], &spectrum.bands[i + 1]);
        let (dl, dh) = (diff(lo_row), diff(hi_row));
        // Same sign, or a wrap of the difference through +-pi rather than zero.
        if dl.signum() == dh.signum() || (dl - dh).abs() > PI {
            continue;
        }
        let (mut xl, mut xh) = (spectrum.x0_grid[i], spectrum.x0_grid[i + 1]);
        let (mut rl, mut rh) = (lo_row.clone(), hi_row.clone());
        let mut gap = dl.abs().min(dh.abs());
        let mut x_best = if dl.abs() < dh.abs() { xl } else { xh };
        for _ in 0..60 {
            let xm = 0.5 * (xl + xh);
            let pred: Vec<f64> = rl.iter().zip(&rh).map(|(&u, &v)| u + 0.5 * circular_diff(v, u)).collect();
            let rm = match_to(&fiber_unitary(xm, params)?.eigenphases(), &pred, &perms);
            let dm = diff(&rm);
            if dm.abs() < gap {
                gap = dm.abs();
                x_best = xm;
            }
            if dm.signum() == dl.signum() {
                xl = xm;
                rl = rm;
            } else {
                xh = xm;
                rh = rm;
            }
            if xh - xl < 1e-15 {
                break;
            }
        }
        out.push(Crossing { x0: x_best, gap });
    }
    Ok(out)
}

fn require_closed_form(params: &RatchetParams) -> Result<()> {
    params.validate()?;
    if closed_form_applies(params) {
        Ok(())
    } else {
        Err(RatchetError::NoClosedFiber {
            kappa: params.kappa,
            eta: params.eta,
        })
    }
}

/// Assembles `psi(t)` from the closed-form Floquet decomposition, starting
/// from the uniform state, and returns it on the momentum window `k_window`.
pub fn reconstruct_integer_time(
    t: u32,
    params: &RatchetParams,
    k_window: (i64, i64),
) -> Result<MomentumState> {
    require_closed_form(params)?;
    let (lo, hi) = k_window;
    if hi < lo {
        return Err(RatchetError::InvalidParameter(format!("empty k window [{lo}, {hi}]")));
    }
    let span = (hi - lo + 1) as usize;
    let n = grid_size(span);
    let quarter = n / 4;
    let (p, a) = (params.strength_p, params.alpha);
    let scale = 1.0 / (n as f64).sqrt();
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for r in 0..quarter {
        let x0 = TWO_PI * r as f64 / n as f64;
        let omega = analytic_quasienergies(x0, p, a)?;
        let vecs = analytic_eigenvectors(x0, p, a)?;
        for l in 0..4 {
            // Uniform start: projection of (1, 1, 1, 1) onto each alpha^mu.
            let value: Complex64 = (0..4)
                .map(|mu| {
                    let overlap: Complex64 = vecs[mu].iter().map(|c| c.conj()).sum();
                    vecs[mu][l] * cis(-omega[mu] * t as f64) * overlap
                })
                .sum();
            samples[r + l * quarter] = value * scale;
        }
    }
    let full = MomentumState::from_position_samples(&samples, lo - ((n - span) / 2) as i64, params.tail_tol)?;
    let outside: f64 = full
        .iter()
        .filter(|(k, _)| *k < lo || *k > hi)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    if outside > params.tail_tol {
        return Err(RatchetError::WindowOverflow(format!(
            "probability {outside:e} outside k window [{lo}, {hi}] at t = {t}"
        )));
    }
    let amps = (lo..=hi).map(|k| full.amp(k)).collect();
    Ok(MomentumState::new(lo, amps, params.tail_tol))
}

/// Undoes the last kick and the last free segment of a period, giving the
/// state right after the first kick (`psi(t - 1/2)` for `eta = 1/2`).
pub fn half_period_state(state: &MomentumState, params: &RatchetParams) -> Result<MomentumState> {
    params.validate()?;
    let (_, second) = slot_potentials(params.kick_order);
    let (last, tau) = if params.coincident() {
        (Potential::Combined, 1.0)
    } else {
        (second, 1.0 - params.eta)
    };
    let unkicked = kick_capped(state, last, -params.strength_p, params.alpha, params.k_cap)?;
    Ok(free_evolve(&unkicked, -tau, params.kappa))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(p: f64) -> RatchetParams {
        RatchetParams::with_kappa_pi(1.0, p, 0.5)
    }

    #[test]
    fn symmetric_point() {
        for p in [0.0, 0.5, 2.0] {
            let w = analytic_quasienergies(0.0, p, 0.3).unwrap();
            assert!(w[0].abs() < 1e-15);
            assert!((w[2] - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn free_rotor_bands_are_flat() {
        for x0 in [0.0, 0.3, 1.1] {
            let w = analytic_quasienergies(x0, 0.0, 0.3).unwrap();
            assert!(w[0].abs() < 1e-15 && w[1].abs() < 1e-15);
            assert!((w[2] - FRAC_PI_2).abs() < 1e-15 && (w[3] - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn free_fiber_is_squared_half_step() {
        let u = fiber_unitary(0.4, &half(0.0)).unwrap();
        let f = fiber_free(0.5, PI, 4, 0.4).unwrap();
        assert!((&u.matrix - &f * &f).norm() < 1e-14);
        let mut ph = u.eigenphases();
        ph.sort_by(f64::total_cmp);
        let want = [0.0, 0.0, FRAC_PI_2, FRAC_PI_2];
        for (g, w) in ph.iter().zip(want) {
            assert!(circular_diff(*g, w).abs() < 1e-12);
        }
    }

    #[test]
    fn unsupported_fiber() {
        let err = fiber_unitary(0.1, &RatchetParams::with_kappa_pi(1.0, 0.5, 0.3)).unwrap_err();
        assert!(matches!(err, RatchetError::NoClosedFiber { .. }));
        assert!(fiber_unitary(0.1, &RatchetParams::with_kappa_pi(0.5, 0.5, 0.5)).is_err());
    }

    #[test]
    fn fiber_unitarity() {
        for (i, &x0) in [0.05, 0.61, 1.2, 2.9].iter().enumerate() {
            let p = 0.3 + i as f64;
            for eta in [0.0, 0.5] {
                let u = fiber_unitary(x0, &RatchetParams::with_kappa_pi(1.0, p, eta)).unwrap();
                assert!(u.unitarity_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        for x0 in [0.1, 0.7, 1.3] {
            let v = analytic_eigenvectors(x0, 0.5, 0.3).unwrap();
            for mu in 0..4 {
                let n: f64 = v[mu].iter().map(|c| c.norm_sqr()).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
            for (a, b) in [(0, 2), (1, 3)] {
                let ip: Complex64 = v[a].iter().zip(&v[b]).map(|(x, y)| x.conj() * y).sum();
                assert!(ip.norm() < 1e-10);
            }
            assert!(v[0][1].norm() == 0.0 && v[0][3].norm() == 0.0);
            assert!(v[1][0].norm() == 0.0 && v[1][2].norm() == 0.0);
        }
    }

    #[test]
    fn degenerate_eigenvectors_fall_back_to_neighbour() {
        // p1 = 1 needs P alpha sin 2x0 = -pi/4; at x0 = 3 pi / 4 the even
        // block then has S = v2, so phi = v2 - S vanishes for mu = 3.
        let p = PI / 4.0 / 0.3;
        let x0 = 3.0 * FRAC_PI_4;
        let v = analytic_eigenvectors(x0, p, 0.3).unwrap();
        let u = fiber_unitary(x0, &half(p)).unwrap();
        let w = analytic_quasienergies(x0, p, 0.3).unwrap();
        for mu in 0..4 {
            assert!(v[mu].iter().all(|c| c.re.is_finite() && c.im.is_finite()));
            assert!(u.eigen_residual(w[mu], &v[mu]) < 1e-2);
        }
    }

    #[test]
    fn half_period_roundtrip() {
        let params = half(0.7);
        let s = crate::propagator::evolve(&MomentumState::uniform(), &params, 5, false)
            .unwrap()
            .final_state;
        let back = half_period_state(&s, &params).unwrap();
        let fwd = free_evolve(&back, 0.5, PI);
        let fwd = crate::propagator::kick(&fwd, Potential::V2, 0.7, 0.3).unwrap();
        assert!(fwd.max_abs_diff(&s) < 1e-12);
        let free = half_period_state(&s, &half(0.0)).unwrap();
        assert!(free.max_abs_diff(&free_evolve(&s, -0.5, PI)) < 1e-15);
    }

    #[test]
    fn reconstruction_at_zero_is_uniform() {
        let s = reconstruct_integer_time(0, &half(0.5), (-32, 31)).unwrap();
        assert!(s.max_abs_diff(&MomentumState::uniform()) < 1e-10);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(2).len(), 2);
    }
}
