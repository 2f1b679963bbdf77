//! Wavefunctions on the integer momentum lattice.
//!
//! A state stores amplitudes `c_k` for a contiguous window of momenta;
//! `psi(x) = sum_k c_k e^{ikx} / sqrt(2 pi)`. Position samples live on the
//! grid `x_j = 2 pi j / N` and are scaled by `sqrt(2 pi / N)` so that the
//! transform between the two bases is unitary.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{RatchetError, Result};
use crate::params::DEFAULT_TAIL_TOL;

/// Width of the band at each end of the window watched for leakage.
pub const EDGE_BAND: usize = 8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Complex amplitudes for momenta `k_min .. k_min + amps.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumState {
    k_min: i64,
    amps: Vec<Complex64>,
    tail_tol: f64,
}

impl MomentumState {
    pub fn new(k_min: i64, amps: Vec<Complex64>, tail_tol: f64) -> Self {
        assert!(!amps.is_empty(), "a momentum state needs at least one site");
        MomentumState {
            k_min,
            amps,
            tail_tol,
        }
    }

    /// The uniform zero-momentum state: amplitude 1 at `k = 0`.
    pub fn uniform() -> Self {
        Self::plane_wave(0)
    }

    pub fn plane_wave(k: i64) -> Self {
        Self::new(k, vec![Complex64::new(1.0, 0.0)], DEFAULT_TAIL_TOL)
    }

    /// Builds a state from `(k, amplitude)` pairs; unspecified sites are zero.
    pub fn from_pairs(pairs: &[(i64, Complex64)]) -> Self {
        let lo = pairs.iter().map(|p| p.0).min().expect("empty pair list");
        let hi = pairs.iter().map(|p| p.0).max().unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(k, c) in pairs {
            amps[(k - lo) as usize] += c;
        }
        Self::new(lo, amps, DEFAULT_TAIL_TOL)
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.amps.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitude at momentum `k`, zero outside the window.
    pub fn amp(&self, k: i64) -> Complex64 {
        if k < self.k_min || k > self.k_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amps[(k - self.k_min) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.k_min + i as i64, c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Probability in the outermost `EDGE_BAND` sites at the low and high end.
    pub fn edge_probability(&self) -> (f64, f64) {
        let band = EDGE_BAND.min(self.amps.len());
        let lo = self.amps[..band].iter().map(|c| c.norm_sqr()).sum();
        let hi = self.amps[self.amps.len() - band..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        (lo, hi)
    }

    /// Smallest and largest momentum whose probability exceeds `tail_tol`.
    pub fn support(&self) -> (i64, i64) {
        let mut it = self
            .iter()
            .filter(|(_, c)| c.norm_sqr() > self.tail_tol)
            .map(|(k, _)| k);
        match it.next() {
            None => (self.k_min, self.k_min),
            Some(first) => {
                let last = it.last().unwrap_or(first);
                (first, last)
            }
        }
    }

    /// Drops edge sites whose cumulative probability per side stays below
    /// `tail_tol / 8`.
    pub fn trimmed(mut self) -> Self {
        let budget = self.tail_tol / 8.0;
        let mut lo = 0;
        let mut acc = 0.0;
        while lo + 1 < self.amps.len() {
            acc += self.amps[lo].norm_sqr();
            if acc >= budget {
                break;
            }
            lo += 1;
        }
        let mut hi = self.amps.len();
        acc = 0.0;
        while hi > lo + 1 {
            acc += self.amps[hi - 1].norm_sqr();
            if acc >= budget {
                break;
            }
            hi -= 1;
        }
        if lo > 0 || hi < self.amps.len() {
            self.amps.truncate(hi);
            self.amps.drain(..lo);
            self.k_min += lo as i64;
        }
        self
    }

    /// Extends the window with zero sites on both sides.
    pub fn padded(&self, below: usize, above: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut amps = Vec::with_capacity(self.amps.len() + below + above);
        amps.resize(below, zero);
        amps.extend_from_slice(&self.amps);
        amps.resize(amps.len() + above, zero);
        MomentumState {
            k_min: self.k_min - below as i64,
            amps,
            tail_tol: self.tail_tol,
        }
    }

    /// Unitary samples `sqrt(2 pi / N) psi(x_j)` on `x_j = 2 pi j / N`.
    pub fn position_samples(&self, n: usize) -> Result<Vec<Complex64>> {
        if n < self.amps.len() {
            return Err(RatchetError::GridUnderflow {
                grid: n,
                span: self.amps.len(),
            });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in self.iter() {
            buf[k.rem_euclid(n as i64) as usize] = c;
        }
        fft(n, true).process(&mut buf);
        let scale = 1.0 / (n as f64).sqrt();
        buf.iter_mut().for_each(|s| *s *= scale);
        Ok(buf)
    }

    /// Inverse of [`MomentumState::position_samples`], read back on the
    /// momentum window `k_min .. k_min + N`.
    ///
    /// Fails when the outermost `min(8, N / 16)` sites at either end carry
    /// more than `tail_tol`, because that signals wrap-around.
    pub fn from_position_samples(
        samples: &[Complex64],
        k_min: i64,
        tail_tol: f64,
    ) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(RatchetError::GridUnderflow { grid: 0, span: 1 });
        }
        let mut buf = samples.to_vec();
        fft(n, false).process(&mut buf);
        let scale = 1.0 / (n as f64).sqrt();
        let amps: Vec<Complex64> = (0..n)
            .map(|i| buf[(k_min + i as i64).rem_euclid(n as i64) as usize] * scale)
            .collect();

        let band = EDGE_BAND.min(n / 16);
        if band > 0 {
            let lo: f64 = amps[..band].iter().map(|c| c.norm_sqr()).sum();
            let hi: f64 = amps[n - band..].iter().map(|c| c.norm_sqr()).sum();
            if lo > tail_tol || hi > tail_tol {
                return Err(RatchetError::WindowOverflow(format!(
                    "edge probability ({lo:e}, {hi:e}) on window [{k_min}, {}] exceeds {tail_tol:e}",
                    k_min + n as i64 - 1
                )));
            }
        }
        Ok(MomentumState {
            k_min,
            amps,
            tail_tol,
        })
    }

    /// Largest `|c_k - d_k|` over the union of both windows.
    pub fn max_abs_diff(&self, other: &MomentumState) -> f64 {
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        (lo..=hi)
            .map(|k| (self.amp(k) - other.amp(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Like [`MomentumState::max_abs_diff`] after removing the global phase
    /// that best aligns `other` with `self`.
    pub fn max_abs_diff_up_to_phase(&self, other: &MomentumState) -> f64 {
        let lo = self.k_min.min(other.k_min);
        let hi = self.k_max().max(other.k_max());
        let overlap: Complex64 = (lo..=hi).map(|k| other.amp(k).conj() * self.amp(k)).sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        (lo..=hi)
            .map(|k| (self.amp(k) - phase * other.amp(k)).norm())
            .fold(0.0, f64::max)
    }
}

/// Smallest power of two at least `max(min, 16)`.
pub fn grid_size(min: usize) -> usize {
    min.max(16).next_power_of_two()
}
