//! Dimensionless model parameters and their derivation from lab units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{RatchetError, Result};

/// Probability threshold used for window truncation unless overridden.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
/// Hard limit on |k| before propagation aborts.
pub const DEFAULT_K_CAP: i64 = 1 << 16;
/// Relative strength of the `sin 2x` potential used throughout.
pub const DEFAULT_ALPHA: f64 = 0.3;

/// Which potential is flashed in the first slot of each period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KickOrder {
    /// `alpha sin 2x` at `t = n + eta`, `sin x` at `t = n + 1`.
    #[default]
    V1First,
    /// The two potentials swap slots.
    V2First,
}

impl KickOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            KickOrder::V1First => "v1-first",
            KickOrder::V2First => "v2-first",
        }
    }
}

impl std::str::FromStr for KickOrder {
    type Err = RatchetError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1-first" | "v1_first" | "V1_FIRST" => Ok(KickOrder::V1First),
            "v2-first" | "v2_first" | "V2_FIRST" => Ok(KickOrder::V2First),
            other => Err(RatchetError::InvalidParameter(format!(
                "unknown kick order '{other}' (expected v1-first or v2-first)"
            ))),
        }
    }
}

/// Parameters of the one-period map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatchetParams {
    /// Effective Planck constant.
    pub kappa: f64,
    /// Kick strength `P = K / kappa`.
    pub strength_p: f64,
    /// Relative strength of the `sin 2x` potential.
    pub alpha: f64,
    /// Delay of the first kick inside the period, in `[0, 1)`.
    pub eta: f64,
    pub kick_order: KickOrder,
    pub tail_tol: f64,
    pub k_cap: i64,
}

impl Default for RatchetParams {
    fn default() -> Self {
        RatchetParams {
            kappa: PI,
            strength_p: 0.5,
            alpha: DEFAULT_ALPHA,
            eta: 0.5,
            kick_order: KickOrder::V1First,
            tail_tol: DEFAULT_TAIL_TOL,
            k_cap: DEFAULT_K_CAP,
        }
    }
}

impl RatchetParams {
    pub fn new(kappa: f64, strength_p: f64, eta: f64) -> Self {
        RatchetParams {
            kappa,
            strength_p,
            eta,
            ..Default::default()
        }
    }

    /// Same as [`RatchetParams::new`] with `kappa` given in units of pi.
    pub fn with_kappa_pi(kappa_pi: f64, strength_p: f64, eta: f64) -> Self {
        Self::new(kappa_pi * PI, strength_p, eta)
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn order(mut self, order: KickOrder) -> Self {
        self.kick_order = order;
        self
    }

    pub fn strength(mut self, strength_p: f64) -> Self {
        self.strength_p = strength_p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(RatchetError::InvalidParameter(msg));
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.strength_p.is_finite() && self.strength_p >= 0.0) {
            return bad(format!("strength P must be >= 0, got {}", self.strength_p));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.eta >= 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in [0, 1), got {}", self.eta));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1e-3) {
            return bad(format!("tail_tol must lie in (0, 1e-3), got {}", self.tail_tol));
        }
        if self.k_cap < 16 {
            return bad(format!("k_cap must be >= 16, got {}", self.k_cap));
        }
        Ok(())
    }

    /// Coincident kicks: one combined potential per period.
    pub fn coincident(&self) -> bool {
        self.eta == 0.0
    }
}

/// Laboratory quantities behind the dimensionless map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub omega_r: f64,
    pub period: f64,
    pub v0: f64,
    pub hbar: f64,
    pub k_l: f64,
    pub mass: f64,
    pub lambda: f64,
}

impl PhysicalUnits {
    fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_R", self.omega_r),
            ("T", self.period),
            ("V0", self.v0),
            ("hbar", self.hbar),
            ("k_L", self.k_l),
            ("m", self.mass),
            ("lambda", self.lambda),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(RatchetError::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Returns `(kappa, P)` with `kappa = 8 omega_R T`, `K = kappa T V0 / hbar`
/// and `P = K / kappa`.
pub fn derive_params(units: &PhysicalUnits) -> Result<(f64, f64)> {
    units.validate()?;
    let kappa = 8.0 * units.omega_r * units.period;
    let k_eff = kappa * units.period * units.v0 / units.hbar;
    Ok((kappa, k_eff / kappa))
}
