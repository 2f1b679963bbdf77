//! Quantum delta-kicked flashing ratchet driven by two spatially symmetric
//! potentials, `alpha sin 2x` and `sin x`, flashed with a time delay.
//!
//! The wavefunction lives on the integer momentum lattice and starts in the
//! uniform zero-momentum state. [`propagator`] evolves it period by period,
//! [`observables`] extracts currents and the per-period force, [`floquet`]
//! gives quasienergy bands at `kappa = pi`, and [`experiments`] runs the
//! sweeps built on top.

pub mod bessel;
pub mod error;
pub mod experiments;
pub mod floquet;
pub mod observables;
pub mod params;
pub mod propagator;
pub mod state;

pub use error::{RatchetError, Result};
pub use params::{derive_params, KickOrder, PhysicalUnits, RatchetParams};
pub use propagator::{evolve, period_step, Potential, Trajectory, TrajectoryRecord};
pub use state::MomentumState;

/// The uniform zero-momentum state.
pub fn uniform_initial_state() -> MomentumState {
    MomentumState::uniform()
}
