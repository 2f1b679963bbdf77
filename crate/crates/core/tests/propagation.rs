use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qratchet_core::observables::{
    mean_kinetic, mean_momentum, momentum_distribution, potential_gradient_expectation,
};
use qratchet_core::propagator::{dense_period_matrix, free_evolve, kick, kick_capped};
use qratchet_core::{
    evolve, period_step, KickOrder, MomentumState, Potential, RatchetError, RatchetParams,
};

fn state_from(parts: &[(f64, f64)], k_min: i64) -> MomentumState {
    let norm = parts.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    let amps = parts.iter().map(|&(a, b)| Complex64::new(a, b) / norm).collect();
    MomentumState::new(k_min, amps, 1e-14)
}

fn amps_strategy() -> impl Strategy<Value = (Vec<(f64, f64)>, i64)> {
    (
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4..48)
            .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)),
        -100i64..100,
    )
}

#[test]
fn dense_oracle_matches_split_step_for_several_configurations() {
    for params in [
        RatchetParams::with_kappa_pi(1.0, 0.5, 0.5),
        RatchetParams::with_kappa_pi(0.5, 0.5, 0.0),
        RatchetParams::with_kappa_pi(0.73, 1.0, 0.3).order(KickOrder::V2First),
    ] {
        let split = evolve(&MomentumState::uniform(), &params, 30, false).unwrap().final_state;
        let dense = dense_period_matrix(&params, (-128, 128))
            .unwrap()
            .propagate(&MomentumState::uniform(), 30);
        assert!(split.max_abs_diff(&dense) < 1e-9, "{params:?}");
    }
}

#[test]
fn dense_oracle_interior_is_unitary() {
    let op = dense_period_matrix(&RatchetParams::with_kappa_pi(1.0, 1.5, 0.5), (-96, 96)).unwrap();
    assert!(op.interior_unitarity_residual() < 1e-10);
}

#[test]
fn narrow_dense_window_is_rejected() {
    assert!(dense_period_matrix(&RatchetParams::with_kappa_pi(1.0, 5.0, 0.5), (-4, 4)).is_err());
}

#[test]
fn kick_order_swaps_slots() {
    let base = RatchetParams::with_kappa_pi(1.0, 0.8, 0.4);
    let s0 = MomentumState::uniform();
    let manual = {
        let s = free_evolve(&s0, 0.4, PI);
        let s = kick(&s, Potential::V2, 0.8, 0.3).unwrap();
        let s = free_evolve(&s, 0.6, PI);
        kick(&s, Potential::V1, 0.8, 0.3).unwrap()
    };
    let stepped = period_step(&s0, &base.order(KickOrder::V2First)).unwrap();
    assert!(stepped.max_abs_diff(&manual) < 1e-13);
}

#[test]
fn coincident_kicks_use_combined_potential() {
    let params = RatchetParams::with_kappa_pi(0.5, 1.2, 0.0);
    let s = kick(&MomentumState::uniform(), Potential::V2, 0.7, 0.3).unwrap();
    let manual = kick(&free_evolve(&s, 1.0, 0.5 * PI), Potential::Combined, 1.2, 0.3).unwrap();
    let split = kick(&kick(&free_evolve(&s, 1.0, 0.5 * PI), Potential::V1, 1.2, 0.3).unwrap(), Potential::V2, 1.2, 0.3).unwrap();
    assert!(period_step(&s, &params).unwrap().max_abs_diff(&manual) < 1e-13);
    assert!(manual.max_abs_diff(&split) < 1e-12);
}

#[test]
fn first_kick_of_uniform_state_carries_no_force() {
    let params = RatchetParams::with_kappa_pi(1.0, 0.5, 0.5);
    let traj = evolve(&MomentumState::uniform(), &params, 3, true).unwrap();
    assert_eq!(traj.pre_kick.len(), 3);
    let first = &traj.pre_kick[0].first;
    assert_eq!(potential_gradient_expectation(first, Potential::V1, 0.5, 0.3), 0.0);
}

#[test]
fn distribution_sums_to_one_after_long_runs() {
    for params in [
        RatchetParams::with_kappa_pi(1.0, 1.5, 0.5),
        RatchetParams::with_kappa_pi(2.625, 1.5, 0.5),
        RatchetParams::with_kappa_pi(0.5, 0.5, 0.0),
    ] {
        let s = evolve(&MomentumState::uniform(), &params, 200, false).unwrap().final_state;
        let total: f64 = momentum_distribution(&s).iter().map(|p| p.1).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn tiny_momentum_cap_overflows() {
    let s = MomentumState::uniform();
    let err = kick_capped(&s, Potential::V2, 40.0, 0.3, 16).unwrap_err();
    assert!(matches!(err, RatchetError::WindowOverflow(_)));
    assert!(err.is_numerical_guard());
}

#[test]
fn invalid_parameters_are_rejected() {
    let bad = RatchetParams {
        eta: 1.2,
        ..RatchetParams::default()
    };
    assert!(matches!(
        evolve(&MomentumState::uniform(), &bad, 5, false),
        Err(RatchetError::InvalidParameter(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kicks_preserve_norm((parts, k_min) in amps_strategy(), p in 0.0..6.0f64, which in 0usize..3) {
        let pot = [Potential::V1, Potential::V2, Potential::Combined][which];
        let s = state_from(&parts, k_min);
        let out = kick(&s, pot, p, 0.3).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kick_is_inverted_by_negative_strength((parts, k_min) in amps_strategy(), p in 0.0..4.0f64) {
        let s = state_from(&parts, k_min);
        let back = kick(&kick(&s, Potential::Combined, p, 0.3).unwrap(), Potential::Combined, -p, 0.3).unwrap();
        prop_assert!(back.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn ehrenfest_per_kick((parts, k_min) in amps_strategy(), p in 0.0..4.0f64, which in 0usize..3) {
        let pot = [Potential::V1, Potential::V2, Potential::Combined][which];
        let s = state_from(&parts, k_min);
        let dk = mean_momentum(&kick(&s, pot, p, 0.3).unwrap()) - mean_momentum(&s);
        prop_assert!((dk + potential_gradient_expectation(&s, pot, p, 0.3)).abs() < 1e-9);
    }

    #[test]
    fn free_flight_keeps_moments((parts, k_min) in amps_strategy(), tau in -1.0..1.0f64, kappa in 0.1..10.0f64) {
        let s = state_from(&parts, k_min);
        let f = free_evolve(&s, tau, kappa);
        prop_assert!((mean_momentum(&s) - mean_momentum(&f)).abs() < 1e-12);
        prop_assert!((mean_kinetic(&s) - mean_kinetic(&f)).abs() < 1e-12 * mean_kinetic(&s).max(1.0));
    }

    #[test]
    fn symmetric_kicks_give_no_current(kappa_pi in 0.1..4.0f64, eta in 0.0..0.9f64, p in 0.0..2.0f64) {
        let params = RatchetParams::with_kappa_pi(kappa_pi, p, eta).alpha(0.0);
        let traj = evolve(&MomentumState::uniform(), &params, 40, false).unwrap();
        for r in &traj.records {
            prop_assert!(r.mean_k.abs() < 1e-10);
        }
    }
}
