use std::f64::consts::{E, PI, TAU};

use equilibria_core::concentration::*;
use equilibria_core::eigen::{diagonalize, Spectrum};
use equilibria_core::lattice::*;
use equilibria_core::quench::*;
use equilibria_core::recurrence::*;
use equilibria_core::sampling::{default_horizon, SamplingParams};
use equilibria_core::{CMatrix, Complex64, Error};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `⟨A(t)⟩ = cos(t)/2` with `‖A‖ = 1/2`.
fn two_level() -> QuenchSetup {
    let s = Spectrum::from_levels(vec![0.0, 1.0]).unwrap();
    let r = 0.5f64.sqrt();
    let psi = BasisState::new(vec![c(r), c(r)]).unwrap();
    let a = HermitianOperator::new(CMatrix::from_real(2, 2, &[0.0, 0.5, 0.5, 0.0])).unwrap();
    make_setup(&s, &psi, &a).unwrap()
}

fn three_level() -> QuenchSetup {
    let s = Spectrum::from_levels(vec![0.0, 1.0, 2.0f64.sqrt()]).unwrap();
    let amp = c((1.0f64 / 3.0).sqrt());
    make_fidelity_setup(&s, &BasisState::new(vec![amp; 3]).unwrap()).unwrap()
}

#[test]
fn two_level_events_sit_at_full_periods() {
    let setup = two_level();
    let params = ScanParams::new(0.1, 0.05, 0.01, 1e4);
    let scan = recurrence_scan(&setup, Quantity::Observable, &params).unwrap();
    // |cos t / 2 - 1/2| <= 0.05  <=>  cos t >= 0.9
    let half = 0.9f64.acos();
    let events = scan.events();
    assert_eq!(events.len(), ((1e4 - half) / TAU).floor() as usize);
    for (k, e) in events.iter().enumerate() {
        let n = (k + 1) as f64;
        assert!((e.t_start - (TAU * n - half)).abs() <= params.dt / 10.0 + 1e-9);
        assert!((e.duration - 2.0 * half).abs() <= 2.0 * params.dt / 10.0 + 1e-9);
    }
    let t = scan.empirical_t.unwrap();
    assert!((t - TAU).abs() <= params.dt);
    assert!((scan.c_a.unwrap() - 1.0).abs() < 1e-12);
    let bound = scan.lower_bound.unwrap();
    assert!((bound - 0.05 / (2.0 * E) * ((1.0 - 0.1) / (E * 0.5f64.sqrt())).exp()).abs() < 1e-15);
    assert_eq!(scan.bound_satisfied(), Some(true));
}

#[test]
fn events_hold_on_a_finer_grid() {
    for (setup, quantity, u) in [(two_level(), Quantity::Observable, 0.1), (three_level(), Quantity::Fidelity, 0.1)] {
        let params = ScanParams::new(u, 0.05, 0.01, 2000.0);
        let scan = recurrence_scan(&setup, quantity, &params).unwrap();
        assert!(!scan.events().is_empty());
        let f0 = expectation_at(&setup, 0.0).unwrap();
        let close = |t: f64| match quantity {
            Quantity::Observable => (expectation_at(&setup, t).unwrap() - f0).abs() <= u * setup.obs_norm(),
            Quantity::Fidelity => 1.0 - fidelity_at(&setup, t) <= u,
        };
        for w in scan.events().windows(2) {
            assert!(w[0].t_start + w[0].duration < w[1].t_start);
        }
        for e in scan.events() {
            assert!(e.duration >= params.delta);
            for j in 0..=100 {
                assert!(close(e.t_start + e.duration * j as f64 / 100.0));
            }
        }
    }
}

#[test]
fn three_level_returns() {
    let setup = three_level();
    let params = ScanParams::new(0.1, 0.05, 0.01, 1e4);
    let scan = recurrence_scan(&setup, Quantity::Fidelity, &params).unwrap();
    assert!(!scan.events().is_empty());
    // returns need t ≈ 2πk with k√2 close to an integer
    for e in scan.events() {
        let k = (e.t_start / TAU).round();
        assert!(k >= 1.0);
        let frac = k * 2.0f64.sqrt() - (k * 2.0f64.sqrt()).round();
        assert!(frac.abs() < 0.25, "t = {}", e.t_start);
    }
    let purity = 1.0 / 3.0;
    let expected = 0.05 / (2.0 * E * E) * ((1.0 - 0.1) / (E * purity)).exp();
    assert!((scan.lower_bound.unwrap() - expected).abs() < 1e-15);
    assert_eq!(scan.bound_satisfied(), Some(true));
}

#[test]
fn shrinking_delta_never_loses_events() {
    let setup = three_level();
    let mut last = 0;
    for delta in [0.8, 0.4, 0.2, 0.1, 0.05, 0.02] {
        let scan = recurrence_scan(&setup, Quantity::Fidelity, &ScanParams::new(0.2, delta, 0.01, 3000.0)).unwrap();
        assert!(scan.events().len() >= last);
        last = scan.events().len();
    }
    assert!(last > 0);
}

#[test]
fn enlarging_u_never_shrinks_the_satisfied_set() {
    let setup = three_level();
    let mut last = 0;
    for u in [0.02, 0.05, 0.1, 0.3, 0.6, 1.0] {
        let scan = recurrence_scan(&setup, Quantity::Fidelity, &ScanParams::new(u, 0.05, 0.01, 1000.0)).unwrap();
        assert!(scan.outcome.satisfied_points >= last);
        last = scan.outcome.satisfied_points;
    }
    assert!(recurrence_scan(&setup, Quantity::Fidelity, &ScanParams::new(1.0, 0.05, 0.01, 1000.0)).unwrap().outcome.never_left);
}

#[test]
fn runs_merge_as_u_grows() {
    // |sin 2t| <= u: short runs around every multiple of π/2 for small u,
    // one unbroken residence for u >= 1
    let g = |t: f64| (2.0 * t).sin().abs();
    let small = scan_condition(&|t| g(t) <= 0.2, &ScanParams::new(0.2, 0.05, 0.01, 100.0)).unwrap();
    assert_eq!(small.events.len(), (100.0 / (PI / 2.0)) as usize);
    let big = scan_condition(&|t| g(t) <= 1.0, &ScanParams::new(1.0, 0.05, 0.01, 100.0)).unwrap();
    assert!(big.never_left);
    assert!(big.events.is_empty());
    assert_eq!(big.empirical_t(), None);
}

#[test]
fn clipped_intervals_are_not_counted() {
    let outcome = scan_condition(&|t: f64| t >= 9.5 || (4.0..5.0).contains(&t), &ScanParams::new(0.1, 0.5, 0.01, 10.0)).unwrap();
    assert_eq!(outcome.events.len(), 1);
    assert!((outcome.events[0].t_start - 4.0).abs() <= 1e-3);
    let outcome = scan_condition(&|t: f64| t <= 1.0 || (4.0..5.0).contains(&t), &ScanParams::new(0.1, 0.5, 0.01, 10.0)).unwrap();
    assert_eq!(outcome.events.len(), 1);
}

#[test]
fn stationary_state_never_leaves() {
    let s = diagonalize(&random_hermitian(4, 3)).unwrap();
    let setup = make_fidelity_setup(&s, &BasisState::new(s.vector(1)).unwrap()).unwrap();
    let scan = recurrence_scan(&setup, Quantity::Fidelity, &ScanParams::new(0.01, 0.1, 0.01, 50.0)).unwrap();
    assert!(scan.outcome.never_left);
    assert!(scan.events().is_empty());
    assert_eq!(scan.empirical_t, None);
    assert_eq!(scan.bound_satisfied(), None);
}

#[test]
fn scan_parameters_are_checked() {
    let setup = two_level();
    let cap = max_step(1.0);
    assert!((cap - PI / 10.0).abs() < 1e-15);
    assert!(recurrence_scan(&setup, Quantity::Observable, &ScanParams::new(0.1, 0.05, 0.5, 10.0)).is_err());
    assert!(recurrence_scan(&setup, Quantity::Observable, &ScanParams::new(0.0, 0.05, 0.01, 10.0)).is_err());
    assert!(recurrence_scan(&setup, Quantity::Observable, &ScanParams::new(2.5, 0.05, 0.01, 10.0)).is_err());
    assert!(recurrence_scan(&setup, Quantity::Fidelity, &ScanParams::new(1.5, 0.05, 0.01, 10.0)).is_err());
    assert!(recurrence_scan(&setup, Quantity::Fidelity, &ScanParams::new(0.5, 0.0, 0.01, 10.0)).is_err());
    // u above c_A: the scan runs, the corollary is silent
    let scan = recurrence_scan(&setup, Quantity::Observable, &ScanParams::new(1.5, 0.05, 0.01, 10.0)).unwrap();
    assert_eq!(scan.lower_bound, None);
}

#[test]
fn bound_formulas() {
    let b = recurrence_lower_bound(RecurrenceKind::Observable, 0.3, 0.3, 0.2, 1.0).unwrap();
    assert!((b - 0.2 / (2.0 * E)).abs() < 1e-15);
    let b = recurrence_lower_bound(RecurrenceKind::Fidelity, 1.0, 1.0, 0.2, 0.5).unwrap();
    assert!((b - 0.2 / (2.0 * E * E)).abs() < 1e-15);
    assert_eq!(recurrence_lower_bound(RecurrenceKind::Observable, 0.3, 0.3, 0.0, 0.2).unwrap(), 0.0);
    assert!(matches!(recurrence_lower_bound(RecurrenceKind::Observable, 0.2, 0.3, 0.1, 0.5), Err(Error::Hypothesis(_))));
    let b = fermion_recurrence_lower_bound(FermionRecurrenceKind::Correlator, 0.6, 0.1, 0.1, 1.0, 0.5, 2).unwrap();
    assert!((b - 0.0266).abs() < 5e-5);
    let b = fermion_recurrence_lower_bound(FermionRecurrenceKind::Fidelity, 1.0, 1.0, 0.3, 1.3, 0.5, 8).unwrap();
    assert!((b - 0.3 / (2.0 * E)).abs() < 1e-15);
    assert!(fermion_recurrence_lower_bound(FermionRecurrenceKind::Correlator, 0.1, 0.2, 0.1, 1.0, 0.5, 2).is_err());
}

#[test]
fn tails_of_a_constant_vanish() {
    let s = diagonalize(&random_hermitian(5, 2)).unwrap();
    let setup = make_setup(&s, &BasisState::haar(5, 3), &HermitianOperator::identity(5)).unwrap();
    let params = SamplingParams::new(100.0, 5000, 1);
    let report = empirical_tail(&setup, Quantity::Observable, &[1e-6, 0.1, 0.5], &params).unwrap();
    assert_eq!(report.empirical, vec![0.0, 0.0, 0.0]);
}

#[test]
fn tails_stay_under_the_bound() {
    let grid: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    for seed in 0..5 {
        let s = diagonalize(&random_hermitian(12, 600 + seed)).unwrap();
        let setup = make_setup(&s, &BasisState::haar(12, 700 + seed), &random_hermitian(12, 800 + seed)).unwrap();
        let params = SamplingParams::new(default_horizon(setup.min_gap().unwrap()), 20_000, seed);
        for quantity in [Quantity::Observable, Quantity::Fidelity] {
            let grid: Vec<f64> = grid.iter().map(|d| d * concentration_scale(&setup, quantity) * 10.0).collect();
            let r = empirical_tail(&setup, quantity, &grid, &params).unwrap();
            assert!(r.violations().is_empty(), "{r:?}");
            assert!(r.empirical.windows(2).all(|w| w[0] >= w[1]));
            assert!(r.bound.windows(2).all(|w| w[0] > w[1]));
            assert!(r.empirical.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}
