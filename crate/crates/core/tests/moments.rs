use equilibria_core::eigen::{diagonalize, Spectrum};
use equilibria_core::lattice::*;
use equilibria_core::moments::*;
use equilibria_core::quench::*;
use equilibria_core::random::{haar_orbitals, rng};
use equilibria_core::sampling::{default_horizon, SamplingParams};
use equilibria_core::{CMatrix, Complex64, Error};
use proptest::prelude::*;

fn generic_setup(dim: usize, seed: u64) -> QuenchSetup {
    let s = diagonalize(&random_hermitian(dim, seed)).unwrap();
    make_setup(&s, &BasisState::haar(dim, seed.wrapping_add(1)), &random_hermitian(dim, seed.wrapping_add(2))).unwrap()
}

/// `Σ Π w_a Π conj(w_b)` over all `⌈q/2⌉ + ⌊q/2⌋` tuples whose gaps cancel.
fn brute_force_moment(table: &GapTable, q: usize) -> Complex64 {
    let n = table.len();
    let plus = q.div_ceil(2);
    let window = q as f64 * table.tolerance;
    let mut total = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; q];
    loop {
        let mut sum = 0.0;
        let mut w = Complex64::new(1.0, 0.0);
        for (slot, &i) in idx.iter().enumerate() {
            let e = &table.entries[i];
            if slot < plus {
                sum += e.gap;
                w *= e.weight;
            } else {
                sum -= e.gap;
                w *= e.weight.conj();
            }
        }
        if sum.abs() < window {
            total += w;
        }
        let mut k = 0;
        while k < q {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == q {
            return total;
        }
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for (dim, seed) in [(4usize, 1u64), (5, 2), (6, 3)] {
        let setup = generic_setup(dim, seed);
        for quantity in [Quantity::Observable, Quantity::Fidelity] {
            let table = gap_table(&setup, quantity, setup.tolerance()).unwrap();
            for q in 1..=4 {
                let fast = exact_moment(&table, q).unwrap();
                let slow = brute_force_moment(&table, q);
                assert!((fast - slow.re).abs() < 1e-13, "D={dim} {quantity:?} q={q}: {fast} vs {slow}");
                assert!(slow.im.abs() < 1e-14);
            }
        }
    }
}

/// `U diag(levels) U†` for a Haar-random `U`, symmetrized.
fn rotated(levels: &[f64], seed: u64) -> HermitianOperator {
    let d = levels.len();
    let u = haar_orbitals(d, d, &mut rng(seed));
    let raw = CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| u[k][i] * u[k][j].conj() * levels[k]).sum());
    let adj = raw.adjoint();
    HermitianOperator::new(CMatrix::from_fn(d, d, |i, j| (raw[(i, j)] + adj[(i, j)]) * 0.5)).unwrap()
}

#[test]
fn enumeration_matches_period_average_on_resonant_spectra() {
    // integer levels: f is 2π-periodic, gaps repeat and many tuples resonate
    // without any index coincidence
    let cases = [vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 1.0, 3.0, 4.0, 4.0], vec![-1.0, 0.0, 2.0, 3.0]];
    for (case, levels) in cases.iter().enumerate() {
        let d = levels.len();
        let s = diagonalize(&rotated(levels, case as u64)).unwrap();
        let psi = BasisState::haar(d, 40 + case as u64);
        let a = random_hermitian(d, 50 + case as u64);
        let setup = make_setup(&s, &psi, &a).unwrap();
        let fid = make_fidelity_setup(&s, &psi).unwrap();
        let points = 256;
        for (setup, quantity) in [(&setup, Quantity::Observable), (&fid, Quantity::Fidelity)] {
            let table = gap_table(setup, quantity, setup.tolerance()).unwrap();
            let dynamics = QuenchDynamics::new(setup, quantity);
            let mean = dynamics.average();
            assert!((table.mean.re - mean).abs() < 1e-12);
            for q in 1..=4 {
                let exact: f64 = (0..points)
                    .map(|k| {
                        let t = std::f64::consts::TAU * k as f64 / points as f64;
                        let f = match quantity {
                            Quantity::Observable => expectation_at(setup, t).unwrap(),
                            Quantity::Fidelity => fidelity_at(setup, t),
                        };
                        (f - mean).powi(q as i32)
                    })
                    .sum::<f64>()
                    / points as f64;
                let mu = exact_moment(&table, q).unwrap();
                assert!((mu - exact).abs() < 1e-11, "{levels:?} {quantity:?} q={q}: {mu} vs {exact}");
            }
        }
    }
}

#[test]
fn two_level_values() {
    let s = Spectrum::from_levels(vec![0.0, 1.0]).unwrap();
    let r = 0.5f64.sqrt();
    let psi = BasisState::new(vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)]).unwrap();
    let a = HermitianOperator::new(CMatrix::from_real(2, 2, &[0.0, 0.5, 0.5, 0.0])).unwrap();
    let setup = make_setup(&s, &psi, &a).unwrap();
    let table = gap_table(&setup, Quantity::Observable, setup.tolerance()).unwrap();
    assert_eq!(table.len(), 2);
    for e in &table.entries {
        assert!((e.gap.abs() - 1.0).abs() < 1e-15);
        assert!((e.weight.re - 0.25).abs() < 1e-15);
    }
    assert!((exact_moment(&table, 2).unwrap() - 0.125).abs() < 1e-15);
    assert_eq!(exact_moment(&table, 3).unwrap(), 0.0);
    assert!((exact_moment(&table, 4).unwrap() - 3.0 / 128.0).abs() < 1e-15);
    let params = SamplingParams::new(1e4 * std::f64::consts::TAU, 100_000, 5);
    let m2 = sampled_moment(&setup, Quantity::Observable, 2, &params).unwrap();
    assert!((m2.mean - 0.125).abs() <= 3.0 * m2.stderr);
    let m3 = sampled_moment(&setup, Quantity::Observable, 3, &params).unwrap();
    assert!(m3.mean.abs() <= 3.0 * m3.stderr);
}

#[test]
fn empty_tables() {
    let s = diagonalize(&random_hermitian(5, 9)).unwrap();
    let fid = make_fidelity_setup(&s, &BasisState::new(s.vector(2)).unwrap()).unwrap();
    let table = gap_table(&fid, Quantity::Fidelity, fid.tolerance()).unwrap();
    assert!(table.is_empty());
    assert!((table.mean.re - 1.0).abs() < 1e-12);
    assert_eq!(exact_moment(&table, 2).unwrap(), 0.0);
    let setup = make_setup(&s, &BasisState::haar(5, 1), &HermitianOperator::identity(5)).unwrap();
    let table = gap_table(&setup, Quantity::Observable, setup.tolerance()).unwrap();
    assert!(table.is_empty());
    let params = SamplingParams::new(100.0, 1000, 1);
    let est = sampled_moment(&setup, Quantity::Observable, 2, &params).unwrap();
    assert!(est.mean.abs() < 1e-28 && est.stderr < 1e-28);
}

#[test]
fn invalid_orders_rejected() {
    let setup = generic_setup(4, 3);
    let table = gap_table(&setup, Quantity::Observable, setup.tolerance()).unwrap();
    assert!(matches!(exact_moment(&table, 0), Err(Error::MomentOrder(0))));
    assert!(matches!(exact_moment(&table, 5), Err(Error::MomentOrder(5))));
    assert!(matches!(check_genericity(&[0.0, 1.0], 4, 1e-10), Err(Error::GenericityOrder(4))));
    assert!(gap_table(&setup, Quantity::Observable, 0.0).is_err());
}

#[test]
fn cost_envelope_is_enforced() {
    let levels: Vec<f64> = (0..80).map(|i| i as f64 * 1.000_1 + (i as f64).sqrt()).collect();
    let support: Vec<usize> = (0..80).collect();
    let table = GapTable::from_levels(&levels, &support, 1e-10, true, 1.0, |m, n| Complex64::new(1.0 / (1 + m + n) as f64, 0.0)).unwrap();
    // 80 levels give 6320 entries: 6320² stored pairs exceed the envelope
    assert!(matches!(exact_moment(&table, 4), Err(Error::CostEnvelope { q: 4, .. })));
    assert!(exact_moment(&table, 2).is_ok());
}

#[test]
fn genericity_examples() {
    let r = check_genericity(&[0.0, 1.0, 2.0], 2, 1e-10).unwrap();
    assert!(!r.passed);
    assert!(r.violations.iter().any(|v| v.q == 2));
    assert!(check_genericity(&[0.0, 1.0, 2.0f64.sqrt()], 2, 1e-10).unwrap().passed);
    let r = check_genericity(&[0.0, 1.0, 1.0], 2, 1e-10).unwrap();
    assert_eq!(r.degenerate_levels, vec![(1, 2)]);
    assert!(!r.passed);
    // sums of three distinct levels collide: 0 + 5 + 7 = 1 + 3 + 8
    let r = check_genericity(&[0.0, 1.0, 3.0, 5.0, 7.0, 8.0].map(|x| x + 0.01 * x * x * x), 3, 1e-10).unwrap();
    assert!(r.passed);
    let r = check_genericity(&[0.0, 1.0, 3.0, 5.0 + 1e-6, 7.0, 8.0 + 1e-6], 3, 1e-5).unwrap();
    assert!(!r.passed);
    for v in &r.violations {
        assert!((v.sum_a - v.sum_b).abs() <= 3e-5 + 1e-12);
        assert_ne!(v.set_a, v.set_b);
    }
    assert_eq!(r.violation_count, r.violations.len());
}

#[test]
fn gue_draws_are_generic() {
    for seed in 0..40 {
        let s = diagonalize(&random_hermitian(16, 1000 + seed)).unwrap();
        let r = check_genericity(s.eigenvalues(), 3, default_tolerance(&s)).unwrap();
        assert!(r.passed, "seed {seed}: {} violations", r.violation_count);
    }
}

#[test]
fn derangement_counts() {
    let known = [1u128, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496];
    for (q, &d) in known.iter().enumerate() {
        assert_eq!(derangement_count(q as u32), d);
    }
    for q in 1..=18 {
        assert_eq!(derangement_count(q), derangement_nearest(q));
    }
}

#[test]
fn bound_values() {
    assert_eq!(moment_bound(BoundKind::Fidelity, 1.0, 1.0, 2), 4.0);
    assert!((moment_bound(BoundKind::Observable, 1.0, 1.0 / 8.0, 2) - 0.5).abs() < 1e-15);
    assert!((moment_bound(BoundKind::Observable, 2.0, 0.25, 3) - 27.0).abs() < 1e-12);
}

#[test]
fn uniform_fidelity_moments_stay_under_the_bound() {
    for dim in [8usize, 16, 32] {
        let s = diagonalize(&random_hermitian(dim, 77)).unwrap();
        assert!(check_genericity(s.eigenvalues(), 3, default_tolerance(&s)).unwrap().passed);
        let levels = Spectrum::from_levels(s.eigenvalues().to_vec()).unwrap();
        let amp = Complex64::new((1.0 / dim as f64).sqrt(), 0.0);
        let fid = make_fidelity_setup(&levels, &BasisState::new(vec![amp; dim]).unwrap()).unwrap();
        let purity = fidelity_average(&fid);
        assert!((purity - 1.0 / dim as f64).abs() < 1e-15);
        let table = gap_table(&fid, Quantity::Fidelity, fid.tolerance()).unwrap();
        for q in 2..=4 {
            let mu = exact_moment(&table, q).unwrap();
            assert!(mu <= moment_bound(BoundKind::Fidelity, 1.0, purity, q));
            // leading order is !q (tr ω²)^q, reduced by coincident indices
            let leading = derangement_count(q as u32) as f64 * purity.powi(q as i32);
            let ratio = mu / leading;
            assert!(ratio <= 1.0 + 1e-12 && ratio >= 1.0 - (q * q) as f64 / dim as f64, "D={dim} q={q}: {ratio}");
        }
    }
}

#[test]
fn trace_power_examples() {
    let s = diagonalize(&random_hermitian(6, 5)).unwrap();
    let psi = BasisState::haar(6, 6);
    let setup = make_setup(&s, &psi, &HermitianOperator::identity(6)).unwrap();
    let p = setup.populations();
    // at q = 1 the inequality fails: tr ω = 1 > √tr ω²
    let tp = trace_power_check(&setup, 1);
    assert!((tp.lhs - 1.0).abs() < 1e-12 && !tp.ok);
    for q in 2..=6 {
        let tp = trace_power_check(&setup, q);
        assert!((tp.lhs - p.iter().map(|x| x.powi(q as i32)).sum::<f64>()).abs() < 1e-14);
        assert!(tp.ok);
    }
    let eig = BasisState::new(s.vector(3)).unwrap();
    let tp = trace_power_check(&make_fidelity_setup(&s, &eig).unwrap(), 4);
    assert!((tp.lhs - 1.0).abs() < 1e-12 && (tp.rhs - 1.0).abs() < 1e-12 && tp.ok);
}

#[test]
fn five_level_exact_matches_sampling() {
    let setup = generic_setup(5, 8);
    let params = SamplingParams::new(default_horizon(setup.min_gap().unwrap()), 100_000, 3);
    let reports = moment_reports(&setup, Quantity::Observable, &[2, 3, 4], Some(&params)).unwrap();
    for r in &reports {
        assert_eq!(r.agrees_within(3.0), Some(true), "{r:?}");
        assert_eq!(r.bound_satisfied, Some(true));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn moments_respect_bounds(dim in 2usize..12, seed in any::<u64>()) {
        let setup = generic_setup(dim, seed);
        let purity = diagonal_ensemble(&setup).purity;
        for quantity in [Quantity::Observable, Quantity::Fidelity] {
            let table = gap_table(&setup, quantity, setup.tolerance()).unwrap();
            prop_assert!(table.has_conjugate_pairs(1e-12));
            for q in [2usize, 4] {
                let z = exact_moment_complex(&table, q).unwrap();
                prop_assert!(z.im.abs() <= 1e-10 * table.scale.powi(q as i32));
                prop_assert!(z.re >= -1e-15);
                let obs_norm = if quantity == Quantity::Observable { setup.obs_norm() } else { 1.0 };
                prop_assert!(z.re <= moment_bound(quantity.into(), obs_norm, purity, q));
            }
        }
    }

    #[test]
    fn trace_power_holds(dim in 1usize..10, seed in any::<u64>(), q in 2usize..=6) {
        let setup = generic_setup(dim, seed);
        let tp = trace_power_check(&setup, q);
        prop_assert!(tp.ok, "{:?}", tp);
    }
}
