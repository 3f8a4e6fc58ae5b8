use equilibria_core::eigen::{diagonalize, diagonalize_matrix, eigenvalues, operator_norm, Spectrum};
use equilibria_core::lattice::*;
use equilibria_core::quench::*;
use equilibria_core::random::{haar_orbitals, rng};
use equilibria_core::sampling::{estimate, sample_values, SamplingParams};
use equilibria_core::{CMatrix, Complex64, Error};
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `U diag(levels) U†` for a Haar-random `U`, symmetrized.
fn rotated(levels: &[f64], seed: u64) -> HermitianOperator {
    let d = levels.len();
    let u = haar_orbitals(d, d, &mut rng(seed));
    let raw = CMatrix::from_fn(d, d, |i, j| (0..d).map(|k| u[k][i] * u[k][j].conj() * levels[k]).sum());
    let adj = raw.adjoint();
    HermitianOperator::new(CMatrix::from_fn(d, d, |i, j| (raw[(i, j)] + adj[(i, j)]) * 0.5)).unwrap()
}

/// `e^{-iHt} ψ` by a Taylor series over short steps, without diagonalizing.
fn propagate(h: &CMatrix, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let norm = h.frobenius().max(1e-300);
    let steps = ((t.abs() * norm) / 0.25).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut v = psi.to_vec();
    for _ in 0..steps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..40 {
            let hv = h.matvec(&term);
            term = hv.iter().map(|z| z * Complex64::new(0.0, -dt / k as f64)).collect();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
        }
        v = acc;
    }
    v
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn power_trace(h: &CMatrix, k: usize) -> f64 {
    let mut p = CMatrix::identity(h.rows());
    for _ in 0..k {
        p = p.matmul(h);
    }
    p.trace().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_invariants(dim in 1usize..12, seed in any::<u64>()) {
        let h = random_hermitian(dim, seed);
        let s = diagonalize(&h).unwrap();
        let norm = s.norm().max(1.0);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.max_residual(h.matrix()) <= 1e-10 * norm);
        prop_assert!(s.orthonormality_error() <= 1e-12 * dim as f64);
        prop_assert!(s.reconstruct().sub(h.matrix()).max_abs() <= 1e-9 * norm);
        for k in 1..=4 {
            let lhs = power_trace(h.matrix(), k);
            let rhs: f64 = s.eigenvalues().iter().map(|e| e.powi(k as i32)).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * norm.powi(k as i32) * dim as f64);
        }
        for (a, b) in eigenvalues(h.matrix()).unwrap().iter().zip(s.eigenvalues()) {
            prop_assert!((a - b).abs() <= 1e-12 * norm);
        }
    }

    #[test]
    fn fidelity_stays_in_unit_interval(dim in 2usize..10, seed in any::<u64>(), t in 0.0f64..1e4) {
        let s = diagonalize(&random_hermitian(dim, seed)).unwrap();
        let setup = make_fidelity_setup(&s, &BasisState::haar(dim, seed ^ 1)).unwrap();
        let f = fidelity_at(&setup, t);
        prop_assert!((0.0..=1.0).contains(&f));
        let avg = fidelity_average(&setup);
        prop_assert!(avg >= 1.0 / dim as f64 - 1e-12 && avg <= 1.0 + 1e-12);
    }
}

#[test]
fn eigenvector_phase_convention() {
    let s = diagonalize(&random_hermitian(9, 4)).unwrap();
    for k in 0..9 {
        let v = s.vector(k);
        let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lead = v.iter().find(|z| z.norm() >= (1.0 - 1e-9) * max).unwrap();
        assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
    }
}

#[test]
fn small_closed_forms() {
    let s = diagonalize(&HermitianOperator::diagonal(&[3.0, 1.0, 2.0])).unwrap();
    assert_eq!(s.eigenvalues(), &[1.0, 2.0, 3.0]);
    let sx = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let s = diagonalize_matrix(&sx).unwrap();
    assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-15 && (s.eigenvalues()[1] - 1.0).abs() < 1e-15);
    let sy = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => Complex64::new(0.0, -1.0),
        (1, 0) => Complex64::new(0.0, 1.0),
        _ => c(0.0),
    });
    let s = diagonalize_matrix(&sy).unwrap();
    assert!(s.max_residual(&sy) < 1e-14);
    let bad = CMatrix::from_real(2, 2, &[0.0, 1.0, 2.0, 0.0]);
    assert!(matches!(diagonalize_matrix(&bad), Err(Error::NotHermitian { .. })));
    assert!(matches!(eigenvalues(&bad), Err(Error::NotHermitian { .. })));
    assert!(matches!(HermitianOperator::new(bad), Err(Error::NotHermitian { .. })));
}

#[test]
fn expectation_matches_direct_propagation() {
    let spec = SpinChainSpec::standard(6);
    let h = build_spin_chain(&spec).unwrap();
    let s = diagonalize(&h).unwrap();
    let psi = build_state(StateKind::Neel, 6, 3).unwrap();
    for site in [1, 2, 4] {
        let a = site_observable(SiteObservable::SigmaZ, site, 6, 3).unwrap();
        let setup = make_setup(&s, &psi, &a).unwrap();
        for t in [0.0, 0.3, 2.7, 11.0] {
            let v = propagate(h.matrix(), psi.amplitudes(), t);
            let direct = inner(&v, &a.matrix().matvec(&v)).re;
            assert!((expectation_at(&setup, t).unwrap() - direct).abs() < 1e-9, "site {site} t {t}");
        }
    }
    let fid = make_fidelity_setup(&s, &psi).unwrap();
    for t in [0.5, 7.0] {
        let v = propagate(h.matrix(), psi.amplitudes(), t);
        let direct = inner(psi.amplitudes(), &v).norm_sqr();
        assert!((fidelity_at(&fid, t) - direct).abs() < 1e-9);
    }
}

#[test]
fn initial_values() {
    let s = diagonalize(&random_hermitian(7, 3)).unwrap();
    let psi = BasisState::haar(7, 5);
    let a = random_hermitian(7, 9);
    let setup = make_setup(&s, &psi, &a).unwrap();
    assert!((expectation_at(&setup, 0.0).unwrap() - a.expectation(&psi)).abs() < 1e-12);
    let fid = make_fidelity_setup(&s, &psi).unwrap();
    assert!((fidelity_at(&fid, 0.0) - 1.0).abs() < 1e-12);
}

#[test]
fn short_time_fidelity_decay() {
    let s = diagonalize(&random_hermitian(8, 21)).unwrap();
    let psi = BasisState::haar(8, 22);
    let fid = make_fidelity_setup(&s, &psi).unwrap();
    let var = diagonal_ensemble(&fid).energy_variance;
    for t in [1e-3, 3e-3] {
        let f = fidelity_at(&fid, t);
        assert!((f - (1.0 - var * t * t)).abs() < 10.0 * var * var * t.powi(4) + 1e-13);
    }
}

#[test]
fn two_level_is_periodic() {
    let s = Spectrum::from_levels(vec![0.0, 1.0]).unwrap();
    let r = 0.5f64.sqrt();
    let psi = BasisState::new(vec![c(r), c(r)]).unwrap();
    let sx = HermitianOperator::new(CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    let setup = make_setup(&s, &psi, &sx).unwrap();
    for t in [0.1, 1.7, 40.0] {
        let f = expectation_at(&setup, t).unwrap();
        assert!((f - t.cos()).abs() < 1e-12);
        assert!((f - expectation_at(&setup, t + std::f64::consts::TAU).unwrap()).abs() < 1e-9);
    }
    assert!(time_average(&setup).abs() < 1e-15);
    assert_eq!(setup.min_gap(), Some(1.0));
    let fid = make_fidelity_setup(&s, &psi).unwrap();
    assert!((fidelity_average(&fid) - 0.5).abs() < 1e-15);
}

/// Exact period average of a trigonometric polynomial with integer
/// frequencies below `points`.
fn period_average(f: impl Fn(f64) -> f64, points: usize) -> f64 {
    (0..points).map(|k| f(std::f64::consts::TAU * k as f64 / points as f64)).sum::<f64>() / points as f64
}

#[test]
fn averages_on_degenerate_integer_spectra() {
    // H has integer levels with repeats, so f(t) is 2π-periodic and
    // coherences inside a degenerate block survive the average
    for (levels, seed) in [(vec![0.0, 0.0, 1.0, 3.0, 3.0, 3.0], 1u64), (vec![-2.0, 1.0, 1.0, 4.0], 2), (vec![0.0, 1.0, 2.0, 5.0], 3)] {
        let d = levels.len();
        let h = rotated(&levels, seed);
        let s = diagonalize(&h).unwrap();
        let psi = BasisState::haar(d, seed + 10);
        let a = random_hermitian(d, seed + 20);
        let setup = make_setup(&s, &psi, &a).unwrap();
        let exact = period_average(|t| expectation_at(&setup, t).unwrap(), 64);
        assert!((time_average(&setup) - exact).abs() < 1e-10, "{levels:?}");
        let fid = make_fidelity_setup(&s, &psi).unwrap();
        let exact = period_average(|t| fidelity_at(&fid, t), 64);
        assert!((fidelity_average(&fid) - exact).abs() < 1e-10);
        let distinct = setup.blocks().len();
        assert!(distinct < d || levels == [0.0, 1.0, 2.0, 5.0]);
    }
}

#[test]
fn time_average_matches_long_sampling() {
    let s = diagonalize(&build_spin_chain(&SpinChainSpec::standard(8)).unwrap()).unwrap();
    let psi = build_state(StateKind::Neel, 8, 4).unwrap();
    let a = site_observable(SiteObservable::SigmaZ, 1, 8, 4).unwrap();
    let setup = make_setup(&s, &psi, &a).unwrap();
    let params = SamplingParams::new(1e6, 1_000_000, 17);
    let values: Vec<f64> = sample_values(&QuenchDynamics::new(&setup, Quantity::Observable), &params)
        .unwrap()
        .iter()
        .map(|z| z.re)
        .collect();
    let est = estimate(&values);
    assert!((est.mean - time_average(&setup)).abs() < 5.0 * est.stderr);
}

#[test]
fn diagonal_ensemble_summaries() {
    let s = diagonalize(&random_hermitian(6, 8)).unwrap();
    let psi = BasisState::haar(6, 9);
    let setup = make_setup(&s, &psi, &HermitianOperator::identity(6)).unwrap();
    let de = diagonal_ensemble(&setup);
    assert!((de.populations.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let purity: f64 = de.populations.iter().map(|p| p * p).sum();
    assert!((de.purity - purity).abs() < 1e-15);
    assert!((de.effective_dimension * de.purity - 1.0).abs() < 1e-15);
    assert!((time_average(&setup) - 1.0).abs() < 1e-12);
    let h = random_hermitian(6, 8);
    let mean = inner(psi.amplitudes(), &h.matrix().matvec(psi.amplitudes())).re;
    assert!((de.energy_mean - mean).abs() < 1e-12);
}

#[test]
fn histogram_is_a_density() {
    let s = diagonalize(&random_hermitian(10, 30)).unwrap();
    let setup = make_setup(&s, &BasisState::haar(10, 31), &random_hermitian(10, 32)).unwrap();
    let params = SamplingParams::new(default_horizon_for(&setup), 20_000, 3);
    let hist = sample_histogram(&setup, &params, 40, Quantity::Observable).unwrap();
    assert_eq!(hist.edges.len(), 41);
    assert!((hist.total_mass() - 1.0).abs() < 1e-12);
    assert!(hist.edges.windows(2).all(|w| w[0] < w[1]));
}

fn default_horizon_for(setup: &QuenchSetup) -> f64 {
    equilibria_core::sampling::default_horizon(setup.min_gap().unwrap())
}

#[test]
fn mismatched_dimensions_rejected() {
    let s = diagonalize(&random_hermitian(4, 1)).unwrap();
    let psi = BasisState::haar(5, 1);
    assert!(matches!(make_fidelity_setup(&s, &psi), Err(Error::DimensionMismatch { .. })));
    let a = random_hermitian(3, 1);
    assert!(matches!(make_setup(&s, &BasisState::haar(4, 1), &a), Err(Error::DimensionMismatch { .. })));
    assert!(BasisState::new(vec![c(1.0), c(1.0)]).is_err());
    assert!(operator_norm(&HermitianOperator::diagonal(&[-3.0, 2.0])).unwrap() == 3.0);
}
