use equilibria_core::eigen::{diagonalize, operator_norm};
use equilibria_core::lattice::*;
use equilibria_core::math::binomial;
use equilibria_core::moments::check_genericity;
use equilibria_core::quench::{default_tolerance, make_setup};
use equilibria_core::{Complex64, Error};

type M2 = [[f64; 2]; 2];
// local basis: index 0 = down, 1 = up
const ID: M2 = [[1.0, 0.0], [0.0, 1.0]];
const SP: M2 = [[0.0, 0.0], [1.0, 0.0]];
const SM: M2 = [[0.0, 1.0], [0.0, 0.0]];
const SZ: M2 = [[-0.5, 0.0], [0.0, 0.5]];

/// Entry `(r, c)` of `⊗_j ops[j]` on the full `2^L` space, site `j` on bit `j`.
fn kron_entry(ops: &[M2], r: usize, c: usize) -> f64 {
    ops.iter().enumerate().map(|(j, op)| op[(r >> j) & 1][(c >> j) & 1]).product()
}

fn full_space_hamiltonian(spec: &SpinChainSpec) -> Vec<Vec<f64>> {
    let l = spec.sites;
    let dim = 1 << l;
    let mut h = vec![vec![0.0; dim]; dim];
    let mut terms: Vec<(f64, Vec<M2>)> = Vec::new();
    for j in 0..l {
        for (range, hop, zz) in [(1, spec.j1, spec.gamma1), (2, spec.j2, spec.gamma2)] {
            let k = j + range;
            let k = match spec.boundary {
                Boundary::Periodic => k % l,
                Boundary::Open if k < l => k,
                Boundary::Open => continue,
            };
            let pair = |a: M2, b: M2| {
                let mut ops = vec![ID; l];
                ops[j] = a;
                ops[k] = b;
                ops
            };
            terms.push((hop, pair(SP, SM)));
            terms.push((hop, pair(SM, SP)));
            terms.push((zz, pair(SZ, SZ)));
        }
    }
    for (coef, ops) in &terms {
        if *coef == 0.0 {
            continue;
        }
        for r in 0..dim {
            for c in 0..dim {
                h[r][c] += coef * kron_entry(ops, r, c);
            }
        }
    }
    h
}

fn assert_matches_full_space(spec: SpinChainSpec) {
    let full = full_space_hamiltonian(&spec);
    let basis = sector_basis(spec.sites, spec.n_up).unwrap();
    let h = build_spin_chain(&spec).unwrap();
    assert_eq!(h.dim(), basis.len());
    for (i, &ci) in basis.iter().enumerate() {
        for (j, &cj) in basis.iter().enumerate() {
            let z = h.matrix()[(i, j)];
            assert!(z.im == 0.0);
            assert!((z.re - full[ci as usize][cj as usize]).abs() < 1e-14, "{spec:?} at ({i},{j})");
        }
    }
    // the sector is closed: no amplitude leaks to other magnetizations
    for &c in &basis {
        for (r, row) in full.iter().enumerate() {
            if (r as u64).count_ones() as usize != spec.n_up {
                assert_eq!(row[c as usize], 0.0);
            }
        }
    }
}

#[test]
fn sector_build_matches_full_space_construction() {
    for l in 3..=8 {
        for n_up in [1, l / 2, l - 1] {
            let mut spec = SpinChainSpec::standard(l);
            spec.n_up = n_up;
            assert_matches_full_space(spec);
        }
    }
    let mut open = SpinChainSpec::standard(7);
    open.boundary = Boundary::Open;
    open.n_up = 3;
    assert_matches_full_space(open);
}

#[test]
fn two_site_ring_doubles_the_bond() {
    let spec = SpinChainSpec { sites: 2, n_up: 1, j1: -1.0, gamma1: 1.0, j2: 0.0, gamma2: 0.0, boundary: Boundary::Periodic };
    assert_matches_full_space(spec);
    let h = build_spin_chain(&spec).unwrap();
    let expect = [[-0.5, -2.0], [-2.0, -0.5]];
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(h.matrix()[(i, j)], Complex64::new(expect[i][j], 0.0));
        }
    }
    let mut bad = spec;
    bad.j2 = -0.2;
    assert!(matches!(build_spin_chain(&bad), Err(Error::DegenerateGeometry { sites: 2 })));
}

#[test]
fn no_hopping_gives_diagonal_matrix() {
    let spec = SpinChainSpec { sites: 6, n_up: 3, j1: 0.0, gamma1: 0.7, j2: 0.0, gamma2: -0.3, boundary: Boundary::Periodic };
    let h = build_spin_chain(&spec).unwrap();
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            if i != j {
                assert_eq!(h.matrix()[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn empty_sector_rejected() {
    let mut spec = SpinChainSpec::standard(4);
    spec.n_up = 5;
    assert!(matches!(build_spin_chain(&spec), Err(Error::EmptySector { .. })));
}

#[test]
fn sector_dimensions() {
    for l in 2..=12 {
        for n in 0..=l {
            let mut spec = SpinChainSpec::standard(l.max(3));
            spec.sites = l;
            spec.n_up = n;
            assert_eq!(spec.sector_dim() as u64, binomial(l, n));
            assert_eq!(sector_basis(l, n).unwrap().len() as u64, binomial(l, n));
        }
    }
}

#[test]
fn initial_states_on_four_sites() {
    let basis = sector_basis(4, 2).unwrap();
    let at = |config: u64| basis.iter().position(|&c| c == config).unwrap();
    // site j up <=> bit j-1 set; ↑↓↑↓ = sites 1 and 3 up
    let neel = build_state(StateKind::Neel, 4, 2).unwrap();
    for (i, a) in neel.amplitudes().iter().enumerate() {
        let expect = if i == at(0b0101) { 1.0 } else { 0.0 };
        assert_eq!(*a, Complex64::new(expect, 0.0));
    }
    let sym = build_state(StateKind::NeelSymmetric, 4, 2).unwrap();
    let r = 0.5f64.sqrt();
    assert!((sym.amplitudes()[at(0b0101)].re - r).abs() < 1e-15);
    assert!((sym.amplitudes()[at(0b1010)].re - r).abs() < 1e-15);
    let dw = build_state(StateKind::DomainwallTranslated, 4, 2).unwrap();
    for config in [0b0011, 0b0110, 0b1100, 0b1001] {
        assert!((dw.amplitudes()[at(config)].re - 0.5).abs() < 1e-15);
    }
    assert!(matches!(build_state(StateKind::Neel, 5, 2), Err(Error::IncompatibleState { .. })));
    assert!(matches!(build_state(StateKind::NeelSymmetric, 4, 1), Err(Error::IncompatibleState { .. })));
}

#[test]
fn states_are_normalized() {
    for l in [4usize, 6, 8, 10] {
        for kind in [StateKind::Neel, StateKind::NeelSymmetric, StateKind::DomainwallTranslated] {
            let s = build_state(kind, l, l / 2).unwrap();
            let norm: f64 = s.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn sigma_z_observable() {
    let a = site_observable(SiteObservable::SigmaZ, 1, 2, 1).unwrap();
    // basis order: 0b01 (site 1 up, ↑↓), 0b10 (↓↑)
    assert_eq!(a.matrix()[(0, 0)].re, 1.0);
    assert_eq!(a.matrix()[(1, 1)].re, -1.0);
    for (l, n) in [(4, 2), (7, 3), (10, 5), (6, 1)] {
        for site in 1..=l {
            let a = site_observable(SiteObservable::SigmaZ, site, l, n).unwrap();
            let trace = a.matrix().trace().re;
            let expect = 2 * binomial(l - 1, n - 1) as i64 - binomial(l, n) as i64;
            assert_eq!(trace, expect as f64);
            assert_eq!(operator_norm(&a).unwrap(), 1.0);
        }
    }
    assert!(matches!(site_observable(SiteObservable::SigmaZ, 0, 4, 2), Err(Error::SiteOutOfRange { .. })));
    assert!(matches!(site_observable(SiteObservable::SigmaZ, 5, 4, 2), Err(Error::SiteOutOfRange { .. })));
}

#[test]
fn random_hermitian_is_deterministic() {
    assert_eq!(random_hermitian(8, 11), random_hermitian(8, 11));
    assert_ne!(random_hermitian(8, 11), random_hermitian(8, 12));
    let one = random_hermitian(1, 5);
    assert_eq!(one.matrix()[(0, 0)].im, 0.0);
    let s = diagonalize(&one).unwrap();
    assert!(check_genericity(s.eigenvalues(), 3, 1e-10).unwrap().passed);
}

#[test]
fn eight_site_chain_levels() {
    let spec = SpinChainSpec::standard(8);
    let h = build_spin_chain(&spec).unwrap();
    assert_eq!(h.dim(), 70);
    assert!(h.matrix().is_real());
    let s = diagonalize(&h).unwrap();
    let tol = default_tolerance(&s);
    // translation and reflection symmetry force exact degeneracies in the
    // full sector
    let full = check_genericity(s.eigenvalues(), 2, tol).unwrap();
    assert!(!full.passed);
    assert!(!full.degenerate_levels.is_empty());
    // the levels a Néel quench actually populates are generic
    let psi = build_state(StateKind::Neel, 8, 4).unwrap();
    let a = site_observable(SiteObservable::SigmaZ, 1, 8, 4).unwrap();
    let setup = make_setup(&s, &psi, &a).unwrap();
    let populated: Vec<f64> = setup.support().iter().map(|&i| s.eigenvalues()[i]).collect();
    assert!(check_genericity(&populated, 3, tol).unwrap().passed);
}
