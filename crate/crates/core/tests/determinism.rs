use equilibria_core::eigen::diagonalize;
use equilibria_core::fermions::{free_moment_exact, generic_extended_model, random_slater_state, FreeTarget};
use equilibria_core::lattice::*;
use equilibria_core::moments::{exact_moment, gap_table};
use equilibria_core::quench::*;
use equilibria_core::recurrence::{recurrence_scan, ScanParams};
use equilibria_core::sampling::{sample_values, SamplingParams};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[derive(Debug, PartialEq)]
struct Run {
    samples: Vec<u64>,
    moments: Vec<u64>,
    free: Vec<u64>,
    events: Vec<u64>,
}

fn run() -> Run {
    let s = diagonalize(&random_hermitian(24, 5)).unwrap();
    let setup = make_setup(&s, &BasisState::haar(24, 6), &random_hermitian(24, 7)).unwrap();
    let params = SamplingParams::new(1e5, 50_000, 8);
    let samples = sample_values(&QuenchDynamics::new(&setup, Quantity::Observable), &params)
        .unwrap()
        .iter()
        .map(|z| z.re.to_bits())
        .collect();
    let table = gap_table(&setup, Quantity::Observable, setup.tolerance()).unwrap();
    let moments = (1..=4).map(|q| exact_moment(&table, q).unwrap().to_bits()).collect();
    let model = generic_extended_model(24, 3).unwrap();
    let state = random_slater_state(24, 8, 4).unwrap();
    let free = [2, 4]
        .iter()
        .map(|&q| free_moment_exact(&model, &FreeTarget::Correlator { state: &state, m: 1, n: 9 }, q).unwrap().mu_exact.to_bits())
        .collect();
    let small = diagonalize(&random_hermitian(3, 1)).unwrap();
    let fid = make_fidelity_setup(&small, &BasisState::haar(3, 2)).unwrap();
    let dt = 0.5 * equilibria_core::recurrence::max_step(small.norm());
    let scan = recurrence_scan(&fid, Quantity::Fidelity, &ScanParams::new(0.2, 0.05, dt, 5e3)).unwrap();
    let events = scan.events().iter().flat_map(|e| [e.t_start.to_bits(), e.duration.to_bits()]).collect();
    Run { samples, moments, free, events }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let one = in_pool(1, run);
    assert!(!one.events.is_empty());
    for threads in [2, 3, 8] {
        assert_eq!(in_pool(threads, run), one, "{threads} threads");
    }
}
