//! End-to-end checks on the bundled two-electron fixture: the reference
//! trace it was chosen for, particle-number conservation along the
//! evolution, and pairwise agreement of the three density-estimation
//! routes on the same simulated data.

use qdens::benchmark::{estimate_trace, reference_trace, time_grid, Experiment};
use qdens::estimators::Method;
use qdens::fermion::{jordan_wigner, load_model};
use qdens::measurement::NoiseModel;
use qdens::seeding::derive_seed;
use qdens::statevector::StateVector;

/// The calibration trace of the bundled fixture: site-A density at 15
/// points on [0, 3] under 3 splitting steps. Values are pinned loosely
/// enough to survive floating-point drift across platforms but tightly
/// enough to catch any change to the model file or the evolution.
const FIXTURE_REFERENCE: [f64; 15] = [
    1.0000, 0.8317, 0.4733, 0.2433, 0.3339, 0.6034, 0.7423, 0.6407, 0.4729, 0.4338, 0.5281, 0.6277,
    0.6266, 0.5205, 0.3866,
];

fn fixture_experiment() -> Experiment {
    let path =
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/two_electron.model");
    let model = load_model(&path).expect("bundled fixture parses");
    Experiment {
        hamiltonian: jordan_wigner(&model),
        initial: StateVector::basis_state(&[true, true, false, false]),
        site: 0,
        times: time_grid(15, 3.0),
        trotter_steps: 3,
        noise: NoiseModel::new(0.01).unwrap(),
        tau_points: 40,
        tau_max: 4.0 * std::f64::consts::PI,
        smc_particles: 1000,
    }
}

#[test]
fn fixture_reference_trace_is_pinned() {
    let exp = fixture_experiment();
    let reference = reference_trace(&exp).unwrap();
    assert_eq!(reference.len(), FIXTURE_REFERENCE.len());
    for (k, (&got, &want)) in reference.iter().zip(&FIXTURE_REFERENCE).enumerate() {
        assert!(
            (got - want).abs() < 5e-4,
            "reference[{k}] = {got}, pinned {want}"
        );
        assert!((0.0..=1.0).contains(&got), "density out of range: {got}");
    }
}

#[test]
fn fixture_evolution_conserves_total_particle_number() {
    let exp = fixture_experiment();
    for &t in &exp.times {
        let state = exp.evolved(t).unwrap();
        let total: f64 = (0..4).map(|p| state.density_expectation(p).unwrap()).sum();
        assert!(
            (total - 2.0).abs() < 1e-8,
            "total occupation {total} at t = {t}"
        );
    }
}

#[test]
fn estimator_routes_agree_pairwise_on_the_fixture_trace() {
    let exp = fixture_experiment();
    let master = 2026;
    let traces: Vec<_> = Method::ALL
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            estimate_trace(&exp, method, 3000, derive_seed(master, &[mi as u64])).unwrap()
        })
        .collect();

    let mut total = 0usize;
    let mut agreeing = 0usize;
    for a in 0..traces.len() {
        for b in (a + 1)..traces.len() {
            for k in 0..exp.times.len() {
                let ea = &traces[a].estimates[k];
                let eb = &traces[b].estimates[k];
                let combined = (ea.std_error.powi(2) + eb.std_error.powi(2)).sqrt();
                total += 1;
                if (ea.value - eb.value).abs() <= 5.0 * combined {
                    agreeing += 1;
                }
            }
        }
    }
    assert!(
        agreeing as f64 >= 0.9 * total as f64,
        "only {agreeing}/{total} point pairs agree within 5 combined standard errors"
    );
}
