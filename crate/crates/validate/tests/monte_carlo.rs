use hpsym_core::{gaussian_spectrum, BlackHoleSpec, Error, Purity, SectorSpectrum};
use hpsym_validate::{run_validation, run_validation_with, BoundMode, ValidationOptions, ValidationReport};

fn small(kind: Purity) -> (BlackHoleSpec, SectorSpectrum) {
    let spec = BlackHoleSpec::new(3, 1, 0.0, 0.5 * 3f64.sqrt(), kind).unwrap();
    let chi = gaussian_spectrum(&spec).unwrap();
    (spec, chi)
}

fn reference_run() -> ValidationReport {
    let (spec, chi) = small(Purity::Pure);
    run_validation(&spec, &chi, 1, 2000, 42).unwrap()
}

#[test]
fn reference_instance() {
    let r = reference_run();
    println!(
        "mean-state distance {:.6e}, quarter {:.6e}, ratio {:.4} +- {:.4}",
        r.mean_state_distance,
        r.mean_state_distance_quarter.unwrap(),
        r.convergence.as_ref().unwrap().ratio,
        r.convergence.as_ref().unwrap().ratio_sigma
    );
    assert!(r.mean_state_distance < 0.15);
    assert!(r.mean_state_distance < r.mean_state_distance_quarter.unwrap());
    assert!(r.convergence.as_ref().unwrap().pass);
    assert!(r.smoothed_tail.pass && r.expectation.pass && r.passed);
    assert!(r.distances.iter().all(|d| (0.0..=2.0).contains(d)));
    assert_eq!(r.distances.len(), 2000);
    assert!((r.gamma_trace - 1.0).abs() < 1e-12 && r.gamma_min_eigenvalue >= -1e-10);
}

#[test]
fn reference_values_are_pinned() {
    let r = reference_run();
    assert!((r.mean_state_distance - PINNED_MEAN_STATE).abs() < 1e-9, "{:.12e}", r.mean_state_distance);
    assert!((r.mean_distance - PINNED_MEAN).abs() < 1e-9, "{:.12e}", r.mean_distance);
}

const PINNED_MEAN_STATE: f64 = 4.987267101168e-2;
const PINNED_MEAN: f64 = 1.709639432481e0;

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let (spec, chi) = small(Purity::Pure);
        pool.install(|| run_validation(&spec, &chi, 2, 300, 5).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn single_sample_is_deterministic() {
    let (spec, chi) = small(Purity::Mixed);
    let a = run_validation(&spec, &chi, 1, 1, 7).unwrap();
    let b = run_validation(&spec, &chi, 1, 1, 7).unwrap();
    assert_eq!(a, b);
    assert!(a.convergence.is_none());
}

#[test]
fn mixed_black_hole_passes() {
    let (spec, chi) = small(Purity::Mixed);
    let r = run_validation(&spec, &chi, 2, 800, 11).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn refined_tail_mode() {
    let (spec, chi) = small(Purity::Pure);
    let opts = ValidationOptions {
        samples: 400,
        seed: 3,
        delta: 0.2,
        mode: BoundMode::RefinedTail,
        ..ValidationOptions::default()
    };
    let r = run_validation_with(&spec, &chi, 2, &opts).unwrap();
    let c = r.refined_tail.as_ref().unwrap();
    assert!(c.weight_above >= 0.8 && c.d_th >= 1.0);
    assert!((c.f_delta - (2.0 * 0.2f64.sqrt() + 0.2 + 0.25)).abs() < 1e-15);
    assert!(c.pass);
}

#[test]
fn large_systems_are_refused() {
    let spec = BlackHoleSpec::new(10, 1, 0.0, 1.0, Purity::Pure).unwrap();
    let chi = gaussian_spectrum(&spec).unwrap();
    assert!(matches!(run_validation(&spec, &chi, 5, 10, 0), Err(Error::NumericalGuard(_))));
}

#[test]
fn non_vacuous_bounds_hold() {
    let mut exercised = (0, 0);
    for (n, k) in [(3usize, 1usize), (5, 1), (6, 1), (4, 2)] {
        for kind in [Purity::Pure, Purity::Mixed] {
            let spec = BlackHoleSpec::new(n, k, 0.0, 0.5 * (n as f64).sqrt(), kind).unwrap();
            let chi = gaussian_spectrum(&spec).unwrap();
            for ell in n.saturating_sub(1)..=n + k {
                let r = run_validation(&spec, &chi, ell, 400, 100 + ell as u64).unwrap();
                exercised.0 += r.expectation.applicable as usize;
                exercised.1 += r.smoothed_tail.applicable as usize;
                assert!(r.passed, "N={n} k={k} {kind} ell={ell}: {r:?}");
            }
        }
    }
    assert!(exercised.0 >= 10 && exercised.1 >= 10, "{exercised:?}");
}
