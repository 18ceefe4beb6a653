mod common;

use qident_core::closed_form::p_ident_general;
use qident_core::montecarlo::sample_haar_unitary;
use qident_core::tensor::build_mcopy_operator;
use qident_core::spectral::probability_from_operator;
use qident_core::{Error, Mode, MonteCarlo, Seed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn estimate_is_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = sample_haar_unitary(2, &mut rng);
    let plain = MonteCarlo::new(20_000, Seed(5)).identification(1, 2, Mode::Conditional).unwrap();
    let twisted = MonteCarlo::new(20_000, Seed(6))
        .twist(u)
        .identification(1, 2, Mode::Conditional)
        .unwrap();
    let combined = plain.stderr.hypot(twisted.stderr);
    assert!((plain.mean - twisted.mean).abs() < 4.0 * combined);
    let target = p_ident_general(1, 2).unwrap().value;
    assert!(twisted.z_score(target).abs() < 4.0);
}

#[test]
fn mcopy_estimate_matches_oracle() {
    let oracle = 0.5 + 2f64.sqrt() / 8.0;
    let exact = probability_from_operator(&build_mcopy_operator(2, 1, 2).unwrap(), 2, 1, 2).unwrap();
    assert!((exact - oracle).abs() < 1e-12);
    let est = MonteCarlo::new(20_000, Seed(11)).workers(4).mcopy(2, 1, 2, Mode::Conditional).unwrap();
    assert!(est.z_score(oracle).abs() < 4.0, "{est:?}");
}

#[test]
fn multi_worker_runs_are_reproducible() {
    let a = MonteCarlo::new(4_000, Seed(3)).workers(3).discrimination(2).unwrap();
    let b = MonteCarlo::new(4_000, Seed(3)).workers(3).discrimination(2).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.trials, 4_000);
    assert_eq!(a.workers, 3);
}

#[test]
fn oversized_mcopy_is_a_size_error() {
    let err = MonteCarlo::new(1_000, Seed(1)).mcopy(3, 3, 3, Mode::Conditional).unwrap_err();
    assert!(matches!(err, Error::Size { .. }), "{err:?}");
}
