//! Finite-difference verification of the training gradient on randomized
//! instances, plus descent and reproducibility checks for the optimizer.

use lexmemm_core::corpus::TagId;
use lexmemm_core::maxent::{
    nll_and_gradient, train, PredicateId, PredicateIndex, TrainConfig, TrainingEvent, WeightMatrix,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_events(
    rng: &mut ChaCha8Rng,
    n_predicates: usize,
    n_tags: usize,
    n_events: usize,
) -> Vec<TrainingEvent> {
    (0..n_events)
        .map(|_| {
            let mut predicates: Vec<PredicateId> = (0..n_predicates as u32)
                .filter(|_| rng.random_bool(0.4))
                .map(PredicateId)
                .collect();
            if predicates.is_empty() {
                predicates.push(PredicateId(rng.random_range(0..n_predicates as u32)));
            }
            TrainingEvent {
                predicates,
                gold: TagId(rng.random_range(0..n_tags as u32)),
            }
        })
        .collect()
}

fn random_weights(rng: &mut ChaCha8Rng, n_predicates: usize, n_tags: usize) -> WeightMatrix {
    let values = (0..n_predicates * n_tags)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    WeightMatrix::from_values(values, n_predicates, n_tags).unwrap()
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = 1e-5;
    for round in 0..20 {
        let n_predicates = rng.random_range(2..=20usize);
        let n_tags = rng.random_range(2..=4usize);
        let n_events = rng.random_range(1..=30usize);
        let events = random_events(&mut rng, n_predicates, n_tags, n_events);
        let weights = random_weights(&mut rng, n_predicates, n_tags);
        let sigma2 = [0.5, 1.0, 4.0][round % 3];

        let (_, analytic) = nll_and_gradient(&weights, &events, sigma2);
        for (i, &analytic_i) in analytic.iter().enumerate() {
            let mut plus = weights.clone();
            plus.values_mut()[i] += step;
            let mut minus = weights.clone();
            minus.values_mut()[i] -= step;
            let (f_plus, _) = nll_and_gradient(&plus, &events, sigma2);
            let (f_minus, _) = nll_and_gradient(&minus, &events, sigma2);
            let numeric = (f_plus - f_minus) / (2.0 * step);
            let denom = f64::max(1.0, numeric.abs());
            assert!(
                (analytic_i - numeric).abs() / denom < 1e-4,
                "round {round}, component {i}: analytic {analytic_i} vs numeric {numeric}"
            );
        }
    }
}

#[test]
fn trained_objective_never_exceeds_uniform_start() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let n_predicates = rng.random_range(2..=10usize);
        let n_tags = rng.random_range(2..=4usize);
        let n_events = rng.random_range(5..=30usize);
        let events = random_events(&mut rng, n_predicates, n_tags, n_events);
        let index = PredicateIndex::from_names(
            (0..n_predicates).map(|i| format!("p{i}=1")).collect::<Vec<_>>(),
        );
        let outcome = train(&events, &index, n_tags, &TrainConfig::default()).unwrap();
        let at_zero = events.len() as f64 * (n_tags as f64).ln();
        assert!(outcome.objective <= at_zero + 1e-9);
    }
}

#[test]
fn training_reaches_gradient_tolerance_on_small_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let events = random_events(&mut rng, 8, 3, 25);
    let index = PredicateIndex::from_names((0..8).map(|i| format!("p{i}=1")).collect::<Vec<_>>());
    let config = TrainConfig::default();
    let outcome = train(&events, &index, 3, &config).unwrap();
    assert!(outcome.converged, "gradient max-norm {}", outcome.gradient_max_norm);
    assert!(outcome.gradient_max_norm <= config.tolerance);
}
