use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use simplegraph::config_model::{pair_stubs, repeated_configuration, ParityPolicy, DEFAULT_MAX_ATTEMPTS};
use simplegraph::DegreeDistribution;

const RUNS: usize = 30_000;

/// Pearson statistic against `probs` and its 1% critical value.
fn chi_square(counts: &[usize], probs: &[f64]) -> (f64, f64) {
    let total = counts.iter().sum::<usize>() as f64;
    let stat = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 - p * total).powi(2) / (p * total))
        .sum();
    let critical = ChiSquared::new(counts.len() as f64 - 1.0).unwrap().inverse_cdf(0.99);
    (stat, critical)
}

#[test]
fn two_two_matchings() {
    // stubs a a' b b': {aa', bb'} is two loops, {ab, a'b'} and {ab', a'b}
    // are double edges
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut cells = [0usize; 2];
    for _ in 0..RUNS {
        let mg = pair_stubs(&[2, 2], &mut rng).unwrap();
        match (mg.loop_count(), mg.parallel_excess()) {
            (2, 0) => cells[0] += 1,
            (0, 1) => cells[1] += 1,
            other => panic!("impossible outcome {other:?}"),
        }
    }
    let p_loops = cells[0] as f64 / RUNS as f64;
    assert!((p_loops - 1.0 / 3.0).abs() < 0.02, "{p_loops}");
    let (stat, critical) = chi_square(&cells, &[1.0 / 3.0, 2.0 / 3.0]);
    assert!(stat < critical, "{stat} >= {critical}");
}

#[test]
fn repeated_model_is_uniform_over_perfect_matchings() {
    let f = DegreeDistribution::point_mass(1);
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut cells = [0usize; 3];
    for _ in 0..RUNS {
        let (g, report) =
            repeated_configuration(&f, 4, ParityPolicy::RemoveStub, DEFAULT_MAX_ATTEMPTS, &mut rng).unwrap();
        assert_eq!(report.attempts, 1);
        let partner = g.neighbors(0)[0] as usize;
        cells[partner - 1] += 1;
    }
    let (stat, critical) = chi_square(&cells, &[1.0 / 3.0; 3]);
    assert!(stat < critical, "{cells:?}: {stat} >= {critical}");
}
