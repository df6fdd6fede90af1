use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use simplegraph::grg::{grg_exact, grg_fast, grg_limit_pmf, sample_weights, Regime, WeightSequence};
use simplegraph::verify::{empirical_distribution, tv_distance};
use simplegraph::MixingLaw;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn laws() -> Vec<(&'static str, MixingLaw)> {
    vec![
        ("constant", MixingLaw::point_mass(2.0).unwrap()),
        ("two-point", MixingLaw::discrete(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap()),
        ("exponential", MixingLaw::exponential(2.0).unwrap()),
    ]
}

#[test]
fn exact_degrees_approach_limit_law() {
    let n = 10_000;
    for (i, (name, law)) in laws().into_iter().enumerate() {
        let w = sample_weights(&law, n, 1.0, &mut rng(100 + i as u64)).unwrap();
        let g = grg_exact(&w, &mut rng(200 + i as u64)).unwrap();
        let limit = grg_limit_pmf(&law, Regime::FiniteMean).unwrap();
        let tv = tv_distance(&empirical_distribution(&g).unwrap(), &limit);
        assert!(tv < 0.03, "{name}: {tv}");
    }
}

#[test]
fn fast_matches_exact() {
    let n = 10_000;
    for (i, (name, law)) in laws().into_iter().enumerate() {
        let w = sample_weights(&law, n, 1.0, &mut rng(300 + i as u64)).unwrap();
        let exact = empirical_distribution(&grg_exact(&w, &mut rng(400 + i as u64)).unwrap()).unwrap();
        let fast = empirical_distribution(&grg_fast(&w, &mut rng(500 + i as u64)).unwrap()).unwrap();
        let tv = tv_distance(&exact, &fast);
        assert!(tv < 0.03, "{name}: {tv}");
    }
}

#[test]
fn fixed_vertex_degrees_are_nearly_uncorrelated() {
    let n = 1000;
    let w = WeightSequence::new(vec![1.0; n], 1.0).unwrap();
    let mut r = rng(5000);
    let runs = 5000;
    let (mut s1, mut s2, mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..runs {
        let g = grg_exact(&w, &mut r).unwrap();
        let (a, b) = (g.degree(0) as f64, g.degree(1) as f64);
        s1 += a;
        s2 += b;
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
    }
    let m = runs as f64;
    let cov = s12 / m - s1 * s2 / (m * m);
    let rho = cov / ((s11 / m - (s1 / m).powi(2)) * (s22 / m - (s2 / m).powi(2))).sqrt();
    assert!(rho.abs() < 0.05, "{rho}");
}
