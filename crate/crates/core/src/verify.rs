//! Finite-n diagnostics: empirical degree laws, TV distance, erasure and
//! simplicity estimates, tail slopes.

use std::fmt;

use rand::Rng;

use crate::config_model::{pair_stubs, sample_degree_sequence, ParityPolicy};
use crate::distributions::DegreeDistribution;
use crate::error::{Error, Result};
use crate::graph::{GenerationReport, SimpleGraph};

/// `pmf(j) = N_j / n`, where `N_j` counts vertices of degree `j`.
pub fn empirical_distribution(g: &SimpleGraph) -> Result<DegreeDistribution> {
    empirical_from_degrees(&g.degrees())
}

pub fn empirical_from_degrees(degrees: &[usize]) -> Result<DegreeDistribution> {
    let n = degrees.len();
    if n == 0 {
        return Err(Error::InvalidInput("empirical law of an empty vertex set".into()));
    }
    let top = degrees.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; top + 1];
    for &d in degrees {
        counts[d] += 1;
    }
    DegreeDistribution::from_pmf(counts.into_iter().map(|c| c as f64 / n as f64).collect())
}

/// `(1/2) Σ_k |p(k) - q(k)|`.
///
/// Exact when at most one side has a lazily evaluated tail; otherwise the
/// region beyond both heads contributes `|P(X >= L) - P(Y >= L)| / 2`,
/// which is a lower bound for it.
pub fn tv_distance(p: &DegreeDistribution, q: &DegreeDistribution) -> f64 {
    let len = p.materialized_len().max(q.materialized_len());
    let head: f64 = (0..len).map(|k| (p.pmf_at(k) - q.pmf_at(k)).abs()).sum();
    let beyond = match (p.has_lazy_tail(), q.has_lazy_tail()) {
        (false, false) => 0.0,
        (true, false) => p.ccdf_at(len),
        (false, true) => q.ccdf_at(len),
        (true, true) => (p.ccdf_at(len) - q.ccdf_at(len)).abs(),
    };
    (0.5 * (head + beyond)).clamp(0.0, 1.0)
}

/// Share of vertices that lost at least one stub during erasure.
pub fn erasure_fraction(report: &GenerationReport) -> f64 {
    if report.n == 0 {
        0.0
    } else {
        report.affected_vertices as f64 / report.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Fraction of independent configuration-model pairings that come out
/// simple, with its binomial standard error.
pub fn estimate_simple_probability<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<SimpleEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut simple = 0usize;
    for _ in 0..trials {
        let seq = sample_degree_sequence(dist, n, ParityPolicy::RemoveStub, rng)?;
        if pair_stubs(&seq.degrees, rng)?.is_simple() {
            simple += 1;
        }
    }
    let p = simple as f64 / trials as f64;
    Ok(SimpleEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}

/// Least-squares slope of `ln P(X >= k)` against `ln k` over `k_lo..=k_hi`.
pub fn tail_exponent(p: &DegreeDistribution, k_lo: usize, k_hi: usize) -> Result<f64> {
    if k_lo == 0 || k_lo >= k_hi {
        return Err(Error::InvalidRange(format!(
            "need 1 <= k_lo < k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    let mut pts = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let c = p.ccdf_at(k);
        if !(c > 0.0) {
            return Err(Error::InvalidRange(format!("ccdf vanishes at k = {k}")));
        }
        pts.push(((k as f64).ln(), c.ln()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Flat `key=value` report; absent keys are omitted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub edges: Option<usize>,
    pub tv: Option<f64>,
    pub erasure_fraction: Option<f64>,
    pub attempts: Option<usize>,
    pub odd_sum_fixed: Option<bool>,
    pub tail_slope: Option<f64>,
}

impl VerificationReport {
    pub fn new(model: impl Into<String>, n: usize, seed: u64) -> Self {
        VerificationReport {
            model: model.into(),
            n,
            seed,
            ..Default::default()
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model={}", self.model)?;
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "seed={}", self.seed)?;
        if let Some(e) = self.edges {
            writeln!(f, "edges={e}")?;
        }
        if let Some(tv) = self.tv {
            writeln!(f, "tv={tv}")?;
        }
        if let Some(x) = self.erasure_fraction {
            writeln!(f, "erasure_fraction={x}")?;
        }
        if let Some(a) = self.attempts {
            writeln!(f, "attempts={a}")?;
        }
        if let Some(b) = self.odd_sum_fixed {
            writeln!(f, "odd_sum_fixed={b}")?;
        }
        if let Some(s) = self.tail_slope {
            writeln!(f, "tail_slope={s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::config_model::erased_configuration;
    use crate::graph::{erase, Multigraph};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn dist(pmf: &[f64]) -> DegreeDistribution {
        DegreeDistribution::from_pmf(pmf.to_vec()).unwrap()
    }

    #[test]
    fn empirical_examples() {
        let tri = SimpleGraph::from_pairs(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(empirical_distribution(&tri).unwrap().pmf_at(2), 1.0);
        let path = SimpleGraph::from_pairs(3, [(0, 1), (1, 2)]);
        let e = empirical_distribution(&path).unwrap();
        assert_eq!(e.pmf_at(1), 2.0 / 3.0);
        assert_eq!(e.pmf_at(2), 1.0 / 3.0);
        assert_eq!(empirical_distribution(&SimpleGraph::empty(4)).unwrap().pmf_at(0), 1.0);
        assert!(empirical_distribution(&SimpleGraph::empty(0)).is_err());
    }

    #[test]
    fn tv_examples() {
        let p = DegreeDistribution::poisson(3.0).unwrap();
        assert_eq!(tv_distance(&p, &p), 0.0);
        assert_eq!(
            tv_distance(&DegreeDistribution::point_mass(0), &DegreeDistribution::point_mass(1)),
            1.0
        );
        assert_eq!(tv_distance(&dist(&[0.5, 0.5]), &DegreeDistribution::point_mass(0)), 0.5);
    }

    #[test]
    fn tv_counts_lazy_tail_mass() {
        let pl = DegreeDistribution::power_law(1.5, 1).unwrap();
        let head = DegreeDistribution::point_mass(1);
        // point mass at 1 against the power law: 1 - p_1
        let want = 1.0 - pl.pmf_at(1);
        assert!((tv_distance(&head, &pl) - want).abs() < 1e-9);
        assert!((tv_distance(&pl, &head) - want).abs() < 1e-9);
        assert!(tv_distance(&pl, &pl) < 1e-15);
    }

    #[test]
    fn erasure_examples() {
        let (_, r) = erase(&Multigraph::new(3, vec![(0, 1), (1, 2)]));
        assert_eq!(erasure_fraction(&r), 0.0);
        let (_, r) = erase(&Multigraph::new(2, vec![(0, 0)]));
        assert_eq!(erasure_fraction(&r), 0.5);
    }

    #[test]
    fn erasure_fraction_shrinks_with_n() {
        let f = DegreeDistribution::poisson(5.0).unwrap();
        let mean_at = |n: usize| {
            (0..20)
                .map(|s| {
                    let (_, r) = erased_configuration(&f, n, ParityPolicy::RemoveStub, &mut rng(s)).unwrap();
                    erasure_fraction(&r)
                })
                .sum::<f64>()
                / 20.0
        };
        assert!(mean_at(10_000) < mean_at(1000));
    }

    #[test]
    fn simple_probability_enumerated_cases() {
        let pm = DegreeDistribution::point_mass;
        let est = |d: DegreeDistribution, n| estimate_simple_probability(&d, n, 500, &mut rng(3)).unwrap();
        assert_eq!(
            est(pm(1), 2),
            SimpleEstimate {
                estimate: 1.0,
                stderr: 0.0
            }
        );
        assert_eq!(
            est(pm(2), 2),
            SimpleEstimate {
                estimate: 0.0,
                stderr: 0.0
            }
        );
        assert_eq!(
            est(pm(1), 4),
            SimpleEstimate {
                estimate: 1.0,
                stderr: 0.0
            }
        );
        assert!(estimate_simple_probability(&pm(1), 2, 0, &mut rng(1)).is_err());
    }

    #[test]
    fn simple_probability_stabilizes_for_light_tails() {
        let f = DegreeDistribution::poisson(2.0).unwrap();
        let a = estimate_simple_probability(&f, 1000, 200, &mut rng(10)).unwrap();
        let b = estimate_simple_probability(&f, 10_000, 200, &mut rng(11)).unwrap();
        assert!((a.estimate - b.estimate).abs() < 0.1, "{a:?} {b:?}");
    }

    /// Finite law with `P(X >= k) = k^-s` for `1 <= k <= top`.
    fn exact_power_ccdf(s: f64, top: usize) -> DegreeDistribution {
        let c = |k: usize| (k as f64).powf(-s);
        let mut pmf = vec![0.0; top + 1];
        for (k, p) in pmf.iter_mut().enumerate().take(top).skip(1) {
            *p = c(k) - c(k + 1);
        }
        pmf[top] = c(top);
        DegreeDistribution::from_pmf(pmf).unwrap()
    }

    #[test]
    fn tail_exponent_examples() {
        let s1 = tail_exponent(&exact_power_ccdf(1.0, 5000), 10, 1000).unwrap();
        assert!((s1 + 1.0).abs() < 1e-9, "{s1}");
        let s2 = tail_exponent(&exact_power_ccdf(2.0, 5000), 10, 1000).unwrap();
        assert!((s2 + 2.0).abs() < 1e-9, "{s2}");
        let s3 = tail_exponent(&DegreeDistribution::power_law(3.0, 1).unwrap(), 10, 1000).unwrap();
        assert!((s3 + 2.0).abs() < 0.05, "{s3}");
        assert!(matches!(
            tail_exponent(&DegreeDistribution::poisson(1.0).unwrap(), 10, 1000),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            tail_exponent(&exact_power_ccdf(1.0, 50), 20, 10),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn report_format() {
        let mut r = VerificationReport::new("grg", 100, 3);
        r.tv = Some(0.25);
        assert_eq!(r.to_string(), "model=grg\nn=100\nseed=3\ntv=0.25\n");
    }

    fn pmf_strategy() -> impl Strategy<Value = DegreeDistribution> {
        prop::collection::vec(0.0f64..1.0, 1..12).prop_filter_map("zero mass", |w| {
            let total: f64 = w.iter().sum();
            (total > 0.0).then(|| dist(&w.iter().map(|x| x / total).collect::<Vec<_>>()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn tv_is_a_metric(p in pmf_strategy(), q in pmf_strategy(), r in pmf_strategy()) {
            let (pq, qp) = (tv_distance(&p, &q), tv_distance(&q, &p));
            prop_assert!((pq - qp).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&pq));
            prop_assert!(pq <= tv_distance(&p, &r) + tv_distance(&r, &q) + 1e-12);
            prop_assert!(tv_distance(&p, &p) < 1e-12);
        }

        #[test]
        fn empirical_sums_to_one(degrees in prop::collection::vec(0usize..30, 1..200)) {
            let e = empirical_from_degrees(&degrees).unwrap();
            prop_assert!((e.total_mass() - 1.0).abs() < 1e-12);
            for (k, c) in (0..30).map(|k| (k, degrees.iter().filter(|&&d| d == k).count())) {
                prop_assert_eq!(e.pmf_at(k), c as f64 / degrees.len() as f64);
            }
        }
    }
}
