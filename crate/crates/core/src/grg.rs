//! Generalized random graph: independent edges with odds `W_i W_j / n^beta`.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::distributions::{sample_poisson, DegreeDistribution, MixingLaw, ParamMap};
use crate::error::{Error, Result};
use crate::graph::{pair_key, NodeId, SimpleGraph};
use crate::seeding::{substream, Purpose};

/// Rows per substream in [`grg_exact_blocked`].
pub const ROW_BLOCK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    weights: Vec<f64>,
    beta: f64,
}

impl WeightSequence {
    pub fn new(weights: Vec<f64>, beta: f64) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "weight {w} is not a finite non-negative number"
            )));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must be finite and non-negative"
            )));
        }
        if weights.len() > NodeId::MAX as usize {
            return Err(Error::InvalidParameter("too many vertices".into()));
        }
        Ok(WeightSequence { weights, beta })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    /// `n^-beta`, the factor turning `W_i W_j` into an odds ratio.
    pub fn odds_scale(&self) -> f64 {
        (self.n() as f64).powf(-self.beta)
    }

    pub fn odds(&self, i: usize, j: usize) -> f64 {
        self.weights[i] * self.weights[j] * self.odds_scale()
    }

    /// One weight per line, shortest round-trip decimal form.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut buf = String::with_capacity(self.weights.len() * 20);
        for w in &self.weights {
            let _ = writeln!(buf, "{w}");
        }
        out.write_all(buf.as_bytes())
    }

    /// Inverse of [`write_text`](Self::write_text). Blank lines and `#` comments are skipped.
    pub fn read_text<R: BufRead>(input: R, beta: f64) -> Result<Self> {
        let mut weights = Vec::new();
        for line in input.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            weights.push(t.parse().map_err(|_| Error::parse(t, "not a weight"))?);
        }
        Self::new(weights, beta)
    }
}

pub fn sample_weights<R: Rng + ?Sized>(law: &MixingLaw, n: usize, beta: f64, rng: &mut R) -> Result<WeightSequence> {
    let weights = (0..n).map(|_| law.sample(rng)).collect();
    WeightSequence::new(weights, beta)
}

fn sweep_rows<R: Rng + ?Sized>(w: &[f64], scale: f64, rows: std::ops::Range<usize>, rng: &mut R, keys: &mut Vec<u64>) {
    for i in rows {
        let a = w[i] * scale;
        if a == 0.0 {
            continue;
        }
        for (j, &wj) in w.iter().enumerate().skip(i + 1) {
            let r = a * wj;
            // u < r / (1 + r) without the division
            if rng.random::<f64>() * (1.0 + r) < r {
                keys.push(pair_key(i as NodeId, j as NodeId));
            }
        }
    }
}

/// Exact Θ(n²) sweep over all pairs with a single stream.
pub fn grg_exact<R: Rng + ?Sized>(w: &WeightSequence, rng: &mut R) -> Result<SimpleGraph> {
    let n = w.n();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one vertex".into()));
    }
    let mut keys = Vec::new();
    sweep_rows(&w.weights, w.odds_scale(), 0..n, rng, &mut keys);
    Ok(SimpleGraph::from_sorted_keys(n, &keys))
}

/// Row-blocked exact sweep. Rows `[64b, 64b + 64)` draw from
/// `substream(seed, Edges, b)`, so the graph depends only on `seed`,
/// never on `threads`.
pub fn grg_exact_blocked(w: &WeightSequence, seed: u64, threads: Option<usize>) -> Result<SimpleGraph> {
    let n = w.n();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one vertex".into()));
    }
    let scale = w.odds_scale();
    let blocks = n.div_ceil(ROW_BLOCK);
    let run = || -> Vec<Vec<u64>> {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream(seed, Purpose::Edges, b as u64);
                let mut keys = Vec::new();
                let rows = b * ROW_BLOCK..((b + 1) * ROW_BLOCK).min(n);
                sweep_rows(&w.weights, scale, rows, &mut rng, &mut keys);
                keys
            })
            .collect()
    };
    let parts = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let keys = parts.concat();
    Ok(SimpleGraph::from_sorted_keys(n, &keys))
}

/// O(n + m) approximation: `m ~ Poisson((ΣW)² / (2 n^beta))` edge slots with
/// both endpoints drawn proportionally to `W`; loops and repeats are dropped.
pub fn grg_fast<R: Rng + ?Sized>(w: &WeightSequence, rng: &mut R) -> Result<SimpleGraph> {
    let n = w.n();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    let total: f64 = w.weights.iter().sum();
    if total == 0.0 {
        return Ok(SimpleGraph::empty(n));
    }
    let slots = sample_poisson(total * total * w.odds_scale() / 2.0, rng);
    let alias =
        WeightedAliasIndex::new(w.weights.clone()).map_err(|e| Error::InvalidParameter(format!("weights: {e}")))?;
    let pairs = (0..slots).map(|_| (alias.sample(rng) as NodeId, alias.sample(rng) as NodeId));
    Ok(SimpleGraph::from_pairs(n, pairs.collect::<Vec<_>>()))
}

/// `c * ∫_0^∞ (1+x)^-2 x^-alpha dx`.
///
/// On `[0,1]` the substitution `x = t^(1/(1-alpha))` removes the endpoint
/// singularity; on `[1,∞)` `x = 1/u`, `u = t^(1/alpha)` maps to a smooth
/// integrand on `[0,1]`.
pub fn gamma_constant(alpha: f64, c: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    let p = 1.0 / (1.0 - alpha);
    let head = quadrature::integrate(|t: f64| p / (1.0 + t.powf(p)).powi(2), 0.0, 1.0, 1e-13).integral;
    let q = 1.0 / alpha;
    let tail = quadrature::integrate(
        |t: f64| {
            let u = t.powf(q);
            q * u / (1.0 + u).powi(2)
        },
        0.0,
        1.0,
        1e-13,
    )
    .integral;
    Ok(c * (head + tail))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `beta = 1`, parameter `x * mu_W`.
    FiniteMean,
    /// `P(W > w) ~ c w^-alpha`, `beta = 1/alpha`, parameter `gamma x^alpha`.
    HeavyTail { alpha: f64, c: f64 },
}

impl Regime {
    pub fn beta(&self) -> f64 {
        match *self {
            Regime::FiniteMean => 1.0,
            Regime::HeavyTail { alpha, .. } => 1.0 / alpha,
        }
    }
}

/// Asymptotic degree law of the generalized random graph.
pub fn grg_limit_pmf(law: &MixingLaw, regime: Regime) -> Result<DegreeDistribution> {
    match regime {
        Regime::FiniteMean => {
            let mu = law.mean().value().ok_or_else(|| {
                Error::InvalidParameter("finite-mean regime needs a weight law with finite mean".into())
            })?;
            DegreeDistribution::mixed_poisson_mapped(law, ParamMap::Scale(mu))
        }
        Regime::HeavyTail { alpha, c } => {
            let gamma = gamma_constant(alpha, c)?;
            DegreeDistribution::mixed_poisson_mapped(law, ParamMap::Power { gamma, alpha })
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn constant(w: f64, n: usize, beta: f64) -> WeightSequence {
        WeightSequence::new(vec![w; n], beta).unwrap()
    }

    #[test]
    fn sample_weights_examples() {
        let w = sample_weights(&MixingLaw::point_mass(2.0).unwrap(), 3, 1.0, &mut rng(1)).unwrap();
        assert_eq!(w.weights(), &[2.0, 2.0, 2.0]);
        let zero = sample_weights(&MixingLaw::point_mass(0.0).unwrap(), 50, 1.0, &mut rng(1)).unwrap();
        assert_eq!(grg_exact(&zero, &mut rng(2)).unwrap().edge_count(), 0);
        assert_eq!(grg_fast(&zero, &mut rng(2)).unwrap().edge_count(), 0);

        let n = 1_000_000;
        let w = sample_weights(&MixingLaw::exponential(1.0).unwrap(), n, 1.0, &mut rng(3)).unwrap();
        let mean = w.weights().iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "{mean}");
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightSequence::new(vec![1.0, -0.5], 1.0).is_err());
        assert!(WeightSequence::new(vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn two_vertex_edge_probability_is_half() {
        let w = constant(1.0, 2, 0.0);
        let mut r = rng(8);
        let runs = 40_000;
        let hits = (0..runs)
            .filter(|_| grg_exact(&w, &mut r).unwrap().edge_count() == 1)
            .count();
        let p = hits as f64 / runs as f64;
        assert!((p - 0.5).abs() < 5.0 * (0.25 / runs as f64).sqrt(), "{p}");
    }

    #[test]
    fn blocked_sweep_ignores_thread_count() {
        let w = sample_weights(&MixingLaw::exponential(3.0).unwrap(), 700, 1.0, &mut rng(4)).unwrap();
        let a = grg_exact_blocked(&w, 11, Some(1)).unwrap();
        let b = grg_exact_blocked(&w, 11, Some(3)).unwrap();
        let c = grg_exact_blocked(&w, 11, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_ne!(a, grg_exact_blocked(&w, 12, Some(1)).unwrap());
        assert!(a.check_invariants().is_ok());
    }

    #[test]
    fn fast_mean_degree_matches_first_order() {
        let n = 20_000;
        let w = constant(2.0, n, 1.0);
        let g = grg_fast(&w, &mut rng(5)).unwrap();
        let mean = 2.0 * g.edge_count() as f64 / n as f64;
        assert!((mean - 4.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn weight_text_round_trip() {
        let w = sample_weights(&MixingLaw::pareto(1.0, 0.5).unwrap(), 200, 2.0, &mut rng(6)).unwrap();
        let mut buf = Vec::new();
        w.write_text(&mut buf).unwrap();
        let back = WeightSequence::read_text(&buf[..], 2.0).unwrap();
        assert_eq!(w, back);
        assert!(matches!(
            WeightSequence::read_text(&b"1.0\nabc\n"[..], 1.0),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn gamma_constant_examples() {
        assert!((gamma_constant(0.5, 1.0).unwrap() - PI / 2.0).abs() < 1e-8);
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let g1 = gamma_constant(alpha, 1.0).unwrap();
            let g2 = gamma_constant(alpha, 2.0).unwrap();
            assert!((g2 - 2.0 * g1).abs() < 1e-12);
            // Beta(1-alpha, 1+alpha) = pi alpha / sin(pi alpha)
            let closed = PI * alpha / (PI * alpha).sin();
            assert!((g1 - closed).abs() < 1e-8, "alpha {alpha}: {g1} vs {closed}");
        }
        assert!(gamma_constant(1.0, 1.0).is_err());
        assert!(gamma_constant(0.0, 1.0).is_err());
    }

    #[test]
    fn gamma_constant_monte_carlo() {
        // x = t/(1-t) turns the integral into E[(1-T)^alpha] / (1-alpha)
        // with T ~ Beta(1-alpha, 1), sampled as U^(1/(1-alpha)).
        let alpha = 0.5;
        let mut r = rng(77);
        let samples = 10_000_000;
        let sum: f64 = (0..samples)
            .map(|_| {
                let t = r.random::<f64>().powf(1.0 / (1.0 - alpha));
                (1.0 - t).powf(alpha)
            })
            .sum();
        let mc = sum / samples as f64 / (1.0 - alpha);
        assert!((mc - gamma_constant(alpha, 1.0).unwrap()).abs() < 1e-3, "{mc}");
    }

    #[test]
    fn limit_pmf_examples() {
        let pm = grg_limit_pmf(&MixingLaw::point_mass(1.5).unwrap(), Regime::FiniteMean).unwrap();
        let po = DegreeDistribution::poisson(2.25).unwrap();
        for k in 0..30 {
            assert!((pm.pmf_at(k) - po.pmf_at(k)).abs() < 1e-12);
        }
        let two = MixingLaw::discrete(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        let d = grg_limit_pmf(&two, Regime::FiniteMean).unwrap();
        let expect = ((-2.0f64).exp() + (-6.0f64).exp()) / 2.0;
        assert!((d.pmf_at(0) - expect).abs() < 1e-12);

        let pareto = MixingLaw::pareto(1.0, 0.5).unwrap();
        assert!(matches!(
            grg_limit_pmf(&pareto, Regime::FiniteMean),
            Err(Error::InvalidParameter(_))
        ));
        let heavy = grg_limit_pmf(&pareto, Regime::HeavyTail { alpha: 0.5, c: 1.0 }).unwrap();
        // ccdf(y) ~ c' / y: log-log slope over [100, 1000] close to -1
        let slope = (heavy.ccdf_at(1000).ln() - heavy.ccdf_at(100).ln()) / (10f64).ln();
        assert!((slope + 1.0).abs() < 0.05, "{slope}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_and_fast_are_simple(
            ws in prop::collection::vec(0.0f64..5.0, 1..120),
            beta in 0.0f64..2.0,
            seed in any::<u64>(),
        ) {
            let w = WeightSequence::new(ws, beta).unwrap();
            let g = grg_exact(&w, &mut rng(seed)).unwrap();
            prop_assert!(g.check_invariants().is_ok());
            if w.n() >= 2 {
                let f = grg_fast(&w, &mut rng(seed)).unwrap();
                prop_assert!(f.check_invariants().is_ok());
            }
            let b = grg_exact_blocked(&w, seed, Some(1)).unwrap();
            prop_assert!(b.check_invariants().is_ok());
        }
    }
}
