//! The configuration model and its erased, truncated-erased and repeated
//! simple-graph variants.

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::distributions::DegreeDistribution;
use crate::error::{Error, Result};
use crate::graph::{erase, GenerationReport, Multigraph, NodeId, SimpleGraph};

pub const MAX_PARITY_REDRAWS: usize = 1000;
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;

/// How an odd degree sum is made even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParityPolicy {
    /// Delete one stub chosen uniformly among all stubs.
    #[default]
    RemoveStub,
    /// Redraw the whole sequence until the sum is even.
    Regenerate,
}

/// Whether the repeated model redraws degrees on each attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeResampling {
    #[default]
    Redraw,
    KeepFixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub odd_sum_fixed: bool,
}

impl DegreeSequence {
    pub fn stub_count(&self) -> usize {
        self.degrees.iter().sum()
    }
}

pub fn sample_degree_sequence<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    parity: ParityPolicy,
    rng: &mut R,
) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one vertex".into()));
    }
    let draw = |rng: &mut R| -> Vec<usize> { (0..n).map(|_| dist.sample(rng)).collect() };
    match parity {
        ParityPolicy::RemoveStub => {
            let mut degrees = draw(rng);
            let total: usize = degrees.iter().sum();
            let odd = total % 2 == 1;
            if odd {
                let mut stub = rng.random_range(0..total);
                for d in degrees.iter_mut() {
                    if stub < *d {
                        *d -= 1;
                        break;
                    }
                    stub -= *d;
                }
            }
            Ok(DegreeSequence {
                degrees,
                odd_sum_fixed: odd,
            })
        }
        ParityPolicy::Regenerate => {
            for redraw in 0..=MAX_PARITY_REDRAWS {
                let degrees = draw(rng);
                if degrees.iter().sum::<usize>() % 2 == 0 {
                    return Ok(DegreeSequence {
                        degrees,
                        odd_sum_fixed: redraw > 0,
                    });
                }
            }
            Err(Error::NonConvergence {
                redraws: MAX_PARITY_REDRAWS,
            })
        }
    }
}

/// Uniform perfect matching of all stubs: shuffle the stub array and pair
/// consecutive entries.
pub fn pair_stubs<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Result<Multigraph> {
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::InvalidInput(format!("odd stub total {total}")));
    }
    if degrees.len() > NodeId::MAX as usize {
        return Err(Error::InvalidInput(format!(
            "{} vertices exceed the id range",
            degrees.len()
        )));
    }
    let mut stubs: Vec<NodeId> = Vec::with_capacity(total);
    for (i, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(i as NodeId, d));
    }
    stubs.shuffle(rng);
    let edges = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Ok(Multigraph::new(degrees.len(), edges))
}

fn warn_infinite_mean(dist: &DegreeDistribution) {
    if !dist.mean().is_finite() {
        warn!("degree distribution has infinite mean; erased configuration limit is not guaranteed");
    }
}

pub fn erased_configuration<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    parity: ParityPolicy,
    rng: &mut R,
) -> Result<(SimpleGraph, GenerationReport)> {
    warn_infinite_mean(dist);
    erase_pipeline(dist, n, parity, rng)
}

fn erase_pipeline<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    parity: ParityPolicy,
    rng: &mut R,
) -> Result<(SimpleGraph, GenerationReport)> {
    let seq = sample_degree_sequence(dist, n, parity, rng)?;
    let mg = pair_stubs(&seq.degrees, rng)?;
    let (g, mut report) = erase(&mg);
    report.odd_sum_fixed = seq.odd_sum_fixed;
    Ok((g, report))
}

/// `floor(n^a)`, robust to `powf` landing just under an integer.
pub fn truncation_cutoff(n: usize, a: f64) -> usize {
    ((n as f64).powf(a) + 1e-9).floor() as usize
}

/// Erased configuration with degrees conditioned on `D <= floor(n^a)`.
pub fn truncated_erased_configuration<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    a: f64,
    parity: ParityPolicy,
    rng: &mut R,
) -> Result<(SimpleGraph, GenerationReport)> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation exponent a = {a} must lie in (0, 1)"
        )));
    }
    let truncated = dist.conditional_truncate(truncation_cutoff(n, a))?;
    erase_pipeline(&truncated, n, parity, rng)
}

/// Repeats degree sampling and pairing until the multigraph is simple.
pub fn repeated_configuration<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    parity: ParityPolicy,
    max_attempts: usize,
    rng: &mut R,
) -> Result<(SimpleGraph, GenerationReport)> {
    repeated_configuration_with(dist, n, parity, max_attempts, DegreeResampling::Redraw, rng)
}

pub fn repeated_configuration_with<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    parity: ParityPolicy,
    max_attempts: usize,
    resampling: DegreeResampling,
    rng: &mut R,
) -> Result<(SimpleGraph, GenerationReport)> {
    if !dist.second_moment_finite() {
        warn!("degree distribution has infinite second moment; attempts may be unbounded");
    }
    let mut seq = sample_degree_sequence(dist, n, parity, rng)?;
    for attempt in 1..=max_attempts {
        if attempt > 1 && resampling == DegreeResampling::Redraw {
            seq = sample_degree_sequence(dist, n, parity, rng)?;
        }
        let mg = pair_stubs(&seq.degrees, rng)?;
        if mg.is_simple() {
            let mut report = GenerationReport::clean(n);
            report.attempts = attempt;
            report.odd_sum_fixed = seq.odd_sum_fixed;
            let g = SimpleGraph::from_pairs(n, mg.edges().iter().copied());
            return Ok((g, report));
        }
    }
    Err(Error::TooManyAttempts { attempts: max_attempts })
}
