//! Wall-clock timings of every generator over a doubling grid of sizes.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::config_model::{
    erased_configuration, repeated_configuration, truncated_erased_configuration, ParityPolicy, DEFAULT_MAX_ATTEMPTS,
};
use crate::dgrd::{dgrd_generate, poisson_source};
use crate::distributions::{DegreeDistribution, MixingLaw};
use crate::error::{Error, Result};
use crate::grg::{grg_exact_blocked, grg_fast, sample_weights};
use crate::seeding::{stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchModel {
    ErasedConfig,
    RepeatedConfig,
    TruncatedConfig,
    Dgrd,
    GrgExact,
    GrgFast,
}

impl BenchModel {
    pub const ALL: [BenchModel; 6] = [
        BenchModel::ErasedConfig,
        BenchModel::RepeatedConfig,
        BenchModel::TruncatedConfig,
        BenchModel::Dgrd,
        BenchModel::GrgExact,
        BenchModel::GrgFast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchModel::ErasedConfig => "erased-config",
            BenchModel::RepeatedConfig => "repeated-config",
            BenchModel::TruncatedConfig => "truncated-config",
            BenchModel::Dgrd => "dgrd",
            BenchModel::GrgExact => "grg-exact",
            BenchModel::GrgFast => "grg-fast",
        }
    }

    pub fn default_grid(self) -> Vec<usize> {
        match self {
            BenchModel::GrgExact => vec![5_000, 10_000, 20_000],
            _ => vec![125_000, 250_000, 500_000, 1_000_000],
        }
    }

    /// Repeated configuration needs many runs: its cost per run is a
    /// geometric number of attempts.
    pub fn default_reps(self) -> usize {
        match self {
            BenchModel::RepeatedConfig => 40,
            _ => 5,
        }
    }

    /// One generation at size `n`; returns the edge count.
    ///
    /// Workloads: Poisson(5) degrees for the erased variants, Poisson(0.5)
    /// for the repeated one, Poisson(2.5) out-degrees for dgrd (target
    /// Poisson(5)), exponential(2) weights with beta = 1 for both GRGs.
    pub fn run_once(self, n: usize, seed: u64) -> Result<usize> {
        let mut rng = stream(seed, Purpose::Degrees);
        let g = match self {
            BenchModel::ErasedConfig => {
                erased_configuration(
                    &DegreeDistribution::poisson(5.0)?,
                    n,
                    ParityPolicy::RemoveStub,
                    &mut rng,
                )?
                .0
            }
            BenchModel::RepeatedConfig => {
                let f = DegreeDistribution::poisson(0.5)?;
                repeated_configuration(&f, n, ParityPolicy::RemoveStub, DEFAULT_MAX_ATTEMPTS, &mut rng)?.0
            }
            BenchModel::TruncatedConfig => {
                let f = DegreeDistribution::poisson(5.0)?;
                truncated_erased_configuration(&f, n, 0.5, ParityPolicy::RemoveStub, &mut rng)?.0
            }
            BenchModel::Dgrd => dgrd_generate(&poisson_source(5.0)?, n, &mut rng)?,
            BenchModel::GrgExact | BenchModel::GrgFast => {
                let w = sample_weights(
                    &MixingLaw::exponential(2.0)?,
                    n,
                    1.0,
                    &mut stream(seed, Purpose::Weights),
                )?;
                if self == BenchModel::GrgExact {
                    grg_exact_blocked(&w, seed, Some(1))?
                } else {
                    grg_fast(&w, &mut stream(seed, Purpose::Edges))?
                }
            }
        };
        Ok(g.edge_count())
    }
}

impl FromStr for BenchModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchModel::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::parse(s, "unknown bench model"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub model: BenchModel,
    pub n: usize,
    /// Mean seconds per generation.
    pub seconds: f64,
    /// Mean edge count.
    pub edges: f64,
}

impl fmt::Display for BenchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<17} {:>9} {:>12.6} {:>12.1}",
            self.model.name(),
            self.n,
            self.seconds,
            self.edges
        )
    }
}

pub const BENCH_HEADER: &str = "model                     n      seconds        edges";

/// Times `reps` generations at each grid size, after one untimed warm-up.
pub fn bench_model(model: BenchModel, grid: &[usize], reps: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one repetition".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &n in grid {
        model.run_once(n, seed)?;
        let mut edges = 0usize;
        let start = Instant::now();
        for rep in 0..reps {
            edges += model.run_once(n, seed.wrapping_add(rep as u64 + 1))?;
        }
        let seconds = start.elapsed().as_secs_f64() / reps as f64;
        rows.push(BenchRow {
            model,
            n,
            seconds,
            edges: edges as f64 / reps as f64,
        });
    }
    Ok(rows)
}

/// `t(n_{i+1}) / t(n_i)` for consecutive rows.
pub fn doubling_ratios(rows: &[BenchRow]) -> Vec<f64> {
    rows.windows(2).map(|w| w[1].seconds / w[0].seconds).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in BenchModel::ALL {
            assert_eq!(m.name().parse::<BenchModel>().unwrap(), m);
        }
        assert!("grg".parse::<BenchModel>().is_err());
    }

    #[test]
    fn small_bench_runs() {
        for m in BenchModel::ALL {
            let rows = bench_model(m, &[200, 400], 2, 1).unwrap();
            assert_eq!(rows.len(), 2);
            assert!(rows.iter().all(|r| r.seconds >= 0.0 && r.edges > 0.0));
            assert_eq!(doubling_ratios(&rows).len(), 1);
        }
    }
}
