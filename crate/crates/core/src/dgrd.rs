//! Directed graph with removed directions: every vertex shoots `Y_i` edges at
//! distinct random targets, then directions are dropped and duplicates fused.

use rand::seq::index;
use rand::Rng;

use crate::distributions::{parse_dist_spec, parse_mix_spec, DegreeDistribution, Mean, MixingLaw};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SimpleGraph};

/// Out-edges of the intermediate directed graph, in CSR form.
#[derive(Debug, Clone)]
pub(crate) struct DirectedDraw {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl DirectedDraw {
    pub(crate) fn out_targets(&self, i: usize) -> &[NodeId] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub(crate) fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub(crate) fn fuse(&self) -> SimpleGraph {
        let n = self.n();
        let pairs = (0..n).flat_map(|i| self.out_targets(i).iter().map(move |&j| (i as NodeId, j)));
        SimpleGraph::from_pairs(n, pairs.collect::<Vec<_>>())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dgrd needs n >= 2, got {n}")));
    }
    if n > NodeId::MAX as usize {
        return Err(Error::InvalidParameter("too many vertices".into()));
    }
    Ok(())
}

pub(crate) fn draw_directed<R: Rng + ?Sized>(g: &DegreeDistribution, n: usize, rng: &mut R) -> Result<DirectedDraw> {
    check_n(n)?;
    if !g.mean().is_finite() {
        return Err(Error::InvalidParameter("out-degree law must have finite mean".into()));
    }
    let capped = g.cap_truncate(n)?;
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut targets = Vec::new();
    for i in 0..n {
        let y = capped.sample(rng);
        // indices in 0..n-1 skip over i itself
        for j in index::sample(rng, n - 1, y) {
            let j = if j >= i { j + 1 } else { j };
            targets.push(j as NodeId);
        }
        offsets.push(targets.len());
    }
    Ok(DirectedDraw { offsets, targets })
}

pub fn dgrd_generate<R: Rng + ?Sized>(g: &DegreeDistribution, n: usize, rng: &mut R) -> Result<SimpleGraph> {
    Ok(draw_directed(g, n, rng)?.fuse())
}

/// Limit degree law `G * Po(mu_G)`.
pub fn dgrd_target(g: &DegreeDistribution) -> Result<DegreeDistribution> {
    match g.mean() {
        Mean::Finite(mu) => g.convolve_poisson(mu),
        Mean::Infinite => Err(Error::InvalidParameter("out-degree law must have finite mean".into())),
    }
}

/// Out-degree law whose target is `Poisson(mu)`.
pub fn poisson_source(mu: f64) -> Result<DegreeDistribution> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Poisson mean {mu} must be finite and >= 0"
        )));
    }
    DegreeDistribution::poisson(mu / 2.0)
}

/// `Q` translated `mu_Q / 2` to the left. Needs `inf supp Q > mu_Q / 2`.
pub fn shifted_mixing_law(q: &MixingLaw) -> Result<MixingLaw> {
    let mu = q
        .mean()
        .value()
        .ok_or_else(|| Error::RecipeInfeasible("mixing law has infinite mean".into()))?;
    let xi = q.support_infimum();
    if !(xi > mu / 2.0) {
        return Err(Error::RecipeInfeasible(format!(
            "mixed Poisson recipe needs xi_Q > mu_Q/2, got xi_Q = {xi}, mu_Q/2 = {}",
            mu / 2.0
        )));
    }
    q.shifted_left(mu / 2.0)
}

/// Out-degree law whose target is mixed Poisson with mixing law `Q`.
pub fn mixed_poisson_source(q: &MixingLaw) -> Result<DegreeDistribution> {
    DegreeDistribution::mixed_poisson(&shifted_mixing_law(q)?, 1.0)
}

/// `R'`: `R` with mass `mu_R / 2` moved from 1 to 0. Needs `r_1 > mu_R / 2`.
pub fn thinned_summand(r: &DegreeDistribution) -> Result<DegreeDistribution> {
    let mu = r
        .mean()
        .value()
        .ok_or_else(|| Error::RecipeInfeasible("summand law has infinite mean".into()))?;
    let r1 = r.pmf_at(1);
    if !(r1 > mu / 2.0) {
        return Err(Error::RecipeInfeasible(format!(
            "compound Poisson recipe needs r_1 > mu_R/2, got r_1 = {r1}, mu_R/2 = {}",
            mu / 2.0
        )));
    }
    r.transfer_mass(1, 0, mu / 2.0)
}

/// Out-degree law whose target is compound Poisson `CP(lambda, R)`.
pub fn compound_poisson_source(lambda: f64, r: &DegreeDistribution) -> Result<DegreeDistribution> {
    DegreeDistribution::compound_poisson(lambda, &thinned_summand(r)?)
}

/// Inverse recipe: the intended target law `F` of a dgrd run.
#[derive(Debug, Clone)]
pub enum Recipe {
    /// `F = Poisson(mu)`
    Poisson(f64),
    /// `F` mixed Poisson with mixing law `Q`
    MixedPoisson(MixingLaw),
    /// `F = CP(lambda, R)`
    CompoundPoisson(f64, DegreeDistribution),
}

impl Recipe {
    /// `poisson:MU | mixedpoisson:<mix-spec> | compoundpoisson:LAMBDA,<summand-spec>`
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, args) = spec
            .split_once(':')
            .ok_or_else(|| Error::parse(spec, "expected KIND:ARGS"))?;
        let num = |t: &str| -> Result<f64> { t.trim().parse().map_err(|_| Error::parse(t, "not a number")) };
        match kind {
            "poisson" => Ok(Recipe::Poisson(num(args)?)),
            "mixedpoisson" => Ok(Recipe::MixedPoisson(parse_mix_spec(args)?)),
            "compoundpoisson" => {
                let (lambda, summand) = args
                    .split_once(',')
                    .ok_or_else(|| Error::parse(spec, "expected LAMBDA,<summand-spec>"))?;
                Ok(Recipe::CompoundPoisson(num(lambda)?, parse_dist_spec(summand)?))
            }
            _ => Err(Error::parse(kind, "unknown recipe kind")),
        }
    }

    /// Out-degree law `G` with `G * Po(mu_G) = F`.
    pub fn source(&self) -> Result<DegreeDistribution> {
        match self {
            Recipe::Poisson(mu) => poisson_source(*mu),
            Recipe::MixedPoisson(q) => mixed_poisson_source(q),
            Recipe::CompoundPoisson(lambda, r) => compound_poisson_source(*lambda, r),
        }
    }

    /// The target law `F` itself.
    pub fn intended(&self) -> Result<DegreeDistribution> {
        match self {
            Recipe::Poisson(mu) => DegreeDistribution::poisson(*mu),
            Recipe::MixedPoisson(q) => DegreeDistribution::mixed_poisson(q, 1.0),
            Recipe::CompoundPoisson(lambda, r) => DegreeDistribution::compound_poisson(*lambda, r),
        }
    }
}
