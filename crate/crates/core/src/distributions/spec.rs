//! Text grammar for distributions and mixing laws.
//!
//! Degree distributions:
//!
//! ```text
//! poisson:MU | powerlaw:TAU,KMIN | pointmass:K | geometric:P
//! compound:LAMBDA,<dist-spec> | mixedpoisson:<mix-spec>,SCALE
//! discrete:K=P/K=P/...
//! ```
//!
//! Mixing laws:
//!
//! ```text
//! pointmass:W | exponential:MEAN | uniform:LO,HI | pareto:XMIN,SHAPE
//! discrete:V=P/V=P/...
//! ```

use std::str::FromStr;

use crate::error::{Error, Result};

use super::{DegreeDistribution, MixingLaw};

fn num<T: FromStr>(token: &str) -> Result<T> {
    token.trim().parse().map_err(|_| Error::parse(token, "not a number"))
}

fn split_head(spec: &str) -> Result<(&str, &str)> {
    spec.split_once(':')
        .ok_or_else(|| Error::parse(spec, "expected KIND:ARGS"))
}

fn two<'a>(args: &'a str, whole: &str) -> Result<(&'a str, &'a str)> {
    args.split_once(',')
        .ok_or_else(|| Error::parse(whole, "expected two comma-separated arguments"))
}

fn atoms<T: FromStr>(args: &str) -> Result<Vec<(T, f64)>> {
    args.split('/')
        .map(|atom| {
            let (v, p) = atom
                .split_once('=')
                .ok_or_else(|| Error::parse(atom, "expected VALUE=PROB"))?;
            Ok((num(v)?, num(p)?))
        })
        .collect()
}

pub fn parse_dist_spec(spec: &str) -> Result<DegreeDistribution> {
    let (kind, args) = split_head(spec)?;
    match kind {
        "poisson" => DegreeDistribution::poisson(num(args)?),
        "powerlaw" => {
            let (tau, k_min) = two(args, spec)?;
            DegreeDistribution::power_law(num(tau)?, num(k_min)?)
        }
        "pointmass" => Ok(DegreeDistribution::point_mass(num(args)?)),
        "geometric" => DegreeDistribution::geometric(num(args)?),
        "compound" => {
            let (lambda, summand) = two(args, spec)?;
            DegreeDistribution::compound_poisson(num(lambda)?, &parse_dist_spec(summand)?)
        }
        "mixedpoisson" => {
            let (mix, scale) = args
                .rsplit_once(',')
                .ok_or_else(|| Error::parse(spec, "expected <mix-spec>,SCALE"))?;
            DegreeDistribution::mixed_poisson(&parse_mix_spec(mix)?, num(scale)?)
        }
        "discrete" => {
            let atoms: Vec<(usize, f64)> = atoms(args)?;
            let len = atoms.iter().map(|&(k, _)| k + 1).max().unwrap_or(1);
            let mut pmf = vec![0.0; len];
            for (k, p) in atoms {
                pmf[k] += p;
            }
            DegreeDistribution::from_pmf(pmf)
        }
        _ => Err(Error::parse(kind, "unknown distribution kind")),
    }
}

pub fn parse_mix_spec(spec: &str) -> Result<MixingLaw> {
    let (kind, args) = split_head(spec)?;
    match kind {
        "pointmass" => MixingLaw::point_mass(num(args)?),
        "exponential" => MixingLaw::exponential(num(args)?),
        "uniform" => {
            let (lo, hi) = two(args, spec)?;
            MixingLaw::uniform(num(lo)?, num(hi)?)
        }
        "pareto" => {
            let (scale, shape) = two(args, spec)?;
            MixingLaw::pareto(num(scale)?, num(shape)?)
        }
        "discrete" => MixingLaw::discrete(atoms(args)?),
        _ => Err(Error::parse(kind, "unknown mixing law kind")),
    }
}
