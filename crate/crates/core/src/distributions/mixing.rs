//! Parameter laws for mixed Poisson degree distributions and GRG weights.

use rand::Rng;

use crate::error::{Error, Result};

use super::Mean;

/// Mass left outside the quadrature range at each end of a continuous law.
const QUANTILE_CLIP: f64 = 1e-9;
const PANELS: usize = 256;

// 8-point Gauss-Legendre on [-1, 1].
#[allow(clippy::excessive_precision)]
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
#[allow(clippy::excessive_precision)]
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Number of nodes in the fixed quadrature rule used for continuous laws.
pub const QUADRATURE_NODES: usize = PANELS * GL_NODES.len();

/// A law on `[0, inf)`, either a finite set of atoms or a density.
#[derive(Debug, Clone, PartialEq)]
pub enum MixingLaw {
    /// `(value, probability)` atoms.
    Discrete(Vec<(f64, f64)>),
    Continuous(ContinuousLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousLaw {
    Exponential {
        mean: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `P(W > w) = (w / scale)^-shape` for `w >= scale`.
    Pareto {
        scale: f64,
        shape: f64,
    },
    /// The base law translated `offset` units to the left.
    Shifted {
        base: Box<ContinuousLaw>,
        offset: f64,
    },
}

impl ContinuousLaw {
    pub fn density(&self, x: f64) -> f64 {
        match self {
            ContinuousLaw::Exponential { mean } => {
                if x < 0.0 {
                    0.0
                } else {
                    (-x / mean).exp() / mean
                }
            }
            ContinuousLaw::Uniform { lo, hi } => {
                if x < *lo || x > *hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            ContinuousLaw::Pareto { scale, shape } => {
                if x < *scale {
                    0.0
                } else {
                    shape / scale * (scale / x).powf(shape + 1.0)
                }
            }
            ContinuousLaw::Shifted { base, offset } => base.density(x + offset),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            ContinuousLaw::Exponential { mean } => -mean * (-u).ln_1p(),
            ContinuousLaw::Uniform { lo, hi } => lo + u * (hi - lo),
            ContinuousLaw::Pareto { scale, shape } => scale * (1.0 - u).powf(-1.0 / shape),
            ContinuousLaw::Shifted { base, offset } => base.quantile(u) - offset,
        }
    }

    pub fn support_infimum(&self) -> f64 {
        match self {
            ContinuousLaw::Exponential { .. } => 0.0,
            ContinuousLaw::Uniform { lo, .. } => *lo,
            ContinuousLaw::Pareto { scale, .. } => *scale,
            ContinuousLaw::Shifted { base, offset } => base.support_infimum() - offset,
        }
    }

    /// `E[X^p]` for `p > 0`, `None` when infinite.
    fn moment(&self, p: f64) -> Option<f64> {
        match self {
            ContinuousLaw::Exponential { mean } => Some(statrs::function::gamma::gamma(1.0 + p) * mean.powf(p)),
            ContinuousLaw::Uniform { lo, hi } => Some((hi.powf(p + 1.0) - lo.powf(p + 1.0)) / ((p + 1.0) * (hi - lo))),
            ContinuousLaw::Pareto { scale, shape } => (p < *shape).then(|| scale.powf(p) * shape / (shape - p)),
            ContinuousLaw::Shifted { base, .. } => {
                // (x - c)^p <= x^p on the support, so finiteness follows the base.
                base.moment(p)?;
                let rule = QuadratureRule::for_law(self);
                Some(rule.integrate(|x| x.powf(p)))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ContinuousLaw::Exponential { mean } => mean.is_finite() && *mean > 0.0,
            ContinuousLaw::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && *lo >= 0.0 && hi > lo,
            ContinuousLaw::Pareto { scale, shape } => {
                scale.is_finite() && *scale > 0.0 && shape.is_finite() && *shape > 0.0
            }
            ContinuousLaw::Shifted { base, offset } => {
                base.validate()?;
                offset.is_finite() && base.support_infimum() - offset >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("ill-formed continuous law {self:?}")))
        }
    }
}

impl MixingLaw {
    pub fn point_mass(w: f64) -> Result<Self> {
        Self::discrete(vec![(w, 1.0)])
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("discrete law needs at least one atom".into()));
        }
        let mut total = 0.0;
        for &(value, prob) in &atoms {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "atom value {value} must be finite and >= 0"
                )));
            }
            if !(0.0..=1.0).contains(&prob) {
                return Err(Error::InvalidParameter(format!(
                    "atom probability {prob} outside [0, 1]"
                )));
            }
            total += prob;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "atom probabilities sum to {total}, not 1"
            )));
        }
        Ok(MixingLaw::Discrete(atoms))
    }

    pub fn exponential(mean: f64) -> Result<Self> {
        Self::continuous(ContinuousLaw::Exponential { mean })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::continuous(ContinuousLaw::Uniform { lo, hi })
    }

    pub fn pareto(scale: f64, shape: f64) -> Result<Self> {
        Self::continuous(ContinuousLaw::Pareto { scale, shape })
    }

    fn continuous(law: ContinuousLaw) -> Result<Self> {
        law.validate()?;
        Ok(MixingLaw::Continuous(law))
    }

    pub fn mean(&self) -> Mean {
        match self.moment(1.0) {
            Some(m) => Mean::Finite(m),
            None => Mean::Infinite,
        }
    }

    /// `E[X^p]` for `p > 0`; `None` when the moment diverges.
    pub fn moment(&self, p: f64) -> Option<f64> {
        match self {
            MixingLaw::Discrete(atoms) => Some(atoms.iter().map(|&(v, q)| q * v.powf(p)).sum()),
            MixingLaw::Continuous(law) => law.moment(p),
        }
    }

    /// Infimum of the support (xi in the mixed Poisson recipe).
    pub fn support_infimum(&self) -> f64 {
        match self {
            MixingLaw::Discrete(atoms) => atoms
                .iter()
                .filter(|&&(_, q)| q > 0.0)
                .map(|&(v, _)| v)
                .fold(f64::INFINITY, f64::min),
            MixingLaw::Continuous(law) => law.support_infimum(),
        }
    }

    /// The law of `X - offset`. Fails if that would put mass below zero.
    pub fn shifted_left(&self, offset: f64) -> Result<Self> {
        match self {
            MixingLaw::Discrete(atoms) => Self::discrete(
                atoms
                    .iter()
                    .filter(|&&(_, q)| q > 0.0)
                    .map(|&(v, q)| (v - offset, q))
                    .collect(),
            ),
            MixingLaw::Continuous(ContinuousLaw::Uniform { lo, hi }) => Self::uniform(lo - offset, hi - offset),
            MixingLaw::Continuous(law) => Self::continuous(ContinuousLaw::Shifted {
                base: Box::new(law.clone()),
                offset,
            }),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MixingLaw::Discrete(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(v, q) in atoms {
                    acc += q;
                    if u < acc {
                        return v;
                    }
                }
                atoms.iter().rev().find(|&&(_, q)| q > 0.0).map_or(0.0, |&(v, _)| v)
            }
            MixingLaw::Continuous(law) => law.quantile(rng.random()),
        }
    }

    /// Nodes and weights summing to one, used to integrate against this law.
    pub fn quadrature(&self) -> QuadratureRule {
        match self {
            MixingLaw::Discrete(atoms) => QuadratureRule {
                nodes: atoms.iter().filter(|&&(_, q)| q > 0.0).map(|&(v, _)| v).collect(),
                weights: atoms.iter().filter(|&&(_, q)| q > 0.0).map(|&(_, q)| q).collect(),
            },
            MixingLaw::Continuous(law) => QuadratureRule::for_law(law),
        }
    }
}

/// Discrete approximation `sum_i weights[i] * f(nodes[i])` of an integral.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Gauss-Legendre panels on a log-spaced grid between the `1e-9` and
    /// `1 - 1e-9` quantiles, renormalized to unit mass.
    fn for_law(law: &ContinuousLaw) -> Self {
        let hi = law.quantile(1.0 - QUANTILE_CLIP);
        let mut lo = law.quantile(QUANTILE_CLIP);
        if lo <= 0.0 {
            lo = hi * 1e-30;
        }
        let (s_lo, s_hi) = (lo.ln(), hi.ln());
        let width = (s_hi - s_lo) / PANELS as f64;
        let mut nodes = Vec::with_capacity(QUADRATURE_NODES);
        let mut weights = Vec::with_capacity(QUADRATURE_NODES);
        for p in 0..PANELS {
            let mid = s_lo + (p as f64 + 0.5) * width;
            for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let x = (mid + 0.5 * width * t).exp();
                nodes.push(x);
                weights.push(w * 0.5 * width * law.density(x) * x);
            }
        }
        let mass: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= mass;
        }
        QuadratureRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Map from a mixing variable to the Poisson parameter it induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamMap {
    /// `lambda = s * x`
    Scale(f64),
    /// `lambda = gamma * x^alpha`
    Power { gamma: f64, alpha: f64 },
}

impl ParamMap {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            ParamMap::Scale(s) => s * x,
            ParamMap::Power { gamma, alpha } => gamma * x.powf(alpha),
        }
    }

    /// `E[lambda^p]` under `law`.
    pub(crate) fn moment(&self, law: &MixingLaw, p: f64) -> Option<f64> {
        match *self {
            ParamMap::Scale(s) => law.moment(p).map(|m| s.powf(p) * m),
            ParamMap::Power { gamma, alpha } => law.moment(alpha * p).map(|m| gamma.powf(p) * m),
        }
    }
}
