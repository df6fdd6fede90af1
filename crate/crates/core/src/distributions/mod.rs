//! Degree distributions on the non-negative integers.
//!
//! A [`DegreeDistribution`] stores a materialized head `p_0..p_{K-1}` and,
//! for laws whose mass beyond `1 - 1e-12` cannot be materialized cheaply
//! (power laws, heavy-tailed mixed Poisson laws and their convolutions), a
//! lazily evaluated tail with an exact conditional sampler.

mod mixing;
mod spec;

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub use mixing::{ContinuousLaw, MixingLaw, ParamMap, QuadratureRule, QUADRATURE_NODES};
pub use spec::{parse_dist_spec, parse_mix_spec};

/// Infinite-support laws are materialized until the CDF reaches `1 - MATERIALIZE_EPS`.
pub const MATERIALIZE_EPS: f64 = 1e-12;

const POWER_HEAD: usize = 1 << 16;
const MIXED_HEAD: usize = 1 << 14;
const MAX_SUPPORT: usize = 1 << 24;
/// Samples drawn from an unbounded power tail are clamped here.
const SAMPLE_CLAMP: f64 = 9_007_199_254_740_992.0; // 2^53

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mean {
    Finite(f64),
    Infinite,
}

impl Mean {
    pub fn is_finite(self) -> bool {
        matches!(self, Mean::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Mean::Finite(m) => Some(m),
            Mean::Infinite => None,
        }
    }
}

#[derive(Debug)]
enum Tail {
    /// `p_k = k^-tau / norm`
    Power { tau: f64, norm: f64 },
    Mixed {
        map: ParamMap,
        law: MixingLaw,
        rule: QuadratureRule,
    },
    /// `base * Po(mu)`, with `kernel` the materialized Poisson pmf.
    Convolved {
        base: DegreeDistribution,
        mu: f64,
        kernel: Vec<f64>,
    },
}

impl Tail {
    fn pmf(&self, k: usize) -> f64 {
        match self {
            Tail::Power { tau, norm } => (k as f64).powf(-tau) / norm,
            Tail::Mixed { map, rule, .. } => {
                let lk = ln_gamma(k as f64 + 1.0);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| w * poisson_pmf_log(map.apply(x), k, lk).exp())
                    .sum()
            }
            Tail::Convolved { base, kernel, .. } => kernel
                .iter()
                .enumerate()
                .take(k + 1)
                .map(|(j, &q)| q * base.pmf_at(k - j))
                .sum(),
        }
    }

    /// Draws from the law conditioned on the outcome being `>= from`.
    fn sample<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> usize {
        match self {
            Tail::Power { tau, .. } => sample_power_tail(*tau, from, rng),
            Tail::Mixed { map, law, .. } => loop {
                let k = sample_poisson(map.apply(law.sample(rng)), rng);
                if k >= from {
                    return k;
                }
            },
            Tail::Convolved { base, mu, .. } => loop {
                let k = base.sample(rng) + sample_poisson(*mu, rng);
                if k >= from {
                    return k;
                }
            },
        }
    }
}

/// A probability mass function on the non-negative integers.
#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    /// `upper[k] = P(X >= k)` for `k < pmf.len()`, summed from the top.
    upper: Vec<f64>,
    tail: Option<Arc<Tail>>,
    tail_mass: f64,
    mean: Mean,
    second_moment_finite: bool,
    support_upper: Option<usize>,
}

impl DegreeDistribution {
    fn assemble(
        pmf: Vec<f64>,
        tail: Option<(Tail, f64)>,
        mean: Mean,
        second_moment_finite: bool,
        support_upper: Option<usize>,
    ) -> Self {
        let (tail, tail_mass) = match tail {
            Some((t, mass)) => (Some(Arc::new(t)), mass.max(0.0)),
            None => (None, 0.0),
        };
        let mut d = DegreeDistribution {
            pmf,
            cdf: Vec::new(),
            upper: Vec::new(),
            tail,
            tail_mass,
            mean,
            second_moment_finite,
            support_upper,
        };
        d.rebuild_cumulatives();
        d
    }

    fn rebuild_cumulatives(&mut self) {
        let mut acc = 0.0;
        self.cdf = self
            .pmf
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        self.upper = vec![0.0; self.pmf.len()];
        let mut acc = self.tail_mass;
        for k in (0..self.pmf.len()).rev() {
            acc += self.pmf[k];
            self.upper[k] = acc;
        }
    }

    /// Moves `amount` of probability from the point `from` to the point `to`.
    pub(crate) fn transfer_mass(&self, from: usize, to: usize, amount: f64) -> Result<Self> {
        if !(amount >= 0.0 && amount <= self.pmf_at(from)) {
            return Err(Error::InvalidParameter(format!(
                "cannot move {amount} from point {from} holding {}",
                self.pmf_at(from)
            )));
        }
        let top = from.max(to);
        if top >= self.pmf.len() && self.tail.is_some() {
            return Err(Error::InvalidParameter(format!("point {top} lies in the lazy tail")));
        }
        let mut out = self.clone();
        if top >= out.pmf.len() {
            out.pmf.resize(top + 1, 0.0);
        }
        out.pmf[from] -= amount;
        out.pmf[to] += amount;
        if let Mean::Finite(m) = out.mean {
            out.mean = Mean::Finite(m - amount * (from as f64 - to as f64));
        }
        out.support_upper = out.support_upper.map(|s| s.max(to));
        out.rebuild_cumulatives();
        Ok(out)
    }

    fn finite(pmf: Vec<f64>, support_upper: Option<usize>) -> Self {
        let mean = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        Self::assemble(pmf, None, Mean::Finite(mean), true, support_upper)
    }

    /// Builds a finite-support law from explicit probabilities `p_0, p_1, ...`.
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidParameter("empty pmf".into()));
        }
        if let Some(p) = pmf.iter().find(|p| !(p.is_finite() && (0.0..=1.0).contains(*p))) {
            return Err(Error::InvalidParameter(format!("pmf value {p} outside [0, 1]")));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("pmf sums to {total}, not 1")));
        }
        Ok(Self::finite(pmf, None))
    }

    pub fn point_mass(k: usize) -> Self {
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        Self::finite(pmf, None)
    }

    pub fn poisson(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Poisson mean {mu} must be finite and >= 0"
            )));
        }
        Ok(Self::finite(poisson_pmf_vec(mu)?, None))
    }

    /// `p_k = p (1-p)^k` for `k >= 0` (failures before the first success).
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("geometric p = {p} must lie in (0, 1]")));
        }
        let q = 1.0 - p;
        let pmf = materialize(|k| p * q.powi(k as i32), 0, MAX_SUPPORT)
            .ok_or_else(|| Error::InvalidParameter(format!("geometric p = {p} is too small to materialize")))?;
        Ok(Self::finite(pmf, None))
    }

    /// `p_k = k^-tau / Z` for `k >= k_min`.
    pub fn power_law(tau: f64, k_min: usize) -> Result<Self> {
        if !(tau.is_finite() && tau > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power-law exponent tau = {tau} must exceed 1 to be normalizable"
            )));
        }
        if k_min == 0 {
            return Err(Error::InvalidParameter("power-law k_min must be positive".into()));
        }
        let norm = power_sum_from(tau, k_min);
        let head = POWER_HEAD.max(k_min + 1);
        let pmf: Vec<f64> = (0..head)
            .map(|k| if k >= k_min { (k as f64).powf(-tau) / norm } else { 0.0 })
            .collect();
        let tail_mass = power_sum_from(tau, head) / norm;
        let mean = if tau > 2.0 {
            Mean::Finite(power_sum_from(tau - 1.0, k_min) / norm)
        } else {
            Mean::Infinite
        };
        Ok(Self::assemble(
            pmf,
            Some((Tail::Power { tau, norm }, tail_mass)),
            mean,
            tau > 3.0,
            None,
        ))
    }

    pub fn pmf_at(&self, k: usize) -> f64 {
        if k < self.pmf.len() {
            self.pmf[k]
        } else {
            self.tail.as_ref().map_or(0.0, |t| t.pmf(k))
        }
    }

    /// `P(X <= k)`.
    pub fn cdf_at(&self, k: usize) -> f64 {
        if k < self.cdf.len() {
            self.cdf[k]
        } else {
            1.0 - self.ccdf_at(k + 1)
        }
    }

    /// `P(X >= k)`.
    pub fn ccdf_at(&self, k: usize) -> f64 {
        if k < self.upper.len() {
            return self.upper[k];
        }
        match self.tail.as_deref() {
            None => 0.0,
            Some(Tail::Power { tau, norm }) => power_sum_from(*tau, k) / norm,
            Some(t) => {
                let partial: f64 = (self.pmf.len()..k).map(|j| t.pmf(j)).sum();
                (self.tail_mass - partial).max(0.0)
            }
        }
    }

    pub fn mean(&self) -> Mean {
        self.mean
    }

    pub fn second_moment_finite(&self) -> bool {
        self.second_moment_finite
    }

    pub fn support_upper(&self) -> Option<usize> {
        self.support_upper
    }

    /// Length of the materialized head; `pmf_at` is lazy beyond it.
    pub fn materialized_len(&self) -> usize {
        self.pmf.len()
    }

    /// Mass beyond the materialized head held by the lazy tail.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn has_lazy_tail(&self) -> bool {
        self.tail.is_some()
    }

    /// Sum of the stored head probabilities plus the lazy tail mass.
    pub fn total_mass(&self) -> f64 {
        self.cdf.last().copied().unwrap_or(0.0) + self.tail_mass
    }

    /// The materialized head `p_0..p_{K-1}`.
    pub fn head(&self) -> &[f64] {
        &self.pmf
    }

    /// Draws by inversion on the materialized CDF, falling through to the
    /// tail sampler when the uniform lands beyond the head.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u);
        if k < self.pmf.len() {
            return k;
        }
        match &self.tail {
            Some(t) => t.sample(self.pmf.len(), rng),
            None => self.pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0),
        }
    }

    /// Conditions on `X <= cutoff`: `p'_j = p_j / P(X <= cutoff)`.
    pub fn conditional_truncate(&self, cutoff: usize) -> Result<Self> {
        let mass = self.cdf_at(cutoff);
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("no mass at or below cutoff {cutoff}")));
        }
        let len = if self.tail.is_some() {
            cutoff + 1
        } else {
            (cutoff + 1).min(self.pmf.len())
        };
        let pmf = (0..len).map(|j| self.pmf_at(j) / mass).collect();
        Ok(Self::finite(pmf, Some(cutoff)))
    }

    /// Support on `{0, .., n-1}` with all mass at `k >= n-1` lumped onto `n-1`.
    pub fn cap_truncate(&self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("cap_truncate needs n >= 2, got {n}")));
        }
        let cap = n - 1;
        let len = if self.tail.is_some() {
            cap
        } else {
            cap.min(self.pmf.len())
        };
        let mut pmf: Vec<f64> = (0..len).map(|k| self.pmf_at(k)).collect();
        let lump = self.ccdf_at(cap);
        if lump > 0.0 {
            pmf.resize(cap + 1, 0.0);
            pmf[cap] = lump;
        }
        Ok(Self::finite(pmf, Some(cap)))
    }

    /// The law of `X + Y` with `Y ~ Po(mu)` independent.
    pub fn convolve_poisson(&self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Poisson mean {mu} must be finite and >= 0"
            )));
        }
        let Mean::Finite(base_mean) = self.mean else {
            return Err(Error::InvalidParameter(
                "convolve_poisson needs a finite-mean law".into(),
            ));
        };
        if mu == 0.0 {
            return Ok(self.clone());
        }
        let kernel = poisson_pmf_vec(mu)?;
        let len = self.pmf.len() + kernel.len() - 1;
        let pmf: Vec<f64> = (0..len)
            .map(|k| {
                let lo = k.saturating_sub(kernel.len() - 1);
                (lo..=k).map(|j| self.pmf_at(j) * kernel[k - j]).sum()
            })
            .collect();
        let mean = Mean::Finite(base_mean + mu);
        if self.tail.is_none() {
            return Ok(Self::assemble(pmf, None, mean, self.second_moment_finite, None));
        }
        let tail_mass = kernel.iter().enumerate().map(|(j, &q)| q * self.ccdf_at(len - j)).sum();
        let tail = Tail::Convolved {
            base: self.clone(),
            mu,
            kernel,
        };
        Ok(Self::assemble(
            pmf,
            Some((tail, tail_mass)),
            mean,
            self.second_moment_finite,
            None,
        ))
    }

    /// Mixed Poisson law with parameter `scale * X`, `X ~ mix`.
    pub fn mixed_poisson(mix: &MixingLaw, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale {scale} must be finite and >= 0"
            )));
        }
        Self::mixed_poisson_mapped(mix, ParamMap::Scale(scale))
    }

    /// Mixed Poisson law with parameter `map(X)`, `X ~ mix`.
    pub fn mixed_poisson_mapped(mix: &MixingLaw, map: ParamMap) -> Result<Self> {
        let rule = mix.quadrature();
        let lambdas: Vec<f64> = rule.nodes.iter().map(|&x| map.apply(x)).collect();
        let mut pmf = Vec::new();
        let mut chunk = 64;
        let mut complete = false;
        while pmf.len() < MIXED_HEAD {
            let from = pmf.len();
            let to = (from + chunk).min(MIXED_HEAD);
            pmf.extend(mixed_pmf_range(&lambdas, &rule.weights, from, to));
            chunk *= 2;
            let mass: f64 = pmf.iter().sum();
            if mass >= 1.0 - MATERIALIZE_EPS {
                complete = true;
                break;
            }
        }
        if complete {
            // trim the negligible suffix
            while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
                pmf.pop();
            }
        }
        let mean = match map.moment(mix, 1.0) {
            Some(m) => Mean::Finite(m),
            None => Mean::Infinite,
        };
        let second = map.moment(mix, 2.0).is_some();
        let tail = (!complete).then(|| {
            let mass = 1.0 - pmf.iter().sum::<f64>();
            (
                Tail::Mixed {
                    map,
                    law: mix.clone(),
                    rule,
                },
                mass,
            )
        });
        Ok(Self::assemble(pmf, tail, mean, second, None))
    }

    /// Law of a sum of `Po(lambda)` i.i.d. copies of `summand`, evaluated by
    /// the Poisson-case Panjer recursion.
    pub fn compound_poisson(lambda: f64, summand: &DegreeDistribution) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "compound Poisson rate {lambda} must be positive"
            )));
        }
        let Mean::Finite(summand_mean) = summand.mean else {
            return Err(Error::InvalidParameter(
                "compound Poisson summand needs a finite mean".into(),
            ));
        };
        let p0 = (lambda * (summand.pmf_at(0) - 1.0)).exp();
        if p0 == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "compound Poisson rate {lambda} underflows the recursion"
            )));
        }
        let mean = lambda * summand_mean;
        // j * r_j, extended lazily when the summand has a tail
        let reach = if summand.tail.is_some() {
            usize::MAX
        } else {
            summand.pmf.len() - 1
        };
        let mut weighted: Vec<f64> = vec![0.0];
        let mut pmf = vec![p0];
        let mut mass = p0;
        let mut k = 0;
        while mass < 1.0 - MATERIALIZE_EPS {
            k += 1;
            if k >= MAX_SUPPORT {
                return Err(Error::InvalidParameter(
                    "compound Poisson law does not concentrate within the support cap".into(),
                ));
            }
            if k <= reach {
                weighted.push(k as f64 * summand.pmf_at(k));
            }
            let top = k.min(reach);
            let s: f64 = (1..=top).map(|j| weighted[j] * pmf[k - j]).sum();
            let pk = lambda / k as f64 * s;
            pmf.push(pk);
            mass += pk;
            if k as f64 > 10.0 * (mean + 1.0) + 100.0 && pk < 1e-20 {
                break;
            }
        }
        Ok(Self::assemble(
            pmf,
            None,
            Mean::Finite(mean),
            summand.second_moment_finite,
            None,
        ))
    }
}

/// `ln P(Po(lambda) = k)`, given `ln k!`.
fn poisson_pmf_log(lambda: f64, k: usize, ln_fact: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -lambda + k as f64 * lambda.ln() - ln_fact
}

fn poisson_pmf_vec(mu: f64) -> Result<Vec<f64>> {
    if mu == 0.0 {
        return Ok(vec![1.0]);
    }
    let ln_mu = mu.ln();
    materialize(
        |k| (-mu + k as f64 * ln_mu - ln_gamma(k as f64 + 1.0)).exp(),
        mu.floor() as usize,
        MAX_SUPPORT,
    )
    .ok_or_else(|| Error::InvalidParameter(format!("Poisson mean {mu} is too large to materialize")))
}

/// Pushes `f(0), f(1), ..` until the running sum reaches `1 - MATERIALIZE_EPS`,
/// or the terms past `mode` fall below `1e-20`. `None` if `cap` is hit first.
fn materialize(f: impl Fn(usize) -> f64, mode: usize, cap: usize) -> Option<Vec<f64>> {
    let mut pmf = Vec::new();
    let mut mass = 0.0;
    for k in 0..cap {
        let p = f(k);
        pmf.push(p);
        mass += p;
        if mass >= 1.0 - MATERIALIZE_EPS || (k > mode && p < 1e-20) {
            return Some(pmf);
        }
    }
    None
}

/// Mixed Poisson probabilities for `k in from..to`, summing each node's
/// Poisson pmf only over the window where it does not underflow.
fn mixed_pmf_range(lambdas: &[f64], weights: &[f64], from: usize, to: usize) -> Vec<f64> {
    const FLOOR: f64 = -745.0;
    let mut out = vec![0.0; to - from];
    for (&lambda, &w) in lambdas.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        if lambda == 0.0 {
            if from == 0 {
                out[0] += w;
            }
            continue;
        }
        let ln_lambda = lambda.ln();
        let ln_w = w.ln();
        let start = (lambda.floor() as usize).clamp(from, to - 1);
        let lp_start = poisson_pmf_log(lambda, start, ln_gamma(start as f64 + 1.0)) + ln_w;
        let mut lp = lp_start;
        let mut k = start;
        while lp > FLOOR {
            out[k - from] += lp.exp();
            k += 1;
            if k >= to {
                break;
            }
            lp += ln_lambda - (k as f64).ln();
        }
        let mut lp = lp_start;
        let mut k = start;
        while k > from {
            lp += (k as f64).ln() - ln_lambda;
            k -= 1;
            if lp <= FLOOR {
                break;
            }
            out[k - from] += lp.exp();
        }
    }
    out
}

/// `sum_{j >= from} j^-tau`: direct terms below 64, Euler-Maclaurin beyond.
pub(crate) fn power_sum_from(tau: f64, from: usize) -> f64 {
    const SWITCH: usize = 64;
    let mut direct = 0.0;
    let mut start = from.max(1);
    while start < SWITCH {
        direct += (start as f64).powf(-tau);
        start += 1;
    }
    let x = start as f64;
    let f = x.powf(-tau);
    let integral = x.powf(1.0 - tau) / (tau - 1.0);
    let d1 = -tau * f / x;
    let d3 = -tau * (tau + 1.0) * (tau + 2.0) * f / (x * x * x);
    let d5 = -tau * (tau + 1.0) * (tau + 2.0) * (tau + 3.0) * (tau + 4.0) * f / x.powi(5);
    direct + integral + f / 2.0 - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0
}

/// Exact draw from `p_k ~ k^-tau` restricted to `k >= from`: floor of a
/// continuous Pareto proposal, thinned by the ratio of the two masses.
fn sample_power_tail<R: Rng + ?Sized>(tau: f64, from: usize, rng: &mut R) -> usize {
    let k0 = from.max(1) as f64;
    let bound = (1.0 + 1.0 / k0).powf(tau);
    loop {
        let u = 1.0 - rng.random::<f64>();
        let x = k0 * u.powf(-1.0 / (tau - 1.0));
        if !(x < SAMPLE_CLAMP) {
            return SAMPLE_CLAMP as usize;
        }
        let k = x.floor();
        // k^-tau / int_k^{k+1} x^-tau dx
        let ratio = (tau - 1.0) / (k * -((1.0 - tau) * (1.0 / k).ln_1p()).exp_m1());
        if rng.random::<f64>() * bound < ratio {
            return k as usize;
        }
    }
}

pub(crate) fn sample_poisson<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> usize {
    if !(mu > 0.0) {
        return 0;
    }
    match Poisson::new(mu) {
        Ok(p) => {
            let x: f64 = p.sample(rng);
            x.min(SAMPLE_CLAMP) as usize
        }
        Err(_) => SAMPLE_CLAMP as usize,
    }
}
