//! Pheromone-mediated adaptive recruitment.
//!
//! Ants choose sites with probability proportional to `τ^α η^β`, observe a
//! noisy quality, and deposit pheromone proportional to what they saw.
//! Between waves pheromone evaporates at rate `ρ` and is floored at
//! `tau_min`.

mod run;

pub use run::{run_acar, sample_wave, QuorumDecision, Wave, WaveTrace};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::SiteWorld;
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use crate::special::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// `q̂ = Q + σ ε`
    Absolute,
    /// `q̂ = Q (1 + σ ε)`
    Proportional,
}

/// Observation noise; draws are clamped below at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub sigma: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        kind: NoiseKind::Absolute,
        sigma: 0.0,
    };

    pub fn absolute(sigma: f64) -> Self {
        Self {
            kind: NoiseKind::Absolute,
            sigma,
        }
    }

    pub fn proportional(sigma: f64) -> Self {
        Self {
            kind: NoiseKind::Proportional,
            sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColonyConfig {
    /// Pheromone exponent α.
    pub alpha_exp: f64,
    /// Heuristic exponent β.
    pub beta_exp: f64,
    /// Evaporation rate ρ.
    pub evaporation: f64,
    /// Deposit per unit observed quality.
    pub deposit_rate: f64,
    pub tau0: f64,
    pub tau_min: f64,
    pub waves: usize,
    pub ants_per_wave: usize,
    pub noise: NoiseModel,
}

impl ColonyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_exp > 0.0 && self.alpha_exp.is_finite()) {
            return Err(invalid("alpha_exp", "must be positive"));
        }
        if !(self.beta_exp >= 0.0 && self.beta_exp.is_finite()) {
            return Err(invalid("beta_exp", "must be nonnegative"));
        }
        if !(self.evaporation > 0.0 && self.evaporation <= 1.0) {
            return Err(invalid("evaporation", format!("{} is outside (0, 1]", self.evaporation)));
        }
        if !(self.deposit_rate >= 0.0 && self.deposit_rate.is_finite()) {
            return Err(invalid("deposit_rate", "must be nonnegative"));
        }
        if !(self.tau_min >= 0.0 && self.tau0 > self.tau_min && self.tau0.is_finite()) {
            return Err(invalid("tau0", "need tau0 > tau_min >= 0"));
        }
        if self.waves == 0 {
            return Err(invalid("waves", "need at least one wave"));
        }
        if self.ants_per_wave == 0 {
            return Err(invalid("ants_per_wave", "need at least one ant"));
        }
        if !(self.noise.sigma >= 0.0 && self.noise.sigma.is_finite()) {
            return Err(invalid("noise.sigma", "must be nonnegative"));
        }
        Ok(())
    }
}

/// Pheromone levels, one per site.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneState(Vec<f64>);

impl PheromoneState {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        if tau.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(invalid("tau", "pheromone must be finite and nonnegative"));
        }
        Ok(Self(tau))
    }

    pub fn uniform(k: usize, tau0: f64) -> Self {
        Self(vec![tau0; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest level; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &t) in self.0.iter().enumerate().skip(1) {
            if t > self.0[best] {
                best = j;
            }
        }
        best
    }
}

/// Choice rule `p_j = τ_j^α η_j^β / Σ_k τ_k^α η_k^β`.
///
/// Levels are divided by their maximum before exponentiation, which keeps
/// large exponents finite and makes the result invariant to rescaling `τ`.
pub fn choice_probabilities(
    tau: &PheromoneState,
    world: &SiteWorld,
    alpha_exp: f64,
    beta_exp: f64,
) -> Result<Vec<f64>> {
    choice_from_slices(tau.as_slice(), world.heuristics(), alpha_exp, beta_exp)
}

pub(crate) fn choice_from_slices(
    tau: &[f64],
    heuristics: &[f64],
    alpha_exp: f64,
    beta_exp: f64,
) -> Result<Vec<f64>> {
    if tau.len() != heuristics.len() {
        return Err(invalid("tau", "length differs from the number of sites"));
    }
    let tau_max = tau.iter().copied().fold(0.0, f64::max);
    let eta_max = heuristics.iter().copied().fold(0.0, f64::max);
    let scaled = |v: f64, max: f64, e: f64| {
        if e == 0.0 {
            1.0
        } else if max > 0.0 {
            (v / max).powf(e)
        } else {
            0.0
        }
    };
    let weights: Vec<f64> = tau
        .iter()
        .zip(heuristics)
        .map(|(&t, &h)| scaled(t, tau_max, alpha_exp) * scaled(h, eta_max, beta_exp))
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateChoice);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// One noisy look at a site of true quality `q`, clamped below at 0.
pub fn observe_quality(q: f64, noise: NoiseModel, rng: &mut RngStream) -> f64 {
    if noise.sigma == 0.0 {
        return q;
    }
    let z: f64 = StandardNormal.sample(rng);
    let v = match noise.kind {
        NoiseKind::Absolute => q + noise.sigma * z,
        NoiseKind::Proportional => q * (1.0 + noise.sigma * z),
    };
    v.max(0.0)
}

/// Evaporate then deposit: `τ'_j = max(tau_min, (1 - ρ) τ_j + deposit_j)`.
pub fn pheromone_step(
    tau: &PheromoneState,
    deposits: &[f64],
    rho: f64,
    tau_min: f64,
) -> Result<PheromoneState> {
    if deposits.len() != tau.len() {
        return Err(invalid("deposits", "length differs from the pheromone vector"));
    }
    if deposits.iter().any(|d| !(*d >= 0.0)) {
        return Err(invalid("deposits", "deposits must be nonnegative"));
    }
    Ok(PheromoneState(
        tau.0
            .iter()
            .zip(deposits)
            .map(|(&t, &d)| ((1.0 - rho) * t + d).max(tau_min))
            .collect(),
    ))
}

/// `(τ_max - τ_second) / Σ τ`.
pub fn quorum_margin(tau: &PheromoneState) -> Result<f64> {
    if tau.len() < 2 {
        return Err(invalid("tau", "need at least two sites"));
    }
    let total: f64 = tau.0.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroPheromone);
    }
    let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &t in &tau.0 {
        if t > first {
            second = first;
            first = t;
        } else if t > second {
            second = t;
        }
    }
    Ok((first - second) / total)
}

/// Mean one-wave change `-ρ τ_j + N p_j γ Q_j`.
pub fn expected_drift(
    tau: &PheromoneState,
    world: &SiteWorld,
    config: &ColonyConfig,
) -> Result<Vec<f64>> {
    let p = choice_probabilities(tau, world, config.alpha_exp, config.beta_exp)?;
    let n = config.ants_per_wave as f64;
    Ok(tau
        .0
        .iter()
        .zip(&p)
        .zip(world.qualities())
        .map(|((&t, &pj), &q)| -config.evaporation * t + n * pj * config.deposit_rate * q)
        .collect())
}

/// Absolute-noise σ at which one ant comparing single observations of two
/// sites `delta_q` apart picks the better one with probability `½ + γ`.
pub fn calibrate_weak_colony(delta_q: f64, gamma_weak: f64) -> Result<f64> {
    if !(gamma_weak > 0.0 && gamma_weak < 0.5) {
        return Err(invalid("gamma_weak", format!("{gamma_weak} is outside (0, 0.5)")));
    }
    if !(delta_q > 0.0 && delta_q.is_finite()) {
        return Err(invalid("delta_q", "must be positive"));
    }
    Ok(delta_q / (std::f64::consts::SQRT_2 * normal_quantile(0.5 + gamma_weak)))
}
