use serde::{Deserialize, Serialize};

use super::{replicate_with, ParamValue, SummaryTable, TraceSet};
use crate::acar::{calibrate_weak_colony, run_acar, ColonyConfig, NoiseModel};
use crate::data::SiteWorld;
use crate::error::{invalid, Result};
use crate::isomorphism::{error_contraction_trace, ContractionReport};

/// Two-site colony whose ants are individually only `½ + γ` accurate.
///
/// The better site sits at index 1 so the lowest-index tie-break never
/// helps it. Observation noise is absolute and set by calibration for each
/// `γ`; everything else is fixed here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakColonySpec {
    pub q_best: f64,
    pub delta_q: f64,
    pub alpha_exp: f64,
    pub beta_exp: f64,
    pub evaporation: f64,
    pub deposit_rate: f64,
    pub tau0: f64,
    pub tau_min: f64,
    pub ants_per_wave: usize,
}

impl WeakColonySpec {
    pub fn world(&self) -> Result<SiteWorld> {
        if !(self.delta_q > 0.0 && self.q_best > self.delta_q) {
            return Err(invalid("delta_q", "need 0 < delta_q < q_best"));
        }
        SiteWorld::new(vec![self.q_best - self.delta_q, self.q_best])
    }

    pub fn sigma(&self, gamma: f64) -> Result<f64> {
        calibrate_weak_colony(self.delta_q, gamma)
    }

    pub fn config(&self, gamma: f64, waves: usize) -> Result<ColonyConfig> {
        let cfg = ColonyConfig {
            alpha_exp: self.alpha_exp,
            beta_exp: self.beta_exp,
            evaporation: self.evaporation,
            deposit_rate: self.deposit_rate,
            tau0: self.tau0,
            tau_min: self.tau_min,
            waves,
            ants_per_wave: self.ants_per_wave,
            noise: NoiseModel::absolute(self.sigma(gamma)?),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `1 - exp(-γ² T / 2)`.
pub fn weak_bound(gamma: f64, waves: usize) -> f64 {
    1.0 - (-gamma * gamma * waves as f64 / 2.0).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakLearnabilityResult {
    /// Cells `(gamma, waves, bound)`; values are per-replicate correctness.
    pub table: SummaryTable,
    /// Calibrated absolute noise for each gamma.
    pub sigmas: Vec<(f64, f64)>,
}

impl WeakLearnabilityResult {
    pub fn traces(&self) -> TraceSet {
        let mut t = TraceSet::new(
            format!("weak_learnability_curves_{}", self.table.master_seed),
            "Fraction of correct colony decisions against waves, one series per gamma, with the lower bound 1 - exp(-gamma^2 T / 2).",
        );
        for row in &self.table.rows {
            let [ParamValue::Num(g), ParamValue::Num(w), ParamValue::Num(b)] = row.cell[..] else {
                continue;
            };
            t.push(w, format!("accuracy_gamma_{g}"), row.mean);
            t.push(w, format!("stderr_gamma_{g}"), row.stderr);
            t.push(w, format!("bound_gamma_{g}"), b);
        }
        t
    }
}

pub fn run_weak_learnability(
    spec: &WeakColonySpec,
    gammas: &[f64],
    waves: &[usize],
    replicates: usize,
    master_seed: u64,
) -> Result<WeakLearnabilityResult> {
    if replicates == 0 {
        return Err(invalid("replicates", "need at least one replicate"));
    }
    let world = spec.world()?;
    let mut table = SummaryTable::new("weak_learnability", master_seed, &["gamma", "waves", "bound"]);
    let mut sigmas = Vec::with_capacity(gammas.len());
    for (gi, &gamma) in gammas.iter().enumerate() {
        sigmas.push((gamma, spec.sigma(gamma)?));
        for (ti, &t) in waves.iter().enumerate() {
            let cfg = spec.config(gamma, t)?;
            let cell = gi * waves.len() + ti;
            let hits = replicate_with(master_seed, cell, replicates, |rng| {
                let (d, _) = run_acar(&world, &cfg, rng)?;
                Ok(if d.correct { 1.0 } else { 0.0 })
            })?;
            table.push(vec![gamma.into(), t.into(), weak_bound(gamma, t).into()], &hits);
        }
    }
    Ok(WeakLearnabilityResult { table, sigmas })
}

/// Replicated `γ`-weak runs fed to the contraction report.
pub fn run_error_contraction(
    spec: &WeakColonySpec,
    gamma: f64,
    waves: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<ContractionReport> {
    let world = spec.world()?;
    let cfg = spec.config(gamma, waves)?;
    let traces = replicate_with(master_seed, 0, replicates, |rng| Ok(run_acar(&world, &cfg, rng)?.1))?;
    error_contraction_trace(&traces, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(weak_bound(0.3, 0), 0.0);
        assert!((weak_bound(0.3, 50) - (1.0 - (-2.25f64).exp())).abs() < 1e-15);
        assert!((weak_bound(0.3, 50) - 0.8946).abs() < 1e-4);
    }

    #[test]
    fn bound_is_increasing() {
        for g in [0.05, 0.1, 0.2, 0.3, 0.45] {
            for t in 1..100 {
                assert!(weak_bound(g, t + 1) > weak_bound(g, t));
                assert!(weak_bound(g + 0.01, t) > weak_bound(g, t));
            }
        }
    }
}
