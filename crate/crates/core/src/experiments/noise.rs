use serde::Serialize;

use super::{replicate_with, tost_equivalence, with_noise, ClassificationSpec, SiteSpec, SummaryTable, TostResult};
use crate::acar::{run_acar, ColonyConfig, NoiseModel};
use crate::boosting::adaboost_train;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TostRow {
    pub noise: f64,
    pub result: Option<TostResult>,
    /// Why no test was run, if it was not.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseResult {
    /// Cells `(system, noise)`, AdaBoost rows first.
    pub table: SummaryTable,
    pub tost: Vec<TostRow>,
}

impl NoiseResult {
    pub fn levels(&self) -> Vec<f64> {
        self.tost.iter().map(|t| t.noise).collect()
    }

    /// `[noise, adaboost mean, adaboost sd, acar mean, acar sd]` per level.
    pub fn wide_rows(&self) -> Vec<[f64; 5]> {
        let l = self.tost.len();
        (0..l)
            .map(|i| {
                let (a, c) = (&self.table.rows[i], &self.table.rows[l + i]);
                [self.tost[i].noise, a.mean, a.sd, c.mean, c.sd]
            })
            .collect()
    }
}

/// AdaBoost test accuracy under training-label noise and colony accuracy
/// under proportional observation noise, per level. The two systems'
/// degradation relative to the zero-noise level of the same replicate index
/// is compared by TOST at margin `delta`.
pub fn run_noise_robustness(
    boost: &ClassificationSpec,
    sites: &SiteSpec,
    colony: &ColonyConfig,
    levels: &[f64],
    replicates: usize,
    delta: f64,
    master_seed: u64,
) -> Result<NoiseResult> {
    if replicates == 0 {
        return Err(invalid("replicates", "need at least one replicate"));
    }
    if levels.iter().any(|&l| !(0.0..0.5).contains(&l)) {
        return Err(invalid("noise_levels", "levels must lie in [0, 0.5)"));
    }
    let mut boost_acc = Vec::with_capacity(levels.len());
    let mut acar_acc = Vec::with_capacity(levels.len());
    for (i, &level) in levels.iter().enumerate() {
        boost_acc.push(replicate_with(master_seed, i, replicates, |rng| {
            let (train, test) = boost.sample(level, rng)?;
            let ens = adaboost_train(&train, boost.rounds)?;
            Ok(ens.accuracy(&test, test.clean_labels()))
        })?);
        let cfg = with_noise(colony, NoiseModel::proportional(level));
        acar_acc.push(replicate_with(master_seed, levels.len() + i, replicates, |rng| {
            let world = sites.sample(rng)?;
            Ok(if run_acar(&world, &cfg, rng)?.0.correct { 1.0 } else { 0.0 })
        })?);
    }

    let mut table = SummaryTable::new("noise_robustness", master_seed, &["system", "noise"]);
    for (&level, acc) in levels.iter().zip(&boost_acc) {
        table.push(vec!["adaboost".into(), level.into()], acc);
    }
    for (&level, acc) in levels.iter().zip(&acar_acc) {
        table.push(vec!["acar".into(), level.into()], acc);
    }

    let base = levels.iter().position(|&l| l == 0.0);
    let tost = levels
        .iter()
        .enumerate()
        .map(|(i, &level)| {
            let Some(b) = base.filter(|&b| b != i) else {
                let note = if base.is_some() { "reference level" } else { "no zero-noise level in the grid" };
                return TostRow { noise: level, result: None, note: Some(note.into()) };
            };
            let drop = |acc: &[Vec<f64>]| acc[i].iter().zip(&acc[b]).map(|(x, y)| x - y).collect::<Vec<f64>>();
            match tost_equivalence(&drop(&boost_acc), &drop(&acar_acc), delta) {
                Ok(r) => TostRow { noise: level, result: Some(r), note: None },
                Err(e) => TostRow { noise: level, result: None, note: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(NoiseResult { table, tost })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_reference_row() {
        let boost = ClassificationSpec {
            n_train: 60,
            n_test: 60,
            dim: 4,
            separation: 1.0,
            label_noise: 0.0,
            rounds: 10,
        };
        let sites = SiteSpec {
            sites: 4,
            quality_gap: 0.25,
            q_max: 10.0,
        };
        let colony = ColonyConfig {
            alpha_exp: 2.0,
            beta_exp: 0.0,
            evaporation: 0.1,
            deposit_rate: 0.05,
            tau0: 1.0,
            tau_min: 1e-6,
            waves: 10,
            ants_per_wave: 10,
            noise: NoiseModel::NONE,
        };
        let r = run_noise_robustness(&boost, &sites, &colony, &[0.0, 0.2, 0.4], 12, 0.05, 2).unwrap();
        assert_eq!(r.table.rows.len(), 6);
        assert!(r.tost[0].result.is_none());
        assert!(r.tost[1].result.is_some() || r.tost[1].note.is_some());
        assert_eq!(r.wide_rows().len(), 3);
        assert!(run_noise_robustness(&boost, &sites, &colony, &[0.5], 2, 0.05, 2).is_err());
    }
}
