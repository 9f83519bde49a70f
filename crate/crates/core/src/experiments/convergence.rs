use serde::Serialize;

use super::{replicate_with, spearman, ClassificationSpec, SiteSpec, SummaryTable, TraceSet};
use crate::acar::{run_acar, ColonyConfig, PheromoneState};
use crate::boosting::adaboost_train;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceResult {
    /// Cells `(system, steps)`.
    pub table: SummaryTable,
    pub spearman_adaboost: f64,
    pub spearman_acar: f64,
}

/// Test accuracy against rounds and probability of a correct colony
/// decision against waves.
///
/// Each boosting replicate draws fresh data and trains once to the largest
/// horizon; smaller horizons are scored on the truncated ensemble. Each
/// colony replicate runs once to the largest horizon and reads its decision
/// off the pheromone at every smaller horizon.
pub fn run_convergence(
    boost: &ClassificationSpec,
    rounds: &[usize],
    sites: &SiteSpec,
    colony: &ColonyConfig,
    waves: &[usize],
    replicates_boost: usize,
    replicates_acar: usize,
    master_seed: u64,
) -> Result<ConvergenceResult> {
    let (Some(&max_rounds), Some(&max_waves)) = (rounds.iter().max(), waves.iter().max()) else {
        return Err(invalid("grid", "round and wave grids must be nonempty"));
    };
    if replicates_boost == 0 || replicates_acar == 0 {
        return Err(invalid("replicates", "need at least one replicate"));
    }
    if waves.contains(&0) {
        return Err(invalid("waves", "horizons must be at least one wave"));
    }

    let boost_acc = replicate_with(master_seed, 0, replicates_boost, |rng| {
        let (train, test) = boost.sample(boost.label_noise, rng)?;
        let ens = adaboost_train(&train, max_rounds)?;
        Ok(rounds
            .iter()
            .map(|&t| ens.accuracy_upto(&test, test.clean_labels(), t))
            .collect::<Vec<f64>>())
    })?;

    let cfg = ColonyConfig {
        waves: max_waves,
        ..*colony
    };
    let acar_hits = replicate_with(master_seed, 1, replicates_acar, |rng| {
        let world = sites.sample(rng)?;
        let (_, trace) = run_acar(&world, &cfg, rng)?;
        waves
            .iter()
            .map(|&w| {
                let tau = PheromoneState::new(trace.tau[w].clone())?;
                Ok(if tau.argmax() == world.best_site() { 1.0 } else { 0.0 })
            })
            .collect::<Result<Vec<f64>>>()
    })?;

    let mut table = SummaryTable::new("convergence", master_seed, &["system", "steps"]);
    for (i, &t) in rounds.iter().enumerate() {
        let col: Vec<f64> = boost_acc.iter().map(|r| r[i]).collect();
        table.push(vec!["adaboost".into(), t.into()], &col);
    }
    for (i, &w) in waves.iter().enumerate() {
        let col: Vec<f64> = acar_hits.iter().map(|r| r[i]).collect();
        table.push(vec!["acar".into(), w.into()], &col);
    }
    let means = |skip: usize, len: usize| table.rows[skip..skip + len].iter().map(|r| r.mean).collect::<Vec<_>>();
    let steps = |g: &[usize]| g.iter().map(|&v| v as f64).collect::<Vec<_>>();
    let spearman_adaboost = spearman(&steps(rounds), &means(0, rounds.len()));
    let spearman_acar = spearman(&steps(waves), &means(rounds.len(), waves.len()));
    Ok(ConvergenceResult {
        table,
        spearman_adaboost,
        spearman_acar,
    })
}

impl ConvergenceResult {
    pub fn traces(&self) -> TraceSet {
        let mut t = TraceSet::new(
            format!("convergence_curves_{}", self.table.master_seed),
            "Mean accuracy and its standard error against iterations (adaboost_*) or waves (acar_*).",
        );
        for row in &self.table.rows {
            let (super::ParamValue::Text(sys), super::ParamValue::Num(step)) = (&row.cell[0], &row.cell[1]) else {
                continue;
            };
            t.push(*step, format!("{sys}_mean"), row.mean);
            t.push(*step, format!("{sys}_stderr"), row.stderr);
        }
        t
    }
}
