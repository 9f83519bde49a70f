use serde::Serialize;

use super::{cell_stream, mean_sd, replicate_with, ClassificationSpec, SiteSpec, SummaryTable, TraceSet};
use crate::acar::{run_acar, ColonyConfig};
use crate::boosting::{adaboost_train, margins, Histogram, MARGIN_BINS};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostMarginSummary {
    pub rounds: usize,
    pub min_margin: f64,
    pub mean_margin: f64,
    pub fraction_nonpositive: f64,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuorumSummary {
    pub waves: usize,
    pub mean_margin: f64,
    pub stderr: f64,
    pub fraction_correct: f64,
    /// Over `[0, 1]`.
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginResult {
    pub table: SummaryTable,
    pub boosting: Vec<BoostMarginSummary>,
    pub colony: Vec<QuorumSummary>,
}

/// Boosting margins on one training set for each horizon in `rounds`, and
/// quorum margins over `replicates` colony runs for each horizon in `waves`.
pub fn run_margin_distributions(
    boost: &ClassificationSpec,
    rounds: &[usize],
    sites: &SiteSpec,
    colony: &ColonyConfig,
    waves: &[usize],
    replicates: usize,
    master_seed: u64,
) -> Result<MarginResult> {
    if replicates == 0 {
        return Err(invalid("replicates", "need at least one replicate"));
    }
    let mut table = SummaryTable::new("margin_dist", master_seed, &["system", "horizon"]);
    let (train, _) = boost.sample(boost.label_noise, &mut cell_stream(master_seed, 0, 0))?;
    let mut boosting = Vec::with_capacity(rounds.len());
    for &t in rounds {
        let ens = adaboost_train(&train, t)?;
        let m = margins(&ens, &train)?;
        table.push(vec!["adaboost".into(), t.into()], &m.margins);
        boosting.push(BoostMarginSummary {
            rounds: t,
            min_margin: m.min_margin,
            mean_margin: mean_sd(&m.margins).0,
            fraction_nonpositive: m.fraction_nonpositive(),
            histogram: m.histogram,
        });
    }

    let mut out = Vec::with_capacity(waves.len());
    for (i, &w) in waves.iter().enumerate() {
        let cfg = ColonyConfig { waves: w, ..*colony };
        let runs = replicate_with(master_seed, 1 + i, replicates, |rng| {
            let world = sites.sample(rng)?;
            Ok(run_acar(&world, &cfg, rng)?.0)
        })?;
        let mu: Vec<f64> = runs.iter().map(|d| d.margin).collect();
        table.push(vec!["acar".into(), w.into()], &mu);
        let row = table.rows.last().expect("just pushed");
        out.push(QuorumSummary {
            waves: w,
            mean_margin: row.mean,
            stderr: row.stderr,
            fraction_correct: runs.iter().filter(|d| d.correct).count() as f64 / replicates as f64,
            histogram: Histogram::build(&mu, 0.0, 1.0, MARGIN_BINS),
        });
    }
    Ok(MarginResult {
        table,
        boosting,
        colony: out,
    })
}

impl MarginResult {
    pub fn traces(&self) -> TraceSet {
        let mut t = TraceSet::new(
            format!("margin_histograms_{}", self.table.master_seed),
            "Margin histograms as fractions per bin; step is the bin center. Series boost_T<rounds> cover normalized boosting margins on [-1, 1], quorum_W<waves> cover colony quorum margins on [0, 1].",
        );
        let mut add = |name: String, h: &Histogram| {
            let total = h.total().max(1) as f64;
            for (b, &c) in h.counts.iter().enumerate() {
                t.push(h.bin_center(b), name.clone(), c as f64 / total);
            }
        };
        for b in &self.boosting {
            add(format!("boost_T{}", b.rounds), &b.histogram);
        }
        for c in &self.colony {
            add(format!("quorum_W{}", c.waves), &c.histogram);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acar::NoiseModel;
    use crate::data::SiteWorld;

    fn colony() -> ColonyConfig {
        ColonyConfig {
            alpha_exp: 2.0,
            beta_exp: 0.0,
            evaporation: 0.1,
            deposit_rate: 0.05,
            tau0: 1.0,
            tau_min: 1e-6,
            waves: 30,
            ants_per_wave: 20,
            noise: NoiseModel::proportional(0.1),
        }
    }

    #[test]
    fn separable_task_has_positive_margins() {
        let boost = ClassificationSpec {
            n_train: 60,
            n_test: 10,
            dim: 2,
            separation: 12.0,
            label_noise: 0.0,
            rounds: 50,
        };
        let sites = SiteSpec {
            sites: 3,
            quality_gap: 0.25,
            q_max: 10.0,
        };
        let r = run_margin_distributions(&boost, &[50], &sites, &colony(), &[5], 20, 1).unwrap();
        assert!(r.boosting[0].min_margin > 0.0);
        assert_eq!(r.boosting[0].fraction_nonpositive, 0.0);
        assert_eq!(r.table.rows.len(), 2);
        assert_eq!(r.table.rows[1].n, 20);
    }

    #[test]
    fn tied_world_has_small_margins() {
        // Exactly tied qualities are outside SiteWorld; use a negligible gap.
        let world = SiteWorld::new(vec![10.0, 10.0 * (1.0 - 1e-12)]).unwrap();
        // Sublinear feedback keeps the even split stable.
        let cfg = ColonyConfig {
            alpha_exp: 0.5,
            ants_per_wave: 50,
            noise: NoiseModel::NONE,
            ..colony()
        };
        let mu = replicate_with(4, 0, 200, |rng| Ok(run_acar(&world, &cfg, rng)?.0.margin)).unwrap();
        let (m, _) = mean_sd(&mu);
        // Sampling noise in the visit counts is all that separates the sites.
        assert!(m < 0.1, "{m}");
    }
}
