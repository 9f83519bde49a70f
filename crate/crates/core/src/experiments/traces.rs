use serde::Serialize;

use super::{cell_stream, ClassificationSpec, SiteSpec, TraceSet};
use crate::acar::{run_acar, ColonyConfig};
use crate::boosting::adaboost_train;
use crate::error::Result;

/// Instance-weight percentiles per boosting round next to per-site
/// pheromone per colony wave.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePair {
    pub master_seed: u64,
    /// `[min, median, max]` of `D_t` for `t = 0..=rounds_completed`.
    pub weight_percentiles: Vec<[f64; 3]>,
    /// `τ(t)` for `t = 0..=waves`.
    pub tau: Vec<Vec<f64>>,
    pub qualities: Vec<f64>,
    pub best_site: usize,
}

fn percentiles(w: &[f64]) -> [f64; 3] {
    let mut s = w.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let median = if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    };
    [s[0], median, s[n - 1]]
}

pub fn run_trace_pair(
    boost: &ClassificationSpec,
    sites: &SiteSpec,
    colony: &ColonyConfig,
    master_seed: u64,
) -> Result<TracePair> {
    let (train, _) = boost.sample(boost.label_noise, &mut cell_stream(master_seed, 0, 0))?;
    let weight_percentiles = if boost.rounds == 0 {
        vec![[1.0 / train.len() as f64; 3]]
    } else {
        let ens = adaboost_train(&train, boost.rounds)?;
        let mut rows: Vec<[f64; 3]> = ens.trace().iter().map(|r| percentiles(r.weights.as_slice())).collect();
        rows.push(percentiles(ens.final_weights().as_slice()));
        rows
    };

    let mut rng = cell_stream(master_seed, 1, 0);
    let world = sites.sample(&mut rng)?;
    let (_, trace) = run_acar(&world, colony, &mut rng)?;
    Ok(TracePair {
        master_seed,
        weight_percentiles,
        tau: trace.tau,
        qualities: world.qualities().to_vec(),
        best_site: world.best_site(),
    })
}

impl TracePair {
    pub fn traces(&self) -> TraceSet {
        let mut t = TraceSet::new(
            format!("trace_pair_{}", self.master_seed),
            "Boosting instance-weight percentiles (D_min, D_median, D_max) per round and pheromone per site (tau_site_j, 1-based) per wave; step is the round or wave index.",
        );
        for (step, p) in self.weight_percentiles.iter().enumerate() {
            for (name, v) in ["D_min", "D_median", "D_max"].iter().zip(p) {
                t.push(step as f64, *name, *v);
            }
        }
        for (step, row) in self.tau.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t.push(step as f64, format!("tau_site_{}", j + 1), *v);
            }
        }
        t
    }
}
