//! Monte Carlo experiment drivers.
//!
//! Every replicate of every grid cell draws from its own stream,
//! `derive_stream(master_seed, cell * 10^6 + replicate)`, so a cell can be
//! rerun alone and results do not depend on thread scheduling.

mod convergence;
mod iso;
mod margins;
mod noise;
mod stats;
mod traces;
mod weak;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acar::ColonyConfig;
use crate::data::{make_classification, make_site_world_with_max, Dataset, SiteWorld};
use crate::error::{invalid, Result};
use crate::rng::{derive_stream, RngStream};

pub use convergence::{run_convergence, ConvergenceResult};
pub use iso::{run_iso_check, IsoSpec};
pub use margins::{run_margin_distributions, BoostMarginSummary, MarginResult, QuorumSummary};
pub use noise::{run_noise_robustness, NoiseResult, TostRow};
pub use stats::{mean_sd, spearman, tost_equivalence, TostResult};
pub use traces::{run_trace_pair, TracePair};
pub use weak::{
    run_error_contraction, run_weak_learnability, weak_bound, WeakColonySpec, WeakLearnabilityResult,
};

pub const CELL_STRIDE: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    WeakLearnability,
    TracePair,
    MarginDist,
    Convergence,
    NoiseRobustness,
    IsoCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::WeakLearnability => "weak_learnability",
            Self::TracePair => "trace_pair",
            Self::MarginDist => "margin_dist",
            Self::Convergence => "convergence",
            Self::NoiseRobustness => "noise_robustness",
            Self::IsoCheck => "iso_check",
        }
    }
}

/// What every experiment run shares: its kind, replicate count and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub replicates: usize,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, replicates: usize, master_seed: u64) -> Result<Self> {
        if replicates == 0 {
            return Err(invalid("replicates", "need at least one replicate"));
        }
        Ok(Self {
            kind,
            replicates,
            master_seed,
        })
    }

    pub fn stream(&self, cell: usize, replicate: usize) -> RngStream {
        cell_stream(self.master_seed, cell, replicate)
    }

    /// Runs `f` once per replicate of `cell`, in parallel, returning results
    /// in replicate order.
    pub fn replicate<T, F>(&self, cell: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut RngStream) -> Result<T> + Sync,
    {
        replicate_with(self.master_seed, cell, self.replicates, f)
    }
}

pub fn cell_stream(master_seed: u64, cell: usize, replicate: usize) -> RngStream {
    assert!((replicate as u64) < CELL_STRIDE, "replicate index overflows the cell stride");
    derive_stream(master_seed, cell as u64 * CELL_STRIDE + replicate as u64)
}

pub(crate) fn replicate_with<T, F>(master_seed: u64, cell: usize, replicates: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map(|r| f(&mut cell_stream(master_seed, cell, r)))
        .collect()
}

/// One cell coordinate: a number or a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    Text(String),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        Self::Num(v as f64)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: Vec<ParamValue>,
    pub mean: f64,
    pub sd: f64,
    pub stderr: f64,
    pub n: usize,
}

impl SummaryRow {
    pub fn from_samples(cell: Vec<ParamValue>, samples: &[f64]) -> Self {
        let (mean, sd) = mean_sd(samples);
        Self {
            cell,
            mean,
            sd,
            stderr: sd / (samples.len() as f64).sqrt(),
            n: samples.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub experiment: String,
    pub master_seed: u64,
    pub params: Vec<String>,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn new(experiment: &str, master_seed: u64, params: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            master_seed,
            params: params.iter().map(|p| p.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cell: Vec<ParamValue>, samples: &[f64]) {
        debug_assert_eq!(cell.len(), self.params.len());
        self.rows.push(SummaryRow::from_samples(cell, samples));
    }

    /// Row whose cell coordinates equal `cell`.
    pub fn find(&self, cell: &[ParamValue]) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.cell == cell)
    }
}

/// One long-format trace file: `(step, series, value)` rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSet {
    pub name: String,
    pub description: String,
    pub rows: Vec<(f64, String, f64)>,
}

impl TraceSet {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, step: f64, series: impl Into<String>, value: f64) {
        self.rows.push((step, series.into(), value));
    }
}

/// Synthetic classification task used by the boosting experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub dim: usize,
    pub separation: f64,
    pub label_noise: f64,
    pub rounds: usize,
}

impl ClassificationSpec {
    /// Training set with `label_noise` and a clean test set.
    pub fn sample(&self, label_noise: f64, rng: &mut RngStream) -> Result<(Dataset, Dataset)> {
        let train = make_classification(self.n_train, self.dim, self.separation, label_noise, rng)?;
        let test = make_classification(self.n_test, self.dim, self.separation, 0.0, rng)?;
        Ok((train, test))
    }
}

/// Random K-site world generator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub sites: usize,
    pub quality_gap: f64,
    pub q_max: f64,
}

impl SiteSpec {
    pub fn sample(&self, rng: &mut RngStream) -> Result<SiteWorld> {
        make_site_world_with_max(self.sites, self.quality_gap, self.q_max, rng)
    }
}

pub(crate) fn with_noise(colony: &ColonyConfig, noise: crate::acar::NoiseModel) -> ColonyConfig {
    ColonyConfig { noise, ..*colony }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn cell_streams_follow_the_scheme() {
        let mut a = cell_stream(9, 3, 17);
        let mut b = derive_stream(9, 3_000_017);
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn replicate_order_is_stable() {
        let spec = ExperimentSpec::new(ExperimentKind::Convergence, 64, 5).unwrap();
        let a = spec.replicate(2, |rng| Ok(rng.next_u64())).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| spec.replicate(2, |rng| Ok(rng.next_u64())).unwrap());
        assert_eq!(a, b);
        assert_eq!(a[5], spec.stream(2, 5).next_u64());
    }

    #[test]
    fn summary_row_invariants() {
        let row = SummaryRow::from_samples(vec![1.0.into()], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(row.n, 4);
        assert!((row.mean - 2.5).abs() < 1e-15);
        assert!((row.stderr - row.sd / 2.0).abs() < 1e-12);
        assert!(ExperimentSpec::new(ExperimentKind::IsoCheck, 0, 1).is_err());
    }
}
