use serde::{Deserialize, Serialize};

use super::cell_stream;
use crate::acar::NoiseModel;
use crate::data::{make_classification, SiteWorld};
use crate::error::Result;
use crate::isomorphism::{update_equivalence_check, EquivalenceReport, IsoCheckOptions, SiteAssignment};

/// Two-site equivalence check: instances sit at the site named by their
/// label and the positive class owns the better site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoSpec {
    pub n: usize,
    pub dim: usize,
    pub separation: f64,
    pub qualities: [f64; 2],
    pub rounds: usize,
    pub mc_samples: usize,
    pub tol: f64,
    pub noise: NoiseModel,
}

pub fn run_iso_check(spec: &IsoSpec, master_seed: u64) -> Result<EquivalenceReport> {
    let data = make_classification(spec.n, spec.dim, spec.separation, 0.0, &mut cell_stream(master_seed, 0, 0))?;
    let world = SiteWorld::new(spec.qualities.to_vec())?;
    let assignment = SiteAssignment::from_labels(&data, &world)?;
    let options = IsoCheckOptions {
        ants_per_wave: spec.n,
        noise: spec.noise,
    };
    update_equivalence_check(
        &data,
        &assignment,
        &world,
        spec.rounds,
        spec.mc_samples,
        spec.tol,
        options,
        &mut cell_stream(master_seed, 1, 0),
    )
}
