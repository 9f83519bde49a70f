//! Fixed inputs shared by the benchmarks.

use boostcolony::acar::{ColonyConfig, NoiseModel};
use boostcolony::{derive_stream, make_classification, make_site_world, Dataset, SiteWorld};

pub const SEED: u64 = 7;

pub fn dataset(n: usize, d: usize) -> Dataset {
    make_classification(n, d, 1.0, 0.1, &mut derive_stream(SEED, 0)).expect("valid dataset")
}

pub fn world(k: usize) -> SiteWorld {
    make_site_world(k, 0.25, &mut derive_stream(SEED, 1)).expect("valid world")
}

pub fn colony(waves: usize, ants: usize) -> ColonyConfig {
    ColonyConfig {
        alpha_exp: 2.0,
        beta_exp: 0.0,
        evaporation: 0.1,
        deposit_rate: 0.05,
        tau0: 1.0,
        tau_min: 1e-6,
        waves,
        ants_per_wave: ants,
        noise: NoiseModel::proportional(0.2),
    }
}
