//! Boosting and pheromone-recruitment simulation.
//!
//! * [`boosting`]: AdaBoost with decision stumps, gradient boosting, margins.
//! * [`acar`]: the adaptive-recruitment colony (choice rule, pheromone
//!   dynamics, quorum margin, drift, weak-colony calibration).
//! * [`isomorphism`]: maps boosting weights onto pheromone fields and checks
//!   the two update rules against each other.
//! * [`experiments`]: seeded Monte Carlo studies and summary statistics.
//! * [`report`]: CSV/JSON emission.

pub mod acar;
pub mod boosting;
pub mod data;
pub mod error;
pub mod experiments;
pub mod isomorphism;
pub mod report;
pub mod rng;
pub mod special;

pub use data::{make_classification, make_site_world, Dataset, SiteWorld};
pub use error::{Error, Result};
pub use rng::{derive_stream, RngStream};
