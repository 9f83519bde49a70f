//! Losses for functional-gradient boosting.

use crate::data::Dataset;
use crate::error::{invalid, Result};

/// How a weak learner's two leaves are fitted to pseudo-residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafFit {
    /// Least squares with real leaf values: each side gets its residual mean.
    Mean,
    /// Weighted least squares of `sign(r)` with weights `|r|` and leaves
    /// restricted to ±1. This is the weighted-error stump search, the
    /// classification weak learner.
    Sign,
}

/// A differentiable loss `ℓ(y, F)`.
pub trait Loss: Sync {
    fn name(&self) -> &'static str;
    fn value(&self, y: f64, f: f64) -> f64;
    /// `∂ℓ/∂F`.
    fn derivative(&self, y: f64, f: f64) -> f64;
    fn leaf_fit(&self) -> LeafFit;
}

/// `exp(-y F)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialLoss;

impl Loss for ExponentialLoss {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn value(&self, y: f64, f: f64) -> f64 {
        (-y * f).exp()
    }

    fn derivative(&self, y: f64, f: f64) -> f64 {
        -y * (-y * f).exp()
    }

    fn leaf_fit(&self) -> LeafFit {
        LeafFit::Sign
    }
}

/// `½ (y - F)²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredLoss;

impl Loss for SquaredLoss {
    fn name(&self) -> &'static str {
        "squared"
    }

    fn value(&self, y: f64, f: f64) -> f64 {
        0.5 * (y - f) * (y - f)
    }

    fn derivative(&self, y: f64, f: f64) -> f64 {
        f - y
    }

    fn leaf_fit(&self) -> LeafFit {
        LeafFit::Mean
    }
}

fn check_len(data: &Dataset, f: &[f64]) -> Result<()> {
    if f.len() != data.len() {
        return Err(invalid(
            "f_values",
            format!("expected {} scores, got {}", data.len(), f.len()),
        ));
    }
    Ok(())
}

/// Empirical exponential loss `(1/n) Σ exp(-y_i F_i)`.
pub fn exp_loss(data: &Dataset, f: &[f64]) -> Result<f64> {
    check_len(data, f)?;
    let total: f64 = data
        .labels()
        .iter()
        .zip(f)
        .map(|(&y, &fi)| (-y * fi).exp())
        .sum();
    Ok(total / data.len() as f64)
}

/// Negative gradient of the exponential loss, `y_i exp(-y_i F_i)`.
pub fn pseudo_gradients(data: &Dataset, f: &[f64]) -> Result<Vec<f64>> {
    check_len(data, f)?;
    Ok(data
        .labels()
        .iter()
        .zip(f)
        .map(|(&y, &fi)| y * (-y * fi).exp())
        .collect())
}
