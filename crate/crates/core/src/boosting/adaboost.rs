//! Discrete AdaBoost over decision stumps.

use ndarray::ArrayView1;

use super::stump::{Stump, StumpSearch, WeightVector};
use crate::data::Dataset;
use crate::error::{invalid, Result};

/// Error rates are clamped to `[EPS_FLOOR, 1 - EPS_FLOOR]` before taking the
/// log-odds, so a perfect stump gets a large finite vote.
pub const EPS_FLOOR: f64 = 1e-10;

/// Vote weight `½ ln((1 - ε) / ε)` with ε clamped away from 0 and 1.
pub fn learner_weight(epsilon: f64) -> f64 {
    let e = epsilon.clamp(EPS_FLOOR, 1.0 - EPS_FLOOR);
    0.5 * ((1.0 - e) / e).ln()
}

/// Multiplicative reweighting `D'(i) = D(i) exp(-α y_i h(x_i)) / Z`.
///
/// Returns the new distribution together with the exact normalizer `Z`.
pub fn update_weights(
    weights: &WeightVector,
    alpha: f64,
    h: &Stump,
    data: &Dataset,
) -> Result<(WeightVector, f64)> {
    if weights.len() != data.len() {
        return Err(invalid("weights", "length differs from the dataset"));
    }
    let col = data.features().column(h.feature);
    let raw: Vec<f64> = weights
        .as_slice()
        .iter()
        .zip(data.labels())
        .zip(col.iter())
        .map(|((&d, &y), &v)| d * (-alpha * y * h.predict_value(v)).exp())
        .collect();
    let z: f64 = raw.iter().sum();
    let next = WeightVector::normalized(raw)?;
    Ok((next, z))
}

/// One boosting round as it happened: the distribution the stump was
/// trained on, its error, vote and the normalizer of the update.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub epsilon: f64,
    pub alpha: f64,
    pub z: f64,
    pub weights: WeightVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// All requested rounds ran.
    Completed,
    /// A stump had zero weighted error; that round is kept and training ends.
    PerfectLearner,
    /// The best stump had error 0.5, so no round could make progress.
    NoEdge,
}

#[derive(Debug, Clone)]
pub struct BoostEnsemble {
    stumps: Vec<Stump>,
    alphas: Vec<f64>,
    trace: Vec<RoundRecord>,
    final_weights: WeightVector,
    stop: StopReason,
}

impl BoostEnsemble {
    pub fn stumps(&self) -> &[Stump] {
        &self.stumps
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn trace(&self) -> &[RoundRecord] {
        &self.trace
    }

    /// Distribution after the last update, `D_{T+1}`.
    pub fn final_weights(&self) -> &WeightVector {
        &self.final_weights
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop
    }

    pub fn len(&self) -> usize {
        self.stumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stumps.is_empty()
    }

    /// `F(x) = Σ α_t h_t(x)`.
    pub fn decision_function(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.decision_function_upto(x, self.len())
    }

    /// Score using only the first `rounds` learners.
    pub fn decision_function_upto(&self, x: ArrayView1<'_, f64>, rounds: usize) -> f64 {
        self.stumps
            .iter()
            .zip(&self.alphas)
            .take(rounds)
            .map(|(h, a)| a * h.predict(x))
            .sum()
    }

    /// Class label; a zero score goes to +1.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        sign(self.decision_function(x))
    }

    /// Scores for every row of `data`.
    pub fn decision_values(&self, data: &Dataset) -> Vec<f64> {
        (0..data.len()).map(|i| self.decision_function(data.row(i))).collect()
    }

    /// Fraction of rows whose prediction matches `labels`.
    pub fn accuracy(&self, data: &Dataset, labels: &[f64]) -> f64 {
        self.accuracy_upto(data, labels, self.len())
    }

    /// Accuracy of the ensemble truncated to its first `rounds` learners.
    pub fn accuracy_upto(&self, data: &Dataset, labels: &[f64], rounds: usize) -> f64 {
        let hits = (0..data.len())
            .filter(|&i| sign(self.decision_function_upto(data.row(i), rounds)) == labels[i])
            .count();
        hits as f64 / data.len() as f64
    }

    /// Product of the per-round normalizers.
    pub fn z_product(&self) -> f64 {
        self.trace.iter().map(|r| r.z).product()
    }
}

#[inline]
pub fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Runs up to `rounds` iterations of AdaBoost with uniform initial weights.
pub fn adaboost_train(data: &Dataset, rounds: usize) -> Result<BoostEnsemble> {
    if rounds == 0 {
        return Err(invalid("rounds", "need at least one round"));
    }
    let search = StumpSearch::new(data.features());
    let mut weights = WeightVector::uniform(data.len());
    let mut ens = BoostEnsemble {
        stumps: Vec::with_capacity(rounds),
        alphas: Vec::with_capacity(rounds),
        trace: Vec::with_capacity(rounds),
        final_weights: weights.clone(),
        stop: StopReason::Completed,
    };

    for _ in 0..rounds {
        let (h, eps) = search.fit(data.features(), data.labels(), weights.as_slice());
        if eps >= 0.5 {
            ens.stop = StopReason::NoEdge;
            break;
        }
        let alpha = learner_weight(eps);
        let (next, z) = update_weights(&weights, alpha, &h, data)?;
        ens.stumps.push(h);
        ens.alphas.push(alpha);
        ens.trace.push(RoundRecord {
            epsilon: eps.clamp(EPS_FLOOR, 1.0 - EPS_FLOOR),
            alpha,
            z,
            weights,
        });
        weights = next;
        if eps == 0.0 {
            ens.stop = StopReason::PerfectLearner;
            break;
        }
    }
    ens.final_weights = weights;
    Ok(ens)
}
