//! Decision stumps and the exhaustive weighted-error search.

use ndarray::{Array2, ArrayView1};

use crate::data::Dataset;
use crate::error::{invalid, Result};

/// Single-feature threshold classifier.
///
/// Predicts `polarity` when `x[feature] <= threshold`, `-polarity` otherwise.
/// Thresholds of `±inf` give the constant classifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: f64,
}

impl Stump {
    pub fn new(feature: usize, threshold: f64, polarity: f64) -> Result<Self> {
        if polarity != 1.0 && polarity != -1.0 {
            return Err(invalid("polarity", "must be -1 or +1"));
        }
        if threshold.is_nan() {
            return Err(invalid("threshold", "NaN threshold"));
        }
        Ok(Self {
            feature,
            threshold,
            polarity,
        })
    }

    #[inline]
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.predict_value(x[self.feature])
    }

    #[inline]
    pub fn predict_value(&self, v: f64) -> f64 {
        if v <= self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// Instance distribution `D(i)`: nonnegative, sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

const SUM_TOL: f64 = 1e-12;

impl WeightVector {
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Wraps an already-normalized vector, checking the invariants.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("weights", "empty weight vector"));
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(invalid("weights", "weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(invalid("weights", format!("weights sum to {total}, not 1")));
        }
        Ok(Self(weights))
    }

    /// Normalizes nonnegative masses to a distribution.
    pub fn normalized(masses: Vec<f64>) -> Result<Self> {
        let total: f64 = masses.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(invalid("weights", format!("cannot normalize total mass {total}")));
        }
        Self::new(masses.into_iter().map(|m| m / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// `sum of D(i)` over misclassified instances, summed in index order.
pub fn weighted_error(h: &Stump, data: &Dataset, weights: &WeightVector) -> f64 {
    error_on(h, data.features(), data.labels(), weights.as_slice())
}

pub(crate) fn error_on(h: &Stump, x: &Array2<f64>, labels: &[f64], weights: &[f64]) -> f64 {
    let col = x.column(h.feature);
    labels
        .iter()
        .zip(weights)
        .zip(col.iter())
        .filter(|((&y, _), &v)| h.predict_value(v) != y)
        .map(|((_, &w), _)| w)
        .sum()
}

/// Optimal weighted stump for `data` under `weights`.
///
/// Ties are broken towards the lowest feature index, then the lowest
/// threshold, then polarity +1.
pub fn train_stump(data: &Dataset, weights: &WeightVector) -> Result<(Stump, f64)> {
    if weights.len() != data.len() {
        return Err(invalid("weights", "length differs from the dataset"));
    }
    let search = StumpSearch::new(data.features());
    Ok(search.fit(data.features(), data.labels(), weights.as_slice()))
}

/// Per-column sort orders, computed once and reused across boosting rounds.
#[derive(Debug, Clone)]
pub struct StumpSearch {
    orders: Vec<Vec<usize>>,
}

// Candidates whose running-sum error is within this of the best are
// re-scored exactly before choosing.
const NEAR_TIE: f64 = 1e-12;

impl StumpSearch {
    pub fn new(x: &Array2<f64>) -> Self {
        let orders = x
            .columns()
            .into_iter()
            .map(|col| {
                let mut idx: Vec<usize> = (0..col.len()).collect();
                idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
                idx
            })
            .collect();
        Self { orders }
    }

    /// Minimizes weighted 0/1 error over every (feature, threshold, polarity)
    /// on the midpoint grid. Returns the stump and its exact error.
    pub fn fit(&self, x: &Array2<f64>, labels: &[f64], weights: &[f64]) -> (Stump, f64) {
        let (w_pos, w_neg) = class_masses(labels, weights);
        let mut best = f64::INFINITY;
        let mut near: Vec<(Stump, f64)> = Vec::new();
        let mut consider = |stump: Stump, err: f64| {
            if err < best {
                best = err;
                near.retain(|&(_, e)| e <= best + NEAR_TIE);
            }
            if err <= best + NEAR_TIE {
                near.push((stump, err));
            }
        };

        for (feature, order) in self.orders.iter().enumerate() {
            let col = x.column(feature);
            let s = |threshold, polarity| Stump {
                feature,
                threshold,
                polarity,
            };
            consider(s(f64::NEG_INFINITY, 1.0), w_pos);
            consider(s(f64::NEG_INFINITY, -1.0), w_neg);
            let (mut below_pos, mut below_neg) = (0.0, 0.0);
            for k in 0..order.len().saturating_sub(1) {
                let i = order[k];
                if labels[i] > 0.0 {
                    below_pos += weights[i];
                } else {
                    below_neg += weights[i];
                }
                let (a, b) = (col[i], col[order[k + 1]]);
                if a < b {
                    let t = midpoint(a, b);
                    consider(s(t, 1.0), below_neg + (w_pos - below_pos));
                    consider(s(t, -1.0), below_pos + (w_neg - below_neg));
                }
            }
            consider(s(f64::INFINITY, 1.0), w_neg);
            consider(s(f64::INFINITY, -1.0), w_pos);
        }

        // `near` is in enumeration order, which is the tie-break order.
        let mut chosen: Option<(Stump, f64)> = None;
        for (stump, _) in near {
            let exact = error_on(&stump, x, labels, weights);
            if chosen.is_none_or(|(_, e)| exact < e) {
                chosen = Some((stump, exact));
            }
        }
        chosen.expect("constant stumps are always candidates")
    }
}

pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    a + 0.5 * (b - a)
}

fn class_masses(labels: &[f64], weights: &[f64]) -> (f64, f64) {
    labels
        .iter()
        .zip(weights)
        .fold((0.0, 0.0), |(p, n), (&y, &w)| if y > 0.0 { (p + w, n) } else { (p, n + w) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_1d() {
        let ds = Dataset::from_1d(&[1.0, 2.0, 3.0, 4.0], &[-1.0, -1.0, 1.0, 1.0]).unwrap();
        let (h, err) = train_stump(&ds, &WeightVector::uniform(4)).unwrap();
        assert_eq!(h.threshold, 2.5);
        assert_eq!(h.polarity, -1.0);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn single_class_gives_constant() {
        let ds = Dataset::from_1d(&[1.0, 5.0, 3.0], &[1.0, 1.0, 1.0]).unwrap();
        let w = WeightVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let (h, err) = train_stump(&ds, &w).unwrap();
        assert_eq!(err, 0.0);
        for v in [-100.0, 0.0, 100.0] {
            assert_eq!(h.predict_value(v), 1.0);
        }
    }

    #[test]
    fn two_points_weighted() {
        let ds = Dataset::from_1d(&[1.0, 2.0], &[1.0, -1.0]).unwrap();
        let w = WeightVector::new(vec![0.9, 0.1]).unwrap();
        let (h, err) = train_stump(&ds, &w).unwrap();
        assert_eq!(err, 0.0);
        assert_eq!((h.threshold, h.polarity), (1.5, 1.0));
    }

    #[test]
    fn weighted_error_cases() {
        let ds = Dataset::from_1d(&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, -1.0, -1.0]).unwrap();
        let w = WeightVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let perfect = Stump::new(0, 2.5, 1.0).unwrap();
        let inverse = Stump::new(0, 2.5, -1.0).unwrap();
        assert_eq!(weighted_error(&perfect, &ds, &w), 0.0);
        assert!((weighted_error(&inverse, &ds, &w) - 1.0).abs() < 1e-15);
        // wrong at indices 0 and 3
        let ds2 = Dataset::from_1d(&[1.0, 2.0, 3.0, 4.0], &[-1.0, 1.0, 1.0, 1.0]).unwrap();
        let h = Stump::new(0, 3.5, 1.0).unwrap();
        assert!((weighted_error(&h, &ds2, &w) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tie_break_prefers_lowest_feature() {
        // Both columns separate perfectly.
        let x = Array2::from_shape_vec((4, 2), vec![1., 1., 2., 2., 3., 3., 4., 4.]).unwrap();
        let ds = Dataset::new(x, vec![1., 1., -1., -1.]).unwrap();
        let (h, _) = train_stump(&ds, &WeightVector::uniform(4)).unwrap();
        assert_eq!(h.feature, 0);
    }

    #[test]
    fn stump_rejects_bad_polarity() {
        assert!(Stump::new(0, 0.0, 0.5).is_err());
    }

    #[test]
    fn weight_vector_checks() {
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![-0.5, 1.5]).is_err());
        assert!(WeightVector::normalized(vec![0.0, 0.0]).is_err());
        let w = WeightVector::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.75]);
    }
}
