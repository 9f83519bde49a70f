//! Stagewise functional-gradient boosting with stump learners and a
//! golden-section line search.

use ndarray::{Array2, ArrayView1};

use super::loss::{LeafFit, Loss};
use super::stump::{midpoint, StumpSearch};
use crate::data::Dataset;
use crate::error::{invalid, Error, Result};

const LINE_TOL: f64 = 1e-8;
const LINE_MAX_ITER: usize = 200;
const BRACKET_BASE: f64 = 10.0;

/// Two-leaf regression stump: `left` when `x[feature] <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionStump {
    pub feature: usize,
    pub threshold: f64,
    pub left: f64,
    pub right: f64,
}

impl RegressionStump {
    #[inline]
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        if x[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbRound {
    /// Pseudo-residuals at the start of the round.
    pub residuals: Vec<f64>,
    pub learner: RegressionStump,
    /// Line-search step before shrinkage.
    pub step: f64,
    /// Mean training loss after the round.
    pub loss: f64,
}

#[derive(Debug, Clone)]
pub struct AdditiveModel {
    pub f0: f64,
    pub shrinkage: f64,
    pub initial_loss: f64,
    pub rounds: Vec<GbRound>,
    /// Why training ended before the requested number of rounds, if it did.
    pub stopped: Option<Error>,
}

impl AdditiveModel {
    pub fn decision_function(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.f0
            + self
                .rounds
                .iter()
                .map(|r| self.shrinkage * r.step * r.learner.predict(x))
                .sum::<f64>()
    }
}

/// Gradient boosting on a labelled dataset (labels used as targets).
pub fn gradient_boost_train(
    data: &Dataset,
    loss: &dyn Loss,
    rounds: usize,
    shrinkage: f64,
) -> Result<AdditiveModel> {
    gradient_boost_fit(data.features(), data.labels(), loss, rounds, shrinkage)
}

/// Gradient boosting on arbitrary real targets.
pub fn gradient_boost_fit(
    x: &Array2<f64>,
    y: &[f64],
    loss: &dyn Loss,
    rounds: usize,
    shrinkage: f64,
) -> Result<AdditiveModel> {
    let n = y.len();
    if x.nrows() != n || n == 0 {
        return Err(invalid("targets", "length must match the feature rows"));
    }
    if rounds == 0 {
        return Err(invalid("rounds", "need at least one round"));
    }
    if !(shrinkage > 0.0 && shrinkage <= 1.0) {
        return Err(invalid("shrinkage", format!("{shrinkage} is outside (0, 1]")));
    }

    let total = |f: &[f64], h: &[f64], g: f64| -> Result<f64> {
        let s: f64 = y
            .iter()
            .zip(f)
            .zip(h)
            .map(|((&yi, &fi), &hi)| loss.value(yi, fi + g * hi))
            .sum();
        if s.is_finite() {
            Ok(s)
        } else {
            Err(Error::NonFiniteLoss(s))
        }
    };

    let zeros = vec![0.0; n];
    let ones = vec![1.0; n];
    let y_scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let f0 = golden_section(|g| total(&zeros, &ones, g), BRACKET_BASE * y_scale)?;
    // Inside the search resolution zero is as good a minimizer as any, and a
    // stray 1e-8 would break stump ties differently from plain AdaBoost.
    let f0 = if f0.abs() <= 10.0 * LINE_TOL { 0.0 } else { f0 };
    let mut f = vec![f0; n];
    let initial_loss = total(&f, &zeros, 0.0)? / n as f64;

    let search = StumpSearch::new(x);
    let mut model = AdditiveModel {
        f0,
        shrinkage,
        initial_loss,
        rounds: Vec::with_capacity(rounds),
        stopped: None,
    };

    for _ in 0..rounds {
        let residuals: Vec<f64> = y
            .iter()
            .zip(&f)
            .map(|(&yi, &fi)| -loss.derivative(yi, fi))
            .collect();
        if residuals.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFiniteLoss(f64::NAN));
        }
        let Some(learner) = fit_learner(x, &residuals, loss.leaf_fit(), &search) else {
            break;
        };
        let h: Vec<f64> = (0..n).map(|i| learner.predict(x.row(i))).collect();
        let r_scale = residuals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let step = match golden_section(|g| total(&f, &h, g), BRACKET_BASE * r_scale) {
            Ok(s) => s,
            Err(e @ Error::LineSearchBracket { .. }) => {
                model.stopped = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let before = total(&f, &h, 0.0)?;
        let step = if total(&f, &h, shrinkage * step)? <= before { step } else { 0.0 };
        for (fi, hi) in f.iter_mut().zip(&h) {
            *fi += shrinkage * step * hi;
        }
        let after = total(&f, &zeros, 0.0)? / n as f64;
        model.rounds.push(GbRound {
            residuals,
            learner,
            step,
            loss: after,
        });
    }
    Ok(model)
}

fn fit_learner(
    x: &Array2<f64>,
    residuals: &[f64],
    fit: LeafFit,
    search: &StumpSearch,
) -> Option<RegressionStump> {
    match fit {
        LeafFit::Sign => {
            let mass: f64 = residuals.iter().map(|r| r.abs()).sum();
            if mass <= 0.0 {
                return None;
            }
            let weights: Vec<f64> = residuals.iter().map(|r| r.abs() / mass).collect();
            let targets: Vec<f64> = residuals
                .iter()
                .map(|&r| if r >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let (s, _) = search.fit(x, &targets, &weights);
            Some(RegressionStump {
                feature: s.feature,
                threshold: s.threshold,
                left: s.polarity,
                right: -s.polarity,
            })
        }
        LeafFit::Mean => Some(fit_mean_stump(x, residuals)),
    }
}

// Least-squares stump: maximize S_L²/n_L + S_R²/n_R over the midpoint grid.
fn fit_mean_stump(x: &Array2<f64>, r: &[f64]) -> RegressionStump {
    let n = r.len();
    let total: f64 = r.iter().sum();
    let mean = total / n as f64;
    let mut best = RegressionStump {
        feature: 0,
        threshold: f64::NEG_INFINITY,
        left: mean,
        right: mean,
    };
    let mut best_gain = total * total / n as f64;
    for (feature, col) in x.columns().into_iter().enumerate() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
        let mut sum_left = 0.0;
        for k in 0..n - 1 {
            sum_left += r[order[k]];
            let (a, b) = (col[order[k]], col[order[k + 1]]);
            if a < b {
                let n_left = (k + 1) as f64;
                let n_right = (n - k - 1) as f64;
                let sum_right = total - sum_left;
                let gain = sum_left * sum_left / n_left + sum_right * sum_right / n_right;
                if gain > best_gain {
                    best_gain = gain;
                    best = RegressionStump {
                        feature,
                        threshold: midpoint(a, b),
                        left: sum_left / n_left,
                        right: sum_right / n_right,
                    };
                }
            }
        }
    }
    best
}

/// Golden-section minimization of a unimodal `f` on `[-half_width, half_width]`.
///
/// Fails with [`Error::LineSearchBracket`] when the minimizer lands on the
/// boundary of the interval.
pub fn golden_section<F>(mut f: F, half_width: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (lo0, hi0) = (-half_width, half_width);
    let (mut a, mut b) = (lo0, hi0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..LINE_MAX_ITER {
        if (b - a).abs() <= LINE_TOL * (1.0 + c.abs().max(d.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let xmin = 0.5 * (a + b);
    let edge = 1e-6 * (hi0 - lo0);
    if xmin - lo0 < edge || hi0 - xmin < edge {
        return Err(Error::LineSearchBracket { lo: lo0, hi: hi0 });
    }
    Ok(xmin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosting::{ExponentialLoss, SquaredLoss};

    #[test]
    fn golden_section_quadratic() {
        let x = golden_section(|g| Ok((g - 1.234).powi(2)), 10.0).unwrap();
        assert!((x - 1.234).abs() < 1e-7);
        assert!(matches!(
            golden_section(|g| Ok(-g), 10.0),
            Err(Error::LineSearchBracket { .. })
        ));
    }

    #[test]
    fn exp_loss_initial_value() {
        let balanced = Dataset::from_1d(&[1., 2., 3., 4.], &[1., -1., 1., -1.]).unwrap();
        let m = gradient_boost_train(&balanced, &ExponentialLoss, 1, 1.0).unwrap();
        assert!(m.f0.abs() < 1e-6);

        // p = 3/4 positive: argmin is ½ ln 3.
        let skewed = Dataset::from_1d(&[1., 2., 3., 4.], &[1., 1., 1., -1.]).unwrap();
        let m = gradient_boost_train(&skewed, &ExponentialLoss, 1, 1.0).unwrap();
        assert!((m.f0 - 0.5 * 3f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn squared_loss_staircase_monotone() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x / 10.0).floor()).collect();
        let x = Array2::from_shape_vec((40, 1), xs).unwrap();
        let m = gradient_boost_fit(&x, &ys, &SquaredLoss, 30, 0.5).unwrap();
        let mut prev = m.initial_loss;
        for r in &m.rounds {
            assert!(r.loss <= prev + 1e-12, "{} > {prev}", r.loss);
            prev = r.loss;
        }
        assert!(prev < 0.05 * m.initial_loss);
        // initial value is the target mean
        assert!((m.f0 - 1.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_arguments() {
        let ds = Dataset::from_1d(&[1., 2.], &[1., -1.]).unwrap();
        assert!(gradient_boost_train(&ds, &SquaredLoss, 0, 1.0).is_err());
        assert!(gradient_boost_train(&ds, &SquaredLoss, 1, 0.0).is_err());
        assert!(gradient_boost_train(&ds, &SquaredLoss, 1, 1.5).is_err());
    }

    #[test]
    fn single_class_exp_loss_cannot_bracket() {
        let ds = Dataset::from_1d(&[1., 2.], &[1., 1.]).unwrap();
        assert!(matches!(
            gradient_boost_train(&ds, &ExponentialLoss, 1, 1.0),
            Err(Error::LineSearchBracket { .. })
        ));
    }
}
