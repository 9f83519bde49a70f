//! AdaBoost, gradient boosting and margin statistics.

mod adaboost;
mod gradient;
mod loss;
mod margin;
mod stump;

pub use adaboost::{
    adaboost_train, learner_weight, sign, update_weights, BoostEnsemble, RoundRecord, StopReason,
    EPS_FLOOR,
};
pub use gradient::{
    golden_section, gradient_boost_fit, gradient_boost_train, AdditiveModel, GbRound,
    RegressionStump,
};
pub use loss::{exp_loss, pseudo_gradients, ExponentialLoss, LeafFit, Loss, SquaredLoss};
pub use margin::{margins, Histogram, MarginStats, MARGIN_BINS};
pub use stump::{train_stump, weighted_error, Stump, StumpSearch, WeightVector};
