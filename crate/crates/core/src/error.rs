use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("choice probabilities undefined: every site has zero weight")]
    DegenerateChoice,

    #[error("quorum margin undefined: total pheromone is zero")]
    ZeroPheromone,

    #[error("all learner weights are zero; margins are undefined")]
    ZeroAlphas,

    #[error("loss evaluated to a non-finite value ({0})")]
    NonFiniteLoss(f64),

    #[error("line search could not bracket a minimum within [{lo}, {hi}]")]
    LineSearchBracket { lo: f64, hi: f64 },

    #[error("t-test undefined: {0}")]
    DegenerateTest(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
