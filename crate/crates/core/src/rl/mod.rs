//! Model-free learning on model × automaton: an episode interpreter that
//! walks the product lazily, reward schemes, and tabular learners for
//! turn-based games (Max maximizes, Min minimizes the same table).

mod env;
mod learn;
mod qtable;
pub mod rng;
mod scheme;

use alloc::string::{String, ToString};
use core::fmt;

pub use env::{Env, EnvStep, StateKey, Transition};
pub use learn::{learn, learn_from, verify_learned, verify_strategies, EpisodeStats, LearnOutcome};
pub use qtable::{best_index, best_indices, QTable};
pub use scheme::{make_scheme, parity_stop_probabilities, RewardScheme, SchemeKind, SchemeStep};

use crate::check::CheckError;
use crate::product::ProductError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    QLearning,
    DoubleQ,
    SarsaLambda,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 3] = [LearnerKind::QLearning, LearnerKind::DoubleQ, LearnerKind::SarsaLambda];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::QLearning => "q",
            LearnerKind::DoubleQ => "dq",
            LearnerKind::SarsaLambda => "sarsa-lambda",
        }
    }

    pub fn from_name(s: &str) -> Result<LearnerKind, RlError> {
        LearnerKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| RlError::InvalidHyperparams(alloc::format!("unknown learner {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceKind {
    Replacing,
    Accumulating,
}

impl TraceKind {
    pub fn name(self) -> &'static str {
        match self {
            TraceKind::Replacing => "replacing",
            TraceKind::Accumulating => "accumulating",
        }
    }

    pub fn from_name(s: &str) -> Result<TraceKind, RlError> {
        match s {
            "replacing" => Ok(TraceKind::Replacing),
            "accumulating" => Ok(TraceKind::Accumulating),
            _ => Err(RlError::InvalidHyperparams(alloc::format!("unknown trace kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    /// Discount on accepting edges in the multi-discount scheme.
    pub gamma_b: f64,
    pub epsilon: f64,
    /// Decrease ε linearly to 0 over the run.
    pub anneal: bool,
    pub zeta: f64,
    pub lambda: f64,
    pub episodes: u64,
    pub max_ep_length: u64,
    pub seed: u64,
    pub learner: LearnerKind,
    pub scheme: SchemeKind,
    pub trace: TraceKind,
    /// Reward structure for the PRISM scheme; the first one when unset.
    pub reward_struct: Option<String>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.1,
            gamma: 0.99,
            gamma_b: 0.9,
            epsilon: 0.1,
            anneal: false,
            zeta: 0.99,
            lambda: 0.9,
            episodes: 20_000,
            max_ep_length: 1000,
            seed: 0,
            learner: LearnerKind::QLearning,
            scheme: SchemeKind::ZetaBuchi,
            trace: TraceKind::Replacing,
            reward_struct: None,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), RlError> {
        let bad = |m: &str| Err(RlError::InvalidHyperparams(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if self.gamma == 1.0 && !self.scheme.episodic() {
            return bad("gamma = 1 needs an episodic scheme");
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.zeta) {
            return bad("zeta must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must lie in [0, 1]");
        }
        if self.scheme == SchemeKind::MultiDiscount && !(self.gamma_b >= 0.0 && self.gamma_b < self.gamma) {
            return bad("multi-discount needs 0 <= gamma_b < gamma");
        }
        if self.max_ep_length == 0 {
            return bad("max episode length must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RlError {
    DisabledAction { action: usize, available: usize },
    InvalidHyperparams(String),
    UnknownScheme(String),
    SchemeNeedsBuchi(&'static str),
    NoRewardStruct(String),
    NotImplemented(&'static str),
    MissingDecision(usize),
    Product(ProductError),
    Check(CheckError),
}

impl fmt::Display for RlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RlError::DisabledAction { action, available } => write!(f, "action {action} is not enabled ({available} available)"),
            RlError::InvalidHyperparams(m) => write!(f, "invalid hyperparameters: {m}"),
            RlError::UnknownScheme(s) => write!(f, "unknown reward scheme {s:?}"),
            RlError::SchemeNeedsBuchi(s) => write!(f, "scheme {s} needs a Büchi automaton"),
            RlError::NoRewardStruct(s) => write!(f, "no reward structure {s}"),
            RlError::NotImplemented(m) => write!(f, "not implemented: {m}"),
            RlError::MissingDecision(s) => write!(f, "strategy has no decision for product state {s}"),
            RlError::Product(e) => write!(f, "{e}"),
            RlError::Check(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for RlError {}

impl From<ProductError> for RlError {
    fn from(e: ProductError) -> Self {
        RlError::Product(e)
    }
}

impl From<CheckError> for RlError {
    fn from(e: CheckError) -> Self {
        RlError::Check(e)
    }
}
