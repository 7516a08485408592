//! Quantitative parity solving on products: Markov chains, MDPs and
//! turn-based stochastic games.

mod chain;
mod game;
pub mod linear;
mod mdp;
pub mod qualitative;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use chain::evaluate_markov_chain;
pub use game::{solve_game_parity, GameOptions};
pub use mdp::{solve_mdp_parity, winning_mecs, WinningMec};

use crate::model::{Player, Strategy};

/// Values per product state and an optimal positional strategy per player.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueVector {
    pub values: Vec<f64>,
    pub max_strategy: Strategy,
    /// All `None` for MDPs.
    pub min_strategy: Strategy,
    /// Strategy-improvement rounds (1 for MDPs).
    pub iterations: usize,
}

impl ValueVector {
    pub fn strategy(&self, player: Player) -> &Strategy {
        match player {
            Player::Max => &self.max_strategy,
            Player::Min => &self.min_strategy,
        }
    }
}

/// Result of evaluating a Markov chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainValue {
    pub values: Vec<f64>,
    pub initial: f64,
    /// Bottom SCCs with their acceptance.
    pub bsccs: Vec<(Vec<usize>, bool)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckError {
    /// The MDP solver met a state owned by Min.
    MinState(usize),
    /// Chain evaluation met a state with a choice.
    NotAChain { state: usize, actions: usize },
    NoConvergence { iterations: usize },
    Strategy(String),
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::MinState(s) => write!(f, "state {s} is owned by Min; use the game solver"),
            CheckError::NotAChain { state, actions } => write!(f, "state {state} has {actions} actions, expected one"),
            CheckError::NoConvergence { iterations } => write!(f, "strategy improvement did not converge in {iterations} iterations"),
            CheckError::Strategy(msg) => write!(f, "bad strategy: {msg}"),
        }
    }
}

impl core::error::Error for CheckError {}
