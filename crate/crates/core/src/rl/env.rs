//! Episode interpreter over model × automaton. Product states are visited
//! lazily; nothing is built up front.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::rng::{stream, Purpose};
use super::scheme::RewardScheme;
use super::RlError;
use crate::automaton::Automaton;
use crate::model::{Model, Player};
use crate::product::{ActionKind, Move, ProductError, Semantics, SINK_ACTION};

/// `(model state, automaton state)`, `None` for the rejecting sink. Matches
/// `ProductState::pair`.
pub type StateKey = Option<(usize, usize)>;

/// What a scheme sees of one step.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from: StateKey,
    /// `(model state, model action)` when the move was a model action.
    pub model_action: Option<(usize, usize)>,
    pub priority: u32,
    pub to: StateKey,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvStep {
    pub observation: StateKey,
    pub reward: f64,
    /// Factor applied to everything after this step.
    pub discount: f64,
    pub done: bool,
}

pub struct Env<'a> {
    pub sem: Semantics<'a>,
    scheme: Box<dyn RewardScheme + 'a>,
    state: StateKey,
    menu: Vec<Move>,
    model_rng: ChaCha8Rng,
    scheme_rng: ChaCha8Rng,
}

fn sink_move() -> Move {
    Move { name: SINK_ACTION.into(), kind: ActionKind::Sink, priority: 0, next_q: None }
}

impl<'a> Env<'a> {
    pub fn new(model: &'a Model, aut: &'a Automaton, scheme: Box<dyn RewardScheme + 'a>) -> Result<Env<'a>, ProductError> {
        let sem = Semantics::new(model, aut)?;
        let state = Some((model.initial, aut.initial));
        let menu = sem.moves(model.initial, aut.initial);
        Ok(Env { sem, scheme, state, menu, model_rng: stream(0, 0, Purpose::Model), scheme_rng: stream(0, 0, Purpose::Scheme) })
    }

    /// Starts episode `episode` of the run seeded with `seed`.
    pub fn reset(&mut self, seed: u64, episode: u64) -> StateKey {
        self.model_rng = stream(seed, episode, Purpose::Model);
        self.scheme_rng = stream(seed, episode, Purpose::Scheme);
        self.scheme.reset();
        self.enter(Some((self.sem.model.initial, self.sem.aut.initial)));
        self.state
    }

    fn enter(&mut self, k: StateKey) {
        self.state = k;
        self.menu = match k {
            Some((m, q)) => self.sem.moves(m, q),
            None => alloc::vec![sink_move()],
        };
    }

    pub fn state(&self) -> StateKey {
        self.state
    }

    pub fn owner(&self) -> Player {
        self.state.map_or(Player::Max, |(m, _)| self.sem.model.states[m].owner)
    }

    pub fn menu(&self) -> &[Move] {
        &self.menu
    }

    pub fn step(&mut self, action: usize) -> Result<EnvStep, RlError> {
        let mv = self.menu.get(action).cloned().ok_or(RlError::DisabledAction { action, available: self.menu.len() })?;
        let to = match self.state {
            None => None,
            Some((m, _)) => {
                let outcomes = self.sem.outcomes(m, &mv);
                let u: f64 = self.model_rng.random();
                let mut acc = 0.0;
                let mut pick = outcomes[outcomes.len() - 1].1;
                for &(p, k) in &outcomes {
                    acc += p;
                    if u < acc {
                        pick = k;
                        break;
                    }
                }
                pick
            }
        };
        let model_action = match (self.state, mv.kind) {
            (Some((m, _)), ActionKind::Model { action, .. }) => Some((m, action)),
            _ => None,
        };
        let t = Transition { from: self.state, model_action, priority: mv.priority, to };
        let out = self.scheme.step(&t, &mut self.scheme_rng);
        self.enter(to);
        Ok(EnvStep { observation: to, reward: out.reward, discount: out.discount, done: out.done })
    }
}
