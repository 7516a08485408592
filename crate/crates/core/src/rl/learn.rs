use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::env::{Env, StateKey};
use super::qtable::{best_index, best_indices, QTable};
use super::rng::{stream, Purpose};
use super::scheme::make_scheme;
use super::{Hyperparams, LearnerKind, RlError, TraceKind};
use crate::automaton::Automaton;
use crate::check::evaluate_markov_chain;
use crate::model::{Model, Player, Strategy};
use crate::product::{build_product, Product};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeStats {
    pub episode: u64,
    /// Discounted sum of rewards.
    pub ret: f64,
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub q: QTable,
    pub stats: Vec<EpisodeStats>,
}

pub fn learn(model: &Model, aut: &Automaton, hp: &Hyperparams) -> Result<LearnOutcome, RlError> {
    learn_from(model, aut, hp, QTable::new(hp.learner == LearnerKind::DoubleQ))
}

/// Continues learning from an existing table.
pub fn learn_from(model: &Model, aut: &Automaton, hp: &Hyperparams, mut q: QTable) -> Result<LearnOutcome, RlError> {
    hp.validate()?;
    if q.is_double() != (hp.learner == LearnerKind::DoubleQ) {
        return Err(RlError::InvalidHyperparams("table shape does not match the learner".into()));
    }
    let mut env = Env::new(model, aut, make_scheme(hp, model, aut)?)?;
    let mut stats = Vec::with_capacity(hp.episodes as usize);
    for e in 0..hp.episodes {
        let eps = if hp.anneal { hp.epsilon * (1.0 - e as f64 / hp.episodes as f64) } else { hp.epsilon };
        let mut ep = Episode { hp, eps, explore: stream(hp.seed, e, Purpose::Explore), coins: stream(hp.seed, e, Purpose::Learner) };
        let s = env.reset(hp.seed, e);
        let (ret, steps) = match hp.learner {
            LearnerKind::QLearning | LearnerKind::DoubleQ => ep.q_learning(&mut env, &mut q, s)?,
            LearnerKind::SarsaLambda => ep.sarsa(&mut env, &mut q, s)?,
        };
        stats.push(EpisodeStats { episode: e, ret, steps });
    }
    Ok(LearnOutcome { q, stats })
}

struct Episode<'h> {
    hp: &'h Hyperparams,
    eps: f64,
    explore: ChaCha8Rng,
    coins: ChaCha8Rng,
}

fn opt(row: &[f64], owner: Player) -> f64 {
    row[best_index(row, owner)]
}

impl Episode<'_> {
    /// ε-greedy over the combined estimate, uniform among tied best actions.
    fn choose(&mut self, q: &QTable, k: StateKey, owner: Player) -> usize {
        let row = q.combined(k).expect("state has entries");
        if self.explore.random::<f64>() < self.eps {
            return self.explore.random_range(0..row.len());
        }
        let best = best_indices(&row, owner);
        best[self.explore.random_range(0..best.len())]
    }

    fn q_learning(&mut self, env: &mut Env, q: &mut QTable, mut s: StateKey) -> Result<(f64, u64), RlError> {
        let alpha = self.hp.alpha;
        let (mut ret, mut scale) = (0.0, 1.0);
        q.ensure(s, env.menu().len());
        for step in 0..self.hp.max_ep_length {
            let a = self.choose(q, s, env.owner());
            let out = env.step(a)?;
            ret += scale * out.reward;
            scale *= out.discount;
            let s2 = out.observation;
            q.ensure(s2, env.menu().len());
            let owner2 = env.owner();
            if q.is_double() {
                let (upd, eval) = if self.coins.random::<bool>() { (0, 1) } else { (1, 0) };
                let future = if out.done {
                    0.0
                } else {
                    let a2 = best_index(&q.tables[upd][&s2], owner2);
                    q.tables[eval][&s2][a2]
                };
                let x = &mut q.tables[upd].get_mut(&s).unwrap()[a];
                *x += alpha * (out.reward + out.discount * future - *x);
            } else {
                let future = if out.done { 0.0 } else { opt(&q.tables[0][&s2], owner2) };
                let x = &mut q.tables[0].get_mut(&s).unwrap()[a];
                *x += alpha * (out.reward + out.discount * future - *x);
            }
            if out.done {
                return Ok((ret, step + 1));
            }
            s = s2;
        }
        Ok((ret, self.hp.max_ep_length))
    }

    fn sarsa(&mut self, env: &mut Env, q: &mut QTable, mut s: StateKey) -> Result<(f64, u64), RlError> {
        let (alpha, lambda) = (self.hp.alpha, self.hp.lambda);
        let (mut ret, mut scale) = (0.0, 1.0);
        let mut traces: BTreeMap<(StateKey, usize), f64> = BTreeMap::new();
        q.ensure(s, env.menu().len());
        let mut a = self.choose(q, s, env.owner());
        for step in 0..self.hp.max_ep_length {
            let out = env.step(a)?;
            ret += scale * out.reward;
            scale *= out.discount;
            let s2 = out.observation;
            q.ensure(s2, env.menu().len());
            let a2 = if out.done { 0 } else { self.choose(q, s2, env.owner()) };
            let future = if out.done { 0.0 } else { q.tables[0][&s2][a2] };
            let delta = out.reward + out.discount * future - q.tables[0][&s][a];
            let e = traces.entry((s, a)).or_insert(0.0);
            *e = match self.hp.trace {
                TraceKind::Replacing => 1.0,
                TraceKind::Accumulating => *e + 1.0,
            };
            let decay = out.discount * lambda;
            traces.retain(|&(k, b), e| {
                q.tables[0].get_mut(&k).unwrap()[b] += alpha * delta * *e;
                *e *= decay;
                *e > TRACE_CUTOFF
            });
            if out.done {
                return Ok((ret, step + 1));
            }
            s = s2;
            a = a2;
        }
        Ok((ret, self.hp.max_ep_length))
    }
}

/// Traces below this are dropped.
const TRACE_CUTOFF: f64 = 1e-12;

/// Value at the initial state of the chain left by the two strategies.
pub fn verify_strategies(p: &Product, max: &Strategy, min: &Strategy) -> Result<f64, RlError> {
    for (s, st) in p.states.iter().enumerate() {
        let strat = if st.owner == Player::Max { max } else { min };
        if st.actions.len() > 1 && strat.choice(s).is_none() {
            return Err(RlError::MissingDecision(s));
        }
    }
    let chain = p.restrict(&[max, min])?;
    Ok(evaluate_markov_chain(&chain)?.initial)
}

/// Builds the product, fixes the greedy strategies of the table and returns
/// the probability of satisfying the objective from the initial state.
pub fn verify_learned(model: &Model, aut: &Automaton, q: &QTable) -> Result<f64, RlError> {
    let p = build_product(model, aut)?;
    let (max, min) = q.strategies(&p);
    verify_strategies(&p, &max, &min)
}
