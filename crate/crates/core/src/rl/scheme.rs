//! Reward schemes: turn product transitions into rewards, discounts and
//! episode ends. None of the shipped schemes keeps memory beyond the
//! product state, so the product itself is the object that gets verified.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::env::Transition;
use super::{Hyperparams, RlError};
use crate::automaton::Automaton;
use crate::model::Model;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeStep {
    pub reward: f64,
    pub discount: f64,
    pub done: bool,
}

pub trait RewardScheme {
    fn kind(&self) -> SchemeKind;
    fn reset(&mut self) {}
    fn step(&mut self, t: &Transition, rng: &mut dyn RngCore) -> SchemeStep;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Accepting edges end the episode with reward 1 with probability 1-ζ.
    ZetaBuchi,
    /// Reward 1 on accepting edges, discounted, never ends.
    Naive,
    /// Rewards of a PRISM reward structure, discounted.
    Prism,
    /// Accepting edges pay 1-γ_B and discount by γ_B, the rest discount by γ.
    MultiDiscount,
    /// Priority p ends the episode with probability (1-ζ)^(d-p+1), paying 1
    /// when p is odd.
    Parity,
    /// Slot for externally supplied schemes; none is bundled.
    Plugin,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] =
        [SchemeKind::ZetaBuchi, SchemeKind::Naive, SchemeKind::Prism, SchemeKind::MultiDiscount, SchemeKind::Parity, SchemeKind::Plugin];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ZetaBuchi => "zeta-buchi",
            SchemeKind::Naive => "naive",
            SchemeKind::Prism => "prism",
            SchemeKind::MultiDiscount => "multi-discount",
            SchemeKind::Parity => "parity",
            SchemeKind::Plugin => "plugin",
        }
    }

    pub fn from_name(s: &str) -> Result<SchemeKind, RlError> {
        SchemeKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| RlError::UnknownScheme(s.to_string()))
    }

    /// Whether episodes end on their own, which is what permits γ = 1.
    pub fn episodic(self) -> bool {
        matches!(self, SchemeKind::ZetaBuchi | SchemeKind::Parity)
    }

    fn needs_buchi(self) -> bool {
        matches!(self, SchemeKind::ZetaBuchi | SchemeKind::Naive | SchemeKind::MultiDiscount)
    }
}

struct ZetaBuchi {
    zeta: f64,
    gamma: f64,
}

impl RewardScheme for ZetaBuchi {
    fn kind(&self) -> SchemeKind {
        SchemeKind::ZetaBuchi
    }

    fn step(&mut self, t: &Transition, rng: &mut dyn RngCore) -> SchemeStep {
        if t.priority == 1 && rng.random::<f64>() >= self.zeta {
            return SchemeStep { reward: 1.0, discount: self.gamma, done: true };
        }
        SchemeStep { reward: 0.0, discount: self.gamma, done: false }
    }
}

struct Naive {
    gamma: f64,
}

impl RewardScheme for Naive {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Naive
    }

    fn step(&mut self, t: &Transition, _: &mut dyn RngCore) -> SchemeStep {
        SchemeStep { reward: if t.priority == 1 { 1.0 } else { 0.0 }, discount: self.gamma, done: false }
    }
}

struct Prism {
    /// Reward of each model state and action index.
    table: Vec<Vec<f64>>,
    gamma: f64,
}

impl RewardScheme for Prism {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Prism
    }

    fn step(&mut self, t: &Transition, _: &mut dyn RngCore) -> SchemeStep {
        let reward = t.model_action.map_or(0.0, |(m, a)| self.table[m][a]);
        SchemeStep { reward, discount: self.gamma, done: false }
    }
}

struct MultiDiscount {
    gamma: f64,
    gamma_b: f64,
}

impl RewardScheme for MultiDiscount {
    fn kind(&self) -> SchemeKind {
        SchemeKind::MultiDiscount
    }

    fn step(&mut self, t: &Transition, _: &mut dyn RngCore) -> SchemeStep {
        if t.priority == 1 {
            SchemeStep { reward: 1.0 - self.gamma_b, discount: self.gamma_b, done: false }
        } else {
            SchemeStep { reward: 0.0, discount: self.gamma, done: false }
        }
    }
}

struct Parity {
    /// End probability per priority.
    stop: Vec<f64>,
    gamma: f64,
}

impl RewardScheme for Parity {
    fn kind(&self) -> SchemeKind {
        SchemeKind::Parity
    }

    fn step(&mut self, t: &Transition, rng: &mut dyn RngCore) -> SchemeStep {
        let p = t.priority as usize;
        if p > 0 && p < self.stop.len() && rng.random::<f64>() < self.stop[p] {
            return SchemeStep { reward: (p % 2) as f64, discount: self.gamma, done: true };
        }
        SchemeStep { reward: 0.0, discount: self.gamma, done: false }
    }
}

/// End probability of each priority in the parity scheme.
pub fn parity_stop_probabilities(max_priority: u32, zeta: f64) -> Vec<f64> {
    (0..=max_priority).map(|p| if p == 0 { 0.0 } else { libm::pow(1.0 - zeta, (max_priority - p + 1) as f64) }).collect()
}

pub fn make_scheme<'a>(hp: &Hyperparams, model: &'a Model, aut: &'a Automaton) -> Result<Box<dyn RewardScheme + 'a>, RlError> {
    let kind = hp.scheme;
    if kind.needs_buchi() && !aut.acceptance.is_buchi() {
        return Err(RlError::SchemeNeedsBuchi(kind.name()));
    }
    Ok(match kind {
        SchemeKind::ZetaBuchi => Box::new(ZetaBuchi { zeta: hp.zeta, gamma: hp.gamma }),
        SchemeKind::Naive => Box::new(Naive { gamma: hp.gamma }),
        SchemeKind::Prism => {
            let rs = match &hp.reward_struct {
                Some(name) => model.reward_struct(name).ok_or_else(|| RlError::NoRewardStruct(name.clone()))?,
                None => model.reward_structs.first().ok_or_else(|| RlError::NoRewardStruct("<first>".into()))?,
            };
            let table = model.states.iter().enumerate().map(|(m, st)| st.actions.iter().map(|a| rs.reward(m, &a.name)).collect()).collect();
            Box::new(Prism { table, gamma: hp.gamma })
        }
        SchemeKind::MultiDiscount => Box::new(MultiDiscount { gamma: hp.gamma, gamma_b: hp.gamma_b }),
        SchemeKind::Parity => {
            let d = aut.states.iter().flat_map(|s| s.edges.iter().map(|e| e.priority).chain(s.epsilon.iter().map(|e| e.priority))).max().unwrap_or(0);
            Box::new(Parity { stop: parity_stop_probabilities(d, hp.zeta), gamma: hp.gamma })
        }
        SchemeKind::Plugin => return Err(RlError::NotImplemented("no plugin scheme is bundled")),
    })
}
