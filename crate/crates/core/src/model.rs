//! Finite turn-based stochastic games with labelled states.
//!
//! An MDP is the special case where Max owns every state.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Tolerance on the sum of every outgoing distribution.
pub const PROB_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Max => "max",
            Player::Min => "min",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Mdp,
    Smg,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Mdp => "mdp",
            ModelKind::Smg => "smg",
        })
    }
}

/// A set of atomic propositions, bit `i` standing for proposition `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub u64);

impl Label {
    pub const EMPTY: Label = Label(0);

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Label {
        Label(self.0 | 1 << i)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    support: Vec<(f64, usize)>,
}

impl Distribution {
    /// Builds a distribution, merging repeated successors.
    pub fn new(entries: impl IntoIterator<Item = (f64, usize)>) -> Result<Self, ModelError> {
        let mut support: Vec<(f64, usize)> = Vec::new();
        for (p, s) in entries {
            if !(p > 0.0) || !p.is_finite() {
                return Err(ModelError::NonPositiveProbability(p));
            }
            match support.iter_mut().find(|(_, t)| *t == s) {
                Some(slot) => slot.0 += p,
                None => support.push((p, s)),
            }
        }
        if support.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        let sum: f64 = support.iter().map(|(p, _)| p).sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(ModelError::ProbabilitySum {
                context: String::new(),
                sum,
            });
        }
        Ok(Distribution { support })
    }

    pub fn dirac(target: usize) -> Self {
        Distribution {
            support: alloc::vec![(1.0, target)],
        }
    }

    pub fn support(&self) -> &[(f64, usize)] {
        &self.support
    }

    pub fn successors(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().map(|&(_, s)| s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub name: String,
    pub distribution: Distribution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateRecord {
    pub owner: Player,
    pub label: Label,
    pub actions: Vec<Action>,
    /// Variable values, in the order of [`Model::var_names`].
    pub valuation: Vec<i64>,
}

impl StateRecord {
    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardStruct {
    pub name: String,
    entries: Vec<(usize, String, f64)>,
}

impl RewardStruct {
    pub fn new(name: impl Into<String>, entries: Vec<(usize, String, f64)>) -> Result<Self, ModelError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for (s, a, _) in &entries {
            if !seen.insert((*s, a.clone())) {
                return Err(ModelError::DuplicateReward {
                    structure: name,
                    state: *s,
                    action: a.clone(),
                });
            }
        }
        Ok(RewardStruct { name, entries })
    }

    pub fn entries(&self) -> &[(usize, String, f64)] {
        &self.entries
    }

    /// Reward for taking `action` in `state`, zero when absent.
    pub fn reward(&self, state: usize, action: &str) -> f64 {
        self.entries
            .iter()
            .find(|(s, a, _)| *s == state && a == action)
            .map_or(0.0, |e| e.2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub ap_names: Vec<String>,
    pub var_names: Vec<String>,
    pub states: Vec<StateRecord>,
    pub initial: usize,
    pub reward_structs: Vec<RewardStruct>,
}

impl Model {
    /// Checks every structural invariant and assembles the model.
    pub fn new(
        kind: ModelKind,
        ap_names: Vec<String>,
        var_names: Vec<String>,
        states: Vec<StateRecord>,
        initial: usize,
        reward_structs: Vec<RewardStruct>,
    ) -> Result<Model, ModelError> {
        if ap_names.len() > 64 {
            return Err(ModelError::TooManyLabels(ap_names.len()));
        }
        let n = states.len();
        if initial >= n {
            return Err(ModelError::InitialOutOfRange(initial));
        }
        for (i, st) in states.iter().enumerate() {
            if st.actions.is_empty() {
                return Err(ModelError::Deadlock {
                    state: i,
                    description: String::new(),
                });
            }
            if kind == ModelKind::Mdp && st.owner != Player::Max {
                return Err(ModelError::MinStateInMdp(i));
            }
            for (k, a) in st.actions.iter().enumerate() {
                if st.actions[..k].iter().any(|b| b.name == a.name) {
                    return Err(ModelError::DuplicateAction {
                        state: i,
                        name: a.name.clone(),
                    });
                }
                if let Some(t) = a.distribution.successors().find(|&t| t >= n) {
                    return Err(ModelError::InvalidSuccessor { state: i, target: t });
                }
            }
        }
        for rs in &reward_structs {
            if let Some((s, _, _)) = rs.entries.iter().find(|(s, _, _)| *s >= n) {
                return Err(ModelError::InvalidSuccessor { state: *s, target: *s });
            }
        }
        Ok(Model {
            kind,
            ap_names,
            var_names,
            states,
            initial,
            reward_structs,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn action_count(&self) -> usize {
        self.states.iter().map(|s| s.actions.len()).sum()
    }

    pub fn reward_struct(&self, name: &str) -> Option<&RewardStruct> {
        self.reward_structs.iter().find(|r| r.name == name)
    }

    /// Label of `state` re-indexed against `ap_names`: bit `i` is set iff
    /// proposition `ap_names[i]` holds in the state.
    pub fn label_bitset<S: AsRef<str>>(&self, state: usize, ap_names: &[S]) -> Result<Label, ModelError> {
        let own = self.states[state].label;
        let mut out = Label::EMPTY;
        for (i, name) in ap_names.iter().enumerate() {
            let idx = self
                .ap_names
                .iter()
                .position(|n| n == name.as_ref())
                .ok_or_else(|| ModelError::UnknownProposition(String::from(name.as_ref())))?;
            if own.contains(idx) {
                out = out.with(i);
            }
        }
        Ok(out)
    }

    /// Keeps exactly the chosen action in every state owned by a player some
    /// strategy covers; the other states keep their full menu.
    pub fn restrict_to_strategy(&self, strategies: &[&Strategy]) -> Result<Model, ModelError> {
        let mut states = self.states.clone();
        for (i, st) in states.iter_mut().enumerate() {
            let Some(sigma) = strategies.iter().find(|s| s.player == st.owner) else {
                continue;
            };
            let choice = sigma.choice(i).ok_or(ModelError::MissingDecision(i))?;
            if choice >= st.actions.len() {
                return Err(ModelError::MissingDecision(i));
            }
            let kept = st.actions.swap_remove(choice);
            st.actions = alloc::vec![kept];
        }
        Ok(Model {
            states,
            ..self.clone()
        })
    }

    /// One-line textual rendering of a state valuation, e.g. `x=3,y=0`.
    pub fn describe_state(&self, state: usize) -> String {
        let mut out = String::new();
        for (k, (name, v)) in self.var_names.iter().zip(&self.states[state].valuation).enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&alloc::format!("{name}={v}"));
        }
        out
    }
}

/// A positional strategy of one player: an action index per state, `None`
/// where the player makes no decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub player: Player,
    pub choices: Vec<Option<usize>>,
}

impl Strategy {
    pub fn new(player: Player, choices: Vec<Option<usize>>) -> Self {
        Strategy { player, choices }
    }

    pub fn choice(&self, state: usize) -> Option<usize> {
        self.choices.get(state).copied().flatten()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    Deadlock { state: usize, description: String },
    ProbabilitySum { context: String, sum: f64 },
    NonPositiveProbability(f64),
    EmptyDistribution,
    InvalidSuccessor { state: usize, target: usize },
    DuplicateAction { state: usize, name: String },
    DuplicateReward { structure: String, state: usize, action: String },
    MinStateInMdp(usize),
    InitialOutOfRange(usize),
    MissingDecision(usize),
    UnknownProposition(String),
    TooManyLabels(usize),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Deadlock { state, description } => {
                write!(f, "deadlock in state {state}")?;
                if !description.is_empty() {
                    write!(f, " ({description})")?;
                }
                Ok(())
            }
            ModelError::ProbabilitySum { context, sum } => {
                write!(f, "probabilities sum to {sum}, expected 1")?;
                if !context.is_empty() {
                    write!(f, " ({context})")?;
                }
                Ok(())
            }
            ModelError::NonPositiveProbability(p) => write!(f, "non-positive probability {p}"),
            ModelError::EmptyDistribution => f.write_str("empty distribution"),
            ModelError::InvalidSuccessor { state, target } => {
                write!(f, "state {state} has out-of-range successor {target}")
            }
            ModelError::DuplicateAction { state, name } => {
                write!(f, "action `{name}` appears twice in state {state}")
            }
            ModelError::DuplicateReward { structure, state, action } => write!(
                f,
                "reward structure `{structure}` has two entries for state {state}, action `{action}`"
            ),
            ModelError::MinStateInMdp(s) => write!(f, "state {s} is owned by min in an mdp"),
            ModelError::InitialOutOfRange(s) => write!(f, "initial state {s} out of range"),
            ModelError::MissingDecision(s) => write!(f, "strategy has no decision for state {s}"),
            ModelError::UnknownProposition(p) => write!(f, "unknown atomic proposition `{p}`"),
            ModelError::TooManyLabels(n) => write!(f, "{n} labels exceed the limit of 64"),
        }
    }
}

impl core::error::Error for ModelError {}
