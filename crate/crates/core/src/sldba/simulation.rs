//! Fair simulation game between an NBA (duplicator) and an SLDBA (spoiler).
//!
//! Spoiler moves along the SLDBA, picking a letter with each step or taking
//! an ε-edge; duplicator answers with an NBA edge on the same letter.
//! Colors: 1 when spoiler takes an accepting edge, 2 when duplicator does,
//! 0 otherwise. Duplicator plays `Even`, so it wins exactly when its run is
//! accepting whenever spoiler's is. A player who cannot move loses.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{minimize_sldba, nba_to_sldba, MinimizePass, Sldba};
use crate::automaton::{Automaton, Valuation};
use crate::parity::{self, ParityGame, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Position {
    Spoiler { nba: usize, sldba: usize },
    Duplicator { nba: usize, sldba: usize, letter: Valuation },
    /// Duplicator had no answer.
    DuplicatorStuck,
    /// Spoiler's run died.
    SpoilerStuck,
}

#[derive(Clone, Debug)]
pub struct SimulationGame {
    pub game: ParityGame,
    pub positions: Vec<Position>,
    pub initial: usize,
}

pub fn build_simulation_game(nba: &Automaton, sldba: &Sldba) -> SimulationGame {
    assert_eq!(nba.ap_names, sldba.aut.ap_names, "automata over different propositions");
    let mut game = ParityGame::default();
    let mut positions: Vec<Position> = Vec::new();
    let mut index: BTreeMap<Position, usize> = BTreeMap::new();
    let mut node = |p: Position, game: &mut ParityGame, positions: &mut Vec<Position>| -> (usize, bool) {
        if let Some(&i) = index.get(&p) {
            return (i, false);
        }
        let owner = match p {
            Position::Duplicator { .. } | Position::SpoilerStuck => Side::Even,
            _ => Side::Odd,
        };
        let i = game.add_node(owner);
        positions.push(p);
        index.insert(p, i);
        (i, true)
    };
    let (initial, _) = node(Position::Spoiler { nba: nba.initial, sldba: sldba.aut.initial }, &mut game, &mut positions);
    let mut k = 0;
    while k < positions.len() {
        let here = positions[k];
        let mut moves: Vec<(Position, u32)> = Vec::new();
        match here {
            Position::Spoiler { nba: a, sldba: b } => {
                let st = &sldba.aut.states[b];
                for e in &st.edges {
                    for v in e.guard.valuations(nba.num_aps()) {
                        moves.push((Position::Duplicator { nba: a, sldba: e.target, letter: v }, u32::from(e.priority == 1)));
                    }
                }
                for e in &st.epsilon {
                    moves.push((Position::Spoiler { nba: a, sldba: e.target }, 0));
                }
                if moves.is_empty() {
                    moves.push((Position::SpoilerStuck, 0));
                }
            }
            Position::Duplicator { nba: a, sldba: b, letter } => {
                for e in nba.enabled(a, letter) {
                    moves.push((Position::Spoiler { nba: e.target, sldba: b }, if e.priority == 1 { 2 } else { 0 }));
                }
                if moves.is_empty() {
                    moves.push((Position::DuplicatorStuck, 1));
                }
            }
            Position::DuplicatorStuck => moves.push((here, 1)),
            Position::SpoilerStuck => moves.push((here, 0)),
        }
        for (p, color) in moves {
            let (t, _) = node(p, &mut game, &mut positions);
            game.add_edge(k, t, color);
        }
        k += 1;
    }
    SimulationGame { game, positions, initial }
}

#[derive(Clone, Debug)]
pub enum Certificate {
    /// Duplicator wins: the NBA simulates a suitable SLDBA and is good for
    /// MDPs. The original automaton is returned.
    Gfm(Automaton),
    /// No certificate; the SLDBA is returned instead. This does not mean the
    /// NBA is not GFM.
    NotProven(Sldba),
}

/// Builds and minimizes the SLDBA, then tries to show the NBA simulates it.
pub fn certify(nba: &Automaton, passes: &[MinimizePass]) -> (Certificate, SimulationGame) {
    let sldba = minimize_sldba(&nba_to_sldba(nba), passes);
    let game = build_simulation_game(nba, &sldba);
    let sol = parity::solve(&game.game);
    let cert = if sol.winner[game.initial] == Side::Even { Certificate::Gfm(nba.clone()) } else { Certificate::NotProven(sldba) };
    (cert, game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::parse_hoa;

    fn nba(src: &str) -> Automaton {
        parse_hoa(src).unwrap()
    }

    #[test]
    fn deterministic_automaton_is_certified() {
        let a = nba("HOA: v1 States: 1 Start: 0 AP: 1 \"a\" Acceptance: 1 Inf(0) --BODY-- State: 0 [0] 0 {0} [!0] 0 --END--");
        assert!(matches!(certify(&a, &MinimizePass::ALL).0, Certificate::Gfm(_)));
    }

    #[test]
    fn guessing_the_next_letter_is_not_certified() {
        // language is every word, but each step must guess the next letter
        let a = nba(
            "HOA: v1 States: 3 Start: 2 AP: 1 \"a\" Acceptance: 1 Inf(0) --BODY--
             State: 0 [0] 0 {0} [0] 1 {0}
             State: 1 [!0] 0 {0} [!0] 1 {0}
             State: 2 [t] 0 [t] 1 --END--",
        );
        assert!(matches!(certify(&a, &MinimizePass::ALL).0, Certificate::NotProven(_)));
    }
}
