mod common;

use common::*;
use omegarl_core::check::{evaluate_markov_chain, solve_game_parity, solve_mdp_parity, GameOptions};
use omegarl_core::model::Player;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_mdps_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..300 {
        let p = random_product(&mut rng, 25, 3, 3, false, 4096);
        let got = solve_mdp_parity(&p).unwrap();
        let want = brute_force_values(&p);
        assert!(max_gap(&got.values, &want) < TOL, "case {i}: {:?} vs {:?}", got.values, want);
        let sigma = &got.max_strategy;
        let chain = p.restrict(&[sigma]).unwrap();
        let v = evaluate_markov_chain(&chain).unwrap();
        assert!(max_gap(&v.values, &want) < TOL, "case {i}: strategy value");
    }
}

#[test]
fn random_games_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let p = random_product(&mut rng, 16, 3, 3, true, 4096);
        let got = solve_game_parity(&p, &GameOptions::default()).unwrap_or_else(|e| panic!("case {i}: {e}"));
        let want = brute_force_values(&p);
        assert!(max_gap(&got.values, &want) < TOL, "case {i}: {:?} vs {:?}\n{p:?}", got.values, want);
    }
}

#[test]
#[ignore]
fn stress_games() {
    for seed in 0..4000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let p = random_product(&mut rng, 8, 3, 3, true, 4096);
        let got = solve_game_parity(&p, &GameOptions::default()).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{p:?}"));
        let want = brute_force_values(&p);
        assert!(max_gap(&got.values, &want) < TOL, "seed {seed}: {:?} vs {:?}\n{p:?}", got.values, want);
    }
}

#[test]
fn almost_sure_region_is_the_value_one_set() {
    use omegarl_core::check::qualitative::{almost_sure, of_product};
    for seed in 0..1500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + seed);
        let p = random_product(&mut rng, 10, 3, 3, true, 4096);
        let sol = almost_sure(&of_product(&p));
        let want = brute_force_values(&p);
        for s in 0..p.len() {
            assert_eq!(sol.max_wins[s], want[s] > 1.0 - 1e-9, "seed {seed} state {s}: {want:?}\n{p:?}");
        }
        // the recorded strategies must win for their owners
        let g = of_product(&p);
        let local = |s: usize| g.actions[s].iter().position(|&a| a == sol.choice[s]);
        let winner_choice = |owner: Player, c: &[usize]| -> Vec<usize> {
            (0..p.len()).map(|s| if p.states[s].owner == owner { local(s).unwrap_or(c[s]) } else { c[s] }).collect()
        };
        for nu in choices(&p, Player::Min) {
            let v = chain_values(&p, &winner_choice(Player::Max, &nu));
            for s in (0..p.len()).filter(|&s| sol.max_wins[s]) {
                assert!(v[s] > 1.0 - 1e-9, "seed {seed}: Max strategy loses at {s}");
            }
        }
        for sigma in choices(&p, Player::Max) {
            let v = chain_values(&p, &winner_choice(Player::Min, &sigma));
            for s in (0..p.len()).filter(|&s| !sol.max_wins[s]) {
                assert!(v[s] < 1.0 - 1e-9, "seed {seed}: Min strategy loses at {s}");
            }
        }
    }
}
