use std::path::{Path, PathBuf};

use graphviz_rust::dot_structures::{EdgeTy, Graph, Stmt};
use omegarl::core::automaton::Automaton;
use omegarl::core::check::{solve_game_parity, solve_mdp_parity, GameOptions};
use omegarl::core::model::{Model, Player, Strategy};
use omegarl::core::product::build_product;
use omegarl::core::rl::{self, Hyperparams, LearnerKind, QTable};
use omegarl::core::sldba::{certify, MinimizePass};
use omegarl::digest::{automaton_digest, model_digest};
use omegarl::input::{read_automaton, read_model};
use omegarl::qfile::{QFile, QFileError, MAGIC};
use omegarl::{csv_out, dot};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn load(model: &str, aut: &str) -> (Model, Automaton) {
    (read_model(&corpus(model)).unwrap(), read_automaton(&corpus(aut)).unwrap())
}

#[test]
fn q_tables_round_trip_byte_for_byte() {
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    for learner in LearnerKind::ALL {
        let hp = Hyperparams { learner, episodes: 200, seed: 4, ..Hyperparams::default() };
        let q = rl::learn(&model, &aut, &hp).unwrap().q;
        let file = QFile::new(q, &hp, &model_digest(&model), &automaton_digest(&aut));
        let text = file.to_text();
        assert!(text.starts_with(MAGIC));
        let back = QFile::parse(&text).unwrap();
        assert_eq!(back.q, file.q);
        assert_eq!(back.to_text(), text);
        assert_eq!(back.get("learner"), Some(learner.name()));
    }
}

#[test]
fn empty_q_table_is_header_only() {
    let file = QFile::new(QTable::new(false), &Hyperparams::default(), "m", "a");
    let text = file.to_text();
    assert_eq!(text.lines().last(), Some("state_id,action_id,value"));
    assert!(text.lines().rev().skip(1).all(|l| l.starts_with('#')), "{text}");
    assert_eq!(QFile::parse(&text).unwrap().q, QTable::new(false));
}

#[test]
fn digest_mismatch_is_reported() {
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    let other = read_model(&corpus("trivial.prism")).unwrap();
    let file = QFile::new(QTable::new(false), &Hyperparams::default(), &model_digest(&model), &automaton_digest(&aut));
    assert!(file.check_digests(&model_digest(&model), &automaton_digest(&aut)).is_ok());
    assert!(matches!(file.check_digests(&model_digest(&other), &automaton_digest(&aut)), Err(QFileError::DigestMismatch { .. })));
    assert_ne!(model_digest(&model), model_digest(&other));
}

#[test]
fn malformed_q_table_names_its_line() {
    let text = format!("{MAGIC}\n# tables: 1\n0:0,0,zero\n");
    match QFile::parse(&text) {
        Err(QFileError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

fn strategy_csv(model: &Model, p: &omegarl::core::product::Product, s: &[&Strategy]) -> Vec<Vec<String>> {
    let mut buf = Vec::new();
    csv_out::write_strategy(&mut buf, model, p, s).unwrap();
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(buf.as_slice());
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn gambler_strategy_csv() {
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    let p = build_product(&model, &aut).unwrap();
    let v = solve_mdp_parity(&p).unwrap();
    let rows = strategy_csv(&model, &p, &[&v.max_strategy]);
    assert_eq!(rows[0], ["x", "aut_state", "action"]);
    // wealth 2..=5 has several bets, each seen in automaton states 0, 2, 3
    assert_eq!(rows.len() - 1, 4 * 3);
    for r in &rows[1..] {
        let x: i64 = r[0].parse().unwrap();
        let bet: i64 = r[2][1..].parse().unwrap();
        assert!(bet <= x && x + bet <= 7, "{r:?}");
    }
}

#[test]
fn game_csv_has_player_column() {
    let (model, aut) = load("pursuit4.prism", "pursuit.hoa");
    let p = build_product(&model, &aut).unwrap();
    let v = solve_game_parity(&p, &GameOptions::default()).unwrap();
    let rows = strategy_csv(&model, &p, &[&v.max_strategy, &v.min_strategy]);
    assert_eq!(rows[0], ["mx", "my", "nx", "ny", "t", "aut_state", "player", "action"]);
    let players: std::collections::BTreeSet<&str> = rows[1..].iter().map(|r| r[6].as_str()).collect();
    assert_eq!(players.len(), 2);
    assert_eq!(rows.len() - 1, p.decision_states(Player::Max).len() + p.decision_states(Player::Min).len());
}

fn parse_dot(text: &str) -> (usize, usize) {
    let g = graphviz_rust::parse(text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    let stmts = match g {
        Graph::DiGraph { stmts, .. } => stmts,
        Graph::Graph { .. } => panic!("undirected"),
    };
    let nodes = stmts.iter().filter(|s| matches!(s, Stmt::Node(_))).count();
    let edges = stmts
        .iter()
        .map(|s| match s {
            Stmt::Edge(e) => match &e.ty {
                EdgeTy::Pair(..) => 1,
                EdgeTy::Chain(v) => v.len() - 1,
            },
            _ => 0,
        })
        .sum();
    (nodes, edges)
}

#[test]
fn gambler_chain_dot_has_the_hand_counted_shape() {
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    let p = build_product(&model, &aut).unwrap();
    let v = solve_mdp_parity(&p).unwrap();
    let chain = p.restrict(&[&v.max_strategy]).unwrap();
    // 5 -b2-> {3,7}, 3 -b3-> {0,6}, 6 -b1-> {5,7}, 7 -stop-> 7 in the
    // accepting automaton state, 0 loops: six boxes, three circles, the
    // start marker; one start edge, three bets into circles, six
    // probability edges and three stop edges
    assert_eq!(parse_dot(&dot::induced_dot(&model, &chain)), (10, 13));
}

#[test]
fn every_dot_export_parses() {
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    let p = build_product(&model, &aut).unwrap();
    let (nodes, _) = parse_dot(&dot::model_dot(&model));
    let chance: usize = model.states.iter().flat_map(|s| &s.actions).filter(|a| a.distribution.support().len() > 1).count();
    assert_eq!(nodes, 1 + model.len() + chance);
    parse_dot(&dot::product_dot(&model, &p));
    let (nodes, edges) = parse_dot(&dot::automaton_dot(&aut));
    assert_eq!((nodes, edges), (1 + aut.len(), 1 + aut.edge_count()));
    let nba = read_automaton(&corpus("chain_left.hoa")).unwrap();
    let (_, game) = certify(&nba, &MinimizePass::ALL);
    let (nodes, _) = parse_dot(&dot::simulation_dot(&game));
    assert_eq!(nodes, 1 + game.game.len());
}

#[test]
fn unrestricted_chain_dot_is_the_model_shape() {
    // a product with a one-state automaton drawn as a chain of all states
    let model = read_model(&corpus("trivial.prism")).unwrap();
    let aut = read_automaton(&corpus("trivial.hoa")).unwrap();
    let p = build_product(&model, &aut).unwrap();
    assert_eq!(parse_dot(&dot::induced_dot(&model, &p)).0, parse_dot(&dot::product_dot(&model, &p)).0);
}
