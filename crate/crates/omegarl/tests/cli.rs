use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).display().to_string()
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_omegarl"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("OMEGARL_")) {
        cmd.env_remove(k);
    }
    cmd.args(args).envs(env.iter().copied()).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn mc_reports_the_gambler_value() {
    let o = run(&["mc", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa")], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o).lines().find(|l| l.starts_with("value: ")).unwrap().to_string();
    let v: f64 = line["value: ".len()..].parse().unwrap();
    assert!((v - 5.0 / 7.0).abs() < 1e-6);
}

#[test]
fn mc_on_trivial_pair_is_one() {
    let o = run(&["--json", "mc", "--model", &corpus("trivial.prism"), "--automaton", &corpus("trivial.hoa")], &[]);
    let j: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(j["value"], 1.0);
    assert_eq!(j["sizes"]["product_states"], 1);
}

#[test]
fn learn_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let mut stats = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("stats{k}.csv"));
        let q = dir.path().join(format!("q{k}.txt"));
        let o = run(
            &["learn", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa"), "--episodes", "300", "--seed", "7", "--stats", path.to_str().unwrap(), "--save-q", q.to_str().unwrap()],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stats.push((fs::read(&path).unwrap(), fs::read(&q).unwrap()));
    }
    assert_eq!(stats[0], stats[1]);
    let text = String::from_utf8(stats[0].0.clone()).unwrap();
    assert_eq!(text.lines().next(), Some("episode,return,steps"));
    assert_eq!(text.lines().count(), 301);
}

#[test]
fn replicas_get_their_own_files() {
    let dir = tempfile::tempdir().unwrap();
    let stats = dir.path().join("s.csv");
    let o = run(
        &["learn", "--model", &corpus("trivial.prism"), "--automaton", &corpus("trivial.hoa"), "--episodes", "20", "--seeds", "3", "--seed", "5", "--stats", stats.to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for seed in 5..8 {
        assert!(dir.path().join(format!("s-seed{seed}.csv")).exists());
    }
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("result: seed")).count(), 3);
}

#[test]
fn loaded_table_must_match_the_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    let q = q.to_str().unwrap();
    let o = run(&["learn", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa"), "--episodes", "50", "--save-q", q], &[]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["learn", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa"), "--episodes", "50", "--load-q", q], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["learn", "--model", &corpus("trivial.prism"), "--automaton", &corpus("trivial.hoa"), "--load-q", q], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("digest mismatch"));
}

#[test]
fn input_errors_exit_with_one_and_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.prism");
    fs::write(&bad, "mdp\nmodule m\n  x : [0..1] init 0;\n  [a] x=0 -> (x'=);\nendmodule\n").unwrap();
    let o = run(&["mc", "--model", bad.to_str().unwrap(), "--automaton", &corpus("trivial.hoa")], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.prism:4:"), "{}", stderr(&o));
    let o = run(&["mc", "--model", "/nonexistent.prism", "--automaton", &corpus("trivial.hoa")], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["learn", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa"), "--alpha", "0"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["learn", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa"), "--scheme", "plugin"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not implemented"), "{}", stderr(&o));
}

#[test]
fn flags_override_environment() {
    let args = ["learn", "--model", &corpus("trivial.prism"), "--automaton", &corpus("trivial.hoa")];
    let dir = tempfile::tempdir().unwrap();
    let stats = dir.path().join("s.csv");
    let mut with_stats: Vec<&str> = args.to_vec();
    with_stats.extend(["--stats", stats.to_str().unwrap()]);
    let o = run(&with_stats, &[("OMEGARL_EPISODES", "7")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&stats).unwrap().lines().count(), 8);
    with_stats.extend(["--episodes", "4"]);
    run(&with_stats, &[("OMEGARL_EPISODES", "7")]);
    assert_eq!(fs::read_to_string(&stats).unwrap().lines().count(), 5);
}

#[test]
fn runs_log_sizes_and_timings() {
    let o = run(&["--verbosity", "2", "mc", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa")], &[]);
    let err = stderr(&o);
    for needle in ["model: 8 states", "automaton: 4 states", "product: 25 states", "solve:"] {
        assert!(err.contains(needle), "missing {needle:?} in {err}");
    }
    let quiet = run(&["--verbosity", "0", "mc", "--model", &corpus("gambler.prism"), "--automaton", &corpus("gambler.hoa")], &[]);
    assert!(stderr(&quiet).is_empty());
}

#[test]
fn inputs_are_left_untouched() {
    let files: Vec<PathBuf> = ["gambler.prism", "gambler.hoa"].iter().map(|f| PathBuf::from(corpus(f))).collect();
    let before: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
    let dir = tempfile::tempdir().unwrap();
    let out = |n: &str| dir.path().join(n).display().to_string();
    let (m, a) = (corpus("gambler.prism"), corpus("gambler.hoa"));
    run(&["mc", "--model", &m, "--automaton", &a, "--csv", &out("s.csv"), "--dot", &out("c.dot")], &[]);
    run(&["sldba", "--automaton", &a, "--hoa-out", &out("s.hoa")], &[]);
    run(&["export", "--what", "product", "--model", &m, "--automaton", &a, "--dot", &out("p.dot")], &[]);
    let after: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
    assert_eq!(before, after);
}

#[test]
fn automaton_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let hoa = dir.path().join("s.hoa");
    let o = run(&["sldba", "--automaton", &corpus("chain_left.hoa"), "--hoa-out", hoa.to_str().unwrap(), "--passes", "eps-jump,empty-subsume"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["export", "--what", "automaton", "--automaton", hoa.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("digraph automaton"));
    let o = run(&["sldba", "--automaton", &corpus("chain_left.hoa"), "--passes", "nope"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--json", "certify", "--automaton", &corpus("gambler.hoa")], &[]);
    let j: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(j["certificate"], "gfm");
    let o = run(&["sldba", "--automaton", &corpus("pursuit.hoa")], &[]);
    assert_eq!(o.status.code(), Some(1));
}
