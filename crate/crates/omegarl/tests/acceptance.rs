//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use omegarl::core::automaton::lasso::Lasso;
use omegarl::core::automaton::{emit_hoa, parse_hoa, Automaton};
use omegarl::core::check::{solve_game_parity, solve_mdp_parity, GameOptions};
use omegarl::core::model::{Model, Player, Strategy};
use omegarl::core::parity::{self, Side};
use omegarl::core::prism::{build_model, elaborate, parse_program};
use omegarl::core::product::{build_product, Product};
use omegarl::core::rl::{self, Hyperparams, LearnerKind, QTable};
use omegarl::core::sldba::{certify, minimize_sldba, nba_to_sldba, Certificate, MinimizePass};
use omegarl::csv_out;
use omegarl::digest::{automaton_digest, model_digest};
use omegarl::input::{read_automaton, read_model, read_text};
use omegarl::qfile::QFile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const VALUE_TOL: f64 = 1e-6;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn load(model: &str, aut: &str) -> (Model, Automaton) {
    (read_model(&corpus(model)).unwrap(), read_automaton(&corpus(aut)).unwrap())
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Optimal value 5/7 within one second; the strategy never visits x=1.
fn gambler() -> Outcome {
    let t = Instant::now();
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    let p = build_product(&model, &aut).map_err(|e| e.to_string())?;
    let v = solve_mdp_parity(&p).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let value = v.values[p.initial];
    ensure((value - 5.0 / 7.0).abs() <= VALUE_TOL, || format!("value {value}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    let chain = p.restrict(&[&v.max_strategy]).map_err(|e| e.to_string())?;
    let seen = reachable_from(&adjacency(&chain), &[p.initial]);
    let x = model.var_names.iter().position(|n| n == "x").unwrap();
    let poor = (0..p.len()).filter(|&s| seen[s]).find(|&s| p.states[s].pair.is_some_and(|(m, _)| model.states[m].valuation[x] == 1));
    ensure(poor.is_none(), || format!("strategy reaches {:?}", poor.map(|s| p.states[s].pair)))?;
    Ok(format!("value {value:.7} in {elapsed:.1?}, x=1 unreachable"))
}

fn adjacency(p: &Product) -> Vec<Vec<(usize, u32)>> {
    p.states.iter().map(|st| st.actions.iter().flat_map(|a| a.successors.iter().map(move |e| (e.1, a.priority))).collect()).collect()
}

/// Both chain automata give value 1.
fn chains_exact() -> Outcome {
    let mut out = Vec::new();
    for side in ["left", "right"] {
        let (model, aut) = load("chains.prism", &format!("chain_{side}.hoa"));
        let p = build_product(&model, &aut).map_err(|e| e.to_string())?;
        let v = solve_mdp_parity(&p).map_err(|e| e.to_string())?.values[p.initial];
        ensure((v - 1.0).abs() <= VALUE_TOL, || format!("{side}: {v}"))?;
        out.push(format!("{side} {v:.7}"));
    }
    Ok(out.join(", "))
}

/// The learning setup for the chain study.
fn chain_hyperparams(seed: u64) -> Hyperparams {
    Hyperparams { alpha: 0.1, gamma: 0.999, zeta: 0.99, epsilon: 0.1, episodes: 2000, seed, ..Hyperparams::default() }
}

/// 20 seeds of Q-learning on each chain automaton. Thresholds are
/// statistical: right = 1 in at least 90% of seeds, left ≤ 0.5 in at least
/// half of them.
fn chains_learning() -> Outcome {
    let t = Instant::now();
    let model = read_model(&corpus("chains.prism")).unwrap();
    let mut counts = Vec::new();
    for (side, good) in [("right", (|v: f64| v >= 1.0 - VALUE_TOL) as fn(f64) -> bool), ("left", |v: f64| v <= 0.5 + VALUE_TOL)] {
        let aut = read_automaton(&corpus(&format!("chain_{side}.hoa"))).unwrap();
        let values: Vec<f64> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..20)
                .map(|seed| {
                    let (model, aut) = (&model, &aut);
                    scope.spawn(move || {
                        let o = rl::learn(model, aut, &chain_hyperparams(seed)).unwrap();
                        rl::verify_learned(model, aut, &o.q).unwrap()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        counts.push((side, values.iter().filter(|&&v| good(v)).count()));
    }
    let elapsed = t.elapsed();
    let (right, left) = (counts[0].1, counts[1].1);
    ensure(right >= 18, || format!("right optimal in {right}/20"))?;
    ensure(left >= 10, || format!("left at most 0.5 in {left}/20"))?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("right = 1 in {right}/20, left <= 0.5 in {left}/20, {elapsed:.1?}"))
}

/// Discounted value of every state under `choice` with reward 1 on
/// priority-1 actions, by dense elimination of `x = r + γ P x`.
fn discounted_values(p: &Product, choice: &[usize], gamma: f64) -> Vec<f64> {
    let n = p.len();
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for s in 0..n {
        let act = &p.states[s].actions[choice[s]];
        a[s][s] += 1.0;
        a[s][n] = if act.priority == 1 { 1.0 } else { 0.0 };
        for &(pr, t) in &act.successors {
            a[s][t] -= gamma * pr;
        }
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    (0..n).map(|s| a[s][n] / a[s][s]).collect()
}

/// Naive discounting picks an ω-suboptimal strategy; ζ-Büchi learns an
/// optimal one.
fn counterexample() -> Outcome {
    let (model, aut) = load("counterexample.prism", "accepting.hoa");
    let p = build_product(&model, &aut).map_err(|e| e.to_string())?;
    let optimum = solve_mdp_parity(&p).map_err(|e| e.to_string())?.values[p.initial];
    let profiles = choices(&p, Player::Max);
    let mut naive = Vec::new();
    for gamma in [0.5, 0.8, 0.9] {
        let best = profiles
            .iter()
            .max_by(|a, b| discounted_values(&p, a, gamma)[p.initial].partial_cmp(&discounted_values(&p, b, gamma)[p.initial]).unwrap())
            .unwrap();
        let omega = chain_values(&p, best)[p.initial];
        ensure(omega < optimum - VALUE_TOL, || format!("naive γ={gamma} reaches {omega}, optimum {optimum}"))?;
        naive.push(format!("{omega:.3}"));
    }
    for seed in 0..5 {
        let hp = Hyperparams { zeta: 0.99, gamma: 1.0, episodes: 2000, seed, ..Hyperparams::default() };
        let o = rl::learn(&model, &aut, &hp).map_err(|e| e.to_string())?;
        let v = rl::verify_learned(&model, &aut, &o.q).map_err(|e| e.to_string())?;
        ensure((v - optimum).abs() <= VALUE_TOL, || format!("ζ-Büchi seed {seed}: {v}, optimum {optimum}"))?;
    }
    Ok(format!("optimum {optimum}, naive γ∈{{0.5,0.8,0.9}} gives {}, ζ-Büchi optimal on 5/5 seeds", naive.join("/")))
}

/// Solver values against positional brute force.
fn solver_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..500 {
        let p = random_product(&mut rng, 25, 3, 3, false, 4096);
        let got = solve_mdp_parity(&p).map_err(|e| format!("mdp {i}: {e}"))?;
        let gap = max_gap(&got.values, &brute_force_values(&p));
        ensure(gap <= VALUE_TOL, || format!("mdp {i}: gap {gap}"))?;
    }
    for i in 0..200 {
        let p = random_product(&mut rng, 16, 3, 3, true, 4096);
        let got = solve_game_parity(&p, &GameOptions::default()).map_err(|e| format!("game {i}: {e}"))?;
        let gap = max_gap(&got.values, &brute_force_values(&p));
        ensure(gap <= VALUE_TOL, || format!("game {i}: gap {gap}"))?;
    }
    Ok("500 MDPs and 200 games agree within 1e-6".into())
}

/// NBA that guesses the letter `k` steps ahead on proposition 0, then
/// either accepts everything or asks for infinitely many 0s. Every word has
/// a lucky guess, but no strategy can make it on random letters.
fn guessing_nba(k: usize, aps: usize, gf: bool) -> Automaton {
    let names: Vec<String> = (0..aps).map(|a| format!("\"p{a}\"")).collect();
    let n = 2 * k + 2;
    let acc = n - 1;
    let wait = |b: usize, j: usize| 1 + b * k + (j - 1);
    let mut body = format!("State: 0\n[t] {}\n[t] {}\n", wait(0, 1), wait(1, 1));
    for b in 0..2 {
        for j in 1..=k {
            body.push_str(&format!("State: {}\n", wait(b, j)));
            if j < k {
                body.push_str(&format!("[t] {}\n", wait(b, j + 1)));
            } else {
                body.push_str(&format!("[{}0] {acc}\n", if b == 1 { "" } else { "!" }));
            }
        }
    }
    body.push_str(&format!("State: {acc}\n"));
    body.push_str(if gf { &"[0] ACC {0}\n[!0] ACC\n" } else { &"[t] ACC {0}\n" });
    let body = body.replace("ACC", &acc.to_string());
    let text = format!("HOA: v1\nStates: {n}\nStart: 0\nAP: {aps} {}\nAcceptance: 1 Inf(0)\n--BODY--\n{body}--END--\n", names.join(" "));
    parse_hoa(&text).unwrap()
}

/// Model emitting independent uniform letters over `aps` propositions.
fn coin_model(aps: usize) -> Model {
    let vars: String = (0..aps).map(|a| format!("  v{a} : [0..1] init 0;\n")).collect();
    let letters = 1usize << aps;
    let branches: Vec<String> = (0..letters)
        .map(|l| {
            let upd: Vec<String> = (0..aps).map(|a| format!("(v{a}'={})", l >> a & 1)).collect();
            format!("1/{letters} : {}", upd.join(" & "))
        })
        .collect();
    let labels: String = (0..aps).map(|a| format!("label \"p{a}\" = v{a}=1;\n")).collect();
    let src = format!("mdp\nmodule coins\n{vars}  [go] true -> {};\nendmodule\n{labels}", branches.join(" + "));
    build_model(&elaborate(&parse_program(&src).unwrap()).unwrap()).unwrap()
}

/// Recursive parity solver against brute force, and no GFM certificate for
/// automata that lose on a random word source.
fn mcnaughton() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for i in 0..500 {
        let g = random_parity_game(&mut rng, 12, 3, 4096);
        let sol = parity::solve(&g);
        let even = parity_brute_force(&g, Side::Even);
        let odd = parity_brute_force(&g, Side::Odd);
        for v in 0..g.len() {
            ensure(even[v] != odd[v], || format!("game {i}: brute force undetermined at {v}"))?;
            ensure((sol.winner[v] == Side::Even) == even[v], || format!("game {i}: node {v} won by {:?}", sol.winner[v]))?;
        }
    }
    let mut pairs = 0;
    for k in 1..=3 {
        for aps in 1..=2 {
            for gf in [false, true] {
                let nba = guessing_nba(k, aps, gf);
                let p = build_product(&coin_model(aps), &nba).map_err(|e| e.to_string())?;
                let best = mdp_parity_oracle(&p)[p.initial];
                ensure(best < 1.0 - VALUE_TOL, || format!("guess k={k} aps={aps} gf={gf}: witness value {best}"))?;
                let (cert, _) = certify(&nba, &MinimizePass::ALL);
                ensure(matches!(cert, Certificate::NotProven(_)), || format!("guess k={k} aps={aps} gf={gf}: false certificate"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("500 games match brute force, {pairs} negative pairs uncertified"))
}

/// Random NBAs keep their lasso classification through the construction,
/// the full pipeline and each pass alone.
fn sldba_language() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (mut words, mut accepted) = (0, 0);
    for i in 0..60 {
        let nba = parse_hoa(&random_nba_hoa(&mut rng, 6, 2)).unwrap();
        let raw = nba_to_sldba(&nba);
        let mut variants = vec![("construction".to_string(), raw.aut.clone()), ("pipeline".into(), minimize_sldba(&raw, &MinimizePass::ALL).aut)];
        for pass in MinimizePass::ALL {
            variants.push((pass.name().to_string(), minimize_sldba(&raw, &[pass]).aut));
        }
        for _ in 0..200 {
            let w = Lasso::random(&mut rng, 2, 5);
            let want = lasso_accepts(&nba, &w);
            accepted += want as usize;
            for (name, aut) in &variants {
                ensure(lasso_accepts(aut, &w) == want, || format!("nba {i}, {name}: {w:?} should be {want}"))?;
            }
            words += 1;
        }
    }
    ensure(accepted > 0 && accepted < words, || format!("degenerate sample: {accepted}/{words} accepted"))?;
    Ok(format!("60 NBAs, {words} lassos ({accepted} accepted), {} variants each", MinimizePass::ALL.len() + 2))
}

/// Replays, parse/emit fixpoints and Q-table files.
fn round_trips() -> Outcome {
    let (model, aut) = load("gambler.prism", "gambler.hoa");
    for learner in [LearnerKind::QLearning, LearnerKind::DoubleQ, LearnerKind::SarsaLambda] {
        let hp = Hyperparams { learner, episodes: 300, seed: 9, ..Hyperparams::default() };
        let a = rl::learn(&model, &aut, &hp).map_err(|e| e.to_string())?;
        let b = rl::learn(&model, &aut, &hp).map_err(|e| e.to_string())?;
        ensure(a.q == b.q && a.stats == b.stats, || format!("{} replay differs", learner.name()))?;
        let file = QFile::new(a.q.clone(), &hp, &model_digest(&model), &automaton_digest(&aut));
        let text = file.to_text();
        let back = QFile::parse(&text).map_err(|e| e.to_string())?;
        ensure(back.to_text() == text && back.q == a.q, || format!("{} q-table round trip", learner.name()))?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let path = dir.path().join("q.txt");
        file.save(&path).map_err(|e| e.to_string())?;
        let again = QFile::load(&path).map_err(|e| e.to_string())?;
        again.save(&path).map_err(|e| e.to_string())?;
        ensure(std::fs::read_to_string(&path).unwrap() == text, || "q-table file differs after load/save".into())?;
    }
    let empty = QFile::new(QTable::new(false), &Hyperparams::default(), "m", "a");
    ensure(QFile::parse(&empty.to_text()).map(|f| f.to_text()) == Ok(empty.to_text()), || "empty q-table".into())?;
    let mut files = 0;
    for entry in std::fs::read_dir(corpus("")).unwrap() {
        let path = entry.unwrap().path();
        let src = read_text(&path).unwrap();
        match path.extension().and_then(|e| e.to_str()) {
            Some("prism") => {
                let once = parse_program(&src).map_err(|e| format!("{}: {e}", path.display()))?.to_string();
                let twice = parse_program(&once).map_err(|e| format!("{}: emitted text: {e}", path.display()))?.to_string();
                ensure(once == twice, || format!("{}: emit is not a fixpoint", path.display()))?;
                let a = build_model(&elaborate(&parse_program(&src).unwrap()).unwrap()).unwrap();
                let b = build_model(&elaborate(&parse_program(&once).unwrap()).unwrap()).unwrap();
                ensure(model_digest(&a) == model_digest(&b), || format!("{}: emitted model differs", path.display()))?;
            }
            Some("hoa") => {
                let once = emit_hoa(&parse_hoa(&src).map_err(|e| format!("{}: {e}", path.display()))?);
                let back = parse_hoa(&once).map_err(|e| format!("{}: emitted text: {e}", path.display()))?;
                ensure(emit_hoa(&back) == once, || format!("{}: emit is not a fixpoint", path.display()))?;
            }
            _ => continue,
        }
        files += 1;
    }
    Ok(format!("3 learners replay bit-identically, {files} corpus files round-trip, q-tables byte-identical"))
}

/// The 4x4 pursuit game: the solver's strategies certify its value by
/// duality, and the strategy CSV yields a complete arrow map.
fn pursuit() -> Outcome {
    let (model, aut) = load("pursuit4.prism", "pursuit.hoa");
    let p = build_product(&model, &aut).map_err(|e| e.to_string())?;
    let v = solve_game_parity(&p, &GameOptions::default()).map_err(|e| e.to_string())?;
    // Max fixed: Min's best reply through the complement objective
    let with_max = p.restrict(&[&v.max_strategy]).map_err(|e| e.to_string())?;
    let lower: Vec<f64> = mdp_parity_oracle(&complement(&with_max)).iter().map(|x| 1.0 - x).collect();
    let with_min = p.restrict(&[&v.min_strategy]).map_err(|e| e.to_string())?;
    let upper = mdp_parity_oracle(&with_min);
    for s in 0..p.len() {
        ensure(lower[s] >= v.values[s] - VALUE_TOL && upper[s] <= v.values[s] + VALUE_TOL, || {
            format!("state {s}: value {} outside [{}, {}]", v.values[s], lower[s], upper[s])
        })?;
    }
    let map = arrow_map(&model, &p, &[&v.max_strategy, &v.min_strategy])?;
    Ok(format!("value {} certified on {} states; escaper map {}", v.values[p.initial], p.len(), map.join("/")))
}

/// Escaper arrows with the pursuer at its start square, one row per y from
/// the top. Each reachable square gets exactly one legal arrow.
fn arrow_map(model: &Model, p: &Product, strategies: &[&Strategy]) -> Result<Vec<String>, String> {
    let mut buf = Vec::new();
    csv_out::write_strategy(&mut buf, model, p, strategies).map_err(|e| e.to_string())?;
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| format!("no column {name}"));
    let (mx, my, nx, ny, t, q, action) = (col("mx")?, col("my")?, col("nx")?, col("ny")?, col("t")?, col("aut_state")?, col("action")?);
    let init = &model.states[model.initial].valuation;
    let var = |n: &str| model.var_names.iter().position(|v| v == n).unwrap();
    let (nx0, ny0) = (init[var("nx")].to_string(), init[var("ny")].to_string());
    let side = 4;
    let mut grid = vec![vec!['.'; side]; side];
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let a = &rec[action];
        if !a.starts_with('m') {
            ensure(a.starts_with('n') && &rec[t] == "1", || format!("unexpected row {rec:?}"))?;
            continue;
        }
        ensure(&rec[t] == "0", || format!("escaper row on pursuer turn {rec:?}"))?;
        if rec[nx] != nx0 || rec[ny] != ny0 || &rec[q] != "0" {
            continue;
        }
        let (x, y): (usize, usize) = (rec[mx].parse().unwrap(), rec[my].parse().unwrap());
        let (arrow, legal) = match a {
            "mN" => ('^', y + 1 < side),
            "mS" => ('v', y > 0),
            "mE" => ('>', x + 1 < side),
            "mW" => ('<', x > 0),
            _ => return Err(format!("unknown action {a}")),
        };
        ensure(legal, || format!("{a} leaves the grid at ({x},{y})"))?;
        ensure(grid[y][x] == '.', || format!("two arrows at ({x},{y})"))?;
        grid[y][x] = arrow;
    }
    let arrows = grid.iter().flatten().filter(|&&c| c != '.').count();
    ensure(arrows > 0, || "empty arrow map".into())?;
    Ok(grid.iter().rev().map(|row| row.iter().collect()).collect())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("gambler golden value", gambler),
        ("chains exact value", chains_exact),
        ("chains learning", chains_learning),
        ("naive discount suboptimal", counterexample),
        ("solvers vs brute force", solver_brute_force),
        ("parity games and certificates", mcnaughton),
        ("sldba language preservation", sldba_language),
        ("determinism and round trips", round_trips),
        ("pursuit game", pursuit),
    ];
    let filter = std::env::args().nth(1).filter(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
