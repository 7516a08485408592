use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::{json, Value};

use omegarl::core::automaton::{emit_hoa, Automaton};
use omegarl::core::check::{solve_game_parity, solve_mdp_parity, CheckError, GameOptions, ValueVector};
use omegarl::core::model::{Model, ModelKind};
use omegarl::core::product::{build_product, Product, ProductError};
use omegarl::core::rl::{self, Hyperparams, LearnerKind, QTable, RlError, SchemeKind, TraceKind};
use omegarl::core::sldba::{certify, minimize_sldba, nba_to_sldba, Certificate, MinimizePass};
use omegarl::digest::{automaton_digest, model_digest};
use omegarl::qfile::QFile;
use omegarl::{csv_out, dot, input};

#[derive(Parser)]
#[command(name = "omegarl", version, about = "Model checking and reinforcement learning for omega-regular objectives")]
struct Cli {
    /// 0 errors only, 1 warnings, 2 phase sizes and timings, 3 debug, 4 trace.
    #[arg(long, global = true, default_value_t = 1, env = "OMEGARL_VERBOSITY", value_parser = clap::value_parser!(u8).range(0..=4))]
    verbosity: u8,
    /// Print a JSON summary instead of the text one.
    #[arg(long, global = true, env = "OMEGARL_JSON")]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the product exactly and report the optimal value.
    Mc(McArgs),
    /// Learn on model × automaton, then verify the learned strategy.
    Learn(Box<LearnArgs>),
    /// Build and minimize a limit-deterministic automaton.
    Sldba(AutArgs),
    /// Try to certify that an NBA is good for MDPs by simulation.
    Certify(AutArgs),
    /// Write GraphViz or HOA renderings of the inputs.
    Export(ExportArgs),
}

#[derive(Args)]
struct Inputs {
    #[arg(long, env = "OMEGARL_MODEL")]
    model: PathBuf,
    #[arg(long, env = "OMEGARL_AUTOMATON")]
    automaton: PathBuf,
}

#[derive(Args)]
struct Outputs {
    /// Strategy CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// GraphViz rendering of the induced chain.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    out: Outputs,
    /// Accepted gap between the bounds of the game solver.
    #[arg(long, default_value_t = 1e-9, env = "OMEGARL_TOLERANCE")]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Learner {
    Q,
    Dq,
    SarsaLambda,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Prism,
    ZetaBuchi,
    Naive,
    MultiDiscount,
    Parity,
    Plugin,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    Replacing,
    Accumulating,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    out: Outputs,
    #[arg(long, value_enum, default_value = "q", env = "OMEGARL_LEARNER")]
    learner: Learner,
    #[arg(long, value_enum, default_value = "zeta-buchi", env = "OMEGARL_SCHEME")]
    scheme: Scheme,
    #[arg(long, default_value_t = 0.1, env = "OMEGARL_ALPHA")]
    alpha: f64,
    #[arg(long, default_value_t = 0.99, env = "OMEGARL_GAMMA")]
    gamma: f64,
    /// Discount on accepting edges (multi-discount scheme).
    #[arg(long, default_value_t = 0.9, env = "OMEGARL_GAMMA_B")]
    gamma_b: f64,
    #[arg(long, default_value_t = 0.1, env = "OMEGARL_EPSILON")]
    epsilon: f64,
    /// Decrease epsilon linearly to 0.
    #[arg(long, env = "OMEGARL_ANNEAL")]
    anneal: bool,
    #[arg(long, default_value_t = 0.99, env = "OMEGARL_ZETA")]
    zeta: f64,
    #[arg(long, default_value_t = 0.9, env = "OMEGARL_LAMBDA")]
    lambda: f64,
    #[arg(long, value_enum, default_value = "replacing", env = "OMEGARL_TRACE")]
    trace: Trace,
    #[arg(long, default_value_t = 20_000, env = "OMEGARL_EPISODES")]
    episodes: u64,
    #[arg(long, default_value_t = 1000, env = "OMEGARL_MAX_EP_LENGTH")]
    max_ep_length: u64,
    #[arg(long, default_value_t = 0, env = "OMEGARL_SEED")]
    seed: u64,
    /// Independent replicas with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1, env = "OMEGARL_SEEDS")]
    seeds: u64,
    /// Reward structure for the prism scheme.
    #[arg(long, env = "OMEGARL_REWARD_STRUCT")]
    reward_struct: Option<String>,
    #[arg(long)]
    save_q: Option<PathBuf>,
    #[arg(long)]
    load_q: Option<PathBuf>,
    /// Per-episode statistics CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct AutArgs {
    #[arg(long, env = "OMEGARL_AUTOMATON")]
    automaton: PathBuf,
    /// Comma-separated minimization passes; all of them by default.
    #[arg(long, value_delimiter = ',')]
    passes: Option<Vec<String>>,
    #[arg(long)]
    hoa_out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Model,
    Automaton,
    Product,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, env = "OMEGARL_MODEL")]
    model: Option<PathBuf>,
    #[arg(long, env = "OMEGARL_AUTOMATON")]
    automaton: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    hoa_out: Option<PathBuf>,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn bad_input(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, err: err.into() }
}

fn internal(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: err.into() }
}

fn product_failure(e: ProductError) -> Failure {
    match e {
        ProductError::Invalid(_) => internal(e),
        _ => bad_input(e),
    }
}

fn check_failure(e: CheckError) -> Failure {
    internal(e)
}

fn rl_failure(e: RlError) -> Failure {
    match e {
        RlError::Product(p) => product_failure(p),
        RlError::Check(c) => check_failure(c),
        RlError::DisabledAction { .. } | RlError::MissingDecision(_) => internal(e),
        _ => bad_input(e),
    }
}

type Run = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = ["error", "warn", "info", "debug", "trace"][cli.verbosity as usize];
    env_logger::Builder::new().parse_filters(level).format_timestamp(None).init();
    let result = match cli.cmd {
        Cmd::Mc(a) => mc(&a),
        Cmd::Learn(a) => learn(&a),
        Cmd::Sldba(a) => sldba(&a),
        Cmd::Certify(a) => certify_cmd(&a),
        Cmd::Export(a) => export(&a),
    };
    match result {
        Ok(summary) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe on stdout is not an error worth reporting
            let _ = match summary {
                Value::Null => Ok(()),
                _ if cli.json => writeln!(out, "{summary}"),
                _ => print_text(&mut out, &summary),
            };
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn print_text(out: &mut impl Write, v: &Value) -> std::io::Result<()> {
    if let Value::Object(map) = v {
        for (k, x) in map {
            match x {
                Value::String(s) => writeln!(out, "{k}: {s}")?,
                Value::Array(items) => {
                    for item in items {
                        writeln!(out, "{k}: {}", item.as_str().map(str::to_string).unwrap_or_else(|| item.to_string()))?;
                    }
                }
                _ => writeln!(out, "{k}: {x}")?,
            }
        }
    }
    Ok(())
}

fn timed<T>(phase: &str, f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    let ms = t.elapsed().as_secs_f64() * 1e3;
    info!("{phase}: {ms:.3} ms");
    (out, ms)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| bad_input(anyhow!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| bad_input(anyhow!("{}: {e}", path.display())))
}

struct Loaded {
    model: Model,
    aut: Automaton,
    product: Product,
    timings: Value,
}

fn load(inputs: &Inputs) -> Result<Loaded, Failure> {
    let (model, t_model) = timed("parse model", || input::read_model(&inputs.model));
    let model = model.map_err(bad_input)?;
    info!("model: {} states, {} actions", model.len(), model.action_count());
    let (aut, t_aut) = timed("parse automaton", || input::read_automaton(&inputs.automaton));
    let aut = aut.map_err(bad_input)?;
    info!("automaton: {} states, {} edges", aut.len(), aut.edge_count());
    let (product, t_prod) = timed("product", || build_product(&model, &aut));
    let product = product.map_err(product_failure)?;
    info!("product: {} states, {} actions", product.len(), product.action_count());
    let timings = json!({ "parse_model_ms": t_model, "parse_automaton_ms": t_aut, "product_ms": t_prod });
    Ok(Loaded { model, aut, product, timings })
}

fn sizes(l: &Loaded) -> Value {
    json!({ "model_states": l.model.len(), "automaton_states": l.aut.len(), "product_states": l.product.len() })
}

fn write_outputs(l: &Loaded, out: &Outputs, max: &omegarl::core::Strategy, min: &omegarl::core::Strategy) -> Result<(), Failure> {
    if let Some(path) = &out.csv {
        csv_out::write_strategy(create(path)?, &l.model, &l.product, &[max, min]).map_err(bad_input)?;
    }
    if let Some(path) = &out.dot {
        let chain = l.product.restrict(&[max, min]).map_err(product_failure)?;
        write_file(path, &dot::induced_dot(&l.model, &chain))?;
    }
    Ok(())
}

fn mc(a: &McArgs) -> Run {
    let l = load(&a.inputs)?;
    let opts = GameOptions { tolerance: a.tolerance, ..GameOptions::default() };
    let (solved, t_solve) = timed("solve", || -> Result<ValueVector, CheckError> {
        if l.model.kind == ModelKind::Smg {
            solve_game_parity(&l.product, &opts)
        } else {
            solve_mdp_parity(&l.product)
        }
    });
    let v = solved.map_err(check_failure)?;
    write_outputs(&l, &a.out, &v.max_strategy, &v.min_strategy)?;
    let mut timings = l.timings.clone();
    timings["solve_ms"] = json!(t_solve);
    Ok(json!({
        "verb": "mc",
        "value": v.values[l.product.initial],
        "sizes": sizes(&l),
        "iterations": v.iterations,
        "timings": timings,
    }))
}

fn hyperparams(a: &LearnArgs) -> Hyperparams {
    Hyperparams {
        alpha: a.alpha,
        gamma: a.gamma,
        gamma_b: a.gamma_b,
        epsilon: a.epsilon,
        anneal: a.anneal,
        zeta: a.zeta,
        lambda: a.lambda,
        episodes: a.episodes,
        max_ep_length: a.max_ep_length,
        seed: a.seed,
        learner: match a.learner {
            Learner::Q => LearnerKind::QLearning,
            Learner::Dq => LearnerKind::DoubleQ,
            Learner::SarsaLambda => LearnerKind::SarsaLambda,
        },
        scheme: match a.scheme {
            Scheme::Prism => SchemeKind::Prism,
            Scheme::ZetaBuchi => SchemeKind::ZetaBuchi,
            Scheme::Naive => SchemeKind::Naive,
            Scheme::MultiDiscount => SchemeKind::MultiDiscount,
            Scheme::Parity => SchemeKind::Parity,
            Scheme::Plugin => SchemeKind::Plugin,
        },
        trace: match a.trace {
            Trace::Replacing => TraceKind::Replacing,
            Trace::Accumulating => TraceKind::Accumulating,
        },
        reward_struct: a.reward_struct.clone(),
    }
}

/// `path` itself for a single replica, `stem-seedN.ext` otherwise.
fn replica_path(path: &Path, seed: u64, replicas: u64) -> PathBuf {
    if replicas == 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-seed{seed}.{ext}"),
        None => format!("{stem}-seed{seed}"),
    };
    path.with_file_name(name)
}

fn learn(a: &LearnArgs) -> Run {
    let l = load(&a.inputs)?;
    let base = hyperparams(a);
    base.validate().map_err(rl_failure)?;
    let (md, ad) = (model_digest(&l.model), automaton_digest(&l.aut));
    let start = match &a.load_q {
        Some(path) => {
            let f = QFile::load(path).map_err(|e| bad_input(e.context(path.display().to_string())))?;
            f.check_digests(&md, &ad).map_err(bad_input)?;
            Some(f.q)
        }
        None => None,
    };
    let seeds: Vec<u64> = (0..a.seeds.max(1)).map(|k| base.seed + k).collect();
    let (runs, t_learn) = timed("learn", || {
        std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .iter()
                .map(|&seed| {
                    let hp = Hyperparams { seed, ..base.clone() };
                    let start = start.clone();
                    let (model, aut) = (&l.model, &l.aut);
                    scope.spawn(move || {
                        let q0 = start.unwrap_or_else(|| QTable::new(hp.learner == LearnerKind::DoubleQ));
                        rl::learn_from(model, aut, &hp, q0).map(|o| (hp, o))
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("learner thread panicked")).collect::<Vec<_>>()
        })
    });
    let mut lines = Vec::new();
    let mut values = Vec::new();
    let mut t_verify = 0.0;
    for (i, run) in runs.into_iter().enumerate() {
        let (hp, outcome) = run.map_err(rl_failure)?;
        let ((max, min), _) = timed("extract", || outcome.q.strategies(&l.product));
        let (value, t) = timed("verify", || rl::verify_strategies(&l.product, &max, &min));
        t_verify += t;
        let value = value.map_err(rl_failure)?;
        let replicas = seeds.len() as u64;
        if let Some(path) = &a.save_q {
            QFile::new(outcome.q.clone(), &hp, &md, &ad).save(&replica_path(path, hp.seed, replicas)).map_err(bad_input)?;
        }
        if let Some(path) = &a.stats {
            csv_out::write_stats(create(&replica_path(path, hp.seed, replicas))?, &outcome.stats).map_err(bad_input)?;
        }
        if i == 0 {
            write_outputs(&l, &a.out, &max, &min)?;
        }
        lines.push(format!("seed {}: verified value {value:.9}", hp.seed));
        values.push(json!({ "seed": hp.seed, "value": value, "states_seen": outcome.q.len() }));
    }
    let mut timings = l.timings.clone();
    timings["learn_ms"] = json!(t_learn);
    timings["verify_ms"] = json!(t_verify);
    Ok(json!({ "verb": "learn", "runs": values, "result": lines, "sizes": sizes(&l), "timings": timings }))
}

fn passes(names: &Option<Vec<String>>) -> Result<Vec<MinimizePass>, Failure> {
    match names {
        None => Ok(MinimizePass::ALL.to_vec()),
        Some(list) => list
            .iter()
            .map(|n| {
                MinimizePass::from_name(n).ok_or_else(|| {
                    let known: Vec<&str> = MinimizePass::ALL.iter().map(|p| p.name()).collect();
                    bad_input(anyhow!("unknown pass {n:?} (known: {})", known.join(", ")))
                })
            })
            .collect(),
    }
}

fn read_nba(path: &Path) -> Result<Automaton, Failure> {
    let nba = input::read_automaton(path).map_err(bad_input)?;
    if !nba.acceptance.is_buchi() {
        return Err(bad_input(anyhow!("{}: the construction needs a Büchi automaton", path.display())));
    }
    Ok(nba)
}

fn sldba(a: &AutArgs) -> Run {
    let nba = read_nba(&a.automaton)?;
    let passes = passes(&a.passes)?;
    let (raw, t_build) = timed("sldba", || nba_to_sldba(&nba));
    let (min, t_min) = timed("minimize", || minimize_sldba(&raw, &passes));
    min.check().map_err(|e| internal(anyhow!("minimized automaton is malformed: {e}")))?;
    if let Some(path) = &a.hoa_out {
        write_file(path, &emit_hoa(&min.aut))?;
    }
    if let Some(path) = &a.dot {
        write_file(path, &dot::automaton_dot(&min.aut))?;
    }
    Ok(json!({
        "verb": "sldba",
        "nba_states": nba.len(),
        "sldba_states": raw.len(),
        "minimized_states": min.len(),
        "minimized_final_states": min.final_count(),
        "timings": { "build_ms": t_build, "minimize_ms": t_min },
    }))
}

fn certify_cmd(a: &AutArgs) -> Run {
    let nba = read_nba(&a.automaton)?;
    let passes = passes(&a.passes)?;
    let ((cert, game), t) = timed("certify", || certify(&nba, &passes));
    let (verdict, aut) = match &cert {
        Certificate::Gfm(aut) => ("gfm", aut),
        Certificate::NotProven(s) => ("not proven", &s.aut),
    };
    if let Some(path) = &a.hoa_out {
        write_file(path, &emit_hoa(aut))?;
    }
    if let Some(path) = &a.dot {
        write_file(path, &dot::simulation_dot(&game))?;
    }
    Ok(json!({ "verb": "certify", "certificate": verdict, "game_nodes": game.game.len(), "timings": { "certify_ms": t } }))
}

fn export(a: &ExportArgs) -> Run {
    let need = |p: &Option<PathBuf>, what: &str| p.clone().ok_or_else(|| bad_input(anyhow!("--{what} is required")));
    let text = match a.what {
        What::Model => dot::model_dot(&input::read_model(&need(&a.model, "model")?).map_err(bad_input)?),
        What::Automaton => {
            let aut = input::read_automaton(&need(&a.automaton, "automaton")?).map_err(bad_input)?;
            if let Some(path) = &a.hoa_out {
                write_file(path, &emit_hoa(&aut))?;
            }
            dot::automaton_dot(&aut)
        }
        What::Product => {
            let l = load(&Inputs { model: need(&a.model, "model")?, automaton: need(&a.automaton, "automaton")? })?;
            dot::product_dot(&l.model, &l.product)
        }
    };
    match &a.dot {
        Some(path) => {
            write_file(path, &text)?;
            Ok(json!({ "verb": "export", "dot": path.display().to_string() }))
        }
        None => {
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(Value::Null)
        }
    }
}
