use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use repairqa::analysis::analyze;
use repairqa::bridge::{BridgeError, SolverConfig};
use repairqa::engine::{Backend, EngineConfig, EngineError};
use repairqa::model::{Database, ModelError, PreferenceKind};
use repairqa::query::{certain_answer, AnswerConfig, QueryError};
use repairqa::repair::{SearchConfig, SearchError, Searcher};
use repairqa::synth::{bench_instance, BenchParams};
use repairqa::syntax::{output, parse_database, parse_program, parse_query, ParseError, ProgramDocument};

#[derive(Parser)]
#[command(name = "repairqa", version, about = "Query answering over inconsistent existential rules via preferred rule repairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report reliance edges and the rule-set classes.
    Analyze {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print every preferred repair with a witness model.
    Repairs {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
    },
    /// Decide whether a query holds in all preferred repairs.
    Query {
        #[command(flatten)]
        input: Input,
        /// The query text, e.g. "? Bird(x), not Cave(x)".
        #[arg(long, conflicts_with = "query_file")]
        query: Option<String>,
        #[arg(long)]
        query_file: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Time repair search on generated instances.
    Bench {
        /// Fact counts, one instance family per value.
        #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 10000])]
        facts: Vec<usize>,
        /// Unreliable rule counts.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 3])]
        unreliable: Vec<usize>,
        #[arg(long, default_value_t = 120)]
        reliable: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long = "prefs", value_delimiter = ',', default_values_t = [PreferenceKind::PrioSubset, PreferenceKind::PrioCardinality, PreferenceKind::Weight, PreferenceKind::Subset])]
        prefs: Vec<PreferenceKind>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "subset")]
    pref: PreferenceKind,
}

#[derive(Args)]
struct Opts {
    #[arg(long, value_enum, default_value_t = BackendArg::Native)]
    backend: BackendArg,
    /// Solver executable for the external backend.
    #[arg(long, default_value = "clingo")]
    solver: PathBuf,
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_atoms: usize,
    #[arg(long, default_value_t = 20)]
    max_neg_branch: usize,
    /// Concurrent consistency checks; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Most deletable rules a subset search accepts.
    #[arg(long, default_value_t = 24)]
    max_rules: usize,
    /// Wall-clock budget in seconds for repair search and each solver call.
    #[arg(long)]
    timeout: Option<f64>,
    /// Fail instead of warning when a class check fails.
    #[arg(long)]
    strict_classes: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Native,
    External,
}

impl Opts {
    fn search_config(&self) -> SearchConfig {
        let budget = self.timeout.map(Duration::from_secs_f64);
        let backend = match self.backend {
            BackendArg::Native => Backend::Native,
            BackendArg::External => {
                let mut s = SolverConfig::new(&self.solver);
                if let Some(b) = budget {
                    s.timeout = b;
                }
                Backend::External(s)
            }
        };
        let engine = EngineConfig {
            max_skolem_depth: self.max_depth,
            max_ground_atoms: self.max_atoms,
            max_neg_branch: self.max_neg_branch,
            backend,
            ..EngineConfig::default()
        };
        SearchConfig { engine, max_rules: self.max_rules, jobs: self.jobs, time_budget: budget, ..SearchConfig::default() }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_rules(path: &Path) -> Result<ProgramDocument> {
    parse_program(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_data(path: &Path) -> Result<Database> {
    parse_database(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { rules, format, jobs } => {
            let doc = load_rules(&rules)?;
            let report = analyze(&doc.rules, jobs);
            match format {
                Format::Json => println!("{}", output::report_json(&report)),
                Format::Text => print!("{}", output::report_text(&report)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Repairs { input, opts } => {
            let doc = load_rules(&input.rules)?;
            let db = load_data(&input.data)?;
            let pref = doc.preference(input.pref)?;
            let report = analyze(&doc.rules, opts.jobs);
            if !report.r_acyclic {
                let msg = "rule set is not R-acyclic: termination is not guaranteed";
                anyhow::ensure!(!opts.strict_classes, QueryError::ClassViolation(msg.into()));
                log::warn!("{msg}");
            }
            let rs = repairqa::repair::preferred_repairs(&db, &doc.rules, &pref, &opts.search_config())?;
            match opts.format {
                Format::Json => print!("{}", output::repairs_jsonl(&rs)),
                Format::Text => print!("{}", output::repairs_text(&rs)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Query { input, query, query_file, opts } => {
            let text = match (query, query_file) {
                (Some(q), _) => q,
                (None, Some(f)) => read(&f)?,
                (None, None) => anyhow::bail!(Usage("one of --query or --query-file is required".into())),
            };
            let doc = load_rules(&input.rules)?;
            let db = load_data(&input.data)?;
            let q = parse_query(&text).context("in the query")?;
            let pref = doc.preference(input.pref)?;
            let cfg = AnswerConfig { search: opts.search_config(), strict_classes: opts.strict_classes };
            let verdict = certain_answer(&db, &doc.rules, &pref, &q, &cfg)?;
            match opts.format {
                Format::Json => println!("{}", output::verdict_json(&verdict)),
                Format::Text => print!("{}", output::verdict_text(&verdict)),
            }
            Ok(if verdict.entailed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { facts, unreliable, reliable, seed, prefs, opts } => {
            bench(&facts, &unreliable, reliable, seed, &prefs, &opts)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bench(facts: &[usize], unreliable: &[usize], reliable: usize, seed: u64, prefs: &[PreferenceKind], opts: &Opts) -> Result<()> {
    let cfg = opts.search_config();
    let mut rows = Vec::new();
    if opts.format == Format::Text {
        println!("{:<12} {:<12} {:>8} {:>8} {:>10}  status", "instance", "preference", "repairs", "checks", "seconds");
    }
    for &f in facts {
        for &u in unreliable {
            let inst = bench_instance(&BenchParams { facts: f, reliable, unreliable: u, seed })?;
            let start = Instant::now();
            let engine = repairqa::engine::Engine::new(inst.db.clone(), inst.rules.clone(), cfg.engine.clone());
            let setup = start.elapsed().as_secs_f64();
            for &kind in prefs {
                let searcher = Searcher::new(&engine, cfg.clone());
                let start = Instant::now();
                let result = searcher.repairs(&inst.preference(kind));
                let secs = start.elapsed().as_secs_f64();
                let (n, status) = match &result {
                    Ok(rs) => (Some(rs.len()), "ok".to_string()),
                    Err(SearchError::Timeout(_)) => (None, "timeout".to_string()),
                    Err(e) => (None, e.to_string()),
                };
                if opts.format == Format::Text {
                    let n = n.map_or("-".to_string(), |n| n.to_string());
                    println!("{:<12} {:<12} {:>8} {:>8} {:>10.3}  {status}", inst.name, kind.name(), n, searcher.checks(), secs);
                }
                rows.push(json!({
                    "instance": inst.name,
                    "preference": kind.name(),
                    "facts": inst.db.len(),
                    "rules": inst.rules.len(),
                    "grounding_seconds": setup,
                    "repairs": n,
                    "checks": searcher.checks(),
                    "seconds": secs,
                    "status": status,
                }));
            }
        }
    }
    if opts.format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    }
    Ok(())
}

/// Bad combination of arguments that clap cannot express.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A stable name for the failure class of `err`.
fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if cause.downcast_ref::<ParseError>().is_some() {
            return "parse";
        }
        if cause.downcast_ref::<Usage>().is_some() {
            return "usage";
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "io";
        }
        if let Some(e) = cause.downcast_ref::<QueryError>() {
            return query_kind(e);
        }
        if let Some(e) = cause.downcast_ref::<SearchError>() {
            return search_kind(e);
        }
        if let Some(e) = cause.downcast_ref::<EngineError>() {
            return engine_kind(e);
        }
        if let Some(b) = cause.downcast_ref::<BridgeError>() {
            return bridge_kind(b);
        }
        if cause.downcast_ref::<ModelError>().is_some() {
            return "invalid-input";
        }
    }
    "error"
}

// the library's wrapper variants are transparent, so they are unwrapped here
// rather than found on the cause chain
fn query_kind(e: &QueryError) -> &'static str {
    match e {
        QueryError::Unsafe(_) => "unsafe-query",
        QueryError::ClassViolation(_) => "class-violation",
        QueryError::Search(s) => search_kind(s),
        QueryError::Engine(e) => engine_kind(e),
    }
}

fn search_kind(e: &SearchError) -> &'static str {
    match e {
        SearchError::Timeout(_) => "timeout",
        SearchError::TooManyRules { .. } => "too-many-rules",
        SearchError::Preference(_) => "invalid-input",
        SearchError::Engine(e) => engine_kind(e),
    }
}

fn engine_kind(e: &EngineError) -> &'static str {
    match e {
        EngineError::DepthLimitExceeded { .. } => "depth-limit",
        EngineError::AtomCapExceeded(_) => "atom-cap",
        EngineError::NegBranchExceeded { .. } => "neg-branch-limit",
        EngineError::NotStratified => "not-stratified",
        EngineError::Bridge(b) => bridge_kind(b),
    }
}

fn bridge_kind(b: &BridgeError) -> &'static str {
    match b {
        BridgeError::Spawn(_) => "spawn",
        BridgeError::Timeout { .. } => "timeout",
        BridgeError::Collision { .. } => "name-collision",
        BridgeError::Parse(_) => "solver-output",
        BridgeError::Io(_) => "io",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("{}", json!({"error": {"kind": "usage", "message": msg.trim()}}));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let causes: Vec<String> = e.chain().map(ToString::to_string).collect();
            eprintln!("{}", json!({"error": {"kind": error_kind(&e), "message": causes.join(": ")}}));
            ExitCode::from(2)
        }
    }
}
