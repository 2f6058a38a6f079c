use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use prooftutor::kernel::RuleId;
use prooftutor::present::{export_proof, ExportFormat};
use prooftutor::search::{prove, simplify, CancelToken, ProverConfig, SimplifyOptions};

use crate::api::{router, AppState};
use crate::library::Library;
use crate::store::ProofStore;
use crate::tasks::TaskManager;

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_NOT_PROVED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "prooftutor", version, about = "Natural-style first-order prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prove one goal and write the proof.
    Prove(ProveArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ProveArgs {
    /// Document to load; repeatable. Without any, the bundled examples are used.
    #[arg(long = "doc", value_name = "PATH")]
    docs: Vec<PathBuf>,
    /// Goal as ENV.LABEL.
    #[arg(long, value_name = "ENV.LABEL")]
    goal: String,
    /// `auto` for every other formula of the goal's document, or a comma-separated list of ENV.LABEL.
    #[arg(long, default_value = "auto", value_name = "auto|ENV.LABEL,...")]
    kb: String,
    /// Prover config file to start from.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Switch a rule on or off, or set its priority; repeatable.
    #[arg(long = "rule", value_name = "ID=on|off|PRIORITY")]
    rules: Vec<String>,
    /// Depth limit in situation nodes.
    #[arg(long, value_name = "N")]
    depth: Option<u32>,
    /// Time limit in milliseconds.
    #[arg(long, value_name = "MS")]
    timeout: Option<u64>,
    /// Write the simplified proof instead of the whole search tree (JSON only; text and HTML always show the proof).
    #[arg(long)]
    simplify: bool,
    #[arg(long, default_value = "text", value_name = "text|html|json")]
    format: ExportFormat,
    /// Output file; standard output when omitted.
    #[arg(short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Document to serve; repeatable. Without any, the bundled examples are served.
    #[arg(long = "doc", value_name = "PATH")]
    docs: Vec<PathBuf>,
    #[arg(long, env = "PROOFTUTOR_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Directory of the proof store.
    #[arg(long, env = "PROOFTUTOR_DATA", default_value = "prooftutor-data")]
    data: PathBuf,
    #[arg(long, env = "PROOFTUTOR_WORKERS", default_value_t = 2)]
    workers: usize,
}

/// Runs the command line and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Prove(args) => run_prove(args, out, err),
        Command::Serve(args) => run_serve(args, err),
    };
    outcome.unwrap_or_else(|message| {
        let _ = writeln!(err, "error: {message}");
        EXIT_USAGE
    })
}

fn library(docs: &[PathBuf]) -> Result<Library, String> {
    if docs.is_empty() {
        Ok(Library::bundled())
    } else {
        Library::load(docs).map_err(|e| e.to_string())
    }
}

fn apply_rule(config: ProverConfig, setting: &str) -> Result<ProverConfig, String> {
    let (id, value) = setting.split_once('=').ok_or_else(|| format!("--rule {setting}: expected ID=on|off|PRIORITY"))?;
    let rule: RuleId = id.parse().map_err(|e| format!("--rule {setting}: {e}"))?;
    match value {
        "on" => Ok(config.with_rule(rule, true)),
        "off" => Ok(config.with_rule(rule, false)),
        n => match n.parse::<u32>() {
            Ok(p) if p >= 1 => Ok(config.with_priority(rule, p)),
            _ => Err(format!("--rule {setting}: expected on, off or a priority of at least 1")),
        },
    }
}

fn run_prove(args: ProveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let lib = library(&args.docs)?;
    let preferred = lib.documents().first().map(|d| d.id.clone());
    let goal = lib.find_label(&args.goal, preferred.as_deref()).map_err(|e| e.to_string())?;
    let selection: BTreeSet<_> = if args.kb == "auto" {
        lib.auto_selection(&goal)
    } else {
        args.kb
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|label| lib.find_label(label, Some(&goal.document)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?
    };
    let prepared = lib.prepare(&goal, &selection).map_err(|e| e.to_string())?;

    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ProverConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ProverConfig::default(),
    };
    for setting in &args.rules {
        config = apply_rule(config, setting)?;
    }
    if let Some(d) = args.depth {
        config = config.with_depth_limit(d);
    }
    if let Some(t) = args.timeout {
        config = config.with_time_limit_ms(t);
    }
    config.validate().map_err(|e| e.to_string())?;

    let result = prove(&prepared.goal, &prepared.kb, &config, &CancelToken::new());
    let proved = result.is_proved();
    let shown = if proved && (args.simplify || args.format != ExportFormat::Json) {
        simplify(&result.tree, SimplifyOptions::default()).map_err(|e| e.to_string())?
    } else {
        result.tree.clone()
    };
    let bytes = if proved || args.format == ExportFormat::Json {
        export_proof(&shown, &prepared.kb, args.format).map_err(|e| e.to_string())?
    } else {
        let line = format!("No proof of {} ({:?}).\n", prepared.goal, result.outcome);
        match args.format {
            ExportFormat::Html => format!("<article class=\"proof failed\"><p>{}</p></article>\n", line.trim_end().replace('<', "&lt;").replace('>', "&gt;")).into_bytes(),
            _ => line.into_bytes(),
        }
    };
    match &args.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display()))?,
        None => out.write_all(&bytes).map_err(|e| e.to_string())?,
    }
    let _ = writeln!(
        err,
        "{:?}: {} nodes, {} expanded, {} ms",
        result.outcome,
        result.tree.len(),
        result.stats.nodes_expanded,
        result.stats.elapsed_ms
    );
    Ok(if proved { EXIT_PROVED } else { EXIT_NOT_PROVED })
}

fn run_serve(args: ServeArgs, err: &mut dyn Write) -> Result<i32, String> {
    let lib = library(&args.docs)?;
    let store = ProofStore::open(&args.data).map_err(|e| format!("{}: {e}", args.data.display()))?;
    let state = AppState { library: Arc::new(lib), tasks: Arc::new(TaskManager::new(Arc::new(store), args.workers)) };
    let addr: SocketAddr = format!("{}:{}", args.host, args.port).parse().map_err(|e| format!("address: {e}"))?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| e.to_string())?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("{addr}: {e}"))?;
        let _ = writeln!(err, "listening on http://{addr} (data in {}, {} workers)", args.data.display(), args.workers.max(1));
        axum::serve(listener, router(state)).await.map_err(|e| e.to_string())
    })?;
    Ok(0)
}
