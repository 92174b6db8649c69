//! Command-line surface of the toolkit.
//!
//! [`run`] executes a parsed command on a worker pool of the requested size
//! and returns a [`Report`]. The JSON form is byte-stable: object keys are
//! sorted and nothing in it depends on the worker count.

pub mod args;
pub mod commands;
pub mod error;
pub mod fetch;
pub mod input;
pub mod table;

use iwasawa_core::lfunction::BranchConfig;
use serde_json::{json, Value};

pub use args::Cli;
pub use error::CliError;

use args::Command;
use fetch::Fetcher;

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub table: String,
    /// Fully certified; the process exits 0 only when set.
    pub ok: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let v = json!({
            "schema": input::SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "result": self.result,
            "ok": self.ok,
        });
        serde_json::to_string_pretty(&v).expect("values serialize")
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            error::EXIT_UNCERTIFIED
        }
    }
}

pub fn error_json(e: &CliError) -> String {
    let v = json!({
        "schema": input::SCHEMA_VERSION,
        "error": { "kind": e.kind(), "message": e.to_string() },
        "ok": false,
    });
    serde_json::to_string_pretty(&v).expect("values serialize")
}

fn branch_config(cli: &Cli) -> Result<BranchConfig, CliError> {
    let g = &cli.global;
    if g.precision_level == 0 || g.precision_mod == 0 || g.degree_cap == 0 {
        return Err(CliError::Usage("precision level, precision and degree cap must be positive".into()));
    }
    let d = BranchConfig::default();
    Ok(BranchConfig {
        level: g.precision_level,
        precision: g.precision_mod,
        degree_cap: g.degree_cap,
        max_level: d.max_level.max(g.precision_level),
        max_precision: d.max_precision.max(g.precision_mod),
    })
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Irregular { .. } => "irregular",
        Command::Scan { .. } => "scan",
        Command::Kida { .. } => "kida",
        Command::Rank(_) => "rank",
        Command::Selmer(_) => "selmer",
        Command::Lab(_) => "lab",
        Command::Growth(_) => "growth",
    }
}

fn dispatch(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let config = branch_config(cli)?;
    match &cli.command {
        Command::Irregular { p } => commands::irregular(*p),
        Command::Scan { max } => commands::scan(*max, &config),
        Command::Kida { input } => commands::kida(input),
        Command::Rank(a) => commands::rank(a, &config),
        Command::Selmer(a) => {
            let fetcher = Fetcher::new(cli.global.network, cli.global.cache_dir.clone());
            commands::selmer(a, &fetcher)
        }
        Command::Lab(a) => commands::lab(a, cli.global.seed),
        Command::Growth(a) => commands::growth(a),
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let out = pool.install(|| dispatch(cli))?;
    let config = json!({ "global": cli.global, "command": cli.command });
    Ok(Report { command: name(&cli.command), config, result: out.result, table: out.table.to_string(), ok: out.ok })
}
