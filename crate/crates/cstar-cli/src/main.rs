//! `cstar`: finite-dimensional operator-algebra toolbox.
//!
//! Every subcommand prints one JSON report to stdout and exits with 0 when
//! all checks pass, 1 when a check fails, and 2 when the run errors before
//! checks can be evaluated (unreadable file, malformed spec, inapplicable
//! command). Output is byte-identical across runs for fixed inputs, flags,
//! and seed.

mod commands;
mod report;
mod spec;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cstar::mat::Tol;
use cstar::trees::InputSequence;
use serde_json::{json, Value};

use commands::{CmdResult, Ctx};
use report::Report;

#[derive(Parser)]
#[command(name = "cstar", version, about = "Finite-dimensional operator-algebra toolbox")]
struct Cli {
    /// Numerical tolerance for rank decisions and comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Seed for every randomized internal; reports are deterministic per seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Node-depth budget for tree exploration.
    #[arg(long, global = true, default_value_t = 64)]
    depth_budget: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum and spectral radius of each generator of an algebra file.
    Spectrum { spec: PathBuf },
    /// Joint spectrum of the generator family of an algebra file.
    Jspec { spec: PathBuf },
    /// Functional calculus on the first generator of an algebra file.
    Calculus { spec: PathBuf },
    /// Norm-attaining states, a faithful state, and its extreme decomposition.
    States { spec: PathBuf },
    /// GNS representation of a faithful state of an algebra file.
    Gns { spec: PathBuf },
    /// Characters of a commutative algebra file.
    Gelfand { spec: PathBuf },
    /// Projection rounding over the basis and an eigenvector flag.
    Projections { spec: PathBuf },
    /// Exact truncation checks at a level.
    Russell {
        /// Truncation level (number of independent blocks).
        #[arg(long, default_value_t = 3)]
        level: usize,
    },
    /// Ranks, well-foundedness, and branch search on listed trees.
    Trees {
        #[command(subcommand)]
        action: TreesAction,
    },
    /// Structure, faithful state, GNS, and representability of an algebra file.
    Certify { spec: PathBuf },
}

#[derive(Subcommand)]
enum TreesAction {
    /// Rank every node of a tree file.
    Rank { file: PathBuf },
    /// Well-foundedness verdict for a tree file under the depth budget.
    Wellfounded { file: PathBuf },
    /// Branch search through the section of a pair-labeled tree file.
    Member {
        file: PathBuf,
        /// Comma-separated prefix of the input sequence.
        #[arg(long, default_value = "")]
        x: String,
        /// Constant tail after the prefix; omit for a finite sequence.
        #[arg(long)]
        x_tail: Option<u64>,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum { .. } => "spectrum",
        Command::Jspec { .. } => "jspec",
        Command::Calculus { .. } => "calculus",
        Command::States { .. } => "states",
        Command::Gns { .. } => "gns",
        Command::Gelfand { .. } => "gelfand",
        Command::Projections { .. } => "projections",
        Command::Russell { .. } => "russell",
        Command::Trees { action } => match action {
            TreesAction::Rank { .. } => "trees-rank",
            TreesAction::Wellfounded { .. } => "trees-wellfounded",
            TreesAction::Member { .. } => "trees-member",
        },
        Command::Certify { .. } => "certify",
    }
}

fn command_input(c: &Command) -> Option<&PathBuf> {
    match c {
        Command::Spectrum { spec }
        | Command::Jspec { spec }
        | Command::Calculus { spec }
        | Command::States { spec }
        | Command::Gns { spec }
        | Command::Gelfand { spec }
        | Command::Projections { spec }
        | Command::Certify { spec } => Some(spec),
        Command::Russell { .. } => None,
        Command::Trees { action } => match action {
            TreesAction::Rank { file }
            | TreesAction::Wellfounded { file }
            | TreesAction::Member { file, .. } => Some(file),
        },
    }
}

fn command_flags(cli: &Cli) -> Value {
    let mut flags = json!({"depth_budget": cli.depth_budget});
    match &cli.command {
        Command::Russell { level } => {
            flags["level"] = json!(level);
        }
        Command::Trees { action: TreesAction::Member { x, x_tail, .. } } => {
            flags["x"] = json!(x);
            flags["x_tail"] = json!(x_tail);
        }
        _ => {}
    }
    flags
}

fn parse_spec(input: &[u8]) -> Result<spec::ParsedSpec, String> {
    let text = std::str::from_utf8(input).map_err(|e| format!("spec is not UTF-8: {e}"))?;
    spec::parse_algebra_spec(text).map_err(|e| e.to_string())
}

fn parse_prefix(x: &str) -> Result<Vec<u64>, String> {
    let s = x.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad input-sequence entry {p:?}: {e}"))
        })
        .collect()
}

fn dispatch(cmd: &Command, input: &[u8], ctx: &Ctx) -> CmdResult {
    match cmd {
        Command::Spectrum { .. } => commands::spectrum_cmd(&parse_spec(input)?, ctx),
        Command::Jspec { .. } => commands::jspec_cmd(&parse_spec(input)?, ctx),
        Command::Calculus { .. } => commands::calculus_cmd(&parse_spec(input)?, ctx),
        Command::States { .. } => commands::states_cmd(&parse_spec(input)?, ctx),
        Command::Gns { .. } => commands::gns_cmd(&parse_spec(input)?, ctx),
        Command::Gelfand { .. } => commands::gelfand_cmd(&parse_spec(input)?, ctx),
        Command::Projections { .. } => commands::projections_cmd(&parse_spec(input)?, ctx),
        Command::Russell { level } => commands::russell_cmd(*level, ctx),
        Command::Trees { action } => {
            let text =
                std::str::from_utf8(input).map_err(|e| format!("tree file is not UTF-8: {e}"))?;
            match action {
                TreesAction::Rank { .. } => commands::trees_rank_cmd(text, ctx),
                TreesAction::Wellfounded { .. } => commands::trees_wellfounded_cmd(text, ctx),
                TreesAction::Member { x, x_tail, .. } => {
                    let prefix = parse_prefix(x)?;
                    let seq = match x_tail {
                        Some(t) => InputSequence::eventually(prefix, *t),
                        None => InputSequence::finite(prefix),
                    };
                    commands::trees_member_cmd(text, &seq, ctx)
                }
            }
        }
        Command::Certify { .. } => commands::certify_cmd(&parse_spec(input)?, ctx),
    }
}

fn error_report(name: &str, digest: String, cli: &Cli, flags: Value, msg: String) -> Report {
    Report {
        command: name.into(),
        inputs_digest: digest,
        tol: cli.tol,
        seed: cli.seed,
        flags,
        results: Value::Null,
        checks: vec![],
        pass: false,
        error: Some(msg),
    }
}

fn run(cli: &Cli) -> Report {
    let name = command_name(&cli.command);
    let flags = command_flags(cli);
    let flag_line = format!(
        "tol={:e};seed={};depth_budget={};flags={flags}",
        cli.tol, cli.seed, cli.depth_budget
    );
    let input = match command_input(&cli.command) {
        Some(path) => match fs::read(path) {
            Ok(bytes) => bytes,
            Err(e) => {
                let digest = report::digest(name, &flag_line, &[]);
                return error_report(
                    name,
                    digest,
                    cli,
                    flags,
                    format!("cannot read {}: {e}", path.display()),
                );
            }
        },
        None => Vec::new(),
    };
    let digest = report::digest(name, &flag_line, &input);
    let tol = match Tol::new(cli.tol) {
        Ok(t) => t,
        Err(e) => return error_report(name, digest, cli, flags, e.to_string()),
    };
    let ctx = Ctx { tol, seed: cli.seed, depth_budget: cli.depth_budget };
    match dispatch(&cli.command, &input, &ctx) {
        Ok((results, checks)) => {
            let pass = checks.all_pass();
            Report {
                command: name.into(),
                inputs_digest: digest,
                tol: cli.tol,
                seed: cli.seed,
                flags,
                results,
                checks: checks.0,
                pass,
                error: None,
            }
        }
        Err(msg) => error_report(name, digest, cli, flags, msg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli);
    print!("{}", report.render());
    ExitCode::from(report.exit_code() as u8)
}
