//! `ncchar`: generate the characteristic-dependent networks, emit and verify
//! codes, search for solutions and apply transforms.
//!
//! Exit codes: 0 success, 1 verification failed, 2 proven impossible,
//! 3 inconclusive search, 64 usage or parse error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};
use serde_json::json;

use ncchar_core::code::{verify, CodeError, FractionalCode, VerificationReport};
use ncchar_core::constructions::{gadget_transform_logged, gen_n1, gen_n2, union_copies, Recipe};
use ncchar_core::network::CodedNetwork;
use ncchar_core::solutions::{check_characteristic, solve_recipe, SolutionError};
use ncchar_core::solver::{search_fractional, SearchConfig, SearchOutcome, DEFAULT_BUDGET};
use ncchar_core::{canonical_json, PrimeModulus};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_IMPOSSIBLE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "ncchar", version, about = "Characteristic-dependent linear network coding toolkit")]
struct Cli {
    /// Print a single JSON document on stdout instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// More logging on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    N1,
    N2,
    Fano,
    Nonfano,
}

#[derive(Subcommand)]
enum Command {
    /// Generate N1(q, n), N2(q, n), Fano or non-Fano.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Take the union of this many copies.
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the explicit code for a generated network at characteristic p.
    Solve {
        network: PathBuf,
        #[arg(long, required_unless_present = "symbolic")]
        p: Option<u64>,
        /// Emit the characteristic-free symbolic code instead.
        #[arg(long, conflicts_with = "p")]
        symbolic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a code against a network, terminal by terminal.
    Verify { network: PathBuf, code: PathBuf },
    /// Exhaustive search for a (k, n) linear solution over GF(p).
    Search {
        network: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, env = "NCCHAR_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Where to write the witness code, if one is found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Make a network multiple-unicast by attaching gadgets.
    Gadget {
        network: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union of k copies with sources and terminals merged.
    Union {
        network: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a network.
    Info {
        network: PathBuf,
        /// Print Graphviz DOT instead.
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Impossible(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Impossible(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(match failure {
                Failure::Usage(_) => EXIT_USAGE,
                Failure::Impossible(_) => EXIT_IMPOSSIBLE,
            })
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Gen { family, q, n, copies, out } => cmd_gen(cli, *family, *q, *n, *copies, out.as_deref()),
        Command::Solve { network, p, symbolic, out } => cmd_solve(cli, network, *p, *symbolic, out.as_deref()),
        Command::Verify { network, code } => cmd_verify(cli, network, code),
        Command::Search {
            network,
            p,
            k,
            n,
            budget,
            workers,
            out,
        } => {
            let cfg = SearchConfig {
                node_budget: *budget,
                enable_fractional: (*k, *n) != (1, 1),
                k: *k,
                n: *n,
                worker_count: *workers,
            };
            cmd_search(cli, network, *p, &cfg, out.as_deref())
        }
        Command::Gadget { network, n, out } => cmd_gadget(cli, network, *n, out.as_deref()),
        Command::Union { network, k, out } => cmd_union(cli, network, *k, out.as_deref()),
        Command::Info { network, dot } => cmd_info(cli, network, *dot),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<CodedNetwork, Failure> {
    CodedNetwork::load(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn modulus(p: u64) -> Result<PrimeModulus, Failure> {
    PrimeModulus::new(p).map_err(usage)
}

/// Writes `doc` to `out`, or to stdout when no path is given. Returns
/// whether stdout is still free for a summary.
fn emit(doc: &str, out: Option<&Path>) -> Result<bool, Failure> {
    match out {
        Some(path) => {
            fs::write(path, doc).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            info!("wrote {}", path.display());
            Ok(true)
        }
        None => {
            print!("{doc}");
            Ok(false)
        }
    }
}

fn print_json(v: &serde_json::Value) {
    print!("{}", canonical_json(v));
}

fn cmd_gen(cli: &Cli, family: Family, q: usize, n: usize, copies: usize, out: Option<&Path>) -> CmdResult {
    let base = match family {
        Family::N1 => gen_n1(q, n),
        Family::N2 => gen_n2(q, n),
        Family::Fano => gen_n1(2, 1),
        Family::Nonfano => gen_n2(2, 1),
    }
    .map_err(usage)?;
    let net = if copies == 1 { base } else { union_copies(&base, copies).map_err(usage)? };
    if emit(&net.save(), out)? {
        summarize_network(cli, &net);
    }
    Ok(0)
}

fn summarize_network(cli: &Cli, net: &CodedNetwork) {
    if cli.json {
        print_json(&network_summary(net));
    } else {
        println!(
            "{}: {} nodes ({} sources, {} terminals), {} edges, {} messages",
            net.name(),
            net.nodes().len(),
            net.sources().count(),
            net.terminals().count(),
            net.edges().len(),
            net.messages().len()
        );
    }
}

fn network_summary(net: &CodedNetwork) -> serde_json::Value {
    let unicast = net.multiple_unicast_check();
    let violations: Vec<String> = net.validate().violations.iter().map(ToString::to_string).collect();
    json!({
        "name": net.name(),
        "nodes": net.nodes().len(),
        "sources": net.sources().count(),
        "terminals": net.terminals().count(),
        "edges": net.edges().len(),
        "messages": net.messages().len(),
        "valid": violations.is_empty(),
        "violations": violations,
        "multiple_unicast": unicast.is_multiple_unicast,
        "unicast_violations": unicast.violations.iter().map(|v| json!({
            "message": v.message.as_str(),
            "generators": v.generators,
            "demanders": v.demanders,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_solve(cli: &Cli, path: &Path, p: Option<u64>, symbolic: bool, out: Option<&Path>) -> CmdResult {
    let net = load_network(path)?;
    let recipe: Recipe = net
        .name()
        .parse()
        .map_err(|_| usage(format!("network {:?} is not a recognized generated family", net.name())))?;
    let rebuilt = recipe.build().map_err(usage)?;
    if rebuilt != net {
        return Err(usage(format!("network does not match the construction named {:?}", net.name())));
    }
    let sym = solve_recipe(&recipe).map_err(usage)?;
    let doc = match p {
        Some(p) if !symbolic => {
            let p = modulus(p)?;
            check_characteristic(recipe.family, recipe.q, p).map_err(|e| Failure::Impossible(e.to_string()))?;
            let code = sym.instantiate(p).map_err(|e| match e {
                CodeError::QNotInvertible { .. } => Failure::Impossible(SolutionError::from(e).to_string()),
                other => usage(other),
            })?;
            code.save()
        }
        _ => sym.save(),
    };
    if emit(&doc, out)? {
        if cli.json {
            print_json(&json!({ "network": net.name(), "k": sym.k, "n": sym.n, "p": p, "symbolic": symbolic }));
        } else {
            println!("wrote ({},{}) code for {}", sym.k, sym.n, net.name());
        }
    }
    Ok(0)
}

fn print_report(report: &VerificationReport) {
    println!("{:<24} {:<12} {:<6} interfering", "terminal", "demands", "status");
    for t in &report.terminals {
        let interfering: Vec<&str> = t.interference.keys().map(|m| m.as_str()).collect();
        println!(
            "{:<24} {:<12} {:<6} {}",
            t.terminal,
            t.demands.as_str(),
            if t.pass { "ok" } else { "FAIL" },
            interfering.join(",")
        );
    }
    let failing = report.failing().count();
    println!("{} of {} terminals decode", report.terminals.len() - failing, report.terminals.len());
}

fn cmd_verify(cli: &Cli, net_path: &Path, code_path: &Path) -> CmdResult {
    let net = load_network(net_path)?;
    let code = FractionalCode::load(&read(code_path)?, &net).map_err(|e| usage(format!("{}: {e}", code_path.display())))?;
    let report = verify(&net, &code).map_err(usage)?;
    if cli.json {
        print_json(&report.to_json());
    } else {
        print_report(&report);
    }
    Ok(if report.pass { 0 } else { EXIT_VERIFY_FAILED })
}

fn cmd_search(cli: &Cli, path: &Path, p: u64, cfg: &SearchConfig, out: Option<&Path>) -> CmdResult {
    let net = load_network(path)?;
    let p = modulus(p)?;
    let outcome = search_fractional(&net, cfg.k, cfg.n, p, cfg).map_err(usage)?;
    if let (Some(code), Some(path)) = (outcome.code(), out) {
        emit(&code.save(), Some(path))?;
    }
    if cli.json {
        print_json(&outcome.to_json());
    } else {
        println!(
            "{}: ({},{}) over GF({}) is {} ({} states)",
            net.name(),
            cfg.k,
            cfg.n,
            p.get(),
            outcome.label(),
            outcome.states_explored()
        );
    }
    Ok(match outcome {
        SearchOutcome::Solvable { .. } => 0,
        SearchOutcome::ExhaustedUnsolvable { .. } => EXIT_IMPOSSIBLE,
        SearchOutcome::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    })
}

fn cmd_gadget(cli: &Cli, path: &Path, n: usize, out: Option<&Path>) -> CmdResult {
    let net = load_network(path)?;
    let (result, log) = gadget_transform_logged(&net, n).map_err(usage)?;
    let summary_free = emit(&result.save(), out)?;
    if summary_free {
        if cli.json {
            print_json(&json!({
                "applications": log.len(),
                "multiple_unicast": result.is_multiple_unicast(),
                "name": result.name(),
            }));
        } else {
            println!("{} gadget application(s); multiple-unicast: {}", log.len(), result.is_multiple_unicast());
        }
    } else {
        info!("{} gadget application(s)", log.len());
    }
    Ok(0)
}

fn cmd_union(cli: &Cli, path: &Path, k: usize, out: Option<&Path>) -> CmdResult {
    let net = load_network(path)?;
    let result = union_copies(&net, k).map_err(usage)?;
    if emit(&result.save(), out)? {
        summarize_network(cli, &result);
    }
    Ok(0)
}

fn cmd_info(cli: &Cli, path: &Path, dot: bool) -> CmdResult {
    let net = load_network(path)?;
    if dot {
        print!("{}", net.to_dot());
        return Ok(0);
    }
    let summary = network_summary(&net);
    if cli.json {
        print_json(&summary);
        return Ok(0);
    }
    summarize_network(cli, &net);
    println!("valid: {}", summary["valid"]);
    for v in net.validate().violations {
        println!("  violation: {v}");
    }
    let unicast = net.multiple_unicast_check();
    println!("multiple-unicast: {}", unicast.is_multiple_unicast);
    for v in &unicast.violations {
        println!("  {}: {} generator(s), {} demander(s)", v.message, v.generators, v.demanders);
    }
    Ok(0)
}
