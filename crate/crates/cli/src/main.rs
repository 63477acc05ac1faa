//! `rainbow` — solve, verify, brute-force, generate, and benchmark rainbow
//! transversal instances.
//!
//! Exit codes: 0 found/valid, 1 not-found/invalid, 2 usage or input error,
//! 3 internal invariant violation (the offending state is dumped to stderr
//! as an rgc + state bundle for replay).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rainbow_core::batch::{run_trials, TrialSpec};
use rainbow_core::collection::{GraphCollection, Problem};
use rainbow_core::formats::{self, Certificate};
use rainbow_core::gen::{GenKind, GenSpec};
use rainbow_core::{hamilton, matching, oracle, Error};

const EXIT_FOUND: u8 = 0;
const EXIT_NOT_FOUND: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "rainbow", version, about = "Rainbow transversals over graph collections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file
    Gen(GenArgs),
    /// Solve an instance and write a certificate
    Solve(SolveArgs),
    /// Check a certificate against an instance
    Verify(SolveArgs),
    /// Exhaustive search (small instances only)
    Brute(BruteArgs),
    /// Seeded trial matrix with per-trial records and a CSV report
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// random-dirac | disjoint-cycles | two-cliques | matching-tight | random
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Graph count (kind random), family size (matching-tight, disjoint-cycles)
    #[arg(long)]
    s: Option<usize>,
    /// Edge probability (kind random)
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Shapes s for random-dirac and two-cliques (default hamilton)
    #[arg(long)]
    problem: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// hamilton | matching
    #[arg(long)]
    problem: String,
    /// Instance file (rgc format)
    #[arg(long = "in")]
    input: PathBuf,
    /// Certificate file (written by solve, read by verify)
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct BruteArgs {
    /// hamilton | matching | max-matching
    #[arg(long)]
    problem: String,
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the found certificate here
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// hamilton | matching
    #[arg(long)]
    problem: String,
    /// Comma-separated list of instance sizes
    #[arg(long)]
    n: String,
    /// Trials (seeds) per size
    #[arg(long)]
    trials: u64,
    /// Base seed; trial i uses seed base + i
    #[arg(long)]
    seed: u64,
    /// Write the per-trial CSV report here
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Brute(args) => cmd_brute(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Invariant { state, .. } = &e {
                eprintln!("state dump for replay: {state}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn read_to_string(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &PathBuf, content: &str) -> Result<(), Error> {
    fs::write(path, content).map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}

fn parse_problem(s: &str) -> Result<Problem, Error> {
    s.parse()
}

fn load_collection(path: &PathBuf) -> Result<GraphCollection, Error> {
    formats::parse_rgc(&read_to_string(path)?)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Error> {
    let kind: GenKind = args.kind.parse()?;
    let problem = args.problem.as_deref().map(parse_problem).transpose()?;
    let spec = GenSpec {
        kind,
        n: args.n,
        s: args.s,
        p: args.p,
        seed: args.seed,
        problem,
    };
    let coll = rainbow_core::gen::generate(&spec)?;
    write_file(&args.out, &formats::write_rgc(&coll))?;
    println!(
        "wrote {} (n = {}, s = {})",
        args.out.display(),
        coll.n(),
        coll.color_count()
    );
    Ok(EXIT_FOUND)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Error> {
    let problem = parse_problem(&args.problem)?;
    let coll = load_collection(&args.input)?;
    // on an invariant violation, dump the instance alongside the state so
    // the run can be replayed from the bundle alone
    let dump_bundle = |e: Error| {
        if matches!(e, Error::Invariant { .. }) {
            eprintln!("# instance for replay\n{}", formats::write_rgc(&coll));
        }
        e
    };
    let (transversal, stats) = match problem {
        Problem::Hamilton => {
            let out = hamilton::solve_hamilton(&coll).map_err(dump_bundle)?;
            (out.transversal, serde_json::to_value(&out.stats).unwrap())
        }
        Problem::Matching => {
            let out = matching::solve_matching(&coll).map_err(dump_bundle)?;
            (out.transversal, serde_json::to_value(&out.stats).unwrap())
        }
    };
    let report = coll.verify_transversal(&transversal, problem);
    if !report.valid {
        return Err(Error::invariant(
            "solve",
            "solver output failed verification",
            serde_json::to_string(&report.failures).unwrap_or_default(),
        ));
    }
    let cert = Certificate::from_transversal(problem, coll.n(), &transversal);
    write_file(&args.cert, &formats::write_certificate(&cert))?;
    println!("{}", serde_json::json!({ "solved": true, "stats": stats }));
    Ok(EXIT_FOUND)
}

fn cmd_verify(args: SolveArgs) -> Result<u8, Error> {
    let problem = parse_problem(&args.problem)?;
    let coll = load_collection(&args.input)?;
    let cert = formats::parse_certificate(&read_to_string(&args.cert)?)?;
    if cert.problem != problem || cert.n != coll.n() {
        println!(
            "{}",
            serde_json::json!({
                "valid": false,
                "failures": [{"kind": "shape-mismatch",
                              "detail": "certificate problem/n does not match the instance"}],
            })
        );
        return Ok(EXIT_NOT_FOUND);
    }
    let t = cert.to_transversal();
    let report = coll.verify_transversal(&t, problem);
    println!("{}", serde_json::to_string(&report).unwrap());
    Ok(if report.valid { EXIT_FOUND } else { EXIT_NOT_FOUND })
}

fn cmd_brute(args: BruteArgs) -> Result<u8, Error> {
    let coll = load_collection(&args.input)?;
    let found = match args.problem.as_str() {
        "hamilton" => oracle::brute_hamilton(&coll)?.map(|t| (Problem::Hamilton, t)),
        "matching" => oracle::brute_perfect_matching(&coll)?.map(|t| (Problem::Matching, t)),
        "max-matching" => {
            let size = oracle::max_rainbow_matching_size(&coll)?;
            println!("{}", serde_json::json!({ "max_rainbow_matching": size }));
            return Ok(EXIT_FOUND);
        }
        other => return Err(Error::input(format!("unknown brute problem '{other}'"))),
    };
    match found {
        Some((problem, t)) => {
            if let Some(path) = &args.cert {
                let cert = Certificate::from_transversal(problem, coll.n(), &t);
                write_file(path, &formats::write_certificate(&cert))?;
            }
            println!("{}", serde_json::json!({ "found": true, "edges": t.len() }));
            Ok(EXIT_FOUND)
        }
        None => {
            println!("{}", serde_json::json!({ "found": false }));
            Ok(EXIT_NOT_FOUND)
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Error> {
    let problem = parse_problem(&args.problem)?;
    let mut ns = Vec::new();
    for part in args.n.split(',') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::input(format!("bad size '{part}' in --n")))?;
        ns.push(n);
    }
    let specs: Vec<TrialSpec> = ns
        .iter()
        .flat_map(|&n| {
            (0..args.trials).map(move |i| TrialSpec {
                problem,
                n,
                seed: args.seed + i,
            })
        })
        .collect();
    let records = run_trials(&specs);
    for r in &records {
        println!("{}", serde_json::to_string(r).unwrap());
    }
    if let Some(path) = &args.csv {
        write_file(path, &rainbow_core::batch::csv_report(&records))?;
    }
    if records.iter().all(|r| r.ok) {
        Ok(EXIT_FOUND)
    } else if records.iter().any(|r| r.error_code == Some(3)) {
        Ok(EXIT_INVARIANT)
    } else if records.iter().any(|r| r.error_code == Some(2)) {
        Ok(EXIT_INPUT)
    } else {
        Ok(EXIT_NOT_FOUND)
    }
}
