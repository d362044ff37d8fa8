use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lscnorm::analysis::{analyze_compact, analyze_relative, compact_equal};
use lscnorm::beta::{normalize_lo_beta, BetaError};
use lscnorm::check::{run_check, CheckConfig, PROPERTIES};
use lscnorm::engine::{default_fuel, normalize, verify_trace, Strategy};
use lscnorm::family::{family, parse_family_spec};
use lscnorm::position::{resolve, Position};
use lscnorm::syntax::parse;
use lscnorm::term::Term;
use lscnorm::unfold::{unfold, DEFAULT_UNFOLD_CAP};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_FUEL: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_DIFFERENT: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser)]
#[command(
    name = "lscnorm",
    version,
    about = "Leftmost-outermost useful normalization with explicit substitutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Step budget (default 10·|t|² + 100 per term; 200 per case for check)
    #[arg(long, global = true, env = "LSCNORM_FUEL", value_parser = clap::value_parser!(u64).range(1..))]
    fuel: Option<u64>,

    /// Largest unfolding, in nodes, that may be built
    /// (default 1000000; 100000 for check)
    #[arg(long, global = true, value_parser = at_least_one)]
    unfold_cap: Option<usize>,

    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a term and report the derivation
    Normalize(NormalizeArgs),
    /// Print a member of a term family
    Family {
        /// Family name (size-explosion)
        name: String,
        n: usize,
    },
    /// Run a randomized property suite
    Check(CheckArgs),
    /// Decide whether two terms have the same normal form
    Equal { a: String, b: String },
    /// Print the nature/redex/apvars/freevars tuple of a term's unfolding
    Analyze {
        term: String,
        /// Analyze the subterm at this shallow position, relative to its context
        #[arg(long)]
        at: Option<Position>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    LoBeta,
    LscLo,
    LscLou,
}

#[derive(Args)]
struct NormalizeArgs {
    /// Term in source syntax, or - for standard input
    #[arg(required_unless_present = "family", conflicts_with = "family")]
    term: Option<String>,
    /// Use a family member instead, e.g. size-explosion:5
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_enum, default_value = "lsc-lou")]
    strategy: StrategyArg,
    /// Include the full derivation trace
    #[arg(long)]
    trace: bool,
    /// Check the derivation invariants on the trace
    #[arg(long)]
    verify: bool,
    /// Also print the unfolding of the result
    #[arg(long)]
    unfold_result: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// One of the property names listed by --help
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(PROPERTIES))]
    property: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 40)]
    max_size: usize,
}

struct Failure(u8, String);

type Outcome = Result<u8, Failure>;

fn input_error(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, msg.to_string())
}

fn read_term(src: &str) -> Result<Term, Failure> {
    let text = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(input_error)?;
        s
    } else {
        src.to_string()
    };
    parse(&text).map_err(|e| input_error(format!("parse error: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let outcome = match &cli.command {
        Command::Normalize(args) => cmd_normalize(&cli, args),
        Command::Family { name, n } => cmd_family(&cli, name, *n),
        Command::Check(args) => cmd_check(&cli, args),
        Command::Equal { a, b } => cmd_equal(&cli, a, b),
        Command::Analyze { term, at } => cmd_analyze(&cli, term, at.as_ref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("lscnorm: {msg}");
            ExitCode::from(code)
        }
    }
}

fn fuel_for(cli: &Cli, t: &Term) -> usize {
    cli.fuel.map_or_else(|| default_fuel(t), |f| f as usize)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_normalize(cli: &Cli, args: &NormalizeArgs) -> Outcome {
    let term = match (&args.term, &args.family) {
        (_, Some(spec)) => {
            let (name, n) = parse_family_spec(spec).ok_or_else(|| input_error(format!("bad family spec '{spec}'")))?;
            family(name, n).map_err(input_error)?
        }
        (Some(src), None) => read_term(src)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let fuel = fuel_for(cli, &term);
    let strategy = match args.strategy {
        StrategyArg::LoBeta => return normalize_beta(cli, &term, fuel),
        StrategyArg::LscLo => Strategy::LinearLO,
        StrategyArg::LscLou => Strategy::LOU,
    };
    let tr = normalize(&term, strategy, fuel);
    let mut code = if tr.exhausted { EXIT_FUEL } else { EXIT_OK };
    let unfolded = args
        .unfold_result
        .then(|| unfold(&tr.final_term, cli.unfold_cap.unwrap_or(DEFAULT_UNFOLD_CAP)));
    if let Some(Err(_)) = &unfolded {
        if code == EXIT_OK {
            code = EXIT_CAP;
        }
    }
    let report = args.verify.then(|| verify_trace(&tr));
    if report.as_ref().is_some_and(|r| !r.all_pass()) && code == EXIT_OK {
        code = EXIT_VERIFY;
    }
    let strategy_name = match strategy {
        Strategy::LinearLO => "lsc-lo",
        Strategy::LOU => "lsc-lou",
    };
    if cli.json {
        let mut v = json!({
            "strategy": strategy_name,
            "final": tr.final_term.to_string(),
            "steps": tr.len(),
            "db_count": tr.db_count(),
            "ls_count": tr.ls_count(),
            "initial_size": tr.initial.size(),
            "final_size": tr.final_term.size(),
            "es_count": tr.final_term.es_count(),
            "exhausted": tr.exhausted,
        });
        match &unfolded {
            Some(Ok(u)) => v["unfold"] = json!(u.to_string()),
            Some(Err(e)) => v["unfold_error"] = json!(e.to_string()),
            None => {}
        }
        if args.trace {
            v["trace"] = serde_json::to_value(&tr).expect("serializable");
        }
        if let Some(r) = &report {
            v["verify"] = serde_json::to_value(r).expect("serializable");
        }
        print_json(&v);
    } else {
        println!("strategy: {strategy_name}");
        println!("final: {}", tr.final_term);
        println!("steps: {} (dB {}, ls {})", tr.len(), tr.db_count(), tr.ls_count());
        println!(
            "size: {} -> {}, substitutions: {}",
            tr.initial.size(),
            tr.final_term.size(),
            tr.final_term.es_count()
        );
        match &unfolded {
            Some(Ok(u)) => println!("unfold: {u}"),
            Some(Err(e)) => println!("unfold: {e}"),
            None => {}
        }
        if tr.exhausted {
            println!("fuel exhausted after {} steps", tr.len());
        }
        if args.trace {
            println!("{}", serde_json::to_string_pretty(&tr).expect("serializable"));
        }
        if let Some(r) = &report {
            print!("{r}");
        }
    }
    Ok(code)
}

fn normalize_beta(cli: &Cli, term: &Term, fuel: usize) -> Outcome {
    let run = match normalize_lo_beta(term, fuel) {
        Ok(run) => run,
        Err(BetaError::NotPure) => return Err(input_error("lo-beta needs a term without explicit substitutions")),
        Err(e) => return Err(input_error(e)),
    };
    if cli.json {
        print_json(&json!({
            "strategy": "lo-beta",
            "final": run.result.to_string(),
            "steps": run.steps,
            "initial_size": term.size(),
            "final_size": run.result.size(),
            "exhausted": run.exhausted,
        }));
    } else {
        println!("strategy: lo-beta");
        println!("final: {}", run.result);
        println!("steps: {}", run.steps);
        println!("size: {} -> {}", term.size(), run.result.size());
        if run.exhausted {
            println!("fuel exhausted after {} steps", run.steps);
        }
    }
    Ok(if run.exhausted { EXIT_FUEL } else { EXIT_OK })
}

fn cmd_family(cli: &Cli, name: &str, n: usize) -> Outcome {
    let t = family(name, n).map_err(input_error)?;
    if cli.json {
        print_json(&json!({"family": name, "n": n, "term": t.to_string(), "size": t.size()}));
    } else {
        println!("{t}");
    }
    Ok(EXIT_OK)
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> Outcome {
    let config = CheckConfig {
        seed: args.seed,
        cases: args.cases,
        max_size: args.max_size,
        fuel: cli.fuel.map_or(CheckConfig::default().fuel, |f| f as usize),
        unfold_cap: cli.unfold_cap.unwrap_or(CheckConfig::default().unfold_cap),
    };
    let report = run_check(&args.property, &config).map_err(input_error)?;
    if cli.json {
        print_json(&serde_json::to_value(&report).expect("serializable"));
    } else {
        println!("{report}");
    }
    Ok(if report.ok() { EXIT_OK } else { EXIT_INPUT })
}

fn cmd_equal(cli: &Cli, a: &str, b: &str) -> Outcome {
    let (a, b) = (read_term(a)?, read_term(b)?);
    let fuel = cli
        .fuel
        .map_or_else(|| default_fuel(&a).max(default_fuel(&b)), |f| f as usize);
    let ta = normalize(&a, Strategy::LOU, fuel);
    let tb = normalize(&b, Strategy::LOU, fuel);
    if ta.exhausted || tb.exhausted {
        return Err(Failure(EXIT_FUEL, format!("fuel of {fuel} steps exhausted")));
    }
    let equal = compact_equal(&ta.final_term, &tb.final_term);
    if cli.json {
        print_json(&json!({
            "equal": equal,
            "a": {"final": ta.final_term.to_string(), "steps": ta.len()},
            "b": {"final": tb.final_term.to_string(), "steps": tb.len()},
        }));
    } else {
        println!("{}", if equal { "equal" } else { "different" });
    }
    Ok(if equal { EXIT_OK } else { EXIT_DIFFERENT })
}

fn cmd_analyze(cli: &Cli, src: &str, at: Option<&Position>) -> Outcome {
    let term = read_term(src)?;
    let tuple = match at {
        None => analyze_compact(&term),
        Some(pos) => {
            let sub = resolve(&term, pos).map_err(input_error)?;
            analyze_relative(&sub, &term, pos).map_err(input_error)?
        }
    };
    if cli.json {
        let mut v = serde_json::to_value(&tuple).expect("serializable");
        if let Some(pos) = at {
            v["position"] = json!(pos.to_string());
        }
        print_json(&v);
    } else {
        let set = |s: &std::collections::BTreeSet<lscnorm::term::Name>| {
            let items: Vec<String> = s.iter().map(|n| n.to_string()).collect();
            format!("{{{}}}", items.join(", "))
        };
        println!("nature: {}", tuple.nature);
        println!("has_redex: {}", tuple.has_redex);
        println!("apvars: {}", set(&tuple.apvars));
        println!("freevars: {}", set(&tuple.freevars));
    }
    Ok(EXIT_OK)
}
