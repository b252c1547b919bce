use causal_tapestry::cgt::{CgtError, GameStore};
use causal_tapestry::scenarios::{self, DemoRecord, Format, ScenarioError, DEMOS};
use causal_tapestry::tapestry::{validate, TapestryDocument, ValidationMode};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

const OK: u8 = 0;
const USAGE: u8 = 1;
const INVALID: u8 = 2;
const MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "tapestry", version, about = "Token-game wave propagation, measurement trials and demos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report and data files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also check the content-closure condition when validating.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario configuration.
    Run { config: PathBuf },
    /// Run a named demo and compare it with its quoted constants.
    Demo { name: String },
    /// Check a tapestry document.
    Validate { tapestry: PathBuf },
    /// Game values born by a day.
    Census {
        #[arg(long)]
        day: u32,
    },
    /// Interpolation self-checks.
    InterpTest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    ExitCode::from(match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Demo { name } => demo(&cli, name),
        Command::Validate { tapestry } => check(&cli, tapestry),
        Command::Census { day } => census(*day),
        Command::InterpTest => print_record(&cli, &scenarios::interp_record()),
    })
}

fn run(cli: &Cli, path: &PathBuf) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return INVALID;
        }
    };
    let mut config: scenarios::ScenarioConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid configuration: document: {e}");
            return INVALID;
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(f) = cli.format {
        config.format = match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        };
    }
    let scenario = match config.resolve() {
        Ok(s) => s,
        Err(e) => {
            for v in &e.0 {
                eprintln!("invalid configuration: {v}");
            }
            return INVALID;
        }
    };
    let result = match scenarios::run(&scenario) {
        Ok(r) => r,
        Err(ScenarioError::Io(e)) => {
            eprintln!("{e}");
            return USAGE;
        }
        Err(e) => {
            eprintln!("{e}");
            return INVALID;
        }
    };
    print!("{}", result.report_json());
    let out = cli.out.clone().or_else(|| scenario.config.output.as_ref().map(PathBuf::from));
    if let Some(dir) = out {
        if let Err(e) = result.write(&dir) {
            eprintln!("cannot write {}: {e}", dir.display());
            return USAGE;
        }
    }
    OK
}

fn print_record(cli: &Cli, r: &DemoRecord) -> u8 {
    if !matches!(cli.format, Some(OutputFormat::Json)) {
        println!("{}", r.demo);
        let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &r.checks {
            println!("  {:<width$}  {}  expected {}  got {}", c.name, if c.ok { "ok      " } else { "MISMATCH" }, c.expected, c.got);
        }
    }
    println!("{}", serde_json::to_string(r).expect("records serialize"));
    if r.matched {
        OK
    } else {
        MISMATCH
    }
}

fn demo(cli: &Cli, name: &str) -> u8 {
    match scenarios::run_demo(name) {
        Some(r) => print_record(cli, &r),
        None => {
            eprintln!("unknown demo {name:?}; expected one of {}", DEMOS.join(", "));
            USAGE
        }
    }
}

fn check(cli: &Cli, path: &PathBuf) -> u8 {
    let doc = match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| TapestryDocument::from_json(&t).map_err(|e| e.to_string())) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot load {}: {e}", path.display());
            return INVALID;
        }
    };
    let mode = if cli.strict { ValidationMode::Strict } else { ValidationMode::Lenient };
    let violations = validate(&doc.into_tapestry(), mode);
    if violations.is_empty() {
        println!("valid: {} informons, {} priors", doc.informons.len(), doc.priors.len());
        OK
    } else {
        for v in &violations {
            println!("{v}");
        }
        INVALID
    }
}

fn census(day: u32) -> u8 {
    let mut store = GameStore::new();
    match store.census(day) {
        Ok(c) => {
            let names: Vec<String> = c.values.iter().map(|&g| store.format(g)).collect();
            println!("day {day}: {} values from {} forms ({} undominated)", names.len(), c.forms, c.undominated_forms);
            for n in names {
                println!("  {n}");
            }
            OK
        }
        Err(e @ CgtError::DayUnsupported(_)) => {
            eprintln!("{e}");
            USAGE
        }
        Err(e) => {
            eprintln!("{e}");
            INVALID
        }
    }
}
