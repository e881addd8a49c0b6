use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gengeo::report::Status;
use gengeo::scenario::{example, parse_scenario_file, Scenario, DEGREE_WARNING, EXAMPLES};

#[derive(Parser)]
#[command(name = "gengeo", version, about = "Run Courant algebroid and Moser-flow scenarios")]
struct Cli {
    /// List the bundled scenarios and exit.
    #[arg(long)]
    list_examples: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or the name of a bundled scenario).
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the bundled scenarios.
    ListExamples,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn list() -> ExitCode {
    for e in EXAMPLES {
        println!("{:<20} {}", e.name, e.summary);
    }
    ExitCode::SUCCESS
}

fn load(path: &PathBuf) -> Result<Scenario, String> {
    if !path.exists() {
        if let Some(e) = path.to_str().and_then(example) {
            return Scenario::parse(e.source).map_err(|e| e.to_string());
        }
    }
    parse_scenario_file(path).map_err(|e| e.to_string())
}

fn run(path: &PathBuf, format: Format, steps: Option<usize>, tol: Option<f64>, seed: Option<u64>) -> ExitCode {
    let mut scenario = match load(path) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {}: {msg}", path.display());
            return ExitCode::from(2);
        }
    };
    if steps == Some(0) || tol.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        eprintln!("error: --steps and --tol must be positive");
        return ExitCode::from(2);
    }
    if scenario.max_degree() > DEGREE_WARNING {
        eprintln!(
            "warning: scenario contains a polynomial of total degree {} (above {DEGREE_WARNING}); expect slow exact arithmetic",
            scenario.max_degree()
        );
    }
    scenario.apply_overrides(steps, tol, seed);
    let report = scenario.run();
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    // pipeline errors are check records, so they fail the run rather than abort it
    match report.overall {
        Status::Pass => ExitCode::SUCCESS,
        Status::Fail | Status::Error => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_examples {
        return list();
    }
    match cli.command {
        Some(Command::ListExamples) => list(),
        Some(Command::Run {
            scenario,
            format,
            steps,
            tol,
            seed,
        }) => run(&scenario, format, steps, tol, seed),
        None => {
            eprintln!("error: expected a command: run <scenario.json> or list-examples");
            ExitCode::from(2)
        }
    }
}
