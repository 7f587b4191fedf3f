use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cone_audit::render::{render_human, render_verify};
use cone_audit::report::{EXIT_FAILS, EXIT_HOLDS, EXIT_INPUT_ERROR};
use cone_audit::ssd_mesh;
use cone_audit::{parse_problem, run_analysis, sample, verify_report, Command, ReportDocument, RunOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "cone-audit", version, about = "Check first- and second-order optimality conditions at a candidate point")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(clap::Args, Debug)]
struct Source {
    /// Problem file (JSON).
    #[arg(long, short, conflicts_with = "sample", required_unless_present = "sample")]
    input: Option<PathBuf>,
    /// Shipped problem file: orthant-qp, ex31-second-order or ex41-theorem41.
    #[arg(long)]
    sample: Option<String>,
}

#[derive(clap::Args, Debug)]
struct Common {
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Float-regime tolerance; overrides the file.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Membership mesh as start:stop:step[:tail] decimal exponents.
    #[arg(long, value_parser = ssd_mesh)]
    mesh: Option<cone_audit_core::ssd::MeshSpec>,
    /// Copositivity bisection depth limit.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Action {
    #[command(flatten)]
    Analyse(Analysis),
    /// Re-validate every witness in a JSON report.
    Verify {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum Analysis {
    /// Tangent, normal, critical and second-order tangent cones.
    Cones(Args),
    /// First-order condition.
    FirstOrder(Args),
    /// Second-order comparison at each direction.
    SecondOrder(Args),
    /// Quadratic-programming conditions (exact regime).
    Qp(Args),
    /// Second-order subgradient membership.
    Ssd(Args),
    /// Bidirectional second-order condition for C¹ objectives.
    Theorem41(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    common: Common,
}

impl Analysis {
    fn split(self) -> (Command, Args) {
        match self {
            Analysis::Cones(a) => (Command::Cones, a),
            Analysis::FirstOrder(a) => (Command::FirstOrder, a),
            Analysis::SecondOrder(a) => (Command::SecondOrder, a),
            Analysis::Qp(a) => (Command::Qp, a),
            Analysis::Ssd(a) => (Command::Ssd, a),
            Analysis::Theorem41(a) => (Command::Theorem41, a),
        }
    }
}

fn fail(message: impl std::fmt::Display, code: i32) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code as u8)
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn analyse(command: Command, args: Args) -> ExitCode {
    let text = match (&args.source.input, &args.source.sample) {
        (Some(path), _) => match read(path) {
            Ok(t) => t,
            Err(e) => return fail(e, EXIT_INPUT_ERROR),
        },
        (None, Some(name)) => match sample(name) {
            Some(t) => t.to_string(),
            None => return fail(format!("no shipped problem file named {name:?}"), EXIT_INPUT_ERROR),
        },
        (None, None) => return fail("pass --input or --sample", EXIT_INPUT_ERROR),
    };
    let pf = match parse_problem(&text) {
        Ok(pf) => pf,
        Err(e) => return fail(format!("invalid problem file:\n{e}"), EXIT_INPUT_ERROR),
    };
    let options = RunOptions {
        tolerance: args.common.tolerance,
        mesh: args.common.mesh,
        depth: args.common.depth,
    };
    match run_analysis(&pf, command, &options) {
        Ok(doc) => {
            match args.common.format {
                Format::Human => print!("{}", render_human(&doc)),
                Format::Json => println!("{}", json(&doc)),
            }
            ExitCode::from(doc.outcome.exit_code as u8)
        }
        Err(e) => fail(&e, e.exit_code()),
    }
}

fn verify(input: &PathBuf, format: Format) -> ExitCode {
    let text = match read(input) {
        Ok(t) => t,
        Err(e) => return fail(e, EXIT_INPUT_ERROR),
    };
    let doc: ReportDocument = match serde_json::from_str(&text) {
        Ok(d) => d,
        Err(e) => return fail(format!("invalid report: {e}"), EXIT_INPUT_ERROR),
    };
    let summary = verify_report(&doc);
    match format {
        Format::Human => print!("{}", render_verify(&summary)),
        Format::Json => println!("{}", json(&summary)),
    }
    ExitCode::from(if summary.passed() { EXIT_HOLDS } else { EXIT_FAILS } as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli.action {
        Action::Analyse(a) => {
            let (command, args) = a.split();
            analyse(command, args)
        }
        Action::Verify { input, format } => verify(&input, format),
    }
}
