mod commands;
mod config;
mod output;
mod theorems;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use folner_lab::LabError;

use commands::{Outcome, Verdict};
use config::ExperimentConfig;

const EXIT_PASS: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_REFUSED: u8 = 3;
const EXIT_COUNTEREXAMPLE: u8 = 4;

#[derive(Parser)]
#[command(name = "folner-lab", version, about = "Følner sequences, tilings and sub-additive ergodic theorems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tempelman and tempered ratios and Følner defects of a sequence.
    VerifyFolner(RunArgs),
    /// Tiling certificates and composition identities of a sequence.
    VerifyTiling(RunArgs),
    /// Classify a family and test its declared properties.
    CheckFamily(RunArgs),
    /// Limit of a set function along a sequence against the enumerated infimum.
    LimitSetfn(RunArgs),
    /// Pointwise convergence of a sub-additive family.
    Converge(RunArgs),
    /// Limsup identity against tile or finite-set infima.
    Limsup(RunArgs),
    /// Maximal inequality with greedy-cover witnesses.
    Maximal(RunArgs),
    /// nu(D) of a mixture against its ergodic components.
    Decompose(RunArgs),
    /// Birkhoff averages against the conditional expectation.
    Birkhoff(RunArgs),
    /// Results covered by the lab and the subcommand checking each.
    ListTheorems,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyFolner(_) => "verify-folner",
            Command::VerifyTiling(_) => "verify-tiling",
            Command::CheckFamily(_) => "check-family",
            Command::LimitSetfn(_) => "limit-setfn",
            Command::Converge(_) => "converge",
            Command::Limsup(_) => "limsup",
            Command::Maximal(_) => "maximal",
            Command::Decompose(_) => "decompose",
            Command::Birkhoff(_) => "birkhoff",
            Command::ListTheorems => "list-theorems",
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("FOLNER_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("FOLNER_LAB_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn run(command: &Command, args: &RunArgs) -> ExitCode {
    let name = command.name();
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{name}: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(dir) = &args.out {
        cfg.output.dir = dir.clone();
    }
    let result = match command {
        Command::VerifyFolner(_) => commands::verify_folner(&cfg),
        Command::VerifyTiling(_) => commands::verify_tiling(&cfg),
        Command::CheckFamily(_) => commands::check_family(&cfg),
        Command::LimitSetfn(_) => commands::limit_setfn(&cfg),
        Command::Converge(_) => commands::converge(&cfg),
        Command::Limsup(_) => commands::limsup(&cfg),
        Command::Maximal(_) => commands::maximal(&cfg),
        Command::Decompose(_) => commands::decompose(&cfg),
        Command::Birkhoff(_) => commands::birkhoff(&cfg),
        Command::ListTheorems => unreachable!(),
    };
    let (code, verdict, outcome, error) = match result {
        Ok(o) => {
            let (code, verdict) = match o.verdict {
                Verdict::Pass => (EXIT_PASS, "pass"),
                Verdict::Inconclusive => (EXIT_INCONCLUSIVE, "inconclusive"),
                Verdict::Counterexample => (EXIT_COUNTEREXAMPLE, "counterexample"),
            };
            (code, verdict, Some(o), None)
        }
        Err(e @ LabError::GateRefused { .. }) => (EXIT_REFUSED, "refused", None, Some(e.to_string())),
        Err(e @ LabError::NoWitness(_)) => (EXIT_INCONCLUSIVE, "inconclusive", None, Some(e.to_string())),
        Err(e) => (EXIT_CONFIG, "error", None, Some(e.to_string())),
    };
    if let Some(e) = &error {
        eprintln!("{name}: {e}");
    }
    let Outcome { rows, gaps, report, .. } = outcome.unwrap_or(Outcome {
        verdict: Verdict::Inconclusive,
        rows: Default::default(),
        gaps: Default::default(),
        report: serde_json::Value::Null,
    });
    let summary = output::Summary {
        command: name,
        verdict,
        exit_code: code.into(),
        seed: cfg.seed,
        classifier_seed: cfg.classifier.seed,
        gaps,
        report,
        error,
    };
    let text = serde_json::to_string_pretty(&summary.to_json()).expect("summary serializes");
    let written = output::write(&cfg.output.csv_path(name), &output::csv(name, &rows.0))
        .and_then(|_| output::write(&cfg.output.summary_path(), &text));
    if let Err(e) = written {
        eprintln!("{name}: cannot write artifacts: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    println!("{name}: {verdict}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    match &cli.command {
        Command::ListTheorems => {
            print!("{}", theorems::render());
            ExitCode::from(EXIT_PASS)
        }
        c @ (Command::VerifyFolner(a)
        | Command::VerifyTiling(a)
        | Command::CheckFamily(a)
        | Command::LimitSetfn(a)
        | Command::Converge(a)
        | Command::Limsup(a)
        | Command::Maximal(a)
        | Command::Decompose(a)
        | Command::Birkhoff(a)) => run(c, a),
    }
}
