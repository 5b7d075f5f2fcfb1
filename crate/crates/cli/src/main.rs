use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use fibra::commands::{CommandContext, CommandRegistry};
use fibra::spec::parse_spec_path;
use fibra_core::Caps;

/// Validate and analyze finite bundle specifications.
///
/// Exit codes: 0 for passing verdicts, 1 for violations or anholonomic
/// classifications, 2 for usage errors.
#[derive(Parser)]
#[command(name = "fibra", version, about)]
struct Cli {
    /// Analysis to run: validate, holonomy, orbits, coords, twin, kernel, demo
    command: String,

    /// Spec file (JSON); for `demo`, the topic (default: exp-shift)
    target: Option<String>,

    /// Chart to base the holonomy computation at (default: first chart)
    #[arg(long)]
    base_chart: Option<String>,

    /// Named section used as the reference for `coords` and `twin`
    #[arg(long)]
    reference: Option<String>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Override the enumeration caps (sections and group closure)
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn effective_caps(flag: Option<usize>) -> Caps {
    if let Some(budget) = flag {
        return Caps::with_budget(budget);
    }
    match std::env::var("FIBRA_CAP").ok().and_then(|v| v.parse().ok()) {
        Some(budget) => Caps::with_budget(budget),
        None => Caps::default(),
    }
}

fn run(cli: Cli) -> Result<i32, fibra::CliError> {
    let registry = CommandRegistry::standard();
    let command = registry.lookup(&cli.command)?;

    let (spec, topic) = if command.needs_spec() {
        let path = cli
            .target
            .as_ref()
            .ok_or_else(|| fibra::CliError::MissingSpec(cli.command.clone()))?;
        (Some(parse_spec_path(&PathBuf::from(path))?), None)
    } else {
        (None, cli.target.clone())
    };

    let ctx = CommandContext {
        spec,
        base_chart: cli.base_chart.clone(),
        reference: cli.reference.clone(),
        topic,
        caps: effective_caps(cli.cap),
    };
    let report = command.run(&ctx)?;
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(report.exit_code())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
