//! `immersion`: curvature analysis, identity verification and the prescribed
//! mean curvature solver from the command line.
//!
//! Exit codes: 0 success, 2 usage, 3 frame failure, 4 degenerate metric,
//! 5 verification failure, 6 not converged.

mod analysis;
mod error;
mod output;
mod solve;

use clap::{Parser, Subcommand, ValueEnum};
use immersion::surface::catalogue;
use serde::Serialize;

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "immersion", version, about = "Curvature of surfaces in R^4 and a prescribed mean curvature solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in surfaces.
    Catalogue {
        #[arg(long, value_enum, default_value_t = ListFormat::Text)]
        format: ListFormat,
    },
    /// Sample a surface and report curvature and estimate quantities.
    Analyze(analysis::AnalyzeArgs),
    /// Check the structure equations and curvature identities on a grid.
    Verify(analysis::VerifyArgs),
    /// Solve the prescribed mean curvature system on the unit disc.
    Solve(solve::SolveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ListFormat {
    Text,
    Json,
}

#[derive(Serialize)]
pub struct Tool {
    name: &'static str,
    version: &'static str,
}

impl Tool {
    pub fn current() -> Self {
        Self { name: "immersion", version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Serialize)]
struct CatalogueDocument {
    tool: Tool,
    command: &'static str,
    surfaces: Vec<immersion::surface::CatalogueEntry>,
}

fn list(format: ListFormat) -> Result<(), CliError> {
    let entries = catalogue();
    match format {
        ListFormat::Json => {
            print!("{}", output::to_json(&CatalogueDocument { tool: Tool::current(), command: "catalogue", surfaces: entries })?)
        }
        ListFormat::Text => {
            println!("{:<22} {:<12} {:<8} domain", "name", "parameters", "oracle");
            for e in entries {
                let params = if e.parameters.is_empty() { "-".to_string() } else { e.parameters.join(",") };
                println!("{:<22} {:<12} {:<8} {}", e.name, params, if e.oracle { "yes" } else { "no" }, e.domain);
            }
            println!("{:<22} {:<12} {:<8} closed disc of radius `radius` (default 1)", "custom_graph", "phi,psi", "no");
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Catalogue { format } => list(*format),
        Command::Analyze(a) => analysis::analyze(a),
        Command::Verify(v) => analysis::verify(v),
        Command::Solve(s) => solve::solve(s),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
