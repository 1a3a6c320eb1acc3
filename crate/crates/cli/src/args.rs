use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use onlinefwer::procedures::GraphVariant;
use onlinefwer::ProcedureId;

use crate::config::{parse_gamma, parse_graph, parse_variant};
use crate::error::CliError;
use crate::experiment::run_config_file;
use crate::verify::{self, FamilyKind, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "onlinefwer",
    version,
    about = "Online FWER procedures: simulations and closure checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenarios of an experiment config and write a CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 picks one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Check closure properties; the last line of output is PASS or FAIL.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Brute-force closure against the short-cut.
    ShortcutOracle(VerifyArgs),
    Predictability(VerifyArgs),
    Consonance(VerifyArgs),
    /// Closed procedure against its plain counterpart on random streams.
    Improvement(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "alpha-spending")]
    pub family: FamilyKind,
    /// Number of hypotheses.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Random p-vectors per size (oracle) or added to the boundary grid.
    #[arg(long, default_value_t = 200)]
    pub vectors: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// `inv-square` or `list:g1,g2,...`.
    #[arg(long, default_value = "inv-square", value_parser = parse_gamma_arg)]
    pub gamma: String,
    #[arg(long, default_value_t = 0.8)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.3)]
    pub lambda: f64,
    /// Batch size for the lags `(i - 1) mod b`.
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    /// Graph weights: `zero`, `lag1:w` or `triples:j,i,w;...`.
    #[arg(long, default_value = "lag1:1")]
    pub g: String,
    #[arg(long, default_value = "paper-literal")]
    pub graph_variant: String,
    /// Procedure behind `--family procedure-closure`.
    #[arg(long, default_value = "alpha-spending")]
    pub procedure: String,
    /// Streams for `improvement`.
    #[arg(long, default_value_t = 1000)]
    pub streams: usize,
    /// Stream length for `improvement`.
    #[arg(long, default_value_t = 100)]
    pub length: usize,
}

fn parse_gamma_arg(s: &str) -> Result<String, String> {
    parse_gamma(s).map(|_| s.to_string())
}

impl VerifyArgs {
    pub fn options(&self) -> Result<VerifyOptions, CliError> {
        let variant: GraphVariant = parse_variant(&self.graph_variant).map_err(CliError::Usage)?;
        let procedure: ProcedureId = self
            .procedure
            .parse()
            .map_err(|e: onlinefwer::Error| CliError::Usage(e.to_string()))?;
        Ok(VerifyOptions {
            family: self.family,
            n: self.n,
            vectors: self.vectors,
            seed: self.seed,
            alpha: self.alpha,
            gamma: parse_gamma(&self.gamma).map_err(CliError::Usage)?,
            tau: self.tau,
            lambda: self.lambda,
            batch: self.batch,
            graph: parse_graph(&self.g).map_err(CliError::Usage)?,
            variant,
            procedure,
            streams: self.streams,
            length: self.length,
        })
    }
}

type VerifyFn = fn(&VerifyOptions) -> Result<verify::VerifyReport, CliError>;

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Run {
            config,
            out,
            threads,
        } => {
            let mut stdout = std::io::stdout().lock();
            run_config_file(&config, out.as_deref(), threads, &mut stdout).map(|_| 0)
        }
        Command::Verify(check) => {
            let (args, run): (&VerifyArgs, VerifyFn) = match &check {
                VerifyCommand::ShortcutOracle(a) => (a, verify::shortcut_oracle),
                VerifyCommand::Predictability(a) => (a, verify::predictability),
                VerifyCommand::Consonance(a) => (a, verify::consonance),
                VerifyCommand::Improvement(a) => (a, verify::improvement),
            };
            args.options().and_then(|opts| run(&opts)).map(|report| {
                for line in &report.lines {
                    println!("{line}");
                }
                if report.passed {
                    0
                } else {
                    1
                }
            })
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
