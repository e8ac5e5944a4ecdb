//! vismon: rule-based safety monitor for a stereo vision pipeline.
//!
//! Exit status: 0 = every frame passed (CONTINUE), 1 = usage, configuration
//! or I/O error, 2 = protective stop latched.

mod inputs;
mod run;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vismon::dsl::{self, CompiledRuleSet};
use vismon::pipeline::{load_pipeline_config, PipelineSetup};
use vismon::report::{coverage_report, RuleMapping, SafetyFunctionTable};

#[derive(Parser)]
#[command(
    name = "vismon",
    about = "Declarative safety-rule monitor for stereo camera pipelines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Statically check a rule file against a pipeline configuration.
    Check {
        /// Rule file (.rules).
        #[arg(long)]
        rules: PathBuf,
        /// Pipeline configuration (TOML).
        #[arg(long)]
        pipeline: PathBuf,
    },
    /// Run the frame loop, evaluating rules and gating on failures.
    Run(RunArgs),
    /// Emit the safety-function coverage report.
    Report {
        /// Rule file (.rules).
        #[arg(long)]
        rules: PathBuf,
        /// Pipeline configuration (TOML), including the [mapping] table.
        #[arg(long)]
        pipeline: PathBuf,
        /// Where to write the machine-readable report records.
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Rule file (.rules).
    #[arg(long)]
    rules: PathBuf,
    /// Pipeline configuration (TOML).
    #[arg(long)]
    pipeline: PathBuf,
    /// Directory of stereo frames named <frame>_L.pgm / <frame>_R.pgm.
    #[arg(long, group = "input_mode")]
    input: Option<PathBuf>,
    /// Synthetic scene configuration (TOML).
    #[arg(long, group = "input_mode")]
    synthetic: Option<PathBuf>,
    /// Inject a lens fault, KIND:TARGET[:PARAM]; repeatable.
    /// Kinds: cover, overexpose[:GAIN[,OFFSET]], partial_cover:FRACTION.
    #[arg(long = "inject")]
    inject: Vec<String>,
    /// Number of frames to process (synthetic default 1, directory default all).
    #[arg(long)]
    frames: Option<u64>,
    /// Audit log path (appended, tab-separated records).
    #[arg(long, default_value = "audit.log")]
    log: PathBuf,
    /// Override the synthetic scene bit depth.
    #[arg(long)]
    bit_depth: Option<u8>,
    /// Write `-` instead of timestamps for reproducible logs.
    #[arg(long)]
    no_timestamp: bool,
    /// Clear a persisted protective-stop latch before running.
    #[arg(long)]
    reset: bool,
    /// Export each processed stereo pair (faults applied) as
    /// <frame>_L.pgm / <frame>_R.pgm into this directory.
    #[arg(long)]
    dump_frames: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Check { rules, pipeline } => cmd_check(&rules, &pipeline),
        Command::Run(args) => run::cmd_run(&args),
        Command::Report {
            rules,
            pipeline,
            report,
        } => cmd_report(&rules, &pipeline, &report),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// Load the pipeline configuration, mapping errors to exit-1 diagnostics.
fn load_setup(pipeline: &Path) -> anyhow::Result<PipelineSetup> {
    load_pipeline_config(pipeline)
        .with_context(|| format!("pipeline configuration {}", pipeline.display()))
}

/// Compile a rule file against a graph, printing positioned diagnostics.
fn compile_rules(
    rules_path: &Path,
    setup: &PipelineSetup,
) -> anyhow::Result<Result<CompiledRuleSet, String>> {
    let source = std::fs::read_to_string(rules_path)
        .with_context(|| format!("cannot read rule file {}", rules_path.display()))?;
    match dsl::compile(&source, &setup.graph) {
        Ok(compiled) => Ok(Ok(compiled)),
        // Every compile error's message already leads with line:column.
        Err(err) => Ok(Err(format!("{}:{err}", rules_path.display()))),
    }
}

fn cmd_check(rules: &Path, pipeline: &Path) -> anyhow::Result<u8> {
    let setup = load_setup(pipeline)?;
    match compile_rules(rules, &setup)? {
        Ok(compiled) => {
            if compiled.rules.is_empty() {
                println!("0 rules compiled");
                println!("warning: rule set is empty; nothing will be monitored");
            } else {
                println!("{} rules compiled", compiled.rules.len());
                for rule in &compiled.rules {
                    println!("  {}: {}", rule.id, rule.text);
                }
            }
            Ok(0)
        }
        Err(diagnostic) => {
            eprintln!("{diagnostic}");
            Ok(1)
        }
    }
}

fn cmd_report(rules: &Path, pipeline: &Path, out: &Path) -> anyhow::Result<u8> {
    let setup = load_setup(pipeline)?;
    let compiled = match compile_rules(rules, &setup)? {
        Ok(compiled) => compiled,
        Err(diagnostic) => {
            eprintln!("{diagnostic}");
            return Ok(1);
        }
    };
    let mapping = RuleMapping::new(setup.mapping.clone());
    let table = SafetyFunctionTable::default();
    match coverage_report(&compiled, &mapping, &table) {
        Ok(report) => {
            print!("{}", report.to_text());
            std::fs::write(out, report.to_records())
                .with_context(|| format!("cannot write report to {}", out.display()))?;
            Ok(0)
        }
        Err(err) => {
            eprintln!("error: {err}");
            Ok(1)
        }
    }
}
