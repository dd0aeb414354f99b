//! Command-line front end.
//!
//! Exit codes: 0 on success (and feasible assignments), 2 when an
//! assignment is infeasible, 1 on any operational error. Diagnostics go to
//! stderr; data goes to stdout or the requested files.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use crate::adjust::{period_adjust, Verdict};
use crate::elastic::{task_compress, ElasticVerdict};
use crate::scenario::{
    self, parse_scenario, write_trace_csv, AssignmentFormat, ScenarioParseError,
};
use crate::sim::{simulate, Algorithm, Scenario};

#[derive(Parser)]
#[command(
    name = "padjust",
    version,
    about = "Adaptive period assignment and EDF simulation"
)]
struct Cli {
    /// Report pass-by-pass clamp decisions on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    PeriodAdjust,
    TaskCompress,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run one period assignment over a scenario's task set (events ignored).
    Adjust {
        /// Scenario file supplying the task set.
        #[arg(long)]
        input: PathBuf,
        /// Target utilization for the assignment.
        #[arg(long, default_value_t = 1.0)]
        ud: f64,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::PeriodAdjust)]
        algorithm: AlgorithmArg,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Simulate a scenario and write trace CSV files.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Directory for samples.csv, misses.csv and adjustments.csv.
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Simulate a scenario under both algorithms and write traces side by side.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Directory for samples-<algorithm>.csv and verdicts.csv.
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Parse a scenario file and report every violation found.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Adjust {
            input,
            ud,
            algorithm,
            output,
            format,
        } => {
            let sc = load_scenario(&input)?;
            let format = match format {
                FormatArg::Csv => AssignmentFormat::Csv,
                FormatArg::Json => AssignmentFormat::Json,
            };
            let (text, feasible) = match algorithm {
                AlgorithmArg::PeriodAdjust => {
                    let pa = period_adjust(&sc.taskset, ud)?;
                    if cli.verbose {
                        eprintln!("passes: {}", pa.passes);
                        for c in &pa.clamp_log {
                            eprintln!("pass {}: {} clamped {}", c.pass, c.task, c.kind.label());
                        }
                    }
                    let text = match format {
                        AssignmentFormat::Csv => scenario::assignment_csv(&sc.taskset, &pa),
                        AssignmentFormat::Json => scenario::assignment_json(&sc.taskset, &pa),
                    };
                    (text, pa.verdict == Verdict::Feasible)
                }
                AlgorithmArg::TaskCompress => {
                    let res = task_compress(&sc.taskset, ud)?;
                    if cli.verbose {
                        eprintln!("iterations: {}", res.iterations);
                    }
                    let text = match format {
                        AssignmentFormat::Csv => scenario::elastic_csv(&sc.taskset, &res),
                        AssignmentFormat::Json => scenario::elastic_json(&sc.taskset, &res),
                    };
                    (text, res.verdict == ElasticVerdict::Feasible)
                }
            };
            match output {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => {
                    let mut out = std::io::stdout().lock();
                    out.write_all(text.as_bytes())?;
                }
            }
            Ok(if feasible { 0 } else { 2 })
        }
        Command::Simulate {
            scenario: path,
            outdir,
        } => {
            let sc = load_scenario(&path)?;
            let trace = simulate(&sc)?;
            write_trace_csv(&trace, &outdir)
                .with_context(|| format!("cannot write into {}", outdir.display()))?;
            if cli.verbose {
                eprintln!(
                    "{} adjustments, {} misses",
                    trace.adjustments.len(),
                    trace.misses.len()
                );
            }
            Ok(0)
        }
        Command::Compare {
            scenario: path,
            outdir,
        } => {
            let sc = load_scenario(&path)?;
            let mut sc_pa = sc.clone();
            sc_pa.algorithm = Algorithm::PeriodAdjust;
            let mut sc_tc = sc;
            sc_tc.algorithm = Algorithm::TaskCompress;
            let trace_pa = simulate(&sc_pa)?;
            let trace_tc = simulate(&sc_tc)?;
            std::fs::create_dir_all(&outdir)
                .with_context(|| format!("cannot create {}", outdir.display()))?;
            std::fs::write(
                outdir.join("samples-period-adjust.csv"),
                scenario::samples_csv(&trace_pa),
            )?;
            std::fs::write(
                outdir.join("samples-task-compress.csv"),
                scenario::samples_csv(&trace_tc),
            )?;
            std::fs::write(
                outdir.join("verdicts.csv"),
                scenario::verdicts_csv(&trace_pa, &trace_tc),
            )?;
            Ok(0)
        }
        Command::Validate { input } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            match parse_scenario(&text) {
                Ok(_) => {
                    println!("ok");
                    Ok(0)
                }
                Err(ScenarioParseError::Invalid(diags)) => {
                    for d in diags {
                        println!("{d}");
                    }
                    Ok(1)
                }
                Err(e @ ScenarioParseError::Syntax { .. }) => Err(e.into()),
            }
        }
    }
}
