//! `mdsched`: decompose callback graphs, generate workloads, simulate task
//! sets and run acceptance-ratio campaigns.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on I/O failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdsched::experiment::{run_campaign, write_csv, CampaignConfig, ExperimentError};
use mdsched::rational::{self, Rational};
use mdsched::simulator::{run, Mode, Policy, SimConfig};
use mdsched::taskmodel::{decompose, TaskSet};
use mdsched::time::Micros;
use mdsched::workload::{ExecTimeSampler, GeneratedWorkload, Generator, LoadFactor, WorkloadTemplate};
use num_rational::Ratio;

#[derive(Debug, Parser)]
#[command(name = "mdsched", version, about = "Multi-deadline DAG scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a callback graph into DAG tasks and assign sink deadlines.
    Decompose {
        /// Callback graph JSON (a template with a `sampler` block is accepted).
        #[arg(long)]
        graph: PathBuf,
        /// Deadline factor applied to each sink's critical path.
        #[arg(long, default_value = "1.2", value_parser = parse_rational)]
        beta: Rational,
        /// Output task set JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one execution-time assignment from a template.
    Generate {
        /// Template JSON; the shipped Autoware-like template when omitted.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long, default_value = "1.2", value_parser = parse_rational)]
        beta: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Load factor in (0, 1] scaling every sampled execution time.
        #[arg(long, default_value = "1", value_parser = parse_rational)]
        lambda: Rational,
        /// Output workload JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one run and print the result JSON.
    Simulate {
        /// Task set JSON, or a workload written by `generate`. Without fixed
        /// execution times they are sampled with `--seed`. Defaults to the
        /// shipped template.
        #[arg(long)]
        taskset: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        cores: usize,
        /// Simulated window, e.g. `3000ms`, `250us` or `42` (microseconds).
        #[arg(long, default_value = "3000ms")]
        duration: Micros,
        #[arg(long, default_value = "gedf_rad")]
        policy: Policy,
        #[arg(long, default_value = "non_preemptive")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the event trace as JSON lines to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run an acceptance-ratio campaign and write runs.csv and summary.csv.
    Experiment {
        /// Campaign config JSON; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; the output does not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Template JSON; the shipped Autoware-like template when omitted.
        #[arg(long)]
        template: Option<PathBuf>,
    },
    /// Write the shipped Autoware-like template JSON.
    ExportTemplate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    fn invalid(e: impl ToString) -> Self {
        CliError::Invalid(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational, rational::ParseRationalError> {
    rational::parse(s)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn load_template(path: Option<&Path>) -> Result<WorkloadTemplate, CliError> {
    match path {
        Some(p) => WorkloadTemplate::from_json(&read(p)?).map_err(CliError::invalid),
        None => Ok(WorkloadTemplate::autoware_like()),
    }
}

fn default_beta() -> Rational {
    Ratio::new(6, 5)
}

fn cmd_decompose(graph: &Path, beta: Rational, out: Option<&Path>) -> Result<(), CliError> {
    let template = load_template(Some(graph))?;
    let set = decompose(&template.graph(), beta).map_err(CliError::invalid)?;
    emit(out, &set.to_json_pretty())
}

fn cmd_generate(
    template: Option<&Path>,
    beta: Rational,
    seed: u64,
    lambda: Rational,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let template = load_template(template)?;
    let generator = Generator::new(&template, &template.effective_sampler(), beta, LoadFactor::fixed(lambda))
        .map_err(CliError::invalid)?;
    let draw = generator.draw(seed);
    let workload = GeneratedWorkload {
        seed,
        lambda: draw.lambda,
        taskset: generator.taskset().clone(),
        exec: draw.exec,
    };
    emit(out, &workload.to_json_pretty())
}

/// Resolves the simulation input: fixed times from a generated workload, or
/// times sampled at λ = 1 with `seed` for a bare task set or the template.
fn simulation_input(path: Option<&Path>, seed: u64) -> Result<GeneratedWorkload, CliError> {
    let full_load = LoadFactor::fixed(Ratio::from_integer(1));
    let generator = match path {
        None => {
            let template = WorkloadTemplate::autoware_like();
            Generator::new(&template, &template.effective_sampler(), default_beta(), full_load)
        }
        Some(p) => {
            let text = read(p)?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(CliError::invalid)?;
            if value.get("exec").is_some() {
                return GeneratedWorkload::from_json(&text).map_err(CliError::invalid);
            }
            let set = TaskSet::from_json(&text).map_err(CliError::invalid)?;
            let sampler = ExecTimeSampler::default_for_taskset(&set);
            Generator::for_taskset(set, &sampler, full_load)
        }
    }
    .map_err(CliError::invalid)?;
    let draw = generator.draw(seed);
    Ok(GeneratedWorkload {
        seed,
        lambda: draw.lambda,
        taskset: generator.taskset().clone(),
        exec: draw.exec,
    })
}

fn cmd_simulate(path: Option<&Path>, config: SimConfig, seed: u64, trace: Option<&Path>) -> Result<(), CliError> {
    let input = simulation_input(path, seed)?;
    let result = run(&input.taskset, &input.exec, &config.trace(trace.is_some())).map_err(CliError::invalid)?;
    if let Some(p) = trace {
        let io_err = |source| CliError::Io {
            path: p.to_path_buf(),
            source,
        };
        let file = fs::File::create(p).map_err(io_err)?;
        let mut w = io::BufWriter::new(file);
        result.write_trace(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    let mut summary = result;
    summary.trace.clear();
    emit(None, &serde_json::to_string_pretty(&summary).map_err(CliError::invalid)?)
}

fn cmd_experiment(config: Option<&Path>, out: &Path, jobs: usize, template: Option<&Path>) -> Result<(), CliError> {
    let config = match config {
        Some(p) => CampaignConfig::from_json(&read(p)?).map_err(CliError::invalid)?,
        None => CampaignConfig::default(),
    };
    if jobs == 0 {
        return Err(CliError::invalid("--jobs must be at least 1"));
    }
    let template = load_template(template)?;
    let summary = run_campaign(&config, &template, jobs).map_err(CliError::invalid)?;
    write_csv(&summary, out).map_err(|e| match e {
        ExperimentError::Io(source) => CliError::Io {
            path: out.to_path_buf(),
            source,
        },
        other => CliError::invalid(other),
    })?;
    let low_n = summary.buckets.iter().filter(|b| b.low_n()).count();
    eprintln!(
        "wrote {} runs in {} buckets to {} ({low_n} buckets below {} runs)",
        config.n_runs,
        summary.buckets.len(),
        out.display(),
        mdsched::experiment::LOW_N_THRESHOLD
    );
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Decompose { graph, beta, out } => cmd_decompose(&graph, beta, out.as_deref()),
        Command::Generate {
            template,
            beta,
            seed,
            lambda,
            out,
        } => cmd_generate(template.as_deref(), beta, seed, lambda, out.as_deref()),
        Command::Simulate {
            taskset,
            cores,
            duration,
            policy,
            mode,
            seed,
            trace,
        } => cmd_simulate(
            taskset.as_deref(),
            SimConfig::new(cores, duration.0, policy).mode(mode),
            seed,
            trace.as_deref(),
        ),
        Command::Experiment {
            config,
            out,
            jobs,
            template,
        } => cmd_experiment(config.as_deref(), &out, jobs, template.as_deref()),
        Command::ExportTemplate { out } => emit(out.as_deref(), &WorkloadTemplate::autoware_like().to_json_pretty()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
