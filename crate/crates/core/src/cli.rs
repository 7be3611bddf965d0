//! The `stream-scc` command line.
//!
//! Exit status: 0 on success, 1 on I/O failure, 2 on invalid input or
//! configuration, 3 when the latency budget is exceeded.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::{self, ApproxConfig, DeltaConfig, IngestError, TimeScale};
use crate::metrics::{self, sig9, ApproxReport, MetricsError, DEFAULT_LATENCY_BUDGET};
use crate::scc::{self, Algorithm, CollectSink, CountSink};
use crate::stream::{StreamGraph, Tick};

#[derive(Debug, Parser)]
#[command(name = "stream-scc", version, about = "Strongly connected components of stream graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the components of one stream.
    Scc(SccArgs),
    /// Count components for several approximation steps.
    Sweep(SweepArgs),
    /// Compare latencies of the stream and of its approximations.
    LatencyCompare(LatencyArgs),
    /// Size and duration distributions of the components.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `u v t` per line
    Interactions,
    /// `n u b e` and `l u v b e` per line
    Segments,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "interactions")]
    pub format: Format,
    /// Duration of each interaction, in input time units. Required for interactions.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Ticks per input time unit; decimal times are rounded to ticks.
    #[arg(long, default_value_t = 1)]
    pub time_scale: i64,
    /// Accept Δ ≥ δ, which may drop segments.
    #[arg(long = "allow-large-Delta")]
    pub allow_large_delta: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SccArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "direct")]
    pub algorithm: Algorithm,
    /// Approximation step, in input time units; 0 leaves the stream unchanged.
    #[arg(long = "Delta", allow_hyphen_values = true)]
    pub big_delta: Option<String>,
    /// Count components without writing them.
    #[arg(long)]
    pub count_only: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "direct")]
    pub algorithm: Algorithm,
    /// Approximation step, repeatable; 0 leaves the stream unchanged.
    #[arg(long = "Delta", required = true, allow_hyphen_values = true)]
    pub big_delta: Vec<String>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LatencyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "Delta", required = true, allow_hyphen_values = true)]
    pub big_delta: Vec<String>,
    /// Largest accepted n × event_times per latency computation.
    #[arg(long, default_value_t = DEFAULT_LATENCY_BUDGET)]
    pub latency_budget: u128,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "direct")]
    pub algorithm: Algorithm,
    #[arg(long = "Delta", allow_hyphen_values = true)]
    pub big_delta: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: IngestError },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Input { source: IngestError::Io(_), .. } => 1,
            CliError::Config(_) | CliError::Input { .. } => 2,
            CliError::Metrics(MetricsError::BudgetExceeded { .. }) => 3,
            CliError::Metrics(MetricsError::MismatchedNodeSets) => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

struct Loaded {
    stream: StreamGraph,
    scale: TimeScale,
    delta: Option<Tick>,
}

fn parse_time(scale: TimeScale, flag: &str, token: &str) -> Result<Tick, CliError> {
    scale.parse(token).map_err(|r| CliError::Config(format!("{flag}: {r}")))
}

fn load(args: &InputArgs) -> Result<Loaded, CliError> {
    let scale = TimeScale::new(args.time_scale).map_err(|e| CliError::Config(e.to_string()))?;
    let delta = args.delta.as_deref().map(|d| parse_time(scale, "--delta", d)).transpose()?;
    let file = File::open(&args.input).map_err(io_err(&args.input))?;
    let reader = BufReader::new(file);
    let input_err = |source| CliError::Input { path: args.input.clone(), source };
    let stream = match args.format {
        Format::Interactions => {
            let delta =
                delta.ok_or_else(|| CliError::Config("--delta is required with --format interactions".into()))?;
            ingest::parse_interactions(reader, DeltaConfig { delta }, scale).map_err(input_err)?
        }
        Format::Segments => ingest::parse_segments(reader, scale).map_err(input_err)?,
    };
    Ok(Loaded { stream, scale, delta })
}

/// Parses and checks approximation steps, in ticks.
fn steps(loaded: &Loaded, args: &InputArgs, tokens: &[String]) -> Result<Vec<Tick>, CliError> {
    tokens
        .iter()
        .map(|tok| {
            let step = parse_time(loaded.scale, "--Delta", tok)?;
            if step < 0 {
                return Err(CliError::Config(format!("--Delta must be non-negative, got {tok}")));
            }
            if let Some(delta) = loaded.delta {
                if step > 0 && step >= delta && !args.allow_large_delta {
                    return Err(CliError::Config(format!(
                        "--Delta {tok} is not below --delta; segments may vanish (pass --allow-large-Delta to accept)"
                    )));
                }
            }
            Ok(step)
        })
        .collect()
}

fn approximate(stream: &StreamGraph, step: Tick) -> StreamGraph {
    if step == 0 {
        return stream.clone();
    }
    let a = ingest::approximate(stream, ApproxConfig { delta: step }).expect("step is positive");
    if a.dropped_node_segments + a.dropped_link_segments > 0 {
        eprintln!(
            "warning: Δ = {step} dropped {} node and {} link segments",
            a.dropped_node_segments, a.dropped_link_segments
        );
    }
    a.stream
}

fn prepare(args: &InputArgs, step: &Option<String>) -> Result<StreamGraph, CliError> {
    let loaded = load(args)?;
    let step = steps(&loaded, args, step.as_slice())?.first().copied().unwrap_or(0);
    Ok(approximate(&loaded.stream, step))
}

fn create(dir: &Path, name: &str) -> Result<(BufWriter<File>, PathBuf), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(io_err(&path))?;
    Ok((BufWriter::new(file), path))
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let (mut w, path) = create(dir, name)?;
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        b = b.num_threads(j);
    }
    b.build().map_err(|e| CliError::Config(e.to_string()))
}

pub fn cmd_scc(args: &SccArgs) -> Result<(), CliError> {
    let stream = prepare(&args.input, &args.big_delta)?;
    let stats = stream.stats();
    let started = Instant::now();
    let summary = if args.count_only {
        scc::run(args.algorithm, &stream, &mut CountSink::default())
    } else {
        let mut sink = CollectSink::default();
        let summary = scc::run(args.algorithm, &stream, &mut sink);
        let comps = sink.into_sorted();
        write_file(&args.input.out, "components.txt", |w| {
            for c in &comps {
                write!(w, "{} {}", c.interval, c.size())?;
                for &u in &c.nodes {
                    write!(w, " {}", stream.label(u))?;
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
        summary
    };
    let json = serde_json::json!({
        "algorithm": args.algorithm.name(),
        "N": stats.node_segments,
        "M": stats.link_segments,
        "n": stats.n,
        "m": stats.m,
        "event_times": stats.event_time_count,
        "component_count": summary.component_count,
        "wall_ms": started.elapsed().as_millis() as u64,
    });
    write_file(&args.input.out, "summary.json", |w| writeln!(w, "{json}"))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let steps = steps(&loaded, &args.input, &args.big_delta)?;
    let rows: Vec<(Tick, usize, usize, u64)> = thread_pool(args.jobs)?.install(|| {
        steps
            .par_iter()
            .map(|&step| {
                let s = approximate(&loaded.stream, step);
                let started = Instant::now();
                let summary = scc::run(args.algorithm, &s, &mut CountSink::default());
                (step, summary.component_count, s.event_times().len(), started.elapsed().as_millis() as u64)
            })
            .collect()
    });
    write_file(&args.input.out, "sweep.csv", |w| {
        writeln!(w, "Delta,component_count,event_time_count,wall_ms")?;
        for (step, count, times, ms) in rows {
            writeln!(w, "{step},{count},{times},{ms}")?;
        }
        Ok(())
    })
}

pub fn cmd_latency_compare(args: &LatencyArgs) -> Result<(), CliError> {
    let loaded = load(&args.input)?;
    let steps = steps(&loaded, &args.input, &args.big_delta)?;
    let budget = args.latency_budget;
    let exact = metrics::latencies(&loaded.stream, budget)?;
    let reports: Vec<(Tick, ApproxReport)> = thread_pool(args.jobs)?.install(|| {
        steps
            .par_iter()
            .map(|&step| {
                let approx = metrics::latencies(&approximate(&loaded.stream, step), budget)?;
                Ok((step, metrics::compare_matrices(&exact, &approx)?))
            })
            .collect::<Result<_, MetricsError>>()
    })?;
    write_file(&args.input.out, "latency.csv", |w| {
        writeln!(w, "Delta,lrmse,avg_difference,avg_stretch,missing_paths,pair_count_used")?;
        for (step, r) in &reports {
            writeln!(
                w,
                "{step},{},{},{},{},{}",
                sig9(r.lrmse),
                sig9(r.avg_difference),
                sig9(r.avg_stretch),
                r.missing_paths,
                r.pair_count_used
            )?;
        }
        Ok(())
    })?;
    write_file(&args.input.out, "latency.json", |w| {
        for (step, r) in &reports {
            let json = serde_json::json!({
                "Delta": step,
                "lrmse": sig9(r.lrmse),
                "avg_difference": sig9(r.avg_difference),
                "avg_stretch": sig9(r.avg_stretch),
                "missing_paths": r.missing_paths,
                "pair_count_used": r.pair_count_used,
            });
            writeln!(w, "{json}")?;
        }
        Ok(())
    })
}

pub fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let stream = prepare(&args.input, &args.big_delta)?;
    let stats = metrics::component_stats(&scc::components(args.algorithm, &stream));
    write_file(&args.input.out, "stats.csv", |w| {
        writeln!(w, "size,duration")?;
        for r in &stats.records {
            writeln!(w, "{},{}", r.size, r.duration)?;
        }
        Ok(())
    })?;
    write_file(&args.input.out, "stats.json", |w| writeln!(w, "{}", stats.summary()))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Scc(a) => cmd_scc(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::LatencyCompare(a) => cmd_latency_compare(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
