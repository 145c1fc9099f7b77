use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use netinfer_core::bruteforce::{all_feasible_sets, min_feasible_set, DEFAULT_MAX_AGENTS};
use netinfer_core::chf::{chf_allbutk, chf_unanimity};
use netinfer_core::experiments::{run_exhaustive_smalln, run_fnr_grid, ExhaustiveOptions};
use netinfer_core::graphs::{generate_graph, GraphModel, GraphSpec};
use netinfer_core::io;
use netinfer_core::oracle::{generate_labellings, oracle_examples, Distribution, SamplerConfig};
use netinfer_core::reduction::{decode_feasible_set, encode_hitting_set};
use netinfer_core::{waterfall, InfluencerSet, Protocol, TieBreak, WaterfallConfig};
use serde_json::json;

/// Infer influencer sets from threshold opinion dynamics.
///
/// Agents are indexed from 0 in every file format.
#[derive(Parser)]
#[command(name = "netinfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw labellings and label them with a protocol on known influencers.
    Simulate(SimulateArgs),
    #[command(subcommand)]
    Infer(InferCommand),
    #[command(subcommand)]
    Reduce(ReduceCommand),
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Generate a random directed influence graph.
    Generate(GenerateArgs),
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolKind {
    Majority,
    Unanimity,
    Allbutk,
    Margin,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long, value_enum, default_value = "majority")]
    protocol: ProtocolKind,
    /// Agreeing influencers tolerated by all-but-κ.
    #[arg(long, default_value_t = 0)]
    kappa: u32,
    /// Margin for the τ-margin protocol.
    #[arg(long, default_value_t = 0)]
    tau: u32,
}

impl ProtocolArgs {
    fn protocol(&self) -> Protocol {
        match self.protocol {
            ProtocolKind::Majority => Protocol::MAJORITY,
            ProtocolKind::Unanimity => Protocol::UNANIMITY,
            ProtocolKind::Allbutk => Protocol::AllButK { kappa: self.kappa },
            ProtocolKind::Margin => Protocol::TauMargin { tau: self.tau },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Unique,
    Replace,
    Bernoulli,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Comma-separated true influencers, e.g. `0,2,3`.
    #[arg(long, value_delimiter = ',')]
    influencers: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "unique")]
    dist: Dist,
    /// Agreement probability for `--dist bernoulli`.
    #[arg(long, default_value_t = 0.5)]
    p_agree: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum InferCommand {
    /// Exact finder for unanimity and all-but-κ samples.
    Chf(ChfArgs),
    /// Greedy search for τ-margin samples.
    Waterfall(WaterfallArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ChfProtocol {
    Unanimity,
    Allbutk,
}

#[derive(Args)]
struct ChfArgs {
    #[arg(long, value_enum, default_value = "allbutk")]
    protocol: ChfProtocol,
    #[arg(long, default_value_t = 0)]
    kappa: u32,
    /// Largest subset size to try; defaults to every agent.
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakKind {
    Random,
    Filters,
    First,
}

#[derive(Args)]
struct WaterfallArgs {
    #[arg(long, default_value_t = 0)]
    tau: u32,
    #[arg(long, value_enum, default_value = "random")]
    tiebreak: TieBreakKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated source order; defaults to ascending.
    #[arg(long, value_delimiter = ',')]
    sources: Option<Vec<usize>>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Encode a Hitting Set instance as an always-changing majority sample.
    Encode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the agent layout; defaults to `<out>.layout.json`.
        #[arg(long)]
        layout: Option<PathBuf>,
    },
    /// Read a hitting set off a feasible influencer set.
    Decode {
        #[arg(long)]
        feasible: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Exhaustive search over every subset of agents.
    Brute(BruteArgs),
}

#[derive(Args)]
struct BruteArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// List every feasible set.
    #[arg(long, conflicts_with = "min_size")]
    all: bool,
    /// Report the smallest feasible set (the default).
    #[arg(long)]
    min_size: bool,
    /// Refuse inputs with more agents than this.
    #[arg(long, default_value_t = DEFAULT_MAX_AGENTS)]
    max_agents: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_model)]
    model: GraphModel,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> std::result::Result<GraphModel, String> {
    s.parse().map_err(|e: netinfer_core::Error| e.to_string())
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// False-negative rates over an (n, m, model, p) grid.
    Fnr {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every influencer set and every small sample on a tiny network.
    Exhaust {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_sample: usize,
        #[arg(long, value_enum, default_value = "random")]
        tiebreak: TieBreakKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop after this many runs.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn tie_break(kind: TieBreakKind, seed: u64) -> TieBreak {
    match kind {
        TieBreakKind::Random => TieBreak::UniformRandom { seed },
        TieBreakKind::Filters => TieBreak::Filters,
        TieBreakKind::First => TieBreak::FirstIndex,
    }
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let distribution = match args.dist {
        Dist::Unique => Distribution::UniformUnique,
        Dist::Replace => Distribution::UniformWithReplacement,
        Dist::Bernoulli => Distribution::ProductBernoulli { p_agree: args.p_agree },
    };
    let truth = InfluencerSet::new(args.influencers.iter().copied());
    truth.check_bounds(args.n)?;
    let labellings = generate_labellings(args.n, args.m, SamplerConfig { distribution, seed: args.seed })?;
    let examples = oracle_examples(&truth, args.protocol.protocol(), &labellings)?;
    let file = io::ExamplesFile::new(args.n, examples)?;
    emit(args.out.as_deref(), &io::write_examples(&file)?)?;
    Ok(ExitCode::SUCCESS)
}

fn found_or_not(out: Option<&Path>, found: Option<InfluencerSet>) -> Result<ExitCode> {
    match found {
        Some(set) => {
            emit(out, &serde_json::to_string(&json!({ "influencers": set }))?)?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            emit(out, &serde_json::to_string(&json!({ "influencers": null }))?)?;
            eprintln!("no consistent influencer set");
            Ok(ExitCode::from(2))
        }
    }
}

fn infer(command: &InferCommand) -> Result<ExitCode> {
    match command {
        InferCommand::Chf(args) => {
            let m = io::parse_examples(&read(&args.input)?)?.matching_transform()?;
            let found = match args.protocol {
                ChfProtocol::Unanimity => chf_unanimity(&m),
                ChfProtocol::Allbutk => chf_allbutk(&m, args.kappa, args.max_size),
            };
            found_or_not(args.out.as_deref(), found)
        }
        InferCommand::Waterfall(args) => {
            let m = io::parse_examples(&read(&args.input)?)?.matching_transform()?;
            let config = WaterfallConfig {
                tau: args.tau,
                tie_break: tie_break(args.tiebreak, args.seed),
                source_order: args.sources.clone(),
            };
            let result = waterfall(&m, &config)?;
            emit(args.out.as_deref(), &io::write_waterfall_result(&result)?)?;
            match result.influencers() {
                Some(set) => eprintln!("found {set}"),
                None => eprintln!("no consistent influencer set found"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn reduce(command: &ReduceCommand) -> Result<ExitCode> {
    match command {
        ReduceCommand::Encode { input, out, layout } => {
            let instance = io::parse_instance(&read(input)?)?;
            let (m, map) = encode_hitting_set(&instance);
            let file = io::ExamplesFile::new(m.n(), m.to_examples())?;
            emit(out.as_deref(), &io::write_examples(&file)?)?;
            let layout_path = layout
                .clone()
                .or_else(|| out.as_ref().map(|o| o.with_extension("layout.json")));
            match layout_path {
                Some(path) => {
                    emit(Some(&path), &io::write_layout(&map)?)?;
                    eprintln!("layout written to {}", path.display());
                }
                None => eprintln!("{}", io::write_layout(&map)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::Decode { feasible, layout, out } => {
            let set = io::parse_influencers(&read(feasible)?)?;
            let layout = io::parse_layout(&read(layout)?)?;
            let chosen = decode_feasible_set(&set, &layout)?;
            emit(out.as_deref(), &serde_json::to_string(&chosen)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify(command: &VerifyCommand) -> Result<ExitCode> {
    let VerifyCommand::Brute(args) = command;
    let m = io::parse_examples(&read(&args.input)?)?.matching_transform()?;
    let protocol = args.protocol.protocol();
    if args.all {
        let sets = all_feasible_sets(&m, protocol, args.max_agents)?;
        emit(args.out.as_deref(), &serde_json::to_string(&json!({ "feasible": sets }))?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let min = min_feasible_set(&m, protocol, args.max_agents)?;
    let size = min.as_ref().map(InfluencerSet::len);
    emit(
        args.out.as_deref(),
        &serde_json::to_string(&json!({ "min_size": size, "influencers": min }))?,
    )?;
    Ok(if min.is_some() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn generate(args: &GenerateArgs) -> Result<ExitCode> {
    let graph = generate_graph(&GraphSpec {
        model: args.model,
        n: args.n,
        p: args.p,
        seed: args.seed,
    })?;
    emit(args.out.as_deref(), &io::write_graph(&graph)?)?;
    Ok(ExitCode::SUCCESS)
}

fn experiment(command: &ExperimentCommand) -> Result<ExitCode> {
    match command {
        ExperimentCommand::Fnr { config, out } => {
            let config = io::parse_experiment_config(&read(config)?)?;
            let report = run_fnr_grid(&config)?;
            emit(out.as_deref(), report.to_csv()?.trim_end())?;
            eprint!("{}", report.error_lines());
            eprintln!("{}", serde_json::to_string(&report.summary)?);
            Ok(if report.errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        ExperimentCommand::Exhaust {
            n,
            max_sample,
            tiebreak,
            seed,
            budget,
            out,
        } => {
            let options = ExhaustiveOptions {
                tie_break: tie_break(*tiebreak, *seed),
                budget: *budget,
                ..ExhaustiveOptions::new(*n, *max_sample)
            };
            let report = run_exhaustive_smalln(&options)?;
            emit(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            Ok(if report.failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Infer(c) => infer(c),
        Command::Reduce(c) => reduce(c),
        Command::Verify(c) => verify(c),
        Command::Generate(args) => generate(args),
        Command::Experiment(c) => experiment(c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
