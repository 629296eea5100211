use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use netres::attacks::{self, AplMode, AttackKind, Eligibility, ExecuteOptions, PlanOptions};
use netres::generators::{GeneratorSpec, Model, DEFAULT_BETA};
use netres::harness::{self, ExperimentConfig, RawSeries, StrategySpec};
use netres::ingest::{self, Format};
use netres::metrics::{self, format_real};
use netres::parallel;
use netres::Execution;

/// Network resilience under node and edge attacks.
#[derive(Parser)]
#[command(name = "netres", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network and write it as an edge list.
    Generate(GenerateArgs),
    /// Print network statistics of the largest component of a file.
    Stats(StatsArgs),
    /// Run one attack strategy on a network and write the resilience series.
    Attack(AttackArgs),
    /// Run a full experiment described by a JSON config.
    Sweep(SweepArgs),
    /// Re-encode a network file in another format.
    Convert(ConvertArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    edges: usize,
    /// Rewiring probability (small-world).
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Triad-formation probability (small-world-scale-free); calibrated
    /// default for the reference sizes.
    #[arg(long)]
    p_triad: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "edgelist")]
    format: Format,
}

#[derive(Args)]
struct StatsArgs {
    input: PathBuf,
    /// Input format; detected from the extension by default.
    #[arg(long)]
    format: Option<Format>,
    /// Also print `degree <k> <count>` lines.
    #[arg(long)]
    histogram: bool,
}

#[derive(Args)]
struct AttackArgs {
    input: PathBuf,
    #[arg(long)]
    strategy: AttackKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated removal fractions.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    checkpoints: Vec<f64>,
    /// Targeted nodes: recompute degrees after every removal.
    #[arg(long)]
    recompute: bool,
    /// Break degree ties in seeded random order instead of by id.
    #[arg(long)]
    shuffle_ties: bool,
    /// Almost-random: evaluate the degree threshold on the intact graph.
    #[arg(long)]
    initial_eligibility: bool,
    /// Skip average path length measurements.
    #[arg(long)]
    no_apl: bool,
    /// Estimate average path length from this many BFS sources.
    #[arg(long)]
    apl_samples: Option<usize>,
    #[arg(long)]
    format: Option<Format>,
    /// CSV output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the removal order, one element per line.
    #[arg(long)]
    plan_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    config: PathBuf,
    out_dir: PathBuf,
    /// Worker threads for replica-level parallelism.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long)]
    from: Option<Format>,
    /// Output format; detected from the output extension by default.
    #[arg(long)]
    to: Option<Format>,
    /// Write `id<TAB>original label` lines here.
    #[arg(long)]
    labels: Option<PathBuf>,
}

/// Writes through a temporary sibling file that is renamed into place only
/// once everything has been flushed.
fn write_atomically(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = (|| -> io::Result<()> {
        let mut out = BufWriter::new(File::create(&tmp)?);
        f(&mut out)?;
        out.into_inner().map_err(|e| e.into_error())?.sync_all()
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e).with_context(|| format!("writing {}", path.display()));
    }
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn write_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => write_atomically(p, f),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn read_input(path: &Path, format: Option<Format>) -> Result<ingest::Ingested> {
    ingest::read_graph(path, format).with_context(|| format!("reading {}", path.display()))
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let spec = GeneratorSpec {
        model: args.model,
        n: args.nodes,
        target_m: args.edges,
        beta: args.beta,
        p_triad: args.p_triad,
        seed: args.seed,
    };
    let g = spec.generate().context("invalid generator parameters")?;
    eprintln!("generated {} nodes, {} edges", g.node_count(), g.edge_count());
    write_output(args.out.as_deref(), |w| ingest::write_graph(&g, args.format, w))
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let ing = read_input(&args.input, args.format)?;
    let stats = metrics::stats(&ing.graph);
    let mut out = io::stdout().lock();
    writeln!(out, "input_nodes {}", ing.simplified_nodes)?;
    writeln!(out, "input_edges {}", ing.simplified_edges)?;
    writeln!(out, "directed_input {}", ing.directed_input)?;
    for (k, v) in stats.key_values() {
        writeln!(out, "{k} {v}")?;
    }
    if args.histogram {
        for (k, count) in &stats.degree_histogram {
            writeln!(out, "degree {k} {count}")?;
        }
    }
    Ok(())
}

fn cmd_attack(args: AttackArgs) -> Result<()> {
    let ing = read_input(&args.input, args.format)?;
    let options = PlanOptions {
        recompute: args.recompute,
        shuffle_ties: args.shuffle_ties,
        eligibility: if args.initial_eligibility { Eligibility::Initial } else { Eligibility::Current },
    };
    let strategy = StrategySpec { kind: args.strategy, options };
    let plan = attacks::plan(&ing.graph, args.strategy, args.seed, &options);
    let apl = match (args.no_apl, args.apl_samples) {
        (true, _) => AplMode::Off,
        (false, None) => AplMode::Exact,
        (false, Some(0)) => bail!("--apl-samples must be at least 1"),
        (false, Some(k)) => AplMode::Sampled { sources: k },
    };
    eprintln!(
        "{}: {} nodes, {} edges, {} removals planned",
        args.strategy,
        ing.graph.node_count(),
        ing.graph.edge_count(),
        plan.len()
    );
    let series = attacks::execute_with(
        &ing.graph,
        &plan,
        &args.checkpoints,
        &ExecuteOptions { apl, exec: Execution::default() },
    )?;
    if let Some(path) = &args.plan_out {
        write_atomically(path, |w| plan.write_text(w))?;
    }
    let source = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().replace([',', '"'], "_"))
        .unwrap_or_else(|| "input".to_string());
    let breakdown = harness::percolation_breakdown(&series);
    let raw = [RawSeries { source, strategy: strategy.label(), replica: 0, series }];
    write_output(args.out.as_deref(), |w| harness::write_raw_csv(&raw, w))?;
    let fmt = |x: Option<f64>| x.map(format_real).unwrap_or_else(|| "none".to_string());
    let mut report: Box<dyn Write> = if args.out.is_some() { Box::new(io::stdout()) } else { Box::new(io::stderr()) };
    writeln!(report, "fallback_onset {}", fmt(raw[0].series.fallback_onset))?;
    writeln!(report, "breakdown {}", fmt(breakdown))?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut config = ExperimentConfig::from_json(&text).context("parsing sweep config")?;
    if let Some(dir) = args.config.parent() {
        config.resolve_paths(dir);
    }
    config.validate()?;
    eprintln!(
        "sweep: {} sources x {} strategies x {} replicas",
        config.sources.len(),
        config.strategies.len(),
        config.replicas
    );
    let result = parallel::with_threads(args.jobs, |exec| harness::run_with(&config, exec))?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    write_atomically(&args.out_dir.join("raw.csv"), |w| harness::write_raw_csv(&result.raw, w))?;
    write_atomically(&args.out_dir.join("aggregate.csv"), |w| {
        harness::write_aggregate_csv(&result.aggregate, w)
    })?;
    write_atomically(&args.out_dir.join("summary.json"), |w| {
        harness::write_summary_json(&result.summary, w)
    })?;
    eprintln!(
        "wrote {} series ({} generated networks) to {}",
        result.summary.series,
        result.summary.generated_networks,
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let ing = read_input(&args.input, args.from)?;
    let to = args.to.unwrap_or_else(|| Format::from_path(&args.output));
    write_atomically(&args.output, |w| ingest::write_graph(&ing.graph, to, w))?;
    if let Some(path) = &args.labels {
        write_atomically(path, |w| ing.labels.write_tsv(w))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
