//! Experiment sweeps: every (source, strategy, replica) combination is run
//! over the configured checkpoints and summarised as per-checkpoint means and
//! standard deviations.

use std::collections::HashSet;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{self, AplMode, AttackError, AttackKind, Eligibility, ExecuteOptions, PlanOptions};
use crate::generators::{GeneratorError, GeneratorSpec};
use crate::graph::Graph;
use crate::ingest::{self, Format, IngestError};
use crate::metrics::ResilienceSeries;
use crate::parallel::Execution;

/// LCC fraction below which a network counts as broken down.
pub const BREAKDOWN_THRESHOLD: f64 = 0.10;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("source `{name}`: {source}")]
    Ingest { name: String, source: IngestError },
    #[error("source `{name}` replica {replica}: {source}")]
    Generator { name: String, replica: usize, source: GeneratorError },
    #[error("source `{name}`, {strategy}, replica {replica}: {source}")]
    Attack { name: String, strategy: String, replica: usize, source: AttackError },
    #[error("reading config: {0}")]
    ConfigSyntax(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A named graph: either a file on disk or a generator spec. Exactly one of
/// `file` and `generator` must be set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Its `seed` is replaced by the replica seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

impl SourceSpec {
    pub fn file(name: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        SourceSpec { name: name.into(), file: Some(path.into()), format: None, generator: None }
    }

    pub fn generated(name: impl Into<String>, spec: GeneratorSpec) -> Self {
        SourceSpec { name: name.into(), file: None, format: None, generator: Some(spec) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "StrategyRepr")]
pub struct StrategySpec {
    pub kind: AttackKind,
    pub options: PlanOptions,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StrategyRepr {
    Name(AttackKind),
    Full {
        kind: AttackKind,
        #[serde(flatten)]
        options: PlanOptions,
    },
}

impl From<StrategyRepr> for StrategySpec {
    fn from(r: StrategyRepr) -> Self {
        match r {
            StrategyRepr::Name(kind) => StrategySpec::new(kind),
            StrategyRepr::Full { kind, options } => StrategySpec { kind, options },
        }
    }
}

impl StrategySpec {
    pub fn new(kind: AttackKind) -> Self {
        StrategySpec { kind, options: PlanOptions::default() }
    }

    /// Strategy name with a `+flag` suffix per non-default option.
    pub fn label(&self) -> String {
        let mut s = self.kind.name().to_string();
        if self.options.recompute {
            s.push_str("+recompute");
        }
        if self.options.shuffle_ties {
            s.push_str("+shuffle-ties");
        }
        if self.options.eligibility == Eligibility::Initial {
            s.push_str("+initial-eligibility");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sources: Vec<SourceSpec>,
    pub strategies: Vec<StrategySpec>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "attacks::default_checkpoints")]
    pub checkpoints: Vec<f64>,
    #[serde(default = "default_true")]
    pub apl_enabled: bool,
    /// Estimate APL from this many BFS sources instead of exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub apl_samples: Option<usize>,
}

fn default_replicas() -> usize {
    5
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Relative `file` paths are taken relative to `dir`.
    pub fn resolve_paths(&mut self, dir: &Path) {
        for s in &mut self.sources {
            if let Some(f) = &s.file {
                if f.is_relative() {
                    s.file = Some(dir.join(f));
                }
            }
        }
    }

    /// Every problem found, not just the first.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut errs = Vec::new();
        if self.replicas == 0 {
            errs.push("replicas must be at least 1".to_string());
        }
        if self.sources.is_empty() {
            errs.push("no sources given".to_string());
        }
        if self.strategies.is_empty() {
            errs.push("no strategies given".to_string());
        }
        if let Err(e) = attacks::validate_checkpoints(&self.checkpoints) {
            errs.push(e.to_string());
        }
        if self.apl_samples == Some(0) {
            errs.push("apl_samples must be at least 1".to_string());
        }
        let mut names = HashSet::new();
        for s in &self.sources {
            if s.name.is_empty() || s.name.contains([',', '"', '\n']) {
                errs.push(format!("source name `{}` must be non-empty without commas or quotes", s.name));
            }
            if !names.insert(s.name.as_str()) {
                errs.push(format!("duplicate source name `{}`", s.name));
            }
            match (&s.file, &s.generator) {
                (Some(_), Some(_)) | (None, None) => {
                    errs.push(format!("source `{}` needs exactly one of `file` or `generator`", s.name))
                }
                (Some(path), None) => {
                    if !path.is_file() {
                        errs.push(format!("source `{}`: file {} not found", s.name, path.display()));
                    }
                }
                (None, Some(spec)) => {
                    if let Err(e) = spec.validate() {
                        errs.push(format!("source `{}`: {e}", s.name));
                    }
                }
            }
        }
        let mut labels = HashSet::new();
        for st in &self.strategies {
            if !labels.insert(st.label()) {
                errs.push(format!("duplicate strategy `{}`", st.label()));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Config(errs))
        }
    }

    fn execute_options(&self, exec: Execution) -> ExecuteOptions {
        let apl = match (self.apl_enabled, self.apl_samples) {
            (false, _) => AplMode::Off,
            (true, None) => AplMode::Exact,
            (true, Some(sources)) => AplMode::Sampled { sources },
        };
        ExecuteOptions { apl, exec }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RawSeries {
    pub source: String,
    pub strategy: String,
    pub replica: usize,
    pub series: ResilienceSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub source: String,
    pub strategy: String,
    pub frac_removed: f64,
    pub lcc_frac_mean: f64,
    pub lcc_frac_std: f64,
    /// Over replicas whose LCC still had an APL at this checkpoint.
    pub apl_mean: Option<f64>,
    pub apl_std: Option<f64>,
    pub apl_defined: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AggregateSeries {
    pub rows: Vec<AggregateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BreakdownEntry {
    pub source: String,
    pub strategy: String,
    /// First checkpoint where the mean LCC fraction drops below the threshold.
    pub breakdown_fraction: Option<f64>,
    pub fallback_onset_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub sources: usize,
    pub strategies: usize,
    pub replicas: usize,
    pub series: usize,
    pub generated_networks: usize,
    pub breakdown_threshold: f64,
    pub breakdown: Vec<BreakdownEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    /// Ordered by source, strategy, replica (configuration order).
    pub raw: Vec<RawSeries>,
    pub aggregate: AggregateSeries,
    pub summary: Summary,
}

/// Smallest checkpoint with LCC fraction below [`BREAKDOWN_THRESHOLD`].
pub fn percolation_breakdown(series: &ResilienceSeries) -> Option<f64> {
    breakdown_of(series.points.iter().map(|p| (p.fraction_removed, p.lcc_fraction)))
}

fn breakdown_of(points: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    points
        .into_iter()
        .find(|&(_, lcc)| lcc < BREAKDOWN_THRESHOLD)
        .map(|(f, _)| f)
}

/// Population mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    run_with(config, Execution::default())
}

enum Loaded {
    File(Arc<Graph>),
    Generator(GeneratorSpec),
}

pub fn run_with(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentResult, HarnessError> {
    config.validate()?;
    let loaded = config
        .sources
        .iter()
        .map(|s| match (&s.file, &s.generator) {
            (Some(path), _) => ingest::read_graph(path, s.format)
                .map(|ing| Loaded::File(Arc::new(ing.graph)))
                .map_err(|source| HarnessError::Ingest { name: s.name.clone(), source }),
            (None, Some(spec)) => Ok(Loaded::Generator(spec.clone())),
            (None, None) => unreachable!("validated"),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let opts = config.execute_options(exec);
    let units: Vec<(usize, usize)> = (0..config.sources.len())
        .flat_map(|s| (0..config.replicas).map(move |r| (s, r)))
        .collect();
    // One unit = one graph instance attacked by every strategy.
    let per_unit = exec.map_collect(&units, |&(si, replica)| -> Result<Vec<ResilienceSeries>, HarnessError> {
        let name = &config.sources[si].name;
        let seed = config.base_seed.wrapping_add(replica as u64);
        let graph = match &loaded[si] {
            Loaded::File(g) => Arc::clone(g),
            Loaded::Generator(spec) => Arc::new(spec.with_seed(seed).generate().map_err(|source| {
                HarnessError::Generator { name: name.clone(), replica, source }
            })?),
        };
        config
            .strategies
            .iter()
            .map(|st| {
                let plan = attacks::plan(&graph, st.kind, seed, &st.options);
                attacks::execute_with(&graph, &plan, &config.checkpoints, &opts).map_err(|source| {
                    HarnessError::Attack { name: name.clone(), strategy: st.label(), replica, source }
                })
            })
            .collect()
    });
    let per_unit = per_unit.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut raw = Vec::with_capacity(units.len() * config.strategies.len());
    for (si, source) in config.sources.iter().enumerate() {
        for (ki, st) in config.strategies.iter().enumerate() {
            for replica in 0..config.replicas {
                raw.push(RawSeries {
                    source: source.name.clone(),
                    strategy: st.label(),
                    replica,
                    series: per_unit[si * config.replicas + replica][ki].clone(),
                });
            }
        }
    }

    let aggregate = aggregate(&raw, config.replicas);
    let breakdown = raw
        .chunks(config.replicas)
        .map(|group| {
            let first = &group[0];
            let rows = aggregate
                .rows
                .iter()
                .filter(|r| r.source == first.source && r.strategy == first.strategy);
            let onsets: Vec<f64> = group.iter().filter_map(|r| r.series.fallback_onset).collect();
            BreakdownEntry {
                source: first.source.clone(),
                strategy: first.strategy.clone(),
                breakdown_fraction: breakdown_of(rows.map(|r| (r.frac_removed, r.lcc_frac_mean))),
                fallback_onset_mean: (!onsets.is_empty()).then(|| mean_std(&onsets).0),
            }
        })
        .collect();
    let generated = config.sources.iter().filter(|s| s.generator.is_some()).count();
    let summary = Summary {
        sources: config.sources.len(),
        strategies: config.strategies.len(),
        replicas: config.replicas,
        series: raw.len(),
        generated_networks: generated * config.replicas,
        breakdown_threshold: BREAKDOWN_THRESHOLD,
        breakdown,
    };
    Ok(ExperimentResult { raw, aggregate, summary })
}

/// Groups consecutive `replicas`-sized runs of `raw` and reduces each
/// checkpoint across them.
pub fn aggregate(raw: &[RawSeries], replicas: usize) -> AggregateSeries {
    let mut rows = Vec::new();
    for group in raw.chunks(replicas.max(1)) {
        let first = &group[0];
        for (i, point) in first.series.points.iter().enumerate() {
            let lcc: Vec<f64> = group.iter().map(|r| r.series.points[i].lcc_fraction).collect();
            let apl: Vec<f64> = group.iter().filter_map(|r| r.series.points[i].apl).collect();
            let (lcc_mean, lcc_std) = mean_std(&lcc);
            let (apl_mean, apl_std) = if apl.is_empty() {
                (None, None)
            } else {
                let (m, s) = mean_std(&apl);
                (Some(m), Some(s))
            };
            rows.push(AggregateRow {
                source: first.source.clone(),
                strategy: first.strategy.clone(),
                frac_removed: point.fraction_removed,
                lcc_frac_mean: lcc_mean,
                lcc_frac_std: lcc_std,
                apl_mean,
                apl_std,
                apl_defined: apl.len(),
            });
        }
    }
    AggregateSeries { rows }
}

/// Six significant digits in plain decimal notation. Magnitudes below 1e-12
/// are rounding residue and print as zero.
pub fn format_sig6(x: f64) -> String {
    if x.abs() < 1e-12 || !x.is_finite() {
        let x = if x.is_finite() { 0.0 } else { x };
        return format!("{:.5}", x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_default()
}

pub const RAW_HEADER: &str = "source,strategy,replica,frac_removed,lcc_frac,apl";
pub const AGGREGATE_HEADER: &str =
    "source,strategy,frac_removed,lcc_frac_mean,lcc_frac_std,apl_mean,apl_std,apl_defined";

pub fn write_raw_csv<W: Write>(raw: &[RawSeries], mut out: W) -> io::Result<()> {
    writeln!(out, "{RAW_HEADER}")?;
    for r in raw {
        for p in &r.series.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.source,
                r.strategy,
                r.replica,
                format_sig6(p.fraction_removed),
                format_sig6(p.lcc_fraction),
                opt(p.apl)
            )?;
        }
    }
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(agg: &AggregateSeries, mut out: W) -> io::Result<()> {
    writeln!(out, "{AGGREGATE_HEADER}")?;
    for r in &agg.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.source,
            r.strategy,
            format_sig6(r.frac_removed),
            format_sig6(r.lcc_frac_mean),
            format_sig6(r.lcc_frac_std),
            opt(r.apl_mean),
            opt(r.apl_std),
            r.apl_defined
        )?;
    }
    Ok(())
}

/// Raw table, a blank line, then the aggregate table.
pub fn emit_csv<W: Write>(result: &ExperimentResult, mut out: W) -> io::Result<()> {
    write_raw_csv(&result.raw, &mut out)?;
    writeln!(out)?;
    write_aggregate_csv(&result.aggregate, &mut out)
}

pub fn write_summary_json<W: Write>(summary: &Summary, mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)
}
