//! Removal plans for the six attack strategies and their execution against a
//! graph.
//!
//! A plan is built once, up front, as a full permutation of the node or edge
//! set. Executing it removes elements in order and measures the largest
//! component at each checkpoint.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeKey, Graph, GraphError, NodeId};
use crate::metrics::{self, ResilienceSeries, SeriesPoint};
use crate::parallel::Execution;
use crate::rng::{self, Purpose, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    TargetedNodes,
    RandomNodes,
    AlmostRandomNodes,
    TargetedEdges,
    RandomEdges,
    AlmostRandomEdges,
}

impl AttackKind {
    pub const ALL: [AttackKind; 6] = [
        AttackKind::TargetedNodes,
        AttackKind::RandomNodes,
        AttackKind::AlmostRandomNodes,
        AttackKind::TargetedEdges,
        AttackKind::RandomEdges,
        AttackKind::AlmostRandomEdges,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::TargetedNodes => "targeted-nodes",
            AttackKind::RandomNodes => "random-nodes",
            AttackKind::AlmostRandomNodes => "almost-random-nodes",
            AttackKind::TargetedEdges => "targeted-edges",
            AttackKind::RandomEdges => "random-edges",
            AttackKind::AlmostRandomEdges => "almost-random-edges",
        }
    }

    pub fn removes_nodes(self) -> bool {
        matches!(
            self,
            AttackKind::TargetedNodes | AttackKind::RandomNodes | AttackKind::AlmostRandomNodes
        )
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AttackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown attack strategy `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("checkpoint {0} is outside [0, 1]")]
    CheckpointOutOfRange(f64),
    #[error("checkpoints must be strictly increasing")]
    CheckpointsUnsorted,
    #[error("plan does not fit the graph: {0}")]
    PlanMismatch(String),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("malformed plan text at line {line}: {msg}")]
    PlanParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<GraphError> for AttackError {
    fn from(e: GraphError) -> Self {
        AttackError::PlanMismatch(e.to_string())
    }
}

/// How the degree threshold of almost-random selection is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eligibility {
    /// Degrees in the graph as it stands after previous removals.
    #[default]
    Current,
    /// Degrees in the intact graph.
    Initial,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanOptions {
    /// Targeted nodes: re-select the current highest-degree node after every
    /// removal instead of ordering by initial degree.
    #[serde(default)]
    pub recompute: bool,
    /// Targeted variants: break degree ties by a seeded random order rather
    /// than by id.
    #[serde(default)]
    pub shuffle_ties: bool,
    #[serde(default)]
    pub eligibility: Eligibility,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Targets {
    Nodes(Vec<NodeId>),
    Edges(Vec<EdgeKey>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Nodes(v) => v.len(),
            Targets::Edges(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub kind: AttackKind,
    pub targets: Targets,
    pub seed: u64,
    pub recompute: bool,
    /// Index of the first step chosen by the uniform fallback of an
    /// almost-random plan; every later step is a fallback step too.
    pub fallback_onset: Option<usize>,
}

impl AttackPlan {
    fn nodes(kind: AttackKind, seq: Vec<NodeId>, seed: u64) -> Self {
        AttackPlan { kind, targets: Targets::Nodes(seq), seed, recompute: false, fallback_onset: None }
    }

    fn edges(kind: AttackKind, seq: Vec<EdgeKey>, seed: u64) -> Self {
        AttackPlan { kind, targets: Targets::Edges(seq), seed, recompute: false, fallback_onset: None }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn is_fallback_step(&self, step: usize) -> bool {
        self.fallback_onset.is_some_and(|onset| step >= onset)
    }

    /// One element per line (`u` for nodes, `u v` for edges) after a
    /// `#`-prefixed header carrying the plan metadata.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "# kind={} seed={} recompute={}", self.kind, self.seed, self.recompute)?;
        if let Some(onset) = self.fallback_onset {
            write!(out, " fallback_onset={onset}")?;
        }
        writeln!(out)?;
        match &self.targets {
            Targets::Nodes(v) => v.iter().try_for_each(|u| writeln!(out, "{u}")),
            Targets::Edges(v) => v.iter().try_for_each(|e| writeln!(out, "{e}")),
        }
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<AttackPlan, AttackError> {
        let mut lines = input.lines().enumerate();
        let err = |line: usize, msg: &str| AttackError::PlanParse { line: line + 1, msg: msg.to_string() };
        let (_, header) = lines.next().ok_or_else(|| err(0, "missing header"))?;
        let header = header?;
        let body = header.strip_prefix('#').ok_or_else(|| err(0, "header must start with '#'"))?;
        let (mut kind, mut seed, mut recompute, mut onset) = (None, 0u64, false, None);
        for field in body.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| err(0, "expected key=value"))?;
            match key {
                "kind" => kind = Some(value.parse::<AttackKind>().map_err(|e| err(0, &e))?),
                "seed" => seed = value.parse().map_err(|_| err(0, "bad seed"))?,
                "recompute" => recompute = value.parse().map_err(|_| err(0, "bad recompute"))?,
                "fallback_onset" => onset = Some(value.parse().map_err(|_| err(0, "bad onset"))?),
                _ => return Err(err(0, &format!("unknown header field `{key}`"))),
            }
        }
        let kind = kind.ok_or_else(|| err(0, "header lacks kind"))?;
        let parse_id = |i: usize, tok: &str| tok.parse::<u32>().map(NodeId).map_err(|_| err(i, "bad node id"));
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match (kind.removes_nodes(), toks.as_slice()) {
                (_, []) => continue,
                (true, [u]) => nodes.push(parse_id(i, u)?),
                (false, [u, v]) => edges.push(
                    EdgeKey::new(parse_id(i, u)?, parse_id(i, v)?).map_err(|e| err(i, &e.to_string()))?,
                ),
                _ => return Err(err(i, "wrong number of tokens")),
            }
        }
        let targets = if kind.removes_nodes() { Targets::Nodes(nodes) } else { Targets::Edges(edges) };
        Ok(AttackPlan { kind, targets, seed, recompute, fallback_onset: onset })
    }
}

/// Degree-sum weight of an edge on the current graph.
pub fn edge_weight(g: &Graph, e: EdgeKey) -> usize {
    g.neighbors(e.u()).len() + g.neighbors(e.v()).len()
}

/// Tie-break rank per node id: the id itself, or a seeded random permutation.
fn node_ranks(g: &Graph, shuffle: bool, rng: &mut Rng) -> Vec<u32> {
    let mut ranks: Vec<u32> = (0..g.capacity() as u32).collect();
    if shuffle {
        ranks.shuffle(rng);
    }
    ranks
}

pub fn plan(g: &Graph, kind: AttackKind, seed: u64, opts: &PlanOptions) -> AttackPlan {
    match kind {
        AttackKind::TargetedNodes => plan_targeted_nodes_with(g, seed, opts),
        AttackKind::RandomNodes => plan_random_nodes(g, seed),
        AttackKind::AlmostRandomNodes => plan_almost_random_nodes_with(g, seed, opts.eligibility),
        AttackKind::TargetedEdges => plan_targeted_edges_with(g, seed, opts.shuffle_ties),
        AttackKind::RandomEdges => plan_random_edges(g, seed),
        AttackKind::AlmostRandomEdges => plan_almost_random_edges_with(g, seed, opts.eligibility),
    }
}

/// Nodes by decreasing degree, ties by ascending id.
pub fn plan_targeted_nodes(g: &Graph, recompute: bool, seed: u64) -> AttackPlan {
    plan_targeted_nodes_with(g, seed, &PlanOptions { recompute, ..PlanOptions::default() })
}

pub fn plan_targeted_nodes_with(g: &Graph, seed: u64, opts: &PlanOptions) -> AttackPlan {
    let mut rng = rng::stream(seed, Purpose::Plan);
    let rank = node_ranks(g, opts.shuffle_ties, &mut rng);
    let seq = if opts.recompute {
        greedy_max_degree(g, &rank)
    } else {
        let mut nodes: Vec<NodeId> = g.nodes().collect();
        nodes.sort_by_key(|&u| (Reverse(g.neighbors(u).len()), rank[u.index()]));
        nodes
    };
    let mut plan = AttackPlan::nodes(AttackKind::TargetedNodes, seq, seed);
    plan.recompute = opts.recompute;
    plan
}

fn greedy_max_degree(g: &Graph, rank: &[u32]) -> Vec<NodeId> {
    let mut work = g.clone();
    let key = |w: &Graph, u: NodeId| (Reverse(w.neighbors(u).len()), rank[u.index()], u);
    let mut queue: BTreeSet<_> = work.nodes().map(|u| key(&work, u)).collect();
    let mut seq = Vec::with_capacity(work.node_count());
    while let Some((_, _, u)) = queue.pop_first() {
        let neighbors = work.neighbors(u).to_vec();
        for &v in &neighbors {
            queue.remove(&key(&work, v));
        }
        work.remove_node(u).expect("queued node is active");
        for &v in &neighbors {
            queue.insert(key(&work, v));
        }
        seq.push(u);
    }
    seq
}

/// Edges by decreasing `deg(u) + deg(v)` on the intact graph, ties by
/// ascending `(u, v)`.
pub fn plan_targeted_edges(g: &Graph, seed: u64) -> AttackPlan {
    plan_targeted_edges_with(g, seed, false)
}

pub fn plan_targeted_edges_with(g: &Graph, seed: u64, shuffle_ties: bool) -> AttackPlan {
    let mut edges: Vec<EdgeKey> = g.edges().collect();
    if shuffle_ties {
        edges.shuffle(&mut rng::stream(seed, Purpose::Plan));
        edges.sort_by_key(|&e| Reverse(edge_weight(g, e)));
    } else {
        edges.sort_by_key(|&e| (Reverse(edge_weight(g, e)), e));
    }
    AttackPlan::edges(AttackKind::TargetedEdges, edges, seed)
}

pub fn plan_random_nodes(g: &Graph, seed: u64) -> AttackPlan {
    let mut nodes: Vec<NodeId> = g.nodes().collect();
    nodes.shuffle(&mut rng::stream(seed, Purpose::Plan));
    AttackPlan::nodes(AttackKind::RandomNodes, nodes, seed)
}

pub fn plan_random_edges(g: &Graph, seed: u64) -> AttackPlan {
    let mut edges: Vec<EdgeKey> = g.edges().collect();
    edges.shuffle(&mut rng::stream(seed, Purpose::Plan));
    AttackPlan::edges(AttackKind::RandomEdges, edges, seed)
}

/// Set of small integers with O(1) insert, remove and uniform sampling.
struct IndexedSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl IndexedSet {
    const ABSENT: usize = usize::MAX;

    fn new(universe: usize) -> Self {
        IndexedSet { items: Vec::new(), pos: vec![Self::ABSENT; universe] }
    }

    fn insert(&mut self, x: usize) {
        if self.pos[x] == Self::ABSENT {
            self.pos[x] = self.items.len();
            self.items.push(x);
        }
    }

    fn remove(&mut self, x: usize) {
        let p = self.pos[x];
        if p == Self::ABSENT {
            return;
        }
        self.items.swap_remove(p);
        if let Some(&moved) = self.items.get(p) {
            self.pos[moved] = p;
        }
        self.pos[x] = Self::ABSENT;
    }

    fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        self.items[rng.gen_range(0..self.items.len())]
    }
}

/// Uniform picks among nodes of degree at least 2; once none is left, uniform
/// picks among the remaining nodes.
pub fn plan_almost_random_nodes(g: &Graph, seed: u64) -> AttackPlan {
    plan_almost_random_nodes_with(g, seed, Eligibility::Current)
}

pub fn plan_almost_random_nodes_with(g: &Graph, seed: u64, eligibility: Eligibility) -> AttackPlan {
    let mut rng = rng::stream(seed, Purpose::Plan);
    let mut work = g.clone();
    let mut remaining = IndexedSet::new(g.capacity());
    let mut eligible = IndexedSet::new(g.capacity());
    for u in g.nodes() {
        remaining.insert(u.index());
        if g.neighbors(u).len() >= 2 {
            eligible.insert(u.index());
        }
    }
    let mut seq = Vec::with_capacity(g.node_count());
    let mut onset = None;
    while !remaining.is_empty() {
        let pick = if !eligible.is_empty() {
            eligible.sample(&mut rng)
        } else {
            onset.get_or_insert(seq.len());
            remaining.sample(&mut rng)
        };
        let u = NodeId::from(pick);
        remaining.remove(pick);
        eligible.remove(pick);
        let neighbors = work.neighbors(u).to_vec();
        work.remove_node(u).expect("remaining node is active");
        if eligibility == Eligibility::Current {
            for v in neighbors {
                if work.neighbors(v).len() < 2 {
                    eligible.remove(v.index());
                }
            }
        }
        seq.push(u);
    }
    let mut plan = AttackPlan::nodes(AttackKind::AlmostRandomNodes, seq, seed);
    plan.fallback_onset = onset;
    plan
}

/// Uniform picks among edges whose endpoints both have degree at least 2;
/// once none is left, uniform picks among the remaining edges.
pub fn plan_almost_random_edges(g: &Graph, seed: u64) -> AttackPlan {
    plan_almost_random_edges_with(g, seed, Eligibility::Current)
}

pub fn plan_almost_random_edges_with(g: &Graph, seed: u64, eligibility: Eligibility) -> AttackPlan {
    let mut rng = rng::stream(seed, Purpose::Plan);
    let edges: Vec<EdgeKey> = g.edges().collect();
    let index_of = |e: EdgeKey| edges.binary_search(&e).expect("edge of the original graph");
    let mut work = g.clone();
    let mut remaining = IndexedSet::new(edges.len());
    let mut eligible = IndexedSet::new(edges.len());
    let qualifies = |w: &Graph, e: EdgeKey| w.neighbors(e.u()).len() >= 2 && w.neighbors(e.v()).len() >= 2;
    for (i, &e) in edges.iter().enumerate() {
        remaining.insert(i);
        if qualifies(g, e) {
            eligible.insert(i);
        }
    }
    let mut seq = Vec::with_capacity(edges.len());
    let mut onset = None;
    while !remaining.is_empty() {
        let pick = if !eligible.is_empty() {
            eligible.sample(&mut rng)
        } else {
            onset.get_or_insert(seq.len());
            remaining.sample(&mut rng)
        };
        let e = edges[pick];
        remaining.remove(pick);
        eligible.remove(pick);
        work.remove_edge(e).expect("remaining edge is present");
        if eligibility == Eligibility::Current {
            for end in [e.u(), e.v()] {
                // Degree just fell below 2: its last edge stops qualifying.
                if work.neighbors(end).len() == 1 {
                    let other = work.neighbors(end)[0];
                    eligible.remove(index_of(EdgeKey::new(end, other).expect("simple graph")));
                }
            }
        }
        seq.push(e);
    }
    let mut plan = AttackPlan::edges(AttackKind::AlmostRandomEdges, seq, seed);
    plan.fallback_onset = onset;
    plan
}

/// Which path-length measurement to take at each checkpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AplMode {
    Off,
    #[default]
    Exact,
    /// Estimate from this many random BFS sources.
    Sampled { sources: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecuteOptions {
    pub apl: AplMode,
    pub exec: Execution,
}

/// Default checkpoints: 0%, 10%, ..., 90%.
pub fn default_checkpoints() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

pub fn validate_checkpoints(checkpoints: &[f64]) -> Result<(), AttackError> {
    if let Some(&bad) = checkpoints.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(AttackError::CheckpointOutOfRange(bad));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AttackError::CheckpointsUnsorted);
    }
    Ok(())
}

pub fn execute(g: &Graph, plan: &AttackPlan, checkpoints: &[f64]) -> Result<ResilienceSeries, AttackError> {
    execute_with(g, plan, checkpoints, &ExecuteOptions::default())
}

/// Runs `plan` on a private copy of `g`. At checkpoint `f` exactly
/// `round(f * N)` elements have been removed, `N` being the original node or
/// edge count; the LCC fraction is relative to the original node count.
pub fn execute_with(
    g: &Graph,
    plan: &AttackPlan,
    checkpoints: &[f64],
    opts: &ExecuteOptions,
) -> Result<ResilienceSeries, AttackError> {
    validate_checkpoints(checkpoints)?;
    let n0 = g.node_count();
    if n0 == 0 {
        return Err(AttackError::EmptyGraph);
    }
    let total = match &plan.targets {
        Targets::Nodes(_) => n0,
        Targets::Edges(_) => g.edge_count(),
    };
    if plan.len() != total {
        return Err(AttackError::PlanMismatch(format!(
            "plan has {} elements, graph has {total}",
            plan.len()
        )));
    }
    let mut work = g.clone();
    let mut removed = 0usize;
    let mut points = Vec::with_capacity(checkpoints.len());
    for &f in checkpoints {
        let upto = (f * total as f64).round() as usize;
        while removed < upto {
            match &plan.targets {
                Targets::Nodes(seq) => work.remove_node(seq[removed])?,
                Targets::Edges(seq) => work.remove_edge(seq[removed])?,
            }
            removed += 1;
        }
        let lcc = work.largest_component().unwrap_or_default();
        let apl = if lcc.len() < 2 {
            None
        } else {
            match opts.apl {
                AplMode::Off => None,
                AplMode::Exact => metrics::average_path_length_with(&work, &lcc, opts.exec).ok(),
                AplMode::Sampled { sources } => {
                    metrics::sampled_average_path_length(&work, &lcc, sources, plan.seed, opts.exec)
                        .ok()
                        .map(|est| est.mean)
                }
            }
        };
        points.push(SeriesPoint {
            fraction_removed: f,
            lcc_fraction: lcc.len() as f64 / n0 as f64,
            apl,
        });
    }
    Ok(ResilienceSeries {
        kind: plan.kind,
        points,
        fallback_onset: plan.fallback_onset.map(|i| i as f64 / total as f64),
    })
}
