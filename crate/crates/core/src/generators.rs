//! Synthetic network models: Erdős–Rényi G(n, m), Watts–Strogatz ring
//! rewiring, Barabási–Albert growth and Holme–Kim growth with triad
//! formation.
//!
//! Every model is parameterised by a node count and a target edge count so a
//! synthetic network can be matched to the edge-node ratio of a real one.
//! Output is a pure function of the spec and seed.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeKey, Graph, NodeId};
use crate::metrics;
use crate::rng::{self, Purpose, Rng};

pub const DEFAULT_BETA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("{target_m} edges requested but at most {max} fit on {n} nodes")]
    InfeasibleEdges { n: usize, target_m: usize, max: usize },
    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("ring lattice degree {k} is infeasible on {n} nodes (need 2 <= k < n)")]
    LatticeInfeasible { k: usize, n: usize },
    #[error("attachment count {m_per} is infeasible on {n} nodes (need 1 <= m_per < n)")]
    AttachmentInfeasible { m_per: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Random,
    SmallWorld,
    ScaleFree,
    SmallWorldScaleFree,
}

impl Model {
    pub const ALL: [Model; 4] = [
        Model::Random,
        Model::SmallWorld,
        Model::ScaleFree,
        Model::SmallWorldScaleFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Random => "random",
            Model::SmallWorld => "small-world",
            Model::ScaleFree => "scale-free",
            Model::SmallWorldScaleFree => "small-world-scale-free",
        }
    }

    /// Short class label used in result tables (RD, SW, SF, HK).
    pub fn abbrev(self) -> &'static str {
        match self {
            Model::Random => "RD",
            Model::SmallWorld => "SW",
            Model::ScaleFree => "SF",
            Model::SmallWorldScaleFree => "HK",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                format!("unknown model `{s}` (expected random, small-world, scale-free or small-world-scale-free)")
            })
    }
}

/// The four social networks whose sizes the synthetic ensembles mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceNetwork {
    Blog,
    Twitter,
    Epinions,
    Author,
}

impl ReferenceNetwork {
    pub const ALL: [ReferenceNetwork; 4] = [
        ReferenceNetwork::Blog,
        ReferenceNetwork::Twitter,
        ReferenceNetwork::Epinions,
        ReferenceNetwork::Author,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReferenceNetwork::Blog => "blog",
            ReferenceNetwork::Twitter => "twitter",
            ReferenceNetwork::Epinions => "epinions",
            ReferenceNetwork::Author => "author",
        }
    }

    pub fn nodes(self) -> usize {
        match self {
            ReferenceNetwork::Blog => 1222,
            ReferenceNetwork::Twitter => 2492,
            ReferenceNetwork::Epinions => 2000,
            ReferenceNetwork::Author => 3621,
        }
    }

    pub fn edges(self) -> usize {
        match self {
            ReferenceNetwork::Blog => 16714,
            ReferenceNetwork::Twitter => 17658,
            ReferenceNetwork::Epinions => 48720,
            ReferenceNetwork::Author => 9461,
        }
    }

    /// Clustering coefficient of the Holme–Kim ensemble reported for this size.
    pub fn hk_target_clustering(self) -> f64 {
        match self {
            ReferenceNetwork::Blog => 0.24,
            ReferenceNetwork::Twitter => 0.27,
            ReferenceNetwork::Epinions => 0.22,
            ReferenceNetwork::Author => 0.42,
        }
    }

    /// Triad-formation probability found by [`calibrate_triad`] against
    /// [`hk_target_clustering`](Self::hk_target_clustering) (seeds 0..5).
    pub fn calibrated_p_triad(self) -> f64 {
        match self {
            ReferenceNetwork::Blog => P_TRIAD_BLOG,
            ReferenceNetwork::Twitter => P_TRIAD_TWITTER,
            ReferenceNetwork::Epinions => P_TRIAD_EPINIONS,
            ReferenceNetwork::Author => P_TRIAD_AUTHOR,
        }
    }

    pub fn matching(n: usize, target_m: usize) -> Option<ReferenceNetwork> {
        ReferenceNetwork::ALL
            .into_iter()
            .find(|r| r.nodes() == n && r.edges() == target_m)
    }

    pub fn spec(self, model: Model, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            model,
            n: self.nodes(),
            target_m: self.edges(),
            beta: DEFAULT_BETA,
            p_triad: None,
            seed,
        }
    }
}

// Frozen output of `calibrate_triad(n, m, target, &[0, 1, 2, 3, 4])`.
const P_TRIAD_BLOG: f64 = 0.965;
const P_TRIAD_TWITTER: f64 = 0.844;
const P_TRIAD_EPINIONS: f64 = 1.0;
const P_TRIAD_AUTHOR: f64 = 0.737;

/// Triad probability used when the size matches no reference network.
pub const DEFAULT_P_TRIAD: f64 = P_TRIAD_BLOG;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: usize,
    pub target_m: usize,
    /// Rewiring probability (small-world only).
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Triad-formation probability (Holme–Kim only). `None` picks the
    /// calibrated value for a matching reference network, else
    /// [`DEFAULT_P_TRIAD`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_triad: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

impl GeneratorSpec {
    pub fn new(model: Model, n: usize, target_m: usize, seed: u64) -> Self {
        GeneratorSpec { model, n, target_m, beta: DEFAULT_BETA, p_triad: None, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GeneratorSpec { seed, ..self.clone() }
    }

    pub fn resolved_p_triad(&self) -> f64 {
        self.p_triad.unwrap_or_else(|| {
            ReferenceNetwork::matching(self.n, self.target_m)
                .map(ReferenceNetwork::calibrated_p_triad)
                .unwrap_or(DEFAULT_P_TRIAD)
        })
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n < 2 {
            return Err(GeneratorError::TooFewNodes(self.n));
        }
        let max = max_edges(self.n);
        if self.target_m > max {
            return Err(GeneratorError::InfeasibleEdges { n: self.n, target_m: self.target_m, max });
        }
        check_probability("beta", self.beta)?;
        check_probability("p_triad", self.resolved_p_triad())?;
        Ok(())
    }

    pub fn generate(&self) -> Result<Graph, GeneratorError> {
        self.validate()?;
        match self.model {
            Model::Random => gen_random(self.n, self.target_m, self.seed),
            Model::SmallWorld => gen_small_world(self.n, self.target_m, self.beta, self.seed),
            Model::ScaleFree => gen_scale_free(self.n, self.target_m, self.seed),
            Model::SmallWorldScaleFree => {
                gen_holme_kim(self.n, self.target_m, self.resolved_p_triad(), self.seed)
            }
        }
    }
}

fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_probability(name: &'static str, value: f64) -> Result<(), GeneratorError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(GeneratorError::InvalidProbability { name, value })
    }
}

fn ratio_rounded(target_m: usize, n: usize) -> usize {
    (target_m as f64 / n as f64).round() as usize
}

/// Uniform G(n, m): exactly `target_m` distinct edges.
pub fn gen_random(n: usize, target_m: usize, seed: u64) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooFewNodes(n));
    }
    let max = max_edges(n);
    if target_m > max {
        return Err(GeneratorError::InfeasibleEdges { n, target_m, max });
    }
    let mut rng = rng::stream(seed, Purpose::Generator);
    let draw = |rng: &mut Rng| loop {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            return (NodeId::from(a), NodeId::from(b));
        }
    };
    if target_m <= max / 2 {
        let mut g = Graph::with_nodes(n);
        while g.edge_count() < target_m {
            let (a, b) = draw(&mut rng);
            g.add_edge(a, b).expect("distinct active endpoints");
        }
        Ok(g)
    } else {
        // Dense: delete a uniform set of edges from the complete graph.
        let mut g = Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
            .expect("complete graph");
        while g.edge_count() > target_m {
            let (a, b) = draw(&mut rng);
            let e = EdgeKey::new(a, b).expect("distinct endpoints");
            if g.contains_edge(e) {
                g.remove_edge(e).expect("present edge");
            }
        }
        Ok(g)
    }
}

/// Ring lattice of even degree `k = 2 * round(target_m / n)` with each
/// lattice edge rewired with probability `beta`.
pub fn gen_small_world(
    n: usize,
    target_m: usize,
    beta: f64,
    seed: u64,
) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooFewNodes(n));
    }
    check_probability("beta", beta)?;
    let k = 2 * ratio_rounded(target_m, n);
    if k < 2 || k >= n {
        return Err(GeneratorError::LatticeInfeasible { k, n });
    }
    let mut g = Graph::with_nodes(n);
    for i in 0..n {
        for j in 1..=k / 2 {
            g.add_edge(NodeId::from(i), NodeId::from((i + j) % n))
                .expect("lattice edge");
        }
    }
    let mut rng = rng::stream(seed, Purpose::Generator);
    for j in 1..=k / 2 {
        for i in 0..n {
            if !rng.gen_bool(beta) {
                continue;
            }
            let u = NodeId::from(i);
            let v = NodeId::from((i + j) % n);
            // An earlier rewiring may already have moved this edge away.
            if !g.has_edge(u, v) || g.neighbors(u).len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = NodeId::from(rng.gen_range(0..n));
                if w != u && !g.has_edge(u, w) {
                    break w;
                }
            };
            g.remove_edge(EdgeKey::new(u, v).expect("lattice edge"))
                .expect("present edge");
            g.add_edge(u, w).expect("new edge");
        }
    }
    Ok(g)
}

/// Barabási–Albert growth with `m_per = round(target_m / n)` links per new
/// node, started from a clique on `m_per + 1` nodes.
pub fn gen_scale_free(n: usize, target_m: usize, seed: u64) -> Result<Graph, GeneratorError> {
    grow_preferential(n, target_m, 0.0, seed)
}

/// Holme–Kim growth: after each preferential link, with probability
/// `p_triad` the next link closes a triangle through a neighbour of the node
/// just linked.
pub fn gen_holme_kim(
    n: usize,
    target_m: usize,
    p_triad: f64,
    seed: u64,
) -> Result<Graph, GeneratorError> {
    grow_preferential(n, target_m, p_triad, seed)
}

fn grow_preferential(
    n: usize,
    target_m: usize,
    p_triad: f64,
    seed: u64,
) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooFewNodes(n));
    }
    check_probability("p_triad", p_triad)?;
    let m_per = ratio_rounded(target_m, n);
    if m_per < 1 || n <= m_per {
        return Err(GeneratorError::AttachmentInfeasible { m_per, n });
    }
    let mut rng = rng::stream(seed, Purpose::Generator);
    let mut g = Graph::with_nodes(n);
    // Each node appears once per incident edge.
    let mut pool: Vec<NodeId> = Vec::with_capacity(2 * (target_m + n));
    for a in 0..=m_per {
        for b in a + 1..=m_per {
            g.add_edge(NodeId::from(a), NodeId::from(b)).expect("seed clique");
        }
        pool.extend(std::iter::repeat_n(NodeId::from(a), m_per));
    }

    let mut chosen: Vec<NodeId> = Vec::with_capacity(m_per);
    for t in (m_per + 1)..n {
        chosen.clear();
        let mut last_attached = None;
        while chosen.len() < m_per {
            if let Some(anchor) = last_attached {
                if rng.gen_bool(p_triad) {
                    let candidates: Vec<NodeId> = g
                        .neighbors(anchor)
                        .iter()
                        .copied()
                        .filter(|w| !chosen.contains(w))
                        .collect();
                    if !candidates.is_empty() {
                        chosen.push(candidates[rng.gen_range(0..candidates.len())]);
                        continue;
                    }
                }
            }
            let target = loop {
                let w = pool[rng.gen_range(0..pool.len())];
                if !chosen.contains(&w) {
                    break w;
                }
            };
            chosen.push(target);
            last_attached = Some(target);
        }
        let new = NodeId::from(t);
        for &w in &chosen {
            g.add_edge(new, w).expect("new attachment");
        }
        pool.extend_from_slice(&chosen);
        pool.extend(std::iter::repeat_n(new, m_per));
    }
    Ok(g)
}

/// Mean clustering coefficient of Holme–Kim graphs over `seeds`.
pub fn holme_kim_clustering(n: usize, target_m: usize, p_triad: f64, seeds: &[u64]) -> f64 {
    let total: f64 = seeds
        .iter()
        .map(|&s| {
            let g = gen_holme_kim(n, target_m, p_triad, s).expect("valid Holme–Kim parameters");
            metrics::clustering_coefficient(&g)
        })
        .sum();
    total / seeds.len() as f64
}

/// Bisection on `p_triad` for a Holme–Kim ensemble whose mean clustering
/// coefficient matches `target`. Clamps to 0 or 1 when the target lies
/// outside the reachable range. Result is rounded to 3 decimals.
pub fn calibrate_triad(n: usize, target_m: usize, target: f64, seeds: &[u64]) -> f64 {
    let at = |p: f64| holme_kim_clustering(n, target_m, p, seeds);
    if at(0.0) >= target {
        return 0.0;
    }
    if at(1.0) <= target {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..12 {
        let mid = 0.5 * (lo + hi);
        if at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi) * 1000.0).round() / 1000.0
}
