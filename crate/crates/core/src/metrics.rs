//! Resilience quantifiers and whole-network statistics.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::AttackKind;
use crate::graph::{Graph, NodeId};
use crate::parallel::Execution;
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("original node count must be at least 1")]
    ZeroBaseline,
    #[error("node set is not connected in the graph")]
    Disconnected,
    #[error("average path length needs at least 2 nodes, got {0}")]
    TooSmall(usize),
    #[error("node {0} is not present in the graph")]
    InactiveNode(NodeId),
}

/// Size of the largest component relative to the original node count `n0`.
pub fn lcc_fraction(g: &Graph, n0: usize) -> Result<f64, MetricsError> {
    if n0 == 0 {
        return Err(MetricsError::ZeroBaseline);
    }
    Ok(g.largest_component_size() as f64 / n0 as f64)
}

/// BFS from `source`; returns (sum of distances to members, members reached).
fn distance_sum_from(g: &Graph, source: NodeId, member: &[bool]) -> (u64, usize) {
    let mut dist = vec![u32::MAX; g.capacity()];
    let mut queue = VecDeque::new();
    dist[source.index()] = 0;
    queue.push_back(source);
    let mut sum = 0u64;
    let mut reached = 0usize;
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()];
        if member[u.index()] {
            sum += d as u64;
            reached += 1;
        }
        for &v in g.neighbors(u) {
            if dist[v.index()] == u32::MAX {
                dist[v.index()] = d + 1;
                queue.push_back(v);
            }
        }
    }
    (sum, reached)
}

fn membership(g: &Graph, component: &[NodeId]) -> Result<Vec<bool>, MetricsError> {
    let mut member = vec![false; g.capacity()];
    for &u in component {
        if !g.is_active(u) {
            return Err(MetricsError::InactiveNode(u));
        }
        member[u.index()] = true;
    }
    Ok(member)
}

/// Mean shortest-path length over all unordered pairs of `component`, using
/// one BFS per member.
pub fn average_path_length(g: &Graph, component: &[NodeId]) -> Result<f64, MetricsError> {
    average_path_length_with(g, component, Execution::default())
}

pub fn average_path_length_with(
    g: &Graph,
    component: &[NodeId],
    exec: Execution,
) -> Result<f64, MetricsError> {
    let size = component.len();
    if size < 2 {
        return Err(MetricsError::TooSmall(size));
    }
    let member = membership(g, component)?;
    let (_, reached) = distance_sum_from(g, component[0], &member);
    if reached != size {
        return Err(MetricsError::Disconnected);
    }
    // Every ordered pair is counted once per source.
    let total = exec.map_sum(component, |&s| distance_sum_from(g, s, &member).0);
    let pairs = (size as u64) * (size as u64 - 1);
    Ok(total as f64 / pairs as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AplEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub sources: usize,
}

/// APL estimated from `samples` BFS sources drawn without replacement.
///
/// Each source contributes its mean distance to the other members; the
/// estimate is the mean of those and `std_err` is their sample standard
/// deviation over `sqrt(samples)`. With every member sampled the estimate is
/// exact and `std_err` is reported as zero.
pub fn sampled_average_path_length(
    g: &Graph,
    component: &[NodeId],
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<AplEstimate, MetricsError> {
    let size = component.len();
    if size < 2 {
        return Err(MetricsError::TooSmall(size));
    }
    let member = membership(g, component)?;
    let mut pool = component.to_vec();
    let k = samples.clamp(1, size);
    let (picked, _) = pool.partial_shuffle(&mut rng::stream(seed, Purpose::Sampling), k);
    let sources = picked.to_vec();
    let per_source = exec.map_collect(&sources, |&s| distance_sum_from(g, s, &member));
    if per_source.iter().any(|&(_, reached)| reached != size) {
        return Err(MetricsError::Disconnected);
    }
    let means: Vec<f64> = per_source
        .iter()
        .map(|&(sum, _)| sum as f64 / (size - 1) as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / k as f64;
    let std_err = if k == size || k < 2 {
        0.0
    } else {
        let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    };
    Ok(AplEstimate { mean, std_err, sources: k })
}

/// How nodes with fewer than two neighbours enter the averaged clustering
/// coefficient.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusteringConvention {
    /// They count with a local coefficient of 0.
    #[default]
    ZeroForLowDegree,
    /// They are left out of the average.
    ExcludeLowDegree,
}

fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Triangles through `u`.
pub fn triangles(g: &Graph, u: NodeId) -> usize {
    let nu = g.neighbors(u);
    nu.iter()
        .map(|&v| sorted_intersection_len(nu, g.neighbors(v)))
        .sum::<usize>()
        / 2
}

pub fn local_clustering(g: &Graph, u: NodeId) -> Option<f64> {
    let d = g.neighbors(u).len();
    if d < 2 {
        return None;
    }
    Some(2.0 * triangles(g, u) as f64 / (d * (d - 1)) as f64)
}

pub fn clustering_coefficient(g: &Graph) -> f64 {
    clustering_coefficient_with(g, ClusteringConvention::default())
}

pub fn clustering_coefficient_with(g: &Graph, convention: ClusteringConvention) -> f64 {
    let mut total = 0.0;
    let mut counted = 0usize;
    for u in g.nodes() {
        match (local_clustering(g, u), convention) {
            (Some(c), _) => {
                total += c;
                counted += 1;
            }
            (None, ClusteringConvention::ZeroForLowDegree) => counted += 1,
            (None, ClusteringConvention::ExcludeLowDegree) => {}
        }
    }
    if counted == 0 {
        0.0
    } else {
        total / counted as f64
    }
}

/// Global transitivity: 3 × triangles / connected triples.
pub fn transitivity(g: &Graph) -> f64 {
    let (mut closed, mut triples) = (0usize, 0usize);
    for u in g.nodes() {
        let d = g.neighbors(u).len();
        closed += triangles(g, u);
        triples += d * d.saturating_sub(1) / 2;
    }
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

pub fn degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for u in g.nodes() {
        *hist.entry(g.neighbors(u).len()).or_insert(0) += 1;
    }
    hist
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub n: usize,
    pub m: usize,
    pub edge_node_ratio: f64,
    pub max_degree: usize,
    pub clustering_coefficient: f64,
    /// Absent when the graph is disconnected or has fewer than two nodes.
    pub apl: Option<f64>,
    pub degree_histogram: BTreeMap<usize, usize>,
}

impl NetworkStats {
    /// Flat `key value` pairs, histogram excluded.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("nodes", self.n.to_string()),
            ("edges", self.m.to_string()),
            ("edge_node_ratio", format_real(self.edge_node_ratio)),
            ("max_degree", self.max_degree.to_string()),
            ("clustering_coefficient", format_real(self.clustering_coefficient)),
            ("apl", self.apl.map(format_real).unwrap_or_default()),
        ]
    }
}

/// Shortest decimal form at 6 significant digits, always with a fractional
/// part (`1.0`, `24.36`, `0.319712`).
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    format!("{rounded:?}")
}

pub fn stats(g: &Graph) -> NetworkStats {
    stats_with(g, Execution::default())
}

pub fn stats_with(g: &Graph, exec: Execution) -> NetworkStats {
    let n = g.node_count();
    let m = g.edge_count();
    let apl = if n >= 2 && g.is_connected() {
        let nodes: Vec<NodeId> = g.nodes().collect();
        average_path_length_with(g, &nodes, exec).ok()
    } else {
        None
    };
    NetworkStats {
        n,
        m,
        edge_node_ratio: if n == 0 { 0.0 } else { m as f64 / n as f64 },
        max_degree: g.max_degree(),
        clustering_coefficient: clustering_coefficient(g),
        apl,
        degree_histogram: degree_histogram(g),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub fraction_removed: f64,
    pub lcc_fraction: f64,
    pub apl: Option<f64>,
}

/// Checkpointed measurements of one attack run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResilienceSeries {
    pub kind: AttackKind,
    pub points: Vec<SeriesPoint>,
    /// Fraction of the plan after which almost-random selection ran out of
    /// eligible targets and fell back to uniform picks.
    pub fallback_onset: Option<f64>,
}

impl ResilienceSeries {
    /// Strictly increasing fractions and non-increasing LCC fraction.
    pub fn is_well_formed(&self) -> bool {
        self.points.windows(2).all(|w| {
            w[0].fraction_removed < w[1].fraction_removed && w[0].lcc_fraction >= w[1].lcc_fraction
        }) && self
            .points
            .iter()
            .all(|p| (0.0..=1.0).contains(&p.lcc_fraction))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(k: usize) -> Graph {
        Graph::from_edges(k, (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b)))).unwrap()
    }

    fn all(g: &Graph) -> Vec<NodeId> {
        g.nodes().collect()
    }

    #[test]
    fn lcc_fraction_cases() {
        let g = complete(5);
        assert_eq!(lcc_fraction(&g, 5).unwrap(), 1.0);
        let halves =
            Graph::from_edges(10, [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 8), (8, 9)])
                .unwrap();
        assert_eq!(lcc_fraction(&halves, 10).unwrap(), 0.5);
        assert_eq!(lcc_fraction(&Graph::with_nodes(0), 3).unwrap(), 0.0);
        assert_eq!(lcc_fraction(&g, 0), Err(MetricsError::ZeroBaseline));
    }

    #[test]
    fn apl_small_graphs() {
        let k4 = complete(4);
        assert_eq!(average_path_length(&k4, &all(&k4)).unwrap(), 1.0);
        // P4: (1+2+3+1+2+1)/6
        let p4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(average_path_length(&p4, &all(&p4)).unwrap(), 10.0 / 6.0);
        // C4 = 4/3, C4 minus an edge is P4
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(average_path_length(&c4, &all(&c4)).unwrap(), 4.0 / 3.0);
    }

    #[test]
    fn apl_errors() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(average_path_length(&g, &all(&g)), Err(MetricsError::Disconnected));
        assert_eq!(average_path_length(&g, &[NodeId(0)]), Err(MetricsError::TooSmall(1)));
    }

    #[test]
    fn apl_execution_modes_agree() {
        let g = Graph::from_edges(30, (0..29).map(|i| (i, i + 1)).chain([(0, 15), (7, 22)])).unwrap();
        let nodes = all(&g);
        let seq = average_path_length_with(&g, &nodes, Execution::Sequential).unwrap();
        let par = average_path_length_with(&g, &nodes, Execution::Parallel).unwrap();
        assert_eq!(seq.to_bits(), par.to_bits());
    }

    #[test]
    fn sampled_apl_is_exact_with_every_source() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let nodes = all(&g);
        let exact = average_path_length(&g, &nodes).unwrap();
        let est = sampled_average_path_length(&g, &nodes, 100, 3, Execution::Sequential).unwrap();
        assert!((est.mean - exact).abs() < 1e-12);
        assert_eq!(est.std_err, 0.0);
        let partial = sampled_average_path_length(&g, &nodes, 3, 3, Execution::Sequential).unwrap();
        assert_eq!(partial.sources, 3);
        assert!(partial.std_err > 0.0);
    }

    #[test]
    fn clustering_cases() {
        assert_eq!(clustering_coefficient(&complete(3)), 1.0);
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(clustering_coefficient(&star), 0.0);
        assert_eq!(clustering_coefficient(&Graph::with_nodes(0)), 0.0);
        // triangle with pendant: locals 1, 1, 1/3, (0)
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let zero = clustering_coefficient_with(&g, ClusteringConvention::ZeroForLowDegree);
        let excl = clustering_coefficient_with(&g, ClusteringConvention::ExcludeLowDegree);
        assert!((zero - (7.0 / 3.0) / 4.0).abs() < 1e-12);
        assert!((excl - (7.0 / 3.0) / 3.0).abs() < 1e-12);
        // 1 triangle, triples 1+1+3 → 3/5
        assert!((transitivity(&g) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn stats_of_k4() {
        let s = stats(&complete(4));
        assert_eq!((s.n, s.m, s.max_degree), (4, 6, 3));
        assert_eq!(s.clustering_coefficient, 1.0);
        assert_eq!(s.apl, Some(1.0));
        assert_eq!(s.edge_node_ratio, 1.5);
        assert_eq!(s.degree_histogram, BTreeMap::from([(3, 4)]));
        let kv = s.key_values();
        assert!(kv.contains(&("apl", "1.0".to_string())));
    }

    #[test]
    fn stats_of_disconnected_graph_has_no_apl() {
        let s = stats(&Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap());
        assert_eq!(s.apl, None);
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(1.0), "1.0");
        assert_eq!(format_real(48720.0 / 2000.0), "24.36");
        assert_eq!(format_real(2.0 / 3.0), "0.666667");
        assert_eq!(format_real(0.0), "0.0");
    }
}
