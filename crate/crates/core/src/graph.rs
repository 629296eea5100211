//! Mutable simple undirected graph with tombstoned node removal.
//!
//! Node ids are dense indices fixed at construction. Removing a node flags it
//! absent instead of compacting storage, so ids captured before a run (for
//! example in an attack plan) stay valid until the run ends.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index exceeds u32 range"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered node pair stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    u: NodeId,
    v: NodeId,
}

impl EdgeKey {
    pub fn new(a: NodeId, b: NodeId) -> Result<Self, GraphError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(EdgeKey { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(EdgeKey { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(GraphError::SelfLoop(a)),
        }
    }

    pub fn u(self) -> NodeId {
        self.u
    }

    pub fn v(self) -> NodeId {
        self.v
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("node {0} is not present in the graph")]
    InactiveNode(NodeId),
    #[error("edge ({0}) is not present in the graph")]
    MissingEdge(EdgeKey),
    #[error("graph has no active nodes")]
    Empty,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    // Sorted neighbour lists; entries of removed nodes are emptied.
    adj: Vec<Vec<NodeId>>,
    active: Vec<bool>,
    n_active: usize,
    m_active: usize,
}

impl Graph {
    /// `n` isolated, active nodes.
    pub fn with_nodes(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            active: vec![true; n],
            n_active: n,
            m_active: 0,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::with_nodes(n);
        for (a, b) in edges {
            g.add_edge(NodeId::from(a), NodeId::from(b))?;
        }
        Ok(g)
    }

    /// Total id space, including removed nodes.
    pub fn capacity(&self) -> usize {
        self.adj.len()
    }

    pub fn node_count(&self) -> usize {
        self.n_active
    }

    pub fn edge_count(&self) -> usize {
        self.m_active
    }

    pub fn is_empty(&self) -> bool {
        self.n_active == 0
    }

    pub fn is_active(&self, u: NodeId) -> bool {
        self.active.get(u.index()).copied().unwrap_or(false)
    }

    fn check_active(&self, u: NodeId) -> Result<(), GraphError> {
        if self.is_active(u) {
            Ok(())
        } else {
            Err(GraphError::InactiveNode(u))
        }
    }

    /// Inserts `{u, v}`. Returns `true` when the edge was new.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        let key = EdgeKey::new(u, v)?;
        self.check_active(u)?;
        self.check_active(v)?;
        let list = &mut self.adj[key.u.index()];
        match list.binary_search(&key.v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                list.insert(pos, key.v);
                let other = &mut self.adj[key.v.index()];
                let pos = other.binary_search(&key.u).unwrap_err();
                other.insert(pos, key.u);
                self.m_active += 1;
                Ok(true)
            }
        }
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.is_active(u) && self.is_active(v) && self.adj[u.index()].binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: EdgeKey) -> bool {
        self.has_edge(e.u, e.v)
    }

    /// Removes `u` and every incident edge. Removing an already absent node is
    /// an error: attack plans never schedule the same node twice.
    pub fn remove_node(&mut self, u: NodeId) -> Result<(), GraphError> {
        self.check_active(u)?;
        let neighbors = std::mem::take(&mut self.adj[u.index()]);
        for v in &neighbors {
            let list = &mut self.adj[v.index()];
            if let Ok(pos) = list.binary_search(&u) {
                list.remove(pos);
            }
        }
        self.m_active -= neighbors.len();
        self.active[u.index()] = false;
        self.n_active -= 1;
        Ok(())
    }

    /// Removes edge `e`; its endpoints stay active even at degree zero.
    pub fn remove_edge(&mut self, e: EdgeKey) -> Result<(), GraphError> {
        if !self.contains_edge(e) {
            return Err(GraphError::MissingEdge(e));
        }
        let list = &mut self.adj[e.u.index()];
        let pos = list.binary_search(&e.v).expect("symmetric adjacency");
        list.remove(pos);
        let list = &mut self.adj[e.v.index()];
        let pos = list.binary_search(&e.u).expect("symmetric adjacency");
        list.remove(pos);
        self.m_active -= 1;
        Ok(())
    }

    pub fn degree(&self, u: NodeId) -> Result<usize, GraphError> {
        self.check_active(u)?;
        Ok(self.adj[u.index()].len())
    }

    /// Sorted neighbours of `u`; empty for removed nodes.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        self.adj.get(u.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Active nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| NodeId::from(i))
    }

    /// Present edges in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.nodes().flat_map(move |u| {
            let list = &self.adj[u.index()];
            let start = list.partition_point(|&v| v <= u);
            list[start..].iter().map(move |&v| EdgeKey { u, v })
        })
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|u| self.adj[u.index()].len()).max().unwrap_or(0)
    }

    /// Maximal connected node sets, each sorted ascending, ordered by size
    /// descending with ties broken by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.capacity()];
        let mut queue = VecDeque::new();
        let mut comps = Vec::new();
        for start in self.nodes() {
            if seen[start.index()] {
                continue;
            }
            seen[start.index()] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in &self.adj[u.index()] {
                    if !seen[v.index()] {
                        seen[v.index()] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        // Discovery order is by smallest member; a stable sort keeps that for ties.
        comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
        comps
    }

    pub fn largest_component(&self) -> Result<Vec<NodeId>, GraphError> {
        self.connected_components()
            .into_iter()
            .next()
            .ok_or(GraphError::Empty)
    }

    /// Size of the largest component without materialising every component.
    pub fn largest_component_size(&self) -> usize {
        let mut seen = vec![false; self.capacity()];
        let mut stack = Vec::new();
        let mut best = 0;
        for start in self.nodes() {
            if seen[start.index()] {
                continue;
            }
            seen[start.index()] = true;
            stack.push(start);
            let mut size = 0;
            while let Some(u) = stack.pop() {
                size += 1;
                for &v in &self.adj[u.index()] {
                    if !seen[v.index()] {
                        seen[v.index()] = true;
                        stack.push(v);
                    }
                }
            }
            best = best.max(size);
        }
        best
    }

    pub fn is_connected(&self) -> bool {
        self.n_active > 0 && self.largest_component_size() == self.n_active
    }

    /// Copy of the subgraph induced by `keep`, re-indexed densely so that
    /// `keep[i]` becomes node `i`.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> Graph {
        let mut remap = vec![u32::MAX; self.capacity()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old.index()] = new as u32;
        }
        let mut g = Graph::with_nodes(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            let mut list: Vec<NodeId> = self.adj[old.index()]
                .iter()
                .filter(|v| remap[v.index()] != u32::MAX)
                .map(|v| NodeId(remap[v.index()]))
                .collect();
            list.sort_unstable();
            g.m_active += list.iter().filter(|v| v.index() > new).count();
            g.adj[new] = list;
        }
        g
    }
}
