//! Brute-force oracles shared by the integration tests. Each one works from a
//! plain edge list so it shares no code with the library under test.

#![allow(dead_code)]

use netres::{Graph, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random simple graph on `n` nodes where each pair is present with
/// probability `p`.
pub fn random_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Yields `count` small random graphs (1..=max_n nodes, varied density).
pub fn small_graphs(count: usize, max_n: usize, seed: u64) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_n);
            let p = rng.gen_range(0.0..1.0);
            (n, random_edges(n, p, &mut rng))
        })
        .collect()
}

pub fn adjacency_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// Components via Warshall transitive closure, each sorted, listed by
/// smallest member.
pub fn components_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut reach = adjacency_matrix(n, edges);
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (cell, &r) in reach[i].iter_mut().zip(&via) {
                    *cell |= r;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
            for &j in &comp {
                seen[j] = true;
            }
            comps.push(comp);
        }
    }
    comps
}

/// Floyd–Warshall distance matrix; `None` for unreachable pairs.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b) in edges {
        d[a][b] = Some(1);
        d[b][a] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Mean pairwise distance over `members`, computed as an exact ratio.
pub fn apl_oracle(dist: &[Vec<Option<u64>>], members: &[usize]) -> f64 {
    let mut total = 0u64;
    let mut pairs = 0u64;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            total += dist[a][b].expect("members must be mutually reachable");
            pairs += 1;
        }
    }
    total as f64 / pairs as f64
}

pub fn graph_of(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied()).unwrap()
}

pub fn ids(nodes: &[NodeId]) -> Vec<usize> {
    nodes.iter().map(|u| u.index()).collect()
}

/// Greedy highest-current-degree order, recounting every degree from the
/// edge list at each step. Ties go to the smallest id.
pub fn greedy_order_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let degree = |u: usize, alive: &[bool]| {
            edges
                .iter()
                .filter(|&&(a, b)| alive[a] && alive[b] && (a == u || b == u))
                .count()
        };
        let best = (0..n)
            .filter(|&u| alive[u])
            .max_by(|&x, &y| degree(x, &alive).cmp(&degree(y, &alive)).then(y.cmp(&x)))
            .unwrap();
        alive[best] = false;
        order.push(best);
    }
    order
}

/// Size of the largest component by plain DFS over an adjacency matrix,
/// restricted to the `alive` nodes.
pub fn lcc_size_oracle(adj: &[Vec<bool>], alive: &[bool]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut best = 0;
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for v in 0..n {
                if adj[u][v] && alive[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        best = best.max(size);
    }
    best
}
