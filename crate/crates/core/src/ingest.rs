//! Reading real-world network files.
//!
//! Three input formats are understood: SNAP-style edge lists, Pajek `.net`
//! and GML. Whatever the source, the result is reduced to a simple undirected
//! graph restricted to its largest connected component.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph is empty after simplification")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IngestError {
    IngestError::Parse { line, msg: msg.into() }
}

/// Endpoint label pairs as found in the file, before any clean-up.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawEdgeList {
    pub pairs: Vec<(String, String)>,
    pub directed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    EdgeList,
    Pajek,
    Gml,
}

impl Format {
    /// `.net` is Pajek, `.gml` is GML, anything else an edge list.
    pub fn from_path(path: &Path) -> Format {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("net") => Format::Pajek,
            Some("gml") => Format::Gml,
            _ => Format::EdgeList,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edgelist" | "edge-list" | "snap" | "canonical" => Ok(Format::EdgeList),
            "pajek" | "net" => Ok(Format::Pajek),
            "gml" => Ok(Format::Gml),
            _ => Err(format!("unknown format `{s}` (expected edgelist, pajek or gml)")),
        }
    }
}

/// Whitespace-separated pairs, one per line; `#` starts a comment line.
pub fn parse_edge_list<R: BufRead>(input: R) -> Result<RawEdgeList, IngestError> {
    let mut raw = RawEdgeList::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        match (toks.next(), toks.next(), toks.next()) {
            (Some(a), Some(b), None) => raw.pairs.push((a.to_string(), b.to_string())),
            _ => {
                let n = line.split_whitespace().count();
                return Err(parse_err(i + 1, format!("expected 2 tokens, found {n}")));
            }
        }
    }
    Ok(raw)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PajekSection {
    Preamble,
    Vertices,
    Edges,
    EdgesList,
    Other,
}

/// Pajek `.net`: `*Vertices n`, then `*Edges`/`*Arcs` (or the `*Edgeslist`
/// / `*Arcslist` forms). Ids are 1-based; vertex labels, weights and layout
/// attributes are ignored. `%` starts a comment line.
pub fn parse_pajek<R: BufRead>(input: R) -> Result<RawEdgeList, IngestError> {
    let mut raw = RawEdgeList::default();
    let mut n: Option<usize> = None;
    let mut section = PajekSection::Preamble;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(header) = line.strip_prefix('*') {
            let mut toks = header.split_whitespace();
            let keyword = toks.next().unwrap_or("").to_ascii_lowercase();
            section = match keyword.as_str() {
                "vertices" => {
                    let count = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err(lineno, "*Vertices needs a vertex count"))?;
                    n = Some(count);
                    PajekSection::Vertices
                }
                "edges" | "arcs" | "edgeslist" | "arcslist" => {
                    if n.is_none() {
                        return Err(parse_err(lineno, "edge section before *Vertices header"));
                    }
                    if keyword.starts_with("arcs") {
                        raw.directed = true;
                    }
                    if keyword.ends_with("list") {
                        PajekSection::EdgesList
                    } else {
                        PajekSection::Edges
                    }
                }
                _ => PajekSection::Other,
            };
            continue;
        }
        let count = match (section, n) {
            (PajekSection::Edges | PajekSection::EdgesList, Some(count)) => count,
            _ => continue,
        };
        let vertex = |tok: &str| -> Result<String, IngestError> {
            let id: usize = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad vertex id `{tok}`")))?;
            if id == 0 || id > count {
                return Err(parse_err(lineno, format!("vertex {id} outside 1..={count}")));
            }
            Ok(tok.to_string())
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(parse_err(lineno, "edge line needs two vertex ids"));
        }
        let source = vertex(toks[0])?;
        if section == PajekSection::Edges {
            raw.pairs.push((source, vertex(toks[1])?));
        } else {
            for t in &toks[1..] {
                raw.pairs.push((source.clone(), vertex(t)?));
            }
        }
    }
    if n.is_none() {
        return Err(parse_err(0, "missing *Vertices header"));
    }
    Ok(raw)
}

#[derive(Debug, Clone, PartialEq)]
enum GmlToken {
    Open,
    Close,
    Word(String),
    Text(String),
}

fn tokenize_gml(text: &str) -> Result<Vec<(GmlToken, usize)>, IngestError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '[' => {
                out.push((GmlToken::Open, line));
                chars.next();
            }
            ']' => {
                out.push((GmlToken::Close, line));
                chars.next();
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => return Err(parse_err(start, "unterminated string")),
                    }
                }
                out.push((GmlToken::Text(s), start));
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                out.push((GmlToken::Word(s), line));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum GmlValue {
    Scalar(String),
    List(Vec<(String, GmlValue, usize)>),
}

fn parse_gml_list(
    toks: &[(GmlToken, usize)],
    pos: &mut usize,
    nested: bool,
) -> Result<Vec<(String, GmlValue, usize)>, IngestError> {
    let mut items = Vec::new();
    loop {
        let Some((tok, line)) = toks.get(*pos) else {
            if nested {
                let last = toks.last().map_or(0, |t| t.1);
                return Err(parse_err(last, "unclosed '['"));
            }
            return Ok(items);
        };
        *pos += 1;
        let key = match tok {
            GmlToken::Close if nested => return Ok(items),
            GmlToken::Word(k) => k.clone(),
            _ => return Err(parse_err(*line, "expected a key")),
        };
        let Some((value, vline)) = toks.get(*pos) else {
            return Err(parse_err(*line, format!("key `{key}` has no value")));
        };
        *pos += 1;
        let value = match value {
            GmlToken::Open => GmlValue::List(parse_gml_list(toks, pos, true)?),
            GmlToken::Word(w) => GmlValue::Scalar(w.clone()),
            GmlToken::Text(t) => GmlValue::Scalar(t.clone()),
            GmlToken::Close => return Err(parse_err(*vline, format!("key `{key}` has no value"))),
        };
        items.push((key, value, *line));
    }
}

/// GML: `graph [ node [ id N ... ] edge [ source A target B ... ] ]`.
/// Attributes other than `id`, `source`, `target` and `directed` are ignored.
pub fn parse_gml<R: Read>(mut input: R) -> Result<RawEdgeList, IngestError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let toks = tokenize_gml(&text)?;
    let mut pos = 0;
    let top = parse_gml_list(&toks, &mut pos, false)?;
    let graph = top
        .into_iter()
        .find_map(|(k, v, _)| match (k.as_str(), v) {
            ("graph", GmlValue::List(items)) => Some(items),
            _ => None,
        })
        .ok_or_else(|| parse_err(0, "no `graph [ ... ]` block"))?;
    let scalar = |items: &[(String, GmlValue, usize)], key: &str| {
        items.iter().find_map(|(k, v, _)| match v {
            GmlValue::Scalar(s) if k == key => Some(s.clone()),
            _ => None,
        })
    };
    let mut raw = RawEdgeList {
        directed: scalar(&graph, "directed").is_some_and(|d| d == "1"),
        ..RawEdgeList::default()
    };
    for (key, value, line) in &graph {
        if key != "edge" {
            continue;
        }
        let GmlValue::List(items) = value else {
            return Err(parse_err(*line, "edge must be a [ ... ] block"));
        };
        let source = scalar(items, "source").ok_or_else(|| parse_err(*line, "edge without source"))?;
        let target = scalar(items, "target").ok_or_else(|| parse_err(*line, "edge without target"))?;
        raw.pairs.push((source, target));
    }
    Ok(raw)
}

/// Bijection between file labels and dense node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl LabelMap {
    fn from_labels(labels: Vec<String>) -> Self {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), NodeId::from(i)))
            .collect();
        LabelMap { labels, index }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id.index()).map(String::as_str)
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// `id<TAB>label` per line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, l) in self.labels.iter().enumerate() {
            writeln!(out, "{i}\t{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Ingested {
    /// Largest component, connected and densely indexed.
    pub graph: Graph,
    pub labels: LabelMap,
    /// Node and edge counts after simplification, before the component cut.
    pub simplified_nodes: usize,
    pub simplified_edges: usize,
    pub directed_input: bool,
}

/// Drops self-loops, merges duplicate and reciprocal pairs into one
/// undirected edge and keeps only the largest connected component.
///
/// Retained nodes are numbered in label order: numerically when every label
/// is an integer, lexicographically otherwise. Re-ingesting an exported graph
/// therefore reproduces the same numbering.
pub fn simplify_and_lcc(raw: &RawEdgeList) -> Result<Ingested, IngestError> {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<&str> = Vec::new();
    let mut edges = Vec::with_capacity(raw.pairs.len());
    for (a, b) in &raw.pairs {
        if a == b {
            continue;
        }
        let mut ends = [0usize; 2];
        for (slot, label) in ends.iter_mut().zip([a.as_str(), b.as_str()]) {
            *slot = *ids.entry(label).or_insert_with(|| {
                labels.push(label);
                labels.len() - 1
            });
        }
        edges.push((ends[0], ends[1]));
    }
    let full = Graph::from_edges(labels.len(), edges).expect("self-loops already dropped");
    if full.edge_count() == 0 {
        return Err(IngestError::Empty);
    }
    let mut keep = full.largest_component().map_err(|_| IngestError::Empty)?;
    let numeric: Option<Vec<i64>> = keep.iter().map(|u| labels[u.index()].parse().ok()).collect();
    match numeric {
        Some(values) => {
            let mut paired: Vec<(i64, NodeId)> = values.into_iter().zip(keep).collect();
            paired.sort();
            keep = paired.into_iter().map(|(_, u)| u).collect();
        }
        None => keep.sort_by(|a, b| labels[a.index()].cmp(labels[b.index()])),
    }
    let graph = full.induced_subgraph(&keep);
    let kept_labels = keep.iter().map(|u| labels[u.index()].to_string()).collect();
    Ok(Ingested {
        graph,
        labels: LabelMap::from_labels(kept_labels),
        simplified_nodes: full.node_count(),
        simplified_edges: full.edge_count(),
        directed_input: raw.directed,
    })
}

pub fn parse<R: BufRead>(input: R, format: Format) -> Result<RawEdgeList, IngestError> {
    match format {
        Format::EdgeList => parse_edge_list(input),
        Format::Pajek => parse_pajek(input),
        Format::Gml => parse_gml(input),
    }
}

/// Reads and ingests a file, detecting the format from its extension unless
/// one is given.
pub fn read_graph(path: &Path, format: Option<Format>) -> Result<Ingested, IngestError> {
    let format = format.unwrap_or_else(|| Format::from_path(path));
    let raw = parse(BufReader::new(File::open(path)?), format)?;
    simplify_and_lcc(&raw)
}

/// Dense index per active node, in id order.
fn dense_ids(g: &Graph) -> Vec<u32> {
    let mut map = vec![u32::MAX; g.capacity()];
    for (i, u) in g.nodes().enumerate() {
        map[u.index()] = i as u32;
    }
    map
}

/// Canonical edge list: `# nodes=<n> edges=<m>` then `u v` per edge with
/// `u < v`, ascending, nodes renumbered densely from 0.
pub fn write_canonical<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    let ids = dense_ids(g);
    writeln!(out, "# nodes={} edges={}", g.node_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "{} {}", ids[e.u().index()], ids[e.v().index()])?;
    }
    Ok(())
}

pub fn write_pajek<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    let ids = dense_ids(g);
    writeln!(out, "*Vertices {}", g.node_count())?;
    for i in 1..=g.node_count() {
        writeln!(out, "{i} \"{}\"", i - 1)?;
    }
    writeln!(out, "*Edges")?;
    for e in g.edges() {
        writeln!(out, "{} {}", ids[e.u().index()] + 1, ids[e.v().index()] + 1)?;
    }
    Ok(())
}

pub fn write_gml<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    let ids = dense_ids(g);
    writeln!(out, "graph [")?;
    writeln!(out, "  directed 0")?;
    for i in 0..g.node_count() {
        writeln!(out, "  node [ id {i} ]")?;
    }
    for e in g.edges() {
        writeln!(out, "  edge [ source {} target {} ]", ids[e.u().index()], ids[e.v().index()])?;
    }
    writeln!(out, "]")
}

pub fn write_graph<W: Write>(g: &Graph, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::EdgeList => write_canonical(g, out),
        Format::Pajek => write_pajek(g, out),
        Format::Gml => write_gml(g, out),
    }
}
