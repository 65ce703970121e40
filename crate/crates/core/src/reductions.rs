//! Reductions from `s`-`t` reachability to bipartite perfect matching,
//! undirected shortest path, acyclicity and reachable-set size.
//!
//! Every reduction maps each input edge to at most one output edge and adds
//! edges that depend only on the vertex set, so it can run on a stream as
//! the edges go by. The `*_stream` forms do exactly that.

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::instances::{EdgeStream, Layer, Segment, SegmentTag};
use serde::{Deserialize, Serialize};

/// A bipartite graph with left vertices `0..left` and right vertices
/// `0..right`; `edges` holds `(left, right)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<Edge>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: Vec<Edge>) -> Result<Self> {
        if let Some(&(l, r)) = edges.iter().find(|&&(l, r)| l as usize >= left || r as usize >= right) {
            return Err(Error::Invariant(format!("edge ({l}, {r}) leaves the {left}×{right} vertex sets")));
        }
        Ok(BipartiteGraph { left, right, edges })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("BIPARTITE {} {}\n", self.left, self.right);
        for (l, r) in &self.edges {
            out.push_str(&format!("{l} {r}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
        let (left, right) = match header.as_slice() {
            ["BIPARTITE", l, r] => (parse(l)?, parse(r)?),
            _ => return Err(Error::Parse("expected header `BIPARTITE <left> <right>`".into())),
        };
        let mut edges = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                [l, r] => edges.push((parse(l)? as Vertex, parse(r)? as Vertex)),
                _ => return Err(Error::Parse(format!("bad edge line `{line}`"))),
            }
        }
        Self::new(left, right, edges)
    }
}

fn parse(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("`{s}` is not a number")))
}

/// Output of [`reduce_to_matching`]. Left vertex `i` stands for
/// `left_of[i]` of the input graph, likewise on the right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingReduction {
    pub graph: BipartiteGraph,
    pub left_of: Vec<Vertex>,
    pub right_of: Vec<Vertex>,
    /// edges into `s` or out of `t`, which cannot lie on an `s`-`t` path
    pub dropped: usize,
}

/// Per-edge part of the matching reduction on `n` vertices.
#[derive(Debug, Clone, Copy)]
pub struct MatchingMap {
    pub n: usize,
    pub s: Vertex,
    pub t: Vertex,
}

impl MatchingMap {
    pub fn new(n: usize, s: Vertex, t: Vertex) -> Result<Self> {
        if s == t || s as usize >= n || t as usize >= n {
            return Err(Error::Parameter(format!("need distinct s, t below {n}, got s = {s}, t = {t}")));
        }
        Ok(MatchingMap { n, s, t })
    }

    /// Every vertex but `t` has a left copy.
    pub fn left(&self, v: Vertex) -> Vertex {
        v - u32::from(v > self.t)
    }

    /// Every vertex but `s` has a right copy.
    pub fn right(&self, v: Vertex) -> Vertex {
        v - u32::from(v > self.s)
    }

    /// `(u, v) ↦ (uˡ, vʳ)`, or `None` for an edge into `s` or out of `t`.
    pub fn map_edge(&self, (u, v): Edge) -> Option<Edge> {
        (v != self.s && u != self.t).then(|| (self.left(u), self.right(v)))
    }

    /// `(vˡ, vʳ)` for every vertex other than `s` and `t`.
    pub fn inner_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n as Vertex)
            .filter(|&v| v != self.s && v != self.t)
            .map(|v| (self.left(v), self.right(v)))
    }
}

/// `G` has a perfect matching iff `s` reaches `t` in `h`: a path
/// `s, v₁, …, vₖ, t` matches `sˡ→v₁ʳ, v₁ˡ→v₂ʳ, …` and every other inner
/// vertex is matched to its own copy.
pub fn reduce_to_matching(h: &Graph, s: Vertex, t: Vertex) -> Result<MatchingReduction> {
    if !h.directed {
        return Err(Error::Parameter("the matching reduction takes a directed graph".into()));
    }
    let map = MatchingMap::new(h.n, s, t)?;
    let mut edges = Vec::with_capacity(h.edges.len() + h.n);
    let mut dropped = 0;
    for &e in &h.edges {
        match map.map_edge(e) {
            Some(out) => edges.push(out),
            None => dropped += 1,
        }
    }
    edges.extend(map.inner_edges());
    let side = h.n - 1;
    Ok(MatchingReduction {
        graph: BipartiteGraph::new(side, side, edges)?,
        left_of: (0..h.n as Vertex).filter(|&v| v != t).collect(),
        right_of: (0..h.n as Vertex).filter(|&v| v != s).collect(),
        dropped,
    })
}

/// Maximum matching by repeated augmenting-path search; returns the right
/// partner of every left vertex.
pub fn maximum_matching(g: &BipartiteGraph) -> Vec<Option<Vertex>> {
    let mut adj = vec![Vec::new(); g.left];
    for &(l, r) in &g.edges {
        adj[l as usize].push(r);
    }
    let mut match_right: Vec<Option<Vertex>> = vec![None; g.right];
    fn augment(l: usize, adj: &[Vec<Vertex>], seen: &mut [bool], match_right: &mut [Option<Vertex>]) -> bool {
        for &r in &adj[l] {
            if std::mem::replace(&mut seen[r as usize], true) {
                continue;
            }
            let free = match match_right[r as usize] {
                None => true,
                Some(other) => augment(other as usize, adj, seen, match_right),
            };
            if free {
                match_right[r as usize] = Some(l as Vertex);
                return true;
            }
        }
        false
    }
    for l in 0..g.left {
        let mut seen = vec![false; g.right];
        augment(l, &adj, &mut seen, &mut match_right);
    }
    let mut partner = vec![None; g.left];
    for (r, l) in match_right.iter().enumerate() {
        if let Some(l) = l {
            partner[*l as usize] = Some(r as Vertex);
        }
    }
    partner
}

pub fn perfect_matching_exists(g: &BipartiteGraph) -> bool {
    g.left == g.right && maximum_matching(g).iter().all(Option::is_some)
}

/// Forgets edge directions. On a layered instance every `s`-`t` walk has
/// odd length, so the distance is 7 when `s` reaches `t` and at least 9
/// otherwise.
pub fn reduce_to_sssp(h: &Graph) -> Graph {
    Graph::undirected(h.n, h.edges.clone())
}

/// Adds `(t, s)`. The result is acyclic iff `s` does not reach `t`.
pub fn reduce_to_acyclicity(h: &Graph, s: Vertex, t: Vertex) -> Result<Graph> {
    if !h.directed {
        return Err(Error::Parameter("acyclicity is about directed graphs".into()));
    }
    if !h.is_acyclic() {
        return Err(Error::Rejected("input already contains a cycle".into()));
    }
    let mut edges = h.edges.clone();
    edges.push((t, s));
    Ok(Graph::directed(h.n, edges))
}

/// Adds `2n` fresh vertices `n..3n`, each with an edge from `t`. Then `s`
/// reaches at least `2n` vertices if it reaches `t`, at most `n` otherwise.
pub fn reduce_to_reach_count(h: &Graph, t: Vertex) -> Graph {
    let n = h.n as Vertex;
    let mut edges = h.edges.clone();
    edges.extend((n..3 * n).map(|x| (t, x)));
    Graph {
        n: 3 * h.n,
        directed: h.directed,
        edges,
    }
}

/// Number of vertices reachable from `s`, `s` included.
pub fn reach_count(g: &Graph, s: Vertex) -> usize {
    g.reachable_from(s).iter().filter(|&&r| r).count()
}

/// Whether deleting at most `k` edges makes `g` acyclic, by trying every
/// subset of at most `k` edges. Exponential in `k`.
pub fn feedback_arc_set_at_most(g: &Graph, k: usize) -> bool {
    fn go(g: &Graph, removed: &mut Vec<usize>, from: usize, k: usize) -> bool {
        let kept: Vec<Edge> = g
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, &e)| e)
            .collect();
        if Graph::directed(g.n, kept).is_acyclic() {
            return true;
        }
        if removed.len() == k {
            return false;
        }
        for i in from..g.edges.len() {
            removed.push(i);
            let found = go(g, removed, i + 1, k);
            removed.pop();
            if found {
                return true;
            }
        }
        false
    }
    go(g, &mut Vec::new(), 0, k)
}

fn stream_of(n: usize, directed: bool, layers: Vec<Layer>, segments: Vec<Segment>) -> EdgeStream {
    EdgeStream {
        n,
        directed,
        layers,
        segments,
    }
}

/// [`reduce_to_sssp`] on a stream: same edges, same order, undirected.
pub fn sssp_stream(stream: &EdgeStream) -> EdgeStream {
    let mut out = stream.clone();
    out.directed = false;
    out
}

/// [`reduce_to_acyclicity`] on a stream: `(t, s)` arrives as a final
/// segment.
pub fn acyclicity_stream(stream: &EdgeStream, s: Vertex, t: Vertex) -> EdgeStream {
    let mut out = stream.clone();
    out.segments.push(Segment {
        tag: SegmentTag::E,
        edges: vec![(t, s)],
    });
    out
}

/// [`reduce_to_reach_count`] on a stream: the fresh vertices form a layer
/// named `fresh` and their edges a final segment.
pub fn reach_count_stream(stream: &EdgeStream, t: Vertex) -> EdgeStream {
    let n = stream.n as Vertex;
    let mut layers = stream.layers.clone();
    layers.push(Layer {
        name: "fresh".into(),
        first: n,
        count: 2 * n,
    });
    let mut segments = stream.segments.clone();
    segments.push(Segment {
        tag: SegmentTag::E,
        edges: (n..3 * n).map(|x| (t, x)).collect(),
    });
    stream_of(3 * stream.n, stream.directed, layers, segments)
}

/// [`reduce_to_matching`] on a stream, edge by edge.
pub fn matching_from_stream(stream: &EdgeStream, s: Vertex, t: Vertex) -> Result<MatchingReduction> {
    reduce_to_matching(&stream.to_graph(), s, t)
}
