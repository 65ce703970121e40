//! The st-reachability distribution: a forward unique-reach graph on
//! `s, V1, V2, V3`, an inverse one on `U3, U2, U1, t`, and a random
//! bipartite graph between `V3` and `U3`. The only candidate `s`–`t` path is
//! `s ⇝ s* → t* ⇝ t`, so reachability is exactly the bit `(s*, t*) ∈ E1`.

use super::ur::{sample_ur_with_layout, verify_ur_promise, Direction, UrInstance, UrLayout};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::report::Report;
use crate::rng::Substream;
use crate::rsgraph::RsDigraph;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// How `E1` is drawn. The forced modes are test hooks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum E1Mode {
    #[default]
    Random,
    Complete,
    Empty,
}

/// Global numbering: `s = 0`, then `V1, V2, V3, U3, U2, U1`, then `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StLayout {
    pub n_side: u32,
    pub r: u32,
}

impl StLayout {
    pub const LAYERS: [&'static str; 8] = ["s", "V1", "V2", "V3", "U3", "U2", "U1", "t"];

    pub fn s(&self) -> Vertex {
        0
    }

    pub fn t(&self) -> Vertex {
        1 + 4 * self.n_side + 2 * self.r
    }

    pub fn vertex_count(&self) -> usize {
        self.t() as usize + 1
    }

    /// First vertex and size of each of the eight layers.
    pub fn layer_ranges(&self) -> [(Vertex, u32); 8] {
        let (n, r) = (self.n_side, self.r);
        [
            (0, 1),
            (1, n),
            (1 + n, n),
            (1 + 2 * n, r),
            (1 + 2 * n + r, r),
            (1 + 2 * n + 2 * r, n),
            (1 + 3 * n + 2 * r, n),
            (1 + 4 * n + 2 * r, 1),
        ]
    }

    pub fn layer_of(&self, v: Vertex) -> Option<usize> {
        self.layer_ranges().iter().position(|&(first, len)| v >= first && v < first + len)
    }

    pub fn forward(&self) -> UrLayout {
        let [_, v1, v2, v3, ..] = self.layer_ranges();
        UrLayout {
            terminal: self.s(),
            layer1: v1.0,
            layer2: v2.0,
            layer3: v3.0,
            n_side: self.n_side,
            r: self.r,
        }
    }

    pub fn backward(&self) -> UrLayout {
        let [_, _, _, _, u3, u2, u1, _] = self.layer_ranges();
        UrLayout {
            terminal: self.t(),
            layer1: u1.0,
            layer2: u2.0,
            layer3: u3.0,
            n_side: self.n_side,
            r: self.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StInstance {
    pub layout: StLayout,
    pub e1: Vec<Edge>,
    pub e2: Vec<Edge>,
    pub e3: Vec<Edge>,
    pub forward: UrInstance,
    pub backward: UrInstance,
    pub s_star: Vertex,
    pub t_star: Vertex,
    pub reachable: bool,
    pub e1_mode: E1Mode,
    pub source: Substream,
}

impl StInstance {
    pub fn n(&self) -> usize {
        self.layout.vertex_count()
    }

    pub fn graph(&self) -> Graph {
        let edges = self.e1.iter().chain(&self.e2).chain(&self.e3).copied().collect();
        Graph::directed(self.n(), edges)
    }

    pub fn edge_count(&self) -> usize {
        self.e1.len() + self.e2.len() + self.e3.len()
    }
}

pub fn sample_st(rs: &RsDigraph, source: &Substream) -> Result<StInstance> {
    sample_st_with(rs, source, E1Mode::Random)
}

/// Samples `E1`, the forward half and the backward half from the disjoint
/// substreams `e1`, `forward` and `backward` of `source`.
pub fn sample_st_with(rs: &RsDigraph, source: &Substream, e1_mode: E1Mode) -> Result<StInstance> {
    let streams = StStreams {
        e1: source.child("e1"),
        forward: source.child("forward"),
        backward: source.child("backward"),
    };
    sample_st_from(rs, &streams, e1_mode, source)
}

/// The three independent sources of randomness of an st instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StStreams {
    pub e1: Substream,
    pub forward: Substream,
    pub backward: Substream,
}

pub fn sample_st_from(rs: &RsDigraph, streams: &StStreams, e1_mode: E1Mode, source: &Substream) -> Result<StInstance> {
    let layout = StLayout {
        n_side: rs.n_side,
        r: rs.r as u32,
    };
    let forward = sample_ur_with_layout(rs, Direction::Forward, layout.forward(), &streams.forward)?;
    let backward = sample_ur_with_layout(rs, Direction::Inverse, layout.backward(), &streams.backward)?;
    let [_, _, _, v3, u3, ..] = layout.layer_ranges();
    let mut rng = streams.e1.rng();
    let mut e1 = Vec::new();
    for i in 0..layout.r {
        for j in 0..layout.r {
            let keep = match e1_mode {
                E1Mode::Random => rng.gen_bool(0.5),
                E1Mode::Complete => true,
                E1Mode::Empty => false,
            };
            if keep {
                e1.push((v3.0 + i, u3.0 + j));
            }
        }
    }
    let e2 = forward.e_a.iter().chain(&backward.e_a).copied().collect();
    let e3 = forward.e_b.iter().chain(&backward.e_b).copied().collect();
    let (s_star, t_star) = (forward.s_star, backward.s_star);
    let mut inst = StInstance {
        layout,
        e1,
        e2,
        e3,
        forward,
        backward,
        s_star,
        t_star,
        reachable: false,
        e1_mode,
        source: source.clone(),
    };
    let reachable = inst.graph().reaches(layout.s(), layout.t());
    if reachable != inst.e1.contains(&(s_star, t_star)) {
        return Err(Error::Invariant(format!(
            "BFS says reachable = {reachable} but (s*, t*) ∈ E1 is {}",
            !reachable
        )));
    }
    inst.reachable = reachable;
    Ok(inst)
}

/// Number of distinct `s`–`t` paths in a DAG, saturating.
pub fn count_paths(g: &Graph, s: Vertex, t: Vertex) -> Option<u64> {
    let order = g.topological_order()?;
    let adj = g.adjacency();
    let mut ways = vec![0u64; g.n];
    ways[s as usize] = 1;
    for u in order {
        let w = ways[u as usize];
        if w == 0 {
            continue;
        }
        for &v in &adj[u as usize] {
            ways[v as usize] = ways[v as usize].saturating_add(w);
        }
    }
    Some(ways[t as usize])
}

/// Checks layer discipline, both unique-reach promises, that BFS
/// reachability agrees with `(s*, t*) ∈ E1` and with the stored flag, and
/// that a reachable instance has exactly one `s`–`t` path, of length 7.
pub fn verify_st_instance(inst: &StInstance) -> Report {
    let subject = "st-reachability instance".to_string();
    let mut checks = 0;
    let layout = inst.layout;
    for &(u, v) in inst.e1.iter().chain(&inst.e2).chain(&inst.e3) {
        checks += 1;
        match (layout.layer_of(u), layout.layer_of(v)) {
            (Some(a), Some(b)) if b == a + 1 => {}
            _ => return Report::fail(subject, checks, format!("edge ({u}, {v}) does not go to the next layer")),
        }
    }
    for half in [&inst.forward, &inst.backward] {
        let r = verify_ur_promise(half);
        checks += r.checks;
        if !r.passed {
            return Report::fail(subject, checks, format!("{}: {}", r.subject, r.failure.unwrap_or_default()));
        }
    }
    if inst.s_star != inst.forward.s_star || inst.t_star != inst.backward.s_star {
        return Report::fail(subject, checks, "stored s*/t* disagree with the unique-reach halves");
    }
    let g = inst.graph();
    let bfs = g.reaches(layout.s(), layout.t());
    let membership = inst.e1.contains(&(inst.s_star, inst.t_star));
    checks += 1;
    if bfs != membership {
        return Report::fail(subject, checks, format!("reachability {bfs} but (s*, t*) ∈ E1 is {membership}"));
    }
    if bfs != inst.reachable {
        return Report::fail(subject, checks, format!("stored reachable flag {} but BFS says {bfs}", inst.reachable));
    }
    if bfs {
        checks += 1;
        let dist = g.distance(layout.s(), layout.t());
        if dist != Some(7) {
            return Report::fail(subject, checks, format!("s-t distance {dist:?}, expected 7"));
        }
        match count_paths(&g, layout.s(), layout.t()) {
            Some(1) => {}
            other => return Report::fail(subject, checks, format!("{other:?} s-t paths, expected exactly one")),
        }
    }
    Report::pass(subject, checks)
}
