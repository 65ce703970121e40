//! The unique-reach distribution built on a fixed RS digraph, in both edge
//! directions.

use super::si::{sample_si, SiInstance};
use crate::error::{param, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::report::Report;
use crate::rng::Substream;
use crate::rsgraph::{restrict_matching, RsDigraph};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Where the four layers of a unique-reach graph live in the global vertex
/// numbering. Forward: `terminal = s`, layers `V1 = L`, `V2 = R`, `V3`.
/// Inverse: `terminal = t`, layers `U1`, `U2`, `U3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrLayout {
    pub terminal: Vertex,
    pub layer1: Vertex,
    pub layer2: Vertex,
    pub layer3: Vertex,
    pub n_side: u32,
    pub r: u32,
}

impl UrLayout {
    /// Stand-alone numbering: terminal 0, then the three layers.
    pub fn standalone(rs: &RsDigraph) -> Self {
        UrLayout {
            terminal: 0,
            layer1: 1,
            layer2: 1 + rs.n_side,
            layer3: 1 + 2 * rs.n_side,
            n_side: rs.n_side,
            r: rs.r as u32,
        }
    }

    pub fn left(&self, u: u32) -> Vertex {
        self.layer1 + u - 1
    }

    pub fn right(&self, v: u32) -> Vertex {
        self.layer2 + v - 1
    }

    /// `w_j`, `j ∈ [r]`.
    pub fn w(&self, j: u32) -> Vertex {
        self.layer3 + j - 1
    }

    pub fn in_layer3(&self, v: Vertex) -> bool {
        (self.layer3..self.layer3 + self.r).contains(&v)
    }

    pub fn vertex_count(&self) -> usize {
        1 + 2 * self.n_side as usize + self.r as usize
    }
}

/// A sampled unique-reach instance. `si[i - 1]` is `(S_i, T_i)` over `[r]`;
/// Alice holds `e_a`, Bob holds `e_b`. For the inverse direction every edge
/// is reversed and `s_star` plays the role of `t*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrInstance {
    pub rs: RsDigraph,
    pub direction: Direction,
    pub layout: UrLayout,
    pub si: Vec<SiInstance>,
    pub i_star: usize,
    pub e_star: u32,
    pub s_star: Vertex,
    pub b: usize,
    pub e_a: Vec<Edge>,
    pub e_b: Vec<Edge>,
    pub source: Substream,
}

impl UrInstance {
    pub fn orient(&self, (u, v): Edge) -> Edge {
        match self.direction {
            Direction::Forward => (u, v),
            Direction::Inverse => (v, u),
        }
    }

    /// `{w_j : j ∈ T_{i*}}`, the set `s*` is uniform over given Bob's input.
    pub fn conditional_support(&self) -> Vec<Vertex> {
        self.si[self.i_star - 1].b.iter().map(|&j| self.layout.w(j)).collect()
    }

    pub fn all_edges(&self) -> Vec<Edge> {
        self.e_a.iter().chain(&self.e_b).copied().collect()
    }

    /// Layer-3 vertices connected to the terminal (reachable from `s`, or
    /// reaching `t` in the inverse direction), found by BFS on the full
    /// vertex range `0..n`.
    pub fn reachable_layer3(&self, n: usize) -> Vec<Vertex> {
        let mut g = Graph::directed(n, self.all_edges());
        if self.direction == Direction::Inverse {
            g = g.reversed();
        }
        let seen = g.reachable_from(self.layout.terminal);
        (0..self.layout.r).map(|j| self.layout.w(j + 1)).filter(|&w| seen[w as usize]).collect()
    }

    pub fn layer_names(&self) -> [&'static str; 4] {
        match self.direction {
            Direction::Forward => ["s", "V1", "V2", "V3"],
            Direction::Inverse => ["t", "U1", "U2", "U3"],
        }
    }
}

fn edges_for(rs: &RsDigraph, layout: &UrLayout, direction: Direction, si: &[SiInstance], i_star: usize) -> Result<(Vec<Edge>, Vec<Edge>)> {
    let orient = |(u, v): Edge| match direction {
        Direction::Forward => (u, v),
        Direction::Inverse => (v, u),
    };
    let mut e_a = Vec::new();
    for (i, inst) in si.iter().enumerate() {
        let s: Vec<usize> = inst.a.iter().map(|&j| j as usize).collect();
        for e in restrict_matching(rs, i + 1, &s)? {
            e_a.push(orient((layout.left(e.left), layout.right(e.right))));
        }
    }
    let m_star = rs.matching(i_star)?;
    let t_star = &si[i_star - 1].b;
    let mut e_b = Vec::new();
    for &j in t_star {
        let e = m_star[j as usize - 1];
        e_b.push(orient((layout.terminal, layout.left(e.left))));
    }
    for &j in t_star {
        let e = m_star[j as usize - 1];
        e_b.push(orient((layout.right(e.right), layout.w(j))));
    }
    Ok((e_a, e_b))
}

pub fn sample_ur(rs: &RsDigraph, direction: Direction, source: &Substream) -> Result<UrInstance> {
    sample_ur_with_layout(rs, direction, UrLayout::standalone(rs), source)
}

pub fn sample_ur_with_layout(rs: &RsDigraph, direction: Direction, layout: UrLayout, source: &Substream) -> Result<UrInstance> {
    if rs.r == 0 || !rs.r.is_multiple_of(4) {
        return param(format!("matching size r = {} must be a positive multiple of 4", rs.r));
    }
    if rs.t == 0 {
        return param("RS digraph has no matchings");
    }
    let mut rng = source.rng();
    let si = (0..rs.t)
        .map(|_| sample_si(rs.r as u32, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let i_star = rng.gen_range(1..=rs.t);
    let (e_a, e_b) = edges_for(rs, &layout, direction, &si, i_star)?;
    let e_star = si[i_star - 1].e_star;
    let inst = UrInstance {
        rs: rs.clone(),
        direction,
        layout,
        i_star,
        e_star,
        s_star: layout.w(e_star),
        b: rs.r / 4,
        si,
        e_a,
        e_b,
        source: source.clone(),
    };
    let n = (layout.layer3 + layout.r) as usize;
    let reach = inst.reachable_layer3(n.max(layout.terminal as usize + 1));
    if reach != [inst.s_star] {
        return Err(crate::Error::Invariant(format!(
            "layer-3 vertices reachable: {reach:?}, expected only w_{{e*}} = {}",
            inst.s_star
        )));
    }
    Ok(inst)
}

/// Rebuilds the edge sets from the stored SI draws and checks the
/// uniqueness promise by BFS: exactly one layer-3 vertex is connected to the
/// terminal, it is `w_{e*}`, and Bob's input pins `s*` to `b = r/4`
/// candidates.
pub fn verify_ur_promise(inst: &UrInstance) -> Report {
    let subject = format!("unique-reach ({:?})", inst.direction);
    let mut checks = 0;
    for (i, s) in inst.si.iter().enumerate() {
        checks += 1;
        if let Err(e) = s.check() {
            return Report::fail(subject, checks, format!("SI instance {}: {e}", i + 1));
        }
    }
    if inst.i_star == 0 || inst.i_star > inst.si.len() {
        return Report::fail(subject, checks, format!("i* = {} out of range", inst.i_star));
    }
    match edges_for(&inst.rs, &inst.layout, inst.direction, &inst.si, inst.i_star) {
        Ok((e_a, e_b)) => {
            checks += 1;
            let sorted = |v: &[Edge]| {
                let mut v = v.to_vec();
                v.sort_unstable();
                v
            };
            if sorted(&e_a) != sorted(&inst.e_a) {
                return Report::fail(subject, checks, "E_A differs from the union of restricted matchings");
            }
            let expected_b = sorted(&e_b);
            let actual_b = sorted(&inst.e_b);
            // extra Bob edges are left for the BFS check to judge
            if !expected_b.iter().all(|e| actual_b.binary_search(e).is_ok()) {
                return Report::fail(subject, checks, "E_B is missing edges of the i*-th matching");
            }
        }
        Err(e) => return Report::fail(subject, checks, e.to_string()),
    }
    let e_star = inst.si[inst.i_star - 1].e_star;
    if inst.e_star != e_star || inst.s_star != inst.layout.w(e_star) {
        return Report::fail(subject, checks, format!("stored witness {} is not w_(e*) for e* = {e_star}", inst.s_star));
    }
    let n = inst
        .all_edges()
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .chain([inst.layout.terminal, inst.layout.layer3 + inst.layout.r - 1])
        .max()
        .unwrap_or(0) as usize
        + 1;
    checks += 1;
    let reach = inst.reachable_layer3(n);
    if reach != [inst.s_star] {
        return Report::fail(
            subject,
            checks,
            format!("layer-3 vertices connected to the terminal: {reach:?}, expected exactly [{}]", inst.s_star),
        );
    }
    checks += 1;
    let support = inst.conditional_support();
    if support.len() != inst.rs.r / 4 || support.len() != inst.b || !support.contains(&inst.s_star) {
        return Report::fail(subject, checks, format!("conditional support has {} vertices, expected b = r/4 = {}", support.len(), inst.rs.r / 4));
    }
    Report::pass(subject, checks)
}
