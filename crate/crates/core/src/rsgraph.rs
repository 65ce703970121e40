//! Ruzsa–Szemerédi digraphs from 3-AP-free sets.
//!
//! For a 3-AP-free `a ⊆ [m]` the midpoint construction puts `N = 3m`
//! vertices on each side and, for every `x ∈ [m]`, the matching
//!
//! ```text
//! M_x = { (left x+α, right x+2α) : α ∈ a }
//! ```
//!
//! Edge `(u, v)` lies in matching `x = 2u - v` only. A global edge
//! `(y+γ, y+2γ)` joining left `x+α` to right `x+2β` forces `γ = 2β - α`,
//! i.e. `α + γ = 2β` inside `a`. AP-freeness then gives `α = β = γ`, so the
//! only edges among the endpoints of `M_x` are its own: `M_x` is induced.

use crate::behrend::{verify_no_3ap, BehrendSet};
use crate::error::{Error, Result};
use crate::report::Report;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;

/// An edge from left vertex `left` to right vertex `right`. Both sides are
/// numbered `1..=N` in their own namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RsEdge {
    pub left: u32,
    pub right: u32,
}

impl RsEdge {
    pub fn new(left: u32, right: u32) -> Self {
        RsEdge { left, right }
    }
}

/// A bipartite digraph whose edges are grouped into `t` matchings of size
/// `r`. Matching `i` (1-based) is `matchings[i - 1]`, with edges stored in
/// their fixed order `e_{i,1}, …, e_{i,r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsDigraph {
    pub n_side: u32,
    pub r: usize,
    pub t: usize,
    pub matchings: Vec<Vec<RsEdge>>,
}

impl RsDigraph {
    pub fn matching(&self, i: usize) -> Result<&[RsEdge]> {
        if i == 0 || i > self.t {
            return Err(Error::OutOfRange { index: i, max: self.t });
        }
        Ok(&self.matchings[i - 1])
    }

    pub fn edge_count(&self) -> usize {
        self.matchings.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = RsEdge> + '_ {
        self.matchings.iter().flatten().copied()
    }

    /// `RS N t r`, then for each matching `M i` followed by its `u v` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("RS {} {} {}\n", self.n_side, self.t, self.r);
        for (i, m) in self.matchings.iter().enumerate() {
            let _ = writeln!(out, "M {}", i + 1);
            for e in m {
                let _ = writeln!(out, "{} {}", e.left, e.right);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse(format!("rs file: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty".into()))?.split_whitespace().collect();
        if header.len() != 4 || header[0] != "RS" {
            return Err(bad(format!("bad header {header:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s}: {e}")));
        let (n_side, t, r) = (num(header[1])? as u32, num(header[2])?, num(header[3])?);
        let mut matchings = Vec::with_capacity(t);
        for i in 1..=t {
            let tag = lines.next().ok_or_else(|| bad(format!("missing block {i}")))?;
            if tag != format!("M {i}") {
                return Err(bad(format!("expected `M {i}`, got `{tag}`")));
            }
            let mut m = Vec::with_capacity(r);
            for _ in 0..r {
                let line = lines.next().ok_or_else(|| bad(format!("block {i} too short")))?;
                let mut it = line.split_whitespace();
                let (u, v) = match (it.next(), it.next(), it.next()) {
                    (Some(u), Some(v), None) => (num(u)? as u32, num(v)? as u32),
                    _ => return Err(bad(format!("bad edge line `{line}`"))),
                };
                m.push(RsEdge::new(u, v));
            }
            matchings.push(m);
        }
        if let Some(extra) = lines.next() {
            return Err(bad(format!("trailing content `{extra}`")));
        }
        Ok(RsDigraph { n_side, r, t, matchings })
    }
}

/// Builds the midpoint RS digraph, rejecting sets that fail
/// [`verify_no_3ap`].
pub fn build_rs_digraph(a: &BehrendSet) -> Result<RsDigraph> {
    let report = verify_no_3ap(a);
    if !report.passed {
        return Err(Error::Rejected(format!(
            "set is not verified 3-AP-free: {}",
            report.reason.unwrap_or_default()
        )));
    }
    build_rs_digraph_unchecked(a.m, &a.elements)
}

/// The same construction without the AP-freeness gate. Used to demonstrate
/// that an AP inside `a` breaks induced-ness.
pub fn build_rs_digraph_unchecked(m: u64, a: &[u64]) -> Result<RsDigraph> {
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    if a.iter().any(|&x| x < 1 || x > m) {
        return Err(Error::Parameter(format!("elements must lie in [1, {m}]")));
    }
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let n_side = u32::try_from(3 * m).map_err(|_| Error::Parameter("m too large".into()))?;
    let matchings = (1..=m)
        .map(|x| {
            sorted
                .iter()
                .map(|&alpha| RsEdge::new((x + alpha) as u32, (x + 2 * alpha) as u32))
                .collect()
        })
        .collect();
    Ok(RsDigraph {
        n_side,
        r: sorted.len(),
        t: m as usize,
        matchings,
    })
}

/// Exhaustive check of the four RS invariants: sides in range, matchings of
/// size `r` with no shared endpoints, pairwise edge-disjointness, and
/// induced-ness via the cross-pair scan `(u_{ij}, v_{ij'}) ∉ E`.
pub fn verify_induced(g: &RsDigraph) -> Report {
    let subject = format!("rs digraph N={} t={} r={}", g.n_side, g.t, g.r);
    let mut checks = 0usize;
    if g.matchings.len() != g.t {
        return Report::fail(subject, checks, format!("{} matchings stored, t = {}", g.matchings.len(), g.t));
    }
    let mut global: HashSet<RsEdge> = HashSet::with_capacity(g.edge_count());
    for (i, m) in g.matchings.iter().enumerate() {
        if m.len() != g.r {
            return Report::fail(subject, checks, format!("matching {} has {} edges, expected {}", i + 1, m.len(), g.r));
        }
        let mut lefts = HashSet::new();
        let mut rights = HashSet::new();
        for e in m {
            checks += 1;
            if !(1..=g.n_side).contains(&e.left) || !(1..=g.n_side).contains(&e.right) {
                return Report::fail(subject, checks, format!("matching {}: edge {:?} leaves [1, N]", i + 1, e));
            }
            if !lefts.insert(e.left) || !rights.insert(e.right) {
                return Report::fail(subject, checks, format!("matching {}: endpoint of {:?} reused", i + 1, e));
            }
            if !global.insert(*e) {
                return Report::fail(subject, checks, format!("matching {}: edge {:?} appears in two matchings (disjointness)", i + 1, e));
            }
        }
    }
    let violations: Vec<(usize, usize, String)> = g
        .matchings
        .par_iter()
        .enumerate()
        .filter_map(|(i, m)| {
            for (j, ej) in m.iter().enumerate() {
                for (jj, ejj) in m.iter().enumerate() {
                    if j != jj && global.contains(&RsEdge::new(ej.left, ejj.right)) {
                        return Some((
                            i,
                            m.len() * m.len(),
                            format!(
                                "matching {} not induced: cross edge ({}, {}) is present",
                                i + 1,
                                ej.left,
                                ejj.right
                            ),
                        ));
                    }
                }
            }
            None
        })
        .collect();
    let cross_checks = g.t * g.r * g.r.saturating_sub(1);
    match violations.into_iter().min_by_key(|v| v.0) {
        Some((_, _, why)) => Report::fail(subject, checks, why),
        None => Report::pass(subject, checks + cross_checks),
    }
}

/// `M_i | S`: the edges `e_{ij}` for `j ∈ s` (1-based), in index order.
pub fn restrict_matching(g: &RsDigraph, i: usize, s: &[usize]) -> Result<Vec<RsEdge>> {
    let m = g.matching(i)?;
    let mut idx = s.to_vec();
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter()
        .map(|j| {
            if j == 0 || j > g.r {
                Err(Error::OutOfRange { index: j, max: g.r })
            } else {
                Ok(m[j - 1])
            }
        })
        .collect()
}
