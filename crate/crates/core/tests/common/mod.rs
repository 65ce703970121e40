#![allow(dead_code)]

use reachlb::behrend::{construct_ap_free, BehrendSet, Strategy};
use reachlb::instances::{EdgeStream, Layer, Segment, SegmentTag};
use reachlb::rsgraph::{build_rs_digraph, RsDigraph, RsEdge};

/// r = 4, t = 6 from the set {1, 2, 4, 5} over [6].
pub fn rs_r4_t6() -> RsDigraph {
    build_rs_digraph(&BehrendSet::explicit(6, vec![1, 2, 4, 5])).unwrap()
}

/// A single perfect matching of size 4: r = 4, t = 1.
pub fn rs_r4_t1() -> RsDigraph {
    RsDigraph {
        n_side: 4,
        r: 4,
        t: 1,
        matchings: vec![(1..=4).map(|i| RsEdge::new(i, i)).collect()],
    }
}

/// r = 8, t = 27 from the base-3 set over [27].
pub fn rs_r8_t27() -> RsDigraph {
    build_rs_digraph(&construct_ap_free(27, Strategy::DigitBase3).unwrap()).unwrap()
}

/// Breadth-first distances on an explicit adjacency matrix, kept apart from
/// the library's own graph code.
pub fn matrix_distances(n: usize, edges: &[(u32, u32)], directed: bool, s: usize) -> Vec<Option<usize>> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        adj[u as usize][v as usize] = true;
        if !directed {
            adj[v as usize][u as usize] = true;
        }
    }
    let mut dist = vec![None; n];
    dist[s] = Some(0);
    let mut layer = vec![s];
    let mut d = 0;
    while !layer.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &u in &layer {
            for v in 0..n {
                if adj[u][v] && dist[v].is_none() {
                    dist[v] = Some(d);
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    dist
}

pub fn matrix_reaches(n: usize, edges: &[(u32, u32)], directed: bool, s: u32, t: u32) -> bool {
    matrix_distances(n, edges, directed, s as usize)[t as usize].is_some()
}

/// Perfect matching by trying every permutation of the right side.
pub fn brute_force_pm(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut adj = vec![vec![false; n]; n];
    for &(l, r) in edges {
        adj[l as usize][r as usize] = true;
    }
    fn go(adj: &[Vec<bool>], row: usize, used: &mut Vec<bool>) -> bool {
        if row == adj.len() {
            return true;
        }
        for c in 0..adj.len() {
            if adj[row][c] && !used[c] {
                used[c] = true;
                if go(adj, row + 1, used) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }
    go(&adj, 0, &mut vec![false; n])
}

/// Largest matching size by exhaustive search over left vertices.
pub fn brute_force_matching_size(left: usize, right: usize, edges: &[(u32, u32)]) -> usize {
    let mut adj = vec![Vec::new(); left];
    for &(l, r) in edges {
        adj[l as usize].push(r as usize);
    }
    fn go(adj: &[Vec<usize>], row: usize, used: &mut Vec<bool>) -> usize {
        if row == adj.len() {
            return 0;
        }
        let mut best = go(adj, row + 1, used);
        for &c in &adj[row] {
            if !used[c] {
                used[c] = true;
                best = best.max(1 + go(adj, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    go(&adj, 0, &mut vec![false; right])
}

pub fn random_edges<R: rand::Rng>(rng: &mut R, n: usize, density: f64, loops: bool) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if (loops || u != v) && rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Single-layer stream whose edges are cut into the segments E1, E2, E3.
pub fn three_segment_stream(n: usize, directed: bool, edges: &[(u32, u32)], cuts: (usize, usize)) -> EdgeStream {
    let (a, b) = cuts;
    let seg = |tag, e: &[(u32, u32)]| Segment { tag, edges: e.to_vec() };
    EdgeStream {
        n,
        directed,
        layers: vec![Layer {
            name: "V".into(),
            first: 0,
            count: n as u32,
        }],
        segments: vec![
            seg(SegmentTag::E1, &edges[..a]),
            seg(SegmentTag::E2, &edges[a..b]),
            seg(SegmentTag::E3, &edges[b..]),
        ],
    }
}
