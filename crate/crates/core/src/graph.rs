//! Plain edge-list graphs and the offline oracles (BFS, distances,
//! topological sort) that every verifier in the crate leans on.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

pub type Vertex = u32;
pub type Edge = (Vertex, Vertex);

/// A graph on vertices `0..n` stored as an edge list. Whether edges are
/// directed is up to the caller; see [`Graph::directed`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn directed(n: usize, edges: Vec<Edge>) -> Self {
        Graph {
            n,
            directed: true,
            edges,
        }
    }

    pub fn undirected(n: usize, edges: Vec<Edge>) -> Self {
        Graph {
            n,
            directed: false,
            edges,
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<Vertex>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            if !self.directed {
                adj[v as usize].push(u);
            }
        }
        adj
    }

    /// Hop distances from `source`; `None` marks unreachable vertices.
    pub fn distances(&self, source: Vertex) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source as usize] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap();
            for &v in &adj[u as usize] {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn reachable_from(&self, source: Vertex) -> Vec<bool> {
        self.distances(source).iter().map(Option::is_some).collect()
    }

    pub fn reaches(&self, s: Vertex, t: Vertex) -> bool {
        self.distances(s)[t as usize].is_some()
    }

    pub fn distance(&self, s: Vertex, t: Vertex) -> Option<usize> {
        self.distances(s)[t as usize]
    }

    /// Kahn's algorithm. `None` iff the directed graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<Vertex>> {
        let mut indeg = vec![0usize; self.n];
        for &(_, v) in &self.edges {
            indeg[v as usize] += 1;
        }
        let adj = self.adjacency();
        let mut queue: VecDeque<Vertex> = (0..self.n as Vertex).filter(|&v| indeg[v as usize] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &adj[u as usize] {
                indeg[v as usize] -= 1;
                if indeg[v as usize] == 0 {
                    queue.push_back(v);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    pub fn reversed(&self) -> Graph {
        Graph {
            n: self.n,
            directed: self.directed,
            edges: self.edges.iter().map(|&(u, v)| (v, u)).collect(),
        }
    }
}
