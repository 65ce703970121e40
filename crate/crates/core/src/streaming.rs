//! Multi-pass edge streaming with space measured as the length of each
//! algorithm's serialized state.
//!
//! An algorithm is split into static configuration (vertex count, `s`, `t`,
//! seed), which is fixed before the stream starts, and dynamic state, which
//! is what [`StreamingAlgorithm::encode`] writes. Only the latter counts as
//! space. [`StreamingAlgorithm::decode`] must restore the dynamic state
//! exactly so that a stream can be handed between parties mid-pass.

use crate::bits::{width_for, BitString};
use crate::error::{param, Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::instances::EdgeStream;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
    Count(u64),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Yes => f.write_str("yes"),
            Answer::No => f.write_str("no"),
            Answer::Unknown => f.write_str("unknown"),
            Answer::Count(c) => write!(f, "{c}"),
        }
    }
}

impl From<bool> for Answer {
    fn from(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

/// What an algorithm is told before the first edge arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamInfo {
    pub n: usize,
    pub directed: bool,
}

pub trait StreamingAlgorithm: Send + Sync {
    fn tag(&self) -> String;
    fn passes(&self) -> usize;
    /// Resets the dynamic state for a stream on `info.n` vertices.
    fn init(&mut self, info: StreamInfo) -> Result<()>;
    fn begin_pass(&mut self, _pass: usize) {}
    fn process(&mut self, edge: Edge);
    fn end_pass(&mut self, _pass: usize) {}
    fn encode(&self) -> BitString;
    /// Replaces the dynamic state by `bits`, an encoding taken during pass
    /// `pass` (zero-based, before that pass ended).
    fn decode(&mut self, pass: usize, bits: &BitString) -> Result<()>;
    fn output(&self) -> Answer;
    fn box_clone(&self) -> Box<dyn StreamingAlgorithm>;
}

impl Clone for Box<dyn StreamingAlgorithm> {
    fn clone(&self) -> Self {
        self.box_clone()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamRun {
    pub algorithm: String,
    pub passes_used: usize,
    /// serialized state size in bits at every checkpoint, in order
    pub checkpoints: Vec<usize>,
    pub max_state_bits: usize,
    pub output: Answer,
    #[serde(with = "micros")]
    pub wall_time: Duration,
}

// Timing is never reproducible, so equality ignores it.
impl PartialEq for StreamRun {
    fn eq(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.passes_used == other.passes_used
            && self.checkpoints == other.checkpoints
            && self.max_state_bits == other.max_state_bits
            && self.output == other.output
    }
}

mod micros {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_micros(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub passes: usize,
    /// also checkpoint after every edge (slow)
    pub per_edge: bool,
}

impl RunOptions {
    pub fn passes(passes: usize) -> Self {
        RunOptions {
            passes,
            per_edge: false,
        }
    }
}

/// Runs `alg` over `stream` once per declared pass. State is measured after
/// `init`, at every segment boundary and at every pass end.
pub fn run_stream(alg: &mut dyn StreamingAlgorithm, stream: &EdgeStream, passes: usize) -> Result<StreamRun> {
    run_stream_with(alg, stream, RunOptions::passes(passes))
}

pub fn run_stream_with(alg: &mut dyn StreamingAlgorithm, stream: &EdgeStream, opts: RunOptions) -> Result<StreamRun> {
    let needed = alg.passes();
    if needed > opts.passes {
        return Err(Error::Passes {
            needed,
            budget: opts.passes,
        });
    }
    let start = Instant::now();
    alg.init(StreamInfo {
        n: stream.n,
        directed: stream.directed,
    })?;
    let mut checkpoints = vec![alg.encode().len()];
    for pass in 0..needed {
        alg.begin_pass(pass);
        for seg in &stream.segments {
            for &e in &seg.edges {
                alg.process(e);
                if opts.per_edge {
                    checkpoints.push(alg.encode().len());
                }
            }
            checkpoints.push(alg.encode().len());
        }
        alg.end_pass(pass);
        checkpoints.push(alg.encode().len());
    }
    Ok(StreamRun {
        algorithm: alg.tag(),
        passes_used: needed,
        max_state_bits: checkpoints.iter().copied().max().unwrap_or(0),
        checkpoints,
        output: alg.output(),
        wall_time: start.elapsed(),
    })
}

fn vertex_width(n: usize) -> usize {
    width_for(n.saturating_sub(1) as u64)
}

fn push_edges(bits: &mut BitString, edges: &[Edge], w: usize) {
    for &(u, v) in edges {
        bits.push_uint(u as u64, w);
        bits.push_uint(v as u64, w);
    }
}

fn read_edges(bits: &BitString, w: usize) -> Result<Vec<Edge>> {
    if w == 0 {
        return if bits.is_empty() { Ok(Vec::new()) } else { Err(Error::Parse("edge list on a one-vertex graph".into())) };
    }
    if !bits.len().is_multiple_of(2 * w) {
        return Err(Error::Parse(format!("{} bits is not a whole number of {}-bit edges", bits.len(), 2 * w)));
    }
    let mut r = bits.reader();
    let mut edges = Vec::with_capacity(bits.len() / (2 * w));
    while r.remaining() > 0 {
        let u = r.read_uint(w).unwrap() as Vertex;
        let v = r.read_uint(w).unwrap() as Vertex;
        edges.push((u, v));
    }
    Ok(edges)
}

fn push_bitset(bits: &mut BitString, set: &[bool]) {
    for &b in set {
        bits.push(b);
    }
}

/// Counts edges. The state is the count in `⌈log₂(c+1)⌉` bits.
#[derive(Debug, Clone, Default)]
pub struct EdgeCounter {
    count: u64,
}

impl StreamingAlgorithm for EdgeCounter {
    fn tag(&self) -> String {
        "edge-count".into()
    }

    fn passes(&self) -> usize {
        1
    }

    fn init(&mut self, _info: StreamInfo) -> Result<()> {
        self.count = 0;
        Ok(())
    }

    fn process(&mut self, _edge: Edge) {
        self.count += 1;
    }

    fn encode(&self) -> BitString {
        BitString::from_uint(self.count, width_for(self.count))
    }

    fn decode(&mut self, _pass: usize, bits: &BitString) -> Result<()> {
        if bits.len() > 64 {
            return Err(Error::Parse("edge count wider than 64 bits".into()));
        }
        self.count = bits.reader().read_uint(bits.len()).unwrap_or(0);
        Ok(())
    }

    fn output(&self) -> Answer {
        Answer::Count(self.count)
    }

    fn box_clone(&self) -> Box<dyn StreamingAlgorithm> {
        Box::new(self.clone())
    }
}

/// Stores every edge, then answers `s → t` by BFS.
#[derive(Debug, Clone)]
pub struct StoreAll {
    pub s: Vertex,
    pub t: Vertex,
    info: Option<StreamInfo>,
    edges: Vec<Edge>,
}

impl StoreAll {
    pub fn new(s: Vertex, t: Vertex) -> Self {
        StoreAll {
            s,
            t,
            info: None,
            edges: Vec::new(),
        }
    }
}

impl StreamingAlgorithm for StoreAll {
    fn tag(&self) -> String {
        "store-all".into()
    }

    fn passes(&self) -> usize {
        1
    }

    fn init(&mut self, info: StreamInfo) -> Result<()> {
        check_terminals(info, &[self.s, self.t])?;
        self.info = Some(info);
        self.edges.clear();
        Ok(())
    }

    fn process(&mut self, edge: Edge) {
        self.edges.push(edge);
    }

    fn encode(&self) -> BitString {
        let mut bits = BitString::new();
        push_edges(&mut bits, &self.edges, vertex_width(self.info.map_or(0, |i| i.n)));
        bits
    }

    fn decode(&mut self, _pass: usize, bits: &BitString) -> Result<()> {
        let info = self.info.ok_or_else(|| Error::Invariant("decode before init".into()))?;
        self.edges = read_edges(bits, vertex_width(info.n))?;
        Ok(())
    }

    fn output(&self) -> Answer {
        match self.info {
            None => Answer::No,
            Some(info) => {
                let g = Graph {
                    n: info.n,
                    directed: info.directed,
                    edges: self.edges.clone(),
                };
                g.reaches(self.s, self.t).into()
            }
        }
    }

    fn box_clone(&self) -> Box<dyn StreamingAlgorithm> {
        Box::new(self.clone())
    }
}

fn check_terminals(info: StreamInfo, vs: &[Vertex]) -> Result<()> {
    match vs.iter().find(|&&v| v as usize >= info.n) {
        Some(&v) => param(format!("vertex {v} outside a stream on {} vertices", info.n)),
        None => Ok(()),
    }
}

/// Grows the set of vertices reachable from `s` by one hop per pass.
///
/// State: the reached set and the set discovered in the current pass as two
/// `n`-bit bitsets, plus one bit recording that some pass found nothing new.
/// Answers `Yes` once `t` is reached, `No` once the reached set is closed,
/// `Unknown` otherwise.
#[derive(Debug, Clone)]
pub struct BfsFrontier {
    pub s: Vertex,
    pub t: Vertex,
    pub p: usize,
    directed: bool,
    reached: Vec<bool>,
    next: Vec<bool>,
    closed: bool,
}

impl BfsFrontier {
    pub fn new(s: Vertex, t: Vertex, p: usize) -> Self {
        BfsFrontier {
            s,
            t,
            p,
            directed: true,
            reached: Vec::new(),
            next: Vec::new(),
            closed: false,
        }
    }

    fn reach(&mut self, u: Vertex, v: Vertex) {
        if self.reached[u as usize] && !self.reached[v as usize] {
            self.next[v as usize] = true;
        }
    }
}

impl StreamingAlgorithm for BfsFrontier {
    fn tag(&self) -> String {
        "bfs-frontier".into()
    }

    fn passes(&self) -> usize {
        self.p
    }

    fn init(&mut self, info: StreamInfo) -> Result<()> {
        if self.p == 0 {
            return param("bfs-frontier needs at least one pass");
        }
        check_terminals(info, &[self.s, self.t])?;
        self.directed = info.directed;
        self.reached = vec![false; info.n];
        self.next = vec![false; info.n];
        self.reached[self.s as usize] = true;
        self.closed = false;
        Ok(())
    }

    fn process(&mut self, (u, v): Edge) {
        self.reach(u, v);
        if !self.directed {
            self.reach(v, u);
        }
    }

    fn end_pass(&mut self, _pass: usize) {
        if !self.next.iter().any(|&b| b) {
            self.closed = true;
        }
        for (r, n) in self.reached.iter_mut().zip(self.next.iter_mut()) {
            *r |= std::mem::take(n);
        }
    }

    fn encode(&self) -> BitString {
        let mut bits = BitString::new();
        push_bitset(&mut bits, &self.reached);
        push_bitset(&mut bits, &self.next);
        bits.push(self.closed);
        bits
    }

    fn decode(&mut self, _pass: usize, bits: &BitString) -> Result<()> {
        let n = self.reached.len();
        if bits.len() != 2 * n + 1 {
            return Err(Error::Parse(format!("expected {} state bits, got {}", 2 * n + 1, bits.len())));
        }
        for i in 0..n {
            self.reached[i] = bits.get(i);
            self.next[i] = bits.get(n + i);
        }
        self.closed = bits.get(2 * n);
        Ok(())
    }

    fn output(&self) -> Answer {
        if self.reached.get(self.t as usize).copied().unwrap_or(false) {
            Answer::Yes
        } else if self.closed {
            Answer::No
        } else {
            Answer::Unknown
        }
    }

    fn box_clone(&self) -> Box<dyn StreamingAlgorithm> {
        Box::new(self.clone())
    }
}

/// One-pass `s`-`t` connectivity on undirected streams. The state is the
/// list of forest edges; the union-find structure is rebuilt from it.
#[derive(Debug, Clone)]
pub struct SpanningForest {
    pub s: Vertex,
    pub t: Vertex,
    n: usize,
    parent: Vec<Vertex>,
    forest: Vec<Edge>,
}

impl SpanningForest {
    pub fn new(s: Vertex, t: Vertex) -> Self {
        SpanningForest {
            s,
            t,
            n: 0,
            parent: Vec::new(),
            forest: Vec::new(),
        }
    }

    fn find(&mut self, mut x: Vertex) -> Vertex {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, (u, v): Edge) -> bool {
        let (a, b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        self.parent[a.max(b) as usize] = a.min(b);
        true
    }

    pub fn forest(&self) -> &[Edge] {
        &self.forest
    }
}

impl StreamingAlgorithm for SpanningForest {
    fn tag(&self) -> String {
        "spanning-forest".into()
    }

    fn passes(&self) -> usize {
        1
    }

    fn init(&mut self, info: StreamInfo) -> Result<()> {
        if info.directed {
            return Err(Error::Rejected("spanning-forest connectivity needs an undirected stream".into()));
        }
        check_terminals(info, &[self.s, self.t])?;
        self.n = info.n;
        self.parent = (0..info.n as Vertex).collect();
        self.forest.clear();
        Ok(())
    }

    fn process(&mut self, edge: Edge) {
        if self.union(edge) {
            self.forest.push(edge);
        }
    }

    fn encode(&self) -> BitString {
        let mut bits = BitString::new();
        push_edges(&mut bits, &self.forest, vertex_width(self.n));
        bits
    }

    fn decode(&mut self, _pass: usize, bits: &BitString) -> Result<()> {
        let forest = read_edges(bits, vertex_width(self.n))?;
        self.parent = (0..self.n as Vertex).collect();
        self.forest.clear();
        for e in forest {
            if !self.union(e) {
                return Err(Error::Parse(format!("edge {e:?} closes a cycle in the stored forest")));
            }
            self.forest.push(e);
        }
        Ok(())
    }

    fn output(&self) -> Answer {
        if self.parent.is_empty() {
            return Answer::No;
        }
        let mut uf = self.clone();
        (uf.find(self.s) == uf.find(self.t)).into()
    }

    fn box_clone(&self) -> Box<dyn StreamingAlgorithm> {
        Box::new(self.clone())
    }
}

/// A randomized two-pass sketch. Pass one keeps each edge independently
/// with probability `rate` (decided by a keyed hash, so the coin for an edge
/// is fixed by the seed) and ends by computing what `s` reaches in the
/// sample. Pass two extends that set by one hop over the full stream.
/// `Yes` answers are always correct; anything else is `Unknown`.
#[derive(Debug, Clone)]
pub struct SampledSketch {
    pub s: Vertex,
    pub t: Vertex,
    pub seed: u64,
    pub rate: f64,
    info: Option<StreamInfo>,
    sample: Vec<Edge>,
    reached: Vec<bool>,
    next: Vec<bool>,
    expanding: bool,
}

impl SampledSketch {
    pub fn new(s: Vertex, t: Vertex, seed: u64, rate: f64) -> Self {
        SampledSketch {
            s,
            t,
            seed,
            rate,
            info: None,
            sample: Vec::new(),
            reached: Vec::new(),
            next: Vec::new(),
            expanding: false,
        }
    }

    fn keep(&self, (u, v): Edge) -> bool {
        let h = splitmix64(self.seed ^ ((u as u64) << 32 | v as u64));
        (h >> 11) as f64 / (1u64 << 53) as f64 <= self.rate
    }

    fn reach(&mut self, u: Vertex, v: Vertex) {
        if self.reached[u as usize] && !self.reached[v as usize] {
            self.next[v as usize] = true;
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl StreamingAlgorithm for SampledSketch {
    fn tag(&self) -> String {
        "sampled-sketch".into()
    }

    fn passes(&self) -> usize {
        2
    }

    fn init(&mut self, info: StreamInfo) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return param(format!("sampling rate {} outside [0, 1]", self.rate));
        }
        check_terminals(info, &[self.s, self.t])?;
        self.info = Some(info);
        self.sample.clear();
        self.reached = vec![false; info.n];
        self.next = vec![false; info.n];
        self.expanding = false;
        Ok(())
    }

    fn process(&mut self, (u, v): Edge) {
        if !self.expanding {
            if self.keep((u, v)) {
                self.sample.push((u, v));
            }
            return;
        }
        self.reach(u, v);
        if !self.info.is_none_or(|i| i.directed) {
            self.reach(v, u);
        }
    }

    fn end_pass(&mut self, pass: usize) {
        let Some(info) = self.info else { return };
        if pass == 0 {
            let g = Graph {
                n: info.n,
                directed: info.directed,
                edges: std::mem::take(&mut self.sample),
            };
            self.reached = g.reachable_from(self.s);
            self.expanding = true;
        } else {
            for (r, n) in self.reached.iter_mut().zip(self.next.iter_mut()) {
                *r |= std::mem::take(n);
            }
        }
    }

    fn encode(&self) -> BitString {
        let mut bits = BitString::new();
        if self.expanding {
            push_bitset(&mut bits, &self.reached);
            push_bitset(&mut bits, &self.next);
        } else {
            push_edges(&mut bits, &self.sample, vertex_width(self.info.map_or(0, |i| i.n)));
        }
        bits
    }

    fn decode(&mut self, pass: usize, bits: &BitString) -> Result<()> {
        let info = self.info.ok_or_else(|| Error::Invariant("decode before init".into()))?;
        if pass == 0 {
            self.expanding = false;
            self.sample = read_edges(bits, vertex_width(info.n))?;
            return Ok(());
        }
        let n = info.n;
        if bits.len() != 2 * n {
            return Err(Error::Parse(format!("expected {} state bits, got {}", 2 * n, bits.len())));
        }
        self.expanding = true;
        self.sample.clear();
        for i in 0..n {
            self.reached[i] = bits.get(i);
            self.next[i] = bits.get(n + i);
        }
        Ok(())
    }

    fn output(&self) -> Answer {
        if self.expanding && (self.reached[self.t as usize] || self.next[self.t as usize]) {
            Answer::Yes
        } else {
            Answer::Unknown
        }
    }

    fn box_clone(&self) -> Box<dyn StreamingAlgorithm> {
        Box::new(self.clone())
    }
}

/// Algorithm tags accepted by [`algorithm_for`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmTag {
    EdgeCount,
    StoreAll,
    BfsFrontier,
    SpanningForest,
    SampledSketch,
}

impl AlgorithmTag {
    pub const ALL: [AlgorithmTag; 5] = [
        AlgorithmTag::EdgeCount,
        AlgorithmTag::StoreAll,
        AlgorithmTag::BfsFrontier,
        AlgorithmTag::SpanningForest,
        AlgorithmTag::SampledSketch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmTag::EdgeCount => "edge-count",
            AlgorithmTag::StoreAll => "store-all",
            AlgorithmTag::BfsFrontier => "bfs-frontier",
            AlgorithmTag::SpanningForest => "spanning-forest",
            AlgorithmTag::SampledSketch => "sampled-sketch",
        }
    }
}

impl FromStr for AlgorithmTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| Error::Unknown {
            kind: "algorithm",
            name: s.into(),
        })
    }
}

/// Builds an algorithm for `s → t` on a stream. `passes` only matters for
/// `bfs-frontier`; `seed` only for `sampled-sketch`, which samples at rate ½.
pub fn algorithm_for(tag: AlgorithmTag, s: Vertex, t: Vertex, passes: usize, seed: u64) -> Box<dyn StreamingAlgorithm> {
    match tag {
        AlgorithmTag::EdgeCount => Box::new(EdgeCounter::default()),
        AlgorithmTag::StoreAll => Box::new(StoreAll::new(s, t)),
        AlgorithmTag::BfsFrontier => Box::new(BfsFrontier::new(s, t, passes)),
        AlgorithmTag::SpanningForest => Box::new(SpanningForest::new(s, t)),
        AlgorithmTag::SampledSketch => Box::new(SampledSketch::new(s, t, seed, 0.5)),
    }
}

/// The `s` and `t` of a stream: the layers named `s` and `t` if present,
/// else vertices `0` and `n − 1`.
pub fn terminals(stream: &EdgeStream) -> (Vertex, Vertex) {
    let s = stream.layer_vertex("s").unwrap_or(0);
    let t = stream.layer_vertex("t").unwrap_or(stream.n.saturating_sub(1) as Vertex);
    (s, t)
}

pub fn spanning_forest_connectivity(stream: &EdgeStream, s: Vertex, t: Vertex) -> Result<bool> {
    let run = run_stream(&mut SpanningForest::new(s, t), stream, 1)?;
    Ok(run.output == Answer::Yes)
}

pub fn bfs_reachability(stream: &EdgeStream, s: Vertex, t: Vertex, p: usize) -> Result<Answer> {
    Ok(run_stream(&mut BfsFrontier::new(s, t, p), stream, p)?.output)
}

pub fn store_all_reachability(stream: &EdgeStream, s: Vertex, t: Vertex) -> Result<bool> {
    Ok(run_stream(&mut StoreAll::new(s, t), stream, 1)?.output == Answer::Yes)
}
