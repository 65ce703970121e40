//! Segmented edge streams and their plain-text file format:
//!
//! ```text
//! STREAM <n> directed=<0|1>
//! LAYER <name> <first vertex> <count>
//! SEG <tag>
//! <u> <v>
//! ```
//!
//! Segments appear in stream order. Witnesses never go into this file.

use super::st::StInstance;
use super::ur::UrInstance;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::rng::Substream;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentTag {
    E1,
    E2,
    E3,
    EA,
    EB,
    /// a single undifferentiated segment (reduction outputs, hand-made graphs)
    E,
}

impl fmt::Display for SegmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SegmentTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "E1" => SegmentTag::E1,
            "E2" => SegmentTag::E2,
            "E3" => SegmentTag::E3,
            "EA" => SegmentTag::EA,
            "EB" => SegmentTag::EB,
            "E" => SegmentTag::E,
            other => {
                return Err(Error::Unknown {
                    kind: "segment tag",
                    name: other.into(),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub tag: SegmentTag,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub name: String,
    pub first: Vertex,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStream {
    pub n: usize,
    pub directed: bool,
    pub layers: Vec<Layer>,
    pub segments: Vec<Segment>,
}

impl EdgeStream {
    /// One segment, every vertex in a single layer `V`.
    pub fn single(g: &Graph) -> Self {
        EdgeStream {
            n: g.n,
            directed: g.directed,
            layers: vec![Layer {
                name: "V".into(),
                first: 0,
                count: g.n as u32,
            }],
            segments: vec![Segment {
                tag: SegmentTag::E,
                edges: g.edges.clone(),
            }],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.segments.iter().map(|s| s.edges.len()).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.segments.iter().flat_map(|s| s.edges.iter().copied())
    }

    pub fn to_graph(&self) -> Graph {
        Graph {
            n: self.n,
            directed: self.directed,
            edges: self.edges().collect(),
        }
    }

    pub fn layer_of(&self, v: Vertex) -> Option<&str> {
        self.layers
            .iter()
            .find(|l| v >= l.first && v < l.first + l.count)
            .map(|l| l.name.as_str())
    }

    /// First vertex of the named layer; used to find `s` and `t`.
    pub fn layer_vertex(&self, name: &str) -> Option<Vertex> {
        self.layers.iter().find(|l| l.name == name && l.count > 0).map(|l| l.first)
    }

    /// Every endpoint has a layer and lies below `n`.
    pub fn check(&self) -> Result<()> {
        for (u, v) in self.edges() {
            for x in [u, v] {
                if x as usize >= self.n || self.layer_of(x).is_none() {
                    return Err(Error::Invariant(format!("vertex {x} has no layer or exceeds n = {}", self.n)));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("STREAM {} directed={}\n", self.n, u8::from(self.directed));
        for l in &self.layers {
            let _ = writeln!(out, "LAYER {} {} {}", l.name, l.first, l.count);
        }
        for s in &self.segments {
            let _ = writeln!(out, "SEG {}", s.tag);
            for (u, v) in &s.edges {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse(format!("stream file: {msg}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (n, directed) = match parts.as_slice() {
            ["STREAM", n, d] => {
                let n = n.parse::<usize>().map_err(|e| bad(format!("vertex count: {e}")))?;
                let directed = match *d {
                    "directed=1" => true,
                    "directed=0" => false,
                    other => return Err(bad(format!("bad directedness `{other}`"))),
                };
                (n, directed)
            }
            _ => return Err(bad(format!("bad header `{header}`"))),
        };
        let mut layers = Vec::new();
        let mut segments: Vec<Segment> = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<u32>().map_err(|e| bad(format!("`{line}`: {e}")));
            match parts.as_slice() {
                ["LAYER", name, first, count] if segments.is_empty() => layers.push(Layer {
                    name: name.to_string(),
                    first: num(first)?,
                    count: num(count)?,
                }),
                ["SEG", tag] => segments.push(Segment {
                    tag: tag.parse()?,
                    edges: Vec::new(),
                }),
                [u, v] => match segments.last_mut() {
                    Some(seg) => seg.edges.push((num(u)?, num(v)?)),
                    None => return Err(bad(format!("edge `{line}` before any SEG line"))),
                },
                _ => return Err(bad(format!("unrecognised line `{line}`"))),
            }
        }
        let stream = EdgeStream {
            n,
            directed,
            layers,
            segments,
        };
        stream.check().map_err(|e| bad(e.to_string()))?;
        Ok(stream)
    }
}

/// Anything that can be laid out as an ordered, segmented stream.
pub trait Streamable {
    fn vertex_count(&self) -> usize;
    fn layers(&self) -> Vec<Layer>;
    fn segments(&self) -> Vec<Segment>;
}

impl Streamable for StInstance {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn layers(&self) -> Vec<Layer> {
        super::st::StLayout::LAYERS
            .iter()
            .zip(self.layout.layer_ranges())
            .map(|(name, (first, count))| Layer {
                name: name.to_string(),
                first,
                count,
            })
            .collect()
    }

    fn segments(&self) -> Vec<Segment> {
        vec![
            Segment {
                tag: SegmentTag::E1,
                edges: self.e1.clone(),
            },
            Segment {
                tag: SegmentTag::E2,
                edges: self.e2.clone(),
            },
            Segment {
                tag: SegmentTag::E3,
                edges: self.e3.clone(),
            },
        ]
    }
}

impl Streamable for UrInstance {
    fn vertex_count(&self) -> usize {
        (self.layout.layer3 + self.layout.r) as usize
    }

    fn layers(&self) -> Vec<Layer> {
        let l = &self.layout;
        let names = self.layer_names();
        vec![
            Layer {
                name: names[0].into(),
                first: l.terminal,
                count: 1,
            },
            Layer {
                name: names[1].into(),
                first: l.layer1,
                count: l.n_side,
            },
            Layer {
                name: names[2].into(),
                first: l.layer2,
                count: l.n_side,
            },
            Layer {
                name: names[3].into(),
                first: l.layer3,
                count: l.r,
            },
        ]
    }

    fn segments(&self) -> Vec<Segment> {
        vec![
            Segment {
                tag: SegmentTag::EA,
                edges: self.e_a.clone(),
            },
            Segment {
                tag: SegmentTag::EB,
                edges: self.e_b.clone(),
            },
        ]
    }
}

/// Lays out `inst` as a stream. Segment order is fixed; edges inside each
/// segment are shuffled with the `order/segment/<k>` substream of `seed`.
pub fn to_stream<S: Streamable + ?Sized>(inst: &S, seed: u64) -> EdgeStream {
    let order = Substream::root(seed).child("order");
    let segments = inst
        .segments()
        .into_iter()
        .enumerate()
        .map(|(k, mut seg)| {
            seg.edges.shuffle(&mut order.indexed("segment", k).rng());
            seg
        })
        .collect();
    EdgeStream {
        n: inst.vertex_count(),
        directed: true,
        layers: inst.layers(),
        segments,
    }
}
