//! Verifiers that work from a stream file and its metadata alone, without
//! the sampler's internal state.

use super::meta::InstanceMeta;
use super::st::{count_paths, StLayout};
use super::stream::{EdgeStream, SegmentTag};
use crate::graph::{Graph, Vertex};
use crate::report::Report;

/// Vertices of layer `last` connected to `terminal` using every segment but
/// `E1`.
fn connected_in_last_layer(stream: &EdgeStream, terminal: Vertex, last: &str, reverse: bool) -> Vec<Vertex> {
    let edges: Vec<_> = stream
        .segments
        .iter()
        .filter(|s| s.tag != SegmentTag::E1)
        .flat_map(|s| s.edges.iter().copied())
        .collect();
    let mut g = Graph::directed(stream.n, edges);
    if reverse {
        g = g.reversed();
    }
    let seen = g.reachable_from(terminal);
    (0..stream.n as Vertex)
        .filter(|&v| seen[v as usize] && stream.layer_of(v) == Some(last))
        .collect()
}

/// Checks a reachability instance file: layer names and order, segment
/// contents, that exactly one `V3` vertex is reachable from `s` and it is
/// `s*`, that exactly one `U3` vertex reaches `t` and it is `t*`, that
/// reachability, `(s*, t*) ∈ E1` and the stored flag agree, and that a
/// reachable instance has exactly one path, of length 7.
pub fn verify_st_stream(stream: &EdgeStream, meta: &InstanceMeta) -> Report {
    let subject = "st-reachability stream";
    let mut checks = 1;
    let fail = |checks, why: String| Report::fail(subject, checks, why);
    if let Err(e) = stream.check() {
        return fail(checks, e.to_string());
    }
    let names: Vec<&str> = stream.layers.iter().map(|l| l.name.as_str()).collect();
    if names != StLayout::LAYERS {
        return fail(checks, format!("layers {names:?}, expected {:?}", StLayout::LAYERS));
    }
    let index = |v: Vertex| StLayout::LAYERS.iter().position(|&n| Some(n) == stream.layer_of(v)).unwrap();
    for seg in &stream.segments {
        // E2 holds both middle layers, E3 the edges at either end
        let allowed: &[usize] = match seg.tag {
            SegmentTag::E1 => &[3],
            SegmentTag::E2 => &[1, 5],
            SegmentTag::E3 => &[0, 2, 4, 6],
            other => return fail(checks, format!("unexpected segment {other}")),
        };
        for &(u, v) in &seg.edges {
            checks += 1;
            if index(v) != index(u) + 1 || !allowed.contains(&index(u)) {
                return fail(checks, format!("edge ({u}, {v}) in {} breaks the layering", seg.tag));
            }
        }
    }
    let (Some(s_star), Some(t_star), Some(flag)) = (meta.s_star, meta.t_star, meta.reachable) else {
        return fail(checks, "metadata lacks s*, t* or the reachable flag".into());
    };
    let (s, t) = (stream.layer_vertex("s").unwrap(), stream.layer_vertex("t").unwrap());
    checks += 2;
    let forward = connected_in_last_layer(stream, s, "V3", false);
    if forward != [s_star] {
        return fail(checks, format!("V3 vertices reachable from s: {forward:?}, expected exactly [{s_star}]"));
    }
    let backward = connected_in_last_layer(stream, t, "U3", true);
    if backward != [t_star] {
        return fail(checks, format!("U3 vertices reaching t: {backward:?}, expected exactly [{t_star}]"));
    }
    let g = stream.to_graph();
    let bfs = g.reaches(s, t);
    let member = stream.segments.iter().any(|seg| seg.tag == SegmentTag::E1 && seg.edges.contains(&(s_star, t_star)));
    checks += 1;
    if bfs != member || bfs != flag {
        return fail(
            checks,
            format!("dichotomy violated: reachable {bfs}, (s*, t*) ∈ E1 {member}, stored flag {flag}"),
        );
    }
    if bfs {
        checks += 1;
        let d = g.distance(s, t);
        let paths = count_paths(&g, s, t);
        if d != Some(7) || paths != Some(1) {
            return fail(checks, format!("distance {d:?} and {paths:?} paths, expected 7 and exactly one"));
        }
    }
    Report::pass(subject, checks)
}

/// Checks a unique-reach file: four layers, and exactly one layer-3 vertex
/// connected to the terminal, equal to the stored witness.
pub fn verify_ur_stream(stream: &EdgeStream, meta: &InstanceMeta) -> Report {
    let subject = "unique-reach stream";
    if let Err(e) = stream.check() {
        return Report::fail(subject, 1, e.to_string());
    }
    let names: Vec<&str> = stream.layers.iter().map(|l| l.name.as_str()).collect();
    let inverse = match names.as_slice() {
        ["s", "V1", "V2", "V3"] => false,
        ["t", "U1", "U2", "U3"] => true,
        _ => return Report::fail(subject, 1, format!("unexpected layers {names:?}")),
    };
    let Some(witness) = meta.s_star else {
        return Report::fail(subject, 1, "metadata lacks the witness vertex");
    };
    let terminal = stream.layers[0].first;
    let mut connected = Vec::new();
    for tag in [SegmentTag::EA, SegmentTag::EB] {
        if !stream.segments.iter().any(|s| s.tag == tag) {
            return Report::fail(subject, 1, format!("missing segment {tag}"));
        }
    }
    let mut g = stream.to_graph();
    if inverse {
        g = g.reversed();
    }
    let seen = g.reachable_from(terminal);
    for v in 0..stream.n as Vertex {
        if seen[v as usize] && stream.layer_of(v) == Some(names[3]) {
            connected.push(v);
        }
    }
    if connected != [witness] {
        return Report::fail(subject, 2, format!("layer-3 vertices connected to the terminal: {connected:?}, expected [{witness}]"));
    }
    Report::pass(subject, 2)
}
