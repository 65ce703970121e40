use super::{SiInstance, StInstance, UrInstance};
use crate::rng::Substream;
use serde::{Deserialize, Serialize};

/// Hidden witnesses and sizes of a sampled instance. Written next to the
/// stream file, never inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub kind: String,
    pub source: Substream,
    /// total vertex count
    pub n: usize,
    /// vertices per side of the RS digraph
    pub n_side: Option<u32>,
    pub r: Option<usize>,
    pub t: Option<usize>,
    pub e_star: Option<u32>,
    pub i_star: Option<usize>,
    pub s_star: Option<u32>,
    pub t_star: Option<u32>,
    pub reachable: Option<bool>,
}

impl InstanceMeta {
    pub fn for_si(inst: &SiInstance, source: Substream) -> Self {
        InstanceMeta {
            kind: "si".into(),
            source,
            n: inst.m as usize,
            n_side: None,
            r: None,
            t: None,
            e_star: Some(inst.e_star),
            i_star: None,
            s_star: None,
            t_star: None,
            reachable: None,
        }
    }

    pub fn for_ur(inst: &UrInstance) -> Self {
        InstanceMeta {
            kind: "ur".into(),
            source: inst.source.clone(),
            n: inst.layout.vertex_count(),
            n_side: Some(inst.rs.n_side),
            r: Some(inst.rs.r),
            t: Some(inst.rs.t),
            e_star: Some(inst.e_star),
            i_star: Some(inst.i_star),
            s_star: Some(inst.s_star),
            t_star: None,
            reachable: None,
        }
    }

    pub fn for_st(inst: &StInstance) -> Self {
        InstanceMeta {
            kind: "st".into(),
            source: inst.source.clone(),
            n: inst.n(),
            n_side: Some(inst.layout.n_side),
            r: Some(inst.layout.r as usize),
            t: Some(inst.forward.rs.t),
            e_star: None,
            i_star: Some(inst.forward.i_star),
            s_star: Some(inst.s_star),
            t_star: Some(inst.t_star),
            reachable: Some(inst.reachable),
        }
    }
}
