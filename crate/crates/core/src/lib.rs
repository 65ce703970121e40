pub mod behrend;
pub mod bits;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod infometrics;
pub mod instances;
pub mod protocols;
pub mod reductions;
pub mod report;
pub mod rng;
pub mod rsgraph;
pub mod streaming;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/ap_free_sets.md")]
    struct ApFreeSets;
    #[doc = include_str!("../../../book/src/rs_digraphs.md")]
    struct RsDigraphs;
    #[doc = include_str!("../../../book/src/instances.md")]
    struct Instances;
    #[doc = include_str!("../../../book/src/streaming.md")]
    struct Streaming;
    #[doc = include_str!("../../../book/src/protocols.md")]
    struct Protocols;
    #[doc = include_str!("../../../book/src/reductions.md")]
    struct Reductions;
    #[doc = include_str!("../../../book/src/information.md")]
    struct Information;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
