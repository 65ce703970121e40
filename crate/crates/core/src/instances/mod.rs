//! Samplers and verifiers for the three hard input distributions, and the
//! edge-stream form in which streaming algorithms consume them.

pub mod check;
pub mod meta;
pub mod si;
pub mod st;
pub mod stream;
pub mod ur;

pub use check::{verify_st_stream, verify_ur_stream};
pub use meta::InstanceMeta;
pub use si::{apply_permutation, enumerate_si, sample_si, SiInstance};
pub use st::{sample_st, sample_st_from, sample_st_with, StStreams, verify_st_instance, E1Mode, StInstance, StLayout};
pub use stream::{to_stream, EdgeStream, Layer, Segment, SegmentTag, Streamable};
pub use ur::{sample_ur, verify_ur_promise, Direction, UrInstance, UrLayout};
