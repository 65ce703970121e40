//! Turning a two-pass streaming algorithm into a three-message protocol.
//!
//! Alice holds the `E1` segment, Bob holds `E2` and `E3`. The stream is
//! `E1 E2 E3` twice; whoever holds the next segment needs the memory
//! content, so it crosses over three times:
//!
//! * `A1`: state after `E1` in pass one,
//! * `B1`: state after `E2` in pass one,
//! * `A2`: state after `E1` in pass two.
//!
//! A one-pass algorithm sends its state after `E3` as `A2` instead, and Bob
//! finishes the pass.

use super::framework::{Party, Transcript};
use crate::error::{Error, Result};
use crate::instances::{EdgeStream, SegmentTag};
use crate::streaming::{Answer, StreamInfo, StreamingAlgorithm};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub transcript: Transcript,
    pub output: Answer,
}

fn feed(alg: &mut dyn StreamingAlgorithm, edges: &[(u32, u32)]) {
    for &e in edges {
        alg.process(e);
    }
}

pub fn simulate_two_pass(alg: &dyn StreamingAlgorithm, stream: &EdgeStream) -> Result<Simulation> {
    let passes = alg.passes();
    if passes > 2 {
        return Err(Error::Passes { needed: passes, budget: 2 });
    }
    let tags: Vec<SegmentTag> = stream.segments.iter().map(|s| s.tag).collect();
    if tags != [SegmentTag::E1, SegmentTag::E2, SegmentTag::E3] {
        return Err(Error::Parameter(format!("expected segments E1 E2 E3, got {tags:?}")));
    }
    let [e1, e2, e3] = [0, 1, 2].map(|i| stream.segments[i].edges.as_slice());
    let info = StreamInfo {
        n: stream.n,
        directed: stream.directed,
    };
    let mut alice = alg.box_clone();
    let mut bob = alg.box_clone();
    alice.init(info)?;
    bob.init(info)?;
    let mut transcript = Transcript::default();

    alice.begin_pass(0);
    feed(alice.as_mut(), e1);
    let a1 = alice.encode();
    transcript.push(Party::Alice, "A1", a1.clone());

    bob.decode(0, &a1)?;
    feed(bob.as_mut(), e2);
    let b1 = bob.encode();
    transcript.push(Party::Bob, "B1", b1.clone());

    alice.decode(0, &b1)?;
    feed(alice.as_mut(), e3);
    let output = if passes == 2 {
        alice.end_pass(0);
        alice.begin_pass(1);
        feed(alice.as_mut(), e1);
        let a2 = alice.encode();
        transcript.push(Party::Alice, "A2", a2.clone());
        bob.decode(1, &a2)?;
        feed(bob.as_mut(), e2);
        feed(bob.as_mut(), e3);
        bob.end_pass(1);
        bob.output()
    } else {
        let a2 = alice.encode();
        transcript.push(Party::Alice, "A2", a2.clone());
        bob.decode(0, &a2)?;
        bob.end_pass(0);
        bob.output()
    };
    Ok(Simulation { transcript, output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{Layer, Segment};
    use crate::streaming::{run_stream, BfsFrontier, EdgeCounter, StoreAll};

    fn tiny() -> EdgeStream {
        let seg = |tag, edges: &[(u32, u32)]| Segment { tag, edges: edges.to_vec() };
        EdgeStream {
            n: 4,
            directed: true,
            layers: vec![Layer {
                name: "V".into(),
                first: 0,
                count: 4,
            }],
            segments: vec![
                seg(SegmentTag::E1, &[(2, 3)]),
                seg(SegmentTag::E2, &[(1, 2)]),
                seg(SegmentTag::E3, &[(0, 1)]),
            ],
        }
    }

    #[test]
    fn matches_direct_runs() {
        let s = tiny();
        let algs: Vec<Box<dyn StreamingAlgorithm>> = vec![
            Box::new(EdgeCounter::default()),
            Box::new(StoreAll::new(0, 3)),
            Box::new(BfsFrontier::new(0, 2, 2)),
            Box::new(BfsFrontier::new(0, 3, 2)),
        ];
        for alg in algs {
            let sim = simulate_two_pass(alg.as_ref(), &s).unwrap();
            let direct = run_stream(alg.box_clone().as_mut(), &s, 2).unwrap();
            assert_eq!(sim.output, direct.output, "{}", alg.tag());
            assert!(sim.transcript.total_bits() <= 3 * direct.max_state_bits);
        }
    }

    #[test]
    fn edge_counter_messages_are_counts() {
        let sim = simulate_two_pass(&EdgeCounter::default(), &tiny()).unwrap();
        let counts: Vec<u64> = sim
            .transcript
            .messages
            .iter()
            .map(|m| m.bits.reader().read_uint(m.bits.len()).unwrap())
            .collect();
        assert_eq!(counts, [1, 2, 3]);
        assert_eq!(sim.output, Answer::Count(3));
    }

    #[test]
    fn rejects_three_passes_and_wrong_segments() {
        assert!(matches!(
            simulate_two_pass(&BfsFrontier::new(0, 3, 3), &tiny()),
            Err(Error::Passes { needed: 3, budget: 2 })
        ));
        let mut s = tiny();
        s.segments.pop();
        assert!(simulate_two_pass(&EdgeCounter::default(), &s).is_err());
    }
}
