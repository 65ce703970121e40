//! Finding the common element of two sets: the smaller side sends its set
//! and the receiver intersects. Always correct when `|A ∩ B| = 1`.
//!
//! Messages, with `w = ⌈log₂(m + 1)⌉`:
//! 1. Alice sends `|A|` in `w` bits.
//! 2. If `|B| < |A|`, Bob sends a `1` followed by `B`; Alice replies with a
//!    found bit and, if found, the element. Otherwise Bob sends `0` and Alice
//!    sends `A`.
//!
//! The cost is at most `min(|A|, |B|)·w + 2w + 2` bits.

use super::framework::{run_protocol, Message, Protocol, PublicCoins, RoundStructure, Transcript};
use crate::bits::{width_for, BitString};
use crate::error::Result;
use rand_chacha::ChaCha8Rng;

pub struct Intersection {
    pub m: u32,
}

impl Intersection {
    fn width(&self) -> usize {
        width_for(self.m as u64)
    }

    fn write_set(&self, bits: &mut BitString, set: &[u32]) {
        for &x in set {
            bits.push_uint(x as u64, self.width());
        }
    }

    fn read_set(&self, bits: &BitString, skip: usize) -> Vec<u32> {
        let mut r = bits.reader();
        for _ in 0..skip {
            r.read_bit();
        }
        let mut out = Vec::new();
        while let Some(x) = r.read_uint(self.width()) {
            out.push(x as u32);
        }
        out
    }
}

fn first_common(a: &[u32], b: &[u32]) -> Option<u32> {
    let mut common: Vec<u32> = a.iter().copied().filter(|x| b.contains(x)).collect();
    common.sort_unstable();
    common.first().copied()
}

impl Protocol for Intersection {
    type AliceInput = Vec<u32>;
    type BobInput = Vec<u32>;
    type Output = Option<u32>;

    fn structure(&self) -> RoundStructure {
        RoundStructure::TwoWay
    }

    fn alice_next(&self, a: &Vec<u32>, received: &[Message], _: &mut PublicCoins) -> Option<BitString> {
        match received.len() {
            0 => Some(BitString::from_uint(a.len() as u64, self.width())),
            2 => {
                let reply = &received[1].bits;
                let mut bits = BitString::new();
                if reply.get(0) {
                    let b = self.read_set(reply, 1);
                    match first_common(a, &b) {
                        Some(e) => {
                            bits.push(true);
                            bits.push_uint(e as u64, self.width());
                        }
                        None => bits.push(false),
                    }
                } else {
                    self.write_set(&mut bits, a);
                }
                Some(bits)
            }
            _ => None,
        }
    }

    fn bob_next(&self, b: &Vec<u32>, received: &[Message], _: &mut PublicCoins) -> Option<BitString> {
        if received.len() != 1 {
            return None;
        }
        let a_len = received[0].bits.reader().read_uint(self.width()).unwrap_or(0) as usize;
        let mut bits = BitString::new();
        if b.len() < a_len {
            bits.push(true);
            self.write_set(&mut bits, b);
        } else {
            bits.push(false);
        }
        Some(bits)
    }

    fn bob_output(&self, b: &Vec<u32>, transcript: &[Message]) -> Option<u32> {
        let (reply, last) = (transcript.get(1)?, transcript.get(2)?);
        if reply.bits.get(0) {
            let mut r = last.bits.reader();
            r.read_bit()?.then(|| r.read_uint(self.width()).map(|x| x as u32)).flatten()
        } else {
            first_common(&self.read_set(&last.bits, 0), b)
        }
    }
}

/// Runs [`Intersection`] on `a`, `b ⊆ [m]`. `None` means no common element.
pub fn intersection_protocol(m: u32, a: &[u32], b: &[u32], rng: ChaCha8Rng) -> Result<(Transcript, Option<u32>)> {
    run_protocol(&Intersection { m }, &a.to_vec(), &b.to_vec(), rng, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Substream;

    fn run(m: u32, a: &[u32], b: &[u32]) -> (usize, Option<u32>) {
        let (t, out) = intersection_protocol(m, a, b, Substream::root(0).rng()).unwrap();
        (t.total_bits(), out)
    }

    #[test]
    fn examples() {
        assert_eq!(run(8, &[3], &[3, 7]).1, Some(3));
        assert_eq!(run(8, &[3, 7], &[3]).1, Some(3));
        assert_eq!(run(8, &[1, 2], &[5, 6]).1, None);
        assert_eq!(run(8, &[1, 2, 4], &[5]).1, None);
        assert_eq!(run(8, &[], &[5]).1, None);
    }

    #[test]
    fn cost_tracks_smaller_side() {
        let w = width_for(64);
        let big: Vec<u32> = (1..=40).collect();
        let (bits, out) = run(64, &big, &[40, 50]);
        assert_eq!(out, Some(40));
        assert!(bits <= 2 * w + 2 * w + 2, "{bits}");
        let (bits, _) = run(64, &[40, 50], &big);
        assert!(bits <= 2 * w + 2 * w + 2, "{bits}");
    }
}
