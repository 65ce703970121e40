//! Two-party execution harness: next-message functions, public coins, and
//! a transcript that records both.

use crate::bits::BitString;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Party,
    pub label: String,
    pub bits: BitString,
}

/// A labelled public random draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinDraw {
    pub label: String,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub public_randomness: Vec<CoinDraw>,
}

impl Transcript {
    pub fn push(&mut self, sender: Party, label: impl Into<String>, bits: BitString) {
        self.messages.push(Message {
            sender,
            label: label.into(),
            bits,
        });
    }

    pub fn total_bits(&self) -> usize {
        self.messages.iter().map(|m| m.bits.len()).sum()
    }

    pub fn message(&self, label: &str) -> Option<&Message> {
        self.messages.iter().find(|m| m.label == label)
    }
}

/// Public randomness shared by both players. Every draw is recorded.
pub struct PublicCoins {
    rng: ChaCha8Rng,
    log: Vec<CoinDraw>,
}

impl PublicCoins {
    pub fn new(rng: ChaCha8Rng) -> Self {
        PublicCoins { rng, log: Vec::new() }
    }

    pub fn draw(&mut self, label: &str) -> u64 {
        let v = self.rng.next_u64();
        self.log.push(CoinDraw {
            label: label.into(),
            values: vec![v],
        });
        v
    }

    /// A uniform permutation of `1..=m` as `sigma[x - 1] = σ(x)`.
    pub fn permutation(&mut self, label: &str, m: u32) -> Vec<u32> {
        let mut sigma: Vec<u32> = (1..=m).collect();
        sigma.shuffle(&mut self.rng);
        self.log.push(CoinDraw {
            label: label.into(),
            values: sigma.iter().map(|&x| x as u64).collect(),
        });
        sigma
    }

    pub fn into_log(self) -> Vec<CoinDraw> {
        self.log
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundStructure {
    /// Alice sends at most one message.
    OneWay,
    /// Alice and Bob alternate, Alice first, any number of rounds.
    TwoWay,
    /// Exactly Alice, Bob, Alice.
    StPattern,
}

impl RoundStructure {
    fn max_messages(self) -> Option<usize> {
        match self {
            RoundStructure::OneWay => Some(1),
            RoundStructure::TwoWay => None,
            RoundStructure::StPattern => Some(3),
        }
    }
}

/// A two-party protocol given by next-message functions. Players speak
/// alternately starting with Alice; a player returning `None` ends the
/// conversation, after which Bob announces the output.
pub trait Protocol {
    type AliceInput;
    type BobInput;
    type Output;

    fn structure(&self) -> RoundStructure;
    fn alice_next(&self, input: &Self::AliceInput, received: &[Message], coins: &mut PublicCoins) -> Option<BitString>;
    fn bob_next(&self, input: &Self::BobInput, received: &[Message], coins: &mut PublicCoins) -> Option<BitString>;
    fn bob_output(&self, input: &Self::BobInput, transcript: &[Message]) -> Self::Output;
}

/// Executes `proto`. `budget` caps the total number of message bits.
pub fn run_protocol<P: Protocol>(
    proto: &P,
    alice: &P::AliceInput,
    bob: &P::BobInput,
    rng: ChaCha8Rng,
    budget: Option<usize>,
) -> Result<(Transcript, P::Output)> {
    let mut coins = PublicCoins::new(rng);
    let mut transcript = Transcript::default();
    let limit = proto.structure().max_messages();
    let mut turn = Party::Alice;
    while limit.is_none_or(|l| transcript.messages.len() < l) {
        let next = match turn {
            Party::Alice => proto.alice_next(alice, &transcript.messages, &mut coins),
            Party::Bob => proto.bob_next(bob, &transcript.messages, &mut coins),
        };
        let Some(bits) = next else { break };
        let label = format!("{}{}", turn, transcript.messages.len() + 1);
        transcript.push(turn, label, bits);
        if let Some(b) = budget {
            if transcript.total_bits() > b {
                return Err(Error::Budget {
                    used: transcript.total_bits(),
                    budget: b,
                });
            }
        }
        turn = turn.other();
    }
    if proto.structure() == RoundStructure::StPattern && transcript.messages.len() != 3 {
        return Err(Error::Invariant(format!(
            "st-pattern protocol stopped after {} messages",
            transcript.messages.len()
        )));
    }
    let output = proto.bob_output(bob, &transcript.messages);
    transcript.public_randomness = coins.into_log();
    Ok((transcript, output))
}

/// Alice sends her input verbatim; Bob outputs it.
pub struct Echo;

impl Protocol for Echo {
    type AliceInput = BitString;
    type BobInput = ();
    type Output = BitString;

    fn structure(&self) -> RoundStructure {
        RoundStructure::OneWay
    }

    fn alice_next(&self, input: &BitString, _: &[Message], _: &mut PublicCoins) -> Option<BitString> {
        Some(input.clone())
    }

    fn bob_next(&self, _: &(), _: &[Message], _: &mut PublicCoins) -> Option<BitString> {
        None
    }

    fn bob_output(&self, _: &(), transcript: &[Message]) -> BitString {
        transcript.first().map(|m| m.bits.clone()).unwrap_or_default()
    }
}

/// Nobody speaks; Bob outputs the default.
pub struct Silent;

impl Protocol for Silent {
    type AliceInput = ();
    type BobInput = ();
    type Output = bool;

    fn structure(&self) -> RoundStructure {
        RoundStructure::OneWay
    }

    fn alice_next(&self, _: &(), _: &[Message], _: &mut PublicCoins) -> Option<BitString> {
        None
    }

    fn bob_next(&self, _: &(), _: &[Message], _: &mut PublicCoins) -> Option<BitString> {
        None
    }

    fn bob_output(&self, _: &(), _: &[Message]) -> bool {
        false
    }
}
