//! Amplifying a protocol that only slightly shifts Alice's view of `e*`
//! into one that finds `e*`.
//!
//! Each of `k` rounds relabels the universe with a public permutation, runs
//! the oracle on the relabelled instance, and has Alice keep the half of her
//! set with the largest posterior probability of being `e*`. Elements kept
//! in more than `τ` rounds become candidates; if there are at most
//! `t` of them, the intersection protocol finds the one Bob also holds.

use super::framework::PublicCoins;
use super::intersection::intersection_protocol;
use super::oracle::SiOracle;
use crate::error::{Error, Result};
use crate::infometrics::top_indices;
use crate::instances::{apply_permutation, sample_si, SiInstance};
use crate::rng::Substream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub eps: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl BoostParams {
    pub const DEFAULT_GAMMA1: f64 = 0.5;
    pub const DEFAULT_GAMMA2: f64 = 2.0;

    pub fn new(eps: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!("eps = {eps} must lie in (0, 1)")));
        }
        if !(gamma1 > 0.0 && gamma1 <= 1.0) {
            return Err(Error::Parameter(format!("gamma1 = {gamma1} must lie in (0, 1]")));
        }
        if !(gamma2 >= 1.0 && gamma2.is_finite()) {
            return Err(Error::Parameter(format!("gamma2 = {gamma2} must be at least 1")));
        }
        Ok(BoostParams { eps, gamma1, gamma2 })
    }

    /// Number of rounds, `⌈(32/ε²)·ln(100γ₂/γ₁)⌉`.
    pub fn k(&self) -> usize {
        ((32.0 / (self.eps * self.eps)) * (100.0 * self.gamma2 / self.gamma1).ln()).ceil() as usize
    }

    /// Candidate budget `(γ₁/γ₂)·(m/2)`.
    pub fn t(&self, m: u32) -> f64 {
        self.gamma1 / self.gamma2 * (m as f64 / 2.0)
    }

    /// Vote threshold `(½ + ε/4)·k`.
    pub fn tau(&self) -> f64 {
        (0.5 + self.eps / 4.0) * self.k() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostOutcome {
    pub answer: Option<u32>,
    pub success: bool,
    /// more than `t` candidates, so the intersection step was skipped
    pub too_many_candidates: bool,
    pub candidates: Vec<u32>,
    /// how often `e*` made the kept half
    pub e_star_votes: usize,
    pub k: usize,
    pub t: f64,
    pub tau: f64,
    pub oracle_bits: usize,
    pub intersection_bits: usize,
}

impl BoostOutcome {
    pub fn total_bits(&self) -> usize {
        self.oracle_bits + self.intersection_bits
    }
}

/// One round: the kept half of `A` in the original labels, and the oracle
/// transcript length.
fn round(oracle: &dyn SiOracle, inst: &SiInstance, source: &Substream) -> Result<(Vec<u32>, usize)> {
    let m = inst.m;
    let mut coins = PublicCoins::new(source.child("sigma").rng());
    let sigma = coins.permutation("sigma", m);
    let relabelled = apply_permutation(inst, &sigma)?;
    let msg = oracle.sample(&relabelled, &mut source.child("oracle").rng());
    // relabelled.a is sorted, so index order is element order and ties go
    // to the smallest element
    let posterior: Vec<f64> = relabelled.a.iter().map(|&e| oracle.alice_likelihood(m, &relabelled.a, e, &msg)).collect();
    if posterior.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Invariant(format!("{} gives its own transcript zero likelihood", oracle.tag())));
    }
    let mut inverse = vec![0u32; m as usize];
    for (x, &y) in sigma.iter().enumerate() {
        inverse[y as usize - 1] = x as u32 + 1;
    }
    let kept = top_indices(&posterior, relabelled.a.len() / 2)
        .into_iter()
        .map(|j| inverse[relabelled.a[j] as usize - 1])
        .collect();
    Ok((kept, msg.len()))
}

pub fn boost_si(oracle: &dyn SiOracle, inst: &SiInstance, params: &BoostParams, source: &Substream) -> Result<BoostOutcome> {
    let m = inst.m;
    if !m.is_multiple_of(4) || m < 8 {
        return Err(Error::Parameter(format!("m = {m} must be a multiple of 4 and at least 8")));
    }
    let (k, t, tau) = (params.k(), params.t(m), params.tau());
    let rounds: Vec<(Vec<u32>, usize)> = (0..k)
        .into_par_iter()
        .map(|i| round(oracle, inst, &source.indexed("round", i)))
        .collect::<Result<_>>()?;
    let mut votes = vec![0usize; m as usize + 1];
    let mut oracle_bits = 0;
    for (kept, bits) in &rounds {
        oracle_bits += bits;
        for &e in kept {
            votes[e as usize] += 1;
        }
    }
    let candidates: Vec<u32> = (1..=m).filter(|&e| votes[e as usize] as f64 > tau).collect();
    let mut outcome = BoostOutcome {
        answer: None,
        success: false,
        too_many_candidates: candidates.len() as f64 > t,
        candidates,
        e_star_votes: votes[inst.e_star as usize],
        k,
        t,
        tau,
        oracle_bits,
        intersection_bits: 0,
    };
    if !outcome.too_many_candidates {
        let (transcript, answer) = intersection_protocol(m, &outcome.candidates, &inst.b, source.child("intersect").rng())?;
        outcome.intersection_bits = transcript.total_bits();
        outcome.answer = answer;
        outcome.success = answer == Some(inst.e_star);
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostSummary {
    pub oracle: String,
    pub m: u32,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_bits: f64,
    pub k: usize,
    pub t: f64,
    pub tau: f64,
}

/// Runs [`boost_si`] on `trials` fresh instances. Trial `j` draws its
/// instance from `trial/<j>/instance` and its protocol randomness from
/// `trial/<j>/protocol`.
pub fn boost_trials(oracle: &dyn SiOracle, m: u32, params: &BoostParams, trials: usize, source: &Substream) -> Result<BoostSummary> {
    let outcomes: Vec<BoostOutcome> = (0..trials)
        .into_par_iter()
        .map(|j| {
            let trial = source.indexed("trial", j);
            let inst = sample_si(m, &mut trial.child("instance").rng())?;
            boost_si(oracle, &inst, params, &trial.child("protocol"))
        })
        .collect::<Result<_>>()?;
    let successes = outcomes.iter().filter(|o| o.success).count();
    let n = trials.max(1) as f64;
    Ok(BoostSummary {
        oracle: oracle.tag(),
        m,
        trials,
        successes,
        success_rate: successes as f64 / n,
        mean_bits: outcomes.iter().map(|o| o.total_bits() as f64).sum::<f64>() / n,
        k: params.k(),
        t: params.t(m),
        tau: params.tau(),
    })
}
