//! Set-intersection protocols treated as black boxes with a known
//! transcript distribution, and exact measurement of how far a transcript
//! moves each player's posterior on `e*`.
//!
//! An oracle is described by the distribution of its transcript on every
//! instance, not by next-message functions, so idealized mocks that look at
//! both inputs (for example one that announces `e*`) fit the same interface
//! as genuine one-way protocols.

use crate::bits::{width_for, BitString};
use crate::error::{Error, Result};
use crate::infometrics::tvd_slices;
use crate::instances::{enumerate_si, sample_si, SiInstance};
use crate::instances::si::combinations;
use crate::rng::Substream;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

/// Largest universe for exact enumeration (23 760 instances at `m = 12`).
pub const EXACT_LIMIT: u32 = 12;

/// Universe size at which mocks are calibrated.
pub const CALIBRATION_M: u32 = 12;

pub trait SiOracle: Send + Sync {
    fn tag(&self) -> String;

    /// Every transcript with positive probability on `inst`.
    fn outcomes(&self, inst: &SiInstance) -> Vec<(f64, BitString)>;

    fn sample(&self, inst: &SiInstance, rng: &mut dyn RngCore) -> BitString {
        let outcomes = self.outcomes(inst);
        let mut u: f64 = rng.gen();
        for (p, msg) in &outcomes {
            if u < *p {
                return msg.clone();
            }
            u -= p;
        }
        outcomes.last().map(|(_, m)| m.clone()).unwrap_or_default()
    }

    /// `Pr[Π = msg | A = a, e* = e]`, averaging over the rest of `B`.
    fn alice_likelihood(&self, m: u32, a: &[u32], e: u32, msg: &BitString) -> f64 {
        average_over_completions(self, m, a, e, msg, true)
    }

    /// `Pr[Π = msg | B = b, e* = e]`, averaging over the rest of `A`.
    fn bob_likelihood(&self, m: u32, b: &[u32], e: u32, msg: &BitString) -> f64 {
        average_over_completions(self, m, b, e, msg, false)
    }
}

fn average_over_completions<O: SiOracle + ?Sized>(
    oracle: &O,
    m: u32,
    known: &[u32],
    e: u32,
    msg: &BitString,
    known_is_a: bool,
) -> f64 {
    let q = m as usize / 4;
    let free: Vec<u32> = (1..=m).filter(|x| !known.contains(x)).collect();
    let completions = combinations(&free, q - 1);
    let total: f64 = completions
        .iter()
        .map(|rest| {
            let mut other = rest.clone();
            other.push(e);
            let inst = if known_is_a {
                SiInstance::new(m, known.to_vec(), other)
            } else {
                SiInstance::new(m, other, known.to_vec())
            };
            inst.map_or(0.0, |inst| {
                oracle.outcomes(&inst).iter().filter(|(_, t)| t == msg).map(|(p, _)| p).sum()
            })
        })
        .sum();
    total / completions.len() as f64
}

/// Test fixtures with closed-form likelihoods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "kebab-case")]
pub enum MockOracle {
    /// Sends nothing.
    Silent,
    /// Announces `e*` with probability `p`, otherwise sends nothing.
    Reveal { p: f64 },
    /// Sends `e*` with probability `q`, otherwise a uniform element of `[m]`.
    Bias { q: f64 },
    /// Alice sends `min(A)`.
    AliceMin,
}

impl MockOracle {
    pub fn perfect() -> Self {
        MockOracle::Reveal { p: 1.0 }
    }
}

fn element(m: u32, x: u32) -> BitString {
    BitString::from_uint(x as u64, width_for(m as u64))
}

fn read_element(msg: &BitString) -> Option<u32> {
    msg.reader().read_uint(msg.len()).map(|x| x as u32)
}

impl SiOracle for MockOracle {
    fn tag(&self) -> String {
        match self {
            MockOracle::Silent => "silent".into(),
            MockOracle::Reveal { p } => format!("reveal(p={p})"),
            MockOracle::Bias { q } => format!("bias(q={q})"),
            MockOracle::AliceMin => "alice-min".into(),
        }
    }

    fn outcomes(&self, inst: &SiInstance) -> Vec<(f64, BitString)> {
        let m = inst.m;
        match *self {
            MockOracle::Silent => vec![(1.0, BitString::new())],
            MockOracle::Reveal { p } => {
                let mut out = Vec::new();
                if p > 0.0 {
                    out.push((p, element(m, inst.e_star)));
                }
                if p < 1.0 {
                    out.push((1.0 - p, BitString::new()));
                }
                out
            }
            MockOracle::Bias { q } => (1..=m)
                .map(|x| {
                    let p = (1.0 - q) / m as f64 + if x == inst.e_star { q } else { 0.0 };
                    (p, element(m, x))
                })
                .filter(|(p, _)| *p > 0.0)
                .collect(),
            MockOracle::AliceMin => vec![(1.0, element(m, inst.a[0]))],
        }
    }

    fn sample(&self, inst: &SiInstance, rng: &mut dyn RngCore) -> BitString {
        let m = inst.m;
        match *self {
            MockOracle::Silent => BitString::new(),
            MockOracle::Reveal { p } => {
                if rng.gen_bool(p) {
                    element(m, inst.e_star)
                } else {
                    BitString::new()
                }
            }
            MockOracle::Bias { q } => {
                if rng.gen_bool(q) {
                    element(m, inst.e_star)
                } else {
                    element(m, rng.gen_range(1..=m))
                }
            }
            MockOracle::AliceMin => element(m, inst.a[0]),
        }
    }

    fn alice_likelihood(&self, m: u32, a: &[u32], e: u32, msg: &BitString) -> f64 {
        match *self {
            MockOracle::AliceMin => f64::from(u8::from(read_element(msg) == a.iter().min().copied())),
            _ => self.symmetric_likelihood(m, e, msg),
        }
    }

    fn bob_likelihood(&self, m: u32, b: &[u32], e: u32, msg: &BitString) -> f64 {
        match *self {
            MockOracle::AliceMin => average_over_completions(self, m, b, e, msg, false),
            _ => self.symmetric_likelihood(m, e, msg),
        }
    }
}

impl MockOracle {
    /// Likelihood for mocks whose transcript depends only on `e*`.
    fn symmetric_likelihood(&self, m: u32, e: u32, msg: &BitString) -> f64 {
        match *self {
            MockOracle::Silent => f64::from(u8::from(msg.is_empty())),
            MockOracle::Reveal { p } => {
                if msg.is_empty() {
                    1.0 - p
                } else if read_element(msg) == Some(e) {
                    p
                } else {
                    0.0
                }
            }
            MockOracle::Bias { q } => {
                (1.0 - q) / m as f64 + if read_element(msg) == Some(e) { q } else { 0.0 }
            }
            MockOracle::AliceMin => unreachable!("alice-min depends on A"),
        }
    }
}

/// How far the transcript moves each player's posterior on `e*`, in
/// expected total variation distance from the prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsMeasurement {
    pub m: u32,
    pub alice: f64,
    pub bob: f64,
    /// the larger of the two sides, the headline number
    pub max: f64,
    pub exact: bool,
    /// standard errors of `alice` and `bob` for Monte Carlo estimates
    pub std_err: Option<(f64, f64)>,
    pub samples: usize,
}

/// Exact measurement by enumerating every instance of the set-intersection
/// distribution and every transcript. Needs `m ≤ EXACT_LIMIT`.
pub fn measure_internal_eps(oracle: &dyn SiOracle, m: u32) -> Result<EpsMeasurement> {
    if m > EXACT_LIMIT {
        return Err(Error::Enumeration(format!(
            "exact measurement enumerates the whole distribution; m = {m} exceeds {EXACT_LIMIT}"
        )));
    }
    let instances = enumerate_si(m)?;
    Ok(measure_on(oracle, m, &instances))
}

fn measure_on(oracle: &dyn SiOracle, m: u32, instances: &[SiInstance]) -> EpsMeasurement {
    let weight = 1.0 / instances.len() as f64;
    let size = m as usize + 1;
    // (player's set, transcript) -> unnormalized distribution of e*
    let mut alice: HashMap<(&[u32], BitString), Vec<f64>> = HashMap::new();
    let mut bob: HashMap<(&[u32], BitString), Vec<f64>> = HashMap::new();
    let mut alice_prior: HashMap<&[u32], Vec<f64>> = HashMap::new();
    let mut bob_prior: HashMap<&[u32], Vec<f64>> = HashMap::new();
    for inst in instances {
        let e = inst.e_star as usize;
        alice_prior.entry(&inst.a).or_insert_with(|| vec![0.0; size])[e] += weight;
        bob_prior.entry(&inst.b).or_insert_with(|| vec![0.0; size])[e] += weight;
        for (p, msg) in oracle.outcomes(inst) {
            let w = weight * p;
            alice.entry((&inst.a, msg.clone())).or_insert_with(|| vec![0.0; size])[e] += w;
            bob.entry((&inst.b, msg)).or_insert_with(|| vec![0.0; size])[e] += w;
        }
    }
    let side = |joint: &HashMap<(&[u32], BitString), Vec<f64>>, prior: &HashMap<&[u32], Vec<f64>>| {
        joint
            .iter()
            .map(|((set, _), dist)| {
                let mass: f64 = dist.iter().sum();
                let pr = &prior[set];
                let pr_mass: f64 = pr.iter().sum();
                let post: Vec<f64> = dist.iter().map(|x| x / mass).collect();
                let pri: Vec<f64> = pr.iter().map(|x| x / pr_mass).collect();
                mass * tvd_slices(&post, &pri)
            })
            .sum::<f64>()
    };
    let a = side(&alice, &alice_prior);
    let b = side(&bob, &bob_prior);
    EpsMeasurement {
        m,
        alice: a,
        bob: b,
        max: a.max(b),
        exact: true,
        std_err: None,
        samples: instances.len(),
    }
}

/// Monte Carlo estimate for larger `m`. Each sample draws an instance and a
/// transcript and computes both posteriors from the oracle's likelihoods.
pub fn measure_internal_eps_mc(oracle: &dyn SiOracle, m: u32, samples: usize, source: &Substream) -> Result<EpsMeasurement> {
    if samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let mut rng = source.rng();
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for _ in 0..samples {
        let inst = sample_si(m, &mut rng)?;
        let msg = oracle.sample(&inst, &mut rng);
        let shift = |set: &[u32], lik: &dyn Fn(u32) -> f64| -> Result<f64> {
            let post: Vec<f64> = set.iter().map(|&e| lik(e)).collect();
            let total: f64 = post.iter().sum();
            if total <= 0.0 {
                return Err(Error::Invariant(format!("{} assigns zero likelihood to a sampled transcript", oracle.tag())));
            }
            let uniform = vec![1.0 / set.len() as f64; set.len()];
            let post: Vec<f64> = post.iter().map(|p| p / total).collect();
            Ok(tvd_slices(&post, &uniform))
        };
        xs.push(shift(&inst.a, &|e| oracle.alice_likelihood(m, &inst.a, e, &msg))?);
        ys.push(shift(&inst.b, &|e| oracle.bob_likelihood(m, &inst.b, e, &msg))?);
    }
    let stats = |v: &[f64]| {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    };
    let (a, sa) = stats(&xs);
    let (b, sb) = stats(&ys);
    Ok(EpsMeasurement {
        m,
        alice: a,
        bob: b,
        max: a.max(b),
        exact: false,
        std_err: Some((sa, sb)),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MockMode {
    Reveal,
    Bias,
}

impl FromStr for MockMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reveal" => Ok(MockMode::Reveal),
            "bias" => Ok(MockMode::Bias),
            other => Err(Error::Unknown {
                kind: "mock mode",
                name: other.into(),
            }),
        }
    }
}

impl fmt::Display for MockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MockMode::Reveal => "reveal",
            MockMode::Bias => "bias",
        })
    }
}

/// A mock whose exactly measured distance at `CALIBRATION_M` is `eps`.
/// Targets above what the mode can reach give its strongest setting.
pub fn mock_eps_solver(eps: f64, mode: MockMode) -> Result<MockOracle> {
    calibrate_mock(eps, mode, CALIBRATION_M)
}

/// Bisection on the mock's single parameter, which the measured distance
/// increases with.
pub fn calibrate_mock(eps: f64, mode: MockMode, m: u32) -> Result<MockOracle> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Parameter(format!("target distance {eps} outside [0, 1]")));
    }
    if eps == 0.0 {
        return Ok(MockOracle::Silent);
    }
    if m > EXACT_LIMIT {
        return Err(Error::Enumeration(format!("calibration needs m ≤ {EXACT_LIMIT}, got {m}")));
    }
    let instances = enumerate_si(m)?;
    let make = |x: f64| match mode {
        MockMode::Reveal => MockOracle::Reveal { p: x },
        MockMode::Bias => MockOracle::Bias { q: x },
    };
    let measure = |x: f64| measure_on(&make(x), m, &instances).max;
    if measure(1.0) <= eps {
        return Ok(make(1.0));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let got = measure(mid);
        if (got - eps).abs() < 1e-9 {
            return Ok(make(mid));
        }
        if got < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(make(0.5 * (lo + hi)))
}

/// Oracles selectable by name: `silent`, `perfect`, `alice-min`, and
/// `reveal` or `bias` calibrated to `eps`.
pub fn oracle_from_tag(tag: &str, eps: f64) -> Result<MockOracle> {
    match tag {
        "silent" | "null" => Ok(MockOracle::Silent),
        "perfect" => Ok(MockOracle::perfect()),
        "alice-min" => Ok(MockOracle::AliceMin),
        "reveal" | "calibrated" => mock_eps_solver(eps, MockMode::Reveal),
        "bias" => mock_eps_solver(eps, MockMode::Bias),
        other => Err(Error::Unknown {
            kind: "oracle",
            name: other.into(),
        }),
    }
}
