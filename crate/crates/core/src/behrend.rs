//! Sets of integers in `[1, m]` with no three-term arithmetic progression.
//!
//! Two strategies are provided:
//!
//! * `digit-base3`: every integer whose base-3 expansion uses only the
//!   digits 0 and 1. If `a + c = 2b` for three such numbers, the digit sums
//!   never carry, so the digit vectors satisfy `x + z = 2y` in `{0,1}^k`,
//!   which forces `x = y = z`.
//! * `behrend-sphere`: digit vectors `x ∈ {0..D-1}^d` read in base `2D-1`
//!   (again carry-free under addition) that lie on one sphere. A sphere
//!   contains no three collinear points, so the set is AP-free. The search
//!   scans dimensions, digit bounds, two sphere centres (the origin and the
//!   centre of the digit box), both placements of the box in `[1, m]`, and
//!   every radius class, and keeps the largest class.
//!
//! With the box-centred sphere and `D = 2` every `{0,1}` vector has the same
//! radius, so the scan contains the base-3 set as one of its candidates and
//! is never smaller than it.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "behrend-sphere")]
    BehrendSphere,
    #[serde(rename = "digit-base3")]
    DigitBase3,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "behrend-sphere" => Ok(Strategy::BehrendSphere),
            "digit-base3" => Ok(Strategy::DigitBase3),
            other => Err(Error::Unknown {
                kind: "strategy",
                name: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::BehrendSphere => "behrend-sphere",
            Strategy::DigitBase3 => "digit-base3",
        })
    }
}

/// How a set was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum Construction {
    BehrendSphere {
        dimension: u32,
        digit_bound: u64,
        box_centred: bool,
        radius_sq: u64,
        offset: u64,
    },
    DigitBase3,
    Explicit,
}

impl Construction {
    pub fn tag(&self) -> &'static str {
        match self {
            Construction::BehrendSphere { .. } => "behrend-sphere",
            Construction::DigitBase3 => "digit-base3",
            Construction::Explicit => "explicit",
        }
    }
}

/// A subset of `[1, m]` meant to be 3-AP-free. Fields are public so that
/// arbitrary (possibly malformed) sets can be handed to [`verify_no_3ap`];
/// only [`construct_ap_free`] guarantees the invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehrendSet {
    pub m: u64,
    pub elements: Vec<u64>,
    pub construction: Construction,
}

impl BehrendSet {
    pub fn explicit(m: u64, elements: Vec<u64>) -> Self {
        BehrendSet {
            m,
            elements,
            construction: Construction::Explicit,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Result of [`verify_no_3ap`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApReport {
    pub passed: bool,
    pub triple: Option<(u64, u64, u64)>,
    pub reason: Option<String>,
}

pub fn construct_ap_free(m: u64, strategy: Strategy) -> Result<BehrendSet> {
    if m == 0 {
        return Err(Error::Parameter("universe size m must be at least 1".into()));
    }
    let set = match strategy {
        Strategy::DigitBase3 => BehrendSet {
            m,
            elements: digit_base3(m),
            construction: Construction::DigitBase3,
        },
        Strategy::BehrendSphere => sphere_scan(m),
    };
    let report = verify_no_3ap(&set);
    if !report.passed {
        return Err(Error::Invariant(format!(
            "{strategy} produced a set that fails verification: {report:?}"
        )));
    }
    Ok(set)
}

fn digit_base3(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    // Numbers with {0,1} base-3 digits, in increasing order: binary counting
    // reinterpreted in base 3.
    for mask in 1u64.. {
        let mut v = 0u64;
        let mut place = 1u64;
        let mut bits = mask;
        while bits > 0 {
            if bits & 1 == 1 {
                v += place;
            }
            bits >>= 1;
            place = place.saturating_mul(3);
        }
        if v > m {
            break;
        }
        out.push(v);
    }
    out
}

fn max_dimension(m: u64) -> u32 {
    let log2 = (m as f64).log2();
    let scan = (log2.sqrt().ceil() as u32) * 4;
    // enough digits for the D = 2 box to cover [0, m]
    let mut base3_digits = 1u32;
    while 3u128.pow(base3_digits) <= u128::from(m) {
        base3_digits += 1;
    }
    scan.max(base3_digits).max(1)
}

#[derive(Clone, Copy)]
struct Candidate {
    dimension: u32,
    digit_bound: u64,
    box_centred: bool,
    radius_sq: u64,
    offset: u64,
    size: usize,
}

/// Visits every `v <= limit` whose base-`base` digits (d of them) are all
/// `< bound`, together with its digit vector.
fn for_each_vector(d: u32, bound: u64, limit: u64, mut f: impl FnMut(u64, &[u64])) {
    let base = 2 * bound - 1;
    let mut place = vec![1u64; d as usize];
    for i in 1..d as usize {
        place[i] = place[i - 1].saturating_mul(base);
    }
    let mut digits = vec![0u64; d as usize];
    fn rec(
        pos: usize,
        acc: u64,
        limit: u64,
        bound: u64,
        place: &[u64],
        digits: &mut Vec<u64>,
        f: &mut dyn FnMut(u64, &[u64]),
    ) {
        if pos == 0 {
            f(acc, digits);
            return;
        }
        let i = pos - 1;
        for x in 0..bound {
            let v = match place[i].checked_mul(x).and_then(|p| p.checked_add(acc)) {
                Some(v) if v <= limit => v,
                _ => break,
            };
            digits[i] = x;
            rec(i, v, limit, bound, place, digits, f);
        }
        digits[i] = 0;
    }
    rec(d as usize, 0, limit, bound, &place, &mut digits, &mut f);
}

fn radius(digits: &[u64], bound: u64, box_centred: bool) -> u64 {
    digits
        .iter()
        .map(|&x| {
            if box_centred {
                let c = (2 * x).abs_diff(bound - 1);
                c * c
            } else {
                x * x
            }
        })
        .sum()
}

fn sphere_scan(m: u64) -> BehrendSet {
    let mut best: Option<Candidate> = None;
    for d in 1..=max_dimension(m) {
        let mut bound = 2u64;
        loop {
            let base = 2 * bound - 1;
            // top digit can never be non-zero: same sets as dimension d - 1
            if d > 1 && (base as u128).pow(d - 1) > u128::from(m) {
                break;
            }
            // (centre, radius) -> counts for offsets 0 and 1
            let mut classes: HashMap<(bool, u64), [usize; 2]> = HashMap::new();
            for_each_vector(d, bound, m, |v, digits| {
                for centred in [false, true] {
                    let entry = classes.entry((centred, radius(digits, bound, centred))).or_default();
                    if v >= 1 {
                        entry[0] += 1;
                    }
                    if v < m {
                        entry[1] += 1;
                    }
                }
            });
            let mut keys: Vec<_> = classes.into_iter().collect();
            keys.sort_unstable_by_key(|&((c, r), _)| (c, r));
            for ((box_centred, radius_sq), counts) in keys {
                for (offset, &size) in counts.iter().enumerate() {
                    if best.is_none_or(|b| size > b.size) {
                        best = Some(Candidate {
                            dimension: d,
                            digit_bound: bound,
                            box_centred,
                            radius_sq,
                            offset: offset as u64,
                            size,
                        });
                    }
                }
            }
            // one digit: radius classes have at most two members
            if d == 1 || (base as u128).pow(d) > u128::from(m) {
                break;
            }
            bound += 1;
        }
    }
    let c = best.expect("dimension 1 always yields a candidate");
    let mut elements = Vec::with_capacity(c.size);
    for_each_vector(c.dimension, c.digit_bound, m, |v, digits| {
        let e = v + c.offset;
        if (1..=m).contains(&e) && radius(digits, c.digit_bound, c.box_centred) == c.radius_sq {
            elements.push(e);
        }
    });
    elements.sort_unstable();
    BehrendSet {
        m,
        elements,
        construction: Construction::BehrendSphere {
            dimension: c.dimension,
            digit_bound: c.digit_bound,
            box_centred: c.box_centred,
            radius_sq: c.radius_sq,
            offset: c.offset,
        },
    }
}

/// Midpoint scan: for every pair `a < c` of equal parity, look for
/// `(a + c) / 2` in the set. Also rejects out-of-range or unsorted input.
pub fn verify_no_3ap(s: &BehrendSet) -> ApReport {
    let fail = |reason: String| ApReport {
        passed: false,
        triple: None,
        reason: Some(reason),
    };
    let el = &s.elements;
    if let Some(&x) = el.iter().find(|&&x| x < 1 || x > s.m) {
        return fail(format!("element {x} outside [1, {}]", s.m));
    }
    if let Some(w) = el.windows(2).find(|w| w[0] >= w[1]) {
        return fail(format!("elements not strictly increasing at {} >= {}", w[0], w[1]));
    }
    for i in 0..el.len() {
        for j in i + 2..el.len() {
            let (a, c) = (el[i], el[j]);
            if (a + c) % 2 != 0 {
                continue;
            }
            let mid = (a + c) / 2;
            if el[i + 1..j].binary_search(&mid).is_ok() {
                return ApReport {
                    passed: false,
                    triple: Some((a, mid, c)),
                    reason: Some(format!("{a}, {mid}, {c} is an arithmetic progression")),
                };
            }
        }
    }
    ApReport {
        passed: true,
        triple: None,
        reason: None,
    }
}
