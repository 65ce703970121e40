//! Exact information-theoretic quantities on finite distributions.
//!
//! Entropy and mutual information are in bits. KL divergence comes in both
//! bases; Pinsker's inequality `tvd ≤ sqrt(kl / 2)` only holds with KL in
//! nats, so [`kl_nats`] is the one to pair with it.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability vector over distinct labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    pub support: Vec<String>,
    pub probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::Parameter(format!("{} labels but {} probabilities", support.len(), probs.len())));
        }
        let mut sorted = support.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("support labels must be distinct".into()));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Parameter("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Parameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteDistribution { support, probs })
    }

    /// Labels `"0"`, `"1"`, ….
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let support = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(support, probs)
    }

    pub fn uniform(n: usize) -> Self {
        DiscreteDistribution {
            support: (0..n).map(|i| i.to_string()).collect(),
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn same_support(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<()> {
    if mu.support != nu.support {
        return Err(Error::Parameter("distributions are over different supports".into()));
    }
    Ok(())
}

/// `½ Σ |μ(x) − ν(x)|`.
pub fn tvd(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<f64> {
    same_support(mu, nu)?;
    Ok(tvd_slices(&mu.probs, &nu.probs))
}

pub fn tvd_slices(mu: &[f64], nu: &[f64]) -> f64 {
    debug_assert_eq!(mu.len(), nu.len());
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `max_{Ω'} μ(Ω') − ν(Ω')` by enumerating every subset. Exponential, so
/// only for supports of at most 20 points.
pub fn tvd_by_subsets(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::Parameter("length mismatch".into()));
    }
    if mu.len() > 20 {
        return Err(Error::Enumeration(format!("2^{} subsets", mu.len())));
    }
    let mut best = 0.0f64;
    for mask in 0u32..(1 << mu.len()) {
        let gap: f64 = (0..mu.len()).filter(|i| mask >> i & 1 == 1).map(|i| mu[i] - nu[i]).sum();
        best = best.max(gap);
    }
    Ok(best)
}

/// Total variation in exact rational arithmetic.
pub fn tvd_exact(mu: &[Ratio<i64>], nu: &[Ratio<i64>]) -> Ratio<i64> {
    let sum = mu.iter().zip(nu).fold(Ratio::zero(), |acc, (a, b)| acc + (a - b).abs());
    sum / 2
}

fn kl_with(mu: &DiscreteDistribution, nu: &DiscreteDistribution, log: fn(f64) -> f64) -> Result<f64> {
    same_support(mu, nu)?;
    let mut total = 0.0;
    for (&p, &q) in mu.probs.iter().zip(&nu.probs) {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += p * log(p / q);
    }
    Ok(total.max(0.0))
}

/// `Σ μ log₂(μ/ν)`, `+∞` when μ is not absolutely continuous w.r.t. ν.
pub fn kl(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<f64> {
    kl_with(mu, nu, f64::log2)
}

pub fn kl_nats(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> Result<f64> {
    kl_with(mu, nu, f64::ln)
}

fn entropy_of(probs: impl IntoIterator<Item = f64>) -> f64 {
    -probs.into_iter().filter(|&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Shannon entropy in bits.
pub fn entropy(mu: &DiscreteDistribution) -> f64 {
    let h = entropy_of(mu.probs.iter().copied()).max(0.0);
    let support = mu.probs.iter().filter(|&&p| p > 0.0).count().max(1);
    debug_assert!(h <= (support as f64).log2() + 1e-9, "entropy above log |supp|");
    h
}

/// A joint distribution of two variables as a row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub p: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(rows: Vec<String>, cols: Vec<String>, p: Vec<Vec<f64>>) -> Result<Self> {
        if p.len() != rows.len() || p.iter().any(|row| row.len() != cols.len()) {
            return Err(Error::Parameter("matrix shape does not match labels".into()));
        }
        if p.iter().flatten().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::Parameter("negative entry".into()));
        }
        let total: f64 = p.iter().flatten().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Parameter(format!("total mass {total}, not 1")));
        }
        Ok(JointDistribution { rows, cols, p })
    }

    pub fn from_matrix(p: Vec<Vec<f64>>) -> Result<Self> {
        let rows = (0..p.len()).map(|i| i.to_string()).collect();
        let cols = (0..p.first().map_or(0, Vec::len)).map(|i| i.to_string()).collect();
        Self::new(rows, cols, p)
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.cols.len()).map(|j| self.p.iter().map(|row| row[j]).sum()).collect()
    }
}

/// `I(X;Y) = H(X) − H(X|Y)` with `H(X|Y) = Σ_y p(y) H(X | Y = y)`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let hx = entropy_of(j.marginal_x());
    let py = j.marginal_y();
    let mut h_x_given_y = 0.0;
    for (col, &pyv) in py.iter().enumerate() {
        if pyv > 0.0 {
            h_x_given_y += pyv * entropy_of(j.p.iter().map(|row| row[col] / pyv));
        }
    }
    (hx - h_x_given_y).max(0.0)
}

/// A joint distribution of several finite variables, stored densely in
/// row-major order over `shape`. Used for conditional mutual information
/// through `I(X;Y|Z) = H(XZ) + H(YZ) − H(XYZ) − H(Z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiJoint {
    pub shape: Vec<usize>,
    pub probs: Vec<f64>,
}

impl MultiJoint {
    pub fn new(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if shape.iter().product::<usize>() != probs.len() {
            return Err(Error::Parameter("shape does not match probability count".into()));
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter("not a probability vector".into()));
        }
        Ok(MultiJoint { shape, probs })
    }

    fn index_of(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for k in (0..self.shape.len()).rev() {
            idx[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        idx
    }

    /// Entropy (bits) of the marginal on `vars`.
    pub fn entropy_of(&self, vars: &[usize]) -> f64 {
        let mut marginal = std::collections::HashMap::<Vec<usize>, f64>::new();
        for (flat, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                let idx = self.index_of(flat);
                *marginal.entry(vars.iter().map(|&v| idx[v]).collect()).or_default() += p;
            }
        }
        entropy_of(marginal.into_values())
    }

    pub fn conditional_mi(&self, x: &[usize], y: &[usize], z: &[usize]) -> f64 {
        let cat = |a: &[usize], b: &[usize]| [a, b].concat();
        let xz = cat(x, z);
        let yz = cat(y, z);
        let xyz = cat(&xz, y);
        self.entropy_of(&xz) + self.entropy_of(&yz) - self.entropy_of(&xyz) - self.entropy_of(z)
    }

    /// Replaces variable `var` by `f(var)`, where `f` maps into `0..range`.
    pub fn map_variable(&self, var: usize, range: usize, f: impl Fn(usize) -> usize) -> MultiJoint {
        let mut shape = self.shape.clone();
        shape[var] = range;
        let mut out = vec![0.0; shape.iter().product()];
        for (flat, &p) in self.probs.iter().enumerate() {
            let mut idx = self.index_of(flat);
            idx[var] = f(idx[var]);
            let target = idx.iter().zip(&shape).fold(0, |acc, (&i, &s)| acc * s + i);
            out[target] += p;
        }
        MultiJoint { shape, probs: out }
    }
}

/// Outcome of [`top_half_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopHalf {
    /// indices of the top half, largest probability first, ties by index
    pub set: Vec<usize>,
    pub mass: f64,
    pub delta: f64,
    pub bound_holds: bool,
}

/// Indices of the `k` largest entries; ties go to the smaller index.
pub fn top_indices(probs: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..probs.len()).collect();
    idx.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// The mass of the top half of `mu` against `½ + δ/2`, `δ = tvd(μ, U)`.
pub fn top_half_check(mu: &DiscreteDistribution) -> Result<TopHalf> {
    let n = mu.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("support size {n} is not a positive even number")));
    }
    let uniform = vec![1.0 / n as f64; n];
    let delta = tvd_slices(&mu.probs, &uniform);
    let set = top_indices(&mu.probs, n / 2);
    let mass: f64 = set.iter().map(|&i| mu.probs[i]).sum();
    let bound_holds = mass >= 0.5 + delta / 2.0 - 1e-12;
    Ok(TopHalf {
        set,
        mass,
        delta,
        bound_holds,
    })
}

/// [`top_half_check`] in exact arithmetic: `(mass, delta, holds)`.
pub fn top_half_exact(probs: &[Ratio<i64>]) -> Result<(Ratio<i64>, Ratio<i64>, bool)> {
    let n = probs.len();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("support size {n} is not a positive even number")));
    }
    let uniform = vec![Ratio::new(1, n as i64); n];
    let delta = tvd_exact(probs, &uniform);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| probs[b].cmp(&probs[a]).then(a.cmp(&b)));
    let mass = idx[..n / 2].iter().fold(Ratio::zero(), |acc, &i| acc + probs[i]);
    let holds = mass >= Ratio::new(1, 2) + delta / 2;
    Ok((mass, delta, holds))
}

/// `2·exp(−b²/(2n))`, the two-sided tail bound for a sum of `n`
/// independent `[0,1]` variables deviating by at least `b`.
pub fn chernoff_bound(n: u64, b: f64) -> Result<f64> {
    if n == 0 || b.is_nan() || b <= 0.0 {
        return Err(Error::Parameter(format!("need n ≥ 1 and b > 0, got n = {n}, b = {b}")));
    }
    Ok((2.0 * (-b * b / (2.0 * n as f64)).exp()).clamp(0.0, 2.0))
}
