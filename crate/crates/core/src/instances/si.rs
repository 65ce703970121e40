//! The set-intersection distribution: `A = A' ∪ {e*}`, `B = B' ∪ {e*}` with
//! `A'`, `B'` disjoint uniform `(m/4 - 1)`-subsets of `[m]` and `e*` uniform
//! over what is left.

use crate::error::{param, Error, Result};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One draw from the set-intersection distribution over `[m]` (1-based).
/// `a` and `b` are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiInstance {
    pub m: u32,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub e_star: u32,
}

impl SiInstance {
    pub fn new(m: u32, mut a: Vec<u32>, mut b: Vec<u32>) -> Result<Self> {
        a.sort_unstable();
        b.sort_unstable();
        let common: Vec<u32> = a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect();
        if common.len() != 1 {
            return Err(Error::Rejected(format!("|A ∩ B| = {}, expected 1", common.len())));
        }
        let inst = SiInstance {
            m,
            a,
            b,
            e_star: common[0],
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn set_size(&self) -> usize {
        self.m as usize / 4
    }

    /// `A \ {e*}`
    pub fn a_prime(&self) -> Vec<u32> {
        self.a.iter().copied().filter(|&x| x != self.e_star).collect()
    }

    /// `B \ {e*}`
    pub fn b_prime(&self) -> Vec<u32> {
        self.b.iter().copied().filter(|&x| x != self.e_star).collect()
    }

    /// Checks sizes, ranges, sortedness and `A ∩ B = {e*}`.
    pub fn check(&self) -> Result<()> {
        let q = self.set_size();
        let bad = |msg: String| Err(Error::Invariant(msg));
        if self.a.len() != q || self.b.len() != q {
            return bad(format!("|A| = {}, |B| = {}, expected m/4 = {q}", self.a.len(), self.b.len()));
        }
        for set in [&self.a, &self.b] {
            if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&x| x < 1 || x > self.m) {
                return bad(format!("set {set:?} not a sorted subset of [1, {}]", self.m));
            }
        }
        let common: Vec<u32> = self.a.iter().copied().filter(|x| self.b.binary_search(x).is_ok()).collect();
        if common != [self.e_star] {
            return bad(format!("A ∩ B = {common:?}, e* = {}", self.e_star));
        }
        Ok(())
    }
}

fn check_m(m: u32) -> Result<()> {
    if m < 4 || !m.is_multiple_of(4) {
        return param(format!("universe size must be a positive multiple of 4, got {m}"));
    }
    Ok(())
}

pub fn sample_si<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<SiInstance> {
    check_m(m)?;
    let q = m as usize / 4;
    // a uniformly random ordered selection of 2q - 1 distinct elements:
    // A', then B', then e* (uniform over the rest given A', B')
    let picks = index::sample(rng, m as usize, 2 * q - 1).into_vec();
    let to_elem = |i: usize| i as u32 + 1;
    let e_star = to_elem(picks[2 * q - 2]);
    let mut a: Vec<u32> = picks[..q - 1].iter().map(|&i| to_elem(i)).collect();
    let mut b: Vec<u32> = picks[q - 1..2 * q - 2].iter().map(|&i| to_elem(i)).collect();
    a.push(e_star);
    b.push(e_star);
    a.sort_unstable();
    b.sort_unstable();
    Ok(SiInstance { m, a, b, e_star })
}

/// Relabels by `sigma`, given as `sigma[x - 1] = σ(x)` for `x ∈ [m]`.
pub fn apply_permutation(inst: &SiInstance, sigma: &[u32]) -> Result<SiInstance> {
    let m = inst.m as usize;
    if sigma.len() != m {
        return Err(Error::Rejected(format!("permutation has length {}, expected {m}", sigma.len())));
    }
    let mut seen = vec![false; m];
    for &y in sigma {
        if y < 1 || y as usize > m || std::mem::replace(&mut seen[y as usize - 1], true) {
            return Err(Error::Rejected("permutation is not a bijection on [m]".into()));
        }
    }
    let map = |set: &[u32]| -> Vec<u32> {
        let mut v: Vec<u32> = set.iter().map(|&x| sigma[x as usize - 1]).collect();
        v.sort_unstable();
        v
    };
    Ok(SiInstance {
        m: inst.m,
        a: map(&inst.a),
        b: map(&inst.b),
        e_star: sigma[inst.e_star as usize - 1],
    })
}

/// Every instance in the support. The distribution is uniform over this
/// list: each `(A, B)` pair arises from exactly one `(A', B', e*)`.
pub fn enumerate_si(m: u32) -> Result<Vec<SiInstance>> {
    check_m(m)?;
    let q = m as usize / 4;
    let universe: Vec<u32> = (1..=m).collect();
    let mut out = Vec::new();
    for a in combinations(&universe, q) {
        let rest: Vec<u32> = universe.iter().copied().filter(|x| a.binary_search(x).is_err()).collect();
        for &e in &a {
            for b_prime in combinations(&rest, q - 1) {
                let mut b = b_prime;
                b.push(e);
                b.sort_unstable();
                out.push(SiInstance {
                    m,
                    a: a.clone(),
                    b,
                    e_star: e,
                });
            }
        }
    }
    Ok(out)
}

/// All `k`-subsets of `items`, each sorted if `items` is.
pub fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn rec(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// A uniformly random permutation of `[m]` in the `sigma[x - 1] = σ(x)` form.
pub fn random_permutation<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Vec<u32> {
    use rand::seq::SliceRandom;
    let mut sigma: Vec<u32> = (1..=m).collect();
    sigma.shuffle(rng);
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Substream;
    use std::collections::HashMap;

    #[test]
    fn m4_forces_singletons() {
        let mut rng = Substream::root(1).rng();
        for _ in 0..20 {
            let s = sample_si(4, &mut rng).unwrap();
            assert_eq!(s.a, vec![s.e_star]);
            assert_eq!(s.b, vec![s.e_star]);
        }
    }

    #[test]
    fn m8_shape() {
        let mut rng = Substream::root(2).rng();
        for _ in 0..200 {
            let s = sample_si(8, &mut rng).unwrap();
            s.check().unwrap();
            assert_eq!(s.a.len(), 2);
            assert!(s.a.iter().chain(&s.b).all(|&x| (1..=8).contains(&x)));
        }
    }

    #[test]
    fn bad_m() {
        let mut rng = Substream::root(3).rng();
        assert!(matches!(sample_si(6, &mut rng), Err(Error::Parameter(_))));
        assert!(sample_si(0, &mut rng).is_err());
    }

    #[test]
    fn permutation_examples() {
        let inst = SiInstance::new(4, vec![2], vec![2]).unwrap();
        assert_eq!(apply_permutation(&inst, &[1, 2, 3, 4]).unwrap(), inst);
        let swapped = apply_permutation(&inst, &[2, 1, 3, 4]).unwrap();
        assert_eq!((swapped.a.clone(), swapped.b.clone(), swapped.e_star), (vec![1], vec![1], 1));
        assert!(apply_permutation(&inst, &[1, 1, 3, 4]).is_err());
        assert!(apply_permutation(&inst, &[1, 2, 3]).is_err());
    }

    #[test]
    fn support_sizes() {
        // C(m, q) * q * C(m - q, q - 1)
        assert_eq!(enumerate_si(4).unwrap().len(), 4);
        assert_eq!(enumerate_si(8).unwrap().len(), 28 * 2 * 6);
        assert_eq!(enumerate_si(12).unwrap().len(), 220 * 3 * 36);
    }

    fn all_permutations(m: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur: Vec<u32> = (1..=m).collect();
        fn heap(k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if k == 1 {
                out.push(cur.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, cur, out);
                let j = if k.is_multiple_of(2) { i } else { 0 };
                cur.swap(j, k - 1);
            }
        }
        heap(m as usize, &mut cur, &mut out);
        out
    }

    #[test]
    fn rerandomization_is_uniform_over_support() {
        // every fixed instance, pushed through all 24 permutations of [4],
        // hits every support point equally often
        let support = enumerate_si(4).unwrap();
        let perms = all_permutations(4);
        assert_eq!(perms.len(), 24);
        for inst in &support {
            let mut hits: HashMap<SiInstance, usize> = HashMap::new();
            for sigma in &perms {
                *hits.entry(apply_permutation(inst, sigma).unwrap()).or_default() += 1;
            }
            assert_eq!(hits.len(), support.len());
            assert!(hits.values().all(|&c| c == 24 / support.len()));
        }
    }

    #[test]
    fn rerandomization_m8_uniform() {
        let support = enumerate_si(8).unwrap();
        let perms = all_permutations(8);
        let inst = &support[17];
        let mut hits: HashMap<SiInstance, usize> = HashMap::new();
        for sigma in &perms {
            *hits.entry(apply_permutation(inst, sigma).unwrap()).or_default() += 1;
        }
        assert_eq!(hits.len(), support.len());
        let expect = perms.len() / support.len();
        assert!(hits.values().all(|&c| c == expect));
    }
}
