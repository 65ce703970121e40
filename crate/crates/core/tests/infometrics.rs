use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;
use reachlb::experiments::{compositions, info_props};
use reachlb::infometrics::{
    chernoff_bound, entropy, kl, kl_nats, mutual_information, top_half_check, top_half_exact, tvd, tvd_by_subsets,
    tvd_exact, DiscreteDistribution, JointDistribution, MultiJoint,
};
use reachlb::rng::Substream;
use statrs::distribution::{Binomial, DiscreteCDF};

fn dist(weights: &[f64]) -> DiscreteDistribution {
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    // push rounding error onto the last entry so the sum is exactly 1
    let head: f64 = probs[..probs.len() - 1].iter().sum();
    *probs.last_mut().unwrap() = (1.0 - head).max(0.0);
    DiscreteDistribution::from_probs(probs).unwrap()
}

fn weights(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-3)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..8).prop_flat_map(|n| (weights(n..n + 1), weights(n..n + 1)))
}

proptest! {
    #[test]
    fn tvd_is_a_metric((a, b) in pair(), c in any::<u64>()) {
        let (mu, nu) = (dist(&a), dist(&b));
        let mut rng = Substream::root(c).rng();
        let w: Vec<f64> = (0..a.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let rho = dist(&w);
        let d = tvd(&mu, &nu).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - tvd(&nu, &mu).unwrap()).abs() < 1e-15);
        prop_assert!(d <= tvd(&mu, &rho).unwrap() + tvd(&rho, &nu).unwrap() + 1e-12);
        // the largest gap over events equals the half-L1 form
        prop_assert!((d - tvd_by_subsets(&mu.probs, &nu.probs).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pinsker((a, b) in pair()) {
        let (mu, nu) = (dist(&a), dist(&b));
        let d = tvd(&mu, &nu).unwrap();
        let k = kl_nats(&mu, &nu).unwrap();
        prop_assert!(k >= -1e-12);
        prop_assert!(d <= (k / 2.0).sqrt() + 1e-9);
        prop_assert!((kl(&mu, &nu).unwrap() * std::f64::consts::LN_2 - k).abs() < 1e-9 || k.is_infinite());
    }

    #[test]
    fn mutual_information_identities(w in prop::collection::vec(0.0f64..1.0, 12)) {
        prop_assume!(w.iter().sum::<f64>() > 1e-3);
        let total: f64 = w.iter().sum();
        let rows: Vec<Vec<f64>> = w.chunks(4).map(|r| r.iter().map(|x| x / total).collect()).collect();
        let j = JointDistribution::from_matrix(rows.clone()).unwrap();
        let px: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
        let py: Vec<f64> = (0..4).map(|c| rows.iter().map(|r| r[c]).sum()).collect();
        let flat: Vec<f64> = rows.concat();
        let h = |p: &[f64]| -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>();
        let mi = mutual_information(&j);
        prop_assert!(mi >= -1e-12);
        prop_assert!((mi - (h(&px) + h(&py) - h(&flat))).abs() < 1e-9);
        prop_assert!(mi <= h(&px).min(h(&py)) + 1e-9);
    }

    #[test]
    fn top_half_bound(w in weights(2..20)) {
        let mut w = w;
        if w.len() % 2 == 1 { w.push(0.5); }
        let r = top_half_check(&dist(&w)).unwrap();
        prop_assert!(r.bound_holds, "{:?}", r);
        prop_assert_eq!(r.set.len(), w.len() / 2);
    }
}

#[test]
fn chernoff_bound_dominates_binomial_tails() {
    let n = 100u64;
    let binom = Binomial::new(0.5, n).unwrap();
    let mut rng = Substream::root(77).rng();
    let trials = 100_000;
    let sums: Vec<i64> = (0..trials).map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).count() as i64).collect();
    for b in [5.0, 10.0, 15.0, 20.0, 25.0] {
        let bound = chernoff_bound(n, b).unwrap();
        let hits = sums.iter().filter(|&&s| ((s - 50) as f64).abs() >= b).count();
        let empirical = hits as f64 / trials as f64;
        // exact two-sided tail P(|S - 50| ≥ b)
        let lo = 50 - b as u64;
        let exact = binom.cdf(lo) + (1.0 - binom.cdf(50 + b as u64 - 1));
        assert!(exact <= bound, "b={b}: {exact} > {bound}");
        assert!(empirical <= bound + 3.0 * (bound / trials as f64).sqrt() + 1e-4, "b={b}: {empirical} > {bound}");
    }
    assert!(chernoff_bound(0, 1.0).is_err());
    assert_eq!(chernoff_bound(1, 1e-9).unwrap(), 2.0 * (-1e-18f64 / 2.0).exp());
}

#[test]
fn exact_tvd_and_top_half_over_small_denominators() {
    for den in 1..=8i64 {
        for n in [2usize, 4] {
            for c in compositions(den, n) {
                let p: Vec<Ratio<i64>> = c.iter().map(|&x| Ratio::new(x, den)).collect();
                let (mass, delta, holds) = top_half_exact(&p).unwrap();
                assert!(holds, "{p:?}");
                let u = vec![Ratio::new(1, n as i64); n];
                assert_eq!(delta, tvd_exact(&p, &u));
                assert!(mass >= Ratio::new(1, 2));
            }
        }
    }
}

#[test]
fn entropy_and_conditional_mi() {
    assert_eq!(entropy(&DiscreteDistribution::uniform(8)), 3.0);
    assert_eq!(entropy(&DiscreteDistribution::from_probs(vec![1.0, 0.0]).unwrap()), 0.0);
    // X, Y independent fair bits and Z = X xor Y: I(X;Y) = 0 but I(X;Y|Z) = 1
    let mut probs = vec![0.0; 8];
    for x in 0..2 {
        for y in 0..2 {
            probs[x * 4 + y * 2 + (x ^ y)] = 0.25;
        }
    }
    let j = MultiJoint::new(vec![2, 2, 2], probs).unwrap();
    assert!(j.conditional_mi(&[0], &[1], &[]).abs() < 1e-12);
    assert!((j.conditional_mi(&[0], &[1], &[2]) - 1.0).abs() < 1e-12);
    // collapsing Y to a constant kills all information about it
    let flat = j.map_variable(1, 1, |_| 0);
    assert!(flat.conditional_mi(&[0], &[1], &[2]).abs() < 1e-12);
}

#[test]
fn kl_infinite_off_support() {
    let mu = DiscreteDistribution::from_probs(vec![0.5, 0.5]).unwrap();
    let nu = DiscreteDistribution::from_probs(vec![1.0, 0.0]).unwrap();
    assert!(kl(&mu, &nu).unwrap().is_infinite());
    assert_eq!(kl(&nu, &mu).unwrap(), 1.0);
}

#[test]
fn randomized_suite_is_clean() {
    let r = info_props(500, 4);
    assert_eq!(r.total_failures(), 0, "{r:?}");
    assert!(r.max_chain_rule_error < 1e-9);
}
