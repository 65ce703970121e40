//! Seeded batch experiments with machine-readable reports.

use crate::behrend::{construct_ap_free, Strategy};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::infometrics::{
    kl_nats, top_half_check, top_half_exact, tvd, tvd_exact, DiscreteDistribution, MultiJoint,
};
use crate::instances::{sample_st, verify_st_instance};
use crate::protocols::{boost_trials, oracle_from_tag, BoostParams, BoostSummary};
use crate::reductions::{perfect_matching_exists, reach_count, reduce_to_acyclicity, reduce_to_matching, reduce_to_reach_count, reduce_to_sssp};
use crate::rng::Substream;
use crate::rsgraph::{build_rs_digraph, verify_induced, RsDigraph};
use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::time::Instant;

pub const EXPERIMENTS: [&str; 5] = ["rs-verify", "st-batch", "boost-trials", "reduction-equiv", "info-props"];

/// Knobs shared by all experiments; each uses the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// universe size for the 3-AP-free set or the intersection instance
    pub m: u32,
    pub count: usize,
    pub eps: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub oracle: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            m: 100,
            count: 1000,
            eps: 0.5,
            gamma1: BoostParams::DEFAULT_GAMMA1,
            gamma2: BoostParams::DEFAULT_GAMMA2,
            oracle: "reveal".into(),
        }
    }
}

pub fn experiment_suite(name: &str, config: &ExperimentConfig) -> Result<serde_json::Value> {
    let value = match name {
        "rs-verify" => serde_json::to_value(rs_verify(config.m)?),
        "st-batch" => serde_json::to_value(st_batch(config.m, config.count, config.seed)?),
        "boost-trials" => {
            let params = BoostParams::new(config.eps, config.gamma1, config.gamma2)?;
            let oracle = oracle_from_tag(&config.oracle, config.eps)?;
            serde_json::to_value(boost_trials(&oracle, config.m, &params, config.count, &Substream::root(config.seed))?)
        }
        "reduction-equiv" => serde_json::to_value(reduction_equiv(config.m, config.count, config.seed)?),
        "info-props" => serde_json::to_value(info_props(config.count, config.seed)),
        other => {
            return Err(Error::Unknown {
                kind: "experiment",
                name: other.into(),
            })
        }
    };
    value.map_err(|e| Error::Invariant(e.to_string()))
}

/// The RS digraph built from the sphere construction at `m`.
pub fn rs_for(m: u32) -> Result<RsDigraph> {
    build_rs_digraph(&construct_ap_free(m as u64, Strategy::BehrendSphere)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsVerifyReport {
    pub m: u32,
    pub n_side: u32,
    pub r: usize,
    pub matchings_checked: usize,
    pub violations: usize,
    pub failure: Option<String>,
    pub seconds: f64,
}

pub fn rs_verify(m: u32) -> Result<RsVerifyReport> {
    let start = Instant::now();
    let rs = rs_for(m)?;
    let report = verify_induced(&rs);
    Ok(RsVerifyReport {
        m,
        n_side: rs.n_side,
        r: rs.r,
        matchings_checked: rs.t,
        violations: usize::from(!report.passed),
        failure: report.failure,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StBatchReport {
    pub m: u32,
    pub count: usize,
    pub reachable: usize,
    pub reachable_rate: f64,
    /// instances failing the full structural verifier
    pub verify_failures: usize,
    /// reachable flag differing from `(s*, t*) ∈ E1`
    pub flag_mismatches: usize,
    /// undirected `s`-`t` distance: 7 when reachable, at least 9 otherwise
    pub distance_violations: usize,
    pub distance_eight: usize,
    pub min_unreachable_distance: Option<usize>,
    pub first_failure: Option<String>,
}

/// Instance `i` uses substream `instance/<i>` of `seed`.
pub fn st_batch(m: u32, count: usize, seed: u64) -> Result<StBatchReport> {
    let rs = rs_for(m)?;
    let root = Substream::root(seed);
    struct One {
        reachable: bool,
        verified: Option<String>,
        flag_ok: bool,
        distance: Option<usize>,
    }
    let results: Vec<One> = (0..count)
        .into_par_iter()
        .map(|i| {
            let inst = sample_st(&rs, &root.indexed("instance", i))?;
            let report = verify_st_instance(&inst);
            let flag_ok = inst.reachable == inst.e1.contains(&(inst.s_star, inst.t_star));
            let distance = reduce_to_sssp(&inst.graph()).distance(inst.layout.s(), inst.layout.t());
            Ok(One {
                reachable: inst.reachable,
                verified: report.failure,
                flag_ok,
                distance,
            })
        })
        .collect::<Result<_>>()?;
    let reachable = results.iter().filter(|o| o.reachable).count();
    let bad_distance = |o: &One| match (o.reachable, o.distance) {
        (true, d) => d != Some(7),
        (false, Some(d)) => d < 9,
        (false, None) => false,
    };
    Ok(StBatchReport {
        m,
        count,
        reachable,
        reachable_rate: reachable as f64 / count.max(1) as f64,
        verify_failures: results.iter().filter(|o| o.verified.is_some()).count(),
        flag_mismatches: results.iter().filter(|o| !o.flag_ok).count(),
        distance_violations: results.iter().filter(|o| bad_distance(o)).count(),
        distance_eight: results.iter().filter(|o| o.distance == Some(8)).count(),
        min_unreachable_distance: results.iter().filter(|o| !o.reachable).filter_map(|o| o.distance).min(),
        first_failure: results.iter().find_map(|o| o.verified.clone()),
    })
}

pub fn boost_experiment(oracle: &str, m: u32, params: &BoostParams, trials: usize, seed: u64) -> Result<BoostSummary> {
    let oracle = oracle_from_tag(oracle, params.eps)?;
    boost_trials(&oracle, m, params, trials, &Substream::root(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// digraphs on four vertices checked for reachability ⟺ perfect matching
    pub matching_graphs: usize,
    pub matching_exceptions: usize,
    pub st_instances: usize,
    pub acyclicity_exceptions: usize,
    pub reach_count_exceptions: usize,
    pub matching_st_exceptions: usize,
}

/// Every digraph on `{0, 1, 2, 3}` without self-loops, with `s = 0` and
/// `t = 3`, as the bits of `mask` over the 12 ordered pairs.
pub fn four_vertex_digraphs() -> impl Iterator<Item = Graph> {
    let pairs: Vec<Edge> = (0..4u32).flat_map(|u| (0..4u32).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len()).map(move |mask| {
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        Graph::directed(4, edges)
    })
}

pub fn reduction_equiv(m: u32, st_count: usize, seed: u64) -> Result<ReductionReport> {
    let mut matching_graphs = 0;
    let mut matching_exceptions = 0;
    for h in four_vertex_digraphs() {
        matching_graphs += 1;
        let pm = perfect_matching_exists(&reduce_to_matching(&h, 0, 3)?.graph);
        if pm != h.reaches(0, 3) {
            matching_exceptions += 1;
        }
    }
    let rs = rs_for(m)?;
    let root = Substream::root(seed);
    let flags: Vec<[bool; 3]> = (0..st_count)
        .into_par_iter()
        .map(|i| {
            let inst = sample_st(&rs, &root.indexed("instance", i))?;
            let h = inst.graph();
            let (s, t) = (inst.layout.s(), inst.layout.t());
            let reach = h.reaches(s, t);
            let acyclic = reduce_to_acyclicity(&h, s, t)?.is_acyclic();
            let count = reach_count(&reduce_to_reach_count(&h, t), s);
            let count_ok = if reach { count >= 2 * h.n } else { count <= h.n };
            let pm = perfect_matching_exists(&reduce_to_matching(&h, s, t)?.graph);
            Ok([acyclic == !reach, count_ok, pm == reach])
        })
        .collect::<Result<_>>()?;
    let bad = |k: usize| flags.iter().filter(|f| !f[k]).count();
    Ok(ReductionReport {
        matching_graphs,
        matching_exceptions,
        st_instances: st_count,
        acyclicity_exceptions: bad(0),
        reach_count_exceptions: bad(1),
        matching_st_exceptions: bad(2),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InfoPropsReport {
    pub cases: usize,
    pub pinsker_failures: usize,
    pub chain_rule_failures: usize,
    pub data_processing_failures: usize,
    pub bounded_function_failures: usize,
    pub top_half_failures: usize,
    pub top_half_exact_failures: usize,
    pub top_half_exhaustive_cases: usize,
    pub top_half_exhaustive_failures: usize,
    pub tvd_metric_failures: usize,
    pub max_chain_rule_error: f64,
}

impl InfoPropsReport {
    pub fn total_failures(&self) -> usize {
        self.pinsker_failures
            + self.chain_rule_failures
            + self.data_processing_failures
            + self.bounded_function_failures
            + self.top_half_failures
            + self.top_half_exact_failures
            + self.top_half_exhaustive_failures
            + self.tvd_metric_failures
    }
}

pub const INFO_TOLERANCE: f64 = 1e-9;

/// A random probability vector; about one in four draws has forced zeros.
pub fn random_probs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let sparse = rng.gen_bool(0.25);
    let mut w: Vec<f64> = (0..n)
        .map(|_| if sparse && rng.gen_bool(0.3) { 0.0 } else { -rng.gen::<f64>().max(1e-300).ln() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// A random rational probability vector with denominator `den`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, n: usize, den: i64) -> Vec<Ratio<i64>> {
    let mut cuts: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(0..=den)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(n);
    for c in cuts.into_iter().chain([den]) {
        out.push(Ratio::new(c - prev, den));
        prev = c;
    }
    out
}

/// Every way of writing `den` as an ordered sum of `n` non-negative parts.
pub fn compositions(den: i64, n: usize) -> Vec<Vec<i64>> {
    if n == 1 {
        return vec![vec![den]];
    }
    (0..=den)
        .flat_map(|first| {
            compositions(den - first, n - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn dist(p: Vec<f64>) -> DiscreteDistribution {
    DiscreteDistribution::from_probs(p).expect("generated probabilities are valid")
}

/// Randomized checks of the standard information inequalities, `cases`
/// of each, plus the top-half bound over every rational distribution with
/// denominator at most 8 on supports of size 2 and 4.
pub fn info_props(cases: usize, seed: u64) -> InfoPropsReport {
    let root = Substream::root(seed);
    let mut rep = InfoPropsReport {
        cases,
        ..Default::default()
    };
    let mut rng = root.child("pinsker").rng();
    for _ in 0..cases {
        let n = rng.gen_range(2..=16);
        let (mu, nu) = (dist(random_probs(&mut rng, n)), dist(random_probs(&mut rng, n)));
        let d = tvd(&mu, &nu).unwrap();
        if d > (kl_nats(&mu, &nu).unwrap() / 2.0).sqrt() + INFO_TOLERANCE {
            rep.pinsker_failures += 1;
        }
    }
    let mut rng = root.child("metric").rng();
    for _ in 0..cases {
        let n = rng.gen_range(2..=12);
        let [a, b, c] = [0, 1, 2].map(|_| dist(random_probs(&mut rng, n)));
        let (ab, ba, bc, ac) = (tvd(&a, &b).unwrap(), tvd(&b, &a).unwrap(), tvd(&b, &c).unwrap(), tvd(&a, &c).unwrap());
        if ab != ba || ac > ab + bc + INFO_TOLERANCE || !(0.0..=1.0 + INFO_TOLERANCE).contains(&ab) {
            rep.tvd_metric_failures += 1;
        }
    }
    let mut rng = root.child("chain").rng();
    for _ in 0..cases {
        let shape: Vec<usize> = (0..4).map(|_| rng.gen_range(2..=3)).collect();
        let j = MultiJoint::new(shape.clone(), random_probs(&mut rng, shape.iter().product())).unwrap();
        let (a, b, c, d) = (0, 1, 2, 3);
        let lhs = j.conditional_mi(&[a, b], &[c], &[d]);
        let rhs = j.conditional_mi(&[a], &[c], &[d]) + j.conditional_mi(&[b], &[c], &[a, d]);
        let err = (lhs - rhs).abs();
        rep.max_chain_rule_error = rep.max_chain_rule_error.max(err);
        if err > INFO_TOLERANCE {
            rep.chain_rule_failures += 1;
        }
    }
    let mut rng = root.child("processing").rng();
    for _ in 0..cases {
        let shape = vec![rng.gen_range(2..=5), rng.gen_range(2..=5)];
        let j = MultiJoint::new(shape.clone(), random_probs(&mut rng, shape[0] * shape[1])).unwrap();
        let range = rng.gen_range(1..=shape[0]);
        let f: Vec<usize> = (0..shape[0]).map(|_| rng.gen_range(0..range)).collect();
        let before = j.conditional_mi(&[0], &[1], &[]);
        let after = j.map_variable(0, range, |x| f[x]).conditional_mi(&[0], &[1], &[]);
        if after > before + INFO_TOLERANCE {
            rep.data_processing_failures += 1;
        }
    }
    let mut rng = root.child("bounded").rng();
    for _ in 0..cases {
        let n = rng.gen_range(2..=8);
        let den = rng.gen_range(1..=24);
        let (mu, nu) = (random_rational(&mut rng, n, den), random_rational(&mut rng, n, den));
        let f: Vec<Ratio<i64>> = (0..n).map(|_| Ratio::from_integer(rng.gen_range(0..=20))).collect();
        let expect = |p: &[Ratio<i64>]| p.iter().zip(&f).map(|(a, b)| a * b).sum::<Ratio<i64>>();
        let max_f = f.iter().max().copied().unwrap();
        if expect(&mu) > expect(&nu) + tvd_exact(&mu, &nu) * max_f {
            rep.bounded_function_failures += 1;
        }
    }
    let mut rng = root.child("top-half").rng();
    for _ in 0..cases {
        let n = 2 * rng.gen_range(1..=8);
        if !top_half_check(&dist(random_probs(&mut rng, n))).unwrap().bound_holds {
            rep.top_half_failures += 1;
        }
        let den = rng.gen_range(1..=30);
        if !top_half_exact(&random_rational(&mut rng, n, den)).unwrap().2 {
            rep.top_half_exact_failures += 1;
        }
    }
    for n in [2, 4] {
        for den in 1..=8 {
            for parts in compositions(den, n) {
                rep.top_half_exhaustive_cases += 1;
                let probs: Vec<Ratio<i64>> = parts.iter().map(|&k| Ratio::new(k, den)).collect();
                if !top_half_exact(&probs).unwrap().2 {
                    rep.top_half_exhaustive_failures += 1;
                }
            }
        }
    }
    rep
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    /// Parses a JSON descriptor; missing fields take their defaults.
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
