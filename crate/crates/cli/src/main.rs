use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use reachlb::behrend::{construct_ap_free, Strategy};
use reachlb::experiments::{experiment_suite, rs_for, ExperimentConfig};
use reachlb::graph::{Graph, Vertex};
use reachlb::infometrics::{entropy, kl, kl_nats, mutual_information, top_half_check, tvd, DiscreteDistribution, JointDistribution};
use reachlb::instances::{
    sample_si, sample_st_with, sample_ur, to_stream, verify_st_stream, verify_ur_stream, Direction, E1Mode, EdgeStream,
    InstanceMeta,
};
use reachlb::protocols::{
    boost_trials, measure_internal_eps, measure_internal_eps_mc, oracle_from_tag, simulate_two_pass, BoostParams, EXACT_LIMIT,
};
use reachlb::reductions::{
    acyclicity_stream, matching_from_stream, perfect_matching_exists, maximum_matching, reach_count_stream, sssp_stream,
    BipartiteGraph,
};
use reachlb::rng::Substream;
use reachlb::rsgraph::{build_rs_digraph, verify_induced, RsDigraph};
use reachlb::streaming::{algorithm_for, run_stream, terminals, AlgorithmTag};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "reachlb", version, about = "Hard instances, protocols and verifiers for two-pass streaming reachability")]
struct Cli {
    /// Root seed; every stage draws from a named substream of it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate sets, RS digraphs and instances.
    #[command(subcommand)]
    Gen(Gen),
    /// Check a generated artifact; exit 1 on a violation.
    #[command(subcommand)]
    Verify(Verify),
    #[command(subcommand)]
    Stream(StreamCmd),
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Apply a reduction to a stream file.
    Reduce(ReduceArgs),
    /// Offline oracles on a file.
    Oracle(OracleArgs),
    /// Information measures on distributions given as JSON.
    Info(InfoArgs),
    /// Run a registered experiment: rs-verify, st-batch, boost-trials,
    /// reduction-equiv, info-props.
    Experiment(ExperimentArgs),
    /// Re-run the command recorded in a manifest and compare output hashes.
    Replay { manifest: PathBuf },
}

#[derive(Args, Debug)]
struct RsSource {
    /// Universe size of the 3-AP-free set behind the RS digraph.
    #[arg(long, default_value_t = 20)]
    m: u32,
    /// Read the RS digraph from a file instead.
    #[arg(long)]
    rs: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Gen {
    Behrend {
        #[arg(long)]
        m: u64,
        #[arg(long, default_value = "behrend-sphere")]
        strategy: String,
        #[arg(long)]
        out: PathBuf,
    },
    Rs {
        #[arg(long)]
        m: u64,
        #[arg(long, default_value = "behrend-sphere")]
        strategy: String,
        #[arg(long)]
        out: PathBuf,
    },
    Si {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        out: PathBuf,
    },
    Ur {
        #[command(flatten)]
        source: RsSource,
        #[arg(long, default_value = "forward")]
        direction: String,
        #[arg(long)]
        out: PathBuf,
    },
    St {
        #[command(flatten)]
        source: RsSource,
        /// random, complete or empty
        #[arg(long, default_value = "random")]
        e1: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    Rs { input: PathBuf },
    Ur {
        input: PathBuf,
        /// metadata file (default: <input>.meta.json)
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    St {
        input: PathBuf,
        #[arg(long)]
        meta: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Terminals {
    #[arg(long)]
    s: Option<Vertex>,
    #[arg(long)]
    t: Option<Vertex>,
}

#[derive(Subcommand, Debug)]
enum StreamCmd {
    Run {
        /// edge-count, store-all, bfs-frontier, spanning-forest, sampled-sketch
        #[arg(long)]
        alg: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        passes: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        terminals: Terminals,
    },
}

#[derive(Subcommand, Debug)]
enum ProtocolCmd {
    Boost {
        #[arg(long, default_value_t = 32)]
        m: u32,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = BoostParams::DEFAULT_GAMMA1)]
        gamma1: f64,
        #[arg(long, default_value_t = BoostParams::DEFAULT_GAMMA2)]
        gamma2: f64,
        /// silent, perfect, reveal, bias or alice-min
        #[arg(long, default_value = "reveal")]
        oracle: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    MeasureEps {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        m: u32,
        /// calibration target for reveal and bias
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Monte Carlo samples when m is too large to enumerate
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
    },
    Simulate {
        #[arg(long)]
        alg: String,
        #[arg(long)]
        instance: PathBuf,
        /// passes for bfs-frontier
        #[arg(long, default_value_t = 2)]
        passes: usize,
        #[command(flatten)]
        terminals: Terminals,
    },
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// matching, sssp, acyclic or reachcount
    kind: String,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    terminals: Terminals,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// pm (bipartite file), bfs or toposort (stream file)
    kind: String,
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    terminals: Terminals,
}

#[derive(Args, Debug)]
struct InfoArgs {
    /// tvd, kl, entropy, mi or tophalf
    kind: String,
    /// JSON: {"mu": [...], "nu": [...]}, {"p": [...]} or {"joint": [[...]]}
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    name: String,
    /// JSON descriptor; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunManifest {
    tool_version: String,
    command: Vec<String>,
    seed: u64,
    substreams: Vec<String>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    elapsed_ms: u128,
}

/// Records what a command read and wrote.
struct Run {
    argv: Vec<String>,
    seed: u64,
    substreams: Vec<String>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.insert(path.display().to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(path, &text)
    }

    fn substream(&mut self, s: &Substream) -> Substream {
        self.substreams.push(s.path.clone());
        s.clone()
    }

    fn manifest(&self, elapsed_ms: u128) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.argv.clone(),
            seed: self.seed,
            substreams: self.substreams.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            elapsed_ms,
        }
    }
}

/// Result of a command that ran to completion.
enum Status {
    Ok,
    /// the checked artifact violates an invariant
    Violation,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(value)?) {
        // a closed pipe (`| head`) is not an error worth reporting
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_rs(run: &mut Run, source: &RsSource) -> Result<RsDigraph> {
    match &source.rs {
        Some(path) => {
            let rs = RsDigraph::from_text(&run.read(path)?)?;
            let report = verify_induced(&rs);
            if !report.passed {
                bail!("{} is not a valid RS digraph: {report}", path.display());
            }
            Ok(rs)
        }
        None => Ok(rs_for(source.m)?),
    }
}

fn load_stream(run: &mut Run, path: &Path) -> Result<EdgeStream> {
    let stream = EdgeStream::from_text(&run.read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    stream.check()?;
    Ok(stream)
}

fn load_meta(run: &mut Run, input: &Path, meta: &Option<PathBuf>) -> Result<InstanceMeta> {
    let path = meta.clone().unwrap_or_else(|| sidecar(input, ".meta.json"));
    serde_json::from_str(&run.read(&path)?).with_context(|| format!("parsing {}", path.display()))
}

fn pick_terminals(stream: &EdgeStream, t: &Terminals) -> (Vertex, Vertex) {
    let (s0, t0) = terminals(stream);
    (t.s.unwrap_or(s0), t.t.unwrap_or(t0))
}

fn gen(run: &mut Run, cmd: Gen) -> Result<Status> {
    let root = Substream::root(run.seed);
    match cmd {
        Gen::Behrend { m, strategy, out } => {
            let set = construct_ap_free(m, strategy.parse::<Strategy>()?)?;
            run.write_json(&out, &set)?;
        }
        Gen::Rs { m, strategy, out } => {
            let set = construct_ap_free(m, strategy.parse::<Strategy>()?)?;
            run.write(&out, &build_rs_digraph(&set)?.to_text())?;
        }
        Gen::Si { m, out } => {
            let source = run.substream(&root.child("si"));
            let inst = sample_si(m, &mut source.rng())?;
            run.write_json(&out, &inst)?;
        }
        Gen::Ur { source, direction, out } => {
            let rs = load_rs(run, &source)?;
            let direction = match direction.as_str() {
                "forward" => Direction::Forward,
                "inverse" => Direction::Inverse,
                other => bail!("unknown direction `{other}` (forward or inverse)"),
            };
            let src = run.substream(&root.child("ur"));
            let inst = sample_ur(&rs, direction, &src)?;
            run.substream(&root.child("order"));
            run.write(&out, &to_stream(&inst, run.seed).to_text())?;
            run.write_json(&sidecar(&out, ".meta.json"), &InstanceMeta::for_ur(&inst))?;
        }
        Gen::St { source, e1, out } => {
            let rs = load_rs(run, &source)?;
            let mode = match e1.as_str() {
                "random" => E1Mode::Random,
                "complete" => E1Mode::Complete,
                "empty" => E1Mode::Empty,
                other => bail!("unknown E1 mode `{other}` (random, complete or empty)"),
            };
            let src = run.substream(&root.child("st"));
            let inst = sample_st_with(&rs, &src, mode)?;
            run.substream(&root.child("order"));
            run.write(&out, &to_stream(&inst, run.seed).to_text())?;
            run.write_json(&sidecar(&out, ".meta.json"), &InstanceMeta::for_st(&inst))?;
        }
    }
    Ok(Status::Ok)
}

fn report_status(report: &reachlb::report::Report) -> Result<Status> {
    print_json(report)?;
    Ok(if report.passed { Status::Ok } else { Status::Violation })
}

fn verify(run: &mut Run, cmd: Verify) -> Result<Status> {
    match cmd {
        Verify::Rs { input } => {
            let rs = RsDigraph::from_text(&run.read(&input)?)?;
            report_status(&verify_induced(&rs))
        }
        Verify::Ur { input, meta } => {
            let stream = load_stream(run, &input)?;
            let meta = load_meta(run, &input, &meta)?;
            report_status(&verify_ur_stream(&stream, &meta))
        }
        Verify::St { input, meta } => {
            let stream = load_stream(run, &input)?;
            let meta = load_meta(run, &input, &meta)?;
            report_status(&verify_st_stream(&stream, &meta))
        }
    }
}

fn stream_cmd(run: &mut Run, cmd: StreamCmd) -> Result<Status> {
    let StreamCmd::Run {
        alg,
        input,
        passes,
        report,
        terminals,
    } = cmd;
    let stream = load_stream(run, &input)?;
    let (s, t) = pick_terminals(&stream, &terminals);
    let mut alg = algorithm_for(alg.parse::<AlgorithmTag>()?, s, t, passes, run.seed);
    let result = run_stream(alg.as_mut(), &stream, passes)?;
    match report {
        Some(path) => run.write_json(&path, &result)?,
        None => print_json(&result)?,
    }
    Ok(Status::Ok)
}

fn protocol(run: &mut Run, cmd: ProtocolCmd) -> Result<Status> {
    match cmd {
        ProtocolCmd::Boost {
            m,
            eps,
            gamma1,
            gamma2,
            oracle,
            trials,
            out,
        } => {
            let params = BoostParams::new(eps, gamma1, gamma2)?;
            let oracle = oracle_from_tag(&oracle, eps)?;
            let src = run.substream(&Substream::root(run.seed));
            let summary = boost_trials(&oracle, m, &params, trials, &src)?;
            match out {
                Some(path) => run.write_json(&path, &summary)?,
                None => print_json(&summary)?,
            }
        }
        ProtocolCmd::MeasureEps { oracle, m, eps, samples } => {
            let oracle = oracle_from_tag(&oracle, eps)?;
            let measured = if m <= EXACT_LIMIT {
                measure_internal_eps(&oracle, m)?
            } else {
                let src = run.substream(&Substream::root(run.seed).child("measure"));
                measure_internal_eps_mc(&oracle, m, samples, &src)?
            };
            print_json(&json!({ "oracle": oracle, "measurement": measured }))?;
        }
        ProtocolCmd::Simulate {
            alg,
            instance,
            passes,
            terminals,
        } => {
            let stream = load_stream(run, &instance)?;
            let (s, t) = pick_terminals(&stream, &terminals);
            let alg = algorithm_for(alg.parse::<AlgorithmTag>()?, s, t, passes, run.seed);
            let sim = simulate_two_pass(alg.as_ref(), &stream)?;
            let direct = run_stream(alg.box_clone().as_mut(), &stream, alg.passes())?;
            let messages: Vec<_> = sim
                .transcript
                .messages
                .iter()
                .map(|m| json!({ "label": m.label, "sender": m.sender, "bits": m.bits.len() }))
                .collect();
            let exact = sim.output == direct.output;
            print_json(&json!({
                "algorithm": alg.tag(),
                "messages": messages,
                "total_bits": sim.transcript.total_bits(),
                "output": sim.output,
                "direct_output": direct.output,
                "max_state_bits": direct.max_state_bits,
                "exact": exact,
            }))?;
            if !exact {
                return Ok(Status::Violation);
            }
        }
    }
    Ok(Status::Ok)
}

fn reduce(run: &mut Run, args: ReduceArgs) -> Result<Status> {
    let stream = load_stream(run, &args.input)?;
    let (s, t) = pick_terminals(&stream, &args.terminals);
    match args.kind.as_str() {
        "matching" => {
            let red = matching_from_stream(&stream, s, t)?;
            run.write(&args.out, &red.graph.to_text())?;
            print_json(&json!({ "left": red.graph.left, "right": red.graph.right, "edges": red.graph.edges.len(), "dropped": red.dropped }))?;
        }
        "sssp" => run.write(&args.out, &sssp_stream(&stream).to_text())?,
        "acyclic" => {
            if !stream.to_graph().is_acyclic() {
                bail!("input already contains a cycle");
            }
            run.write(&args.out, &acyclicity_stream(&stream, s, t).to_text())?
        }
        "reachcount" => run.write(&args.out, &reach_count_stream(&stream, t).to_text())?,
        other => bail!("unknown reduction `{other}` (matching, sssp, acyclic, reachcount)"),
    }
    Ok(Status::Ok)
}

fn oracle(run: &mut Run, args: OracleArgs) -> Result<Status> {
    match args.kind.as_str() {
        "pm" => {
            let g = BipartiteGraph::from_text(&run.read(&args.input)?)?;
            let matched = maximum_matching(&g).iter().filter(|p| p.is_some()).count();
            print_json(&json!({ "perfect_matching": perfect_matching_exists(&g), "matched": matched }))?;
        }
        "bfs" => {
            let stream = load_stream(run, &args.input)?;
            let (s, t) = pick_terminals(&stream, &args.terminals);
            let g = stream.to_graph();
            print_json(&json!({ "s": s, "t": t, "reachable": g.reaches(s, t), "distance": g.distance(s, t) }))?;
        }
        "toposort" => {
            let stream = load_stream(run, &args.input)?;
            let g: Graph = stream.to_graph();
            let order = g.topological_order();
            print_json(&json!({ "acyclic": order.is_some(), "order": order }))?;
        }
        other => bail!("unknown oracle `{other}` (pm, bfs, toposort)"),
    }
    Ok(Status::Ok)
}

#[derive(Deserialize)]
struct InfoInput {
    mu: Option<Vec<f64>>,
    nu: Option<Vec<f64>>,
    p: Option<Vec<f64>>,
    joint: Option<Vec<Vec<f64>>>,
    support: Option<Vec<String>>,
}

fn distribution(probs: Option<Vec<f64>>, support: &Option<Vec<String>>, name: &str) -> Result<DiscreteDistribution> {
    let probs = probs.ok_or_else(|| anyhow!("input lacks `{name}`"))?;
    Ok(match support {
        Some(labels) => DiscreteDistribution::new(labels.clone(), probs)?,
        None => DiscreteDistribution::from_probs(probs)?,
    })
}

fn info(run: &mut Run, args: InfoArgs) -> Result<Status> {
    let input: InfoInput = serde_json::from_str(&run.read(&args.input)?).context("parsing distribution JSON")?;
    let value = match args.kind.as_str() {
        "tvd" | "kl" => {
            let mu = distribution(input.mu, &input.support, "mu")?;
            let nu = distribution(input.nu, &input.support, "nu")?;
            if args.kind == "tvd" {
                json!({ "tvd": tvd(&mu, &nu)? })
            } else {
                let (bits, nats) = (kl(&mu, &nu)?, kl_nats(&mu, &nu)?);
                json!({ "kl_bits": if bits.is_finite() { json!(bits) } else { json!("inf") },
                        "kl_nats": if nats.is_finite() { json!(nats) } else { json!("inf") } })
            }
        }
        "entropy" => json!({ "entropy_bits": entropy(&distribution(input.p, &input.support, "p")?) }),
        "mi" => {
            let joint = JointDistribution::from_matrix(input.joint.ok_or_else(|| anyhow!("input lacks `joint`"))?)?;
            json!({ "mutual_information_bits": mutual_information(&joint) })
        }
        "tophalf" => serde_json::to_value(top_half_check(&distribution(input.p, &input.support, "p")?)?)?,
        other => bail!("unknown measure `{other}` (tvd, kl, entropy, mi, tophalf)"),
    };
    print_json(&value)?;
    Ok(Status::Ok)
}

fn experiment(run: &mut Run, args: ExperimentArgs) -> Result<Status> {
    let mut config = match &args.config {
        Some(path) => run.read(path)?.parse::<ExperimentConfig>()?,
        None => ExperimentConfig::default(),
    };
    config.seed = run.seed;
    if let Some(m) = args.m {
        config.m = m;
    }
    if let Some(c) = args.count {
        config.count = c;
    }
    if let Some(e) = args.eps {
        config.eps = e;
    }
    if let Some(o) = args.oracle {
        config.oracle = o;
    }
    let report = experiment_suite(&args.name, &config)?;
    let value = json!({ "experiment": args.name, "config": config, "report": report });
    match args.out {
        Some(path) => run.write_json(&path, &value)?,
        None => print_json(&value)?,
    }
    Ok(Status::Ok)
}

fn replay(path: &Path) -> Result<Status> {
    let manifest: RunManifest = serde_json::from_str(&std::fs::read_to_string(path)?).context("parsing manifest")?;
    let cli = Cli::try_parse_from(&manifest.command)?;
    let (_, rerun) = execute(cli, manifest.command.clone())?;
    let mut same = true;
    for (out, hash) in &manifest.outputs {
        let now = rerun.outputs.get(out);
        let ok = now == Some(hash);
        same &= ok;
        println!("{} {out}", if ok { "same" } else { "DIFFERENT" });
    }
    Ok(if same { Status::Ok } else { Status::Violation })
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<(Status, Run)> {
    let mut run = Run {
        argv,
        seed: cli.seed,
        substreams: Vec::new(),
        inputs: BTreeMap::new(),
        outputs: BTreeMap::new(),
    };
    let status = match cli.command {
        Command::Gen(cmd) => gen(&mut run, cmd)?,
        Command::Verify(cmd) => verify(&mut run, cmd)?,
        Command::Stream(cmd) => stream_cmd(&mut run, cmd)?,
        Command::Protocol(cmd) => protocol(&mut run, cmd)?,
        Command::Reduce(args) => reduce(&mut run, args)?,
        Command::Oracle(args) => oracle(&mut run, args)?,
        Command::Info(args) => info(&mut run, args)?,
        Command::Experiment(args) => experiment(&mut run, args)?,
        Command::Replay { manifest } => return Ok((replay(&manifest)?, run)),
    };
    Ok((status, run))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    match execute(cli, argv) {
        Ok((status, run)) => {
            if let Some(first) = run.outputs.keys().next() {
                let manifest = run.manifest(start.elapsed().as_millis());
                let path = sidecar(Path::new(first), ".manifest.json");
                let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            match status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Violation => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
