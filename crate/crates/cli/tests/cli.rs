use std::path::Path;
use std::process::{Command, Output};

fn reachlb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reachlb")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn gen_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a.txt", "b.txt"] {
        assert_eq!(code(&reachlb(d, &["gen", "st", "--seed", "7", "--m", "20", "--out", out])), 0);
    }
    let read = |f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(read("a.txt"), read("b.txt"));
    assert_eq!(read("a.txt.meta.json"), read("b.txt.meta.json"));
    reachlb(d, &["gen", "st", "--seed", "8", "--m", "20", "--out", "c.txt"]);
    assert_ne!(read("a.txt"), read("c.txt"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reachlb(d, &["gen", "st", "--seed", "3", "--out", "st.txt"]);
    let ok = reachlb(d, &["verify", "st", "st.txt"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(json(&ok)["passed"], true);

    // flip the stored reachable flag
    let meta_path = d.join("st.txt.meta.json");
    let mut meta: serde_json::Value = serde_json::from_slice(&std::fs::read(&meta_path).unwrap()).unwrap();
    let flag = meta["reachable"].as_bool().unwrap();
    meta["reachable"] = serde_json::Value::Bool(!flag);
    std::fs::write(&meta_path, meta.to_string()).unwrap();
    let bad = reachlb(d, &["verify", "st", "st.txt"]);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["passed"], false);

    reachlb(d, &["gen", "ur", "--direction", "inverse", "--out", "ur.txt"]);
    assert_eq!(code(&reachlb(d, &["verify", "ur", "ur.txt"])), 0);
    reachlb(d, &["gen", "rs", "--m", "20", "--out", "rs.txt"]);
    assert_eq!(code(&reachlb(d, &["verify", "rs", "rs.txt"])), 0);
    assert_eq!(code(&reachlb(d, &["verify", "st", "missing.txt"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&reachlb(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&reachlb(dir.path(), &["gen", "st", "--e1", "sometimes", "--out", "x"])), 2);
    assert_eq!(code(&reachlb(dir.path(), &["experiment", "no-such-thing"])), 2);
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&reachlb(d, &["gen", "si", "--seed", "5", "--m", "16", "--out", "si.txt"])), 0);
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("si.txt.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert!(!manifest["outputs"].as_object().unwrap().is_empty());
    let replay = reachlb(d, &["replay", "si.txt.manifest.json"]);
    assert_eq!(code(&replay), 0, "{}", String::from_utf8_lossy(&replay.stderr));
    std::fs::write(d.join("si.txt"), "tampered").unwrap();
    // replay regenerates the file, so the hash matches again
    assert_eq!(code(&reachlb(d, &["replay", "si.txt.manifest.json"])), 0);
}

#[test]
fn stream_reduce_and_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reachlb(d, &["gen", "st", "--seed", "2", "--e1", "complete", "--out", "st.txt"]);
    let run = reachlb(d, &["stream", "run", "--alg", "store-all", "--input", "st.txt", "--passes", "1"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(json(&run)["output"], "yes");

    let sim = reachlb(d, &["protocol", "simulate", "--alg", "bfs-frontier", "--instance", "st.txt"]);
    assert_eq!(code(&sim), 0, "{}", String::from_utf8_lossy(&sim.stderr));

    assert_eq!(code(&reachlb(d, &["reduce", "matching", "--input", "st.txt", "--out", "m.txt"])), 0);
    let pm = reachlb(d, &["oracle", "pm", "--input", "m.txt"]);
    assert_eq!(json(&pm)["perfect_matching"], true);
    let bfs = reachlb(d, &["oracle", "bfs", "--input", "st.txt"]);
    assert_eq!(json(&bfs)["distance"], 7);

    std::fs::write(d.join("d.json"), r#"{"mu": [0.5, 0.5], "nu": [0.9, 0.1]}"#).unwrap();
    let tvd = reachlb(d, &["info", "tvd", "--input", "d.json"]);
    assert!((json(&tvd)["tvd"].as_f64().unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn experiment_reports_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = reachlb(d, &["experiment", "st-batch", "--m", "20", "--count", "30", "--out", "b.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("b.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["count"], 30);
    assert_eq!(report["report"]["flag_mismatches"], 0);
}
