//! End-to-end runs of the `sda` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const WORKED_PI: &str = "A shareholder, may transfer its Shares only with the prior written consent of the Company.";

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn sda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sda")).args(args).output().unwrap()
}

fn sda_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sda"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let o = sda(&[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn unknown_flag_and_bad_method_are_usage_errors() {
    let conllu = fixture("worked_example.conllu");
    let o = sda(&["stats", "--method", "pi", "--in", p(&conllu), "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = sda(&["stats", "--method", "xyz", "--in", p(&conllu)]);
    assert_eq!(o.status.code(), Some(1));
    let o = sda(&["stats", "--method", "mask", "--in", p(&conllu)]);
    assert_eq!(o.status.code(), Some(1), "mask without a rate");
}

#[test]
fn augment_worked_example_with_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs.jsonl");
    let o = sda(&["augment", "--method", "pi", "--in", p(&fixture("worked_example.conllu")), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed: 42"));
    let line = fs::read_to_string(&out).unwrap();
    let pair: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(pair["positive"], WORKED_PI);
    assert_eq!(pair["method"], "pi");
    assert_eq!(pair["changed"], true);
}

#[test]
fn augment_with_custom_lexicons() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pairs.jsonl");
    let (conllu, lexicon) = (fixture("worked_example.conllu"), fixture("lexicons/aux.tsv"));
    let args = [
        "augment",
        "--method",
        "aa",
        "--in",
        p(&conllu),
        "--out",
        p(&out),
        "--aux-lexicon",
        p(&lexicon),
    ];
    let o = sda(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().contains("A shareholder needs to transfer"));

    let o = sda(&[
        "augment",
        "--method",
        "syn",
        "--in",
        p(&fixture("period_terminated.conllu")),
        "--out",
        p(&out),
        "--syn-lexicon",
        p(&fixture("lexicons/synonyms.tsv")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn stats_on_single_site_corpus() {
    let o = sda(&["stats", "--method", "dn", "--in", p(&fixture("single_site.conllu")), "--seed", "5"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["percent"], 0.0);
    assert_eq!(report["total"], 6);
    assert!(stderr(&o).contains("seed: 5"));
}

#[test]
fn data_errors_name_the_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    let o = sda(&["augment", "--method", "pi", "--in", "/no/such/file.conllu", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/file.conllu"));

    let bad = dir.path().join("bad.conllu");
    fs::write(&bad, "1\tA\ta\tDET\t_\t_\t0\troot\t_\t_\n\n1\tB\n").unwrap();
    let o = sda(&["augment", "--method", "pi", "--in", p(&bad), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.conllu: line 3"), "{}", stderr(&o));
    assert!(!out.exists());
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "epochs = 3\nbatch_size = 4\ndim = 16\nseed = 9\n");
    let (ckpt, trace) = (dir.path().join("enc.json"), dir.path().join("trace.csv"));
    let corpus = fixture("period_terminated.conllu");
    let o = sda(&["train", "--config", p(&cfg), "--corpus", p(&corpus), "--out", p(&ckpt), "--trace", p(&trace)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed: 9"));
    let trace_text = fs::read_to_string(&trace).unwrap();
    assert!(trace_text.starts_with("step,loss\n1,"));
    assert_eq!(trace_text.lines().count(), 1 + 3 * 2);

    let o = sda(&["eval", "--ckpt", p(&ckpt), "--sts", p(&fixture("sts_sample.tsv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let printed = stdout(&o);
    let value = printed.trim();
    let decimals = value.split('.').nth(1).unwrap();
    assert_eq!(decimals.len(), 4, "{value}");
    assert!((-1.0..=1.0).contains(&value.parse::<f64>().unwrap()));
}

#[test]
fn eval_rejects_a_broken_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("enc.json");
    fs::write(&ckpt, "{\"format\": 3}").unwrap();
    let o = sda(&["eval", "--ckpt", p(&ckpt), "--sts", p(&fixture("sts_sample.tsv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gradcheck_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), "dim = 8\nbatch_size = 6\ncheck_samples = 30\n");
    assert_eq!(sda(&["gradcheck", "--config", p(&ok)]).status.code(), Some(0));

    // A tolerance below rounding noise cannot be met.
    let strict = write_config(dir.path(), "dim = 8\nbatch_size = 6\ntolerance = 1e-14\n");
    assert_eq!(sda(&["gradcheck", "--config", p(&strict)]).status.code(), Some(3));

    let bad = write_config(dir.path(), "dim = 8\nwarmup = 2\n");
    let o = sda(&["gradcheck", "--config", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn config_paths_resolve_against_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("period_terminated.conllu"), dir.path().join("corpus.conllu")).unwrap();
    let cfg = write_config(dir.path(), "dim = 6\nbatch_size = 4\ncorpus = corpus.conllu\nmethod = dn\n");
    let o = Command::new(env!("CARGO_BIN_EXE_sda"))
        .args(["gradcheck", "--config", p(&cfg)])
        .current_dir("/")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    let corpus = fixture("period_terminated.conllu");
    let args = |out: &Path| {
        vec![
            "augment".to_owned(),
            "--method".into(),
            "randpunct".into(),
            "--in".into(),
            p(&corpus).into(),
            "--out".into(),
            p(out).into(),
        ]
    };
    let run = |out: &Path, threads: &str| {
        let args = args(out);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        sda_env(&args, "SDA_THREADS", threads)
    };
    assert!(run(&a, "1").status.success());
    assert!(run(&b, "4").status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(run(&a, "0").status.code(), Some(1));
}
