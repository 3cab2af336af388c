use std::path::Path;
use std::process::{Command, Output};

const PRC: &str = env!("CARGO_BIN_EXE_prc");
const WATERMARK: &str = env!("CARGO_BIN_EXE_watermark");

fn run(bin: &str, dir: &Path, args: &[&str]) -> Output {
    Command::new(bin)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(bin: &str, dir: &Path, args: &[&str]) -> String {
    let out = run(bin, dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const WEAKXOR: &str = r#"{"n": 32, "m": 64, "t": 2, "eta": 0.02, "keys": 2}"#;

#[test]
fn encode_corrupt_decode_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "params.json", WEAKXOR);
    ok(
        PRC,
        d,
        &[
            "keygen",
            "--scheme",
            "weakxor",
            "--params",
            "params.json",
            "--seed",
            "3",
            "--out",
            "key.json",
        ],
    );
    ok(
        PRC,
        d,
        &[
            "encode", "--key", "key.json", "--trials", "50", "--seed", "4", "--out", "cw.jsonl",
        ],
    );
    assert_eq!(read(d, "cw.jsonl").lines().count(), 50);
    ok(
        PRC,
        d,
        &[
            "corrupt",
            "--in",
            "cw.jsonl",
            "--channel",
            "hyp:0",
            "--out",
            "same.jsonl",
        ],
    );
    assert_eq!(read(d, "cw.jsonl"), read(d, "same.jsonl"));
    ok(
        PRC,
        d,
        &[
            "corrupt",
            "--in",
            "cw.jsonl",
            "--channel",
            "bsc:0.5",
            "--out",
            "noisy.jsonl",
        ],
    );
    assert_ne!(read(d, "cw.jsonl"), read(d, "noisy.jsonl"));
    let verdicts = ok(
        PRC,
        d,
        &[
            "decode", "--key", "key.json", "--in", "cw.jsonl", "--out", "dec.csv",
        ],
    );
    assert_eq!(verdicts.lines().count(), 50);
    assert!(verdicts.lines().all(|l| l == "ONE" || l == "BOT"));
    let report = read(d, "dec.csv");
    assert!(
        report.starts_with("verdict,estimate,ci_lo,ci_hi,trials,seconds\none,"),
        "{report}"
    );
}

#[test]
fn experiments_are_reproducible_and_carry_metadata() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(
        d,
        "sweep.json",
        r#"{"n": 32, "m": 64, "t": 2, "eta": 0.02, "keys": 2,
            "channel": {"kind": "bsc", "p": 0.0},
            "sweep": {"path": "channel.p", "values": [0.0, 0.2]}}"#,
    );
    let args = |out: &'static str, workers: &'static str| {
        vec![
            "--workers",
            workers,
            "experiment",
            "--scheme",
            "weakxor",
            "--params",
            "sweep.json",
            "--trials",
            "500",
            "--seed",
            "11",
            "--out",
            out,
        ]
    };
    ok(PRC, d, &args("a.csv", "1"));
    ok(PRC, d, &args("b.csv", "3"));
    assert_eq!(read(d, "a.csv"), read(d, "b.csv"));
    let csv = read(d, "a.csv");
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "channel.p,estimate,ci_lo,ci_hi,trials,seconds");
    assert_eq!(lines.len(), 3);
    let meta: serde_json::Value = serde_json::from_str(&read(d, "a.csv.json")).unwrap();
    assert_eq!(meta["seed"], 11);
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(
        meta["config_hash"],
        serde_json::from_str::<serde_json::Value>(&read(d, "b.csv.json")).unwrap()["config_hash"]
    );

    ok(
        PRC,
        d,
        &[
            "experiment",
            "--scheme",
            "weakxor",
            "--params",
            "sweep.json",
            "--trials",
            "500",
            "--mode",
            "soundness",
            "--timing",
            "--out",
            "s.csv",
        ],
    );
    let s = read(d, "s.csv");
    assert_eq!(s.lines().count(), 11);
    assert!(s.lines().nth(1).unwrap().starts_with("0.0,zeros,"), "{s}");
    assert!(!s.lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn calibrate_and_distinguish_write_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "params.json", WEAKXOR);
    let out = ok(
        PRC,
        d,
        &[
            "calibrate",
            "--scheme",
            "weakxor",
            "--params",
            "params.json",
            "--trials",
            "4000",
            "--channel",
            "bsc:0.05",
            "--out",
            "cal.csv",
        ],
    );
    assert!(out.contains("repetitions"));
    let cal = read(d, "cal.csv");
    assert!(cal.lines().nth(1).unwrap().starts_with("alpha,"));
    assert!(cal.lines().nth(2).unwrap().starts_with("delta,"));

    ok(
        PRC,
        d,
        &[
            "keygen",
            "--scheme",
            "weakxor",
            "--params",
            "params.json",
            "--out",
            "key.json",
        ],
    );
    ok(
        PRC,
        d,
        &[
            "distinguish",
            "--key",
            "key.json",
            "--trials",
            "400",
            "--null",
            "--out",
            "null.csv",
        ],
    );
    let null = read(d, "null.csv");
    assert_eq!(null.lines().count(), 6, "{null}");
    assert!(null.contains("rank-attack,"));
    ok(
        PRC,
        d,
        &[
            "distinguish",
            "--key",
            "key.json",
            "--trials",
            "400",
            "--secret-parity",
            "--out",
            "sk.csv",
        ],
    );
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "bad.json", r#"{"n": 32, "m": 64, "t": 2}"#);
    write(d, "notjson.json", "{");
    write(d, "params.json", WEAKXOR);
    let code = |args: &[&str]| run(PRC, d, args).status.code().unwrap();
    assert_eq!(
        code(&["keygen", "--scheme", "weakxor", "--params", "bad.json", "--out", "k.json"]),
        2
    );
    assert_eq!(
        code(&[
            "keygen",
            "--scheme",
            "weakxor",
            "--params",
            "notjson.json",
            "--out",
            "k.json"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "keygen",
            "--scheme",
            "weakxor",
            "--params",
            "missing.json",
            "--out",
            "k.json"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "keygen",
            "--scheme",
            "weakxor",
            "--params",
            "params.json",
            "--out",
            "no/such/dir/k.json"
        ]),
        3
    );
    assert_eq!(
        code(&[
            "keygen",
            "--scheme",
            "nope",
            "--params",
            "params.json",
            "--out",
            "k.json"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "experiment",
            "--scheme",
            "weakxor",
            "--params",
            "params.json",
            "--trials",
            "1",
            "--out",
            "e.csv"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "corrupt",
            "--in",
            "x.jsonl",
            "--channel",
            "bsc:2",
            "--out",
            "y.jsonl"
        ]),
        2
    );

    ok(
        PRC,
        d,
        &[
            "keygen",
            "--scheme",
            "weakxor",
            "--params",
            "params.json",
            "--out",
            "key.json",
        ],
    );
    write(d, "short.jsonl", "{\"bits\": 3, \"hex\": \"05\"}\n");
    assert_eq!(
        code(&["decode", "--key", "key.json", "--in", "short.jsonl"]),
        2
    );
}

#[test]
fn watermark_generate_and_detect() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(
        d,
        "amp.json",
        r#"{"n": 32, "m": 64, "t": 2, "eta": 0.02,
            "amplify": {"repetitions": 200, "alpha": 0.75, "delta": 0.5}}"#,
    );
    ok(
        PRC,
        d,
        &[
            "keygen", "--scheme", "weakxor", "--params", "amp.json", "--out", "key.json",
        ],
    );
    let gen = |out: &str, plain: bool| {
        let mut args = vec![
            "generate",
            "--model",
            "sinusoidal:0.5,0.1,16",
            "--prompt",
            "once upon",
            "--scheme",
            "key.json",
            "--count",
            "10",
            "--out",
            out,
        ];
        if plain {
            args.push("--plain");
        }
        ok(WATERMARK, d, &args);
    };
    gen("marked.jsonl", false);
    gen("plain.jsonl", true);
    let all = read(d, "marked.jsonl") + &read(d, "plain.jsonl");
    write(d, "all.jsonl", &all);
    let out = ok(
        WATERMARK,
        d,
        &[
            "detect",
            "--scheme",
            "key.json",
            "--in",
            "all.jsonl",
            "--report",
            "det.csv",
        ],
    );
    assert!(out.contains("watermarked: 10 of 10"), "{out}");
    assert!(out.contains("plain: 0 of 10"), "{out}");
    let report = read(d, "det.csv");
    assert!(report.contains("\nwatermarked,1.000000,"));
    assert!(report.contains("\nplain,0.000000,"));
    assert_eq!(
        run(
            WATERMARK,
            d,
            &["generate", "--model", "gpt", "--scheme", "key.json", "--out", "x.jsonl"]
        )
        .status
        .code(),
        Some(2)
    );
}
