use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "family,k,delta,p,x_requested,x_snapped,n,successes,p_hat,ci_low,ci_high,cardy_X,deviation,z_score";

fn cardylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardylab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cardylab_threads(args: &[&str], threads: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cardylab"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn csv_layout() {
    let o = cardylab(&["verify-cardy", "--delta", "1/10", "--n", "2000", "--x", "0.25,0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    let header_at = lines.iter().position(|l| *l == HEADER).expect("header present");
    assert!(lines[..header_at].iter().all(|l| l.starts_with('#')));
    assert!(text.contains("# seed: 1\n") && text.contains("# site_stream: v1\n"));
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 14);
        assert_eq!(f[0], "triangular");
        for v in &f[1..] {
            let digits = v.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 12, "{v}");
        }
    }
}

#[test]
fn json_mirrors_csv() {
    let args = ["violation", "--delta", "1/16", "--n", "500"];
    let csv = stdout(&cardylab(&args));
    let json = stdout(&cardylab(&[&args[..], &["--format", "json"]].concat()));
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let csv_rows = data_lines(&csv);
    assert_eq!(rows.len(), csv_rows.len() - 1);
    for (obj, line) in rows.iter().zip(&csv_rows[1..]) {
        for (col, cell) in HEADER.split(',').zip(line.split(',')) {
            let v = &obj[col];
            match v {
                serde_json::Value::String(s) => assert_eq!(s, cell),
                serde_json::Value::Number(n) => {
                    assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{col}")
                }
                other => panic!("{col}: {other}"),
            }
        }
    }
    let verdict = csv.lines().find_map(|l| l.strip_prefix("# verdict: ")).unwrap();
    assert_eq!(doc["verdict"], verdict);
}

#[test]
fn exit_codes() {
    // Config errors.
    assert_eq!(cardylab(&["verify-cardy", "--x", "1.5"]).status.code(), Some(2));
    assert_eq!(cardylab(&["coupling", "--k", "0.3"]).status.code(), Some(2));
    assert_eq!(cardylab(&["sweep", "--family", "tri-nw"]).status.code(), Some(2));
    assert_eq!(cardylab(&["predict", "--bogus"]).status.code(), Some(2));
    // Coupling precondition.
    let o = cardylab(&["coupling", "--delta", "1/16", "--pair-delta", "1/20", "--n", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(17, 0)"));
    // Verdicts.
    assert_eq!(cardylab(&["violation", "--k", "1", "--delta", "1/20", "--n", "2000"]).status.code(), Some(0));
    assert_eq!(cardylab(&["validate-lattice"]).status.code(), Some(0));
}

#[test]
fn verdict_failure_exits_4() {
    // Far too few samples for the violation to be significant.
    let o = cardylab(&["violation", "--delta", "1/10", "--n", "20"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "sweep", "p": [0.3, 0.7], "delta": [0.1, 0.05], "x_params": [0.5], "n_samples": 300, "seed": 5}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let text = stdout(&cardylab(&["sweep", "--config", cfg, "--seed", "6"]));
    assert!(text.contains("# seed: 6\n"));
    assert!(text.contains("# p: 0.3,0.7\n"));
    assert_eq!(data_lines(&text).len(), 1 + 2 * 2);

    assert_eq!(cardylab(&["violation", "--config", cfg]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"delta": 0.1, "nsamples": 3}"#).unwrap();
    assert_eq!(cardylab(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

fn run_to_file(dir: &Path, name: &str, threads: usize, args: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let o = cardylab_threads(&[args, &["--out", out.to_str().unwrap()]].concat(), threads);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--delta", "1/10,1/20", "--n", "3000", "--seed", "42"];
    let a = run_to_file(dir.path(), "a.csv", 1, &args);
    let b = run_to_file(dir.path(), "b.csv", 4, &args);
    let c = run_to_file(dir.path(), "c.csv", 4, &args);
    assert_eq!(a, b);
    assert_eq!(b, c);
    let other = run_to_file(dir.path(), "d.csv", 1, &["sweep", "--delta", "1/10,1/20", "--n", "3000", "--seed", "43"]);
    assert_ne!(a, other);
}

#[test]
fn predict_and_validate_render() {
    let text = stdout(&cardylab(&["predict", "--k", "2", "--x", "0.25"]));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "family,k,kappa,x,w,cardy_X,residual");
    assert!(rows[1].starts_with("triangular,2,1.31811607165,0.25,0.118113207216,0.283526566416,"));

    let text = stdout(&cardylab(&["validate-lattice", "--family", "square-ne", "--period", "1,1", "--period", "1/2,0"]));
    assert!(text.contains("period (1 1),,,true"));
    assert!(text.contains("period (0.5 0),,,false"));
}
