use std::path::Path;
use std::process::{Command, Output};

use qldpc::formats::read_file;
use qldpc::manifest::RunManifest;

fn qldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qldpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// CSV body as rows of fields, header skipped.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| l.contains(','))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_single_row_to_stdout() {
    let o = qldpc(&["sample", "--n", "4", "--r", "1", "--v", "2", "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].len(), 4);
    assert_eq!(rows[0].matches('1').count(), 2);
    assert!(stderr(&o).contains("verification: pass"));
}

#[test]
fn odd_row_weight_is_rejected() {
    let o = qldpc(&["sample", "--n", "10", "--r", "4", "--v", "3"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("even"), "{}", stderr(&o));
    // the generated seed is echoed
    assert!(stderr(&o).contains("seed:"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&qldpc(&["sample", "--n", "10"])), 2);
    assert_eq!(code(&qldpc(&["no-such-command"])), 2);
    assert_eq!(code(&qldpc(&["--version"])), 0);
}

#[test]
fn sample_writes_verifiable_reproducible_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = qldpc(&["sample", "--n", "250", "--r", "80", "--v", "6", "--seed", "7", "--out", path_str(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let text = stdout(&o);
        assert!(text.contains("verification: pass"), "{text}");
        assert!(text.contains("elapsed:"));
        assert!(text.contains("ISD calls: total 79"), "{text}");
    }
    let bundle = read_file(&a).unwrap();
    assert_eq!(bundle.matrix.shape(), (80, 250));
    assert!(bundle.matrix.is_self_orthogonal());
    assert_eq!(bundle.metadata.seed, Some(7));
    assert_eq!(bundle.metadata.per_step_isd_calls.len(), 79);
    assert_eq!(read_file(&b).unwrap().matrix, bundle.matrix);

    // the manifest sits next to the output and records everything needed to rerun
    let m = RunManifest::read(&dir.path().join("a.json.manifest.json")).unwrap();
    assert_eq!(m.subcommand, "sample");
    assert_eq!(m.seed, Some(7));
    assert_eq!(m.outputs, vec![a.clone()]);
    assert_eq!(m.params["n"], 250);
    assert_eq!(m.exit_code, 0);
    assert!(m.finished_unix_ms >= m.started_unix_ms);
}

#[test]
fn sample_formats_and_pruning() {
    let dir = tempfile::tempdir().unwrap();
    let alist = dir.path().join("h.alist");
    let manifest = dir.path().join("run.json");
    let o = qldpc(&[
        "sample", "--n", "60", "--r", "20", "--v", "4", "--seed", "1", "--out", path_str(&alist), "--prune-zero",
        "--manifest", path_str(&manifest),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("pruned"));
    let h = read_file(&alist).unwrap().matrix;
    assert_eq!(h.rows(), 20);
    assert!(h.column_weights().iter().all(|&c| c > 0));
    assert!(h.is_self_orthogonal());
    assert!(manifest.exists());
    assert!(!dir.path().join("h.alist.manifest.json").exists());
}

#[test]
fn stalled_sampling_exits_3_and_keeps_the_partial_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.txt");
    // a self-orthogonal subspace of F_2^6 has dimension at most 3
    let o = qldpc(&[
        "sample", "--n", "6", "--r", "4", "--v", "2", "--seed", "1", "--allow-r-near-half", "--max-isd-calls", "30",
        "--out", path_str(&out),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let partial = read_file(&out).unwrap().matrix;
    let msg = format!("stalled after {} accepted rows", partial.rows());
    assert!(stderr(&o).contains(&msg), "{}", stderr(&o));
    assert!((1..=3).contains(&partial.rows()));
    assert!(partial.is_self_orthogonal());
}

#[test]
fn parallel_sampling_still_verifies() {
    let o = qldpc(&["sample", "--n", "100", "--r", "40", "--v", "6", "--seed", "3", "--threads", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("verification: pass"));
    assert_eq!(code(&qldpc(&["sample", "--n", "10", "--r", "2", "--v", "2", "--threads", "0"])), 2);
}

#[test]
fn ewd_matches_published_coefficients() {
    let o = qldpc(&["ewd", "--n", "80", "--r", "40", "--v", "7", "--w-range", "4..10"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("w,log2_m_w,rho_w,log2_m_w_rnd"));
    let expected = [3.69, 4.59, 6.35, 9.93, 17.70, 35.73, 80.86];
    for (row, want) in csv_rows(&text).iter().zip(expected) {
        let m = 2f64.powf(row[1].parse().unwrap());
        assert!((m - want).abs() <= 0.01, "w={} m={m}", row[0]);
    }
}

#[test]
fn ewd_exact_mode() {
    let exact = qldpc(&["ewd", "--n", "80", "--r", "40", "--v", "7", "--w-range", "4..10", "--exact"]);
    let float = qldpc(&["ewd", "--n", "80", "--r", "40", "--v", "7", "--w-range", "4..10"]);
    for (a, b) in csv_rows(&stdout(&exact)).iter().zip(csv_rows(&stdout(&float))) {
        let (x, y): (f64, f64) = (a[1].parse().unwrap(), b[1].parse().unwrap());
        assert!((x - y).abs() < 1e-9);
    }
    let o = qldpc(&["ewd", "--n", "400", "--r", "100", "--v", "6", "--exact"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn ewd_edges_and_csv_file() {
    let o = qldpc(&["ewd", "--n", "20", "--r", "5", "--v", "4", "--w-range", "0"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);

    // half-rate, v = 9: the curve starts below zero and ends above it
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ewd.csv");
    let o = qldpc(&["ewd", "--n", "1000", "--r", "500", "--v", "9", "--csv", path_str(&csv)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let logs: Vec<f64> = csv_rows(&text).iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(logs.len(), 1001);
    let first_positive = logs.iter().skip(1).position(|&x| x > 0.0).unwrap() + 1;
    assert!(logs[1..first_positive].iter().all(|&x| x < 0.0));
    assert!(logs[500] > 0.0);
    assert!(dir.path().join("ewd.csv.manifest.json").exists());
    assert_eq!(code(&qldpc(&["ewd", "--n", "20", "--r", "5", "--v", "4", "--w-range", "3..30"])), 2);
}

#[test]
fn gv_distances() {
    for (n, r, d) in [("250", "80", "16"), ("500", "200", "41"), ("1000", "400", "81")] {
        let o = qldpc(&["gv", "--n", n, "--r", r]);
        assert_eq!(stdout(&o).trim(), d);
    }
}

#[test]
fn validate_ewd_passes_and_rejects_zero_trials() {
    for (r, v) in [("40", "3"), ("30", "5")] {
        let o = qldpc(&["validate-ewd", "--n", "50", "--r", r, "--v", v, "--trials", "1000", "--seed", "3"]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).contains("validate-ewd: PASS"));
    }
    let o = qldpc(&["validate-ewd", "--n", "50", "--r", "40", "--v", "3", "--trials", "0"]);
    assert_eq!(code(&o), 2);
    // kernel too large to enumerate
    let o = qldpc(&["validate-ewd", "--n", "80", "--r", "40", "--v", "3", "--trials", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn validate_isd_reports_theory_and_flags() {
    let o = qldpc(&[
        "validate-isd", "--n", "80", "--r", "40", "--v", "7", "--w-range", "8..10", "--p", "3", "--codes", "4",
        "--calls-per-code", "10", "--seed", "1",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "17.70");
    assert_eq!(rows[0][4], "1.01");
    assert_eq!(rows[2][2], "80.86");
    for r in &rows {
        assert!(r[7] == "true" || r[7] == "false");
    }
    let o = qldpc(&["validate-isd", "--n", "80", "--r", "40", "--v", "7", "--w-range", "2..4", "--p", "3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_presets() {
    let o = qldpc(&["bench", "--preset", "failure-rate", "--runs", "0"]);
    assert_eq!(code(&o), 2);
    let o = qldpc(&["bench", "--preset", "failure-rate", "--runs", "4", "--seed", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("n=150 r=70 v=10 cap=100 runs=4"));

    let o = qldpc(&["bench", "--preset", "table3", "--runs", "1", "--seed", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 11);
    assert_eq!(&rows[0][..4], ["250", "80", "6", "16"]);
    let calls: f64 = rows[0][8].parse().unwrap();
    assert!((1.0..=1.1).contains(&calls));
}

#[test]
fn columns_model_and_file_input() {
    let o = qldpc(&["columns", "--n", "150", "--r", "60", "--v", "8", "--samples", "10", "--seed", "1"]);
    let rows = csv_rows(&stdout(&o));
    let t0: f64 = rows[0][1].parse().unwrap();
    assert!((t0 - 5.596).abs() < 1e-3);
    let o = qldpc(&["columns", "--n", "100", "--r", "45", "--v", "6", "--samples", "2", "--seed", "1"]);
    let t3: f64 = csv_rows(&stdout(&o))[3][1].parse().unwrap();
    assert!((t3 - 22.79).abs() < 0.01);

    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.txt");
    let ident: String = (0..7).map(|i| (0..7).map(|j| if i == j { '1' } else { '0' }).collect::<String>() + "\n").collect();
    std::fs::write(&id, ident).unwrap();
    let o = qldpc(&["columns", "--in", path_str(&id)]);
    assert_eq!(code(&o), 0);
    for row in csv_rows(&stdout(&o)) {
        let want = if row[0] == "1" { 7.0 } else { 0.0 };
        assert_eq!(row[2].parse::<f64>().unwrap(), want);
    }
    let o = qldpc(&["columns", "--n", "150", "--r", "60", "--v", "8", "--source", "sampler", "--samples", "3", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("3 of 3 sampler runs completed"));
}

#[test]
fn css_and_stab_outputs_verify() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("c");
    let o = qldpc(&["css", "--n", "60", "--r1", "5", "--r2", "20", "--w", "6", "--v", "4", "--seed", "3", "--out", path_str(&prefix)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verification: pass"));
    let h1 = read_file(&dir.path().join("c_h1.json")).unwrap().matrix;
    let h2 = read_file(&dir.path().join("c_h2.json")).unwrap().matrix;
    assert!(h1.mul_transpose(&h2).unwrap().is_zero());

    let prefix = dir.path().join("only_h2");
    let o = qldpc(&["css", "--n", "30", "--r1", "0", "--r2", "8", "--w", "6", "--v", "4", "--seed", "3", "--out", path_str(&prefix)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(read_file(&dir.path().join("only_h2_h1.json")).unwrap().matrix.shape(), (0, 30));

    for (r, v) in [("1", "4"), ("8", "6")] {
        let prefix = dir.path().join(format!("s{r}"));
        let o = qldpc(&["stab", "--n", "40", "--r", r, "--v", v, "--seed", "2", "--out", path_str(&prefix), "--format", "alist"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(stdout(&o).contains("verification: pass"));
        assert!(dir.path().join(format!("s{r}_hx.alist")).exists());
    }
}
