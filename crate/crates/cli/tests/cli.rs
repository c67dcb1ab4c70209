use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const LAMBDA: &str = r#"{"K": 3, "lambda": [[0.5, 0.3, 0.4], [0.3, 0.8, 0.6], [0.4, 0.6, 0.3]]}"#;

fn vn(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vn")).args(args).current_dir(cwd).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn sample(dir: &Path) {
    fs::write(dir.join("lambda.json"), LAMBDA).unwrap();
    let out = vn(
        &[
            "sample", "--lambda", "lambda.json", "--seeds", "4,1,1", "--sizes", "6,5,5", "--rng-seed", "3",
            "--edges", "g.txt", "--labels", "seeds.txt", "--truth", "truth.txt",
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn version_prints_package_version() {
    let out = vn(&["version"], Path::new("."));
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("vn {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn sample_then_nominate_every_scheme() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    let edges = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert!(edges.starts_with("#vertices 22\n"));
    assert_eq!(fs::read_to_string(dir.path().join("seeds.txt")).unwrap().lines().count(), 6);
    let truth = fs::read_to_string(dir.path().join("truth.txt")).unwrap();
    assert_eq!(truth.lines().count(), 16);
    let mut ambiguous: Vec<String> = truth.lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    ambiguous.sort();

    for scheme in ["canonical", "likelihood", "spectral"] {
        let out = vn(
            &[
                "nominate", "--scheme", scheme, "--graph", "g.txt", "--labels", "seeds.txt", "--lambda", "lambda.json",
                "--sizes", "6,5,5",
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{scheme}: {}", String::from_utf8_lossy(&out.stderr));
        let mut listed: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
        listed.sort();
        assert_eq!(listed, ambiguous, "{scheme}");
    }
}

#[test]
fn nominate_writes_to_file_and_needs_sizes() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    let base = ["nominate", "--graph", "g.txt", "--labels", "seeds.txt", "--lambda", "lambda.json"];
    let out = vn(&[&base[..], &["--scheme", "likelihood"]].concat(), dir.path());
    assert_eq!(code(&out), 2);
    let out = vn(&[&base[..], &["--scheme", "spectral", "--output", "list.txt"]].concat(), dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read_to_string(dir.path().join("list.txt")).unwrap().lines().count(), 16);
    let out = vn(&[&base[..], &["--scheme", "bogus"]].concat(), dir.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&vn(&["experiment", "--config", "missing.json"], d)), 4);

    fs::write(d.join("typo.json"), r#"{"name": "x", "schemes": ["spectral"], "replicates": 1, "master_seed": 0, "replicats": 2}"#).unwrap();
    assert_eq!(code(&vn(&["experiment", "--config", "typo.json"], d)), 2);

    let model = r#""model": {"K": 3, "base_lambda": [[0.5, 0.3, 0.4], [0.3, 0.8, 0.6], [0.4, 0.6, 0.3]], "n_sizes": [20, 15, 15], "m_sizes": [5, 0, 0]}"#;
    fs::write(
        d.join("huge.json"),
        format!(r#"{{"name": "huge", {model}, "schemes": ["canonical"], "replicates": 1, "master_seed": 0}}"#),
    )
    .unwrap();
    let out = vn(&["experiment", "--config", "huge.json"], d);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));

    fs::write(d.join("lambda.json"), LAMBDA).unwrap();
    let out = vn(
        &["nominate", "--scheme", "spectral", "--graph", "absent.txt", "--labels", "s.txt", "--lambda", "lambda.json"],
        d,
    );
    assert_eq!(code(&out), 4);
    fs::write(d.join("bad.txt"), "1 two\n").unwrap();
    fs::write(d.join("s.txt"), "1 1\n").unwrap();
    let out = vn(
        &["nominate", "--scheme", "spectral", "--graph", "bad.txt", "--labels", "s.txt", "--lambda", "lambda.json"],
        d,
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn experiment_outputs_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("run.json"),
        r#"{
  "name": "tiny",
  "model": {"K": 3, "base_lambda": [[0.5, 0.3, 0.4], [0.3, 0.8, 0.6], [0.4, 0.6, 0.3]], "n_sizes": [4, 3, 3], "m_sizes": [4, 0, 0]},
  "schemes": ["canonical", "likelihood", "spectral"],
  "replicates": 60,
  "master_seed": 11
}"#,
    )
    .unwrap();
    for (workers, out_dir) in [("1", "a"), ("3", "b")] {
        let out = vn(&["experiment", "--config", "run.json", "--workers", workers, "--log-raw", "--out-dir", out_dir], d);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["tiny_curve.csv", "tiny_summary.json", "tiny_raw.csv"] {
        let a = fs::read(d.join("a").join(file)).unwrap();
        let b = fs::read(d.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let curve = fs::read_to_string(d.join("a/tiny_curve.csv")).unwrap();
    assert_eq!(curve.lines().next().unwrap(), "position,canonical,likelihood,spectral,chance");
    assert_eq!(curve.lines().count(), 11);
    assert!(d.join("a/tiny_timing.json").exists());
}

#[test]
fn subsample_writes_positions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut edges = String::from("#vertices 30\n");
    for i in 1..=30usize {
        for j in i + 1..=30 {
            let same = (i <= 12) == (j <= 12);
            if (i * 7 + j * 13) % 10 < if same && i <= 12 { 7 } else { 2 } {
                edges.push_str(&format!("{i} {j}\n"));
            }
        }
    }
    let labels: String = (1..=30).map(|v| format!("{v} {}\n", if v <= 12 { 1 } else { 2 })).collect();
    fs::write(d.join("e.txt"), edges).unwrap();
    fs::write(d.join("l.txt"), labels).unwrap();
    fs::write(
        d.join("sub.json"),
        r#"{"name": "sub", "edges": "e.txt", "labels": "l.txt", "sample_sizes": [10, 10], "seeds": [4, 4], "replicates": 5, "master_seed": 1}"#,
    )
    .unwrap();
    let out = vn(&["subsample", "--config", "sub.json", "--out-dir", "out"], d);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("out/sub_positions.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "vertex,class,selections,mean_position");
    assert_eq!(csv.lines().count(), 31);
}
