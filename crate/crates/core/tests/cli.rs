use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beliefvar"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn validate_reports_size_and_rejects_garbage() {
    assert_eq!(
        stdout_ok(&["validate", &fixture("diamond.json")]).trim(),
        "ok: 4 variables"
    );
    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"variables": []"#).unwrap();
    assert!(!run(&["validate", bad.to_str().unwrap()]).status.success());
}

#[test]
fn point_estimates_agree_with_the_bundle() {
    let net = fixture("nb2.json");
    let q: f64 = stdout_ok(&["query", &net, "-H", "H=h0", "-e", "E1=e10,E2=e21"])
        .trim()
        .parse()
        .unwrap();
    let dbl = stdout_ok(&["variance", &net, "-H", "H=h0", "-e", "E1=e10,E2=e21"]);
    let delta = stdout_ok(&[
        "variance",
        &net,
        "-H",
        "H=h0",
        "-e",
        "E1=e10,E2=e21",
        "--method",
        "delta",
    ]);
    let bundle = stdout_ok(&[
        "bundle",
        &net,
        "-H",
        "H=h0",
        "-e",
        "E1=e10,E2=e21",
        "--header",
    ]);
    let mut lines = bundle.lines();
    assert_eq!(lines.next(), Some("q1,q2,q3,q4,v1,v2,v3,v4,mu_r,sigma_rr"));
    let vals: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 10);
    assert_eq!(vals[0], q);
    assert_eq!(vals[1], field(&dbl, "q2"));
    assert_eq!(vals[5], field(&dbl, "v2"));
    assert_eq!(vals[4], field(&delta, "v1"));
    assert!(!run(&["query", &net, "-H", "Z=1"]).status.success());
}

#[test]
fn oracle_is_reproducible_across_threads() {
    let net = fixture("nb2.json");
    let a = stdout_ok(&[
        "oracle",
        &net,
        "-H",
        "H=h1",
        "-k",
        "3000",
        "--seed",
        "4",
        "--threads",
        "1",
    ]);
    let b = stdout_ok(&[
        "oracle",
        &net,
        "-H",
        "H=h1",
        "-k",
        "3000",
        "--seed",
        "4",
        "--threads",
        "3",
    ]);
    assert_eq!(a, b);
    assert_eq!(field(&a, "k"), 3000.0);
    let (q0, se) = (field(&a, "q0"), field(&a, "se_q0"));
    let q1: f64 = stdout_ok(&["query", &net, "-H", "H=h1"])
        .trim()
        .parse()
        .unwrap();
    assert!((q0 - q1).abs() < 4.0 * se);
}

#[test]
fn cauchy_density_from_the_command_line() {
    let d: f64 = stdout_ok(&[
        "stdensity",
        "--nu",
        "1",
        "--eta",
        "0",
        "--omega2",
        "1",
        "--at",
        "0",
    ])
    .trim()
    .parse()
    .unwrap();
    assert!((d - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
    let shifted: f64 = stdout_ok(&[
        "stdensity",
        "--nu",
        "1",
        "--eta",
        "-2",
        "--omega2",
        "1",
        "--at",
        "-2",
    ])
    .trim()
    .parse()
    .unwrap();
    assert_eq!(shifted, d);
}

#[test]
fn experiment_writes_identical_files() {
    let (a, b) = (scratch("exp_a.csv"), scratch("exp_b.csv"));
    let args = [
        "experiment",
        "--bench",
        "nb2",
        "--m",
        "20,100",
        "-k",
        "1000",
        "--seed",
        "5",
    ];
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let mut full = args.to_vec();
        full.extend(["--threads", threads, "-o", path.to_str().unwrap()]);
        stdout_ok(&full);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 2 + 8);
    let stdout = stdout_ok(&args);
    assert_eq!(stdout, text);
    assert!(!run(&["experiment", "--bench", "nb9"]).status.success());
}

#[test]
fn update_adds_counts() {
    let data = scratch("data.csv");
    std::fs::write(&data, "E2,H,E1\ne21,h0,e10\ne20,h0,e10\n").unwrap();
    let out = scratch("updated.json");
    stdout_ok(&[
        "update",
        &fixture("nb2.json"),
        data.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    let before = beliefvar::io::load_network::<f64>(fixture("nb2.json")).unwrap();
    let after = beliefvar::io::load_network::<f64>(&out).unwrap();
    assert_eq!(
        after.row(0, 0).alpha()[0],
        before.row(0, 0).alpha()[0] + 2.0
    );
    assert_eq!(
        after.row(1, 0).alpha()[0],
        before.row(1, 0).alpha()[0] + 2.0
    );
    assert_eq!(
        after.row(2, 0).alpha()[1],
        before.row(2, 0).alpha()[1] + 1.0
    );
    assert_eq!(after.row(0, 0).alpha()[1], before.row(0, 0).alpha()[1]);
}
