use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(rel: &str) -> String {
    root().join("data").join(rel).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascadix"))
        .args(args)
        .env_remove("CASCADIX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn validate_accepts_fixtures() {
    for name in ["cp2.json", "tau2.json", "rank0.json"] {
        let out = ok(&["validate", "--setup", &data(name)]);
        assert!(out.starts_with("monotone triple OK"), "{out}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--setup", "/nonexistent/setup.json"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--C=-1"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--window", "7"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_cascadix"))
        .args(["validate", "--setup", &data("cp2.json")])
        .env("CASCADIX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threads_variable_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_cascadix"))
        .args(["enumerate", "--setup", &data("cp2.json"), "--all-targets", "--format", "csv"])
        .env("CASCADIX_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), include_str!("golden/cp2_catalog.csv"));
}

#[test]
fn spectrum_at_zero() {
    let out = ok(&["spectrum", "--C", "0", "--window", "-7,7", "--format", "csv"]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let parsed: Vec<(f64, u32, i64)> = rows
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    let two_pi = 2.0 * std::f64::consts::PI;
    for ((value, mult, wind), expected) in parsed.iter().zip([-two_pi, 0.0, two_pi]) {
        assert!((value - expected).abs() < 1e-10);
        assert_eq!(*mult, 2);
        assert_eq!(*wind, (expected / two_pi).round() as i64);
    }
    let text = ok(&["spectrum", "--C", "0", "--window", "-7,7"]);
    for label in ["eigenvalues", "multiplicities", "winding numbers"] {
        assert!(text.lines().any(|l| l.starts_with(label)), "{text}");
    }
}

#[test]
fn spectrum_discretization_agrees() {
    let out = ok(&["spectrum", "--C", "3", "--discretize", "10", "--format", "csv"]);
    let errors: Vec<f64> = out
        .lines()
        .skip_while(|l| !l.starts_with("eigenvalue,multiplicity"))
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!errors.is_empty());
    assert!(errors.iter().all(|&e| e < 1e-9), "{out}");
}

#[test]
fn golden_catalog() {
    let out = ok(&[
        "enumerate",
        "--setup",
        &data("cp2.json"),
        "--all-targets",
        "--kmax",
        "3",
        "--classbound",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out, include_str!("golden/cp2_catalog.csv"));
}

#[test]
fn exhaustive_matches_pruned() {
    let base = ["enumerate", "--setup", &data("tau2.json"), "--all-targets", "--kmax", "2", "--format", "csv"];
    let pruned = ok(&base);
    let mut args = base.to_vec();
    args.push("--exhaustive");
    assert_eq!(pruned, ok(&args));
}

#[test]
fn certification_verdicts() {
    let cp2 = ok(&["enumerate", "--setup", &data("cp2.json"), "--all-targets", "--certify"]);
    assert!(cp2.contains("certified"), "{cp2}");
    assert!(!cp2.contains("Case2"), "{cp2}");
    let tau2 = ok(&["enumerate", "--setup", &data("tau2.json"), "--all-targets", "--kmax", "2", "--certify"]);
    assert!(tau2.contains("Case2"), "{tau2}");
}

#[test]
fn single_target() {
    let out = ok(&[
        "enumerate",
        "--setup",
        &data("cp2.json"),
        "--target",
        "m.check_2",
        "--format",
        "csv",
    ]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("m.check_2,M.hat_1,"));
}

#[test]
fn evaluate_cascade_files() {
    let out = ok(&["enumerate", "--setup", &data("cp2.json"), "--evaluate", &data("cascade/case1.json")]);
    assert!(out.contains("label: Case1"));
    let out = ok(&["enumerate", "--setup", &data("cp2.json"), "--evaluate", &data("cascade/case3.json")]);
    assert!(out.contains("label: Case3"));
    let o = run(&["enumerate", "--setup", &data("cp2.json"), "--evaluate", &data("cascade/infeasible.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Infeasible"));
}

#[test]
fn grade_single_generator() {
    let out = ok(&["grade", "--setup", &data("cp2.json"), "--generator", "M.hat_2", "--format", "csv"]);
    assert_eq!(out.lines().nth(1).unwrap(), "M.hat_2,orbit,2,3,10,0");
    assert_eq!(
        run(&["grade", "--setup", &data("cp2.json"), "--generator", "Q.hat_1"]).status.code(),
        Some(1)
    );
}

#[test]
fn index_examples() {
    let out = ok(&["index", "--file", &data("index/weighted_cylinder.json")]);
    assert!(out.contains("weighted index: -1"), "{out}");
    let out = ok(&["index", "--file", &data("index/split_cylinder.json")]);
    assert!(out.contains("split Floer index: 5"), "{out}");
    for augs in 0..3 {
        let out = ok(&["index", "--vertical", "ham,ham", "--augs", &augs.to_string()]);
        assert!(out.contains(&format!("weighted index: {}", -1 - 2 * augs)), "{out}");
        assert!(out.contains("Morse-Bott ends: index 1"), "{out}");
    }
    assert_eq!(run(&["index"]).status.code(), Some(2));
}

#[test]
fn dim_examples() {
    let out = ok(&["dim", "--setup", &data("cp2.json"), "--spec", &data("dim/pearl_in_sigma.json")]);
    assert!(out.contains("dimension: 2"), "{out}");
    let out = ok(&["dim", "--setup", &data("cp2.json"), "--spec", &data("dim/cascade_y_to_y.json")]);
    assert!(out.contains("dimension: 1"), "{out}");
    let out = ok(&["dim", "--setup", &data("cp2.json"), "--spec", &data("dim/pearl_with_sphere.json")]);
    assert!(out.contains("dimension: 2"), "{out}");
}

#[test]
fn orient_examples() {
    let out = ok(&["orient", "--data", &data("orient/fibre_sum.json"), "--format", "csv"]);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",-1")), "{out}");
    assert_eq!(out.lines().count(), 3);
    let out = ok(&["orient", "--data", &data("orient/quotient.json")]);
    assert!(out.contains("dimension 2, sign +1"), "{out}");
}

#[test]
fn morse_homology() {
    let expect = [
        ("circle.json", vec!["Z", "Z"]),
        ("sphere.json", vec!["Z", "0", "Z"]),
        ("interval.json", vec!["0", "0"]),
        ("hopf.json", vec!["Z", "0", "0", "Z"]),
        ("lens3.json", vec!["Z", "Z/3", "0", "Z"]),
    ];
    for (file, groups) in expect {
        let out = ok(&["morse", "--data", &data(&format!("morse/{file}")), "--format", "csv"]);
        let got: Vec<String> = out
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect();
        assert_eq!(got, groups, "{file}");
    }
}

#[test]
fn report_sections() {
    let out = ok(&["report", "--setup", &data("cp2.json"), "--kmax", "2", "--classbound", "2"]);
    for section in ["## Setup", "## Generators", "## Actions", "## Cascades", "## Certification"] {
        assert!(out.contains(section), "{section}");
    }
    let out = ok(&["report", "--setup", &data("rank0.json"), "--kmax", "2", "--profile", "power:3"]);
    assert!(out.contains("profile power:3: admissible"), "{out}");
    assert_eq!(
        run(&["report", "--setup", &data("cp2.json"), "--profile", "power:1"]).status.code(),
        Some(1)
    );
}

#[test]
fn selftest_passes() {
    let out = ok(&["selftest", "--seed", "7", "--count", "25"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 5, "{out}");
}
