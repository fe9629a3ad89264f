use std::path::Path;
use std::process::{Command, Output};

fn fiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Non-comment lines split on tabs.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

fn field<'a>(table: &'a [Vec<String>], key: &str) -> &'a str {
    &table
        .iter()
        .find(|r| r[0] == key)
        .unwrap_or_else(|| panic!("no {key}"))[1]
}

fn header_command(text: &str) -> Vec<String> {
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# fiq "));
    shlex::split(first.split_once("command: ").unwrap().1).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_shifts_out_the_determined_digits() {
    let out = stdout(&fiq(&[
        "simulate",
        "--x0",
        "0.10(1/2)",
        "--map",
        "doubling",
        "--steps",
        "2",
        "--mech",
        "none",
        "--seed",
        "7",
    ]));
    let t = rows(&out);
    assert_eq!(t[0], ["step", "state", "discarded", "events"]);
    assert_eq!(t.len(), 4);
    assert_eq!(t[3][1], "0.(1/2)");
    assert_eq!(t[2][2], "1/1");
}

#[test]
fn zero_steps_prints_only_the_initial_state() {
    let out = stdout(&fiq(&[
        "simulate", "--x0", "0.1(1/3)", "--steps", "0", "--seed", "1",
    ]));
    let t = rows(&out);
    assert_eq!(t.len(), 2);
    assert_eq!(t[1][1], "0.1(1/3)(1/2)");
}

#[test]
fn header_command_reproduces_the_body() {
    let args = [
        "simulate",
        "--x0",
        "0.(1/3)(2/3)1",
        "--steps",
        "5",
        "--mech",
        "spont:lambda=1/3,w=6",
        "--seed",
        "11",
    ];
    let first = stdout(&fiq(&args));
    assert_eq!(first, stdout(&fiq(&args)));
    let replay = header_command(&first);
    assert_eq!(replay[0], "fiq");
    let refs: Vec<&str> = replay[1..].iter().map(String::as_str).collect();
    assert_eq!(stdout(&fiq(&refs)), first);
}

#[test]
fn ensemble_histogram_matches_final_propensities() {
    let out = stdout(&fiq(&[
        "simulate",
        "--x0",
        "0.1(3/4)",
        "--steps",
        "1",
        "--trials",
        "20000",
        "--precision",
        "1",
        "--seed",
        "5",
    ]));
    let t = rows(&out);
    assert_eq!(
        t[0],
        ["outcome", "count", "trials", "frequency", "propensity"]
    );
    let one = t.iter().find(|r| r[0] == "1").unwrap();
    assert_eq!(one[4], "3/4");
    assert!((one[3].parse::<f64>().unwrap() - 0.75).abs() < 0.02);
}

#[test]
fn determined_state_measures_one_outcome() {
    let out = stdout(&fiq(&[
        "measure",
        "--x0",
        "0.1101",
        "--precision",
        "4",
        "--trials",
        "500",
        "--seed",
        "3",
    ]));
    let t = rows(&out);
    assert_eq!(t.len(), 2);
    assert_eq!(t[1], ["1101", "500", "500", "1.0", "1/1"]);
}

#[test]
fn fair_digits_give_uniform_frequencies() {
    let out = stdout(&fiq(&[
        "measure",
        "--x0",
        "0.(1/2)(1/2)",
        "--precision",
        "2",
        "--trials",
        "100000",
        "--seed",
        "9",
    ]));
    let t = rows(&out);
    assert_eq!(t.len(), 5);
    for r in &t[1..] {
        assert!((r[3].parse::<f64>().unwrap() - 0.25).abs() < 0.01);
        assert_eq!(r[4], "1/4");
    }
    let total: u64 = t[1..].iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 100_000);
}

#[test]
fn biased_digit_frequency() {
    let out = stdout(&fiq(&[
        "measure",
        "--x0",
        "0.(3/4)",
        "--precision",
        "1",
        "--trials",
        "100000",
        "--seed",
        "2",
    ]));
    let t = rows(&out);
    let one = t.iter().find(|r| r[0] == "1").unwrap();
    assert!((one[3].parse::<f64>().unwrap() - 0.75).abs() < 0.01);
}

#[test]
fn lln_certain_propensity_never_deviates() {
    let out = stdout(&fiq(&[
        "lln", "--p", "1", "--eps", "1/20", "--trials", "200", "--seed", "4",
    ]));
    let t = rows(&out);
    assert_eq!(t.len(), 4);
    assert!(t[1..].iter().all(|r| r[3] == "0"));
}

#[test]
fn lln_fractions_fall_with_n() {
    let out = stdout(&fiq(&[
        "lln",
        "--p",
        "1/2",
        "--n",
        "100,1000,10000",
        "--eps",
        "1/20",
        "--trials",
        "1000",
        "--seed",
        "8",
    ]));
    let t = rows(&out);
    let f: Vec<f64> = t[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(f[0] >= f[1] && f[1] >= f[2] && f[0] > f[2]);
    let h: Vec<f64> = t[1..].iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(h[0] > h[1] && h[1] > h[2]);
}

#[test]
fn lln_rejects_epsilon_out_of_range() {
    for eps in ["1", "3/2", "0"] {
        let o = fiq(&["lln", "--p", "1/2", "--eps", eps, "--seed", "1"]);
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&o.stderr).contains("--eps"));
    }
}

#[test]
fn humphreys_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.toml",
        "p-c = \"1/2\"\np-e-given-c = \"3/4\"\np-e-given-not-c = \"1/4\"\n",
    );
    let t = rows(&stdout(&fiq(&["humphreys", "--config", &cfg])));
    assert_eq!(field(&t, "contradiction"), "true");
    assert_eq!(field(&t, "p_c_given_e"), "3/4");
    assert_eq!(field(&t, "p_e"), "1/2");

    // flags win over the file
    let t = rows(&stdout(&fiq(&[
        "humphreys",
        "--config",
        &cfg,
        "--p-e-given-c",
        "1/4",
    ])));
    assert_eq!(field(&t, "contradiction"), "false");
    assert_eq!(field(&t, "p_e_given_c"), "1/4");
}

#[test]
fn humphreys_degenerate_model_has_its_own_exit_code() {
    let o = fiq(&[
        "humphreys",
        "--p-c",
        "0",
        "--p-e-given-c",
        "1/2",
        "--p-e-given-not-c",
        "1/3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let t = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(field(&t, "status"), "degenerate");
}

#[test]
fn feasibility_of_presets_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let single = write(
        dir.path(),
        "one.txt",
        "measurements: A=0|1|2\nA: 0.2 0.3 0.5\n",
    );
    let t = rows(&stdout(&fiq(&["feasibility", "--behavior", &single])));
    assert_eq!(field(&t, "verdict"), "feasible");

    let product = dir.path().join("product.txt");
    stdout(&fiq(&[
        "behavior",
        "--preset",
        "product",
        "--out",
        product.to_str().unwrap(),
    ]));
    let out = stdout(&fiq(&[
        "feasibility",
        "--behavior",
        product.to_str().unwrap(),
    ]));
    let t = rows(&out);
    assert_eq!(field(&t, "verdict"), "feasible");
    assert!(t.iter().any(|r| r[0] == "weight"));

    let singlet = dir.path().join("singlet.txt");
    stdout(&fiq(&[
        "behavior",
        "--preset",
        "singlet-chsh",
        "--out",
        singlet.to_str().unwrap(),
    ]));
    let out = stdout(&fiq(&[
        "feasibility",
        "--behavior",
        singlet.to_str().unwrap(),
    ]));
    assert!(out.contains("not whether it is accessible"));
    let t = rows(&out);
    assert_eq!(field(&t, "verdict"), "infeasible");
    let chsh = t.iter().find(|r| r[0] == "chsh").unwrap();
    assert!(chsh[2].parse::<f64>().unwrap() > 2.8);
    assert_eq!(t.iter().filter(|r| r[0] == "coefficient").count(), 4);

    let o = fiq(&[
        "feasibility",
        "--behavior",
        singlet.to_str().unwrap(),
        "--cap",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_are_one_line() {
    for args in [
        vec!["simulate", "--frobnicate", "1"],
        vec!["simulate", "--x0", "0.1(1/3", "--steps", "1", "--seed", "1"],
        vec!["simulate", "--x0", "0.12", "--steps", "1", "--seed", "1"],
        vec!["measure", "--x0", "0.1", "--precision", "1"],
        vec![
            "simulate", "--x0", "0.1", "--steps", "1", "--seed", "1", "--mech", "warp",
        ],
    ] {
        let o = fiq(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.tsv");
    let args = [
        "measure",
        "--x0",
        "0.(1/3)",
        "--precision",
        "1",
        "--trials",
        "50",
        "--seed",
        "6",
    ];
    let printed = stdout(&fiq(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(stdout(&fiq(&with_out)).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}
