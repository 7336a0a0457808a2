use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use slicelab_cli::{comparable, exit};

fn slicelab(args: &[&str], env_budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_slicelab"));
    cmd.args(args).env_remove("GSL_BUDGET");
    if let Some(b) = env_budget {
        cmd.env("GSL_BUDGET", b);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn verify_lemma_passes() {
    let o = slicelab(
        &[
            "verify-lemma",
            "--variety",
            "quadric-cone-p3",
            "--field",
            "3",
            "--k",
            "1",
        ],
        None,
    );
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "slicelab/verify-lemma/v1");
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"][0]["v_count"], 40);
    assert_eq!(v["results"][0]["checks"].as_array().unwrap().len(), 5);
    assert!(v["version"].is_string());
    assert_eq!(v["config"]["variety"], "quadric-cone-p3");
}

#[test]
fn scaling_recovers_square_law() {
    let o = slicelab(
        &[
            "scaling",
            "--variety",
            "quadric-cone-p3",
            "--k",
            "1",
            "--fields",
            "3,5,7",
        ],
        None,
    );
    assert_eq!(code(&o), exit::OK);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let fit = &v["results"]["fit"];
    assert_eq!(fit["predicted"], 2);
    assert!((fit["exponent"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(
        fit["samples"],
        serde_json::json!([[3, 9], [5, 25], [7, 49]])
    );
}

#[test]
fn error_exit_codes() {
    let char2 = slicelab(
        &[
            "census",
            "--variety",
            "quadric-cone-p3",
            "--field",
            "2",
            "--k",
            "1",
            "--classifier",
            "quadric-exact",
        ],
        None,
    );
    assert_eq!(code(&char2), exit::CLASSIFIER_PRECONDITION);
    let unknown = slicelab(&["census", "--variety", "no-such-thing"], None);
    assert_eq!(code(&unknown), exit::UNKNOWN_CATALOG);
    let budget = slicelab(
        &[
            "census",
            "--variety",
            "quadric-cone-p3",
            "--field",
            "7",
            "--budget",
            "100",
        ],
        None,
    );
    assert_eq!(code(&budget), exit::BUDGET_EXCEEDED);
    assert!(String::from_utf8_lossy(&budget.stderr).contains("sampling"));
    let no_seed = slicelab(&["sample", "--variety", "quadric-cone-p3"], None);
    assert_eq!(code(&no_seed), exit::USAGE);
    let bad_flag = slicelab(&["census", "--nonsense"], None);
    assert_eq!(code(&bad_flag), exit::USAGE);
    let bad_field = slicelab(&["count", "--variety", "conic-p2", "--field", "4"], None);
    assert_eq!(code(&bad_field), exit::INVALID_INPUT);
    let help = slicelab(&["--help"], None);
    assert_eq!(code(&help), exit::OK);
    assert!(String::from_utf8_lossy(&help.stdout).contains("Exit codes"));
}

#[test]
fn budget_precedence() {
    let args = ["census", "--variety", "quadric-cone-p3", "--field", "5"];
    assert_eq!(code(&slicelab(&args, Some("10"))), exit::BUDGET_EXCEEDED);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--budget", "100000000"]);
    assert_eq!(code(&slicelab(&with_flag, Some("10"))), exit::OK);
    assert_eq!(code(&slicelab(&args, Some("ten"))), exit::USAGE);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"command": "census", "variety": "quadric-cone-p3", "fields": ["3"], "k": [1], "budget": 10}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let cfg_s = cfg.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    // file budget applies
    assert_eq!(
        code(&slicelab(&["run", "--config", cfg_s], None)),
        exit::BUDGET_EXCEEDED
    );
    let o = slicelab(
        &[
            "run", "--config", cfg_s, "--budget", "1000000", "--fields", "5", "--output", out_s,
        ],
        None,
    );
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let v = report(&out, "census");
    assert_eq!(v["config"]["fields"], serde_json::json!(["5^1"]));
    assert_eq!(v["config"]["budget"], 1000000);
    assert_eq!(v["results"][0]["census"]["very_bad_count"], 25);
    let csv = std::fs::read_to_string(out.join("census.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "q,n,k,r,total,very_bad,deviation,chebyshev_bound_num,chebyshev_bound_den,\
         class_irreducible,class_split,class_conjugate,class_double,class_whole"
    );
    assert!(lines.next().unwrap().starts_with("5,3,1,2,156,25,"));

    std::fs::write(&cfg, r#"{"command": "census", "colour": "blue"}"#).unwrap();
    assert_eq!(
        code(&slicelab(&["run", "--config", cfg_s], None)),
        exit::USAGE
    );
}

#[test]
fn variety_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.var");
    std::fs::write(&path, "# two lines\nn=2 r=1 p=3\nx0*x1\n").unwrap();
    let p = path.to_str().unwrap();
    let o = slicelab(
        &[
            "count",
            "--variety",
            p,
            "--field",
            "3",
            "--ext-degrees",
            "1,2",
        ],
        None,
    );
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["results"][0]["counts"],
        serde_json::json!([[1, 7], [2, 19]])
    );
    assert_eq!(v["results"][0]["a_est"], 2);
    let wrong = slicelab(&["count", "--variety", p, "--field", "5"], None);
    assert_eq!(code(&wrong), exit::INVALID_INPUT);
}

#[test]
fn reports_are_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(w);
        let o = slicelab(
            &[
                "sample",
                "--variety",
                "quadric-cone-p3",
                "--fields",
                "5,7",
                "--samples",
                "800",
                "--seed",
                "99",
                "--workers",
                w,
                "--output",
                out.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(code(&o), exit::OK);
        reports.push((
            report(&out, "sample"),
            std::fs::read(out.join("sample.csv")).unwrap(),
        ));
    }
    assert_eq!(comparable(&reports[0].0), comparable(&reports[1].0));
    assert_eq!(reports[0].1, reports[1].1);
    assert!(reports[0].0["run"]["timestamp"].is_u64());
}

#[test]
fn sharpness_reports_witnesses() {
    let o = slicelab(
        &[
            "sharpness",
            "--variety",
            "quadric-cone-p3",
            "--fields",
            "3,5",
            "--k",
            "1",
        ],
        None,
    );
    assert_eq!(code(&o), exit::OK);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v["results"]["results"];
    assert_eq!(r[0]["u_count"], 6);
    assert_eq!(r[1]["u_count"], 15);
    assert_eq!(r[1]["bad_count"], 25);
    let not_cone = slicelab(&["sharpness", "--variety", "conic-p2"], None);
    assert_eq!(code(&not_cone), exit::USAGE);
}
