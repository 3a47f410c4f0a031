use std::process::{Command, Output};

fn jainlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jainlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Column `name` of a CSV document as floats.
fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rdr.records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

#[test]
fn eval_first_moment() {
    let o = jainlab(&[
        "eval",
        "--family",
        "jain-baskakov",
        "--f",
        "poly:0,1",
        "--n",
        "10",
        "--r",
        "1",
        "--mu",
        "0",
        "--x",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = column(&stdout(&o), "value")[0];
    assert!((v - 22.0 / 7.0).abs() < 1e-9, "{v}");
}

#[test]
fn eval_constant_as_json() {
    let o = jainlab(&["eval", "--f", "poly:1", "--x", "0.7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(v["family"], "jain-baskakov");
}

#[test]
fn invalid_mu_is_a_config_error() {
    let o = jainlab(&["eval", "--f", "poly:1", "--x", "1", "--mu", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mu in [0, 0.99]"), "{}", stderr(&o));
}

#[test]
fn bad_inputs_name_the_problem() {
    let o = jainlab(&[
        "eval",
        "--f",
        "poly:1",
        "--x",
        "1",
        "--family",
        "jain-baskakov",
        "--c",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c = 1 required"));
    let o = jainlab(&["eval", "--f", "poly:0,0,0,0,1", "--x", "1", "--n", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n / c > r"), "{}", stderr(&o));
    let o = jainlab(&["bound", "--f", "corpus:kink", "--n-grid", "1:3:0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nonempty"));
}

#[test]
fn verify_moments_default_grid() {
    let o = jainlab(&["verify-moments", "--c", "1", "--c", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = text.lines().count() - 1;
    assert!((1800..2500).contains(&rows), "{rows}");
    let c = column(&text, "c");
    assert!(c.contains(&1.0) && c.contains(&2.0));
}

#[test]
fn verify_moments_tight_threshold_fails() {
    let o = jainlab(&[
        "verify-moments",
        "--threshold",
        "1e-15",
        "--n-grid",
        "50,200",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("rel_err"));
}

const BOUND_HEADER: &str =
    "n,x,measured_error,bound_total,term_tv,term_jump,term_mean,term_f2x,term_tail";

#[test]
fn bound_kink_is_dominated() {
    let o = jainlab(&[
        "bound",
        "--f",
        "corpus:kink",
        "--x-grid",
        "0.5,2",
        "--n-grid",
        "50,100,200,400",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), BOUND_HEADER);
    let err = column(&text, "measured_error");
    let total = column(&text, "bound_total");
    assert_eq!(err.len(), 8);
    assert!(err.iter().zip(&total).all(|(e, b)| e <= b));
}

#[test]
fn smooth_linear_function_has_no_tv_term() {
    let o = jainlab(&["bound", "--f", "poly:0,1", "--x-grid", "0.5,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(column(&stdout(&o), "term_tv").iter().all(|&v| v == 0.0));
}

#[test]
fn bound_output_is_deterministic_across_worker_counts() {
    let args = [
        "bound",
        "--f",
        "corpus:humps",
        "--x-grid",
        "0.5:2:4",
        "--n-grid",
        "50,100",
    ];
    let one = jainlab(&[&args[..], &["--jobs", "1"]].concat());
    let four = jainlab(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn korovkin_rules() {
    let o = jainlab(&["korovkin", "--mu-rule", "inv-sqrt"]);
    assert_eq!(o.status.code(), Some(0));
    for m in ["sup_err_m1", "sup_err_m2"] {
        let col = column(&stdout(&o), m);
        assert!(col.windows(2).all(|w| w[1] < w[0]), "{m}: {col:?}");
    }
    let o = jainlab(&["korovkin", "--mu-rule", "const:0.3", "--n-grid", "200,800"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("plateaus"));
    assert!(column(&stdout(&o), "sup_err_m1")[1] > 0.5);
    let o = jainlab(&["korovkin", "--mu-rule", "sqrt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_c_prints_constant() {
    let o = jainlab(&["estimate-c", "--r", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(column(&stdout(&o), "sandwich_c")[0] > 1.0);
    let o = jainlab(&["estimate-c", "--r", "0", "--mu", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "family = \"jain-baskakov\"\nn = 12\nr = 1\nx = 2.0\nf = \"poly:0,1\"\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let o = jainlab(&["eval", "--config", path, "--n", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((column(&stdout(&o), "value")[0] - 22.0 / 7.0).abs() < 1e-9);
    assert_eq!(column(&stdout(&o), "n")[0], 10.0);
}

#[test]
fn config_file_with_table_function_and_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bound.toml");
    let out = dir.path().join("rows.json");
    std::fs::write(
        &cfg,
        format!(
            r#"
format = "json"
out = "{}"
n-grid = [50.0, 100.0]
x-grid = {{ start = 0.5, stop = 2.0, count = 3, spacing = "log" }}

[f]
name = "kink"
pieces = [[0.0, [1.0]], [1.0, [1.0, 2.0]]]
q = 1
m = 1.0
t0 = 1.0
"#,
            out.display()
        ),
    )
    .unwrap();
    let o = jainlab(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);
    assert!(rows[0].get("term_tail").is_some());
}

#[test]
fn numeric_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cap.toml");
    std::fs::write(&cfg, "[accuracy]\nv-cap = 3\n").unwrap();
    let o = jainlab(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--f",
        "poly:1",
        "--x",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("cap"));
}
