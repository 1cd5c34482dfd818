use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

const SUBCOMMANDS: [&str; 10] =
    ["fit", "gof", "landscape", "ttest", "twosample", "binary", "binned", "gof2d", "null-table", "experiment"];

fn fidelity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fidelity"))
        .args(args)
        .env_remove("FIDELITY_CACHE_DIR")
        .output()
        .expect("spawn fidelity")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("json error on stderr")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn help_matches_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let top = fidelity(&["--help"]);
    assert_eq!(String::from_utf8_lossy(&top.stdout), std::fs::read_to_string(golden.join("fidelity.txt")).unwrap());
    for sub in SUBCOMMANDS {
        let o = fidelity(&[sub, "--help"]);
        assert!(o.status.success());
        let want = std::fs::read_to_string(golden.join(format!("{sub}.txt"))).unwrap();
        assert_eq!(String::from_utf8_lossy(&o.stdout), want, "help of {sub}");
    }
}

#[test]
fn gof_single_centered_point() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.csv", "0\n");
    let v = stdout_json(&fidelity(&["gof", "--model", "family=gauss,beta=0,alpha=1", "--data", &d]));
    assert_eq!(v["f"], 0);
    assert_eq!(v["p"], 1);
    assert_eq!(v["schema"], "fidelity/1");
}

#[test]
fn null_table_rows() {
    let o = fidelity(&["null-table", "--geometry", "circle", "--n", "2"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "n\tmu\tsigma\talpha\tbeta\n2\t-0.30685281944\t0.42134661097\t0.5303727787\t1.7284272626\n");
    let o = fidelity(&["null-table", "--geometry", "circle", "--n-list", "1"]);
    assert!(String::from_utf8_lossy(&o.stdout).ends_with("1\t0\t0\t---\t---\n"));
}

#[test]
fn binary_values() {
    let v = stdout_json(&fidelity(&["binary", "--n", "10", "--k", "3"]));
    assert!((v["q_star"].as_f64().unwrap() - 0.306089).abs() < 1e-6);
    assert!((v["interval"]["q_lo"].as_f64().unwrap() - 0.107).abs() < 1e-3);
    assert!((v["interval"]["q_hi"].as_f64().unwrap() - 0.571).abs() < 1e-3);
    let v = stdout_json(&fidelity(&["binary", "--n", "10", "--k", "0", "--mode", "exact"]));
    assert_eq!(v["interval"]["q_lo"], 0);
    assert_eq!(v["interval"]["one_sided"], "lower");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.csv", "0.5\n0.5\n");
    let o = fidelity(&["twosample", "--a", &d, "--b", &d]);
    assert_eq!(o.status.code(), Some(2), "missing --seed");
    assert_eq!(stderr_json(&o)["error"]["code"], "usage");
    let o = fidelity(&["gof", "--model", "family=zipf", "--data", &d]);
    assert_eq!(o.status.code(), Some(2));
    let o = fidelity(&["gof", "--model", "family=gauss,beta=0,alpha=1", "--data", "/nonexistent/file"]);
    assert_eq!(o.status.code(), Some(3));
    let bad = write(dir.path(), "bad.csv", "1\nx\n");
    let o = fidelity(&["gof", "--model", "family=gauss,beta=0,alpha=1", "--data", &bad]);
    assert_eq!(o.status.code(), Some(3));
    let neg = write(dir.path(), "neg.csv", "-1\n2\n");
    let o = fidelity(&["gof", "--model", "family=exponential,alpha=1", "--data", &neg]);
    assert_eq!(o.status.code(), Some(3), "support violation");
    let e = stderr_json(&o);
    assert_eq!(e["error"]["code"], "data");
    assert!(e["error"]["message"].is_string() && e["error"]["context"].is_string());
    // Ties are not an error: f = -inf with a warning.
    let v = stdout_json(&fidelity(&["gof", "--model", "family=gauss,beta=0,alpha=1", "--data", &d]));
    assert_eq!(v["f"], "-inf");
    assert_eq!(v["warnings"][0]["kind"], "tie");
    let o = fidelity(&["fit", "--model", "family=gauss", "--range", "mu=-1:1:3", "--data", &d, "--statistic", "likelihood", "--fit", "mu", "--model", "family=gauss,sigma=1"]);
    assert_eq!(o.status.code(), Some(2), "repeated --model");
}

#[test]
fn no_fit_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.csv", "5\n6\n");
    // Every candidate leaves the data outside the support.
    let o = fidelity(&["fit", "--model", "family=beta,alpha=1", "--fit", "beta", "--data", &d]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stderr_json(&o)["error"]["code"], "no_fit");
}

#[test]
fn fit_and_landscape() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "d.csv", "x\n-0.9\n0.1\n0.4\n1.3\n-0.2\n");
    let v = stdout_json(&fidelity(&["fit", "--model", "family=gauss", "--fit", "mu,sigma", "--data", &d]));
    let mu = v["params"]["beta"].as_f64().unwrap();
    assert!(mu > -0.5 && mu < 0.6);
    assert!(v["p"].as_f64().unwrap() > 0.5);
    let out = dir.path().join("grid.tsv");
    let o = fidelity(&["landscape", "--model", "family=gauss", "--grid", "mu=-2:2:5,sigma=0.2:3:4", "--data", &d, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mu\tsigma\tf\tp");
    assert_eq!(lines.len(), 21);
}

#[test]
fn twosample_is_reproducible_and_config_merges() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "0.1\n0.5\n0.9\n0.3\n");
    let b = write(dir.path(), "b.csv", "0.2\n0.7\n1.3\n");
    let args = ["twosample", "--a", &a, "--b", &b, "--seed", "7", "--null-replicates", "1000"];
    let o1 = fidelity(&args);
    let o2 = fidelity(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(o1.stdout, o2.stdout);
    let v = stdout_json(&o1);
    assert!((v["f1"].as_f64().unwrap() - (-0.130812035941)).abs() < 1e-11);
    let cfg = write(dir.path(), "cfg.txt", "# defaults\nseed = 7\nnull_replicates=1000\n");
    let o3 = fidelity(&["twosample", "--a", &a, "--b", &b, "--config", &cfg]);
    assert_eq!(o1.stdout, o3.stdout);
    let o4 = fidelity(&["twosample", "--a", &a, "--b", &b, "--config", &cfg, "--seed", "8"]);
    assert_eq!(stdout_json(&o4)["seed"], 8);
}

#[test]
fn binned_and_gof2d() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "bins.csv", "edge_lo,edge_hi,count\n-3,-1,2\n-1,0,4\n0,1,3\n1,3,1\n");
    let args = ["binned", "--model", "family=gauss,beta=0,alpha=1", "--data", &d, "--seed", "3", "--replicates", "99"];
    let v = stdout_json(&fidelity(&args));
    assert_eq!(v["n"], 10);
    assert!(v["p"].as_f64().unwrap() > 0.0);
    assert_eq!(fidelity(&args).stdout, fidelity(&args).stdout);
    let pts = write(dir.path(), "pts.csv", "x,y\n7.5,3.2\n6.1,2.0\n8.0,4.4\n6.9,2.7\n7.2,3.9\n");
    for method in ["r-theta", "model-xy", "coordinate-xy"] {
        let v = stdout_json(&fidelity(&["gof2d", "--model", "gauss2d:x0=7,y0=3,a=3,b=2,phi=1.0472", "--method", method, "--data", &pts]));
        let p = v["p"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(v["n"], 10);
    }
}

#[test]
fn ttest_shared_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "-0.8\n0.3\n-0.1\n0.6\n1.1\n-1.2\n");
    let b = write(dir.path(), "b.csv", "2.4\n1.6\n2.9\n2.1\n3.3\n");
    let sep = stdout_json(&fidelity(&["ttest", "--model", "family=gauss", "--a", &a, "--b", &b]));
    let shared = stdout_json(&fidelity(&["ttest", "--model", "family=gauss", "--a", &a, "--b", &b, "--shared", "mu,sigma"]));
    assert!(shared["joint"]["p"].as_f64().unwrap() < sep["joint"]["p"].as_f64().unwrap());
    assert_eq!(shared["params_a"], shared["params_b"]);
}

#[test]
fn experiment_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fidelity(&["experiment", "--name", "binary_demo", "--seed", "1", "--out", out]);
    let v = stdout_json(&o);
    assert_eq!(v["experiment"], "binary_demo");
    assert_eq!(v["pass"], true);
    assert!(dir.path().join("summary.json").exists());
    let o = fidelity(&["experiment", "--name", "binary_demo", "--seed", "1", "--out", out, "--realizations", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fidelity(&["experiment", "--name", "nope", "--seed", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
}
