use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-bv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

#[test]
fn perimeter_of_square_as_csv() {
    let o = run(&["perimeter", &path("square.json")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "P_BVd").unwrap();
    assert_eq!(row[col], "2.50662827463");
    assert!(!text.contains('\r'));
}

#[test]
fn perimeter_of_cube_as_json() {
    let o = run(&["perimeter", &path("cube.json"), "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["perimeter"], 6.0);
    assert!(v["petty_ratio"].as_f64().unwrap() < 1.0);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let o = run(&["perimeter", &path("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn invalid_content_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bowtie.json");
    std::fs::write(&file, r#"{"dimension": 2, "kind": "polygon", "vertices": [[0,0],[1,1],[1,0],[0,1]]}"#).unwrap();
    let o = run(&["perimeter", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn divergent_polar_exits_3_with_object() {
    let o = run(&["perimeter", &path("slab.json")]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    let object = &err[err.find('{').unwrap()..];
    let v: serde_json::Value = serde_json::from_str(object).unwrap();
    assert_eq!(v["facets"].as_array().unwrap().len(), 2);
}

#[test]
fn cross_bracket_beats_the_sum() {
    let o = run(&["capacity", &path("cross.json"), "--bracket"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lower, upper) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lower > 501.33, "{lower}");
    assert!(lower <= upper);
}

#[test]
fn convex_capacity_refuses_non_convex_input() {
    let o = run(&["capacity", &path("l_shape.json"), "--convex"]);
    assert!(!o.status.success());
    let o = run(&["capacity", &path("square.json"), "--convex"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("2.50662827463"));
}

#[test]
fn symmetrize_keeps_volume_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = dir.path().join("report.json");
    let o = run(&[
        "symmetrize",
        &path("l_shape.json"),
        "--direction",
        "1,1",
        "--steps",
        "4",
        "--trace",
        trace.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["volume_after"].as_f64().unwrap() - 3.0).abs() < 1e-10);
    assert!(v["perimeter_after"].as_f64().unwrap() <= v["perimeter_before"].as_f64().unwrap());
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("step,"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn trace_constants_of_a_measure() {
    let o = run(&["trace", &path("measure.json"), "--q", "1.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["kappa3_hat"].as_f64().unwrap() > 0.0);
    let o = run(&["trace", &path("measure.json"), "--q", "3"]);
    assert!(!o.status.success());
}

#[test]
fn cheeger_on_a_square() {
    let o = run(&["cheeger", &path("square.json"), "--mesh-h", "0.2", "--iters", "2", "--mode", "set"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let set = &v["set"];
    assert!(set["value"].as_f64().unwrap() <= 2.50662827464);
    assert_eq!(set["comparison_ok"], true);
    assert!(v.get("function").is_none());
}

#[test]
fn verify_passes_on_the_default_corpus() {
    let o = run(&["verify", "--corpus", "random", "--count", "50", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["verify", "--seed", "11", "--count", "12"],
        vec!["capacity", "cross.json", "--bracket"],
        vec!["symmetrize", "l_shape.json", "--steps", "3", "--seed", "5"],
    ] {
        let args: Vec<String> = args.iter().map(|a| if a.ends_with(".json") { path(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (run(&args), run(&args));
        assert!(a.status.success(), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let a = run(&["verify", "--seed", "3", "--count", "12", "--workers", "1"]);
    let b = run(&["verify", "--seed", "3", "--count", "12", "--workers", "4"]);
    assert_eq!(a.stdout, b.stdout);
}
