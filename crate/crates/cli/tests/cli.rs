use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weavecurv")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    (out.status.code().unwrap(), value)
}

/// Writes the builtin web (optionally deformed) to a file under the target tmp dir.
fn builtin_file(n: usize, deform: Option<&str>) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let tag = deform.unwrap_or("none").replace('/', "_");
    let id = NEXT.fetch_add(1, Ordering::Relaxed);
    let name = format!("w0_{n}_{tag}_{}_{id}.json", std::process::id());
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let n = n.to_string();
    let mut args = vec!["builtin", "w0", "-n", &n];
    if let Some(c) = deform {
        args.extend(["--deform", c]);
    }
    let out = run(&args);
    assert!(out.status.success());
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

#[test]
fn rank_bound_values() {
    for (n, d, bound) in [(3, 6, 10), (3, 5, 4), (3, 4, 1), (2, 5, 6)] {
        let (code, v) = report(&["rank-bound", "-n", &n.to_string(), "-d", &d.to_string()]);
        assert_eq!(code, 0);
        assert_eq!(v["payload"]["bound"], bound);
        assert_eq!(v["command"][1], "rank-bound");
        assert!(v["seed"].is_null());
    }
    let (_, v) = report(&["rank-bound", "-n", "3", "-d", "6"]);
    assert_eq!(v["payload"]["levels"], serde_json::json!([3, 7, 10]));
}

#[test]
fn builtin_prints_a_bare_web_file() {
    let out = run(&["builtin", "w0", "-n", "3", "--deform", "c"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["n"].as_u64(), v["d"].as_u64()), (Some(3), Some(6)));
    assert_eq!(v["parameters"], serde_json::json!(["c"]));
    assert_eq!(v["fields"][0]["components"][0], "(x1+c)/(x3+c)");
    let out = run(&["builtin", "w0", "-n", "3", "--deform", "1/3"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["parameters"], serde_json::json!([]));
    assert_eq!(run(&["builtin", "nope", "-n", "3"]).status.code(), Some(2));
}

#[test]
fn matrices_of_the_six_web() {
    let web = builtin_file(3, None);
    let web = web.to_str().unwrap();
    let shape = |v: &Value| -> Vec<(String, u64, u64, u64)> {
        v["payload"]["matrices"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| {
                let f = |k: &str| m[k].as_u64().unwrap();
                (m["name"].as_str().unwrap().to_string(), f("rows"), f("cols"), f("rank"))
            })
            .collect()
    };
    let (code, v) = report(&["matrices", "--web", web, "--order", "2"]);
    assert_eq!(code, 0);
    assert_eq!(shape(&v)[0], ("M2".into(), 20, 30, 20));
    let (_, v) = report(&["matrices", "--web", web, "--order", "3"]);
    let p3 = shape(&v).into_iter().find(|m| m.0 == "P3").unwrap();
    assert_eq!(p3, ("P3".into(), 30, 30, 30));
}

#[test]
fn point_curvature_of_the_six_web_is_flat_and_deterministic() {
    let web = builtin_file(3, None);
    let args = ["check-max-rank", "--web", web.to_str().unwrap(), "--backend", "point", "--seed", "4"];
    let (code, a) = report(&args);
    assert_eq!(code, 0);
    assert_eq!(a["payload"]["verdict"], "FlatAtSampledPoints");
    assert_eq!(a["seed"], 4);
    assert_eq!(a["backend"], "point");
    let (_, b) = report(&args);
    assert_eq!(a["payload"], b["payload"]);
}

#[test]
fn deformed_web_has_a_witness_in_the_displayed_rows() {
    let web = builtin_file(3, Some("1/3"));
    let (code, v) = report(&["curvature", "--web", web.to_str().unwrap(), "--backend", "point", "--seed", "7"]);
    assert_eq!(code, 1);
    let p = &v["payload"];
    assert_eq!(p["verdict"], "NotFlat");
    let w = &p["witnesses"][0];
    assert_eq!((w["k"].as_u64(), w["m"].as_u64()), (Some(1), Some(2)));
    assert!((5..=7).contains(&w["row"].as_u64().unwrap()));
    assert!(w["col"].as_u64().unwrap() > 4);
    assert_eq!(p["matrices"][0]["zero_mask"][0], "0000000000");
}

#[test]
fn four_subweb_is_flat_symbolically() {
    let web = builtin_file(3, None);
    let (code, v) = report(&["curvature", "--web", web.to_str().unwrap(), "--subset", "1,2,3,4"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["verdict"], "FlatCertified");
    assert_eq!(v["payload"]["ro"], 1);
    assert!(v["seed"].is_null());
}

#[test]
fn subweb_nests() {
    let web = builtin_file(3, None);
    let (code, v) = report(&["subweb", "--web", web.to_str().unwrap(), "--keep", "1,2,3,4,5"]);
    assert_eq!(code, 0);
    assert_eq!((v["payload"]["ro"].as_u64(), v["payload"]["sub_ro"].as_u64()), (Some(10), Some(4)));
}

#[test]
fn flat_section_to_order_five() {
    let web = builtin_file(3, None);
    let (code, v) =
        report(&["flat-section", "--web", web.to_str().unwrap(), "--point", "2,3,5", "--init", "e1", "--order", "5"]);
    assert_eq!(code, 0);
    let check = &v["payload"]["relation_check"];
    assert_eq!(check["valid_to_order"], 4);
    assert_eq!(check["violated"], serde_json::json!([]));
    // Three unknowns, 56 derivatives each up to order 5 in three variables.
    assert_eq!(v["payload"]["terms"].as_array().unwrap().len(), 3 * 56);
}

#[test]
fn errors_exit_with_two() {
    let web = builtin_file(3, None);
    let web = web.to_str().unwrap();
    for args in [
        vec!["curvature", "--web", "/nonexistent/web.json"],
        vec!["curvature", "--web", web, "--backend", "point", "--prime", "7"],
        vec!["rank-bound", "-n", "3", "-d", "3"],
        vec!["subweb", "--web", web, "--keep", "1,2,4,5,6"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "), "{args:?}");
    }
    let bad = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("bad_syntax.json");
    let mut v: Value = serde_json::from_slice(&std::fs::read(builtin_file(3, None)).unwrap()).unwrap();
    v["fields"][0]["components"][0] = Value::from("x1 + * x2");
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(run(&["curvature", "--web", bad.to_str().unwrap()]).status.code(), Some(2));
}
