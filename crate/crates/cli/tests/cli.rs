use std::path::PathBuf;
use std::process::{Command, Output};

fn bibound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bibound")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json on stdout")
}

fn value(report: &serde_json::Value, id: &str) -> f64 {
    report["entries"][id]["value"].as_f64().unwrap_or_else(|| panic!("{id} missing"))
}

#[test]
fn crown_five_all_bounds() {
    let o = bibound(&["bounds", "--family", "crown:5", "--all", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["entries"]["h"]["exact"], serde_json::json!({"num": 1, "den": 2}));
    for id in ["h", "h1", "h_hat"] {
        assert!((value(&r, id) - 0.5).abs() < 1e-6, "{id}");
    }
    assert!((value(&r, "g1") - 25.0 / 24.0).abs() < 1e-6);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
}

#[test]
fn pretty_output_uses_seven_digits_and_fractions() {
    let o = bibound(&["bounds", "--family", "crown:5", "--bound", "g1", "--bound", "h"]);
    let s = stdout(&o);
    assert!(s.contains("1.041667"), "{s}");
    assert!(s.contains("1/2"), "{s}");
}

#[test]
fn hypercube_four_h1() {
    let o = bibound(&["bounds", "--family", "hypercube:4", "--bound", "h1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((value(&json(&o), "h1") - 4.0 / 3.0).abs() < 1e-6);
}

#[test]
fn single_edge_file_balanced_bound() {
    let o = bibound(&["bounds", "--graph", &data("single_edge_2x2.json"), "--bound", "h_bal1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.6666667"), "{}", stdout(&o));
}

#[test]
fn csv_has_header_and_rows() {
    let o = bibound(&["bounds", "--family", "matching:4", "--bound", "h1", "--bound", "g1", "--csv"]);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "bound,value,exact,method,status,ms");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("h1,1,"));
    assert!(lines[2].starts_with("g1,4,"));
}

#[test]
fn exit_codes() {
    assert_eq!(bibound(&["bounds", "--family", "bogus:3"]).status.code(), Some(2));
    assert_eq!(bibound(&["bounds", "--graph", "/nonexistent/graph.json"]).status.code(), Some(2));
    assert_eq!(bibound(&["bounds", "--family", "crown:5", "--bound", "nope"]).status.code(), Some(2));
    assert_eq!(bibound(&["bounds", "--family", "path:4", "--bound", "h1"]).status.code(), Some(2));
    assert_eq!(bibound(&["bounds", "--family", "hypercube:4", "--bound", "h", "--budget", "3"]).status.code(), Some(3));
    assert_eq!(bibound(&["table", "hypercube", "--budget", "3"]).status.code(), Some(3));
    let o = bibound(&["bounds", "--family", "bogus:3"]);
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).expect("machine-readable error");
    assert_eq!(err["error"], "parse");
}

#[test]
fn family_grammar() {
    let cases = [
        ("matching:3", 3, 3, 3),
        ("crown:4", 4, 4, 12),
        ("kbip:2,3", 2, 3, 6),
        ("ebip:2,3", 2, 3, 0),
        ("hypercube:3", 4, 4, 12),
        ("cycle:6", 3, 3, 6),
        ("double:cycle:5", 5, 5, 10),
        ("xdouble:cycle:5", 5, 5, 15),
        ("cayley:z5:2,3", 5, 5, 10),
        ("cayley:z2xz2:1", 4, 4, 4),
    ];
    for (spec, n1, n2, m) in cases {
        let o = bibound(&["bounds", "--family", spec, "--bound", "alpha", "--json"]);
        assert_eq!(o.status.code(), Some(0), "{spec}");
        let graph = json(&o)["graph"].as_str().unwrap().to_string();
        assert_eq!(graph, format!("BipartiteGraph(n1={n1}, n2={n2}, m={m})"), "{spec}");
    }
    for (spec, n, m) in [("cycle:5", 5, 5), ("petersen", 10, 15), ("complete:4", 4, 6), ("path:3", 3, 2)] {
        let o = bibound(&["bounds", "--family", spec, "--bound", "alpha", "--json"]);
        assert_eq!(json(&o)["graph"], format!("Graph(n={n}, m={m})"), "{spec}");
    }
    for bad in ["crown", "crown:x", "crown:0", "kbip:3", "cycle:2", "cayley:z5", "cayley:q5:1", "hypercube:40"] {
        assert_eq!(bibound(&["bounds", "--family", bad]).status.code(), Some(2), "{bad}");
    }
}

#[test]
fn general_graph_report() {
    let o = bibound(&["bounds", "--family", "cycle:5", "--bound", "theta", "--bound", "alpha", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!((value(&r, "theta") - 5f64.sqrt()).abs() < 1e-6);
    assert_eq!(value(&r, "alpha"), 2.0);
}

#[test]
fn tables() {
    let o = bibound(&["table", "matching", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let t = json(&o);
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for row in rows {
        let n = row[0].as_f64().unwrap();
        assert!((row[2].as_f64().unwrap() - n / 4.0).abs() < 1e-6);
    }

    let t = json(&bibound(&["table", "crown", "--json"]));
    let last = t["rows"].as_array().unwrap().last().unwrap().clone();
    assert!((last[5].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6, "g1(crown 8)");
    assert!((last[7].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-6, "g1/g");

    let t = json(&bibound(&["table", "cycle", "--json"]));
    for row in t["rows"].as_array().unwrap() {
        if let (Some(h1), Some(f)) = (row[2].as_f64(), row[3].as_f64()) {
            assert!((h1 - f).abs() < 1e-6);
        }
        assert!((row[8].as_f64().unwrap() - row[9].as_f64().unwrap()).abs() < 1e-6);
    }

    let t = json(&bibound(&["table", "hypercube", "--json"]));
    for row in t["rows"].as_array().unwrap() {
        assert_eq!(row[1], row[2], "alpha_bal = a(r-1)");
    }

    let s = stdout(&bibound(&["table", "crown", "--from", "5", "--to", "5", "--csv"]));
    assert_eq!(s.lines().nth(1).unwrap(), "5,1/2,0.5,0.5,1,1.041667,25/24,1.041667");
    assert_eq!(bibound(&["table", "crown", "--from", "5", "--to", "3"]).status.code(), Some(2));
}

#[test]
fn gadget_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("bibound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("h.json");
    let out_s = out.to_string_lossy().into_owned();
    // Two disjoint edges meet the edge-count condition and contain a clique
    // on half the vertices.
    let g = dir.join("g.json");
    std::fs::write(&g, r#"{"type":"general","n":4,"edges":[[0,1],[2,3]]}"#).unwrap();
    let o = bibound(&["gadget", "--graph", &g.to_string_lossy(), "--out", &out_s, "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let flags: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(flags["half_size_clique"], true);
    assert_eq!(flags["alpha_equals_alpha_bal"], true);
    let back = bibound(&["bounds", "--graph", &out_s, "--bound", "alpha", "--bound", "alpha_bal", "--json"]);
    let r = json(&back);
    assert_eq!(value(&r, "alpha"), value(&r, "alpha_bal"));

    let o = bibound(&["gadget", "--family", "path:4", "--check"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bibound(&["gadget", "--family", "path:4", "--kind", "half-size"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["type"], "general");
    let o = bibound(&["gadget", "--family", "cycle:5", "--kind", "xdouble"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 15);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn group_tools() {
    let o = bibound(&["group", "--group", "z5", "--set", "2,3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["max_product_free"]["size"], 2);
    assert_eq!(v["product_free"], true);
    assert!(v["spectral"]["lambda2"].as_f64().unwrap() <= 6f64.sqrt());
    assert_eq!(v["spectral"]["cap"], 2.5);

    let v = json(&bibound(&["group", "--group", "s3", "--json"]));
    assert_eq!(v["order"], 6);
    assert_eq!(v["abelian"], false);
    assert_eq!(v["max_product_free"]["size"], 3);

    let dir = std::env::temp_dir().join(format!("bibound-group-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("z4.json");
    let cayley = dir.join("cay.json");
    let o = bibound(&[
        "group", "--group", "z4", "--set", "1,3", "--emit", &table.to_string_lossy(), "--cayley",
        &cayley.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&bibound(&["group", "--table", &table.to_string_lossy(), "--json"]));
    assert_eq!(v["order"], 4);
    let r = json(&bibound(&["bounds", "--graph", &cayley.to_string_lossy(), "--bound", "h", "--json"]));
    assert_eq!(value(&r, "h"), 1.0);

    std::fs::write(dir.join("bad.json"), r#"{"order":2,"table":[[0,1],[0,1]]}"#).unwrap();
    let o = bibound(&["group", "--table", &dir.join("bad.json").to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_single_suite() {
    let o = bibound(&["verify", "groups", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS groups:"));
    assert_eq!(bibound(&["verify", "nonsense"]).status.code(), Some(2));
}
