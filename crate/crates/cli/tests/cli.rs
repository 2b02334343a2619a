use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_idealforge")).args(args).output().unwrap();
    let text = match args.iter().position(|&a| a == "--output") {
        Some(i) => std::fs::read(args[i + 1]).unwrap(),
        None => out.stdout,
    };
    let v: Value = serde_json::from_slice(&text)
        .unwrap_or_else(|e| panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&text)));
    (out.status.code().unwrap(), v["body"].clone())
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("idealforge-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn w_summable_example() {
    let (code, body) = run(&["adversary", "--strategy", "w-summable", "--phi", "identity", "--nmax", "3"]);
    assert_eq!(code, 0);
    assert_eq!(body["transcript"]["steps"][2]["chosen"], json!([24, 25, 26]));
    assert_eq!(body["transcript"]["certificate"]["sum"], json!("5791/8775"));
    assert_eq!(body["passed"], json!(true));
}

#[test]
fn oracle_and_fs_examples() {
    let (code, body) = run(&["oracle", "--ideal", "vdw", "--ap-len", "3", "--set", "pow2(8)"]);
    assert_eq!(code, 0);
    assert_eq!(body["positive"], json!(false));

    let (_, body) = run(&["oracle", "--ideal", "ramsey", "--edges", "0-1 1-2 0-2 2-3", "--clique-size", "3"]);
    assert_eq!(body["positive"], json!(true));
    assert_eq!(body["clique"], json!([0, 1, 2]));

    let (_, body) = run(&["fs", "--op", "very-sparse-subset", "--pool", "1..50", "--k", "4"]);
    assert_eq!(body["subset"], json!([1, 3, 9, 27]));

    let (_, body) = run(&["fs", "--op", "alpha", "--set", "1,3,9", "--x", "10"]);
    assert_eq!(body["alpha"], json!([1, 9]));
}

#[test]
fn exit_codes() {
    let (code, body) = run(&["adversary", "--strategy", "w-summable", "--phi", "const:0", "--nmax", "2", "--window", "50"]);
    assert_eq!(code, 2);
    assert_eq!(body["error"]["code"], json!("SearchExhausted"));

    let (code, body) = run(&[
        "search", "--src-ideal", "summable", "--src-ground", "segment:0..2", "--dst-ideal", "vdw", "--dst-ground",
        "segment:0..4", "--ap-len", "3", "--tau", "10",
    ]);
    assert_eq!(code, 2);
    assert_eq!(body["outcome"]["outcome"], json!("exhausted"));

    let (code, body) = run(&["fs", "--op", "fs", "--set", "1,,x"]);
    assert_eq!(code, 1);
    assert_eq!(body["error"]["code"], json!("ParseError"));

    let (code, body) = run(&["oracle", "--ideal", "vdw", "--set", "1,2", "--ap-len", "2"]);
    assert_eq!(code, 1);
    assert_eq!(body["error"]["code"], json!("InvalidParams"));

    let out = Command::new(env!("CARGO_BIN_EXE_idealforge")).args(["fs", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn incomplete_pair_table() {
    let dir = Scratch::new("incomplete");
    let mut text = String::new();
    for j in 0..6 {
        for i in 0..j {
            if (i, j) != (2, 5) {
                text.push_str(&format!("{i} {j} 1\n"));
            }
        }
    }
    let table = dir.file("phi.txt", &text);
    let (code, body) = run(&["canonize", "--op", "find-subset", "--phi", &table, "--window", "6", "--m", "3"]);
    assert_eq!(code, 1);
    assert_eq!(body["error"]["code"], json!("Incomplete"));
    assert!(body["error"]["message"].as_str().unwrap().contains("2 5"));
}

#[test]
fn transcripts_round_trip_through_verify() {
    let dir = Scratch::new("round-trip");
    let report = dir.path("w.json");
    let (code, _) = run(&["adversary", "--strategy", "w-summable", "--phi", "square", "--nmax", "6", "--output", &report]);
    assert_eq!(code, 0);
    let (code, body) = run(&["verify", "--kind", "transcript", "--input", &report, "--phi", "square"]);
    assert_eq!(code, 0);
    assert_eq!(body["passed"], json!(true), "{body}");

    // a coloring that disagrees on a recorded point is caught
    let (_, body) = run(&["verify", "--kind", "transcript", "--input", &report, "--phi", "identity"]);
    assert_eq!(body["passed"], json!(false));

    // so is a tampered certificate
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    v["body"]["transcript"]["certificate"]["sum"] = json!("1/2");
    let tampered = dir.file("tampered.json", &v.to_string());
    let (_, body) = run(&["verify", "--kind", "transcript", "--input", &tampered, "--phi", "square"]);
    assert_eq!(body["passed"], json!(false));
}

#[test]
fn r_hindman_report_rechecks() {
    let dir = Scratch::new("hnr");
    let mut text = String::new();
    for j in 0..16 {
        for i in 0..j {
            let v = match (i, j) {
                (0, 1) => 1,
                (0, _) => 3,
                (1, _) => 4,
                _ => 9,
            };
            text.push_str(&format!("{i} {j} {v}\n"));
        }
    }
    let table = dir.file("f.txt", &text);
    let report = dir.path("r.json");
    let common = ["--fs-size", "2", "--budget-max-element", "16", "--nmax", "3", "--candidate-cap", "4"];
    let mut args = vec!["adversary", "--strategy", "r-hindman", "--phi", &table, "--basis", "1,3,9,27", "--output", &report];
    args.extend(common);
    let (code, _) = run(&args);
    assert_eq!(code, 0);
    for kind in ["hnr", "transcript"] {
        let mut args = vec!["verify", "--kind", kind, "--input", &report, "--phi", &table, "--basis", "1,3,9,27"];
        args.extend(common);
        let (code, body) = run(&args);
        assert_eq!((code, &body["passed"]), (0, &json!(true)), "{kind}: {body}");
    }
    let mut args = vec!["verify", "--kind", "replay", "--input", &report, "--phi", &table, "--basis", "1,3,9,27", "--set", "1,3"];
    args.extend(common);
    let (_, body) = run(&args);
    assert_eq!(body["passed"], json!(true), "{body}");
}

#[test]
fn rnh_bundle_from_files() {
    let dir = Scratch::new("rnh");
    let x: Vec<u64> = (0..10).map(|i| 3u64.pow(i)).collect();
    let mut gamma = String::from("# y z0 z1\n");
    for mask in 1u32..1 << 10 {
        let y: u64 = (0..10).filter(|i| mask >> i & 1 == 1).map(|i| x[i]).sum();
        let row = if y == 6561 { 3 } else if mask & 0b10 != 0 { 1 } else { 0 };
        gamma.push_str(&format!("{y} {} {row}\n", y + 1));
    }
    let gamma = dir.file("gamma.txt", &gamma);
    let bundle = json!({
        "case": "1",
        "k": 0,
        "d": x,
        "xs": [1, 27, 243],
        "ds": [[27, 81, 243, 729, 2187, 6561], [243, 729, 2187, 6561], [729, 2187]],
    });
    let input = dir.file("bundle.json", &bundle.to_string());
    let basis = "1,3,9,27,81,243,729,2187,6561,19683";
    let (code, body) = run(&["verify", "--kind", "rnh", "--input", &input, "--gamma", &gamma, "--basis", basis]);
    assert_eq!(code, 0);
    assert_eq!(body["passed"], json!(true), "{body}");
}

#[test]
fn reduction_input_rejects_unknown_keys() {
    let dir = Scratch::new("reduction");
    let spec = json!({
        "id": "VDW",
        "params": { "ap_len": 3, "clique_size": 3, "fs_size": 2, "tau": "2/1", "window": 64 },
        "ground": { "kind": "segment", "start": 0, "end": 5 },
    });
    let good = dir.file("good.json", &json!({ "src": spec, "dst": spec, "map": [0, 1, 2, 3, 4] }).to_string());
    let (code, body) = run(&["verify", "--kind", "reduction", "--input", &good]);
    assert_eq!((code, &body["passed"]), (0, &json!(true)));

    let bad = dir.file("bad.json", &json!({ "src": spec, "dst": spec, "map": [0, 0, 0, 0, 0], "extra": 1 }).to_string());
    let (code, body) = run(&["verify", "--kind", "reduction", "--input", &bad]);
    assert_eq!(code, 1);
    assert_eq!(body["error"]["code"], json!("MalformedJson"));
}
