use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hforge")).args(args).env_remove("HFORGE_WORKERS").output().expect("spawn")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = args.to_vec();
    full.extend(["-o", path.to_str().unwrap()]);
    let out = hforge(&full);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constructions_verify() {
    let dir = TempDir::new().unwrap();
    let cases: [(&str, &[&str]); 5] = [
        ("t1.json", &["construct", "theorem1", "--q", "7", "--sign", "-"]),
        ("t2.json", &["construct", "theorem2", "--q", "9"]),
        ("t3.json", &["construct", "theorem3", "--t", "3"]),
        ("w13.json", &["construct", "theorem2", "--q", "13"]),
        ("f6.json", &["construct", "fourier", "--n", "6"]),
    ];
    for (name, args) in cases {
        let path = write(&dir, name, args);
        let report = json(&hforge(&["verify", s(&path)]));
        assert_eq!(report["ok"], true, "{name}");
    }
    let w9 = json(&hforge(&["verify", s(&dir.path().join("t2.json"))]));
    assert_eq!(w9["n"], 9);
    assert_eq!(w9["exact"], true);
    assert_eq!(w9["radicand"], 15);
    let w13 = json(&hforge(&["verify", s(&dir.path().join("w13.json"))]));
    assert_eq!(w13["exact"], false);
    assert_eq!(w13["circulant"], true);
}

#[test]
fn fingerprint_of_p7() {
    let dir = TempDir::new().unwrap();
    let p7 = write(&dir, "p7.json", &["construct", "fixture", "P7"]);
    let fp = json(&hforge(&["invariant", "fingerprint", s(&p7), "--dmax", "3"]));
    assert_eq!(fp["n"], 7);
    let d3 = fp["spectra"][1]["pairs"].as_array().unwrap();
    assert_eq!(d3.len(), 12);
    assert_eq!(d3.iter().map(|p| p["mult"].as_u64().unwrap()).sum::<u64>(), 1225);
    let text = hforge(&["--format", "text", "invariant", "fingerprint", s(&p7), "--dmax", "2"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("d=2: (0, 54) (1, 114) (√3, 177) (2, 96)"));
    let lambda = json(&hforge(&["invariant", "haagerup", s(&p7)]));
    assert_eq!(lambda["backend"], "exact");
}

#[test]
fn compare_u15_v15() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.json", &["construct", "fixture", "U15"]);
    let v = write(&dir, "v.json", &["construct", "fixture", "V15"]);
    let out = json(&hforge(&["compare", s(&u), s(&v), "--dmax", "2"]));
    assert_eq!(out["verdict"], "inequivalent");
    assert_eq!(out["certificate"]["kind"], "haagerup");
    assert_eq!(out["certificate"]["numeric"], false);
    let same = json(&hforge(&["compare", s(&u), s(&u), "--dmax", "2"]));
    assert_ne!(same["verdict"], "inequivalent");
}

#[test]
fn census_is_reproducible_across_workers() {
    let dir = TempDir::new().unwrap();
    let h16 = write(&dir, "h16.json", &["construct", "sylvester", "--t", "4"]);
    let run = |workers: &str| {
        hforge(&["--workers", workers, "census", "--matrix", s(&h16), "--d", "8", "--count", "5000", "--seed", "7"])
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = json(&a);
    assert_eq!(c["count"], 5000);
    for k in c["histogram"].as_object().unwrap().keys() {
        let v: u64 = k.parse().unwrap();
        assert_eq!(v % 128, 0);
        assert!(!(28..=31).contains(&(v / 128)));
    }
}

#[test]
fn duality_and_exhaustive_census() {
    let dir = TempDir::new().unwrap();
    let h8 = write(&dir, "h8.json", &["construct", "sylvester", "--t", "3"]);
    assert!(hforge(&["duality", s(&h8), "--d", "2"]).status.success());
    let c = json(&hforge(&["census", "--matrix", s(&h8), "--d", "6", "--exhaustive"]));
    assert_eq!(c["count"], 784);
    assert!(c["histogram"].get("160").is_none());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"order":2,"rows":[[1,1],[1,1]]}"#).unwrap();
    assert_eq!(hforge(&["verify", s(&bad)]).status.code(), Some(1));
    assert_eq!(hforge(&["verify", s(&dir.path().join("missing.json"))]).status.code(), Some(2));
    std::fs::write(dir.path().join("junk.json"), "not json").unwrap();
    assert_eq!(hforge(&["verify", s(&dir.path().join("junk.json"))]).status.code(), Some(2));
    assert_eq!(hforge(&["construct", "fixture", "Q99"]).status.code(), Some(2));
    assert_eq!(hforge(&["frobnicate"]).status.code(), Some(2));
    let u = write(&dir, "u.json", &["construct", "fixture", "U15"]);
    let capped = hforge(&["--budget-minors", "10", "invariant", "fingerprint", s(&u)]);
    assert_eq!(capped.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("budget"));
}

#[test]
fn catalogue_lists_families() {
    let cat = json(&hforge(&["catalogue"]));
    let names: Vec<&str> = cat["families"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap()).collect();
    for expected in ["F_3", "P_7", "U_15", "V_15", "W_9A", "W_13A"] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    assert!(cat["families"].as_array().unwrap().iter().all(|f| f["verified"] == true));
}
