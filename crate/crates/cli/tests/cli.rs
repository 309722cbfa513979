use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn forge(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).args(args).current_dir(dir).output().expect("spawn forge")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn preset_then_analyze_b2() {
    let d = TempDir::new().unwrap();
    let o = forge(&["preset", "b2-w1212", "-o", "b2"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["presentation.json", "seed.json", "cartan.json", "word.txt"] {
        assert!(d.path().join("b2").join(f).exists(), "{f}");
    }
    assert_eq!(fs::read_to_string(d.path().join("b2/word.txt")).unwrap(), "1,2,1,2\n");

    let o = forge(&["analyze", "b2/presentation.json", "--check", "cgl,cond,dform", "-o", "report.json"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&d.path().join("report.json"));
    assert_eq!(r["eta"], serde_json::json!([1, 2, 1, 2]));
    for c in ["cgl", "cond", "dform"] {
        assert_eq!(r["checks"][c]["passed"], true, "{c}");
    }
}

#[test]
fn cond_fails_for_lastex_in_characteristic_three() {
    let d = TempDir::new().unwrap();
    let o = forge(&["analyze", "--preset", "lastex", "--check", "cond", "--char", "3"], d.path());
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("cond: FAIL"));
    for i in [1, 3, 4] {
        assert!(err.contains(&format!("i = {i}:")), "{err}");
    }
}

#[test]
fn verify_b2_passes_and_is_deterministic() {
    let d = TempDir::new().unwrap();
    let a = forge(&["verify", "--preset", "b2-w1212", "--jobs", "1", "-o", "a.json"], d.path());
    let b = forge(&["verify", "--preset", "b2-w1212", "--jobs", "4", "-o", "b.json"], d.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(code(&b), 0);
    assert_eq!(fs::read(d.path().join("a.json")).unwrap(), fs::read(d.path().join("b.json")).unwrap());
}

#[test]
fn verify_lastex_needs_wider_bounds() {
    let d = TempDir::new().unwrap();
    let narrow = forge(&["analyze", "--preset", "lastex", "--check", "laurent", "-o", "n.json"], d.path());
    assert_eq!(code(&narrow), 1);
    let msgs = json(&d.path().join("n.json"))["checks"]["laurent"]["messages"].as_array().unwrap().len();
    assert_eq!(msgs, 3);
    let wide = forge(&["analyze", "--preset", "lastex", "--check", "laurent", "--bounds", "3,6"], d.path());
    assert_eq!(code(&wide), 0, "{}", stderr(&wide));
}

#[test]
fn seeds_over_gamma() {
    let d = TempDir::new().unwrap();
    let o = forge(&["seed", "--preset", "b2-w1212", "--all-gamma", "-o", "seeds"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_dir(d.path().join("seeds")).unwrap().count(), 7);
    assert!(d.path().join("seeds/seed_1-2-3-4.json").exists());

    let o = forge(&["seed", "--preset", "b2-w1212", "--sigma", "2,1,3,4", "-o", "s.json"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = forge(&["seed", "--preset", "b2-w1212", "--sigma", "2,2,3,4", "-o", "s.json"], d.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not a permutation of 1..4"));
}

#[test]
fn mutation_script_round_trips() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&forge(&["preset", "b2-w1212", "-o", "b2"], d.path())), 0);
    let o = forge(
        &["mutate", "b2/seed.json", "--script", "m1 m1-", "--presentation", "b2/presentation.json", "-o", "back.json"],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let start = json(&d.path().join("b2/seed.json"));
    let back = json(&d.path().join("back.json"));
    assert_eq!(start["entries"], back["entries"]);
    assert_eq!(start["exp2"], back["exp2"]);

    let o = forge(&["mutate", "b2/seed.json", "--script", "m3", "-o", "x.json"], d.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("index 3 is not exchangeable"), "{}", stderr(&o));
    let o = forge(&["mutate", "b2/seed.json", "--script", "m9", "-o", "x.json"], d.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn blueprint_from_files_and_preset() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&forge(&["preset", "a2tw-01010", "-o", "a"], d.path())), 0);
    let word = fs::read_to_string(d.path().join("a/word.txt")).unwrap();
    let o = forge(&["blueprint", "--cartan", "a/cartan.json", "--word", word.trim(), "-o", "bp.json"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("compat: pass"));
    let o = forge(&["blueprint", "--preset", "a2tw-01010", "-o", "bp2.json"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(d.path().join("bp.json")).unwrap(), fs::read(d.path().join("bp2.json")).unwrap());

    let o = forge(&["blueprint", "--cartan", "a/cartan.json", "--word", "0,0", "-o", "bad.json"], d.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn quiver_export() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&forge(&["preset", "qweyl:2", "-o", "w"], d.path())), 0);
    let o = forge(&["quiver", "w/seed.json", "-o", "q.dot"], d.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dot = fs::read_to_string(d.path().join("q.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("->"));
}

#[test]
fn bad_input_exits_with_two() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("junk.json"), "{\"N\": 2, \"extra\": 1}").unwrap();
    assert_eq!(code(&forge(&["analyze", "junk.json"], d.path())), 2);
    assert_eq!(code(&forge(&["analyze", "missing.json"], d.path())), 2);
    assert_eq!(code(&forge(&["analyze", "--preset", "e8"], d.path())), 2);
    assert_eq!(code(&forge(&["analyze", "--preset", "b2-w1212", "--char", "4"], d.path())), 2);
    assert_eq!(code(&forge(&["frobnicate"], d.path())), 2);
}
