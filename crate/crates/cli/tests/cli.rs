use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chebgf::denominator::printed;
use chebgf::poly::{Poly, PolyJson};
use serde_json::Value;

fn chebgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebgf")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .expect("utf-8")
        .lines()
        .map(|l| serde_json::from_str(l).expect("each stdout line is JSON"))
        .collect()
}

fn validator(name: &str) -> jsonschema::Validator {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas");
    let mut opts = jsonschema::options();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let id = doc["$id"].as_str().unwrap().to_string();
        opts = opts.with_resource(id, jsonschema::Resource::from_contents(doc).unwrap());
    }
    let main: Value = serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap();
    opts.build(&main).expect("schema compiles")
}

fn assert_valid(schema: &str, v: &Value) {
    let val = validator(schema);
    let errs: Vec<String> = val.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errs.is_empty(), "{schema}: {errs:?}\n{v}");
}

fn poly_of(v: &Value) -> Poly {
    let j: PolyJson = serde_json::from_value(v.clone()).unwrap();
    Poly::from_json(&j).unwrap()
}

#[test]
fn w_build_two_is_the_displayed_denominator() {
    let out = chebgf(&["w", "build", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let l = lines(&out);
    assert_eq!(l.len(), 1);
    assert_valid("build.schema.json", &l[0]);
    assert_eq!(poly_of(&l[0]["poly"]), printed::w2());
    let rec = lines(&chebgf(&["w", "build", "--n", "2", "--recursive"]));
    assert_eq!(poly_of(&rec[0]["poly"]), printed::w2());
}

#[test]
fn chi_build_single_second_kind_has_unit_numerator() {
    let out = chebgf(&["chi", "build", "--k", "0", "--n", "1", "--t", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let l = lines(&out);
    assert_valid("build.schema.json", &l[0]);
    assert_eq!(poly_of(&l[0]["numerator"]), Poly::one());
    assert_eq!(poly_of(&l[0]["denominator"]), printed::w1());
    let spec = lines(&chebgf(&["chi", "build", "--spec", "0,1:0"]));
    assert_eq!(spec, l);
}

#[test]
fn exit_codes() {
    assert_eq!(chebgf(&["w", "check"]).status.code(), Some(0));
    // an unattainable tolerance is a verification failure, not an input error
    let tight = chebgf(&["chi", "verify", "--k", "1", "--n", "1", "--trials", "3", "--tol", "1e-30"]);
    assert_eq!(tight.status.code(), Some(1));
    assert_valid("chi_verify.schema.json", &lines(&tight)[0]);
    for bad in [
        &["w", "build", "--n", "9"][..],
        &["w", "build"],
        &["nonsense"],
        &["chi", "build", "--k", "1"],
        &["chi", "build", "--spec", "1,x"],
        &["chi", "eval", "--k", "1", "--n", "0", "--x", "2", "--rho", "0.1"],
        &["kibble", "eval", "--kind", "u", "--x", "0.1", "--rho", "12=0.3"],
        &["q", "check", "--suite", "d", "--q", "3/2"],
        &["verify", "all", "--criteria", "12"],
        &["--jobs", "0", "w", "check"],
    ] {
        assert_eq!(chebgf(bad).status.code(), Some(2), "{bad:?}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "seed = 3\ntrials = 4\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = &lines(&chebgf(&["--config", cfg, "chi", "verify", "--k", "0", "--n", "1"]))[0];
    assert_eq!(from_file["seed"], 3);
    assert_eq!(from_file["trials"], 4);
    let flagged = &lines(&chebgf(&["--config", cfg, "--seed", "11", "chi", "verify", "--k", "0", "--n", "1"]))[0];
    assert_eq!(flagged["seed"], 11);
    fs::write(dir.path().join("bad.toml"), "bogus = 1\n").unwrap();
    let bad = dir.path().join("bad.toml");
    assert_eq!(chebgf(&["--config", bad.to_str().unwrap(), "w", "check"]).status.code(), Some(2));
}

#[test]
fn kibble_verify_matches_schema() {
    let out = chebgf(&["kibble", "verify", "--n", "2", "--kind", "T", "--trials", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("kibble_verify.schema.json", &lines(&out)[0]);
    let den = lines(&chebgf(&["kibble", "denominator", "--n", "3"]));
    assert_valid("build.schema.json", &den[0]);
}

#[test]
fn verify_is_deterministic_and_mirrored() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ndjson");
    let args = ["verify", "all", "--seed", "7", "--criteria", "1,4,8"];
    let mut with_json = args.to_vec();
    with_json.extend(["--json", path.to_str().unwrap()]);
    let a = chebgf(&with_json);
    let b = chebgf(&args);
    let seq = chebgf(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, seq.stdout);
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
    let l = lines(&a);
    assert_eq!(l.iter().map(|v| v["criterion"].as_u64().unwrap()).collect::<Vec<_>>(), vec![1, 4, 8]);
    for v in &l {
        assert_valid("criterion.schema.json", v);
        assert_eq!(v["pass"], true);
    }
}
