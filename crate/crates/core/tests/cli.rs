use std::path::{Path, PathBuf};

use delcards::cli::{run, CliOutcome};
use serde_json::{json, Value};

fn go(args: &[&str]) -> CliOutcome {
    run(std::iter::once("delcards").chain(args.iter().copied()))
}

fn json_of(out: &CliOutcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {:?}", out))
}

fn fano_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fano.json")
}

fn rcp31(dir: &Path) -> PathBuf {
    let path = dir.join("rcp31.json");
    let out = go(&["rcp", "build", "--k", "3", "--l", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    path
}

#[test]
fn model_check_against_a_built_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = rcp31(dir.path());
    let m = model.to_str().unwrap();

    let out = go(&["mc", "--model", m, "--world", "012|345|6", "--formula", "K[a] has(b,3)"]);
    assert_eq!((out.code, out.stdout.trim()), (1, "false"));
    let out = go(&["mc", "--model", m, "--world", "012|345|6", "--formula", "K[a] has(a,0)"]);
    assert_eq!((out.code, out.stdout.trim()), (0, "true"));

    assert_eq!(go(&["mc", "--model", m, "--world", "012|345|9", "--formula", "top"]).code, 2);
    assert_eq!(go(&["mc", "--model", m, "--world", "012|345|6", "--formula", "K[a has"]).code, 2);
    assert_eq!(go(&["mc", "--model", "/nonexistent.json", "--world", "x", "--formula", "top"]).code, 2);
}

#[test]
fn built_model_has_the_expected_shape() {
    let out = go(&["rcp", "build", "--k", "1", "--l", "1", "--deal", r#"{"a":[2],"b":[0],"c":[1]}"#]);
    assert_eq!(out.code, 0);
    let v = json_of(&out);
    assert_eq!(v["agents"], json!(["a", "b", "c"]));
    assert_eq!(v["worlds"].as_array().unwrap().len(), 6);
    let bad = go(&["rcp", "build", "--k", "1", "--l", "1", "--deal", r#"{"a":[0],"b":[0],"c":[1]}"#]);
    assert_eq!(bad.code, 2);
}

#[test]
fn world_cap_from_flag_and_environment() {
    assert_eq!(go(&["--world-cap", "139", "rcp", "build", "--k", "3", "--l", "1"]).code, 2);
    assert_eq!(go(&["--world-cap", "140", "rcp", "build", "--k", "3", "--l", "1"]).code, 0);

    let bin = env!("CARGO_BIN_EXE_delcards");
    let status = |cap: &str| {
        std::process::Command::new(bin)
            .args(["rcp", "build", "--k", "3", "--l", "1"])
            .env("DELCARDS_WORLD_CAP", cap)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status("139"), Some(2));
    assert_eq!(status("140"), Some(0));
    assert_eq!(status("lots"), Some(2));
}

#[test]
fn protocol_verify_and_run() {
    let file = fano_file();
    let out = go(&["protocol", "verify", "--file", file.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json_of(&out);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["world_counts"], json!([140, 28, 4]));

    let out = go(&["protocol", "run", "--file", file.to_str().unwrap(), "--strong"]);
    assert_eq!(out.code, 0);
    let v = json_of(&out);
    assert_eq!(v["actual"], "012|345|6@ann1@ann2");
    assert_eq!(v["steps"][0]["worlds"], 28);
    assert_eq!(v["report"]["strong"], true);
}

#[test]
fn failing_and_malformed_protocols() {
    let dir = tempfile::tempdir().unwrap();
    let weak = dir.path().join("weak.json");
    std::fs::write(&weak, r#"{"instance":{"k":3,"l":1},"steps":[{"by":"a","hands":[[0,1,2]]}]}"#).unwrap();
    let out = go(&["protocol", "verify", "--file", weak.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    assert_eq!(json_of(&out)["verdict"], false);

    let lie = dir.path().join("lie.json");
    std::fs::write(&lie, r#"{"instance":{"k":3,"l":1},"steps":[{"by":"a","formula":"has(b,3)"}]}"#).unwrap();
    let out = go(&["protocol", "verify", "--file", lie.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("step 1"), "{}", out.stderr);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"instance":{"k":3},"steps":[]}"#).unwrap();
    assert_eq!(go(&["protocol", "verify", "--file", broken.to_str().unwrap()]).code, 2);
}

#[test]
fn update_with_an_action_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    let out = go(&["rcp", "build", "--k", "1", "--l", "1", "--out", model.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    // a privately learns whether she holds card 0; b and c only see that she looked
    let action = dir.path().join("mu.json");
    std::fs::write(
        &action,
        r#"{"actions":[{"id":"yes","pre":"has(a,0)"},{"id":"no","pre":"~has(a,0)"}],
            "relations":{"a":[["yes"],["no"]],"b":[["yes","no"]],"c":[["yes","no"]]}}"#,
    )
    .unwrap();
    let out = go(&["update", "--model", model.to_str().unwrap(), "--action", action.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(json_of(&out)["worlds"].as_array().unwrap().len(), 6);

    let out = go(&["update", "--model", model.to_str().unwrap(), "--announce", "has(a,0)"]);
    assert_eq!(json_of(&out)["worlds"].as_array().unwrap().len(), 2);
}

#[test]
fn analysis_subcommands() {
    let out =
        go(&["lemma2", "--hands", "[[0,1,2],[0,3,4],[0,5,6],[1,3,5],[1,4,6],[2,3,6],[2,4,5]]", "--k", "3", "--l", "1"]);
    assert_eq!(out.code, 0);
    assert_eq!(json_of(&out)["safe"], true);

    let out = go(&["lemma2", "--hands", "[[0,1,2]]", "--k", "3", "--l", "1"]);
    assert_eq!(out.code, 1);
    assert_eq!(json_of(&out)["confirmed"]["K[c] ~has(a,3)"], true);

    let out = go(&["lemma2", "--hands", "[[0,1]]", "--k", "3", "--l", "1"]);
    assert_eq!(out.code, 2);

    let out = go(&[
        "lemma4",
        "pair",
        "--k",
        "3",
        "--l",
        "1",
        "--hands",
        "[[0,1,2],[0,3,4],[0,5,6],[1,3,5],[1,4,6],[2,3,6],[2,4,5]]",
    ]);
    assert_eq!(out.code, 1);
    assert_eq!(json_of(&out)["found"], false);

    let out = go(&["lemma4", "pair", "--k", "3", "--l", "1", "--hands", "[[0,1,2],[0,1,3],[4,5,6],[2,3,5]]"]);
    assert_eq!(out.code, 0);

    let out = go(&["sweep", "single", "--k", "2", "--l", "1", "--max-extra", "2", "--samples", "20", "--seed", "4"]);
    assert_eq!(out.code, 0);
    let v = json_of(&out);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["spec"]["seed"], 4);

    let out = go(&["ineq", "--k", "3"]);
    assert_eq!(out.code, 0);
    assert_eq!(json_of(&out)["lhs"], "9120");
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let args = ["two-ann", "--k", "2", "--l", "3", "--samples", "6", "--seed", "21", "--traces"];
    let a = go(&args);
    let b = go(&args);
    assert_eq!(a, b);
    assert!(matches!(a.code, 0 | 1));
    let v = json_of(&a);
    assert_eq!(v["traces"].as_array().unwrap().len(), 6);
    assert_eq!(v["passed"] == true, a.code == 0);
}
