use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn ugame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ugame"))
        .args(args)
        .env_remove("UG_MAX_ENUM")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn measure_identity_game_prints_one() {
    let o = ugame(&[
        "measure",
        "--in",
        &data("identity.game.json"),
        "--a",
        &data("identity.a.json"),
        "--b",
        &data("identity.b.json"),
        "--prefix",
        "l0 a b l1 a b l1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("1/1 "), "{}", stdout(&o));
}

#[test]
fn measure_semantics_flag() {
    let args = |sem: &'static str| {
        ugame(&[
            "measure",
            "--in",
            &data("chain.game.json"),
            "--a",
            &data("chain.a.json"),
            "--b",
            &data("chain.b.json"),
            "--prefix",
            "start go b start go b goal",
            "--semantics",
            sem,
        ])
    };
    let (l, j) = (args("literal"), args("joint"));
    // one action everywhere, so the literal and joint cones agree: 2/3 * 1/3
    assert!(stdout(&l).starts_with("2/9 "), "{}", stdout(&l));
    assert_eq!(stdout(&l), stdout(&j));
}

#[test]
fn undecidable_cell_needs_no_game() {
    let o = ugame(&[
        "solve",
        "--objective",
        "parity",
        "--mode",
        "almost",
        "--player2",
        "standard",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "Unsupported: undecidable (Table 1)");
}

#[test]
fn decidable_cell_without_game_is_a_usage_error() {
    let o = ugame(&["solve", "--objective", "reach", "--mode", "sure"]);
    assert_eq!(o.status.code(), Some(64), "{}", stderr(&o));
}

#[test]
fn solve_exit_codes_follow_the_verdict() {
    let g = data("chain.game.json");
    let win = ugame(&["solve", "--in", &g, "--mode", "positive"]);
    assert_eq!(
        (win.status.code(), stdout(&win).trim()),
        (Some(0), "winning")
    );
    let lose = ugame(&["solve", "--in", &g, "--mode", "sure"]);
    assert_eq!(
        (lose.status.code(), stdout(&lose).trim()),
        (Some(1), "losing")
    );
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let ap = ugame(&[
        "solve",
        "--in",
        &g,
        "--mode",
        "almost",
        "--player2",
        "all-powerful",
        "--witness",
        w.to_str().unwrap(),
    ]);
    assert_eq!(ap.status.code(), Some(0), "{}", stderr(&ap));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(v["initial_winning"], true);
    assert!(!v["strategy"].as_array().unwrap().is_empty());
    // the standard almost-sure reach cell is one without an implemented algorithm
    let two = ugame(&["solve", "--in", &g, "--mode", "almost"]);
    assert_eq!(two.status.code(), Some(2));
    assert!(stdout(&two).starts_with("Unsupported: 2EXPTIME"));
}

#[test]
fn flags_override_the_file_objective() {
    let g = data("chain.game.json");
    let o = ugame(&[
        "solve",
        "--in",
        &g,
        "--objective",
        "safe",
        "--target",
        "start",
        "--mode",
        "sure",
    ]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "losing"));
    // the blurred observation mixes priorities 1 and 2 in one knowledge set
    let o = ugame(&[
        "solve",
        "--in",
        &g,
        "--objective",
        "parity",
        "--priorities",
        "start=1,goal=2",
        "--mode",
        "sure",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stdout(&o).contains("inconclusive: priorities are not observable"),
        "{}",
        stdout(&o)
    );
    let id = data("identity.game.json");
    let o = ugame(&[
        "solve",
        "--in",
        &id,
        "--objective",
        "parity",
        "--priorities",
        "l0=1,l1=2",
        "--mode",
        "sure",
    ]);
    assert_eq!(
        (o.status.code(), stdout(&o).trim()),
        (Some(0), "winning"),
        "{}",
        stderr(&o)
    );
    let o = ugame(&[
        "solve",
        "--in",
        &id,
        "--objective",
        "parity",
        "--priorities",
        "l0=2,l1=1",
        "--mode",
        "sure",
    ]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "losing"));
    let o = ugame(&[
        "solve",
        "--in",
        &g,
        "--objective",
        "buchi",
        "--mode",
        "sure",
    ]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn malformed_file_exits_64_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    let text = std::fs::read_to_string(data("identity.game.json"))
        .unwrap()
        .replacen("\"1/1\"", "\"x/1\"", 1);
    std::fs::write(&p, text).unwrap();
    let o = ugame(&["reduce-forward", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    let e = stderr(&o);
    assert!(
        e.contains("line") && e.contains("delta[0].to[0].prob"),
        "{e}"
    );
}

#[test]
fn invalid_game_exits_65_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    let text = std::fs::read_to_string(data("chain.game.json"))
        .unwrap()
        .replacen("\"2/3\"", "\"1/3\"", 1);
    std::fs::write(&p, text).unwrap();
    let o = ugame(&["reduce-forward", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("sum"), "{}", stderr(&o));
}

#[test]
fn missing_file_and_unknown_flag() {
    let o = ugame(&["reduce-pomdp", "--in", "/nonexistent/m.json"]);
    assert_eq!(o.status.code(), Some(66));
    let o = ugame(&["verify", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(64));
    let o = ugame(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reduce_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    let o = ugame(&[
        "reduce-forward",
        "--in",
        &data("chain.game.json"),
        "--player2",
        "all-powerful",
        "--out",
        h.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (pog, prios) = ugame::format::load_pog(&h).unwrap();
    assert_eq!(pog.states.len(), 4 + 4);
    assert!(prios.is_some());

    let g = dir.path().join("g.json");
    let o = ugame(&[
        "reduce-pomdp",
        "--in",
        &data("blur.pomdp.json"),
        "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (game, obj) = ugame::format::load_game(&g).unwrap();
    assert_eq!(game.outputs.len(), 1);
    assert!(obj.is_some());
    // same reduction again, same bytes
    let g2 = dir.path().join("g2.json");
    ugame(&[
        "reduce-pomdp",
        "--in",
        &data("blur.pomdp.json"),
        "--out",
        g2.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&g).unwrap(), std::fs::read(&g2).unwrap());
}

#[test]
fn verify_reports_json_and_emits_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let emit = dir.path().join("inst");
    let o = ugame(&[
        "verify",
        "--lemma",
        "pomdp-obs-seq-formula",
        "--seed",
        "3",
        "--instances",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--emit-dir",
        emit.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);
    assert_eq!(v["all_verified"], true);
    assert_eq!(v["summary"][0]["verified"], 4);
    assert!(emit.join("m3-0.pomdp.json").exists());
    ugame::format::load_pomdp(&emit.join("m3-0.pomdp.json")).unwrap();
}

#[test]
fn verify_is_deterministic() {
    let a = ugame(&[
        "verify",
        "--lemma",
        "all",
        "--seed",
        "11",
        "--instances",
        "2",
        "--threads",
        "1",
    ]);
    let b = ugame(&[
        "verify",
        "--lemma",
        "all",
        "--seed",
        "11",
        "--instances",
        "2",
        "--threads",
        "4",
    ]);
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 14);
}

#[test]
fn enumeration_bound_is_enforced() {
    let o = Command::new(env!("CARGO_BIN_EXE_ugame"))
        .args(["verify", "--lemma", "ObsSeqConditional", "--instances", "1"])
        .env("UG_MAX_ENUM", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(65));
    assert!(
        stderr(&o).contains("enumeration bound exceeded"),
        "{}",
        stderr(&o)
    );
    let o = ugame(&["verify", "--lemma", "nope"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn sample_is_reproducible() {
    let args = [
        "sample",
        "--in",
        &data("chain.game.json"),
        "--a",
        &data("chain.a.json"),
        "--b",
        &data("chain.b.json"),
        "--depth",
        "2",
        "--seed",
        "9",
    ];
    let (a, b) = (ugame(&args), ugame(&args));
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["true_prefix"].as_array().unwrap().len(), 7);
    assert_eq!(v["actions"].as_array().unwrap().len(), 2);
}
