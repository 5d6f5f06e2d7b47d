use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn subshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subshift")).args(args).output().expect("spawn subshift")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

#[test]
fn set_on_golden_mean() {
    let o = subshift(&["set", &data("golden_mean.json"), "F(1) & Z(0)", "--range", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "empty"), Some("false"));
    assert_eq!(value(&out, "regular"), Some("true"));
    let o = subshift(&["set", &data("golden_mean.json"), "!X"]);
    assert_eq!(value(&stdout(&o), "set"), Some("∅"));
}

#[test]
fn chuva_cylinder_is_a_regular_singleton() {
    let o = subshift(&["set", &data("chuva.json"), "C(a_5,b_3)"]);
    let out = stdout(&o);
    assert_eq!(value(&out, "set"), Some("{b_3 (c)}"));
    assert_eq!(value(&out, "size"), Some("1"));
    assert_eq!(value(&out, "regular"), Some("true"));
}

#[test]
fn term_errors_exit_with_two() {
    let o = subshift(&["set", &data("golden_mean.json"), "Z(0) & Y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 8"));
}

#[test]
fn zero_rows_are_rejected() {
    let o = subshift(&["load", &data("matrix_zero_row.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no rows identically zero"));
}

#[test]
fn full_shift_satisfies_condition_l() {
    let out = stdout(&subshift(&["condition-l", &data("full2.json")]));
    assert_eq!(value(&out, "condition_l"), Some("true"));
    let out = stdout(&subshift(&["condition-l", &data("chuva.json")]));
    assert_eq!(value(&out, "condition_l"), Some("false"));
    assert_eq!(value(&out, "witness.verified"), Some("true"));
    assert_eq!(value(&out, "detector.agrees"), Some("true"));
}

#[test]
fn swap_codes_verify() {
    let c = data("chuva.json");
    let out = stdout(&subshift(&["conjugacy", &c, &c, &data("chuva_swap.json")]));
    assert_eq!(value(&out, "verified"), Some("true"), "{out}");
    let f = data("full2.json");
    let out = stdout(&subshift(&["conjugacy", &f, &f, &data("swap01.json")]));
    assert_eq!(value(&out, "verified"), Some("true"), "{out}");
    let g = data("golden_mean.json");
    let o = subshift(&["conjugacy", &g, &g, &data("golden_swap.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "verified"), Some("false"));
}

#[test]
fn undecided_stage_sequences_exit_with_one() {
    let o = subshift(&["ktheory", &data("even_shift.json"), "--bound-stages", "2", "--bound-atoms", "3"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(value(&stdout(&o), "undecided").is_some());
}

#[test]
fn otw_points() {
    let out = stdout(&subshift(&[
        "otw",
        &data("tripla.json"),
        "--fin",
        "0",
        "--fin",
        "0 5",
        "--point",
        "0 .",
        "--alpha",
        "0",
    ]));
    assert_eq!(value(&out, "zero_tail"), Some("true"));
    assert_eq!(value(&out, "fin[0]"), Some("true"));
    assert_eq!(value(&out, "fin[0 5]"), Some("false"));
    assert_eq!(value(&out, "point.shift"), Some("0->"));
}

#[test]
fn reports_are_deterministic_and_cache_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().display().to_string();
    for (file, cmd) in [("even_shift.json", "ktheory"), ("golden_mean.json", "relations"), ("matrix.json", "condition-l")] {
        let plain = stdout(&subshift(&[cmd, &data(file)]));
        let again = stdout(&subshift(&[cmd, &data(file)]));
        let cold = stdout(&subshift(&[cmd, &data(file), "--cache-dir", &cache]));
        let warm = stdout(&subshift(&[cmd, &data(file), "--cache-dir", &cache]));
        assert_eq!(plain, again, "{cmd} {file}");
        assert_eq!(cold, warm, "{cmd} {file}");
        assert_eq!(plain, cold, "{cmd} {file}");
    }
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 3);
}

#[test]
fn human_format_carries_the_same_pairs() {
    let kv = stdout(&subshift(&["load", &data("ultragraph.json")]));
    let human = stdout(&subshift(&["load", &data("ultragraph.json"), "--format", "human"]));
    assert_eq!(kv.lines().count(), human.lines().count());
    for (a, b) in kv.lines().zip(human.lines()) {
        let (k, v) = a.split_once('=').unwrap();
        assert!(b.starts_with(k) && b.trim_end().ends_with(v.trim_end()), "{a} / {b}");
    }
}
