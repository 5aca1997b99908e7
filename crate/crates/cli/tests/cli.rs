use std::path::PathBuf;

use reqlens_cli::{run_with, Io, EXIT_FINDINGS, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str], color: bool) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("reqlens").chain(args.iter().copied());
    let code = run_with(
        argv,
        &mut Io {
            out: &mut out,
            err: &mut err,
            color,
        },
    );
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.out).unwrap()
}

#[test]
fn book_scenario_exits_zero() {
    let book = corpus("book.rsl");
    let r = run(
        &["check", &book, "--routine", "BOOK.borrow_and_return_book"],
        false,
    );
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
    assert!(r.out.ends_with("0 errors, 0 warnings, 0 infos\n"));
}

#[test]
fn parse_without_files_is_a_usage_error() {
    let r = run(&["parse"], false);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("Usage"));
    assert!(r.out.is_empty());
}

#[test]
fn unknown_subcommand_and_bad_format_are_usage_errors() {
    assert_eq!(run(&["frobnicate"], false).code, EXIT_USAGE);
    let book = corpus("book.rsl");
    assert_eq!(
        run(&["check", &book, "--format", "xml"], false).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["check", &book, "--routine", "BOOK"], false).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["check", &book, "--routine", "BOOK.nothing"], false).code,
        EXIT_USAGE
    );
    assert_eq!(
        run(&["check", &book, "--routine", "BOOK.checkout"], false).code,
        EXIT_USAGE
    );
}

#[test]
fn every_missing_file_is_reported() {
    let book = corpus("book.rsl");
    let r = run(
        &["parse", "/nonexistent/a.rsl", &book, "/nonexistent/b.rsl"],
        false,
    );
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("/nonexistent/a.rsl"));
    assert!(r.err.contains("/nonexistent/b.rsl"));
}

#[test]
fn help_and_version_exit_zero() {
    let r = run(&["--version"], false);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(run(&["check", "--help"], false).code, EXIT_OK);
}

#[test]
fn race_json_report_shape() {
    let roborace = corpus("roborace.rsl");
    let r = run(
        &[
            "check",
            &roborace,
            "--routine",
            "ROBORACE_USE_CASES.race_no_obstacles",
            "--format",
            "json",
        ],
        false,
    );
    assert_eq!(r.code, EXIT_FINDINGS);
    let report = json(&r);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["tool"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["inputs"][0], roborace.as_str());
    assert_eq!(report["summary"]["errors"], 1);
    let diags = report["files"][0]["diagnostics"].as_array().unwrap();
    let pre: Vec<&Value> = diags
        .iter()
        .filter(|d| d["code"] == "PRE_UNPROVEN")
        .collect();
    assert_eq!(pre.len(), 1);
    assert!(pre[0]["message"]
        .as_str()
        .unwrap()
        .contains("car.is_in_normal_mode"));
    assert_eq!(pre[0]["witness"]["car.is_in_normal_mode"], false);
    for d in diags {
        for key in [
            "severity", "code", "file", "line", "column", "message", "witness",
        ] {
            assert!(d.get(key).is_some(), "{key} missing in {d}");
        }
    }
}

#[test]
fn text_and_json_report_the_same_diagnostics() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let dir = dir.to_string_lossy();
    let text = run(&["check", &dir], false);
    let report = run(&["check", &dir, "--format", "json"], false);
    assert_eq!(text.code, report.code);
    let report = json(&report);
    let from_json: Vec<String> = report["files"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|f| f["diagnostics"].as_array().unwrap().iter())
        .map(|d| {
            format!(
                "{}:{}:{}: {}[{}]",
                d["file"].as_str().unwrap(),
                d["line"],
                d["column"],
                d["severity"].as_str().unwrap(),
                d["code"].as_str().unwrap()
            )
        })
        .collect();
    let from_text: Vec<String> = text
        .out
        .lines()
        .filter(|l| !l.starts_with(' ') && l.contains('['))
        .map(|l| l.split("]: ").next().unwrap().to_string() + "]")
        .collect();
    assert_eq!(from_json, from_text);
    let s = &report["summary"];
    assert!(text.out.contains(&format!("{} errors", s["errors"])));
}

#[test]
fn color_only_when_enabled() {
    let roborace = corpus("roborace.rsl");
    let args = [
        "check",
        &roborace,
        "--routine",
        "ROBORACE_USE_CASES.race_no_obstacles",
    ];
    let plain = run(&args, false);
    let colored = run(&args, true);
    assert!(!plain.out.contains('\x1b'));
    assert!(colored.out.contains("\x1b[1;31merror[PRE_UNPROVEN]\x1b[0m"));
}

#[test]
fn chain_mode_falls_back_on_structured_bodies() {
    let roborace = corpus("roborace.rsl");
    let r = run(
        &[
            "check",
            &roborace,
            "--chain",
            "--routine",
            "ROBORACE_USE_CASES.race_no_obstacles",
        ],
        false,
    );
    assert!(r.out.contains("warning[NOT_A_PLAIN_SEQUENCE]"));
    assert!(r.out.contains("error[PRE_UNPROVEN]"));
}

#[test]
fn lint_reports_book_clause_four() {
    let r = run(&["lint", &corpus("book.rsl")], false);
    assert_eq!(r.code, EXIT_OK);
    assert!(r
        .out
        .contains("info[REDUNDANT_INVARIANT]: invariant clause 4"));
}

#[test]
fn parse_errors_stop_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.rsl");
    std::fs::write(&path, "class BROKEN feature\n    f\n        require\n            a and\n        do\n        end\nend\n").unwrap();
    let r = run(
        &["check", path.to_str().unwrap(), "--format", "json"],
        false,
    );
    assert_eq!(r.code, EXIT_FINDINGS);
    let report = json(&r);
    assert_eq!(report["files"][0]["diagnostics"][0]["code"], "PARSE_ERROR");
}

#[test]
fn resolution_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orphan.rsl");
    std::fs::write(
        &path,
        "class ORPHAN inherit NOWHERE feature\n    a: BOOLEAN\nend\n",
    )
    .unwrap();
    let r = run(&["lint", path.to_str().unwrap()], false);
    assert_eq!(r.code, EXIT_FINDINGS);
    assert!(r.out.contains("error[RESOLUTION_ERROR]"));
}

#[test]
fn stories_to_stdout_and_to_files() {
    let roborace = corpus("roborace.rsl");
    let r = run(
        &[
            "stories",
            &roborace,
            "--class",
            "ROBORACE_USE_CASES",
            "--routine",
            "emergency_stop",
        ],
        false,
    );
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("-- Use-case stories extracted from ROBORACE_USE_CASES\nclass ROBORACE_USE_CASES_STORIES inherit ROBORACE_USE_CASES"));
    assert!(r.out.contains("emergency_stop_location_error_story"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = run(
        &[
            "stories",
            &roborace,
            "--class",
            "ROBORACE_USE_CASES",
            "--out",
            out,
        ],
        false,
    );
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.is_empty());
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("roborace_use_cases_stories.json")).unwrap(),
    )
    .unwrap();
    let rows = manifest.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for key in [
        "class",
        "routine",
        "rule",
        "condition",
        "story_name",
        "emitted_file",
    ] {
        assert!(rows[0].get(key).is_some(), "{key}");
    }
    assert_eq!(rows[0]["emitted_file"], "roborace_use_cases_stories.rsl");
    assert!(r.err.contains("info[NOTHING_TO_EXTRACT]"));
}

#[test]
fn stories_with_nothing_to_extract_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen");
    let r = run(
        &[
            "stories",
            &corpus("roborace.rsl"),
            "--class",
            "ROBORACE_USE_CASES",
            "--routine",
            "safe_stop",
            "--out",
            out.to_str().unwrap(),
        ],
        false,
    );
    assert_eq!(r.code, EXIT_OK);
    assert!(!out.exists());
    assert!(r.err.contains("NOTHING_TO_EXTRACT"));
}

#[test]
fn testgen_writes_skeleton_stories_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = run(
        &[
            "testgen",
            &corpus("roborace.rsl"),
            "--class",
            "ROBORACE_USE_CASES",
            "--out",
            out,
        ],
        false,
    );
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let test = std::fs::read_to_string(dir.path().join("roborace_use_cases_test.rsl")).unwrap();
    assert!(test.contains("class ROBORACE_USE_CASES_TEST inherit ROBORACE_USE_CASES_STORIES"));
    assert!(test.contains("test_emergency_stop_red_flag_story"));
    assert!(test.contains("create car.make -- TODO: supply creation arguments"));
    assert!(dir.path().join("roborace_use_cases_stories.rsl").exists());
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("roborace_use_cases_test.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest[0]["routine"], "test_safe_stop");
    assert_eq!(manifest[0]["oracle_clauses"][0], "not car.is_moving");
    let first = manifest
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["routine"] == "test_emergency_stop_red_flag_story")
        .unwrap();
    assert_eq!(first["test_class"], "ROBORACE_USE_CASES_TEST");
    assert_eq!(first["story_name"], "emergency_stop_red_flag_story");
    assert_eq!(first["oracle_clauses"][2], "car.red_flag_is_up");
}

#[test]
fn unknown_class_for_generators_is_a_usage_error() {
    let r = run(&["testgen", &corpus("book.rsl"), "--class", "NOPE"], false);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("unknown class NOPE"));
}
