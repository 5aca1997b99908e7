use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use reqlens_core::{
    build_model, extract_stories, parse_source, print_class, satisfiable, truth_table_oracle,
    Formula, StoryRule,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn reqlens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reqlens"))
        .args(args)
        .current_dir(root())
        .env("REQLENS_COLOR", "never")
        .output()
        .expect("reqlens runs")
}

fn json(out: &Output) -> Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("report is not JSON: {e}"))
}

fn diagnostics(report: &Value) -> Vec<Value> {
    report["files"]
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|f| f["diagnostics"].as_array().cloned().unwrap_or_default())
        .collect()
}

fn with_code<'a>(diags: &'a [Value], code: &str) -> Vec<&'a Value> {
    diags.iter().filter(|d| d["code"] == code).collect()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const CORPUS: [&str; 3] = [
    "corpus/book.rsl",
    "corpus/library.rsl",
    "corpus/roborace.rsl",
];

fn corpus_classes() -> Vec<reqlens_core::ClassDecl> {
    CORPUS
        .iter()
        .flat_map(|f| {
            let text = std::fs::read_to_string(root().join(f)).unwrap();
            parse_source(f, &text).classes
        })
        .collect()
}

fn corpus_fidelity() -> Outcome {
    let mut args = vec!["parse", "--format", "json"];
    args.extend(CORPUS);
    let out = reqlens(&args);
    let report = json(&out)?;
    ensure(
        out.status.code() == Some(0),
        format!("exit {:?}", out.status.code()),
    )?;
    ensure(
        report["summary"]["errors"] == 0,
        "parse errors in the corpus",
    )?;
    let names: Vec<String> = corpus_classes().into_iter().map(|c| c.name).collect();
    for expected in [
        "BOOK",
        "LIBRARY",
        "LIBRARY_DRIVERS",
        "HOLDING_AVAILABLE_BOOKS_TEST",
        "LIBRARY_BOOK_USAGE",
        "RACE_CAR",
        "RACE_TRACK",
        "PLANNING_MODULE",
        "ROBORACE",
        "ROBORACE_USE_CASES",
    ] {
        ensure(
            names.iter().any(|n| n == expected),
            format!("class {expected} missing"),
        )?;
    }
    let model = build_model(corpus_classes()).map_err(|e| e.to_string())?;
    ensure(
        model
            .lookup_feature("LIBRARY_DRIVERS", "holding_available_books")
            .is_some(),
        "holding_available_books driver missing",
    )?;
    Ok(format!("0 parse errors, {} classes", names.len()))
}

fn chain_check() -> Outcome {
    let routine = "BOOK.borrow_and_return_book";
    let out = reqlens(&[
        "check",
        "--chain",
        "--routine",
        routine,
        "--format",
        "json",
        "corpus/book.rsl",
    ]);
    let report = json(&out)?;
    ensure(
        report["summary"]["errors"] == 0,
        "the corpus order breaks the chain",
    )?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let source = std::fs::read_to_string(root().join("corpus/book.rsl")).unwrap();
    let original = "            place_hold (p)\n            checkout (p)\n            return (p)\n";
    let mutated = "            checkout (p)\n            return (p)\n            place_hold (p)\n";
    ensure(source.contains(original), "corpus body not found")?;
    let path = dir.path().join("book.rsl");
    std::fs::write(&path, source.replace(original, mutated)).unwrap();
    let out = reqlens(&[
        "check",
        "--chain",
        "--routine",
        routine,
        "--format",
        "json",
        path.to_str().unwrap(),
    ]);
    let report = json(&out)?;
    let diags = diagnostics(&report);
    let breaks = with_code(&diags, "CHAIN_BREAK");
    ensure(
        breaks.len() == 1,
        format!("{} chain failures", breaks.len()),
    )?;
    ensure(report["summary"]["errors"] == 1, "other errors reported")?;
    let message = breaks[0]["message"].as_str().unwrap_or_default();
    ensure(
        message.starts_with("step 1 `checkout`"),
        format!("failure not at step 1: {message}"),
    )?;
    let witness = breaks[0]["witness"].as_object().ok_or("no witness")?;
    ensure(
        witness.get("is_on_hold") == Some(&Value::Bool(false)),
        "witness does not falsify is_on_hold",
    )?;
    ensure(
        witness.get("is_available") == Some(&Value::Bool(true)),
        "witness violates the require",
    )?;
    ensure(out.status.code() == Some(1), "exit code is not 1")?;
    Ok("0 failures in order; 1 failure at step 1 when checkout comes first".into())
}

fn stories_manifest(routine: &str, dir: &Path) -> Result<Vec<Value>, String> {
    let out = reqlens(&[
        "stories",
        "corpus",
        "--class",
        "ROBORACE_USE_CASES",
        "--routine",
        routine,
        "--out",
        dir.to_str().unwrap(),
    ]);
    ensure(
        out.status.code() == Some(0),
        format!("stories exit {:?}", out.status.code()),
    )?;
    let text = std::fs::read_to_string(dir.join("roborace_use_cases_stories.json"))
        .map_err(|e| e.to_string())?;
    serde_json::from_str::<Value>(&text)
        .map_err(|e| e.to_string())?
        .as_array()
        .cloned()
        .ok_or_else(|| "manifest is not an array".to_string())
}

fn story_counts() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let emergency = stories_manifest("emergency_stop", dir.path())?;
    ensure(
        emergency.len() == 2,
        format!("emergency_stop gives {}", emergency.len()),
    )?;
    let race = stories_manifest("race_no_obstacles", dir.path())?;
    ensure(
        race.len() == 5,
        format!("race_no_obstacles gives {}", race.len()),
    )?;
    let count = |rules: &[&str]| {
        race.iter()
            .filter(|s| rules.iter().any(|r| s["rule"] == *r))
            .count()
    };
    ensure(count(&["LOOP_EXIT"]) == 3, "loop exit stories are not 3")?;
    ensure(
        count(&[
            "IMPLICATION_ANTECEDENT_TRUE",
            "IMPLICATION_ANTECEDENT_FALSE",
        ]) == 2,
        "implication stories are not 2",
    )?;

    let model = build_model(corpus_classes()).map_err(|e| e.to_string())?;
    let stories = extract_stories(&model, "ROBORACE_USE_CASES", "emergency_stop")
        .map_err(|e| e.to_string())?;
    let listing = [
        "emergency_stop_red_flag_story require car.red_flag_is_up do emergency_stop end",
        "emergency_stop_location_error_story require car.location_error_is_detected do emergency_stop end",
    ];
    for (story, expected) in stories.iter().zip(listing) {
        ensure(story.rule == StoryRule::PreconditionDisjunct, "wrong rule")?;
        let text = story.routine_text().unwrap_or_default();
        let normalized = text.split_whitespace().collect::<Vec<_>>().join(" ");
        ensure(
            normalized == expected,
            format!("`{normalized}` differs from the listing"),
        )?;
    }
    Ok("2 and 5 (3 LOOP_EXIT + 2 implication); listings match".into())
}

fn consistency_finding() -> Outcome {
    let out = reqlens(&[
        "check",
        "corpus/roborace.rsl",
        "--routine",
        "ROBORACE_USE_CASES.race_no_obstacles",
        "--format",
        "json",
    ]);
    ensure(
        out.status.code() == Some(1),
        format!("exit {:?}", out.status.code()),
    )?;
    let report = json(&out)?;
    let diags = diagnostics(&report);
    let pre = with_code(&diags, "PRE_UNPROVEN");
    ensure(pre.len() == 1, format!("{} PRE_UNPROVEN", pre.len()))?;
    ensure(report["summary"]["errors"] == 1, "other errors reported")?;
    let message = pre[0]["message"].as_str().unwrap_or_default();
    ensure(
        message.contains("`car.is_in_normal_mode`") && message.contains("`safe_stop`"),
        format!("unexpected finding: {message}"),
    )?;
    let unknown = with_code(&diags, "UNKNOWN_CONTRACT").len();
    ensure(unknown >= 1, "no UNKNOWN_CONTRACT warning")?;
    let golden =
        std::fs::read(root().join("crates/cli/tests/golden/race_no_obstacles.json")).unwrap();
    ensure(golden == out.stdout, "report differs from the golden file")?;
    Ok(format!(
        "1 PRE_UNPROVEN on car.is_in_normal_mode, {unknown} UNKNOWN_CONTRACT, golden match"
    ))
}

fn flag_ordering() -> Outcome {
    let run = |routine: &str| -> Result<Vec<Value>, String> {
        let out = reqlens(&[
            "check",
            "corpus/roborace.rsl",
            "crates/cli/tests/fixtures/flag_drivers.rsl",
            "--routine",
            &format!("FLAG_DRIVERS.{routine}"),
            "--format",
            "json",
        ]);
        Ok(diagnostics(&json(&out)?))
    };
    let forward = run("yellow_then_red")?;
    let errors = forward.iter().filter(|d| d["severity"] == "error").count();
    ensure(errors == 0, format!("forward order gives {errors} errors"))?;
    let reversed = run("red_then_yellow")?;
    let errors: Vec<&Value> = reversed
        .iter()
        .filter(|d| d["severity"] == "error")
        .collect();
    ensure(
        errors.len() == 1 && errors[0]["code"] == "PRE_UNPROVEN",
        format!("reversed order gives {errors:?}"),
    )?;
    Ok("yellow then red: 0 errors; red then yellow: 1 PRE_UNPROVEN".into())
}

fn invariant_lint() -> Outcome {
    let out = reqlens(&["lint", "corpus", "--format", "json"]);
    let diags = diagnostics(&json(&out)?);
    let redundant = with_code(&diags, "REDUNDANT_INVARIANT");
    let book: Vec<&&Value> = redundant
        .iter()
        .filter(|d| {
            d["message"]
                .as_str()
                .unwrap_or_default()
                .contains("of BOOK ")
        })
        .collect();
    ensure(book.len() == 1, format!("{} BOOK flags", book.len()))?;
    ensure(
        book[0]["message"]
            .as_str()
            .unwrap_or_default()
            .contains("clause 4 "),
        "flagged clause is not clause 4",
    )?;
    ensure(
        !redundant.iter().any(|d| {
            d["message"]
                .as_str()
                .unwrap_or_default()
                .contains("RACE_CAR")
        }),
        "RACE_CAR flagged",
    )?;
    Ok("BOOK clause 4 redundant; RACE_CAR clean".into())
}

fn driver_gap() -> Outcome {
    let out = reqlens(&[
        "check",
        "corpus/library.rsl",
        "corpus/book.rsl",
        "--routine",
        "LIBRARY_DRIVERS.holding_available_books",
        "--format",
        "json",
    ]);
    let diags = diagnostics(&json(&out)?);
    let post = with_code(&diags, "POST_UNPROVEN");
    ensure(post.len() == 1, format!("{} POST_UNPROVEN", post.len()))?;
    let message = post[0]["message"].as_str().unwrap_or_default();
    ensure(
        message.contains("`not l.book_is_on_hold (b, p2, lb)`"),
        format!("wrong clause: {message}"),
    )?;
    let witness = post[0]["witness"].as_object().ok_or("no witness")?;
    ensure(
        witness.get("l.book_is_on_hold (b, p2, lb)") == Some(&Value::Bool(true)),
        "witness does not violate the clause",
    )?;
    Ok("final ensure clause unproven, witness holds p2's hold".into())
}

fn random_formula(rng: &mut StdRng, atoms: usize, depth: u32) -> Formula {
    if depth == 0 || rng.random_ratio(1, 4) {
        return Formula::query(&format!("v{}", rng.random_range(0..atoms)));
    }
    let a = random_formula(rng, atoms, depth - 1);
    match rng.random_range(0..4) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, atoms, depth - 1)),
        2 => Formula::or(a, random_formula(rng, atoms, depth - 1)),
        _ => Formula::implies(a, random_formula(rng, atoms, depth - 1)),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut sat = 0;
    for seed in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let atoms = rng.random_range(1..=12);
        let f = random_formula(&mut rng, atoms, 8);
        ensure(f.atoms().len() <= 12, "too many atoms")?;
        let expected = truth_table_oracle(&f).map_err(|e| e.to_string())?;
        let got = satisfiable(&f).map_err(|e| e.to_string())?;
        ensure(
            got.is_some() == expected,
            format!("seed {seed}: disagreement on {f}"),
        )?;
        if let Some(w) = got {
            ensure(w.satisfies(&f), format!("seed {seed}: bad witness {w}"))?;
            sat += 1;
        }
    }
    Ok(format!(
        "1000/1000 agree ({sat} satisfiable), all witnesses valid"
    ))
}

fn round_trips() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out_dir = dir.path().to_str().unwrap();
    for class in ["ROBORACE_USE_CASES", "LIBRARY_DRIVERS", "BOOK"] {
        let out = reqlens(&["testgen", "corpus", "--class", class, "--out", out_dir]);
        ensure(
            out.status.code() == Some(0),
            format!("testgen {class} exit {:?}", out.status.code()),
        )?;
    }
    let mut classes = corpus_classes();
    let mut generated = 0;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "rsl"))
        .collect();
    entries.sort();
    for path in &entries {
        let text = std::fs::read_to_string(path).unwrap();
        let parsed = parse_source(&path.to_string_lossy(), &text);
        ensure(
            parsed.diagnostics.iter().all(|d| !d.is_error()),
            format!("{} does not re-parse", path.display()),
        )?;
        generated += parsed.classes.len();
        classes.extend(parsed.classes);
    }
    ensure(
        entries
            .iter()
            .any(|p| p.ends_with("roborace_use_cases_stories.rsl")),
        "no stories class",
    )?;
    ensure(
        entries
            .iter()
            .any(|p| p.ends_with("roborace_use_cases_test.rsl")),
        "no test skeleton",
    )?;
    build_model(classes).map_err(|e| format!("generated classes do not resolve: {e}"))?;

    let mut printed = 0;
    for class in corpus_classes() {
        let text = print_class(&class);
        let again = parse_source("printed.rsl", &text);
        ensure(
            !again.has_errors(),
            format!("printed {} does not parse", class.name),
        )?;
        ensure(
            again.classes.len() == 1 && again.classes[0].without_trivia() == class.without_trivia(),
            format!("printing {} is not structurally idempotent", class.name),
        )?;
        printed += 1;
    }
    Ok(format!(
        "{generated} generated classes resolve; {printed} corpus classes print and re-parse"
    ))
}

fn determinism() -> Outcome {
    let first = reqlens(&["check", "corpus/", "--format", "json"]);
    let second = reqlens(&["check", "corpus/", "--format", "json"]);
    json(&first)?;
    ensure(!first.stdout.is_empty(), "empty report")?;
    ensure(first.stdout == second.stdout, "reports differ")?;
    Ok(format!("{} identical bytes", first.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("corpus fidelity", corpus_fidelity),
        ("chain check", chain_check),
        ("story counts", story_counts),
        ("consistency finding", consistency_finding),
        ("flag ordering", flag_ordering),
        ("invariant lint", invariant_lint),
        ("driver gap detection", driver_gap),
        ("logic oracle equivalence", oracle_equivalence),
        ("round-trips", round_trips),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
