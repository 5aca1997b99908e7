use std::path::PathBuf;

use reqlens_core::checker::lint_class_names;
use reqlens_core::stories::{story_class, story_manifest};
use reqlens_core::testgen::build_test_skeletons;
use reqlens_core::*;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn read(name: &str) -> (String, String) {
    let path = corpus_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    (format!("corpus/{name}"), text)
}

fn parse_all() -> Vec<SourceFile> {
    ["book.rsl", "library.rsl", "roborace.rsl"]
        .iter()
        .map(|n| {
            let (file, text) = read(n);
            parse_source(&file, &text)
        })
        .collect()
}

/// BOOK and LIBRARY_BOOK_USAGE both declare `borrow_and_return_book`, in
/// different classes, so one model over all files is fine.
fn model() -> Model {
    let classes = parse_all().into_iter().flat_map(|f| f.classes).collect();
    build_model(classes).unwrap()
}

fn codes(diags: &[Diagnostic]) -> Vec<Code> {
    diags.iter().map(|d| d.code).collect()
}

fn errors(diags: &[Diagnostic]) -> Vec<&Diagnostic> {
    diags.iter().filter(|d| d.is_error()).collect()
}

#[test]
fn corpus_parses_without_errors() {
    let files = parse_all();
    for f in &files {
        assert!(!f.has_errors(), "{:#?}", f.diagnostics);
    }
    let names: Vec<&str> = files
        .iter()
        .flat_map(|f| f.classes.iter().map(|c| c.name.as_str()))
        .collect();
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
        "ROBORACE_USE_CASE_STORIES",
    ] {
        assert!(names.contains(&expected), "missing {expected}");
    }
}

#[test]
fn roborace_parse_diagnostics() {
    let (file, text) = read("roborace.rsl");
    let parsed = parse_source(&file, &text);
    let found: Vec<(Code, u32)> = parsed
        .diagnostics
        .iter()
        .map(|d| (d.code, d.location.line))
        .collect();
    // the `across` postcondition and the capitalized `Note`
    assert_eq!(found.len(), 2, "{found:?}");
    assert!(found.iter().any(|(c, _)| *c == Code::OpaqueAtom));
    assert!(found.iter().any(|(c, _)| *c == Code::NoteCapitalized));
}

#[test]
fn book_structure() {
    let m = model();
    let book = m.class("BOOK").unwrap();
    assert_eq!(book.invariant().len(), 4);
    assert!(book.is_deferred());
    let kinds: Vec<(&str, FeatureKind)> = book
        .features()
        .iter()
        .map(|f| (f.decl.name.as_str(), f.decl.kind()))
        .collect();
    assert_eq!(
        kinds,
        [
            ("is_available", FeatureKind::BooleanQuery),
            ("is_on_hold", FeatureKind::BooleanQuery),
            ("is_checked_out", FeatureKind::BooleanQuery),
            ("place_hold", FeatureKind::Command),
            ("checkout", FeatureKind::Command),
            ("return", FeatureKind::Command),
            ("borrow_and_return_book", FeatureKind::ScenarioRoutine),
        ]
    );
    let stories = m.class("ROBORACE_USE_CASE_STORIES").unwrap();
    assert_eq!(
        stories.feature("emergency_stop").unwrap().origin,
        "ROBORACE_USE_CASES"
    );
}

#[test]
fn race_no_obstacles_body_shape() {
    let m = model();
    let f = &m
        .lookup_feature("ROBORACE_USE_CASES", "race_no_obstacles")
        .unwrap()
        .decl;
    let body = f.body().unwrap();
    let mut calls = 0;
    let mut opaque = 0;
    let mut loops = 0;
    let mut conditionals = 0;
    body.walk(&mut |s| match s {
        Statement::Call(_) => calls += 1,
        Statement::Opaque(_) => opaque += 1,
        Statement::Loop { .. } => loops += 1,
        Statement::Conditional { .. } => conditionals += 1,
    });
    assert_eq!((loops, conditionals), (1, 2));
    // update_speed, move, emergency_stop, safe_stop; the assignment is opaque
    assert_eq!((calls, opaque), (4, 1));
    assert_eq!(f.notes[0].key, "Callers");
    assert_eq!(f.notes[0].text, "car_operator");
}

#[test]
fn print_parse_round_trip_is_structural_identity() {
    for file in parse_all() {
        for class in &file.classes {
            let printed = print_class(class);
            let reparsed = parse_source("printed.rsl", &printed);
            assert!(
                !reparsed.has_errors(),
                "{printed}\n{:#?}",
                reparsed.diagnostics
            );
            assert_eq!(reparsed.classes.len(), 1);
            assert_eq!(
                reparsed.classes[0].without_trivia(),
                class.without_trivia(),
                "{printed}"
            );
            // printing is a fixed point after one round
            assert_eq!(
                print_class(&reparsed.classes[0]).lines().count(),
                printed.lines().count()
            );
        }
    }
}

#[test]
fn book_scenario_and_chain_are_clean() {
    let m = model();
    let checker = Checker::new(&m, CheckConfig::default());
    let scenario = checker
        .check_scenario("BOOK", "borrow_and_return_book")
        .unwrap();
    assert!(errors(&scenario).is_empty(), "{scenario:#?}");
    let chain = checker
        .check_chain("BOOK", "borrow_and_return_book")
        .unwrap();
    assert!(errors(&chain).is_empty(), "{chain:#?}");
    let usage = checker
        .check_scenario("LIBRARY_BOOK_USAGE", "borrow_and_return_book")
        .unwrap();
    assert!(errors(&usage).is_empty(), "{usage:#?}");
}

#[test]
fn race_no_obstacles_has_one_precondition_gap() {
    let m = model();
    let checker = Checker::new(&m, CheckConfig::default());
    let diags = checker
        .check_scenario("ROBORACE_USE_CASES", "race_no_obstacles")
        .unwrap();
    let errs = errors(&diags);
    assert_eq!(errs.len(), 1, "{diags:#?}");
    assert_eq!(errs[0].code, Code::PreUnproven);
    assert!(errs[0].message.contains("car.is_in_normal_mode"));
    assert!(errs[0].message.contains("safe_stop"));
    let w = errs[0].witness.as_ref().unwrap();
    assert_eq!(w.value(&Atom::query("car.is_in_normal_mode")), Some(false));
    assert!(codes(&diags).contains(&Code::UnknownContract));
}

#[test]
fn holding_driver_postcondition_gap() {
    let m = model();
    let checker = Checker::new(&m, CheckConfig::default());
    let diags = checker
        .check_scenario("LIBRARY_DRIVERS", "holding_available_books")
        .unwrap();
    let errs = errors(&diags);
    assert_eq!(errs.len(), 1, "{diags:#?}");
    assert_eq!(errs[0].code, Code::PostUnproven);
    assert!(errs[0]
        .message
        .contains("not l.book_is_on_hold (b, p2, lb)"));
    let w = errs[0].witness.as_ref().unwrap();
    let on_hold_p2 = parse_expression("l.book_is_on_hold (b, p2, lb)")
        .unwrap()
        .formula;
    let Formula::Atom(atom) = on_hold_p2 else {
        panic!()
    };
    assert_eq!(w.value(&atom), Some(true));
}

#[test]
fn stories_class_scenarios_are_clean() {
    let m = model();
    let checker = Checker::new(&m, CheckConfig::default());
    for r in [
        "emergency_stop_red_flag_story",
        "emergency_stop_location_error_story",
    ] {
        let diags = checker
            .check_scenario("ROBORACE_USE_CASE_STORIES", r)
            .unwrap();
        assert!(errors(&diags).is_empty(), "{diags:#?}");
    }
}

#[test]
fn feasibility_and_lints() {
    let m = model();
    let checker = Checker::new(&m, CheckConfig::default());
    for class in m.classes() {
        let diags = checker.check_invariant_feasibility(class.name()).unwrap();
        assert!(errors(&diags).is_empty(), "{}: {diags:#?}", class.name());
    }
    let book = checker.lint_redundant_invariants("BOOK").unwrap();
    assert_eq!(book.len(), 1);
    assert_eq!(book[0].code, Code::RedundantInvariant);
    assert!(book[0].message.contains("clause 4"));
    assert!(checker
        .lint_redundant_invariants("RACE_CAR")
        .unwrap()
        .is_empty());
    assert!(lint_class_names(&m).is_empty());
}

#[test]
fn emergency_stop_stories_match_listing() {
    let m = model();
    let stories = extract_stories(&m, "ROBORACE_USE_CASES", "emergency_stop").unwrap();
    let names: Vec<&str> = stories.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "emergency_stop_red_flag_story",
            "emergency_stop_location_error_story"
        ]
    );
    let listing = [
        "emergency_stop_red_flag_story require car.red_flag_is_up do emergency_stop end",
        "emergency_stop_location_error_story require car.location_error_is_detected do emergency_stop end",
    ];
    for (story, expected) in stories.iter().zip(listing) {
        let text = story.routine_text().unwrap();
        let normalized = text.split_whitespace().collect::<Vec<_>>().join(" ");
        assert_eq!(normalized, expected);
    }
}

#[test]
fn race_no_obstacles_stories() {
    let m = model();
    let stories = extract_stories(&m, "ROBORACE_USE_CASES", "race_no_obstacles").unwrap();
    let got: Vec<(StoryRule, &str)> = stories.iter().map(|s| (s.rule, s.name.as_str())).collect();
    assert_eq!(
        got,
        [
            (StoryRule::LoopExit, "race_no_obstacles_race_story"),
            (StoryRule::LoopExit, "race_no_obstacles_red_flag_story"),
            (
                StoryRule::LoopExit,
                "race_no_obstacles_location_error_story"
            ),
            (
                StoryRule::ImplicationAntecedentTrue,
                "race_no_obstacles_in_normal_mode_story"
            ),
            (
                StoryRule::ImplicationAntecedentFalse,
                "race_no_obstacles_not_in_normal_mode_story"
            ),
        ]
    );
    assert_eq!(
        stories[4].condition.to_string(),
        "not car.is_in_normal_mode and car.race_is_finished"
    );
    let class = story_class(&stories, "ROBORACE_USE_CASES").unwrap();
    let text = print_class(&class);
    let reparsed = parse_source("stories.rsl", &text);
    assert!(
        reparsed.diagnostics.is_empty(),
        "{:#?}",
        reparsed.diagnostics
    );
    assert_eq!(reparsed.classes[0].features.len(), 5);
    let manifest = story_manifest(&stories, "roborace_use_cases_stories.rsl");
    assert_eq!(manifest[0].condition, "car.race_is_finished");
}

#[test]
fn nothing_to_extract() {
    let m = model();
    for r in ["safe_stop", "update_speed"] {
        assert!(matches!(
            extract_stories(&m, "ROBORACE_USE_CASES", r),
            Err(StoryError::NothingToExtract { .. })
        ));
    }
}

#[test]
fn precondition_disjunct_stories_entail_the_source_require() {
    let m = model();
    let source = &m
        .lookup_feature("ROBORACE_USE_CASES", "emergency_stop")
        .unwrap()
        .decl;
    let require = ast::conjoin(&source.precondition);
    for s in extract_stories(&m, "ROBORACE_USE_CASES", "emergency_stop").unwrap() {
        let story_require = ast::conjoin(&s.decl.unwrap().precondition);
        assert!(entails(&story_require, &require).unwrap().is_valid());
    }
}

#[test]
fn driver_skeleton_copies_creation_literals() {
    let m = model();
    let story = driver_story(&m, "LIBRARY_DRIVERS", "holding_available_books").unwrap();
    let skeletons = build_test_skeletons(&m, &[story]).unwrap();
    assert_eq!(skeletons.len(), 1);
    let s = &skeletons[0];
    assert_eq!(s.class_name, "LIBRARY_DRIVERS_TEST");
    assert_eq!(s.parent, "LIBRARY_DRIVERS");
    let setup: Vec<&str> = s.routines[0]
        .setup
        .iter()
        .map(|o| o.text.as_str())
        .collect();
    assert_eq!(
        setup,
        [
            r#"create b.make("Crime and Punishment", "Fyodor Dostoyevsky", "978-1703766172")"#,
            r#"create p1.make("Ted")"#,
            r#"create p2.make("Fred")"#,
            r#"create lb.make("Squirrel Hill")"#,
            r#"create l.make("Carnegie Library of Pittsburgh")"#,
        ]
    );
    assert_eq!(
        s.routines[0].call.to_string(),
        "holding_available_books (b, p1, p2, lb, l)"
    );
    assert_eq!(
        s.routines[0].oracle,
        [
            "l.book_is_on_hold (b, p1, lb)",
            "not l.book_is_on_hold (b, p2, lb)"
        ]
    );
}

#[test]
fn generated_classes_resolve_against_the_source_model() {
    let files = parse_all();
    let mut classes: Vec<ClassDecl> = files.into_iter().flat_map(|f| f.classes).collect();
    let m = build_model(classes.clone()).unwrap();
    let mut stories = extract_stories(&m, "ROBORACE_USE_CASES", "emergency_stop").unwrap();
    stories.extend(extract_stories(&m, "ROBORACE_USE_CASES", "race_no_obstacles").unwrap());
    stories.push(driver_story(&m, "ROBORACE_USE_CASES", "safe_stop").unwrap());
    let stories_text = emit_story_class(&stories, "ROBORACE_USE_CASES").unwrap();
    let skeletons = build_test_skeletons(&m, &stories).unwrap();
    assert_eq!(skeletons[0].class_name, "ROBORACE_USE_CASES_TEST");
    assert_eq!(skeletons[0].file_name(), "roborace_use_cases_test.rsl");
    assert_eq!(skeletons[0].routines.len(), stories.len());
    assert_eq!(
        skeletons[0].routines[0].name,
        "test_emergency_stop_red_flag_story"
    );
    assert_eq!(
        skeletons[0].routines[1].name,
        "test_emergency_stop_location_error_story"
    );
    let test_text = skeletons[0].render();
    for text in [&stories_text, &test_text] {
        let parsed = parse_source("gen.rsl", text);
        assert!(!parsed.has_errors(), "{text}\n{:#?}", parsed.diagnostics);
        classes.extend(parsed.classes);
    }
    let full = build_model(classes).unwrap();
    let checker = Checker::new(&full, CheckConfig::default());
    let diags = checker
        .check_scenario(
            "ROBORACE_USE_CASES_TEST",
            "test_emergency_stop_red_flag_story",
        )
        .unwrap();
    assert!(codes(&diags).contains(&Code::OpaqueStatement));
}
