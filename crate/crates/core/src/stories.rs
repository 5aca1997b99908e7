//! Use-case story extraction.
//!
//! A story is one path through a scenario routine, characterized by a
//! condition. Three rules apply independently: each disjunct of a
//! disjunctive precondition, each disjunct of a loop's exit condition, and
//! both cases of every implication in the postcondition.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{
    Body, CallSite, ClassDecl, Clause, FeatureDecl, Implementation, Location, Note, Statement,
};
use crate::formula::{Atom, Formula, Path, Term};
use crate::logic::{implications_of, top_level_dnf};
use crate::model::Model;
use crate::parser::print_class;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StoryRule {
    PreconditionDisjunct,
    LoopExit,
    ImplicationAntecedentTrue,
    ImplicationAntecedentFalse,
    /// A specification driver taken as a single story of its own.
    Driver,
}

impl StoryRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StoryRule::PreconditionDisjunct => "PRECONDITION_DISJUNCT",
            StoryRule::LoopExit => "LOOP_EXIT",
            StoryRule::ImplicationAntecedentTrue => "IMPLICATION_ANTECEDENT_TRUE",
            StoryRule::ImplicationAntecedentFalse => "IMPLICATION_ANTECEDENT_FALSE",
            StoryRule::Driver => "DRIVER",
        }
    }
}

impl fmt::Display for StoryRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Story {
    pub class: String,
    pub routine: String,
    pub rule: StoryRule,
    pub condition: Formula,
    pub name: String,
    /// The generated story routine; drivers have none.
    pub decl: Option<FeatureDecl>,
}

impl Story {
    pub fn routine_text(&self) -> Option<String> {
        self.decl.as_ref().map(crate::parser::print_feature)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoryError {
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("class {class} has no routine {routine}")]
    UnknownRoutine { class: String, routine: String },
    #[error("{class}.{routine} has no body")]
    NoBody { class: String, routine: String },
    #[error("{class}.{routine} has no disjunctive precondition, loop or postcondition implication to extract stories from")]
    NothingToExtract { class: String, routine: String },
    #[error("no stories to emit")]
    EmptyStoryList,
    #[error("story {story} comes from class {found}, not {expected}")]
    ForeignStory {
        story: String,
        found: String,
        expected: String,
    },
}

/// Manifest row for one extracted story.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoryManifestEntry {
    pub class: String,
    pub routine: String,
    pub rule: StoryRule,
    pub condition: String,
    pub story_name: String,
    pub emitted_file: String,
}

pub fn stories_class_name(source: &str) -> String {
    format!("{source}_STORIES")
}

fn source_routine<'m>(
    model: &'m Model,
    class: &str,
    routine: &str,
) -> Result<&'m FeatureDecl, StoryError> {
    let c = model
        .class(class)
        .ok_or_else(|| StoryError::UnknownClass(class.to_string()))?;
    let f = c
        .feature(routine)
        .ok_or_else(|| StoryError::UnknownRoutine {
            class: class.to_string(),
            routine: routine.to_string(),
        })?;
    if f.decl.body().is_none() {
        return Err(StoryError::NoBody {
            class: class.to_string(),
            routine: routine.to_string(),
        });
    }
    Ok(&f.decl)
}

pub fn extract_stories(
    model: &Model,
    class: &str,
    routine: &str,
) -> Result<Vec<Story>, StoryError> {
    let decl = source_routine(model, class, routine)?;
    let mut found: Vec<(StoryRule, Formula)> = Vec::new();

    if let [only] = decl.precondition.as_slice() {
        let disjuncts = top_level_dnf(&only.formula);
        if disjuncts.len() >= 2 {
            found.extend(
                disjuncts
                    .into_iter()
                    .map(|d| (StoryRule::PreconditionDisjunct, d)),
            );
        }
    }
    if let Some(body) = decl.body() {
        body.walk(&mut |s| {
            if let Statement::Loop { until, .. } = s {
                found.extend(
                    top_level_dnf(until)
                        .into_iter()
                        .map(|d| (StoryRule::LoopExit, d)),
                );
            }
        });
    }
    let ensure: Vec<Formula> = decl
        .postcondition
        .iter()
        .map(|c| c.formula.clone())
        .collect();
    for (antecedent, consequent) in implications_of(&ensure) {
        found.push((StoryRule::ImplicationAntecedentTrue, antecedent.clone()));
        found.push((
            StoryRule::ImplicationAntecedentFalse,
            Formula::and(Formula::not(antecedent), consequent),
        ));
    }
    if found.is_empty() {
        return Err(StoryError::NothingToExtract {
            class: class.to_string(),
            routine: routine.to_string(),
        });
    }

    let mut taken: HashSet<String> = model
        .class(class)
        .map(|c| c.features().iter().map(|f| f.decl.name.clone()).collect())
        .unwrap_or_default();
    Ok(found
        .into_iter()
        .map(|(rule, condition)| {
            let name = unique_name(routine, &slug(&condition), &mut taken);
            let generated = story_routine(decl, &name, rule, &condition);
            Story {
                class: class.to_string(),
                routine: routine.to_string(),
                rule,
                condition,
                name,
                decl: Some(generated),
            }
        })
        .collect())
}

/// A routine with a body but no extractable stories, taken as one story.
pub fn driver_story(model: &Model, class: &str, routine: &str) -> Result<Story, StoryError> {
    source_routine(model, class, routine)?;
    Ok(Story {
        class: class.to_string(),
        routine: routine.to_string(),
        rule: StoryRule::Driver,
        condition: Formula::True,
        name: routine.to_string(),
        decl: None,
    })
}

fn unique_name(routine: &str, slug: &str, taken: &mut HashSet<String>) -> String {
    let mut name = format!("{routine}_{slug}_story");
    let mut n = 2;
    while taken.contains(&name) {
        name = format!("{routine}_{slug}_{n}_story");
        n += 1;
    }
    taken.insert(name.clone());
    name
}

/// First atom of `f` in reading order, with whether it occurs negated.
fn principal_atom(f: &Formula, negated: bool) -> Option<(&Atom, bool)> {
    match f {
        Formula::True | Formula::False => None,
        Formula::Atom(a) => Some((a, negated)),
        Formula::Not(x) => principal_atom(x, !negated),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            principal_atom(a, negated).or_else(|| principal_atom(b, negated))
        }
    }
}

/// Identifier fragment naming a condition after its principal atom: the
/// feature name without receiver, a leading `is_` or a trailing `_is_<word>`
/// (`car.red_flag_is_up` gives `red_flag`), prefixed `not_` when negated.
pub fn slug(condition: &Formula) -> String {
    let Some((atom, negated)) = principal_atom(condition, false) else {
        return "condition".to_string();
    };
    let term_name = |t: &Term| match t {
        Term::Path(p) => p.last().to_string(),
        Term::Raw(r) => r.clone(),
    };
    let base = match atom {
        Atom::Query(p) => p.last().to_string(),
        Atom::Predicate { feature, .. } => feature.clone(),
        Atom::Eq(l, _) | Atom::Ne(l, _) => term_name(l),
        Atom::Opaque(_) => "condition".to_string(),
    };
    let mut base = sanitize(&base);
    if let Some(rest) = base.strip_prefix("is_") {
        if !rest.is_empty() {
            base = rest.to_string();
        }
    }
    if let Some(i) = base.rfind("_is_") {
        let word = &base[i + 4..];
        if i > 0 && !word.is_empty() && !word.contains('_') {
            base.truncate(i);
        }
    }
    if base.is_empty() {
        base = "condition".to_string();
    }
    if negated {
        format!("not_{base}")
    } else {
        base
    }
}

fn sanitize(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn story_routine(
    source: &FeatureDecl,
    name: &str,
    rule: StoryRule,
    condition: &Formula,
) -> FeatureDecl {
    let args = source
        .formals
        .iter()
        .map(|d| Term::Path(Path::single(&d.name)))
        .collect();
    let call = CallSite::new(None, &source.name, args);
    let mut f = FeatureDecl::routine(name);
    f.formals = source.formals.clone();
    f.implementation = Implementation::Effective(Body::new(vec![Statement::Call(call)]));
    if rule == StoryRule::PreconditionDisjunct {
        f.precondition = vec![Clause::new(condition.clone())];
    } else {
        f.precondition = source
            .precondition
            .iter()
            .map(|c| Clause {
                location: Location::default(),
                ..c.clone()
            })
            .collect();
        f.notes = vec![
            Note {
                key: "story_rule".into(),
                text: rule.as_str().into(),
            },
            Note {
                key: "story_condition".into(),
                text: condition.to_string(),
            },
        ];
    }
    f
}

/// `class <SOURCE>_STORIES inherit <SOURCE>` holding the generated story
/// routines. Driver stories need no routine and are skipped.
pub fn story_class(stories: &[Story], source: &str) -> Result<ClassDecl, StoryError> {
    if stories.is_empty() {
        return Err(StoryError::EmptyStoryList);
    }
    if let Some(s) = stories.iter().find(|s| s.class != source) {
        return Err(StoryError::ForeignStory {
            story: s.name.clone(),
            found: s.class.clone(),
            expected: source.to_string(),
        });
    }
    let mut class = ClassDecl::new(stories_class_name(source));
    class.parents = vec![source.to_string()];
    class.comments = vec![format!("Use-case stories extracted from {source}")];
    class.features = stories.iter().filter_map(|s| s.decl.clone()).collect();
    Ok(class)
}

pub fn emit_story_class(stories: &[Story], source: &str) -> Result<String, StoryError> {
    story_class(stories, source).map(|c| print_class(&c))
}

pub fn story_manifest(stories: &[Story], emitted_file: &str) -> Vec<StoryManifestEntry> {
    stories
        .iter()
        .map(|s| StoryManifestEntry {
            class: s.class.clone(),
            routine: s.routine.clone(),
            rule: s.rule,
            condition: s.condition.to_string(),
            story_name: s.name.clone(),
            emitted_file: emitted_file.to_string(),
        })
        .collect()
}
