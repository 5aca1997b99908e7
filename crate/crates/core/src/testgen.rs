//! Test-skeleton generation: one test class per source class and one test
//! routine per story.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::ast::{Body, CallSite, ClassDecl, Declaration, FeatureDecl, OpaqueStatement, Statement};
use crate::formula::{Formula, Path, Term};
use crate::model::{Model, PathClass};
use crate::parser::print_class;
use crate::stories::{stories_class_name, Story, StoryRule};

pub const CREATION_TODO: &str = "TODO: supply creation arguments";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestgenError {
    #[error("story {story} refers to {class}.{routine}, which is not in the model")]
    UnresolvedStory {
        story: String,
        class: String,
        routine: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestRoutine {
    pub name: String,
    pub story_name: String,
    pub locals: Vec<Declaration>,
    /// Creation statements, one per object the story uses.
    pub setup: Vec<OpaqueStatement>,
    pub call: CallSite,
    /// Source ensure clauses, then the story's characterizing condition.
    pub oracle: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSkeleton {
    pub class_name: String,
    pub source_class: String,
    pub parent: String,
    pub routines: Vec<TestRoutine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TestManifestEntry {
    pub test_class: String,
    pub routine: String,
    pub story_name: String,
    pub oracle_clauses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFile {
    pub file_name: String,
    pub text: String,
}

pub fn test_class_name(source: &str) -> String {
    format!("{source}_TEST")
}

pub fn test_file_name(test_class: &str) -> String {
    format!("{}.rsl", test_class.to_lowercase())
}

impl TestSkeleton {
    pub fn file_name(&self) -> String {
        test_file_name(&self.class_name)
    }

    pub fn to_class(&self) -> ClassDecl {
        let mut class = ClassDecl::new(&self.class_name);
        class.parents = vec![self.parent.clone()];
        class.comments = vec![format!(
            "Test skeletons for the stories of {}",
            self.source_class
        )];
        class.features = self
            .routines
            .iter()
            .map(|r| {
                let mut f = FeatureDecl::routine(&r.name);
                f.locals = r.locals.clone();
                f.comments = r.oracle.iter().map(|o| format!("oracle: {o}")).collect();
                let mut stmts: Vec<Statement> =
                    r.setup.iter().cloned().map(Statement::Opaque).collect();
                stmts.push(Statement::Call(r.call.clone()));
                f.implementation = crate::ast::Implementation::Effective(Body::new(stmts));
                f
            })
            .collect();
        class
    }

    pub fn render(&self) -> String {
        print_class(&self.to_class())
    }

    pub fn manifest(&self) -> Vec<TestManifestEntry> {
        self.routines
            .iter()
            .map(|r| TestManifestEntry {
                test_class: self.class_name.clone(),
                routine: r.name.clone(),
                story_name: r.story_name.clone(),
                oracle_clauses: r.oracle.clone(),
            })
            .collect()
    }
}

/// Creation statements already written for `routine`'s arguments in any
/// routine that calls it, keyed by the created name.
fn existing_creations(model: &Model, routine: &str) -> HashMap<String, OpaqueStatement> {
    let mut out = HashMap::new();
    for class in model.classes() {
        for f in &class.decl.features {
            let Some(body) = f.body() else { continue };
            let mut calls_it = false;
            let mut creations = Vec::new();
            body.walk(&mut |s| match s {
                Statement::Call(c) if c.target.is_none() && c.feature == routine => calls_it = true,
                Statement::Opaque(o) if o.text.starts_with("create ") => creations.push(o),
                _ => {}
            });
            if !calls_it {
                continue;
            }
            for o in creations {
                let created = o.text["create ".len()..]
                    .split(|c: char| c == '.' || c == '(' || c.is_whitespace())
                    .next()
                    .unwrap_or_default()
                    .to_string();
                out.entry(created).or_insert_with(|| OpaqueStatement {
                    location: Default::default(),
                    ..o.clone()
                });
            }
        }
    }
    out
}

fn placeholder(name: &str) -> OpaqueStatement {
    OpaqueStatement {
        text: format!("create {name}.make"),
        embedded_call: None,
        comment: Some(CREATION_TODO.to_string()),
        location: Default::default(),
    }
}

fn test_routine(model: &Model, story: &Story, source: &FeatureDecl) -> TestRoutine {
    let locals = source.formals.clone();
    let known = existing_creations(model, &story.routine);
    let mut setup: Vec<OpaqueStatement> = locals
        .iter()
        .map(|d| {
            known
                .get(&d.name)
                .cloned()
                .unwrap_or_else(|| placeholder(&d.name))
        })
        .collect();

    // Attributes of model classes that the story's conditions mention.
    let mut formulas: Vec<&Formula> = source
        .precondition
        .iter()
        .chain(&source.postcondition)
        .map(|c| &c.formula)
        .collect();
    formulas.push(&story.condition);
    let mut heads = BTreeSet::new();
    for f in formulas {
        for atom in f.atoms() {
            for p in atom.paths() {
                if p.len() > 1 {
                    heads.insert(p.head().to_string());
                }
            }
        }
    }
    for head in heads {
        if source.declared_class(&head).is_some() {
            continue;
        }
        if let PathClass::Known(_) =
            model.path_class(&story.class, Some(source), &Path::single(&head))
        {
            setup.push(
                known
                    .get(&head)
                    .cloned()
                    .unwrap_or_else(|| placeholder(&head)),
            );
        }
    }

    let args = locals
        .iter()
        .map(|d| Term::Path(Path::single(&d.name)))
        .collect();
    let callee = if story.rule == StoryRule::Driver {
        story.routine.clone()
    } else {
        story.name.clone()
    };
    let mut oracle: Vec<String> = source
        .postcondition
        .iter()
        .map(|c| c.formula.to_string())
        .collect();
    if story.condition != Formula::True {
        oracle.push(story.condition.to_string());
    }
    TestRoutine {
        name: format!("test_{}", story.name),
        story_name: story.name.clone(),
        locals,
        setup,
        call: CallSite::new(None, callee, args),
        oracle,
    }
}

/// One skeleton per source class, in order of first appearance.
pub fn build_test_skeletons(
    model: &Model,
    stories: &[Story],
) -> Result<Vec<TestSkeleton>, TestgenError> {
    let mut by_class: BTreeMap<usize, (String, Vec<&Story>)> = BTreeMap::new();
    let mut order: HashMap<String, usize> = HashMap::new();
    for s in stories {
        let n = order.len();
        let i = *order.entry(s.class.clone()).or_insert(n);
        by_class
            .entry(i)
            .or_insert_with(|| (s.class.clone(), Vec::new()))
            .1
            .push(s);
    }
    let mut out = Vec::new();
    for (_, (class, stories)) in by_class {
        let mut routines = Vec::new();
        for story in &stories {
            let source = model
                .lookup_feature(&class, &story.routine)
                .ok_or_else(|| TestgenError::UnresolvedStory {
                    story: story.name.clone(),
                    class: class.clone(),
                    routine: story.routine.clone(),
                })?;
            routines.push(test_routine(model, story, &source.decl));
        }
        let parent = if stories.iter().any(|s| s.rule != StoryRule::Driver) {
            stories_class_name(&class)
        } else {
            class.clone()
        };
        out.push(TestSkeleton {
            class_name: test_class_name(&class),
            source_class: class,
            parent,
            routines,
        });
    }
    Ok(out)
}

pub fn generate_test_skeletons(
    model: &Model,
    stories: &[Story],
) -> Result<Vec<GeneratedFile>, TestgenError> {
    Ok(build_test_skeletons(model, stories)?
        .into_iter()
        .map(|s| GeneratedFile {
            file_name: s.file_name(),
            text: s.render(),
        })
        .collect())
}
