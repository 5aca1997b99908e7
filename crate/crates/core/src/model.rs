//! Resolved requirements model: classes with their flattened feature tables
//! and invariants, plus typing of access paths.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::ast::{ClassDecl, Clause, FeatureDecl, Location};
use crate::formula::{Formula, Path, Substitution, Term};

/// Type names that are never model classes.
pub const BUILTIN_TYPES: &[&str] = &[
    "BOOLEAN",
    "INTEGER",
    "REAL",
    "DOUBLE",
    "STRING",
    "CHARACTER",
    "NATURAL",
    "ANY",
];

pub fn is_builtin(class: &str) -> bool {
    BUILTIN_TYPES.contains(&class)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("class {name} is declared more than once (first at {first})")]
    DuplicateClass {
        name: String,
        first: Location,
        location: Location,
    },
    #[error("class {class} inherits from unknown class {parent}")]
    UnknownParent {
        class: String,
        parent: String,
        location: Location,
    },
    #[error("inheritance cycle: {}", cycle.join(" -> "))]
    InheritanceCycle {
        cycle: Vec<String>,
        location: Location,
    },
    #[error(
        "class {class} has two features named {feature} (from {first_origin} and {second_origin})"
    )]
    DuplicateFeature {
        class: String,
        feature: String,
        first_origin: String,
        second_origin: String,
        location: Location,
    },
}

impl ResolutionError {
    pub fn location(&self) -> &Location {
        match self {
            ResolutionError::DuplicateClass { location, .. }
            | ResolutionError::UnknownParent { location, .. }
            | ResolutionError::InheritanceCycle { location, .. }
            | ResolutionError::DuplicateFeature { location, .. } => location,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} resolution error(s)", .0.len())]
pub struct ResolutionErrors(pub Vec<ResolutionError>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{feature}` takes {expected} argument(s) but the call passes {found}")]
pub struct ArityMismatch {
    pub feature: String,
    pub expected: usize,
    pub found: usize,
}

/// A feature as seen from a class, with the class that declares it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatFeature {
    pub origin: String,
    pub decl: FeatureDecl,
}

#[derive(Debug, Clone)]
pub struct ResolvedClass {
    pub decl: ClassDecl,
    features: Vec<FlatFeature>,
    index: HashMap<String, usize>,
    invariant: Vec<Clause>,
    deferred: bool,
}

impl ResolvedClass {
    pub fn name(&self) -> &str {
        &self.decl.name
    }

    /// Own and inherited features; inherited ones first, in parent order.
    pub fn features(&self) -> &[FlatFeature] {
        &self.features
    }

    pub fn feature(&self, name: &str) -> Option<&FlatFeature> {
        self.index.get(name).map(|&i| &self.features[i])
    }

    /// Inherited invariant clauses followed by the class's own.
    pub fn invariant(&self) -> &[Clause] {
        &self.invariant
    }

    pub fn invariant_formula(&self) -> Formula {
        crate::ast::conjoin(&self.invariant)
    }

    /// Declared deferred or has a deferred feature after flattening.
    pub fn is_deferred(&self) -> bool {
        self.deferred
    }
}

/// How an access path resolves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathClass {
    /// A class of the model.
    Known(String),
    /// Declared with a class name that is not in the model.
    Missing(String),
    Builtin(String),
    /// Some segment has no declaration.
    Untyped,
}

#[derive(Debug, Clone, Default)]
pub struct Model {
    classes: BTreeMap<String, ResolvedClass>,
    order: Vec<String>,
}

pub fn build_model(decls: Vec<ClassDecl>) -> Result<Model, ResolutionErrors> {
    let mut errors = Vec::new();
    let mut by_name: HashMap<String, ClassDecl> = HashMap::new();
    let mut order = Vec::new();
    for decl in decls {
        if let Some(first) = by_name.get(&decl.name) {
            errors.push(ResolutionError::DuplicateClass {
                name: decl.name.clone(),
                first: first.location.clone(),
                location: decl.location.clone(),
            });
            continue;
        }
        order.push(decl.name.clone());
        by_name.insert(decl.name.clone(), decl);
    }
    for name in &order {
        let decl = &by_name[name];
        for parent in &decl.parents {
            if !by_name.contains_key(parent) {
                errors.push(ResolutionError::UnknownParent {
                    class: name.clone(),
                    parent: parent.clone(),
                    location: decl.location.clone(),
                });
            }
        }
    }
    errors.extend(find_cycles(&order, &by_name));
    if !errors.is_empty() {
        return Err(ResolutionErrors(errors));
    }

    let mut flat: HashMap<String, (Vec<FlatFeature>, Vec<Clause>)> = HashMap::new();
    for name in &order {
        flatten(name, &by_name, &mut flat, &mut errors);
    }
    if !errors.is_empty() {
        return Err(ResolutionErrors(errors));
    }
    let mut classes = BTreeMap::new();
    for name in &order {
        let decl = by_name.remove(name).unwrap();
        let (features, invariant) = flat.remove(name).unwrap();
        let index = features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.decl.name.clone(), i))
            .collect();
        let deferred = decl.declared_deferred || features.iter().any(|f| f.decl.is_deferred());
        classes.insert(
            name.clone(),
            ResolvedClass {
                decl,
                features,
                index,
                invariant,
                deferred,
            },
        );
    }
    Ok(Model { classes, order })
}

fn find_cycles(order: &[String], by_name: &HashMap<String, ClassDecl>) -> Vec<ResolutionError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit(
        name: &str,
        by_name: &HashMap<String, ClassDecl>,
        marks: &mut HashMap<String, Mark>,
        stack: &mut Vec<String>,
        out: &mut Vec<ResolutionError>,
    ) {
        match marks.get(name) {
            Some(Mark::Done) => return,
            Some(Mark::Open) => {
                let start = stack.iter().position(|s| s == name).unwrap();
                let mut cycle = stack[start..].to_vec();
                cycle.push(name.to_string());
                out.push(ResolutionError::InheritanceCycle {
                    cycle,
                    location: by_name[name].location.clone(),
                });
                return;
            }
            None => {}
        }
        marks.insert(name.to_string(), Mark::Open);
        stack.push(name.to_string());
        for parent in &by_name[name].parents {
            if by_name.contains_key(parent) {
                visit(parent, by_name, marks, stack, out);
            }
        }
        stack.pop();
        marks.insert(name.to_string(), Mark::Done);
    }
    let mut marks = HashMap::new();
    let mut out = Vec::new();
    for name in order {
        visit(name, by_name, &mut marks, &mut Vec::new(), &mut out);
    }
    out
}

fn flatten(
    name: &str,
    by_name: &HashMap<String, ClassDecl>,
    flat: &mut HashMap<String, (Vec<FlatFeature>, Vec<Clause>)>,
    errors: &mut Vec<ResolutionError>,
) {
    if flat.contains_key(name) {
        return;
    }
    let decl = &by_name[name];
    let mut features: Vec<FlatFeature> = Vec::new();
    let mut invariant: Vec<Clause> = Vec::new();

    for parent in &decl.parents {
        flatten(parent, by_name, flat, errors);
        let (pf, pi) = flat[parent].clone();
        for f in pf {
            add_feature(name, f, &mut features, errors);
        }
        for c in pi {
            if !invariant.contains(&c) {
                invariant.push(c);
            }
        }
    }
    for f in &decl.features {
        add_feature(
            name,
            FlatFeature {
                origin: name.to_string(),
                decl: f.clone(),
            },
            &mut features,
            errors,
        );
    }
    invariant.extend(decl.invariant.iter().cloned());
    flat.insert(name.to_string(), (features, invariant));
}

fn add_feature(
    name: &str,
    f: FlatFeature,
    features: &mut Vec<FlatFeature>,
    errors: &mut Vec<ResolutionError>,
) {
    if let Some(existing) = features.iter().find(|e| e.decl.name == f.decl.name) {
        let same_declaration =
            existing.origin == f.origin && existing.decl.location == f.decl.location;
        if !same_declaration {
            errors.push(ResolutionError::DuplicateFeature {
                class: name.to_string(),
                feature: f.decl.name.clone(),
                first_origin: existing.origin.clone(),
                second_origin: f.origin.clone(),
                location: f.decl.location.clone(),
            });
        }
        return;
    }
    features.push(f);
}

impl Model {
    pub fn class(&self, name: &str) -> Option<&ResolvedClass> {
        self.classes.get(name)
    }

    /// Classes in declaration order.
    pub fn classes(&self) -> impl Iterator<Item = &ResolvedClass> {
        self.order.iter().map(|n| &self.classes[n])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn lookup_feature(&self, class: &str, feature: &str) -> Option<&FlatFeature> {
        self.classes.get(class)?.feature(feature)
    }

    /// Source location of a class or one of its (possibly inherited) features.
    pub fn location_of(&self, class: &str, feature: Option<&str>) -> Option<&Location> {
        let c = self.classes.get(class)?;
        match feature {
            None => Some(&c.decl.location),
            Some(f) => Some(&c.feature(f)?.decl.location),
        }
    }

    fn classify(&self, class: &str) -> PathClass {
        if self.classes.contains_key(class) {
            PathClass::Known(class.to_string())
        } else if is_builtin(class) {
            PathClass::Builtin(class.to_string())
        } else {
            PathClass::Missing(class.to_string())
        }
    }

    /// Class of `path` as written inside `routine` of class `context`. The
    /// head is looked up among the routine's formals and locals, then among
    /// the features of `context`; later segments follow attribute types.
    pub fn path_class(
        &self,
        context: &str,
        routine: Option<&FeatureDecl>,
        path: &Path,
    ) -> PathClass {
        let head = path.head();
        let mut current = match routine.and_then(|r| r.declared_class(head)) {
            Some(c) => self.classify(c),
            None => match self
                .lookup_feature(context, head)
                .and_then(|f| f.decl.result_type.as_deref())
            {
                Some(c) => self.classify(c),
                None => return PathClass::Untyped,
            },
        };
        for segment in &path.segments()[1..] {
            let PathClass::Known(class) = &current else {
                return PathClass::Untyped;
            };
            current = match self
                .lookup_feature(class, segment)
                .and_then(|f| f.decl.result_type.as_deref())
            {
                Some(c) => self.classify(c),
                None => return PathClass::Untyped,
            };
        }
        current
    }
}

/// Contract of a feature re-expressed at one call site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub pre: Vec<Clause>,
    pub post: Vec<Clause>,
}

impl Contract {
    pub fn pre_formula(&self) -> Formula {
        crate::ast::conjoin(&self.pre)
    }

    pub fn post_formula(&self) -> Formula {
        crate::ast::conjoin(&self.post)
    }
}

/// Formals become actuals; every other path is qualified by `receiver`
/// (nothing is added for the current object).
pub fn instantiate_contract(
    feature: &FeatureDecl,
    receiver: Option<&Path>,
    actuals: &[Term],
) -> Result<Contract, ArityMismatch> {
    if feature.formals.len() != actuals.len() {
        return Err(ArityMismatch {
            feature: feature.name.clone(),
            expected: feature.formals.len(),
            found: actuals.len(),
        });
    }
    let bindings = feature
        .formals
        .iter()
        .zip(actuals)
        .map(|(d, a)| (d.name.clone(), a.clone()))
        .collect();
    let s = Substitution::new(receiver.cloned(), bindings);
    let apply = |cs: &[Clause]| {
        cs.iter()
            .map(|c| Clause {
                formula: s.formula(&c.formula),
                ..c.clone()
            })
            .collect()
    };
    Ok(Contract {
        pre: apply(&feature.precondition),
        post: apply(&feature.postcondition),
    })
}

/// Invariants that hold for the objects reachable in a routine.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvariantContext {
    pub clauses: Vec<Clause>,
    /// Paths whose declared class is not in the model.
    pub unknown: Vec<(Path, String)>,
}

impl InvariantContext {
    pub fn formula(&self) -> Formula {
        crate::ast::conjoin(&self.clauses)
    }
}

/// The invariant of `own_class` unqualified, plus for each `(path, class)`
/// in scope the invariant of `class` qualified by `path`. Builtin classes
/// contribute nothing; other unknown classes are listed in `unknown`.
pub fn invariant_context(
    model: &Model,
    scope: &[(Path, String)],
    own_class: Option<&str>,
) -> InvariantContext {
    let mut ctx = InvariantContext::default();
    if let Some(c) = own_class.and_then(|c| model.class(c)) {
        ctx.clauses.extend(c.invariant().iter().cloned());
    }
    for (path, class) in scope {
        match model.class(class) {
            Some(c) => {
                let s = Substitution::prefix(path.clone());
                for clause in c.invariant() {
                    let q = Clause {
                        formula: s.formula(&clause.formula),
                        ..clause.clone()
                    };
                    if !ctx.clauses.contains(&q) {
                        ctx.clauses.push(q);
                    }
                }
            }
            None if is_builtin(class) => {}
            None => ctx.unknown.push((path.clone(), class.clone())),
        }
    }
    ctx
}
