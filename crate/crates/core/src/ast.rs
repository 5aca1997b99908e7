//! Syntax tree for requirements classes.

use std::fmt;

use serde::Serialize;

use crate::formula::{Formula, Path, Term};

/// 1-based source position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Location {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl Location {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        Location {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// One assertion clause; `tag: expr` keeps the tag as the label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub label: Option<String>,
    pub formula: Formula,
    pub location: Location,
}

impl Clause {
    pub fn new(formula: Formula) -> Self {
        Clause {
            label: None,
            formula,
            location: Location::default(),
        }
    }
}

/// Conjunction of a clause list.
pub fn conjoin(clauses: &[Clause]) -> Formula {
    Formula::conjunction(clauses.iter().map(|c| c.formula.clone()))
}

/// `Note`-block entry; metadata only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Note {
    pub key: String,
    pub text: String,
}

/// Name with its declared class, as in `p1: PATRON`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub name: String,
    pub class: String,
}

impl Declaration {
    pub fn new(name: impl Into<String>, class: impl Into<String>) -> Self {
        Declaration {
            name: name.into(),
            class: class.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    BooleanQuery,
    Attribute,
    Command,
    ScenarioRoutine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Implementation {
    /// `name: TYPE` with no routine part.
    Attribute,
    Deferred,
    Effective(Body),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDecl {
    pub name: String,
    pub formals: Vec<Declaration>,
    pub locals: Vec<Declaration>,
    pub result_type: Option<String>,
    pub notes: Vec<Note>,
    pub precondition: Vec<Clause>,
    pub postcondition: Vec<Clause>,
    pub implementation: Implementation,
    pub comments: Vec<String>,
    pub location: Location,
}

impl FeatureDecl {
    /// An effective routine with no formals, contract or statements.
    pub fn routine(name: impl Into<String>) -> Self {
        FeatureDecl {
            name: name.into(),
            formals: Vec::new(),
            locals: Vec::new(),
            result_type: None,
            notes: Vec::new(),
            precondition: Vec::new(),
            postcondition: Vec::new(),
            implementation: Implementation::Effective(Body::default()),
            comments: Vec::new(),
            location: Location::default(),
        }
    }

    pub fn kind(&self) -> FeatureKind {
        match &self.implementation {
            Implementation::Attribute => match self.result_type.as_deref() {
                Some("BOOLEAN") => FeatureKind::BooleanQuery,
                _ => FeatureKind::Attribute,
            },
            Implementation::Effective(body) if !body.statements.is_empty() => {
                FeatureKind::ScenarioRoutine
            }
            _ => FeatureKind::Command,
        }
    }

    pub fn is_deferred(&self) -> bool {
        matches!(self.implementation, Implementation::Deferred)
    }

    pub fn body(&self) -> Option<&Body> {
        match &self.implementation {
            Implementation::Effective(b) => Some(b),
            _ => None,
        }
    }

    pub fn has_contract(&self) -> bool {
        !self.precondition.is_empty() || !self.postcondition.is_empty()
    }

    /// Declared class of a formal or local.
    pub fn declared_class(&self, name: &str) -> Option<&str> {
        self.formals
            .iter()
            .chain(&self.locals)
            .find(|d| d.name == name)
            .map(|d| d.class.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Body {
    pub statements: Vec<Statement>,
}

impl Body {
    pub fn new(statements: Vec<Statement>) -> Self {
        Body { statements }
    }

    /// Pre-order traversal over all nested statements.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Statement)) {
        for s in &self.statements {
            f(s);
            match s {
                Statement::Conditional {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    then_branch.walk(f);
                    if let Some(e) = else_branch {
                        e.walk(f);
                    }
                }
                Statement::Loop { init, body, .. } => {
                    init.walk(f);
                    body.walk(f);
                }
                Statement::Call(_) | Statement::Opaque(_) => {}
            }
        }
    }
}

/// `target.feature (args)`; no target means the current object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub target: Option<Path>,
    pub feature: String,
    pub args: Vec<Term>,
    pub location: Location,
}

impl CallSite {
    pub fn new(target: Option<Path>, feature: impl Into<String>, args: Vec<Term>) -> Self {
        CallSite {
            target,
            feature: feature.into(),
            args,
            location: Location::default(),
        }
    }

    pub fn path(&self) -> Path {
        match &self.target {
            Some(t) => t.child(&self.feature),
            None => Path::single(&self.feature),
        }
    }
}

impl fmt::Display for CallSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path())?;
        if !self.args.is_empty() {
            f.write_str(" (")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Assignment, creation or other statement kept verbatim. An assignment
/// whose source is a feature call records that call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpaqueStatement {
    pub text: String,
    pub embedded_call: Option<CallSite>,
    pub comment: Option<String>,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Call(CallSite),
    Conditional {
        condition: Formula,
        then_branch: Body,
        else_branch: Option<Body>,
        location: Location,
    },
    /// `from init until exit loop body end`
    Loop {
        init: Body,
        until: Formula,
        body: Body,
        location: Location,
    },
    Opaque(OpaqueStatement),
}

impl Statement {
    pub fn location(&self) -> &Location {
        match self {
            Statement::Call(c) => &c.location,
            Statement::Conditional { location, .. } | Statement::Loop { location, .. } => location,
            Statement::Opaque(o) => &o.location,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub parents: Vec<String>,
    pub features: Vec<FeatureDecl>,
    pub invariant: Vec<Clause>,
    pub notes: Vec<Note>,
    /// Written as `deferred class`.
    pub declared_deferred: bool,
    pub comments: Vec<String>,
    pub location: Location,
}

impl ClassDecl {
    pub fn new(name: impl Into<String>) -> Self {
        ClassDecl {
            name: name.into(),
            parents: Vec::new(),
            features: Vec::new(),
            invariant: Vec::new(),
            notes: Vec::new(),
            declared_deferred: false,
            comments: Vec::new(),
            location: Location::default(),
        }
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureDecl> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Copy with comments and source positions cleared, for structural
    /// comparison.
    pub fn without_trivia(&self) -> ClassDecl {
        fn clauses(cs: &[Clause]) -> Vec<Clause> {
            cs.iter()
                .map(|c| Clause {
                    location: Location::default(),
                    ..c.clone()
                })
                .collect()
        }
        fn call(c: &CallSite) -> CallSite {
            CallSite {
                location: Location::default(),
                ..c.clone()
            }
        }
        fn body(b: &Body) -> Body {
            Body::new(b.statements.iter().map(statement).collect())
        }
        fn statement(s: &Statement) -> Statement {
            match s {
                Statement::Call(c) => Statement::Call(call(c)),
                Statement::Conditional {
                    condition,
                    then_branch,
                    else_branch,
                    ..
                } => Statement::Conditional {
                    condition: condition.clone(),
                    then_branch: body(then_branch),
                    else_branch: else_branch.as_ref().map(body),
                    location: Location::default(),
                },
                Statement::Loop {
                    init,
                    until,
                    body: b,
                    ..
                } => Statement::Loop {
                    init: body(init),
                    until: until.clone(),
                    body: body(b),
                    location: Location::default(),
                },
                Statement::Opaque(o) => Statement::Opaque(OpaqueStatement {
                    text: o.text.clone(),
                    embedded_call: o.embedded_call.as_ref().map(call),
                    comment: None,
                    location: Location::default(),
                }),
            }
        }
        ClassDecl {
            name: self.name.clone(),
            parents: self.parents.clone(),
            features: self
                .features
                .iter()
                .map(|f| FeatureDecl {
                    precondition: clauses(&f.precondition),
                    postcondition: clauses(&f.postcondition),
                    implementation: match &f.implementation {
                        Implementation::Effective(b) => Implementation::Effective(body(b)),
                        other => other.clone(),
                    },
                    comments: Vec::new(),
                    location: Location::default(),
                    ..f.clone()
                })
                .collect(),
            invariant: clauses(&self.invariant),
            notes: self.notes.clone(),
            declared_deferred: self.declared_deferred,
            comments: Vec::new(),
            location: Location::default(),
        }
    }
}
