//! Contract checking of scenario routines.
//!
//! Scenario mode walks every path through a routine body, carrying a
//! symbolic state of facts. Chain mode treats a body of plain calls as a
//! sequence and checks each postcondition against the next precondition.

mod chain;
mod lint;
mod scenario;
mod state;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{CallSite, FeatureDecl, Location, Statement};
use crate::diagnostic::{Code, Diagnostic};
use crate::formula::{Formula, Path};
use crate::logic::{LogicError, Solver, DEFAULT_CAPACITY};
use crate::model::{instantiate_contract, Contract, Model, PathClass};

pub use lint::lint_class_names;
pub use state::{apply_call, Fact, Origin, SymbolicState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("class {class} has no routine {routine}")]
    UnknownRoutine { class: String, routine: String },
    #[error("{class}.{routine} has no body to check")]
    NoBody { class: String, routine: String },
    #[error("{class}.{routine} is not a plain sequence of calls")]
    NotAPlainSequence {
        class: String,
        routine: String,
        location: Location,
    },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub capacity: usize,
    pub functional_equality: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            capacity: DEFAULT_CAPACITY,
            functional_equality: false,
        }
    }
}

pub struct Checker<'m> {
    model: &'m Model,
    solver: Solver,
}

/// Outcome of looking up the feature a call site refers to.
pub(crate) enum Resolved<'m> {
    Known(&'m FeatureDecl),
    Unknown(String),
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m Model, config: CheckConfig) -> Self {
        Checker {
            model,
            solver: Solver::new(config.capacity, config.functional_equality),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    pub(crate) fn routine(
        &self,
        class: &str,
        routine: &str,
    ) -> Result<&'m FeatureDecl, CheckError> {
        let c = self
            .model
            .class(class)
            .ok_or_else(|| CheckError::UnknownClass(class.to_string()))?;
        c.feature(routine)
            .map(|f| &f.decl)
            .ok_or_else(|| CheckError::UnknownRoutine {
                class: class.to_string(),
                routine: routine.to_string(),
            })
    }

    pub(crate) fn resolve_call(
        &self,
        class: &str,
        routine: &FeatureDecl,
        call: &CallSite,
    ) -> Resolved<'m> {
        let target_class = match &call.target {
            None => class.to_string(),
            Some(t) => match self.model.path_class(class, Some(routine), t) {
                PathClass::Known(c) => c,
                PathClass::Missing(c) => {
                    return Resolved::Unknown(format!("class {c} is not part of the model"))
                }
                PathClass::Builtin(c) => {
                    return Resolved::Unknown(format!("`{t}` has builtin type {c}"))
                }
                PathClass::Untyped => {
                    return Resolved::Unknown(format!("`{t}` has no declared type"))
                }
            },
        };
        match self.model.lookup_feature(&target_class, &call.feature) {
            Some(f) => Resolved::Known(&f.decl),
            None => Resolved::Unknown(format!(
                "class {target_class} has no feature `{}`",
                call.feature
            )),
        }
    }

    /// Contract of a resolved call, or `None` on an arity mismatch.
    pub(crate) fn instantiate(&self, feature: &FeatureDecl, call: &CallSite) -> Option<Contract> {
        instantiate_contract(feature, call.target.as_ref(), &call.args).ok()
    }

    /// Objects whose invariants apply inside `routine`: every qualifying
    /// path in `formulas`, every call target, and their prefixes. Paths
    /// typed with a class outside the model yield UNKNOWN_CLASS warnings.
    pub(crate) fn scope(
        &self,
        class: &str,
        routine: Option<&FeatureDecl>,
        formulas: &[Formula],
        targets: &[Path],
        at: &Location,
    ) -> (Vec<(Path, String)>, Vec<Diagnostic>) {
        let mut candidates = BTreeSet::new();
        let mut add = |p: Path| {
            for prefix in p.prefixes() {
                candidates.insert(prefix);
            }
            candidates.insert(p);
        };
        for f in formulas {
            for atom in f.atoms() {
                for q in atom.qualifiers() {
                    add(q);
                }
            }
        }
        for t in targets {
            add(t.clone());
        }
        let mut scope = Vec::new();
        let mut warnings = Vec::new();
        for p in candidates {
            match self.model.path_class(class, routine, &p) {
                PathClass::Known(c) => scope.push((p, c)),
                PathClass::Missing(c) => warnings.push(Diagnostic::warning(
                    Code::UnknownClass,
                    at.clone(),
                    format!("`{p}` has class {c}, which is not part of the model; its invariant is not used"),
                )),
                PathClass::Builtin(_) | PathClass::Untyped => {}
            }
        }
        (scope, warnings)
    }

    /// Every formula a routine's checking can touch: its contract, the
    /// conditions in its body and the instantiated contracts of its calls.
    pub(crate) fn routine_formulas(
        &self,
        class: &str,
        routine: &FeatureDecl,
    ) -> (Vec<Formula>, Vec<Path>) {
        let mut formulas: Vec<Formula> = routine
            .precondition
            .iter()
            .chain(&routine.postcondition)
            .map(|c| c.formula.clone())
            .collect();
        let mut targets = Vec::new();
        let mut call = |c: &CallSite, formulas: &mut Vec<Formula>| {
            if let Some(t) = &c.target {
                targets.push(t.clone());
            }
            if let Resolved::Known(f) = self.resolve_call(class, routine, c) {
                if let Some(contract) = self.instantiate(f, c) {
                    formulas.extend(
                        contract
                            .pre
                            .iter()
                            .chain(&contract.post)
                            .map(|c| c.formula.clone()),
                    );
                }
            }
        };
        if let Some(body) = routine.body() {
            body.walk(&mut |s| match s {
                Statement::Call(c) => call(c, &mut formulas),
                Statement::Opaque(o) => {
                    if let Some(c) = &o.embedded_call {
                        call(c, &mut formulas);
                    }
                }
                Statement::Conditional { condition, .. } => formulas.push(condition.clone()),
                Statement::Loop { until, .. } => formulas.push(until.clone()),
            });
        }
        (formulas, targets)
    }
}
