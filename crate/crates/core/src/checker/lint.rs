use crate::ast::Clause;
use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::formula::Formula;
use crate::model::{invariant_context, Model};

use super::{CheckError, Checker};

impl<'m> Checker<'m> {
    /// The invariant of `class` must be satisfiable, and so must each own
    /// routine's precondition and postcondition together with it.
    pub fn check_invariant_feasibility(&self, class: &str) -> Result<Vec<Diagnostic>, CheckError> {
        let c = self
            .model
            .class(class)
            .ok_or_else(|| CheckError::UnknownClass(class.to_string()))?;
        let mut diags = Vec::new();
        if !self.solver.is_satisfiable(&c.invariant_formula())? {
            diags.push(Diagnostic::error(
                Code::StateInconsistent,
                c.decl.location.clone(),
                format!("the invariant of {class} is unsatisfiable"),
            ));
            return Ok(diags);
        }
        for f in &c.decl.features {
            if !f.has_contract() {
                continue;
            }
            let formulas: Vec<Formula> = f
                .precondition
                .iter()
                .chain(&f.postcondition)
                .map(|c| c.formula.clone())
                .collect();
            let (scope, _) = self.scope(class, Some(f), &formulas, &[], &f.location);
            let inv = invariant_context(self.model, &scope, Some(class)).formula();
            let checks = [
                (&f.precondition, Code::PreInfeasible, "precondition"),
                (&f.postcondition, Code::PostInfeasible, "postcondition"),
            ];
            for (clauses, code, what) in checks {
                if clauses.is_empty() {
                    continue;
                }
                let formula = Formula::and(crate::ast::conjoin(clauses), inv.clone());
                if !self.solver.is_satisfiable(&formula)? {
                    diags.push(Diagnostic::error(
                        code,
                        f.location.clone(),
                        format!(
                            "the {what} of `{}` cannot hold together with the invariants",
                            f.name
                        ),
                    ));
                }
            }
        }
        sort_diagnostics(&mut diags);
        Ok(diags)
    }

    /// Flags invariant clauses of `class` that follow from the others.
    /// Clauses are considered from last to first and a flagged clause no
    /// longer counts as a premise, so of two equivalent clauses only the
    /// later one is flagged.
    pub fn lint_redundant_invariants(&self, class: &str) -> Result<Vec<Diagnostic>, CheckError> {
        let c = self
            .model
            .class(class)
            .ok_or_else(|| CheckError::UnknownClass(class.to_string()))?;
        let clauses: &[Clause] = c.invariant();
        let own = &c.decl.invariant;
        let mut flagged = vec![false; clauses.len()];
        for i in (0..clauses.len()).rev() {
            let premises = Formula::conjunction(
                clauses
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i && !flagged[*j])
                    .map(|(_, c)| c.formula.clone()),
            );
            if self
                .solver
                .entails(&premises, &clauses[i].formula)?
                .is_valid()
            {
                flagged[i] = true;
            }
        }
        let mut diags = Vec::new();
        for (i, clause) in clauses.iter().enumerate() {
            if flagged[i] && own.contains(clause) {
                let n = own.iter().position(|c| c == clause).unwrap() + 1;
                diags.push(Diagnostic::info(
                    Code::RedundantInvariant,
                    clause.location.clone(),
                    format!(
                        "invariant clause {n} `{}` of {class} follows from the other clauses",
                        clause.formula
                    ),
                ));
            }
        }
        Ok(diags)
    }
}

/// Class names are written in upper case.
pub fn lint_class_names(model: &Model) -> Vec<Diagnostic> {
    model
        .classes()
        .filter(|c| c.name().chars().any(|ch| ch.is_lowercase()))
        .map(|c| {
            Diagnostic::warning(
                Code::ClassNameStyle,
                c.decl.location.clone(),
                format!("class name `{}` should be upper case", c.name()),
            )
        })
        .collect()
}
