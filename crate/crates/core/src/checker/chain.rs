use crate::ast::{conjoin, Statement};
use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::formula::Formula;
use crate::logic::Entailment;
use crate::model::invariant_context;

use super::{CheckError, Checker, Resolved};

impl<'m> Checker<'m> {
    /// Treats the body of `class.routine` as a straight sequence of calls
    /// and checks that the routine's precondition establishes the first
    /// call's precondition and each postcondition the next precondition.
    /// Facts do not carry over beyond one step.
    pub fn check_chain(&self, class: &str, routine: &str) -> Result<Vec<Diagnostic>, CheckError> {
        let decl = self.routine(class, routine)?;
        let body = decl.body().ok_or_else(|| CheckError::NoBody {
            class: class.to_string(),
            routine: routine.to_string(),
        })?;
        let mut calls = Vec::new();
        for s in &body.statements {
            match s {
                Statement::Call(c) => calls.push(c),
                other => {
                    return Err(CheckError::NotAPlainSequence {
                        class: class.to_string(),
                        routine: routine.to_string(),
                        location: other.location().clone(),
                    })
                }
            }
        }
        let (formulas, targets) = self.routine_formulas(class, decl);
        let (scope, mut diags) = self.scope(class, Some(decl), &formulas, &targets, &decl.location);
        let inv = invariant_context(self.model, &scope, Some(class)).formula();

        let mut previous = conjoin(&decl.precondition);
        let mut previous_name: Option<String> = None;
        for (i, call) in calls.iter().enumerate() {
            let (pre, post) = match self.resolve_call(class, decl, call) {
                Resolved::Known(f) => match self.instantiate(f, call) {
                    Some(c) => (c.pre_formula(), c.post_formula()),
                    None => {
                        diags.push(Diagnostic::error(
                            Code::ArityMismatch,
                            call.location.clone(),
                            format!(
                                "`{}` takes {} argument(s) but the call passes {}",
                                call.path(),
                                f.formals.len(),
                                call.args.len()
                            ),
                        ));
                        (Formula::True, Formula::True)
                    }
                },
                Resolved::Unknown(reason) => {
                    diags.push(Diagnostic::warning(
                        Code::UnknownContract,
                        call.location.clone(),
                        format!("no contract for `{}`: {reason}", call.path()),
                    ));
                    (Formula::True, Formula::True)
                }
            };
            let premises = Formula::and(previous.clone(), inv.clone());
            if let Entailment::Refuted(w) = self.solver.entails(&premises, &pre)? {
                let source = match &previous_name {
                    None => format!("the precondition of `{routine}`"),
                    Some(p) => format!("the postcondition of step {i} `{p}`"),
                };
                diags.push(
                    Diagnostic::error(
                        Code::ChainBreak,
                        call.location.clone(),
                        format!(
                            "step {} `{}`: precondition `{pre}` does not follow from {source}",
                            i + 1,
                            call.path()
                        ),
                    )
                    .with_witness(w),
                );
            }
            previous = post;
            previous_name = Some(call.path().to_string());
        }
        sort_diagnostics(&mut diags);
        Ok(diags)
    }
}
