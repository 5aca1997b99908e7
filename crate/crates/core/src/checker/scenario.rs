//! Path-sensitive walk over a routine body.
//!
//! Branches are never merged: each side of a conditional continues through
//! the rest of the routine on its own. A loop is entered once from a state
//! that keeps only what the invariants still guarantee; its body is checked
//! for one iteration and the code after the loop starts from the same head
//! state plus the exit condition.

use crate::ast::{CallSite, Clause, FeatureDecl, Location, Statement};
use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::formula::Formula;
use crate::logic::Entailment;
use crate::model::invariant_context;

use super::state::{apply_call, Origin, SymbolicState};
use super::{CheckError, Checker, Resolved};

/// What happens once a statement list is exhausted.
enum Cont<'a, 'c> {
    /// End of the routine: check the postcondition.
    Ensure,
    /// End of one loop iteration.
    Iteration,
    Seq(&'a [Statement], &'c Cont<'a, 'c>),
    /// The loop whose initialization just finished.
    LoopHead(&'a Statement, &'c Cont<'a, 'c>),
}

struct Walk<'a, 'm> {
    checker: &'a Checker<'m>,
    class: &'a str,
    routine: &'a FeatureDecl,
    ensure: &'a [Clause],
    diags: Vec<Diagnostic>,
}

impl<'m> Checker<'m> {
    /// Checks every call precondition and the routine's postcondition along
    /// every path through the body of `class.routine`.
    pub fn check_scenario(
        &self,
        class: &str,
        routine: &str,
    ) -> Result<Vec<Diagnostic>, CheckError> {
        let decl = self.routine(class, routine)?;
        let body = decl.body().ok_or_else(|| CheckError::NoBody {
            class: class.to_string(),
            routine: routine.to_string(),
        })?;
        let (formulas, targets) = self.routine_formulas(class, decl);
        let (scope, mut diags) = self.scope(class, Some(decl), &formulas, &targets, &decl.location);
        let context = invariant_context(self.model, &scope, Some(class));

        let mut initial = SymbolicState::new(context.formula());
        for c in &decl.precondition {
            initial = initial.with_fact(c.formula.clone(), Origin::Require);
        }
        if !self.solver.is_satisfiable(&initial.formula())? {
            diags.push(Diagnostic::error(
                Code::StateInconsistent,
                decl.location.clone(),
                format!("the precondition of `{routine}` contradicts the invariants in scope"),
            ));
            sort_diagnostics(&mut diags);
            return Ok(diags);
        }

        let mut walk = Walk {
            checker: self,
            class,
            routine: decl,
            ensure: &decl.postcondition,
            diags,
        };
        walk.statements(&body.statements, &Cont::Ensure, initial)?;
        let mut diags = walk.diags;
        sort_diagnostics(&mut diags);
        Ok(diags)
    }
}

impl<'a, 'm> Walk<'a, 'm> {
    fn statements<'c>(
        &mut self,
        stmts: &'a [Statement],
        cont: &'c Cont<'a, 'c>,
        state: SymbolicState,
    ) -> Result<(), CheckError> {
        let Some((first, rest)) = stmts.split_first() else {
            return self.resume(cont, state);
        };
        match first {
            Statement::Call(call) => match self.call(call, state)? {
                Some(next) => self.statements(rest, cont, next),
                None => Ok(()),
            },
            Statement::Opaque(o) => {
                self.diags.push(Diagnostic::info(
                    Code::OpaqueStatement,
                    o.location.clone(),
                    format!("`{}` has no effect on the tracked facts", o.text),
                ));
                let next = match &o.embedded_call {
                    Some(call) => match self.call(call, state)? {
                        Some(next) => next,
                        None => return Ok(()),
                    },
                    None => state,
                };
                self.statements(rest, cont, next)
            }
            Statement::Conditional {
                condition,
                then_branch,
                else_branch,
                location,
            } => {
                let after = Cont::Seq(rest, cont);
                let then_state = state.with_fact(condition.clone(), Origin::Branch);
                if self.feasible(&then_state)? {
                    self.statements(&then_branch.statements, &after, then_state)?;
                } else {
                    self.dead_branch(location, format!("`{condition}` can never hold here"));
                }
                let else_state = state.with_fact(Formula::not(condition.clone()), Origin::Branch);
                let else_stmts: &'a [Statement] = match else_branch {
                    Some(b) => &b.statements,
                    None => &[],
                };
                if self.feasible(&else_state)? {
                    self.statements(else_stmts, &after, else_state)?;
                } else if else_branch.is_some() {
                    self.dead_branch(
                        location,
                        format!(
                            "`{condition}` always holds here, so the else branch is unreachable"
                        ),
                    );
                }
                Ok(())
            }
            Statement::Loop { init, .. } => {
                let after = Cont::Seq(rest, cont);
                let head = Cont::LoopHead(first, &after);
                self.statements(&init.statements, &head, state)
            }
        }
    }

    fn resume<'c>(
        &mut self,
        cont: &'c Cont<'a, 'c>,
        state: SymbolicState,
    ) -> Result<(), CheckError> {
        match cont {
            Cont::Ensure => self.check_ensure(&state),
            Cont::Iteration => Ok(()),
            Cont::Seq(rest, outer) => self.statements(rest, outer, state),
            Cont::LoopHead(stmt, outer) => self.loop_head(stmt, outer, state),
        }
    }

    fn loop_head<'c>(
        &mut self,
        stmt: &'a Statement,
        after: &'c Cont<'a, 'c>,
        state: SymbolicState,
    ) -> Result<(), CheckError> {
        let Statement::Loop {
            until,
            body,
            location,
            ..
        } = stmt
        else {
            unreachable!("loop continuation always holds a loop");
        };
        // Only precondition facts that the invariants alone re-establish
        // survive into an arbitrary iteration.
        let mut head = state.havoc();
        for fact in &state.facts {
            if fact.origin == Origin::Require
                && self
                    .checker
                    .solver
                    .entails(&head.formula(), &fact.formula)?
                    .is_valid()
            {
                head.facts.push(fact.clone());
            }
        }
        let body_state = head.with_fact(Formula::not(until.clone()), Origin::Branch);
        if self.feasible(&body_state)? {
            self.statements(&body.statements, &Cont::Iteration, body_state)?;
        } else {
            self.dead_branch(
                location,
                format!("the loop body never runs: `{until}` always holds"),
            );
        }
        let exit_state = head.with_fact(until.clone(), Origin::Exit);
        if self.feasible(&exit_state)? {
            self.resume(after, exit_state)
        } else {
            self.dead_branch(
                location,
                format!("the loop never exits: `{until}` can never hold"),
            );
            Ok(())
        }
    }

    fn feasible(&self, state: &SymbolicState) -> Result<bool, CheckError> {
        Ok(self.checker.solver.is_satisfiable(&state.formula())?)
    }

    fn dead_branch(&mut self, at: &Location, message: String) {
        self.diags
            .push(Diagnostic::warning(Code::DeadBranch, at.clone(), message));
    }

    /// Checks the callee's precondition and moves to its postcondition.
    /// `None` ends the path.
    fn call(
        &mut self,
        call: &CallSite,
        state: SymbolicState,
    ) -> Result<Option<SymbolicState>, CheckError> {
        let feature = match self.checker.resolve_call(self.class, self.routine, call) {
            Resolved::Known(f) => f,
            Resolved::Unknown(reason) => {
                self.diags.push(Diagnostic::warning(
                    Code::UnknownContract,
                    call.location.clone(),
                    format!(
                        "no contract for `{}`: {reason}; all facts are discarded",
                        call.path()
                    ),
                ));
                return Ok(Some(state.havoc()));
            }
        };
        let Some(contract) = self.checker.instantiate(feature, call) else {
            self.diags.push(Diagnostic::error(
                Code::ArityMismatch,
                call.location.clone(),
                format!(
                    "`{}` takes {} argument(s) but the call passes {}; all facts are discarded",
                    call.path(),
                    feature.formals.len(),
                    call.args.len()
                ),
            ));
            return Ok(Some(state.havoc()));
        };
        let premises = state.formula();
        for clause in &contract.pre {
            if let Entailment::Refuted(w) =
                self.checker.solver.entails(&premises, &clause.formula)?
            {
                self.diags.push(
                    Diagnostic::error(
                        Code::PreUnproven,
                        call.location.clone(),
                        format!(
                            "precondition `{}` of `{}` is not established here",
                            clause.formula,
                            call.path()
                        ),
                    )
                    .with_witness(w),
                );
            }
        }
        let post: Vec<Formula> = contract.post.iter().map(|c| c.formula.clone()).collect();
        match apply_call(&self.checker.solver, &state, &post)? {
            Some(next) => Ok(Some(next)),
            None => {
                self.diags.push(Diagnostic::error(
                    Code::StateInconsistent,
                    call.location.clone(),
                    format!(
                        "the postcondition of `{}` contradicts the invariants in scope",
                        call.path()
                    ),
                ));
                Ok(None)
            }
        }
    }

    fn check_ensure(&mut self, state: &SymbolicState) -> Result<(), CheckError> {
        let premises = state.formula();
        for clause in self.ensure {
            if let Entailment::Refuted(w) =
                self.checker.solver.entails(&premises, &clause.formula)?
            {
                self.diags.push(
                    Diagnostic::error(
                        Code::PostUnproven,
                        clause.location.clone(),
                        format!(
                            "postcondition `{}` of `{}` does not hold on every path",
                            clause.formula, self.routine.name
                        ),
                    )
                    .with_witness(w),
                );
            }
        }
        Ok(())
    }
}
