use std::fmt;

use crate::formula::Formula;
use crate::logic::{LogicError, Solver};

/// Why a fact is part of a symbolic state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Require,
    Post,
    Branch,
    Exit,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Require => "require",
            Origin::Post => "post",
            Origin::Branch => "branch",
            Origin::Exit => "exit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub formula: Formula,
    pub origin: Origin,
}

/// What is known at one program point: a list of facts plus the invariants
/// of the objects in scope, which hold at every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicState {
    pub facts: Vec<Fact>,
    pub invariants: Formula,
}

impl SymbolicState {
    pub fn new(invariants: Formula) -> Self {
        SymbolicState {
            facts: Vec::new(),
            invariants,
        }
    }

    pub fn with_fact(&self, formula: Formula, origin: Origin) -> Self {
        let mut next = self.clone();
        next.facts.push(Fact { formula, origin });
        next
    }

    /// All facts and the invariants as one conjunction.
    pub fn formula(&self) -> Formula {
        Formula::conjunction(
            self.facts
                .iter()
                .map(|f| f.formula.clone())
                .chain(std::iter::once(self.invariants.clone())),
        )
    }

    /// Drops every fact; only the invariants survive.
    pub fn havoc(&self) -> Self {
        SymbolicState::new(self.invariants.clone())
    }
}

/// State after a call with postcondition clauses `post`: the postcondition
/// and the invariants, then each earlier fact (oldest first) that can be
/// added without contradiction. `None` when the postcondition contradicts
/// the invariants.
pub fn apply_call(
    solver: &Solver,
    state: &SymbolicState,
    post: &[Formula],
) -> Result<Option<SymbolicState>, LogicError> {
    let mut next = SymbolicState::new(state.invariants.clone());
    for p in post {
        next.facts.push(Fact {
            formula: p.clone(),
            origin: Origin::Post,
        });
    }
    let mut acc = next.formula();
    if !solver.is_satisfiable(&acc)? {
        return Ok(None);
    }
    for fact in &state.facts {
        let candidate = Formula::and(acc.clone(), fact.formula.clone());
        if solver.is_satisfiable(&candidate)? {
            acc = candidate;
            next.facts.push(fact.clone());
        }
    }
    Ok(Some(next))
}
