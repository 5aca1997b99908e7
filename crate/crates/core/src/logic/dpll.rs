//! DPLL with unit propagation over a trail.

use super::cnf::{Cnf, Lit};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unassigned,
    True,
    False,
}

struct Search<'c> {
    clauses: &'c [Vec<Lit>],
    values: Vec<Value>,
    trail: Vec<usize>,
}

impl Search<'_> {
    fn lit_value(&self, lit: Lit) -> Value {
        let v = self.values[lit.unsigned_abs() as usize];
        match (v, lit > 0) {
            (Value::Unassigned, _) => Value::Unassigned,
            (Value::True, true) | (Value::False, false) => Value::True,
            _ => Value::False,
        }
    }

    fn assign(&mut self, lit: Lit) {
        let var = lit.unsigned_abs() as usize;
        self.values[var] = if lit > 0 { Value::True } else { Value::False };
        self.trail.push(var);
    }

    fn undo_to(&mut self, mark: usize) {
        for var in self.trail.drain(mark..) {
            self.values[var] = Value::Unassigned;
        }
    }

    /// False on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for clause in self.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &lit in clause {
                    match self.lit_value(lit) {
                        Value::True => {
                            satisfied = true;
                            break;
                        }
                        Value::Unassigned => {
                            open += 1;
                            unassigned = Some(lit);
                        }
                        Value::False => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        self.assign(unassigned.unwrap());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn branch_literal(&self) -> Option<Lit> {
        for clause in self.clauses {
            if clause.iter().any(|&l| self.lit_value(l) == Value::True) {
                continue;
            }
            if let Some(&l) = clause
                .iter()
                .find(|&&l| self.lit_value(l) == Value::Unassigned)
            {
                return Some(l);
            }
        }
        None
    }

    fn run(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo_to(mark);
            return false;
        }
        let Some(lit) = self.branch_literal() else {
            return true;
        };
        for choice in [lit, -lit] {
            let inner = self.trail.len();
            self.assign(choice);
            if self.run() {
                return true;
            }
            self.undo_to(inner);
        }
        self.undo_to(mark);
        false
    }
}

/// Values for the atom variables of a satisfying assignment. Atoms left
/// open by the search are set to false; every clause is already satisfied,
/// so any completion is a model.
pub(crate) fn solve(cnf: &Cnf) -> Option<Vec<bool>> {
    let mut search = Search {
        clauses: &cnf.clauses,
        values: vec![Value::Unassigned; cnf.num_vars + 1],
        trail: Vec::new(),
    };
    if !search.run() {
        return None;
    }
    Some(
        (1..=cnf.num_atoms)
            .map(|v| search.values[v] == Value::True)
            .collect(),
    )
}
