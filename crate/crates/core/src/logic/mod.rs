//! Propositional reasoning over opaque atoms.
//!
//! [`Solver`] decides satisfiability exactly by Tseitin encoding into CNF
//! followed by DPLL search. [`truth_table_oracle`] is a separate brute-force
//! procedure used to cross-check it.

mod cnf;
mod dpll;
mod oracle;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::formula::{Atom, Formula, Term};

pub use oracle::{truth_table_oracle, ORACLE_MAX_ATOMS};

pub const DEFAULT_CAPACITY: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("formula has {atoms} atoms, more than the configured limit of {limit}")]
    CapacityExceeded { atoms: usize, limit: usize },
}

/// Dense interning of atoms for one checking session.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, atom: &Atom) -> usize {
        if let Some(&i) = self.index.get(atom) {
            return i;
        }
        let i = self.atoms.len();
        self.atoms.push(atom.clone());
        self.index.insert(atom.clone(), i);
        i
    }

    pub fn get(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }
}

/// A truth assignment, ordered by the atoms' printed form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Witness {
    assignment: Vec<(Atom, bool)>,
}

impl Witness {
    pub fn new(mut assignment: Vec<(Atom, bool)>) -> Self {
        assignment.sort_by_cached_key(|(a, _)| (a.to_string(), a.clone()));
        assignment.dedup_by(|a, b| a.0 == b.0);
        Witness { assignment }
    }

    pub fn value(&self, atom: &Atom) -> Option<bool> {
        self.assignment
            .iter()
            .find(|(a, _)| a == atom)
            .map(|(_, v)| *v)
    }

    /// Evaluates `f`; atoms the witness does not mention count as false.
    pub fn satisfies(&self, f: &Formula) -> bool {
        f.eval(&|a| self.value(a).unwrap_or(false))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, bool)> {
        self.assignment.iter().map(|(a, v)| (a, *v))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Printed atom to value.
    pub fn to_map(&self) -> BTreeMap<String, bool> {
        self.iter().map(|(a, v)| (a.to_string(), v)).collect()
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (a, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entailment {
    Valid,
    /// Premises hold and the conclusion fails under this assignment.
    Refuted(Witness),
}

impl Entailment {
    pub fn is_valid(&self) -> bool {
        matches!(self, Entailment::Valid)
    }

    pub fn counterexample(&self) -> Option<&Witness> {
        match self {
            Entailment::Valid => None,
            Entailment::Refuted(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solver {
    pub capacity: usize,
    /// Treat `x = r1` and `x = r2` as mutually exclusive for distinct `r1`, `r2`.
    pub functional_equality: bool,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            capacity: DEFAULT_CAPACITY,
            functional_equality: false,
        }
    }
}

impl Solver {
    pub fn new(capacity: usize, functional_equality: bool) -> Self {
        Solver {
            capacity,
            functional_equality,
        }
    }

    /// A satisfying witness, or `None` when unsatisfiable.
    pub fn satisfiable(&self, f: &Formula) -> Result<Option<Witness>, LogicError> {
        let f = if self.functional_equality {
            Formula::and(f.clone(), functional_equality_axioms(f))
        } else {
            f.clone()
        };
        let mut table = AtomTable::new();
        for a in f.atoms() {
            table.intern(a);
        }
        if table.len() > self.capacity {
            return Err(LogicError::CapacityExceeded {
                atoms: table.len(),
                limit: self.capacity,
            });
        }
        let cnf = cnf::Cnf::encode(&f, &mut table);
        let model = dpll::solve(&cnf);
        Ok(model.map(|values| {
            let witness = Witness::new(
                table
                    .iter()
                    .enumerate()
                    .map(|(i, a)| (a.clone(), values[i]))
                    .collect(),
            );
            debug_assert!(witness.satisfies(&f));
            witness
        }))
    }

    pub fn is_satisfiable(&self, f: &Formula) -> Result<bool, LogicError> {
        Ok(self.satisfiable(f)?.is_some())
    }

    /// `premises ⊨ conclusion`, decided as unsatisfiability of
    /// `premises ∧ ¬conclusion`.
    pub fn entails(
        &self,
        premises: &Formula,
        conclusion: &Formula,
    ) -> Result<Entailment, LogicError> {
        let query = Formula::and(premises.clone(), Formula::not(conclusion.clone()));
        Ok(match self.satisfiable(&query)? {
            None => Entailment::Valid,
            Some(w) => Entailment::Refuted(w),
        })
    }
}

pub fn satisfiable(f: &Formula) -> Result<Option<Witness>, LogicError> {
    Solver::default().satisfiable(f)
}

pub fn entails(premises: &Formula, conclusion: &Formula) -> Result<Entailment, LogicError> {
    Solver::default().entails(premises, conclusion)
}

/// Pairwise exclusions `not (x = a and x = b)` for every left operand that is
/// equated with several distinct right operands in `f`.
pub fn functional_equality_axioms(f: &Formula) -> Formula {
    let mut by_left: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for atom in f.atoms() {
        if let Atom::Eq(l, r) = atom {
            let rights = by_left.entry(l).or_default();
            if !rights.contains(&r) {
                rights.push(r);
            }
        }
    }
    let mut axioms = Vec::new();
    for (left, rights) in by_left {
        for (i, a) in rights.iter().enumerate() {
            for b in &rights[i + 1..] {
                let eq = |r: &Term| Formula::Atom(Atom::Eq(left.clone(), r.clone()));
                axioms.push(Formula::not(Formula::and(eq(a), eq(b))));
            }
        }
    }
    Formula::conjunction(axioms)
}

/// Splits the outermost `or` structure, looking through double negations.
/// Conjunctions are never distributed.
pub fn top_level_dnf(f: &Formula) -> Vec<Formula> {
    let mut f = f;
    while let Formula::Not(inner) = f {
        match inner.as_ref() {
            Formula::Not(x) => f = x,
            _ => break,
        }
    }
    match f {
        Formula::Or(a, b) => {
            let mut out = top_level_dnf(a);
            out.extend(top_level_dnf(b));
            out
        }
        other => vec![other.clone()],
    }
}

/// `(antecedent, consequent)` for every clause whose top connective is
/// `implies`, in clause order.
pub fn implications_of(clauses: &[Formula]) -> Vec<(Formula, Formula)> {
    clauses
        .iter()
        .filter_map(|c| match c {
            Formula::Implies(a, b) => Some((a.as_ref().clone(), b.as_ref().clone())),
            _ => None,
        })
        .collect()
}
