//! Exhaustive truth-table satisfiability. Shares nothing with the CNF/DPLL
//! path beyond `Formula::eval`.

use std::collections::HashMap;

use crate::formula::{Atom, Formula};

use super::LogicError;

pub const ORACLE_MAX_ATOMS: usize = 20;

pub fn truth_table_oracle(f: &Formula) -> Result<bool, LogicError> {
    let atoms = f.atoms();
    if atoms.len() > ORACLE_MAX_ATOMS {
        return Err(LogicError::CapacityExceeded {
            atoms: atoms.len(),
            limit: ORACLE_MAX_ATOMS,
        });
    }
    let index: HashMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let rows: u64 = 1 << atoms.len();
    Ok((0..rows).any(|mask| f.eval(&|a| mask & (1 << index[a]) != 0)))
}
