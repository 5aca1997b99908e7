//! Tseitin encoding. Variables `1..=atoms` are the interned atoms; the rest
//! are gate variables.

use crate::formula::Formula;

use super::AtomTable;

/// Non-zero; sign is polarity.
pub(crate) type Lit = i32;

pub(crate) struct Cnf {
    pub num_vars: usize,
    pub num_atoms: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn encode(f: &Formula, table: &mut AtomTable) -> Cnf {
        let mut enc = Encoder {
            table,
            next_var: 0,
            clauses: Vec::new(),
            true_lit: None,
        };
        // atoms already interned by the caller come first
        enc.next_var = enc.table.len() as i32;
        let root = enc.lit(f);
        enc.clauses.push(vec![root]);
        Cnf {
            num_vars: enc.next_var as usize,
            num_atoms: enc.table.len(),
            clauses: enc.clauses,
        }
    }
}

struct Encoder<'t> {
    table: &'t mut AtomTable,
    next_var: i32,
    clauses: Vec<Vec<Lit>>,
    true_lit: Option<Lit>,
}

impl Encoder<'_> {
    fn fresh(&mut self) -> Lit {
        self.next_var += 1;
        self.next_var
    }

    fn truth(&mut self) -> Lit {
        if let Some(t) = self.true_lit {
            return t;
        }
        let t = self.fresh();
        self.clauses.push(vec![t]);
        self.true_lit = Some(t);
        t
    }

    fn lit(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::True => self.truth(),
            Formula::False => -self.truth(),
            Formula::Atom(a) => {
                let before = self.table.len();
                let i = self.table.intern(a);
                assert!(i < before, "atoms are interned before encoding");
                i as Lit + 1
            }
            Formula::Not(x) => -self.lit(x),
            Formula::And(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let g = self.fresh();
                self.clauses.push(vec![-g, a]);
                self.clauses.push(vec![-g, b]);
                self.clauses.push(vec![g, -a, -b]);
                g
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                self.or_gate(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                self.or_gate(-a, b)
            }
        }
    }

    fn or_gate(&mut self, a: Lit, b: Lit) -> Lit {
        let g = self.fresh();
        self.clauses.push(vec![-g, a, b]);
        self.clauses.push(vec![g, -a]);
        self.clauses.push(vec![g, -b]);
        g
    }
}
