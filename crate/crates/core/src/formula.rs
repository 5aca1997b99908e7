//! Propositional formulas over opaque atoms.
//!
//! Atoms are compared structurally; two atoms denote the same proposition
//! exactly when their shapes are equal. Paths, terms and atoms print in the
//! same notation the parser accepts, so `Display` output re-parses to an
//! identical structure.

use std::collections::HashSet;
use std::fmt;

/// A dotted access path such as `car.control_module`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<String>);

impl Path {
    pub fn new(segments: Vec<String>) -> Self {
        assert!(!segments.is_empty(), "a path has at least one segment");
        Path(segments)
    }

    pub fn single(name: impl Into<String>) -> Self {
        Path(vec![name.into()])
    }

    /// Splits on `.`; empty segments are dropped.
    pub fn parse(text: &str) -> Self {
        Path::new(
            text.split('.')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    pub fn head(&self) -> &str {
        &self.0[0]
    }

    pub fn last(&self) -> &str {
        &self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Everything but the first segment, if anything remains.
    pub fn tail(&self) -> Option<Path> {
        (self.0.len() > 1).then(|| Path(self.0[1..].to_vec()))
    }

    /// Everything but the last segment, if anything remains.
    pub fn parent(&self) -> Option<Path> {
        (self.0.len() > 1).then(|| Path(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn join(&self, other: &Path) -> Path {
        let mut segments = self.0.clone();
        segments.extend(other.0.iter().cloned());
        Path(segments)
    }

    pub fn child(&self, name: impl Into<String>) -> Path {
        let mut segments = self.0.clone();
        segments.push(name.into());
        Path(segments)
    }

    /// Proper prefixes, shortest first: `a.b.c` yields `a` and `a.b`.
    pub fn prefixes(&self) -> impl Iterator<Item = Path> + '_ {
        (1..self.0.len()).map(move |n| Path(self.0[..n].to_vec()))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

/// An argument or comparison operand: an object path, or any other
/// expression kept as normalized source text (literals, arithmetic).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Path(Path),
    Raw(String),
}

impl Term {
    pub fn as_path(&self) -> Option<&Path> {
        match self {
            Term::Path(p) => Some(p),
            Term::Raw(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Path(p) => p.fmt(f),
            Term::Raw(r) => f.write_str(r),
        }
    }
}

/// One token-level piece of an opaque atom. Paths are kept separate so that
/// contract instantiation can still requalify them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpaquePart {
    Path(Path),
    Sym(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// Boolean query, possibly qualified: `is_available`, `car.is_moving`.
    Query(Path),
    /// Query with arguments: `l.book_is_on_hold (b, p1, lb)`.
    Predicate {
        receiver: Option<Path>,
        feature: String,
        args: Vec<Term>,
    },
    Eq(Term, Term),
    Ne(Term, Term),
    /// Comparisons, arithmetic and quantifiers; a free proposition.
    Opaque(Vec<OpaquePart>),
}

impl Atom {
    pub fn query(path: &str) -> Atom {
        Atom::Query(Path::parse(path))
    }

    /// Paths mentioned by the atom, in textual order.
    pub fn paths(&self) -> Vec<&Path> {
        let mut out: Vec<&Path> = Vec::new();
        match self {
            Atom::Query(p) => out.push(p),
            Atom::Predicate { receiver, args, .. } => {
                out.extend(receiver.iter());
                out.extend(args.iter().filter_map(Term::as_path));
            }
            Atom::Eq(l, r) | Atom::Ne(l, r) => {
                out.extend(l.as_path());
                out.extend(r.as_path());
            }
            Atom::Opaque(parts) => out.extend(parts.iter().filter_map(|p| match p {
                OpaquePart::Path(p) => Some(p),
                OpaquePart::Sym(_) => None,
            })),
        }
        out
    }

    /// Paths used as receivers of a feature access: the qualifying prefix of
    /// a query path and the receiver of a predicate.
    pub fn qualifiers(&self) -> Vec<Path> {
        let mut out = Vec::new();
        match self {
            Atom::Query(p) => out.extend(p.parent()),
            Atom::Predicate { receiver, args, .. } => {
                out.extend(receiver.iter().cloned());
                out.extend(
                    args.iter()
                        .filter_map(Term::as_path)
                        .filter_map(Path::parent),
                );
            }
            Atom::Eq(l, r) | Atom::Ne(l, r) => {
                out.extend(
                    [l, r]
                        .into_iter()
                        .filter_map(Term::as_path)
                        .filter_map(Path::parent),
                );
            }
            Atom::Opaque(parts) => {
                let bound = opaque_bound_names(parts);
                for part in parts {
                    if let OpaquePart::Path(p) = part {
                        if !bound.contains(p.head()) {
                            out.extend(p.parent());
                        }
                    }
                }
            }
        }
        out
    }
}

fn opaque_bound_names(parts: &[OpaquePart]) -> HashSet<String> {
    parts
        .windows(2)
        .filter_map(|w| match w {
            [OpaquePart::Sym(kw), OpaquePart::Path(p)] if kw == "as" => Some(p.head().to_string()),
            _ => None,
        })
        .collect()
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    f.write_str(" (")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Query(p) => p.fmt(f),
            Atom::Predicate {
                receiver,
                feature,
                args,
            } => {
                if let Some(r) = receiver {
                    write!(f, "{r}.")?;
                }
                f.write_str(feature)?;
                write_args(f, args)
            }
            Atom::Eq(l, r) => write!(f, "{l} = {r}"),
            Atom::Ne(l, r) => write!(f, "{l} /= {r}"),
            Atom::Opaque(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match part {
                        OpaquePart::Path(p) => p.fmt(f)?,
                        OpaquePart::Sym(s) => f.write_str(s)?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl From<Atom> for Formula {
    fn from(atom: Atom) -> Self {
        Formula::Atom(atom)
    }
}

impl Formula {
    pub fn query(path: &str) -> Formula {
        Formula::Atom(Atom::query(path))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Distinct atoms in order of first occurrence.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| {
            if seen.insert(a) {
                out.push(a);
            }
        });
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(x) => x.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(x) => Formula::not(x.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    /// Direct evaluation under an assignment.
    pub fn eval(&self, value: &impl Fn(&Atom) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => value(a),
            Formula::Not(x) => !x.eval(value),
            Formula::And(a, b) => a.eval(value) && b.eval(value),
            Formula::Or(a, b) => a.eval(value) || b.eval(value),
            Formula::Implies(a, b) => !a.eval(value) || b.eval(value),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            Formula::True | Formula::False | Formula::Atom(_) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => a.fmt(f),
            Formula::Not(x) => {
                f.write_str("not ")?;
                x.fmt_child(f, x.precedence() < p)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let op = if matches!(self, Formula::And(..)) {
                    "and"
                } else {
                    "or"
                };
                a.fmt_child(f, a.precedence() < p)?;
                write!(f, " {op} ")?;
                b.fmt_child(f, b.precedence() <= p)
            }
            Formula::Implies(a, b) => {
                a.fmt_child(f, a.precedence() <= p)?;
                f.write_str(" implies ")?;
                b.fmt_child(f, b.precedence() < p)
            }
        }
    }
}

/// Re-expresses a feature's clauses at a call site: formal arguments become
/// the actual terms, everything else is qualified by the receiver.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    receiver: Option<Path>,
    bindings: Vec<(String, Term)>,
}

impl Substitution {
    pub fn new(receiver: Option<Path>, bindings: Vec<(String, Term)>) -> Self {
        Substitution { receiver, bindings }
    }

    /// Prefix every path with `receiver`; no formals.
    pub fn prefix(receiver: Path) -> Self {
        Substitution {
            receiver: Some(receiver),
            bindings: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.receiver.is_none()
            && self
                .bindings
                .iter()
                .all(|(name, t)| matches!(t, Term::Path(p) if p.len() == 1 && p.head() == name))
    }

    pub fn path(&self, path: &Path) -> Term {
        if let Some((_, actual)) = self.bindings.iter().find(|(n, _)| n == path.head()) {
            return match (actual, path.tail()) {
                (actual, None) => actual.clone(),
                (Term::Path(p), Some(rest)) => Term::Path(p.join(&rest)),
                (Term::Raw(r), Some(rest)) => Term::Raw(format!("{r}.{rest}")),
            };
        }
        match &self.receiver {
            Some(r) => Term::Path(r.join(path)),
            None => Term::Path(path.clone()),
        }
    }

    pub fn term(&self, term: &Term) -> Term {
        match term {
            Term::Path(p) => self.path(p),
            Term::Raw(_) => term.clone(),
        }
    }

    pub fn atom(&self, atom: &Atom) -> Atom {
        match atom {
            Atom::Query(p) => match self.path(p) {
                Term::Path(p) => Atom::Query(p),
                Term::Raw(r) => Atom::Opaque(vec![OpaquePart::Sym(r)]),
            },
            Atom::Predicate {
                receiver,
                feature,
                args,
            } => {
                let receiver = match receiver {
                    None => self.receiver.clone(),
                    Some(r) => match self.path(r) {
                        Term::Path(p) => Some(p),
                        Term::Raw(r) => {
                            let args = args.iter().map(|a| self.term(a)).collect();
                            let shown = Atom::Predicate {
                                receiver: None,
                                feature: feature.clone(),
                                args,
                            };
                            return Atom::Opaque(vec![OpaquePart::Sym(format!("{r}.{shown}"))]);
                        }
                    },
                };
                Atom::Predicate {
                    receiver,
                    feature: feature.clone(),
                    args: args.iter().map(|a| self.term(a)).collect(),
                }
            }
            Atom::Eq(l, r) => Atom::Eq(self.term(l), self.term(r)),
            Atom::Ne(l, r) => Atom::Ne(self.term(l), self.term(r)),
            Atom::Opaque(parts) => {
                let bound = opaque_bound_names(parts);
                Atom::Opaque(
                    parts
                        .iter()
                        .map(|part| match part {
                            OpaquePart::Path(p) if !bound.contains(p.head()) => {
                                match self.path(p) {
                                    Term::Path(p) => OpaquePart::Path(p),
                                    Term::Raw(r) => OpaquePart::Sym(r),
                                }
                            }
                            other => other.clone(),
                        })
                        .collect(),
                )
            }
        }
    }

    pub fn formula(&self, formula: &Formula) -> Formula {
        if self.is_identity() {
            return formula.clone();
        }
        formula.map_atoms(&|a| self.atom(a))
    }
}
