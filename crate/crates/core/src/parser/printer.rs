//! Canonical source printer. Output re-parses to the same structure.

use std::fmt::Write;

use crate::ast::{
    Body, ClassDecl, Clause, Declaration, FeatureDecl, Implementation, Note, Statement,
};

const FEATURE: usize = 4;
const SECTION: usize = 8;
const ITEM: usize = 12;

pub fn print_classes(classes: &[ClassDecl]) -> String {
    classes
        .iter()
        .map(print_class)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn print_class(class: &ClassDecl) -> String {
    let mut out = String::new();
    for c in &class.comments {
        let _ = writeln!(out, "-- {c}");
    }
    if class.declared_deferred {
        out.push_str("deferred ");
    }
    let _ = write!(out, "class {}", class.name);
    if !class.parents.is_empty() {
        let _ = write!(out, " inherit {}", class.parents.join(", "));
    }
    out.push('\n');
    if !class.notes.is_empty() {
        out.push_str("note\n");
        notes(&mut out, &class.notes, FEATURE);
    }
    out.push_str("feature\n");
    for (i, f) in class.features.iter().enumerate() {
        if i > 0 && f.implementation != Implementation::Attribute {
            out.push('\n');
        }
        out.push_str(&print_feature(f));
    }
    if !class.invariant.is_empty() {
        out.push_str("invariant\n");
        clauses(&mut out, &class.invariant, FEATURE);
    }
    out.push_str("end\n");
    out
}

pub fn print_feature(f: &FeatureDecl) -> String {
    let mut out = String::new();
    let pad = " ".repeat(FEATURE);
    if f.implementation == Implementation::Attribute {
        for c in &f.comments {
            let _ = writeln!(out, "{pad}-- {c}");
        }
        let ty = f.result_type.as_deref().unwrap_or("ANY");
        let _ = writeln!(out, "{pad}{}: {ty}", f.name);
        return out;
    }
    out.push_str(&pad);
    out.push_str(&f.name);
    if !f.formals.is_empty() {
        let _ = write!(out, " ({})", declarations(&f.formals, "; "));
    }
    if let Some(ty) = &f.result_type {
        let _ = write!(out, ": {ty}");
    }
    out.push('\n');
    for c in &f.comments {
        let _ = writeln!(out, "{}-- {c}", " ".repeat(SECTION));
    }
    let section = |out: &mut String, name: &str| {
        let _ = writeln!(out, "{}{name}", " ".repeat(SECTION));
    };
    if !f.notes.is_empty() {
        section(&mut out, "note");
        notes(&mut out, &f.notes, ITEM);
    }
    if !f.precondition.is_empty() {
        section(&mut out, "require");
        clauses(&mut out, &f.precondition, ITEM);
    }
    if !f.locals.is_empty() {
        section(&mut out, "local");
        for d in &f.locals {
            let _ = writeln!(out, "{}{}: {}", " ".repeat(ITEM), d.name, d.class);
        }
    }
    match &f.implementation {
        Implementation::Deferred => section(&mut out, "deferred"),
        Implementation::Effective(body) => {
            section(&mut out, "do");
            out.push_str(&print_statements(&body.statements, ITEM));
        }
        Implementation::Attribute => unreachable!(),
    }
    if !f.postcondition.is_empty() {
        section(&mut out, "ensure");
        clauses(&mut out, &f.postcondition, ITEM);
    }
    section(&mut out, "end");
    out
}

/// Statements, one per line, at `indent` spaces.
pub fn print_statements(statements: &[Statement], indent: usize) -> String {
    let mut out = String::new();
    body(&mut out, statements, indent);
    out
}

fn body(out: &mut String, statements: &[Statement], indent: usize) {
    let pad = " ".repeat(indent);
    for s in statements {
        match s {
            Statement::Call(c) => {
                let _ = writeln!(out, "{pad}{c}");
            }
            Statement::Opaque(o) => {
                let _ = match &o.comment {
                    Some(c) => writeln!(out, "{pad}{} -- {c}", o.text),
                    None => writeln!(out, "{pad}{}", o.text),
                };
            }
            Statement::Conditional {
                condition,
                then_branch,
                else_branch,
                ..
            } => {
                let _ = writeln!(out, "{pad}if {condition} then");
                nested(out, then_branch, indent);
                if let Some(e) = else_branch {
                    let _ = writeln!(out, "{pad}else");
                    nested(out, e, indent);
                }
                let _ = writeln!(out, "{pad}end");
            }
            Statement::Loop {
                init,
                until,
                body: b,
                ..
            } => {
                let _ = writeln!(out, "{pad}from");
                nested(out, init, indent);
                let _ = writeln!(out, "{pad}until");
                let _ = writeln!(out, "{pad}    {until}");
                let _ = writeln!(out, "{pad}loop");
                nested(out, b, indent);
                let _ = writeln!(out, "{pad}end");
            }
        }
    }
}

fn nested(out: &mut String, b: &Body, indent: usize) {
    body(out, &b.statements, indent + 4);
}

fn clauses(out: &mut String, clauses: &[Clause], indent: usize) {
    let pad = " ".repeat(indent);
    for c in clauses {
        let _ = match &c.label {
            Some(l) => writeln!(out, "{pad}{l}: {}", c.formula),
            None => writeln!(out, "{pad}{}", c.formula),
        };
    }
}

fn notes(out: &mut String, notes: &[Note], indent: usize) {
    let pad = " ".repeat(indent);
    for n in notes {
        let _ = writeln!(out, "{pad}{}: {}", n.key, n.text);
    }
}

fn declarations(decls: &[Declaration], sep: &str) -> String {
    decls
        .iter()
        .map(|d| format!("{}: {}", d.name, d.class))
        .collect::<Vec<_>>()
        .join(sep)
}
