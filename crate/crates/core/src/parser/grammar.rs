//! Recursive-descent parser.
//!
//! Clause and statement lists need no separators: an expression ends at the
//! first token that cannot continue it. An argument list only opens on the
//! same line as the name it applies to, so a parenthesized clause on the
//! next line starts a new clause.

use std::collections::HashSet;

use crate::ast::{
    Body, CallSite, ClassDecl, Clause, Declaration, FeatureDecl, Implementation, Location, Note,
    OpaqueStatement, Statement,
};
use crate::diagnostic::{Code, Severity};
use crate::formula::{Atom, Formula, OpaquePart, Path, Term};

use super::lexer::{tokenize, Token, TokenKind};
use super::ParseDiagnostic;

/// Classes of one source file plus everything the parser reported.
#[derive(Debug, Clone, Default)]
pub struct SourceFile {
    pub classes: Vec<ClassDecl>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl SourceFile {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(ParseDiagnostic::is_error)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedExpression {
    pub formula: Formula,
    pub warnings: Vec<ParseDiagnostic>,
}

pub fn parse_source(file: &str, source: &str) -> SourceFile {
    parse_tokens(file, tokenize(source))
}

/// Parses an already tokenized file. Comment tokens are kept as trivia.
pub fn parse_tokens(file: &str, tokens: Vec<Token>) -> SourceFile {
    let mut p = Parser::new(file, tokens);
    let mut classes = Vec::new();
    while !p.at_eof() {
        if p.at_class_start() {
            match p.class() {
                Ok(c) => classes.push(c),
                Err(Failed) => p.recover(),
            }
        } else {
            let _ = p.fail::<()>(&["`class`"], None);
            p.recover();
        }
    }
    SourceFile {
        classes,
        diagnostics: p.diags,
    }
}

/// Parses a single assertion expression such as a contract clause.
pub fn parse_expression(text: &str) -> Result<ParsedExpression, Vec<ParseDiagnostic>> {
    let mut p = Parser::new("<expression>", tokenize(text));
    let result = p.expr().and_then(|f| {
        if p.at_eof() {
            Ok(f)
        } else {
            p.fail(&["end of expression"], None)
        }
    });
    match result {
        Ok(formula) if !p.diags.iter().any(ParseDiagnostic::is_error) => Ok(ParsedExpression {
            formula,
            warnings: p.diags,
        }),
        _ => Err(p.diags),
    }
}

struct Failed;

type PResult<T> = Result<T, Failed>;

enum OperandKind {
    Path(Path),
    App {
        receiver: Option<Path>,
        feature: String,
        args: Vec<Term>,
    },
    Literal(String),
    Bool(bool),
    Group(Formula),
    Complex,
}

const ROUTINE_START: &[&str] = &["note", "Note", "require", "local", "do", "deferred"];
const RELATIONS: &[&str] = &["=", "/=", "<", ">", "<=", ">="];
const ARITHMETIC: &[&str] = &["+", "-", "*", "/", "//", "\\\\", "^"];

struct Parser {
    file: String,
    tokens: Vec<Token>,
    comments: Vec<Token>,
    comment_cursor: usize,
    claimed_comments: HashSet<usize>,
    pos: usize,
    eof: Token,
    diags: Vec<ParseDiagnostic>,
}

impl Parser {
    fn new(file: &str, all: Vec<Token>) -> Self {
        let eof = match all.last() {
            Some(t) => Token {
                kind: TokenKind::Error,
                lexeme: String::new(),
                offset: t.end(),
                line: t.line,
                column: t.column + t.lexeme.chars().count() as u32,
            },
            None => Token {
                kind: TokenKind::Error,
                lexeme: String::new(),
                offset: 0,
                line: 1,
                column: 1,
            },
        };
        let (comments, tokens) = all.into_iter().partition(|t| t.kind == TokenKind::Comment);
        Parser {
            file: file.to_string(),
            tokens,
            comments,
            comment_cursor: 0,
            claimed_comments: HashSet::new(),
            pos: 0,
            eof,
            diags: Vec::new(),
        }
    }

    // ---- token access ----

    fn at_eof(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> &Token {
        self.tokens.get(self.pos).unwrap_or(&self.eof)
    }

    fn peek_at(&self, n: usize) -> &Token {
        self.tokens.get(self.pos + n).unwrap_or(&self.eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if !self.at_eof() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: &str) -> bool {
        !self.at_eof() && self.peek().is_keyword(kw)
    }

    fn at_sym(&self, sym: &str) -> bool {
        !self.at_eof() && self.peek().is_symbol(sym)
    }

    fn at_ident(&self) -> bool {
        !self.at_eof() && self.peek().kind == TokenKind::Ident
    }

    fn at_note(&self) -> bool {
        self.at_kw("note") || self.at_kw("Note")
    }

    fn at_class_start(&self) -> bool {
        self.at_kw("class") || (self.at_kw("deferred") && self.peek_at(1).is_keyword("class"))
    }

    /// `(` that opens an argument list for the previous token.
    fn at_args(&self) -> bool {
        self.at_sym("(") && self.pos > 0 && self.tokens[self.pos - 1].line == self.peek().line
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.at_kw(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        let hit = self.at_sym(sym);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn location(&self, t: &Token) -> Location {
        Location::new(&self.file, t.line, t.column)
    }

    fn describe(&self, t: &Token) -> String {
        if self.at_eof() {
            return "end of input".to_string();
        }
        match t.kind {
            TokenKind::Error if t.lexeme.starts_with('"') => "unterminated string".to_string(),
            TokenKind::Error => format!("invalid character `{}`", t.lexeme),
            _ => format!("`{}`", t.lexeme),
        }
    }

    fn fail<T>(&mut self, expected: &[&str], message: Option<String>) -> PResult<T> {
        let t = self.peek().clone();
        let found = self.describe(&t);
        let message =
            message.unwrap_or_else(|| format!("expected {}, found {found}", expected.join(" or ")));
        self.diags.push(ParseDiagnostic {
            severity: Severity::Error,
            code: Code::ParseError,
            location: self.location(&t),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: Some(found),
            message,
        });
        Err(Failed)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            self.fail(&[&format!("`{kw}`")], None)
        }
    }

    fn expect_sym(&mut self, sym: &str) -> PResult<Token> {
        if self.at_sym(sym) {
            Ok(self.bump())
        } else {
            self.fail(&[&format!("`{sym}`")], None)
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Token> {
        if self.at_ident() {
            Ok(self.bump())
        } else {
            self.fail(&[what], None)
        }
    }

    /// Source text of `tokens[from..to]`, one space wherever the source had
    /// any gap.
    fn text(&self, from: usize, to: usize) -> String {
        let mut out = String::new();
        for i in from..to {
            let t = &self.tokens[i];
            if i > from && t.offset > self.tokens[i - 1].end() {
                out.push(' ');
            }
            out.push_str(&t.lexeme);
        }
        out
    }

    fn recover(&mut self) {
        self.bump();
        while !self.at_eof() && !self.at_class_start() {
            self.pos += 1;
        }
        let offset = self.peek().offset;
        while self.comment_cursor < self.comments.len()
            && self.comments[self.comment_cursor].offset < offset
        {
            self.comment_cursor += 1;
        }
    }

    // ---- trivia ----

    fn comment_text(t: &Token) -> String {
        t.lexeme.trim_start_matches('-').trim().to_string()
    }

    fn take_comments_before(&mut self, offset: usize) -> Vec<String> {
        let mut out = Vec::new();
        while self.comment_cursor < self.comments.len()
            && self.comments[self.comment_cursor].offset < offset
        {
            if !self.claimed_comments.contains(&self.comment_cursor) {
                out.push(Self::comment_text(&self.comments[self.comment_cursor]));
            }
            self.comment_cursor += 1;
        }
        out
    }

    /// Comment on the same line right after the token just consumed.
    fn trailing_comment(&mut self) -> Option<String> {
        let last = &self.tokens[self.pos.checked_sub(1)?];
        let i = self
            .comments
            .iter()
            .position(|c| c.offset >= last.end() && c.line == last.line)?;
        if self.at_eof() || self.peek().offset > self.comments[i].offset {
            self.claimed_comments.insert(i);
            Some(Self::comment_text(&self.comments[i]))
        } else {
            None
        }
    }

    // ---- declarations ----

    fn class(&mut self) -> PResult<ClassDecl> {
        let start = self.peek().clone();
        let comments = self.take_comments_before(start.offset);
        let deferred = self.eat_kw("deferred");
        self.expect_kw("class")?;
        let name = self.expect_ident("class name")?;
        let mut class = ClassDecl::new(name.lexeme);
        class.location = self.location(&start);
        class.comments = comments;
        class.declared_deferred = deferred;
        if self.eat_kw("inherit") {
            while self.at_ident() {
                class.parents.push(self.bump().lexeme);
                if !self.eat_sym(",") {
                    self.eat_sym(";");
                }
            }
            if class.parents.is_empty() {
                return self.fail(&["parent class name"], None);
            }
        }
        if self.at_note() {
            class.notes = self.notes()?;
        }
        self.expect_kw("feature")?;
        loop {
            if self.eat_kw("feature") {
                continue;
            }
            if self.at_kw("invariant") || self.at_kw("end") {
                break;
            }
            if self.at_ident() {
                let features = self.feature()?;
                class.features.extend(features);
            } else {
                return self.fail(&["feature declaration", "`invariant`", "`end`"], None);
            }
        }
        if self.eat_kw("invariant") {
            class.invariant = self.clauses()?;
        }
        let end = self.expect_kw("end")?;
        let trailing = self.take_comments_before(end.offset);
        class.comments.extend(trailing);
        Ok(class)
    }

    fn notes(&mut self) -> PResult<Vec<Note>> {
        let kw = self.bump();
        if kw.lexeme == "Note" {
            self.diags.push(ParseDiagnostic {
                severity: Severity::Info,
                code: Code::NoteCapitalized,
                location: self.location(&kw),
                expected: Vec::new(),
                found: Some("`Note`".into()),
                message: "`Note` is read as `note`".into(),
            });
        }
        let mut notes = Vec::new();
        while self.at_ident() && self.peek_at(1).is_symbol(":") {
            let key = self.bump().lexeme;
            let colon = self.bump();
            let from = self.pos;
            while !self.at_eof() && self.peek().line == colon.line {
                self.pos += 1;
            }
            notes.push(Note {
                key,
                text: self.text(from, self.pos),
            });
        }
        Ok(notes)
    }

    fn at_routine_start(&self) -> bool {
        ROUTINE_START.iter().any(|kw| self.at_kw(kw))
    }

    fn feature(&mut self) -> PResult<Vec<FeatureDecl>> {
        let first = self.bump();
        let comments = self.take_comments_before(first.offset);
        let mut names = vec![first.clone()];
        while self.eat_sym(",") {
            names.push(self.expect_ident("feature name")?);
        }
        if names.len() > 1 {
            self.expect_sym(":")?;
            let ty = self.expect_ident("type name")?.lexeme;
            let mut comments = Some(comments);
            return Ok(names
                .iter()
                .map(|n| FeatureDecl {
                    result_type: Some(ty.clone()),
                    implementation: Implementation::Attribute,
                    comments: comments.take().unwrap_or_default(),
                    location: self.location(n),
                    ..FeatureDecl::routine(n.lexeme.clone())
                })
                .collect());
        }

        let mut feature = FeatureDecl::routine(first.lexeme.clone());
        feature.location = self.location(&first);
        feature.comments = comments;
        let has_formals = self.at_sym("(");
        if has_formals {
            feature.formals = self.formals()?;
        }
        if self.eat_sym(":") {
            feature.result_type = Some(self.expect_ident("type name")?.lexeme);
        }
        if !self.at_routine_start() {
            if feature.result_type.is_some() && !has_formals {
                feature.implementation = Implementation::Attribute;
                return Ok(vec![feature]);
            }
            let mut expected = vec!["`require`", "`do`", "`deferred`"];
            if feature.result_type.is_none() {
                expected.insert(0, "`:`");
            }
            return self.fail(&expected, None);
        }
        if self.at_note() {
            feature.notes = self.notes()?;
        }
        if self.eat_kw("require") {
            feature.precondition = self.clauses()?;
        }
        if self.eat_kw("local") {
            feature.locals = self.declarations()?;
        }
        if self.eat_kw("deferred") {
            feature.implementation = Implementation::Deferred;
        } else if self.eat_kw("do") {
            feature.implementation = Implementation::Effective(Body::new(self.statements()?));
        } else {
            return self.fail(&["`do`", "`deferred`"], None);
        }
        if self.eat_kw("ensure") {
            feature.postcondition = self.clauses()?;
        }
        let end = self.expect_kw("end")?;
        let inner = self.take_comments_before(end.offset);
        feature.comments.extend(inner);
        Ok(vec![feature])
    }

    fn formals(&mut self) -> PResult<Vec<Declaration>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            let mut names = vec![self.expect_ident("argument name")?.lexeme];
            while self.eat_sym(",") {
                names.push(self.expect_ident("argument name")?.lexeme);
            }
            self.expect_sym(":")?;
            let ty = self.expect_ident("type name")?.lexeme;
            out.extend(names.into_iter().map(|n| Declaration::new(n, ty.clone())));
            if self.eat_sym(";") || self.eat_sym(",") {
                continue;
            }
            self.expect_sym(")")?;
            return Ok(out);
        }
    }

    fn declarations(&mut self) -> PResult<Vec<Declaration>> {
        let mut out = Vec::new();
        loop {
            while self.eat_sym(";") {}
            if !(self.at_ident()
                && (self.peek_at(1).is_symbol(",") || self.peek_at(1).is_symbol(":")))
            {
                return Ok(out);
            }
            let mut names = vec![self.bump().lexeme];
            while self.eat_sym(",") {
                names.push(self.expect_ident("local name")?.lexeme);
            }
            self.expect_sym(":")?;
            let ty = self.expect_ident("type name")?.lexeme;
            out.extend(names.into_iter().map(|n| Declaration::new(n, ty.clone())));
        }
    }

    fn at_expression_start(&self) -> bool {
        if self.at_eof() {
            return false;
        }
        let t = self.peek();
        match t.kind {
            TokenKind::Ident | TokenKind::Str | TokenKind::Integer | TokenKind::Real => true,
            TokenKind::Keyword => ["not", "true", "false", "across"].contains(&t.lexeme.as_str()),
            TokenKind::Symbol => ["(", "-", "+"].contains(&t.lexeme.as_str()),
            _ => false,
        }
    }

    fn clauses(&mut self) -> PResult<Vec<Clause>> {
        let mut out = Vec::new();
        loop {
            while self.eat_sym(";") {}
            if !self.at_expression_start() {
                return Ok(out);
            }
            let start = self.peek().clone();
            let label = if self.at_ident() && self.peek_at(1).is_symbol(":") {
                let l = self.bump().lexeme;
                self.bump();
                Some(l)
            } else {
                None
            };
            let formula = self.expr()?;
            out.push(Clause {
                label,
                formula,
                location: self.location(&start),
            });
        }
    }

    // ---- statements ----

    fn statements(&mut self) -> PResult<Vec<Statement>> {
        let mut out = Vec::new();
        loop {
            while self.eat_sym(";") {}
            let s = if self.at_kw("if") {
                self.conditional()?
            } else if self.at_kw("from") {
                self.loop_statement()?
            } else if self.at_kw("create") {
                self.creation()?
            } else if self.at_ident() {
                self.simple_statement()?
            } else {
                return Ok(out);
            };
            out.push(s);
        }
    }

    fn conditional(&mut self) -> PResult<Statement> {
        let start = self.bump();
        let condition = self.expr()?;
        self.expect_kw("then")?;
        let then_branch = Body::new(self.statements()?);
        let else_branch = if self.eat_kw("else") {
            Some(Body::new(self.statements()?))
        } else {
            None
        };
        self.expect_kw("end")?;
        Ok(Statement::Conditional {
            condition,
            then_branch,
            else_branch,
            location: self.location(&start),
        })
    }

    fn loop_statement(&mut self) -> PResult<Statement> {
        let start = self.bump();
        let init = Body::new(self.statements()?);
        self.expect_kw("until")?;
        let until = self.expr()?;
        self.expect_kw("loop")?;
        let body = Body::new(self.statements()?);
        self.expect_kw("end")?;
        Ok(Statement::Loop {
            init,
            until,
            body,
            location: self.location(&start),
        })
    }

    fn creation(&mut self) -> PResult<Statement> {
        let from = self.pos;
        let start = self.bump();
        self.path()?;
        if self.at_args() {
            self.args()?;
        }
        let text = self.text(from, self.pos);
        Ok(Statement::Opaque(OpaqueStatement {
            text,
            embedded_call: None,
            comment: self.trailing_comment(),
            location: self.location(&start),
        }))
    }

    fn simple_statement(&mut self) -> PResult<Statement> {
        let from = self.pos;
        let start = self.peek().clone();
        let path = self.path()?;
        if self.eat_sym(":=") {
            let rhs_start = self.peek().clone();
            let mark = self.diags.len();
            let rhs = self.expr()?;
            self.diags.truncate(mark);
            let embedded_call = match rhs {
                Formula::Atom(Atom::Query(p)) if p.len() >= 2 => {
                    let mut c = CallSite::new(p.parent(), p.last(), Vec::new());
                    c.location = self.location(&rhs_start);
                    Some(c)
                }
                Formula::Atom(Atom::Predicate {
                    receiver,
                    feature,
                    args,
                }) => {
                    let mut c = CallSite::new(receiver, feature, args);
                    c.location = self.location(&rhs_start);
                    Some(c)
                }
                _ => None,
            };
            let text = self.text(from, self.pos);
            return Ok(Statement::Opaque(OpaqueStatement {
                text,
                embedded_call,
                comment: self.trailing_comment(),
                location: self.location(&start),
            }));
        }
        let args = if self.at_args() {
            self.args()?
        } else {
            Vec::new()
        };
        let mut call = CallSite::new(path.parent(), path.last(), args);
        call.location = self.location(&start);
        Ok(Statement::Call(call))
    }

    // ---- expressions ----

    fn path(&mut self) -> PResult<Path> {
        let mut segments = vec![self.expect_ident("name")?.lexeme];
        while self.at_sym(".") && self.peek_at(1).kind == TokenKind::Ident {
            self.bump();
            segments.push(self.bump().lexeme);
        }
        Ok(Path::new(segments))
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            let from = self.pos;
            let mark = self.diags.len();
            let operand = self.operand()?;
            self.diags.truncate(mark);
            out.push(match operand {
                OperandKind::Path(p) => Term::Path(p),
                _ => Term::Raw(self.text(from, self.pos)),
            });
            if self.eat_sym(",") {
                continue;
            }
            self.expect_sym(")")?;
            return Ok(out);
        }
    }

    fn expr(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat_kw("implies") {
            let rhs = self.expr()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat_kw("or") {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat_kw("and") {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat_kw("not") {
            return Ok(Formula::not(self.unary()?));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let from = self.pos;
        let mark = self.diags.len();
        let lhs = self.operand()?;
        let relation = RELATIONS.iter().find(|r| self.at_sym(r)).copied();
        let Some(relation) = relation else {
            return Ok(match lhs {
                OperandKind::Path(p) => Formula::Atom(Atom::Query(p)),
                OperandKind::App {
                    receiver,
                    feature,
                    args,
                } => Formula::Atom(Atom::Predicate {
                    receiver,
                    feature,
                    args,
                }),
                OperandKind::Bool(true) => Formula::True,
                OperandKind::Bool(false) => Formula::False,
                OperandKind::Group(f) => f,
                OperandKind::Literal(_) | OperandKind::Complex => self.opaque(from, mark),
            });
        };
        self.bump();
        let rhs = self.operand()?;
        let term = |k: &OperandKind| match k {
            OperandKind::Path(p) => Some(Term::Path(p.clone())),
            OperandKind::Literal(l) => Some(Term::Raw(l.clone())),
            OperandKind::Bool(b) => Some(Term::Raw(b.to_string())),
            _ => None,
        };
        match (relation, term(&lhs), term(&rhs)) {
            ("=", Some(l), Some(r)) => Ok(Formula::Atom(Atom::Eq(l, r))),
            ("/=", Some(l), Some(r)) => Ok(Formula::Atom(Atom::Ne(l, r))),
            _ => Ok(self.opaque(from, mark)),
        }
    }

    /// Turns `tokens[from..pos]` into one opaque atom, replacing any
    /// diagnostics raised while parsing its pieces with a single warning.
    fn opaque(&mut self, from: usize, mark: usize) -> Formula {
        self.diags.truncate(mark);
        let mut parts = Vec::new();
        let mut i = from;
        while i < self.pos {
            let t = &self.tokens[i];
            if t.kind == TokenKind::Ident {
                let mut segments = vec![t.lexeme.clone()];
                while i + 2 < self.pos
                    && self.tokens[i + 1].is_symbol(".")
                    && self.tokens[i + 2].kind == TokenKind::Ident
                {
                    segments.push(self.tokens[i + 2].lexeme.clone());
                    i += 2;
                }
                parts.push(OpaquePart::Path(Path::new(segments)));
            } else {
                parts.push(OpaquePart::Sym(t.lexeme.clone()));
            }
            i += 1;
        }
        let start = &self.tokens[from];
        let atom = Atom::Opaque(parts);
        self.diags.push(ParseDiagnostic {
            severity: Severity::Warning,
            code: Code::OpaqueAtom,
            location: self.location(start),
            expected: Vec::new(),
            found: None,
            message: format!("`{atom}` is not propositional and is treated as an opaque atom"),
        });
        Formula::Atom(atom)
    }

    fn operand(&mut self) -> PResult<OperandKind> {
        let first = self.primary()?;
        if !ARITHMETIC.iter().any(|op| self.at_sym(op)) {
            return Ok(first);
        }
        while ARITHMETIC.iter().any(|op| self.at_sym(op)) {
            self.bump();
            self.primary()?;
        }
        Ok(OperandKind::Complex)
    }

    fn primary(&mut self) -> PResult<OperandKind> {
        let t = self.peek().clone();
        if self.at_eof() {
            return self.fail(&["expression"], None);
        }
        match t.kind {
            TokenKind::Integer | TokenKind::Real | TokenKind::Str => {
                self.bump();
                Ok(OperandKind::Literal(t.lexeme))
            }
            TokenKind::Keyword if t.lexeme == "true" || t.lexeme == "false" => {
                self.bump();
                Ok(OperandKind::Bool(t.lexeme == "true"))
            }
            TokenKind::Keyword if t.lexeme == "across" => {
                self.bump();
                self.path()?;
                self.expect_kw("as")?;
                self.expect_ident("cursor name")?;
                self.expect_kw("all")?;
                self.expr()?;
                self.expect_kw("end")?;
                Ok(OperandKind::Complex)
            }
            TokenKind::Symbol if t.lexeme == "(" => {
                self.bump();
                let f = self.expr()?;
                self.expect_sym(")")?;
                Ok(OperandKind::Group(f))
            }
            TokenKind::Symbol if t.lexeme == "-" || t.lexeme == "+" => {
                self.bump();
                self.primary()?;
                Ok(OperandKind::Complex)
            }
            TokenKind::Ident if t.lexeme == "old" => self.fail(
                &["expression"],
                Some("`old` expressions are not supported; state the postcondition without referring to the prior state".into()),
            ),
            TokenKind::Ident => {
                let path = self.path()?;
                if !self.at_args() {
                    return Ok(OperandKind::Path(path));
                }
                let args = self.args()?;
                if self.at_sym(".") {
                    while self.eat_sym(".") {
                        self.expect_ident("feature name")?;
                        if self.at_args() {
                            self.args()?;
                        }
                    }
                    return Ok(OperandKind::Complex);
                }
                Ok(OperandKind::App {
                    receiver: path.parent(),
                    feature: path.last().to_string(),
                    args,
                })
            }
            _ => self.fail(&["expression"], None),
        }
    }
}
