//! Lexer, recursive-descent parser and printer for the requirements language.

mod grammar;
pub mod lexer;
mod printer;

use std::fmt;

use crate::ast::Location;
use crate::diagnostic::{Code, Diagnostic, Severity};

pub use grammar::{parse_expression, parse_source, parse_tokens, ParsedExpression, SourceFile};
pub use printer::{print_class, print_classes, print_feature, print_statements};

/// Parse-time finding. Errors carry what the parser expected and what it saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: Code,
    pub location: Location,
    pub expected: Vec<String>,
    pub found: Option<String>,
    pub message: String,
}

impl ParseDiagnostic {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new(
            self.severity,
            self.code,
            self.location.clone(),
            self.message.clone(),
        )
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}]: {}",
            self.location, self.severity, self.code, self.message
        )
    }
}
