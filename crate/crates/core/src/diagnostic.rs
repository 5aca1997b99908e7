use std::fmt;

use serde::Serialize;

use crate::ast::Location;
use crate::logic::Witness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

/// Stable diagnostic codes. The serialized names are part of the report
/// format and never change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    ParseError,
    OpaqueAtom,
    NoteCapitalized,
    ResolutionError,
    PreUnproven,
    PostUnproven,
    StateInconsistent,
    UnknownContract,
    UnknownClass,
    ArityMismatch,
    OpaqueStatement,
    DeadBranch,
    ChainBreak,
    NotAPlainSequence,
    PreInfeasible,
    PostInfeasible,
    RedundantInvariant,
    ClassNameStyle,
    NothingToExtract,
    CapacityExceeded,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::ParseError => "PARSE_ERROR",
            Code::OpaqueAtom => "OPAQUE_ATOM",
            Code::NoteCapitalized => "NOTE_CAPITALIZED",
            Code::ResolutionError => "RESOLUTION_ERROR",
            Code::PreUnproven => "PRE_UNPROVEN",
            Code::PostUnproven => "POST_UNPROVEN",
            Code::StateInconsistent => "STATE_INCONSISTENT",
            Code::UnknownContract => "UNKNOWN_CONTRACT",
            Code::UnknownClass => "UNKNOWN_CLASS",
            Code::ArityMismatch => "ARITY_MISMATCH",
            Code::OpaqueStatement => "OPAQUE_STATEMENT",
            Code::DeadBranch => "DEAD_BRANCH",
            Code::ChainBreak => "CHAIN_BREAK",
            Code::NotAPlainSequence => "NOT_A_PLAIN_SEQUENCE",
            Code::PreInfeasible => "PRE_INFEASIBLE",
            Code::PostInfeasible => "POST_INFEASIBLE",
            Code::RedundantInvariant => "REDUNDANT_INVARIANT",
            Code::ClassNameStyle => "CLASS_NAME_STYLE",
            Code::NothingToExtract => "NOTHING_TO_EXTRACT",
            Code::CapacityExceeded => "CAPACITY_EXCEEDED",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub location: Location,
    pub message: String,
    pub witness: Option<Witness>,
}

impl Diagnostic {
    pub fn new(
        severity: Severity,
        code: Code,
        location: Location,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            severity,
            code,
            location,
            message: message.into(),
            witness: None,
        }
    }

    pub fn error(code: Code, location: Location, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, location, message)
    }

    pub fn warning(code: Code, location: Location, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, location, message)
    }

    pub fn info(code: Code, location: Location, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, code, location, message)
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}]: {}",
            self.location, self.severity, self.code, self.message
        )
    }
}

/// Report order: file, line, column, code. Exact duplicates are dropped.
pub fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| (&a.location, a.code, &a.message).cmp(&(&b.location, b.code, &b.message)));
    diags.dedup_by(|a, b| a.location == b.location && a.code == b.code && a.message == b.message);
}
