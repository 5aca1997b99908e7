//! Parsing, checking and story/test generation for object-oriented
//! requirements written in RSL, an Eiffel-like contract notation.

pub mod ast;
pub mod checker;
pub mod diagnostic;
pub mod formula;
pub mod logic;
pub mod model;
pub mod parser;
pub mod stories;
pub mod testgen;

pub use ast::{
    Body, CallSite, ClassDecl, Clause, Declaration, FeatureDecl, FeatureKind, Implementation,
    Location, Note, OpaqueStatement, Statement,
};
pub use checker::{CheckConfig, CheckError, Checker, Origin, SymbolicState};
pub use diagnostic::{sort_diagnostics, Code, Diagnostic, Severity};
pub use formula::{Atom, Formula, OpaquePart, Path, Substitution, Term};
pub use logic::{
    entails, implications_of, satisfiable, top_level_dnf, truth_table_oracle, Entailment,
    LogicError, Solver, Witness,
};
pub use model::{
    build_model, instantiate_contract, invariant_context, Contract, InvariantContext, Model,
    PathClass, ResolutionError, ResolutionErrors,
};
pub use parser::{
    parse_expression, parse_source, print_class, print_classes, ParseDiagnostic, SourceFile,
};
pub use stories::{driver_story, emit_story_class, extract_stories, Story, StoryError, StoryRule};
pub use testgen::{generate_test_skeletons, GeneratedFile, TestSkeleton, TestgenError};
