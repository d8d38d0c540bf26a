use thiserror::Error;

use crate::model::{Diagnostic, SourceSpan};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("{span}: undeclared {kind} `{name}`")]
    Undeclared { span: SourceSpan, kind: &'static str, name: String },

    #[error("{span}: `{name}` is already declared")]
    DuplicateDeclaration { span: SourceSpan, name: String },

    #[error("invalid knowledge base: {}", join(.0))]
    InvalidKb(Vec<Diagnostic>),

    #[error("query mentions unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("weight overflow while summing the inclusions of `{concept}`")]
    WeightOverflow { concept: String },

    #[error("fresh-name counter exhausted")]
    FreshNamesExhausted,

    #[error("candidate budget of {budget} types exceeded")]
    BudgetExceeded { budget: usize },

    #[error("oracle limited to {cap} choice concepts, input needs {needed}")]
    OracleCapExceeded { cap: usize, needed: usize },

    #[error("global preference has a cycle through {len} weight vectors")]
    PreferenceCycle { len: usize },
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
