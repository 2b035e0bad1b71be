//! BlockScript: a small teaching language in which creating a WiSARD,
//! teaching it and asking it to recognize a picture are ordinary statements.
//!
//! ```
//! use blockscript::{parse, transcript, IoScript, ModelConfig, RunLimits};
//!
//! let program = parse("create wisard\nsay \"ready\"").unwrap();
//! let text = transcript(&program, ModelConfig::default(), IoScript::default(), RunLimits::default()).unwrap();
//! assert_eq!(text, "ready\n");
//! ```

pub mod ast;
mod interp;
mod lexer;
mod parser;
mod transcript;
mod validate;

use std::fmt;

pub use ast::{Condition, ImageSource, LearnSource, Location, Program, SayText, Statement, StatementKind};
pub use interp::{
    run, AcquireError, Event, ExecutionSummary, IoPort, ModelConfig, RunError, RunLimits,
    RuntimeDiagnostic, StopReason,
};
pub use parser::parse;
pub use transcript::{run_scripted, transcript, Frame, IoScript, ScriptedPort};
pub use validate::{has_errors, validate, DiagnosticCode, Severity, ValidationDiagnostic};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub(crate) fn new(at: Location, message: &str, expected: &[&str]) -> Self {
        Self {
            line: at.line,
            column: at.column,
            message: message.to_owned(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}
