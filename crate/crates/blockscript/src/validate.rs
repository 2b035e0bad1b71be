//! Positional checks: a block that needs the model or a picture must come
//! after the block that provides it, in source order.
//!
//! The check ignores control flow, so a branch that never runs can still be
//! flagged.

use std::collections::HashSet;
use std::fmt;

use crate::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticCode {
    LearnBeforeCreate,
    RecognizeBeforeCreate,
    ShowBeforeCreate,
    LearnBeforePicture,
    RecognizeBeforePicture,
    DuplicateCreate,
    UnboundVariable,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::LearnBeforeCreate => "LEARN_BEFORE_CREATE",
            DiagnosticCode::RecognizeBeforeCreate => "RECOGNIZE_BEFORE_CREATE",
            DiagnosticCode::ShowBeforeCreate => "SHOW_BEFORE_CREATE",
            DiagnosticCode::LearnBeforePicture => "LEARN_BEFORE_PICTURE",
            DiagnosticCode::RecognizeBeforePicture => "RECOGNIZE_BEFORE_PICTURE",
            DiagnosticCode::DuplicateCreate => "DUPLICATE_CREATE",
            DiagnosticCode::UnboundVariable => "UNBOUND_VARIABLE",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationDiagnostic {
    pub severity: Severity,
    pub location: Location,
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for ValidationDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}[{}]: {}", self.location, self.code, self.message)
    }
}

pub fn has_errors(diags: &[ValidationDiagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

fn error(code: DiagnosticCode, location: Location, message: String) -> ValidationDiagnostic {
    ValidationDiagnostic {
        severity: Severity::Error,
        location,
        code,
        message,
    }
}

fn needs_create(block: &str) -> String {
    format!("To use the \"{block}\" block you must FIRST use \"create wisard\"")
}

fn needs_picture(block: &str) -> String {
    format!("To use the \"{block}\" block you must FIRST use \"take picture\"")
}

pub fn validate(program: &Program) -> Vec<ValidationDiagnostic> {
    let mut bound = HashSet::new();
    program.walk(&mut |s| {
        if let StatementKind::Ask(var) = &s.kind {
            bound.insert(var.as_str());
        }
    });

    let mut diags = Vec::new();
    let mut created = false;
    let mut pictured = false;
    let unbound = |var: &str, at: Location| ValidationDiagnostic {
        severity: Severity::Warning,
        location: at,
        code: DiagnosticCode::UnboundVariable,
        message: format!("variable `{var}` is never set by an \"ask\" block"),
    };

    program.walk(&mut |s| {
        let at = s.location;
        match &s.kind {
            StatementKind::CreateWisard => {
                if created {
                    diags.push(error(
                        DiagnosticCode::DuplicateCreate,
                        at,
                        "only one \"create wisard\" block is allowed per program".into(),
                    ));
                }
                created = true;
            }
            StatementKind::AcquireImage(_) => pictured = true,
            StatementKind::Learn { from, .. } => {
                if !created {
                    diags.push(error(DiagnosticCode::LearnBeforeCreate, at, needs_create("learn")));
                }
                if *from == LearnSource::CurrentImage && !pictured {
                    diags.push(error(
                        DiagnosticCode::LearnBeforePicture,
                        at,
                        needs_picture("learn from picture"),
                    ));
                }
            }
            StatementKind::Recognize => {
                if !created {
                    diags.push(error(
                        DiagnosticCode::RecognizeBeforeCreate,
                        at,
                        needs_create("recognize"),
                    ));
                }
                if !pictured {
                    diags.push(error(
                        DiagnosticCode::RecognizeBeforePicture,
                        at,
                        needs_picture("recognize"),
                    ));
                }
            }
            StatementKind::ShowMentalImage(_) => {
                if !created {
                    diags.push(error(
                        DiagnosticCode::ShowBeforeCreate,
                        at,
                        needs_create("show mental image"),
                    ));
                }
            }
            StatementKind::If {
                cond: Condition::VarEquals(var, _),
                ..
            }
            | StatementKind::Say(SayText::Var(var))
                if !bound.contains(var.as_str()) => {
                    diags.push(unbound(var, at));
                }
            _ => {}
        }
    });
    diags
}
