use std::fmt;

/// 1-based line and column of a statement's first token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub kind: StatementKind,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    CreateWisard,
    Say(SayText),
    Ask(String),
    AcquireImage(ImageSource),
    Learn { label: String, from: LearnSource },
    Recognize,
    RepeatForever(Program),
    If {
        cond: Condition,
        then: Program,
        otherwise: Option<Program>,
    },
    ShowMentalImage(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SayText {
    Literal(String),
    /// The last recognition result, or `unknown`.
    Result,
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ImageSource {
    Camera,
    File(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LearnSource {
    CurrentImage,
    Folder(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    VarEquals(String, String),
    ResultEquals(String),
    ResultUnknown,
}

impl Program {
    /// Pre-order walk over every statement, nested bodies included, in the
    /// order they appear in the source.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Statement)) {
        for stmt in &self.statements {
            visit(stmt);
            match &stmt.kind {
                StatementKind::RepeatForever(body) => body.walk(visit),
                StatementKind::If {
                    then, otherwise, ..
                } => {
                    then.walk(visit);
                    if let Some(other) = otherwise {
                        other.walk(visit);
                    }
                }
                _ => {}
            }
        }
    }

    pub fn uses_camera(&self) -> bool {
        let mut found = false;
        self.walk(&mut |s| {
            found |= matches!(s.kind, StatementKind::AcquireImage(ImageSource::Camera));
        });
        found
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}
