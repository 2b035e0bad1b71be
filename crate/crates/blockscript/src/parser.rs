//! Recursive-descent parser.
//!
//! ```text
//! program := stmt*
//! stmt    := "create" "wisard"
//!          | "say" (STRING | "result" | IDENT)
//!          | "ask" "->" IDENT
//!          | "take" "picture" "from" ("camera" | "file" STRING)
//!          | "learn" STRING "from" ("picture" | "folder" STRING)
//!          | "recognize"
//!          | "show" "mental" "image" "of" STRING
//!          | "repeat" "forever" block
//!          | "if" cond block ("else" block)?
//! cond    := IDENT "==" STRING | "result" "==" STRING | "result" "is" "unknown"
//! block   := "{" stmt* "}"
//! ```

use crate::ast::*;
use crate::lexer::{tokenize, Spanned, Token};
use crate::SyntaxError;

const STATEMENT_STARTS: &[&str] = &[
    "`create`", "`say`", "`ask`", "`take`", "`learn`", "`recognize`", "`show`", "`repeat`", "`if`",
];

const RESERVED: &[&str] = &[
    "create", "wisard", "say", "ask", "take", "picture", "from", "camera", "file", "learn",
    "folder", "recognize", "show", "mental", "image", "of", "repeat", "forever", "if", "else",
    "result", "is", "unknown",
];

pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let program = p.statements(false)?;
    Ok(program)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if t.token != Token::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, found: &Spanned, expected: &[&str]) -> SyntaxError {
        let msg = if expected.is_empty() {
            format!("unexpected {}", found.token.describe())
        } else {
            format!("expected {}, found {}", expected.join(" or "), found.token.describe())
        };
        SyntaxError::new(found.at, &msg, expected)
    }

    fn keyword(&mut self, word: &str) -> Result<(), SyntaxError> {
        let t = self.next();
        match &t.token {
            Token::Word(w) if w == word => Ok(()),
            _ => Err(self.unexpected(&t, &[&format!("`{word}`")])),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, SyntaxError> {
        let t = self.next();
        match t.token {
            Token::Str(s) => Ok(s),
            _ => Err(self.unexpected(&t, &[what])),
        }
    }

    fn label(&mut self) -> Result<String, SyntaxError> {
        let at = self.peek().at;
        let s = self.string("a label string")?;
        if s.is_empty() {
            return Err(SyntaxError::new(at, "label must not be empty", &["a non-empty label"]));
        }
        Ok(s)
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        let t = self.next();
        match &t.token {
            Token::Word(w) if !RESERVED.contains(&w.as_str()) => Ok(w.clone()),
            Token::Word(w) => Err(SyntaxError::new(
                t.at,
                &format!("`{w}` is a reserved word and cannot name a variable"),
                &["a variable name"],
            )),
            _ => Err(self.unexpected(&t, &["a variable name"])),
        }
    }

    fn statements(&mut self, in_block: bool) -> Result<Program, SyntaxError> {
        let mut statements = Vec::new();
        loop {
            let t = self.peek().clone();
            match t.token {
                Token::Eof if in_block => {
                    return Err(SyntaxError::new(t.at, "unterminated block", &["`}`"]))
                }
                Token::Eof => break,
                Token::RBrace if in_block => break,
                _ => statements.push(self.statement()?),
            }
        }
        Ok(Program { statements })
    }

    fn block(&mut self) -> Result<Program, SyntaxError> {
        let open = self.next();
        if open.token != Token::LBrace {
            return Err(self.unexpected(&open, &["`{`"]));
        }
        let body = self.statements(true)?;
        self.next(); // the closing brace
        Ok(body)
    }

    fn statement(&mut self) -> Result<Statement, SyntaxError> {
        let t = self.next();
        let location = t.at;
        let Token::Word(word) = &t.token else {
            return Err(self.unexpected(&t, STATEMENT_STARTS));
        };
        let kind = match word.as_str() {
            "create" => {
                self.keyword("wisard")?;
                StatementKind::CreateWisard
            }
            "say" => {
                let t = self.next();
                match t.token {
                    Token::Str(s) => StatementKind::Say(SayText::Literal(s)),
                    Token::Word(w) if w == "result" => StatementKind::Say(SayText::Result),
                    Token::Word(w) if !RESERVED.contains(&w.as_str()) => {
                        StatementKind::Say(SayText::Var(w))
                    }
                    _ => return Err(self.unexpected(&t, &["a string", "`result`", "a variable name"])),
                }
            }
            "ask" => {
                let t = self.next();
                if t.token != Token::Arrow {
                    return Err(self.unexpected(&t, &["`->`"]));
                }
                StatementKind::Ask(self.ident()?)
            }
            "take" => {
                self.keyword("picture")?;
                self.keyword("from")?;
                let t = self.next();
                match &t.token {
                    Token::Word(w) if w == "camera" => StatementKind::AcquireImage(ImageSource::Camera),
                    Token::Word(w) if w == "file" => {
                        StatementKind::AcquireImage(ImageSource::File(self.string("a file path string")?))
                    }
                    _ => return Err(self.unexpected(&t, &["`camera`", "`file`"])),
                }
            }
            "learn" => {
                let label = self.label()?;
                self.keyword("from")?;
                let t = self.next();
                let from = match &t.token {
                    Token::Word(w) if w == "picture" => LearnSource::CurrentImage,
                    Token::Word(w) if w == "folder" => {
                        LearnSource::Folder(self.string("a folder path string")?)
                    }
                    _ => return Err(self.unexpected(&t, &["`picture`", "`folder`"])),
                };
                StatementKind::Learn { label, from }
            }
            "recognize" => StatementKind::Recognize,
            "show" => {
                self.keyword("mental")?;
                self.keyword("image")?;
                self.keyword("of")?;
                StatementKind::ShowMentalImage(self.label()?)
            }
            "repeat" => {
                self.keyword("forever")?;
                StatementKind::RepeatForever(self.block()?)
            }
            "if" => {
                let cond = self.condition()?;
                let then = self.block()?;
                let otherwise = match &self.peek().token {
                    Token::Word(w) if w == "else" => {
                        self.next();
                        Some(self.block()?)
                    }
                    _ => None,
                };
                StatementKind::If {
                    cond,
                    then,
                    otherwise,
                }
            }
            other => {
                return Err(SyntaxError::new(
                    location,
                    &format!("unknown keyword `{other}`"),
                    STATEMENT_STARTS,
                ))
            }
        };
        Ok(Statement { kind, location })
    }

    fn condition(&mut self) -> Result<Condition, SyntaxError> {
        let t = self.peek().clone();
        match &t.token {
            Token::Word(w) if w == "result" => {
                self.next();
                let op = self.next();
                match &op.token {
                    Token::EqEq => Ok(Condition::ResultEquals(self.label()?)),
                    Token::Word(w) if w == "is" => {
                        self.keyword("unknown")?;
                        Ok(Condition::ResultUnknown)
                    }
                    _ => Err(self.unexpected(&op, &["`==`", "`is`"])),
                }
            }
            Token::Word(_) => {
                let var = self.ident()?;
                let op = self.next();
                if op.token != Token::EqEq {
                    return Err(self.unexpected(&op, &["`==`"]));
                }
                Ok(Condition::VarEquals(var, self.string("a string")?))
            }
            _ => Err(self.unexpected(&t, &["a variable name", "`result`"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<StatementKind> {
        parse(src).unwrap().statements.into_iter().map(|s| s.kind).collect()
    }

    #[test]
    fn create_wisard() {
        assert_eq!(kinds("create wisard"), vec![StatementKind::CreateWisard]);
    }

    #[test]
    fn every_statement_form() {
        let src = r#"
            create wisard
            say "hi"
            say result
            ask -> key
            say key
            take picture from camera
            take picture from file "a.pgm"
            learn "X" from picture
            learn "Y" from folder "imgs"
            recognize
            show mental image of "X"
            if result is unknown { say "?" }
            if result == "X" { say "x" } else { say "not x" }
            if key == "T" {}
            repeat forever { recognize }
        "#;
        let k = kinds(src);
        assert_eq!(k.len(), 15);
        assert_eq!(k[2], StatementKind::Say(SayText::Result));
        assert_eq!(k[4], StatementKind::Say(SayText::Var("key".into())));
        assert_eq!(k[6], StatementKind::AcquireImage(ImageSource::File("a.pgm".into())));
        assert_eq!(
            k[8],
            StatementKind::Learn {
                label: "Y".into(),
                from: LearnSource::Folder("imgs".into())
            }
        );
        assert!(matches!(&k[11], StatementKind::If { cond: Condition::ResultUnknown, otherwise: None, .. }));
        assert!(matches!(&k[12], StatementKind::If { otherwise: Some(_), .. }));
        assert!(matches!(&k[14], StatementKind::RepeatForever(b) if b.statements.len() == 1));
    }

    #[test]
    fn locations_are_recorded() {
        let p = parse("create wisard\n  repeat forever {\n    recognize\n  }").unwrap();
        assert_eq!(p.statements[1].location, Location { line: 2, column: 3 });
        let StatementKind::RepeatForever(body) = &p.statements[1].kind else { panic!() };
        assert_eq!(body.statements[0].location, Location { line: 3, column: 5 });
    }

    #[test]
    fn unclosed_quote() {
        let err = parse("create wisard\nlearn \"X from picture").unwrap_err();
        assert_eq!((err.line, err.column), (2, 7));
    }

    #[test]
    fn unknown_keyword() {
        let err = parse("create wisard\nfly away").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        assert!(err.message.contains("unknown keyword `fly`"));
        assert!(err.expected.contains(&"`learn`".to_string()));
    }

    #[test]
    fn unterminated_block() {
        let err = parse("repeat forever {\n say \"a\"\n").unwrap_err();
        assert_eq!(err.message, "unterminated block");
        assert_eq!(err.expected, vec!["`}`".to_string()]);
    }

    #[test]
    fn misc_errors() {
        assert!(parse("learn \"\" from picture").unwrap_err().message.contains("empty"));
        assert!(parse("ask -> result").unwrap_err().message.contains("reserved"));
        assert!(parse("take picture from moon").is_err());
        assert!(parse("if result = \"x\" {}").is_err());
        assert!(parse("}").is_err());
        assert!(parse("create").unwrap_err().message.contains("end of input"));
    }

    #[test]
    fn empty_and_comment_only() {
        assert!(parse("").unwrap().is_empty());
        assert!(parse("# nothing here\n\n").unwrap().is_empty());
    }
}
