use crate::ast::Location;
use crate::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Word(String),
    Str(String),
    Arrow,
    EqEq,
    LBrace,
    RBrace,
    Eof,
}

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Word(w) => format!("`{w}`"),
            Token::Str(s) => format!("string {s:?}"),
            Token::Arrow => "`->`".into(),
            Token::EqEq => "`==`".into(),
            Token::LBrace => "`{`".into(),
            Token::RBrace => "`}`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub at: Location,
}

pub(crate) fn tokenize(source: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let at = Location { line, column };
        match c {
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
            }
            c if c.is_whitespace() => {
                bump!();
            }
            '{' => {
                bump!();
                out.push(Spanned { token: Token::LBrace, at });
            }
            '}' => {
                bump!();
                out.push(Spanned { token: Token::RBrace, at });
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    out.push(Spanned { token: Token::Arrow, at });
                } else {
                    return Err(SyntaxError::new(at, "expected `->`", &["`->`"]));
                }
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push(Spanned { token: Token::EqEq, at });
                } else {
                    return Err(SyntaxError::new(at, "expected `==`", &["`==`"]));
                }
            }
            '"' => {
                bump!();
                let mut text = String::new();
                loop {
                    let esc_at = Location { line, column };
                    match bump!() {
                        None | Some('\n') => {
                            return Err(SyntaxError::new(
                                at,
                                "unterminated string literal",
                                &["`\"`"],
                            ))
                        }
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => text.push('"'),
                            Some('\\') => text.push('\\'),
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            other => {
                                let shown = other.map(|c| c.to_string()).unwrap_or_default();
                                return Err(SyntaxError::new(
                                    esc_at,
                                    &format!("invalid escape `\\{shown}` in string literal"),
                                    &["`\\\"`", "`\\\\`", "`\\n`", "`\\t`"],
                                ));
                            }
                        },
                        Some(c) => text.push(c),
                    }
                }
                out.push(Spanned { token: Token::Str(text), at });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut word = String::new();
                while chars.peek().is_some_and(|&c| c.is_alphanumeric() || c == '_') {
                    word.push(bump!().unwrap());
                }
                out.push(Spanned { token: Token::Word(word), at });
            }
            other => {
                return Err(SyntaxError::new(
                    at,
                    &format!("unexpected character {other:?}"),
                    &[],
                ))
            }
        }
    }
    out.push(Spanned {
        token: Token::Eof,
        at: Location { line, column },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Token> {
        tokenize(src).unwrap().into_iter().map(|s| s.token).collect()
    }

    #[test]
    fn tokens_and_comments() {
        assert_eq!(
            kinds("ask -> key # trailing\nif key == \"T\" {}"),
            vec![
                Token::Word("ask".into()),
                Token::Arrow,
                Token::Word("key".into()),
                Token::Word("if".into()),
                Token::Word("key".into()),
                Token::EqEq,
                Token::Str("T".into()),
                Token::LBrace,
                Token::RBrace,
                Token::Eof,
            ]
        );
    }

    #[test]
    fn positions() {
        let toks = tokenize("say \"a\"\n  recognize").unwrap();
        assert_eq!(toks[1].at, Location { line: 1, column: 5 });
        assert_eq!(toks[2].at, Location { line: 2, column: 3 });
    }

    #[test]
    fn escapes() {
        assert_eq!(kinds(r#""a\"b\\c""#)[0], Token::Str("a\"b\\c".into()));
        let err = tokenize(r#"say "bad \q""#).unwrap_err();
        assert_eq!((err.line, err.column), (1, 10));
    }

    #[test]
    fn unterminated_string_points_at_opening_quote() {
        let err = tokenize("learn \"X from picture").unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
        assert!(err.message.contains("unterminated"));
    }
}
