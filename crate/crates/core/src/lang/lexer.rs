//! Hand-rolled lexer for the mini-language. `#` starts a line comment.

use thiserror::Error;

use super::token::{Pos, Token, TokenKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexError {
    #[error("{pos}: unexpected character `{ch}`")]
    UnexpectedChar { ch: char, pos: Pos },
    #[error("{pos}: integer literal out of range")]
    IntOutOfRange { pos: Pos },
    #[error("{pos}: expected `=` after `:`")]
    LoneColon { pos: Pos },
}

/// A source unit: full program text plus where it came from.
#[derive(Debug, Clone)]
pub struct SourceUnit {
    pub text: String,
    pub origin: String,
}

impl SourceUnit {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceUnit {
            text: text.into(),
            origin: origin.into(),
        }
    }

    pub fn inline(text: impl Into<String>) -> Self {
        SourceUnit::new(text, "<inline>")
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

fn keyword(ident: &str) -> Option<TokenKind> {
    match ident {
        "input" => Some(TokenKind::Input),
        "in" => Some(TokenKind::In),
        "if" => Some(TokenKind::If),
        "else" => Some(TokenKind::Else),
        "while" => Some(TokenKind::While),
        "record" => Some(TokenKind::Record),
        "and" => Some(TokenKind::And),
        "or" => Some(TokenKind::Or),
        "not" => Some(TokenKind::Not),
        _ => None,
    }
}

/// Turn a source unit into a token sequence. Whitespace and comments are
/// discarded; every token carries its position.
pub fn tokenize(source: &SourceUnit) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(&source.text);
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let pos = cur.pos();
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                cur.bump();
            }
            '#' => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            '0'..='9' => {
                let mut lexeme = String::new();
                while let Some(c) = cur.peek() {
                    if c.is_ascii_digit() {
                        lexeme.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                lexeme
                    .parse::<i64>()
                    .map_err(|_| LexError::IntOutOfRange { pos })?;
                tokens.push(Token {
                    kind: TokenKind::Int,
                    lexeme,
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut lexeme = String::new();
                while let Some(c) = cur.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        lexeme.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                let kind = keyword(&lexeme).unwrap_or(TokenKind::Ident);
                tokens.push(Token { kind, lexeme, pos });
            }
            _ => {
                cur.bump();
                let two = |cur: &mut Cursor, second: char| -> bool {
                    if cur.peek() == Some(second) {
                        cur.bump();
                        true
                    } else {
                        false
                    }
                };
                let (kind, lexeme) = match c {
                    ':' => {
                        if two(&mut cur, '=') {
                            (TokenKind::Assign, ":=")
                        } else {
                            return Err(LexError::LoneColon { pos });
                        }
                    }
                    '<' => {
                        if two(&mut cur, '=') {
                            (TokenKind::Le, "<=")
                        } else {
                            (TokenKind::Lt, "<")
                        }
                    }
                    '>' => {
                        if two(&mut cur, '=') {
                            (TokenKind::Ge, ">=")
                        } else {
                            (TokenKind::Gt, ">")
                        }
                    }
                    '!' => {
                        if two(&mut cur, '=') {
                            (TokenKind::Ne, "!=")
                        } else {
                            return Err(LexError::UnexpectedChar { ch: '!', pos });
                        }
                    }
                    '=' => (TokenKind::Eq, "="),
                    '+' => (TokenKind::Plus, "+"),
                    '-' => (TokenKind::Minus, "-"),
                    '*' => (TokenKind::Star, "*"),
                    '/' => (TokenKind::Slash, "/"),
                    '(' => (TokenKind::LParen, "("),
                    ')' => (TokenKind::RParen, ")"),
                    '{' => (TokenKind::LBrace, "{"),
                    '}' => (TokenKind::RBrace, "}"),
                    '[' => (TokenKind::LBracket, "["),
                    ']' => (TokenKind::RBracket, "]"),
                    ';' => (TokenKind::Semi, ";"),
                    ',' => (TokenKind::Comma, ","),
                    _ => return Err(LexError::UnexpectedChar { ch: c, pos }),
                };
                tokens.push(Token {
                    kind,
                    lexeme: lexeme.to_string(),
                    pos,
                });
            }
        }
    }

    Ok(tokens)
}
