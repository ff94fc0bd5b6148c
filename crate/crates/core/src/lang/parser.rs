//! Recursive descent parser for the mini-language.
//!
//! ```text
//! program    := { input_decl } { stmt }
//! input_decl := "input" IDENT "in" "[" int_lit "," int_lit "]" ";"
//! stmt       := IDENT ":=" expr ";"
//!             | "if" pred "{" { stmt } "}" [ "else" "{" { stmt } "}" ]
//!             | "while" pred "{" { stmt } "}"
//!             | "record" IDENT expr ";"
//! pred       := expr relop expr
//! relop      := "<" | "<=" | ">" | ">=" | "=" | "!="
//! expr       := term { ("+" | "-") term }
//! term       := factor { ("*" | "/") factor }
//! factor     := INT | IDENT | "-" factor | "(" expr ")"
//! int_lit    := [ "-" ] INT
//! ```

use thiserror::Error;

use super::ast::{BinOp, Expr, InputDecl, Predicate, Program, RelOp, Stmt};
use super::token::{Pos, Token, TokenKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: expected {expected}, found {found}")]
    UnexpectedToken {
        expected: String,
        found: String,
        pos: Pos,
    },
    #[error("unexpected end of input: expected {expected}")]
    UnexpectedEof { expected: String },
    #[error("{pos}: boolean connectives (`and`, `or`, `not`) are not allowed in predicates")]
    BooleanConnective { pos: Pos },
    #[error("empty input: a program needs at least one declaration or statement")]
    EmptyProgram,
    #[error("{pos}: integer literal out of range")]
    IntOutOfRange { pos: Pos },
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.peek_kind() == Some(kind)
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.at(kind) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.bump().unwrap()),
            Some(t) => Err(ParseError::UnexpectedToken {
                expected: kind.to_string(),
                found: format!("`{}`", t.lexeme),
                pos: t.pos,
            }),
            None => Err(ParseError::UnexpectedEof {
                expected: kind.to_string(),
            }),
        }
    }

    fn int_lit(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(TokenKind::Minus);
        let tok = self.expect(TokenKind::Int)?;
        let v: i64 = tok
            .lexeme
            .parse()
            .map_err(|_| ParseError::IntOutOfRange { pos: tok.pos })?;
        Ok(if neg { -v } else { v })
    }

    fn input_decl(&mut self) -> Result<InputDecl, ParseError> {
        let kw = self.expect(TokenKind::Input)?;
        let name = self.expect(TokenKind::Ident)?;
        self.expect(TokenKind::In)?;
        self.expect(TokenKind::LBracket)?;
        let lo = self.int_lit()?;
        self.expect(TokenKind::Comma)?;
        let hi = self.int_lit()?;
        self.expect(TokenKind::RBracket)?;
        self.expect(TokenKind::Semi)?;
        Ok(InputDecl {
            name: name.lexeme,
            lo,
            hi,
            pos: kw.pos,
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek_kind() {
            Some(TokenKind::Int) => {
                let tok = self.bump().unwrap();
                let v: i64 = tok
                    .lexeme
                    .parse()
                    .map_err(|_| ParseError::IntOutOfRange { pos: tok.pos })?;
                Ok(Expr::Int(v))
            }
            Some(TokenKind::Ident) => {
                let tok = self.bump().unwrap();
                Ok(Expr::Var {
                    name: tok.lexeme,
                    pos: tok.pos,
                })
            }
            Some(TokenKind::Minus) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            Some(TokenKind::Not) => {
                let tok = self.bump().unwrap();
                Err(ParseError::BooleanConnective { pos: tok.pos })
            }
            Some(_) => {
                let t = self.peek().unwrap();
                Err(ParseError::UnexpectedToken {
                    expected: "expression".to_string(),
                    found: format!("`{}`", t.lexeme),
                    pos: t.pos,
                })
            }
            None => Err(ParseError::UnexpectedEof {
                expected: "expression".to_string(),
            }),
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn predicate(&mut self) -> Result<Predicate, ParseError> {
        let lhs = self.expr()?;
        let (op, pos) = match self.peek() {
            Some(t) => {
                let op = match t.kind {
                    TokenKind::Lt => RelOp::Lt,
                    TokenKind::Le => RelOp::Le,
                    TokenKind::Gt => RelOp::Gt,
                    TokenKind::Ge => RelOp::Ge,
                    TokenKind::Eq => RelOp::Eq,
                    TokenKind::Ne => RelOp::Ne,
                    _ => {
                        return Err(ParseError::UnexpectedToken {
                            expected: "relational operator".to_string(),
                            found: format!("`{}`", t.lexeme),
                            pos: t.pos,
                        })
                    }
                };
                (op, t.pos)
            }
            None => {
                return Err(ParseError::UnexpectedEof {
                    expected: "relational operator".to_string(),
                })
            }
        };
        self.bump();
        let rhs = self.expr()?;
        // `a > b and c > d` would otherwise read as a stray identifier; give
        // the precise diagnosis instead.
        if let Some(t) = self.peek() {
            if matches!(t.kind, TokenKind::And | TokenKind::Or) {
                return Err(ParseError::BooleanConnective { pos: t.pos });
            }
        }
        Ok(Predicate { lhs, op, rhs, pos })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(TokenKind::RBrace) {
            if self.peek().is_none() {
                return Err(ParseError::UnexpectedEof {
                    expected: "`}`".to_string(),
                });
            }
            stmts.push(self.stmt()?);
        }
        self.expect(TokenKind::RBrace)?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek_kind() {
            Some(TokenKind::Ident) => {
                let name = self.bump().unwrap();
                self.expect(TokenKind::Assign)?;
                let expr = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt::Assign {
                    target: name.lexeme,
                    expr,
                    pos: name.pos,
                })
            }
            Some(TokenKind::If) => {
                let kw = self.bump().unwrap();
                let pred = self.predicate()?;
                let then_block = self.block()?;
                let else_block = if self.eat(TokenKind::Else) {
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If {
                    pred,
                    then_block,
                    else_block,
                    pos: kw.pos,
                })
            }
            Some(TokenKind::While) => {
                let kw = self.bump().unwrap();
                let pred = self.predicate()?;
                let block = self.block()?;
                Ok(Stmt::While {
                    pred,
                    block,
                    pos: kw.pos,
                })
            }
            Some(TokenKind::Record) => {
                let kw = self.bump().unwrap();
                let label = self.expect(TokenKind::Ident)?;
                let expr = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt::Record {
                    label: label.lexeme,
                    expr,
                    pos: kw.pos,
                })
            }
            Some(_) => {
                let t = self.peek().unwrap();
                Err(ParseError::UnexpectedToken {
                    expected: "statement".to_string(),
                    found: format!("`{}`", t.lexeme),
                    pos: t.pos,
                })
            }
            None => Err(ParseError::UnexpectedEof {
                expected: "statement".to_string(),
            }),
        }
    }
}

/// Parse a full token sequence into a program. An empty sequence is a parse
/// error even though it lexes cleanly.
pub fn parse_program(tokens: Vec<Token>) -> Result<Program, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::EmptyProgram);
    }
    let mut p = Parser { tokens, idx: 0 };
    let mut inputs = Vec::new();
    while p.at(TokenKind::Input) {
        inputs.push(p.input_decl()?);
    }
    let mut body = Vec::new();
    while p.peek().is_some() {
        body.push(p.stmt()?);
    }
    Ok(Program { inputs, body })
}

/// Convenience: lex and parse in one step.
pub fn parse_source(source: &super::lexer::SourceUnit) -> Result<Program, super::LangError> {
    let tokens = super::lexer::tokenize(source)?;
    Ok(parse_program(tokens)?)
}
