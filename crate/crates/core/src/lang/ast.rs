//! Abstract syntax for the mini-language.
//!
//! Equality on AST nodes is structural and ignores source positions, so a
//! program compares equal to its pretty-printed-and-reparsed self.

use std::fmt;

use super::token::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub enum Expr {
    Int(i64),
    Var { name: String, pos: Pos },
    Neg(Box<Expr>),
    Bin {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Expr::Int(a), Expr::Int(b)) => a == b,
            (Expr::Var { name: a, .. }, Expr::Var { name: b, .. }) => a == b,
            (Expr::Neg(a), Expr::Neg(b)) => a == b,
            (
                Expr::Bin { op: ao, lhs: al, rhs: ar },
                Expr::Bin { op: bo, lhs: bl, rhs: br },
            ) => ao == bo && al == bl && ar == br,
            _ => false,
        }
    }
}

impl Eq for Expr {}

/// A simple relational predicate `lhs op rhs`; boolean connectives are
/// excluded by construction.
#[derive(Debug, Clone)]
pub struct Predicate {
    pub lhs: Expr,
    pub op: RelOp,
    pub rhs: Expr,
    pub pos: Pos,
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        self.lhs == other.lhs && self.op == other.op && self.rhs == other.rhs
    }
}

impl Eq for Predicate {}

#[derive(Debug, Clone)]
pub enum Stmt {
    Assign {
        target: String,
        expr: Expr,
        pos: Pos,
    },
    If {
        pred: Predicate,
        then_block: Vec<Stmt>,
        else_block: Vec<Stmt>,
        pos: Pos,
    },
    While {
        pred: Predicate,
        block: Vec<Stmt>,
        pos: Pos,
    },
    Record {
        label: String,
        expr: Expr,
        pos: Pos,
    },
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Stmt::Assign { target: at, expr: ae, .. },
                Stmt::Assign { target: bt, expr: be, .. },
            ) => at == bt && ae == be,
            (
                Stmt::If { pred: ap, then_block: atb, else_block: aeb, .. },
                Stmt::If { pred: bp, then_block: btb, else_block: beb, .. },
            ) => ap == bp && atb == btb && aeb == beb,
            (
                Stmt::While { pred: ap, block: ab, .. },
                Stmt::While { pred: bp, block: bb, .. },
            ) => ap == bp && ab == bb,
            (
                Stmt::Record { label: al, expr: ae, .. },
                Stmt::Record { label: bl, expr: be, .. },
            ) => al == bl && ae == be,
            _ => false,
        }
    }
}

impl Eq for Stmt {}

/// Declared integer input with an inclusive domain.
#[derive(Debug, Clone)]
pub struct InputDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub pos: Pos,
}

impl PartialEq for InputDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.lo == other.lo && self.hi == other.hi
    }
}

impl Eq for InputDecl {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub inputs: Vec<InputDecl>,
    pub body: Vec<Stmt>,
}

impl Program {
    /// Number of predicates (if/while conditions) in the whole body.
    pub fn predicate_count(&self) -> usize {
        fn count(stmts: &[Stmt]) -> usize {
            stmts
                .iter()
                .map(|s| match s {
                    Stmt::If {
                        then_block,
                        else_block,
                        ..
                    } => 1 + count(then_block) + count(else_block),
                    Stmt::While { block, .. } => 1 + count(block),
                    _ => 0,
                })
                .sum()
        }
        count(&self.body)
    }
}
