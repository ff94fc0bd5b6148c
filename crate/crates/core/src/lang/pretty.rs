//! Canonical pretty-printer. Output reparses to a structurally equal program.

use std::fmt::Write;

use super::ast::{BinOp, Expr, Predicate, Program, Stmt};

/// Parenthesizes by precedence so the printed form tokenizes back to an
/// equivalent tree.
pub fn expr_to_string(e: &Expr) -> String {
    fn prec(e: &Expr) -> u8 {
        match e {
            Expr::Int(_) | Expr::Var { .. } => 3,
            Expr::Neg(_) => 2,
            Expr::Bin { op: BinOp::Mul | BinOp::Div, .. } => 1,
            Expr::Bin { op: BinOp::Add | BinOp::Sub, .. } => 0,
        }
    }
    fn go(e: &Expr, out: &mut String) {
        match e {
            Expr::Int(v) => {
                if *v < 0 {
                    // negative literals only arise from constant folding
                    // elsewhere; print as a parenthesized negation
                    let _ = write!(out, "(-{})", v.unsigned_abs());
                } else {
                    let _ = write!(out, "{v}");
                }
            }
            Expr::Var { name, .. } => out.push_str(name),
            Expr::Neg(inner) => {
                out.push('-');
                wrap(inner, 2, out);
            }
            Expr::Bin { op, lhs, rhs } => {
                let p = prec(e);
                wrap(lhs, p, out);
                let _ = write!(out, " {op} ");
                // right operand needs strictly higher precedence for the
                // non-associative/left-associative cases
                wrap(rhs, p + 1, out);
            }
        }
    }
    fn wrap(e: &Expr, min_prec: u8, out: &mut String) {
        if prec(e) < min_prec {
            out.push('(');
            go(e, out);
            out.push(')');
        } else {
            go(e, out);
        }
    }
    let mut s = String::new();
    go(e, &mut s);
    s
}

pub fn predicate_to_string(p: &Predicate) -> String {
    format!(
        "{} {} {}",
        expr_to_string(&p.lhs),
        p.op,
        expr_to_string(&p.rhs)
    )
}

fn print_block(stmts: &[Stmt], indent: usize, out: &mut String) {
    for s in stmts {
        print_stmt(s, indent, out);
    }
}

fn print_stmt(s: &Stmt, indent: usize, out: &mut String) {
    let pad = "    ".repeat(indent);
    match s {
        Stmt::Assign { target, expr, .. } => {
            let _ = writeln!(out, "{pad}{target} := {};", expr_to_string(expr));
        }
        Stmt::Record { label, expr, .. } => {
            let _ = writeln!(out, "{pad}record {label} {};", expr_to_string(expr));
        }
        Stmt::If {
            pred,
            then_block,
            else_block,
            ..
        } => {
            let _ = writeln!(out, "{pad}if {} {{", predicate_to_string(pred));
            print_block(then_block, indent + 1, out);
            if else_block.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                print_block(else_block, indent + 1, out);
                let _ = writeln!(out, "{pad}}}");
            }
        }
        Stmt::While { pred, block, .. } => {
            let _ = writeln!(out, "{pad}while {} {{", predicate_to_string(pred));
            print_block(block, indent + 1, out);
            let _ = writeln!(out, "{pad}}}");
        }
    }
}

pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.inputs {
        let _ = writeln!(out, "input {} in [{}, {}];", d.name, d.lo, d.hi);
    }
    print_block(&p.body, 0, &mut out);
    out
}
