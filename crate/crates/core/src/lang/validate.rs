//! Static checks on a parsed program: inverted domains, duplicate inputs,
//! use before definition. Violations are reported, not thrown.

use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Expr, InputDecl, Predicate, Program, Stmt};
use super::token::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    InvertedDomain,
    DuplicateInput,
    UseBeforeDefinition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub pos: Pos,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

struct Checker {
    diagnostics: Vec<Diagnostic>,
}

impl Checker {
    fn check_expr(&mut self, e: &Expr, defined: &BTreeSet<String>) {
        match e {
            Expr::Int(_) => {}
            Expr::Var { name, pos } => {
                if !defined.contains(name) {
                    self.diagnostics.push(Diagnostic {
                        kind: DiagnosticKind::UseBeforeDefinition,
                        message: format!("`{name}` used before definition"),
                        pos: *pos,
                    });
                }
            }
            Expr::Neg(inner) => self.check_expr(inner, defined),
            Expr::Bin { lhs, rhs, .. } => {
                self.check_expr(lhs, defined);
                self.check_expr(rhs, defined);
            }
        }
    }

    fn check_pred(&mut self, p: &Predicate, defined: &BTreeSet<String>) {
        self.check_expr(&p.lhs, defined);
        self.check_expr(&p.rhs, defined);
    }

    /// Returns the set of names definitely assigned after the block.
    fn check_block(&mut self, stmts: &[Stmt], mut defined: BTreeSet<String>) -> BTreeSet<String> {
        for s in stmts {
            match s {
                Stmt::Assign { target, expr, .. } => {
                    self.check_expr(expr, &defined);
                    defined.insert(target.clone());
                }
                Stmt::Record { expr, .. } => {
                    self.check_expr(expr, &defined);
                }
                Stmt::If {
                    pred,
                    then_block,
                    else_block,
                    ..
                } => {
                    self.check_pred(pred, &defined);
                    let after_then = self.check_block(then_block, defined.clone());
                    let after_else = self.check_block(else_block, defined.clone());
                    // only names assigned on both routes are definite
                    defined = after_then.intersection(&after_else).cloned().collect();
                }
                Stmt::While { pred, block, .. } => {
                    self.check_pred(pred, &defined);
                    // the body may never run, so its assignments stay local
                    self.check_block(block, defined.clone());
                }
            }
        }
        defined
    }
}

pub fn validate(program: &Program) -> ValidationReport {
    let mut checker = Checker {
        diagnostics: Vec::new(),
    };

    let mut defined = BTreeSet::new();
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for InputDecl { name, lo, hi, pos } in &program.inputs {
        if !seen.insert(name) {
            checker.diagnostics.push(Diagnostic {
                kind: DiagnosticKind::DuplicateInput,
                message: format!("input `{name}` declared more than once"),
                pos: *pos,
            });
        }
        if lo > hi {
            checker.diagnostics.push(Diagnostic {
                kind: DiagnosticKind::InvertedDomain,
                message: format!("input `{name}` has inverted domain [{lo}, {hi}]"),
                pos: *pos,
            });
        }
        defined.insert(name.clone());
    }

    checker.check_block(&program.body, defined);

    ValidationReport {
        diagnostics: checker.diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::super::lexer::SourceUnit;
    use super::super::parser::parse_source;
    use super::*;

    fn report(src: &str) -> ValidationReport {
        validate(&parse_source(&SourceUnit::inline(src)).unwrap())
    }

    #[test]
    fn atm_is_clean() {
        let r = report(
            "input wd_amt in [0, 32767];\n\
             net_amt := 25000;\n\
             min_bal := 1000;\n\
             bal := net_amt - wd_amt;\n\
             if wd_amt < net_amt { if bal < min_bal { record fail bal; } else { record success bal; } }",
        );
        assert!(r.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn undeclared_identifier() {
        let r = report("input x in [0,10]; x := z;");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].kind, DiagnosticKind::UseBeforeDefinition);
    }

    #[test]
    fn inverted_domain() {
        let r = report("input x in [5,2]; x := x;");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].kind, DiagnosticKind::InvertedDomain);
    }

    #[test]
    fn branch_assignment_is_not_definite() {
        let r = report(
            "input x in [0,10];\n\
             if x < 5 { y := 1; }\n\
             x := y;",
        );
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].kind, DiagnosticKind::UseBeforeDefinition);
    }

    #[test]
    fn both_branches_make_definite() {
        let r = report(
            "input x in [0,10];\n\
             if x < 5 { y := 1; } else { y := 2; }\n\
             x := y;",
        );
        assert!(r.is_empty());
    }

    #[test]
    fn positions_inside_source() {
        let src = "input x in [5,2]; x := z;";
        let r = report(src);
        let lines: Vec<&str> = src.lines().collect();
        for d in &r.diagnostics {
            assert!(d.pos.line >= 1 && d.pos.line <= lines.len());
            assert!(d.pos.col >= 1 && d.pos.col <= lines[d.pos.line - 1].len() + 1);
        }
    }
}
