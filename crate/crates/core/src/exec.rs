//! Tracing interpreter over the control flow graph.
//!
//! Executes one concrete input vector and records the visited node sequence
//! plus, at every predicate, the branch-function value. The branch function
//! re-expresses `E1 op E2` as `F rel 0` so that |F| measures how far the
//! input is from flipping the branch.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfg::basis::BasisPath;
use crate::cfg::{ControlFlowGraph, EdgeLabel, NodeAction, NodeId};
use crate::lang::{BinOp, Expr, RelOp};

/// Concrete integer values for every declared input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputVector {
    pub values: BTreeMap<String, i64>,
}

impl InputVector {
    pub fn new(values: BTreeMap<String, i64>) -> Self {
        InputVector { values }
    }

    pub fn single(name: &str, value: i64) -> Self {
        let mut values = BTreeMap::new();
        values.insert(name.to_string(), value);
        InputVector { values }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("missing value for input `{0}`")]
    Missing(String),
    #[error("value {value} for input `{name}` outside domain [{lo}, {hi}]")]
    OutOfDomain {
        name: String,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("value provided for undeclared input `{0}`")]
    Undeclared(String),
}

/// The `rel` column of the branch-function table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
        };
        f.write_str(s)
    }
}

/// Transform `e1 op e2` into `(F, rel)` with `F rel 0` equivalent to the
/// original predicate:
///
/// `>`/`>=` map to `e2 - e1`, `<`/`<=` to `e1 - e2`, `=`/`!=` to
/// `|e1 - e2|`. F is negative (or zero for the non-strict rels) exactly when
/// the predicate is true. i128 keeps the subtraction exact for any i64 pair.
pub fn branch_function(op: RelOp, e1: i64, e2: i64) -> (i128, Rel) {
    let a = e1 as i128;
    let b = e2 as i128;
    match op {
        RelOp::Gt => (b - a, Rel::Lt),
        RelOp::Ge => (b - a, Rel::Le),
        RelOp::Lt => (a - b, Rel::Lt),
        RelOp::Le => (a - b, Rel::Le),
        RelOp::Eq => ((a - b).abs(), Rel::Eq),
        RelOp::Ne => ((a - b).abs(), Rel::Ne),
    }
}

/// Truth of `F rel 0`.
pub fn rel_holds(f: i128, rel: Rel) -> bool {
    match rel {
        Rel::Lt => f < 0,
        Rel::Le => f <= 0,
        Rel::Eq => f == 0,
        Rel::Ne => f != 0,
    }
}

/// One predicate visit: branch-function value and the branch taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateObservation {
    pub node_id: NodeId,
    pub f_value: i128,
    pub rel: Rel,
    pub outcome: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Normal,
    StepLimit,
    RuntimeError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuntimeFault {
    DivisionByZero,
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub node_seq: Vec<NodeId>,
    pub observations: Vec<PredicateObservation>,
    pub records: Vec<(String, i64)>,
    pub steps: usize,
    pub terminated: Termination,
    pub fault: Option<RuntimeFault>,
}

fn eval_expr(e: &Expr, env: &BTreeMap<String, i64>) -> Result<i64, RuntimeFault> {
    match e {
        Expr::Int(v) => Ok(*v),
        Expr::Var { name, .. } => Ok(*env
            .get(name)
            .unwrap_or_else(|| panic!("unbound variable `{name}` slipped past validation"))),
        Expr::Neg(inner) => eval_expr(inner, env)?
            .checked_neg()
            .ok_or(RuntimeFault::Overflow),
        Expr::Bin { op, lhs, rhs } => {
            let a = eval_expr(lhs, env)?;
            let b = eval_expr(rhs, env)?;
            match op {
                BinOp::Add => a.checked_add(b).ok_or(RuntimeFault::Overflow),
                BinOp::Sub => a.checked_sub(b).ok_or(RuntimeFault::Overflow),
                BinOp::Mul => a.checked_mul(b).ok_or(RuntimeFault::Overflow),
                BinOp::Div => {
                    if b == 0 {
                        Err(RuntimeFault::DivisionByZero)
                    } else {
                        // i64 division truncates toward zero
                        a.checked_div(b).ok_or(RuntimeFault::Overflow)
                    }
                }
            }
        }
    }
}

/// Check an input vector against the graph's declared inputs.
pub fn check_input(cfg: &ControlFlowGraph, input: &InputVector) -> Result<(), InputError> {
    for decl in &cfg.inputs {
        match input.values.get(&decl.name) {
            None => return Err(InputError::Missing(decl.name.clone())),
            Some(&v) if v < decl.lo || v > decl.hi => {
                return Err(InputError::OutOfDomain {
                    name: decl.name.clone(),
                    value: v,
                    lo: decl.lo,
                    hi: decl.hi,
                })
            }
            Some(_) => {}
        }
    }
    for name in input.values.keys() {
        if !cfg.inputs.iter().any(|d| &d.name == name) {
            return Err(InputError::Undeclared(name.clone()));
        }
    }
    Ok(())
}

/// Interpret the program on one input vector. A pure function of its
/// arguments: the same call always yields the same trace.
pub fn execute(
    cfg: &ControlFlowGraph,
    input: &InputVector,
    step_limit: usize,
) -> Result<ExecutionTrace, InputError> {
    check_input(cfg, input)?;

    let mut env = input.values.clone();
    let mut trace = ExecutionTrace {
        node_seq: vec![cfg.entry()],
        observations: Vec::new(),
        records: Vec::new(),
        steps: 1,
        terminated: Termination::Normal,
        fault: None,
    };

    loop {
        let cur = *trace.node_seq.last().unwrap();
        if cur == cfg.exit() {
            break;
        }
        if trace.steps >= step_limit {
            trace.terminated = Termination::StepLimit;
            break;
        }
        let next = match &cfg.nodes[cur].action {
            NodeAction::None => cfg.sole_successor(cur).1,
            NodeAction::Assign { target, expr } => match eval_expr(expr, &env) {
                Ok(v) => {
                    env.insert(target.clone(), v);
                    cfg.sole_successor(cur).1
                }
                Err(fault) => {
                    trace.terminated = Termination::RuntimeError;
                    trace.fault = Some(fault);
                    break;
                }
            },
            NodeAction::Record { label, expr } => match eval_expr(expr, &env) {
                Ok(v) => {
                    trace.records.push((label.clone(), v));
                    cfg.sole_successor(cur).1
                }
                Err(fault) => {
                    trace.terminated = Termination::RuntimeError;
                    trace.fault = Some(fault);
                    break;
                }
            },
            NodeAction::Branch { lhs, op, rhs } => {
                let (e1, e2) = match (eval_expr(lhs, &env), eval_expr(rhs, &env)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(fault), _) | (_, Err(fault)) => {
                        trace.terminated = Termination::RuntimeError;
                        trace.fault = Some(fault);
                        break;
                    }
                };
                let (f, rel) = branch_function(*op, e1, e2);
                let outcome = rel_holds(f, rel);
                trace.observations.push(PredicateObservation {
                    node_id: cur,
                    f_value: f,
                    rel,
                    outcome,
                });
                cfg.successor(
                    cur,
                    if outcome {
                        EdgeLabel::True
                    } else {
                        EdgeLabel::False
                    },
                )
                .1
            }
        };
        trace.node_seq.push(next);
        trace.steps += 1;
    }

    Ok(trace)
}

/// Where an execution trace leaves a target path: length of the longest
/// common node-sequence prefix, plus the observation at the diverging
/// predicate when there is one.
pub fn divergence_point(
    trace: &ExecutionTrace,
    target: &BasisPath,
) -> (usize, Option<PredicateObservation>) {
    let matched = trace
        .node_seq
        .iter()
        .zip(target.node_seq.iter())
        .take_while(|(a, b)| a == b)
        .count();
    if matched == target.node_seq.len() {
        return (matched, None);
    }
    if matched == trace.node_seq.len() || matched == 0 {
        // trace stopped early (error / step limit) before diverging
        return (matched, None);
    }
    // divergence in a deterministic CFG can only happen right after a
    // predicate: find the observation for the visit at position matched-1
    let pred_node = trace.node_seq[matched - 1];
    let visit_no = trace.node_seq[..matched]
        .iter()
        .filter(|&&n| n == pred_node)
        .count();
    let obs = trace
        .observations
        .iter()
        .filter(|o| o.node_id == pred_node)
        .nth(visit_no - 1)
        .cloned();
    (matched, obs)
}

/// Whether the trace covers the target path exactly.
pub fn covers(trace: &ExecutionTrace, target: &BasisPath) -> bool {
    trace.terminated == Termination::Normal && trace.node_seq == target.node_seq
}
