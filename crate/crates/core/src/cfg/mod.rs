//! Control flow graph construction and cyclomatic complexity.
//!
//! Node ids are dense and assigned in source order; the entry node is always
//! id 0 and the exit node is the last id. Predicate nodes carry the relational
//! expression, statement nodes carry the executable action (join points carry
//! none).

pub mod basis;

use std::fmt::Write;

use crate::lang::{expr_to_string, Expr, InputDecl, Program, RelOp, Stmt};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Entry,
    Exit,
    Statement,
    Predicate,
}

/// What the interpreter does when it visits a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeAction {
    None,
    Assign { target: String, expr: Expr },
    Record { label: String, expr: Expr },
    Branch { lhs: Expr, op: RelOp, rhs: Expr },
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub action: NodeAction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLabel {
    True,
    False,
    Unconditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone)]
pub struct ControlFlowGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Declared inputs of the source program, needed to decode and validate
    /// input vectors during execution.
    pub inputs: Vec<InputDecl>,
}

impl ControlFlowGraph {
    pub fn entry(&self) -> NodeId {
        0
    }

    pub fn exit(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Predicate)
            .count()
    }

    pub fn predicate_ids(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Predicate)
            .map(|n| n.id)
            .collect()
    }

    /// Outgoing edges of a node as (edge index, edge), in edge-list order.
    pub fn out_edges(&self, id: NodeId) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == id)
    }

    /// Successor along the given label; panics if absent (a structural bug).
    pub fn successor(&self, id: NodeId, label: EdgeLabel) -> (usize, NodeId) {
        self.out_edges(id)
            .find(|(_, e)| e.label == label)
            .map(|(i, e)| (i, e.to))
            .unwrap_or_else(|| panic!("node {id} has no {label:?} out-edge"))
    }

    /// The single unconditional successor of a non-predicate node.
    pub fn sole_successor(&self, id: NodeId) -> (usize, NodeId) {
        self.successor(id, EdgeLabel::Unconditional)
    }
}

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Builder {
    fn add_node(&mut self, kind: NodeKind, action: NodeAction) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { id, kind, action });
        id
    }

    fn add_edge(&mut self, from: NodeId, to: NodeId, label: EdgeLabel) {
        self.edges.push(Edge { from, to, label });
    }

    fn lower_block(
        &mut self,
        mut inc: (NodeId, EdgeLabel),
        stmts: &[Stmt],
    ) -> (NodeId, EdgeLabel) {
        for s in stmts {
            inc = self.lower_stmt(inc, s);
        }
        inc
    }

    fn lower_stmt(&mut self, inc: (NodeId, EdgeLabel), stmt: &Stmt) -> (NodeId, EdgeLabel) {
        match stmt {
            Stmt::Assign { target, expr, .. } => {
                let n = self.add_node(
                    NodeKind::Statement,
                    NodeAction::Assign {
                        target: target.clone(),
                        expr: expr.clone(),
                    },
                );
                self.add_edge(inc.0, n, inc.1);
                (n, EdgeLabel::Unconditional)
            }
            Stmt::Record { label, expr, .. } => {
                let n = self.add_node(
                    NodeKind::Statement,
                    NodeAction::Record {
                        label: label.clone(),
                        expr: expr.clone(),
                    },
                );
                self.add_edge(inc.0, n, inc.1);
                (n, EdgeLabel::Unconditional)
            }
            Stmt::If {
                pred,
                then_block,
                else_block,
                ..
            } => {
                let p = self.add_node(
                    NodeKind::Predicate,
                    NodeAction::Branch {
                        lhs: pred.lhs.clone(),
                        op: pred.op,
                        rhs: pred.rhs.clone(),
                    },
                );
                self.add_edge(inc.0, p, inc.1);
                let t_out = self.lower_block((p, EdgeLabel::True), then_block);
                let e_out = self.lower_block((p, EdgeLabel::False), else_block);
                let join = self.add_node(NodeKind::Statement, NodeAction::None);
                self.add_edge(t_out.0, join, t_out.1);
                self.add_edge(e_out.0, join, e_out.1);
                (join, EdgeLabel::Unconditional)
            }
            Stmt::While { pred, block, .. } => {
                let p = self.add_node(
                    NodeKind::Predicate,
                    NodeAction::Branch {
                        lhs: pred.lhs.clone(),
                        op: pred.op,
                        rhs: pred.rhs.clone(),
                    },
                );
                self.add_edge(inc.0, p, inc.1);
                let body_out = self.lower_block((p, EdgeLabel::True), block);
                // back edge
                self.add_edge(body_out.0, p, body_out.1);
                (p, EdgeLabel::False)
            }
        }
    }
}

/// Lower a validated program into its control flow graph.
pub fn build_cfg(program: &Program) -> ControlFlowGraph {
    let mut b = Builder {
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let entry = b.add_node(NodeKind::Entry, NodeAction::None);
    let out = b.lower_block((entry, EdgeLabel::Unconditional), &program.body);
    let exit = b.add_node(NodeKind::Exit, NodeAction::None);
    b.add_edge(out.0, exit, out.1);
    ControlFlowGraph {
        nodes: b.nodes,
        edges: b.edges,
        inputs: program.inputs.clone(),
    }
}

/// McCabe's V(G) = e - n + 2 for a single-entry single-exit graph.
pub fn cyclomatic_complexity(cfg: &ControlFlowGraph) -> usize {
    (cfg.edge_count() as isize - cfg.node_count() as isize + 2) as usize
}

/// Deterministic DOT rendering: diamonds for predicates, boxes for
/// statements, double circles for entry/exit, labeled branch edges.
pub fn export_dot(cfg: &ControlFlowGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph cfg {{");
    let _ = writeln!(out, "    rankdir=TB;");
    for node in &cfg.nodes {
        let (shape, label) = match (&node.kind, &node.action) {
            (NodeKind::Entry, _) => ("doublecircle", "entry".to_string()),
            (NodeKind::Exit, _) => ("doublecircle", "exit".to_string()),
            (NodeKind::Predicate, NodeAction::Branch { lhs, op, rhs }) => (
                "diamond",
                format!("{} {} {}", expr_to_string(lhs), op, expr_to_string(rhs)),
            ),
            (NodeKind::Statement, NodeAction::Assign { target, expr }) => {
                ("box", format!("{} := {}", target, expr_to_string(expr)))
            }
            (NodeKind::Statement, NodeAction::Record { label, expr }) => {
                ("box", format!("record {} {}", label, expr_to_string(expr)))
            }
            (NodeKind::Statement, _) => ("box", "join".to_string()),
            (kind, action) => unreachable!("inconsistent node {kind:?}/{action:?}"),
        };
        let escaped = label.replace('"', "\\\"");
        let _ = writeln!(
            out,
            "    n{} [shape={}, label=\"{}: {}\"];",
            node.id, shape, node.id, escaped
        );
    }
    for e in &cfg.edges {
        match e.label {
            EdgeLabel::Unconditional => {
                let _ = writeln!(out, "    n{} -> n{};", e.from, e.to);
            }
            EdgeLabel::True => {
                let _ = writeln!(out, "    n{} -> n{} [label=\"true\"];", e.from, e.to);
            }
            EdgeLabel::False => {
                let _ = writeln!(out, "    n{} -> n{} [label=\"false\"];", e.from, e.to);
            }
        }
    }
    let _ = writeln!(out, "}}");
    out
}
