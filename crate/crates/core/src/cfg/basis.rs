//! Basis path enumeration via the baseline method.
//!
//! The baseline path takes every predicate's true edge on first visit and the
//! false edge on a revisit (so a loop body runs exactly once). Each further
//! path flips one predicate's first-visit choice, reaching it through the
//! earliest already-enumerated path that visits it, and follows baseline
//! choices afterwards. This yields exactly V(G) paths; independence is
//! verified by an exact integer rank computation on the edge-incidence
//! matrix.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ControlFlowGraph, EdgeLabel, NodeId, NodeKind};

/// An entry-to-exit path with its 0/1 incidence vector over the edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisPath {
    pub node_seq: Vec<NodeId>,
    pub edge_vector: Vec<u8>,
    /// Branch outcome at each predicate visit, in visit order.
    pub outcomes: Vec<bool>,
}

impl BasisPath {
    /// Outcome signature such as "T,F".
    pub fn signature(&self) -> String {
        self.outcomes
            .iter()
            .map(|&o| if o { "T" } else { "F" })
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone)]
struct Walk {
    nodes: Vec<NodeId>,
    edge_ids: Vec<usize>,
    outcomes: Vec<bool>,
}

impl Walk {
    fn into_path(self, cfg: &ControlFlowGraph) -> BasisPath {
        let mut vector = vec![0u8; cfg.edge_count()];
        for id in &self.edge_ids {
            vector[*id] = 1;
        }
        BasisPath {
            node_seq: self.nodes,
            edge_vector: vector,
            outcomes: self.outcomes,
        }
    }
}

/// Continue a walk to the exit under the baseline rule, given visit counts
/// accumulated so far.
fn continue_baseline(cfg: &ControlFlowGraph, walk: &mut Walk, visits: &mut BTreeMap<NodeId, u32>) {
    let cap = 4 * cfg.node_count() * cfg.node_count() + 16;
    let mut steps = 0;
    loop {
        let cur = *walk.nodes.last().expect("walk never empty");
        if cur == cfg.exit() {
            break;
        }
        steps += 1;
        assert!(steps <= cap, "baseline walk did not terminate");
        let (edge_id, next) = match cfg.nodes[cur].kind {
            NodeKind::Predicate => {
                let count = visits.entry(cur).or_insert(0);
                let choice = *count == 0;
                *count += 1;
                walk.outcomes.push(choice);
                cfg.successor(
                    cur,
                    if choice { EdgeLabel::True } else { EdgeLabel::False },
                )
            }
            _ => cfg.sole_successor(cur),
        };
        walk.edge_ids.push(edge_id);
        walk.nodes.push(next);
    }
}

fn baseline_walk(cfg: &ControlFlowGraph) -> Walk {
    let mut walk = Walk {
        nodes: vec![cfg.entry()],
        edge_ids: Vec::new(),
        outcomes: Vec::new(),
    };
    let mut visits = BTreeMap::new();
    continue_baseline(cfg, &mut walk, &mut visits);
    walk
}

/// Build a new walk from `parent` that flips the first-visit choice of the
/// predicate at position `pos` (where the parent took the true edge).
fn flip_walk(cfg: &ControlFlowGraph, parent: &Walk, pos: usize) -> Walk {
    let pred = parent.nodes[pos];
    debug_assert_eq!(cfg.nodes[pred].kind, NodeKind::Predicate);

    let nodes: Vec<NodeId> = parent.nodes[..=pos].to_vec();
    let edge_ids: Vec<usize> = parent.edge_ids[..pos].to_vec();
    // predicate visits strictly before `pos` keep their parent outcomes
    let prior_preds = parent.nodes[..pos]
        .iter()
        .filter(|&&n| cfg.nodes[n].kind == NodeKind::Predicate)
        .count();
    let mut outcomes: Vec<bool> = parent.outcomes[..prior_preds].to_vec();

    let mut visits: BTreeMap<NodeId, u32> = BTreeMap::new();
    for &n in &nodes {
        if cfg.nodes[n].kind == NodeKind::Predicate {
            *visits.entry(n).or_insert(0) += 1;
        }
    }

    let (edge_id, next) = cfg.successor(pred, EdgeLabel::False);
    outcomes.push(false);
    let mut walk = Walk {
        nodes,
        edge_ids,
        outcomes,
    };
    walk.edge_ids.push(edge_id);
    walk.nodes.push(next);
    continue_baseline(cfg, &mut walk, &mut visits);
    walk
}

/// Enumerate exactly V(G) linearly independent entry-to-exit paths.
/// The baseline comes first; flip paths follow in ascending order of the
/// flipped predicate's node id.
pub fn enumerate_basis_paths(cfg: &ControlFlowGraph) -> Vec<BasisPath> {
    let baseline = baseline_walk(cfg);
    let mut flipped: BTreeSet<NodeId> = BTreeSet::new();
    let mut worklist: Vec<Walk> = vec![baseline.clone()];
    let mut flips: Vec<(NodeId, Walk)> = Vec::new();

    let mut i = 0;
    while i < worklist.len() {
        let path = worklist[i].clone();
        let mut seen_here: BTreeSet<NodeId> = BTreeSet::new();
        for (pos, &node) in path.nodes.iter().enumerate() {
            if cfg.nodes[node].kind == NodeKind::Predicate
                && seen_here.insert(node)
                && flipped.insert(node)
            {
                let w = flip_walk(cfg, &path, pos);
                worklist.push(w.clone());
                flips.push((node, w));
            }
        }
        i += 1;
    }

    debug_assert_eq!(flipped.len(), cfg.predicate_count());
    flips.sort_by_key(|(node, _)| *node);

    let mut paths = Vec::with_capacity(flips.len() + 1);
    paths.push(baseline.into_path(cfg));
    paths.extend(flips.into_iter().map(|(_, w)| w.into_path(cfg)));
    paths
}

/// Exact rank of an integer matrix (fraction-free Gaussian elimination).
fn rank_exact(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        if let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) {
            m.swap(rank, p);
            let (top, rest) = m.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            let a = pivot_row[col];
            for row in rest.iter_mut() {
                let b = row[col];
                if b != 0 {
                    for (c, cell) in row.iter_mut().enumerate().skip(col) {
                        *cell = *cell * a - pivot_row[c] * b;
                    }
                }
            }
            rank += 1;
        }
        col += 1;
    }
    rank
}

/// True iff the paths' incidence vectors are linearly independent over the
/// rationals.
pub fn verify_independence(paths: &[BasisPath], cfg: &ControlFlowGraph) -> bool {
    let matrix: Vec<Vec<i128>> = paths
        .iter()
        .map(|p| {
            assert_eq!(p.edge_vector.len(), cfg.edge_count());
            p.edge_vector.iter().map(|&v| v as i128).collect()
        })
        .collect();
    rank_exact(matrix) == paths.len()
}
