//! Fitness functions over execution traces.
//!
//! The base form is `f = 1 / ((|A - B| + delta)^2)`, maximized: the closer
//! the two operand values, the larger f, with the optimum `1/delta^2` at
//! equality. `path_fitness` generalizes this to a whole target path by
//! weighting the branch distance at the divergence point with the fraction
//! of the path matched so far.

use serde::{Deserialize, Serialize};

use crate::cfg::basis::BasisPath;
use crate::cfg::NodeId;
use crate::exec::{covers, divergence_point, ExecutionTrace, Termination};

/// Fitness assigned when execution faulted or the target predicate was never
/// reached: positive, below anything a measurable run can score.
pub const FLOOR_FITNESS: f64 = f64::MIN_POSITIVE;

/// Default fitness offset; the optimum fitness is `1/delta^2 = 400`.
pub const DEFAULT_DELTA: f64 = 0.05;

/// Default class boundaries for reporting; values at or above the last
/// bound fall into an extra exact-hit class.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.3, 0.7, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub value: f64,
    pub covered: bool,
}

/// What the search is driving toward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FitnessTarget {
    /// Equality at one predicate node: maximize closeness of its two
    /// operands (the original single-predicate formulation).
    Predicate { node_id: NodeId },
    /// Full traversal of one basis path.
    Path { path: BasisPath },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessConfig {
    pub delta: f64,
    pub target: FitnessTarget,
}

fn reciprocal_square(distance: f64, delta: f64) -> f64 {
    let d = distance + delta;
    1.0 / (d * d)
}

/// `1 / ((|a - b| + delta)^2)`, covered exactly at `a = b`.
pub fn paper_fitness(a: i64, b: i64, delta: f64) -> FitnessValue {
    assert!(delta > 0.0, "delta must be positive");
    let distance = (a as i128 - b as i128).unsigned_abs() as f64;
    FitnessValue {
        value: reciprocal_square(distance, delta),
        covered: a == b,
    }
}

/// Fitness of a trace against an equality target at one predicate: the
/// branch-function magnitude there is exactly |A - B|.
pub fn predicate_fitness(trace: &ExecutionTrace, node_id: NodeId, delta: f64) -> FitnessValue {
    assert!(delta > 0.0, "delta must be positive");
    match trace.observations.iter().find(|o| o.node_id == node_id) {
        Some(obs) => {
            let distance = obs.f_value.unsigned_abs() as f64;
            FitnessValue {
                value: reciprocal_square(distance, delta),
                covered: obs.f_value == 0,
            }
        }
        None => FitnessValue {
            value: FLOOR_FITNESS,
            covered: false,
        },
    }
}

/// Fitness of a trace against a target path: `1/delta^2` when covered,
/// otherwise the branch distance at the divergence point scaled by the
/// matched prefix ratio.
pub fn path_fitness(trace: &ExecutionTrace, target: &BasisPath, delta: f64) -> FitnessValue {
    assert!(delta > 0.0, "delta must be positive");
    if covers(trace, target) {
        return FitnessValue {
            value: 1.0 / (delta * delta),
            covered: true,
        };
    }
    if trace.terminated != Termination::Normal {
        return FitnessValue {
            value: FLOOR_FITNESS,
            covered: false,
        };
    }
    let (matched, obs) = divergence_point(trace, target);
    match obs {
        Some(obs) => {
            let ratio = matched as f64 / target.node_seq.len() as f64;
            FitnessValue {
                value: ratio * reciprocal_square(obs.f_value.unsigned_abs() as f64, delta),
                covered: false,
            }
        }
        None => FitnessValue {
            value: FLOOR_FITNESS,
            covered: false,
        },
    }
}

/// Evaluate a trace against a fitness target.
pub fn trace_fitness(trace: &ExecutionTrace, config: &FitnessConfig) -> FitnessValue {
    if trace.terminated != Termination::Normal {
        return FitnessValue {
            value: FLOOR_FITNESS,
            covered: false,
        };
    }
    match &config.target {
        FitnessTarget::Predicate { node_id } => predicate_fitness(trace, *node_id, config.delta),
        FitnessTarget::Path { path } => path_fitness(trace, path, config.delta),
    }
}

/// Class index for a fitness value given strictly increasing thresholds:
/// index i for values below thresholds[i], and an overflow (exact-hit) class
/// at index thresholds.len() for everything at or above the last bound.
pub fn classify(value: f64, thresholds: &[f64]) -> usize {
    debug_assert!(thresholds.windows(2).all(|w| w[0] < w[1]));
    thresholds
        .iter()
        .position(|&bound| value < bound)
        .unwrap_or(thresholds.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::basis::enumerate_basis_paths;
    use crate::cfg::build_cfg;
    use crate::exec::{execute, InputVector};
    use crate::lang::{parse_source, SourceUnit};

    #[test]
    fn equality_hits_optimum() {
        let f = paper_fitness(7, 7, 0.05);
        assert!((f.value - 400.0).abs() < 1e-9);
        assert!(f.covered);
    }

    #[test]
    fn distance_one_lands_in_top_display_class() {
        let f = paper_fitness(8, 7, 0.05);
        assert!((f.value - 1.0 / 1.1025).abs() < 1e-9);
        assert!((f.value - 0.9070).abs() < 1e-3);
        assert_eq!(classify(f.value, &DEFAULT_THRESHOLDS), 2);
        assert!(!f.covered);
    }

    #[test]
    fn distance_two_lands_in_bottom_class() {
        let f = paper_fitness(9, 7, 0.05);
        assert!((f.value - 1.0 / 4.2025).abs() < 1e-9);
        assert!((f.value - 0.2380).abs() < 1e-3);
        assert_eq!(classify(f.value, &DEFAULT_THRESHOLDS), 0);
    }

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify(0.0, &DEFAULT_THRESHOLDS), 0);
        assert_eq!(classify(0.3, &DEFAULT_THRESHOLDS), 1);
        assert_eq!(classify(0.7, &DEFAULT_THRESHOLDS), 2);
        assert_eq!(classify(1.0, &DEFAULT_THRESHOLDS), 3);
        assert_eq!(classify(400.0, &DEFAULT_THRESHOLDS), 3);
    }

    #[test]
    fn monotone_in_distance() {
        let mut prev = f64::INFINITY;
        for d in 0..200 {
            let f = paper_fitness(d, 0, 0.05).value;
            assert!(f < prev);
            assert!(f > 0.0 && f <= 1.0 / (0.05 * 0.05));
            prev = f;
        }
    }

    const ATM: &str = "\
input wd_amt in [0, 32767];
net_amt := 25000;
min_bal := 1000;
bal := net_amt - wd_amt;
if wd_amt < net_amt {
    if bal < min_bal {
        record fail bal;
    } else {
        record success bal;
    }
}
";

    #[test]
    fn path_fitness_full_coverage() {
        let cfg = build_cfg(&parse_source(&SourceUnit::inline(ATM)).unwrap());
        let paths = enumerate_basis_paths(&cfg);
        let success = paths.iter().find(|p| p.signature() == "T,F").unwrap();
        let trace = execute(&cfg, &InputVector::single("wd_amt", 10000), 10_000).unwrap();
        let f = path_fitness(&trace, success, 0.05);
        assert!(f.covered);
        assert!((f.value - 400.0).abs() < 1e-9);
    }

    #[test]
    fn path_fitness_divergence_formula() {
        let cfg = build_cfg(&parse_source(&SourceUnit::inline(ATM)).unwrap());
        let paths = enumerate_basis_paths(&cfg);
        let success = paths.iter().find(|p| p.signature() == "T,F").unwrap();
        // wd_amt = 24500: bal = 500 < min_bal, so the trace turns onto the
        // fail route; |f| at the inner predicate is |500 - 1000| = 500
        let trace = execute(&cfg, &InputVector::single("wd_amt", 24500), 10_000).unwrap();
        let (matched, obs) = crate::exec::divergence_point(&trace, success);
        assert_eq!(obs.as_ref().unwrap().f_value, -500);
        let expected = (matched as f64 / success.node_seq.len() as f64)
            * (1.0 / (500.05f64 * 500.05f64));
        let f = path_fitness(&trace, success, 0.05);
        assert!(!f.covered);
        assert!((f.value - expected).abs() < 1e-15);
    }

    #[test]
    fn path_fitness_matches_paper_formula_for_single_predicate_target() {
        // one predicate, equality: path mode on the then-route should give
        // the same curve shape as the direct formula when r = 1 up to the
        // prefix ratio
        let src = "input x in [0,100]; if x = 40 { record hit x; }";
        let cfg = build_cfg(&parse_source(&SourceUnit::inline(src)).unwrap());
        let paths = enumerate_basis_paths(&cfg);
        let hit = paths.iter().find(|p| p.signature() == "T").unwrap();
        let trace = execute(&cfg, &InputVector::single("x", 38), 10_000).unwrap();
        let (matched, _) = crate::exec::divergence_point(&trace, hit);
        let r = matched as f64 / hit.node_seq.len() as f64;
        let f = path_fitness(&trace, hit, 0.05);
        let paper = paper_fitness(38, 40, 0.05);
        assert!((f.value - r * paper.value).abs() < 1e-12);
    }

    #[test]
    fn unreached_predicate_gets_floor() {
        let cfg = build_cfg(&parse_source(&SourceUnit::inline(ATM)).unwrap());
        let inner = *cfg.predicate_ids().last().unwrap();
        // wd_amt >= net_amt skips the outer branch entirely
        let trace = execute(&cfg, &InputVector::single("wd_amt", 30000), 10_000).unwrap();
        let f = predicate_fitness(&trace, inner, 0.05);
        assert_eq!(f.value, FLOOR_FITNESS);
        assert!(!f.covered);
    }
}
