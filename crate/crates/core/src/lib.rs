//! Test data generation for basis path testing.
//!
//! The pipeline: parse a program in a small imperative language whose branch
//! predicates are single relational comparisons, build its control flow
//! graph, enumerate V(G) linearly independent basis paths, then search the
//! input domain with a genetic algorithm whose fitness is the Korel branch
//! distance at the point where an execution diverges from the target path.
//! A random-search baseline runs under the same evaluation budget for
//! comparison.

pub mod cfg;
pub mod exec;
pub mod fitness;
pub mod ga;
pub mod lang;
pub mod report;

pub use cfg::basis::{enumerate_basis_paths, verify_independence, BasisPath};
pub use cfg::{build_cfg, cyclomatic_complexity, export_dot, ControlFlowGraph, EdgeLabel, NodeId};
pub use exec::{
    branch_function, divergence_point, execute, ExecutionTrace, InputVector,
    PredicateObservation, Rel, Termination,
};
pub use fitness::{
    classify, paper_fitness, path_fitness, predicate_fitness, trace_fitness, FitnessConfig,
    FitnessTarget, FitnessValue, DEFAULT_DELTA, DEFAULT_THRESHOLDS, FLOOR_FITNESS,
};
pub use ga::{
    decode, evolve, mutate, random_search, two_point_crossover, GaConfig, GenerationStats, Method,
    RunResult,
};
pub use lang::{
    load_program, parse_source, pretty_print, tokenize, validate, Program, SourceUnit,
};
pub use report::{ComparisonReport, FitnessReport, MethodSummary, PopulationSource};
