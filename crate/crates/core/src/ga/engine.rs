//! The evolution loop and the random-search baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cfg::ControlFlowGraph;
use crate::exec::{execute, InputVector};
use crate::fitness::{classify, trace_fitness, FitnessConfig, FitnessTarget, FitnessValue};

use super::{mutate, random_bits, roulette_pick, two_point_crossover, GaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ga,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Counts per fitness class; the last slot is the exact-hit class above
    /// the final threshold.
    pub class_histogram: Vec<u64>,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: Method,
    pub covered: bool,
    pub best_bits: Vec<u8>,
    pub best_input: InputVector,
    pub best_fitness: FitnessValue,
    pub generations_run: usize,
    pub evaluations: u64,
    /// Evaluation count at which the target was first covered, if ever.
    pub evaluations_to_coverage: Option<u64>,
    /// Fitness of every individual in the last evaluated generation.
    pub final_population_fitness: Vec<f64>,
    pub stats: Vec<GenerationStats>,
}

struct Individual {
    bits: Vec<bool>,
    input: InputVector,
    fitness: FitnessValue,
}

struct Evaluator<'a> {
    cfg: &'a ControlFlowGraph,
    fitness: FitnessConfig,
    step_limit: usize,
    evaluations: u64,
    first_covered_at: Option<u64>,
}

impl<'a> Evaluator<'a> {
    fn decode_input(&self, bits: &[bool], bits_per_var: usize) -> InputVector {
        let mut values = std::collections::BTreeMap::new();
        for (i, decl) in self.cfg.inputs.iter().enumerate() {
            let group = &bits[i * bits_per_var..(i + 1) * bits_per_var];
            values.insert(decl.name.clone(), super::decode(group, decl.lo, decl.hi));
        }
        InputVector::new(values)
    }

    fn evaluate(&mut self, bits: Vec<bool>, bits_per_var: usize) -> Individual {
        let input = self.decode_input(&bits, bits_per_var);
        let trace = execute(self.cfg, &input, self.step_limit)
            .expect("decoded inputs are always in-domain");
        let fitness = trace_fitness(&trace, &self.fitness);
        self.evaluations += 1;
        if fitness.covered && self.first_covered_at.is_none() {
            self.first_covered_at = Some(self.evaluations);
        }
        Individual {
            bits,
            input,
            fitness,
        }
    }
}

fn generation_stats(
    generation: usize,
    population: &[Individual],
    thresholds: &[f64],
) -> GenerationStats {
    let mut histogram = vec![0u64; thresholds.len() + 1];
    let mut best = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut covered = false;
    for ind in population {
        histogram[classify(ind.fitness.value, thresholds)] += 1;
        sum += ind.fitness.value;
        if ind.fitness.value > best {
            best = ind.fitness.value;
        }
        covered |= ind.fitness.covered;
    }
    GenerationStats {
        generation,
        best_fitness: best,
        mean_fitness: sum / population.len() as f64,
        class_histogram: histogram,
        covered,
    }
}

/// Indices sorted by fitness descending, ties broken by lower index.
fn ranked_indices(population: &[Individual]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..population.len()).collect();
    idx.sort_by(|&a, &b| {
        population[b]
            .fitness
            .value
            .partial_cmp(&population[a].fitness.value)
            .unwrap()
            .then(a.cmp(&b))
    });
    idx
}

fn bits_to_u8(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| b as u8).collect()
}

fn finish(
    method: Method,
    best: Individual,
    stats: Vec<GenerationStats>,
    final_population_fitness: Vec<f64>,
    evaluations: u64,
    evaluations_to_coverage: Option<u64>,
) -> RunResult {
    RunResult {
        method,
        covered: best.fitness.covered,
        best_bits: bits_to_u8(&best.bits),
        best_input: best.input,
        best_fitness: best.fitness,
        generations_run: stats.len(),
        evaluations,
        evaluations_to_coverage,
        final_population_fitness,
        stats,
    }
}

/// Run the full genetic loop against one fitness target. Deterministic for a
/// fixed seed. `max_generations` counts breeding rounds beyond the initial
/// population, so the loop evaluates `max_generations + 1` populations
/// unless early stopping kicks in.
pub fn evolve(cfg: &ControlFlowGraph, target: &FitnessTarget, config: &GaConfig) -> RunResult {
    config.validate().expect("invalid configuration");
    assert!(!cfg.inputs.is_empty(), "program declares no inputs");

    let chromosome_len = config.bits_per_var * cfg.inputs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator {
        cfg,
        fitness: FitnessConfig {
            delta: config.delta,
            target: target.clone(),
        },
        step_limit: config.step_limit,
        evaluations: 0,
        first_covered_at: None,
    };

    let mut population: Vec<Individual> = (0..config.population_size)
        .map(|_| {
            let bits = random_bits(&mut rng, chromosome_len);
            evaluator.evaluate(bits, config.bits_per_var)
        })
        .collect();

    let mut stats = vec![generation_stats(0, &population, &config.thresholds)];
    let best_idx = ranked_indices(&population)[0];
    let mut best = Individual {
        bits: population[best_idx].bits.clone(),
        input: population[best_idx].input.clone(),
        fitness: population[best_idx].fitness,
    };

    for generation in 1..=config.max_generations {
        if config.early_stop && best.fitness.covered {
            break;
        }

        // all RNG draws happen here, in a fixed order, before evaluation
        let ranked = ranked_indices(&population);
        let weights: Vec<f64> = population.iter().map(|i| i.fitness.value).collect();
        let mut next_bits: Vec<Vec<bool>> = ranked[..config.elite_count]
            .iter()
            .map(|&i| population[i].bits.clone())
            .collect();

        let pool_size = config.population_size - config.elite_count;
        let pool: Vec<usize> = (0..pool_size)
            .map(|_| roulette_pick(&weights, &mut rng))
            .collect();

        let mut offspring: Vec<Vec<bool>> = Vec::with_capacity(pool_size);
        for pair in pool.chunks(2) {
            if pair.len() == 2 {
                let (c1, c2) = two_point_crossover(
                    &population[pair[0]].bits,
                    &population[pair[1]].bits,
                    config.pc,
                    &mut rng,
                );
                offspring.push(c1);
                offspring.push(c2);
            } else {
                // odd leftover passes through crossover-free
                offspring.push(population[pair[0]].bits.clone());
            }
        }
        for child in offspring {
            next_bits.push(mutate(&child, config.pm, &mut rng));
        }

        population = next_bits
            .into_iter()
            .map(|bits| evaluator.evaluate(bits, config.bits_per_var))
            .collect();
        stats.push(generation_stats(generation, &population, &config.thresholds));

        let cand = ranked_indices(&population)[0];
        if population[cand].fitness.value > best.fitness.value {
            best = Individual {
                bits: population[cand].bits.clone(),
                input: population[cand].input.clone(),
                fitness: population[cand].fitness,
            };
        }
    }

    let final_fitness = population.iter().map(|i| i.fitness.value).collect();
    finish(
        Method::Ga,
        best,
        stats,
        final_fitness,
        evaluator.evaluations,
        evaluator.first_covered_at,
    )
}

/// Draw `budget` uniform chromosomes independently and keep the best.
/// Statistics are grouped into pseudo-generations of `population_size` for
/// comparability with the genetic runs.
pub fn random_search(
    cfg: &ControlFlowGraph,
    target: &FitnessTarget,
    budget: u64,
    config: &GaConfig,
) -> RunResult {
    config.validate().expect("invalid configuration");
    assert!(budget > 0, "budget must be positive");
    assert!(!cfg.inputs.is_empty(), "program declares no inputs");

    let chromosome_len = config.bits_per_var * cfg.inputs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator {
        cfg,
        fitness: FitnessConfig {
            delta: config.delta,
            target: target.clone(),
        },
        step_limit: config.step_limit,
        evaluations: 0,
        first_covered_at: None,
    };

    let mut stats = Vec::new();
    let mut chunk: Vec<Individual> = Vec::new();
    let mut best: Option<Individual> = None;
    let mut last_chunk_fitness: Vec<f64> = Vec::new();

    for i in 0..budget {
        let bits = random_bits(&mut rng, chromosome_len);
        let ind = evaluator.evaluate(bits, config.bits_per_var);
        let better = best
            .as_ref()
            .map(|b| ind.fitness.value > b.fitness.value)
            .unwrap_or(true);
        chunk.push(ind);
        if better {
            let ind = chunk.last().unwrap();
            best = Some(Individual {
                bits: ind.bits.clone(),
                input: ind.input.clone(),
                fitness: ind.fitness,
            });
        }
        let chunk_full = chunk.len() == config.population_size || i + 1 == budget;
        if chunk_full {
            stats.push(generation_stats(stats.len(), &chunk, &config.thresholds));
            last_chunk_fitness = chunk.iter().map(|c| c.fitness.value).collect();
            chunk.clear();
        }
        if config.early_stop {
            if let Some(b) = &best {
                if b.fitness.covered {
                    if !chunk.is_empty() {
                        stats.push(generation_stats(stats.len(), &chunk, &config.thresholds));
                        last_chunk_fitness = chunk.iter().map(|c| c.fitness.value).collect();
                        chunk.clear();
                    }
                    break;
                }
            }
        }
    }

    finish(
        Method::Random,
        best.expect("budget > 0 yields at least one individual"),
        stats,
        last_chunk_fitness,
        evaluator.evaluations,
        evaluator.first_covered_at,
    )
}

#[cfg(test)]
#[allow(clippy::field_reassign_with_default)]
mod tests {
    use super::*;
    use crate::cfg::basis::enumerate_basis_paths;
    use crate::cfg::build_cfg;
    use crate::lang::{parse_source, SourceUnit};

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

    fn atm_cfg() -> ControlFlowGraph {
        build_cfg(&parse_source(&SourceUnit::inline(ATM)).unwrap())
    }

    fn equality_target(cfg: &ControlFlowGraph) -> FitnessTarget {
        // inner predicate: bal < min_bal, equality when bal = min_bal
        FitnessTarget::Predicate {
            node_id: *cfg.predicate_ids().last().unwrap(),
        }
    }

    #[test]
    fn same_seed_same_result() {
        let cfg = atm_cfg();
        let target = equality_target(&cfg);
        let mut config = GaConfig::default();
        config.max_generations = 10;
        config.seed = 99;
        let a = evolve(&cfg, &target, &config);
        let b = evolve(&cfg, &target, &config);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_generations_only_initial_population() {
        let cfg = atm_cfg();
        let target = equality_target(&cfg);
        let mut config = GaConfig::default();
        config.max_generations = 0;
        config.seed = 1;
        let r = evolve(&cfg, &target, &config);
        assert_eq!(r.generations_run, 1);
        assert_eq!(r.evaluations, 100);
        assert_eq!(r.stats.len(), 1);
    }

    #[test]
    fn finds_equality_optimum() {
        let cfg = atm_cfg();
        let target = equality_target(&cfg);
        let mut config = GaConfig::default();
        config.seed = 0;
        config.early_stop = true;
        let r = evolve(&cfg, &target, &config);
        assert!(r.covered);
        assert_eq!(r.best_input.values["wd_amt"], 24000);
        assert!((r.best_fitness.value - 400.0).abs() < 1e-9);
    }

    #[test]
    fn covers_each_basis_path() {
        let cfg = atm_cfg();
        let paths = enumerate_basis_paths(&cfg);
        let mut config = GaConfig::default();
        config.seed = 7;
        config.early_stop = true;
        config.max_generations = 100;
        for path in &paths {
            let r = evolve(&cfg, &FitnessTarget::Path { path: path.clone() }, &config);
            assert!(r.covered, "path {} not covered", path.signature());
        }
    }

    #[test]
    fn best_ever_non_decreasing_with_elitism() {
        let cfg = atm_cfg();
        let target = equality_target(&cfg);
        let mut config = GaConfig::default();
        config.max_generations = 50;
        config.seed = 5;
        let r = evolve(&cfg, &target, &config);
        let mut prev = f64::NEG_INFINITY;
        for s in &r.stats {
            assert!(s.best_fitness >= prev, "best dropped at gen {}", s.generation);
            prev = s.best_fitness;
        }
    }

    #[test]
    fn pure_selection_never_invents_genotypes() {
        // pc = pm = 0: population dynamics are selection only, so the set of
        // distinct genotypes can never grow
        let cfg = atm_cfg();
        let target = equality_target(&cfg);
        let mut config = GaConfig::default();
        config.pc = 0.0;
        config.pm = 0.0;
        config.population_size = 20;
        config.max_generations = 30;
        config.seed = 3;
        let r = evolve(&cfg, &target, &config);
        // convergence under pure selection: mean approaches best
        let last = r.stats.last().unwrap();
        assert!(last.mean_fitness <= last.best_fitness + 1e-12);
        assert_eq!(r.evaluations, 20 * 31);
    }

    #[test]
    fn random_search_budget_one() {
        let cfg = atm_cfg();
        let target = equality_target(&cfg);
        let mut config = GaConfig::default();
        config.seed = 2;
        let r = random_search(&cfg, &target, 1, &config);
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.method, Method::Random);
    }

    #[test]
    fn trivial_target_covered_immediately() {
        let src = "input x in [0,7]; if 0 = 0 { record hit x; }";
        let cfg = build_cfg(&parse_source(&SourceUnit::inline(src)).unwrap());
        let target = FitnessTarget::Predicate {
            node_id: cfg.predicate_ids()[0],
        };
        let mut config = GaConfig::default();
        config.seed = 8;
        config.early_stop = true;
        let r = random_search(&cfg, &target, 100, &config);
        assert!(r.covered);
        assert_eq!(r.evaluations_to_coverage, Some(1));
        let g = evolve(&cfg, &target, &config);
        assert!(g.covered);
        assert_eq!(g.evaluations_to_coverage, Some(1));
    }

    #[test]
    fn runtime_error_individuals_get_floor_fitness() {
        let src = "input x in [0,7]; y := 1 / x; record q y;";
        let cfg = build_cfg(&parse_source(&SourceUnit::inline(src)).unwrap());
        let paths = enumerate_basis_paths(&cfg);
        let target = FitnessTarget::Path {
            path: paths[0].clone(),
        };
        let mut config = GaConfig::default();
        config.population_size = 16;
        config.bits_per_var = 3;
        config.max_generations = 2;
        config.seed = 4;
        let r = evolve(&cfg, &target, &config);
        // x = 0 divides by zero somewhere in the population; the run still
        // completes and statistics stay finite
        assert!(r.stats.iter().all(|s| s.mean_fitness.is_finite()));
    }
}
