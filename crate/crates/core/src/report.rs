//! Aggregated reporting: fitness-class histograms and GA-vs-random
//! comparisons.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitness::classify;
use crate::ga::RunResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationSource {
    FinalGeneration,
    AllGenerations,
}

/// Per-class share of a classified population: one class per threshold
/// interval plus an exact-hit class for values at or above the last bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub class_bounds: Vec<f64>,
    pub counts: Vec<u64>,
    pub percentages: Vec<f64>,
    pub population_source: PopulationSource,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("nothing to classify: the population is empty")]
    EmptyPopulation,
    #[error("histogram width {got} does not match {want} classes")]
    HistogramShape { got: usize, want: usize },
}

impl FitnessReport {
    /// Classify raw fitness values.
    pub fn from_values(
        values: &[f64],
        bounds: &[f64],
        source: PopulationSource,
    ) -> Result<Self, ReportError> {
        if values.is_empty() {
            return Err(ReportError::EmptyPopulation);
        }
        let mut counts = vec![0u64; bounds.len() + 1];
        for &v in values {
            counts[classify(v, bounds)] += 1;
        }
        Ok(Self::from_counts(counts, bounds, source))
    }

    /// Aggregate per-generation histograms already computed with the same
    /// bounds.
    pub fn from_run(
        run: &RunResult,
        bounds: &[f64],
        source: PopulationSource,
    ) -> Result<Self, ReportError> {
        match source {
            PopulationSource::FinalGeneration => {
                Self::from_values(&run.final_population_fitness, bounds, source)
            }
            PopulationSource::AllGenerations => {
                let want = bounds.len() + 1;
                let mut counts = vec![0u64; want];
                for s in &run.stats {
                    if s.class_histogram.len() != want {
                        return Err(ReportError::HistogramShape {
                            got: s.class_histogram.len(),
                            want,
                        });
                    }
                    for (acc, c) in counts.iter_mut().zip(&s.class_histogram) {
                        *acc += c;
                    }
                }
                if counts.iter().all(|&c| c == 0) {
                    return Err(ReportError::EmptyPopulation);
                }
                Ok(Self::from_counts(counts, bounds, source))
            }
        }
    }

    fn from_counts(counts: Vec<u64>, bounds: &[f64], source: PopulationSource) -> Self {
        let total: u64 = counts.iter().sum();
        let percentages = counts
            .iter()
            .map(|&c| 100.0 * c as f64 / total as f64)
            .collect();
        FitnessReport {
            class_bounds: bounds.to_vec(),
            counts,
            percentages,
            population_source: source,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Human-readable label for class `i`.
    pub fn class_label(&self, i: usize) -> String {
        if i == 0 {
            format!("0 <= f < {}", self.class_bounds[0])
        } else if i < self.class_bounds.len() {
            format!(
                "{} <= f < {}",
                self.class_bounds[i - 1],
                self.class_bounds[i]
            )
        } else {
            format!("f >= {} (exact hit)", self.class_bounds[i - 1])
        }
    }
}

/// Aggregate outcome of one search method over a set of seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Median over seeds; uncovered runs count as infinite, reported as
    /// None when the median itself is infinite.
    pub median_evaluations_to_coverage: Option<f64>,
    pub best_fitness_per_seed: Vec<f64>,
}

impl MethodSummary {
    pub fn from_runs(runs: &[RunResult]) -> Self {
        let successes = runs.iter().filter(|r| r.covered).count();
        let mut evals: Vec<f64> = runs
            .iter()
            .map(|r| {
                r.evaluations_to_coverage
                    .map(|e| e as f64)
                    .unwrap_or(f64::INFINITY)
            })
            .collect();
        evals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if evals.is_empty() {
            f64::INFINITY
        } else if evals.len() % 2 == 1 {
            evals[evals.len() / 2]
        } else {
            let hi = evals[evals.len() / 2];
            let lo = evals[evals.len() / 2 - 1];
            if hi.is_infinite() {
                // lo + inf averages to inf; report inf unless both finite
                f64::INFINITY
            } else {
                (lo + hi) / 2.0
            }
        };
        MethodSummary {
            runs: runs.len(),
            successes,
            success_rate: successes as f64 / runs.len().max(1) as f64,
            median_evaluations_to_coverage: median.is_finite().then_some(median),
            best_fitness_per_seed: runs.iter().map(|r| r.best_fitness.value).collect(),
        }
    }
}

/// GA vs. random search under equal evaluation budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seeds: Vec<u64>,
    pub budget_per_seed: u64,
    pub ga: MethodSummary,
    pub random: MethodSummary,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_and_percentages() {
        // 38 values near 0.907, one at 0.5, 61 near 0.238
        let mut values = vec![0.9070; 38];
        values.push(0.5);
        values.extend(vec![0.2380; 61]);
        let r =
            FitnessReport::from_values(&values, &[0.3, 0.7, 1.0], PopulationSource::FinalGeneration)
                .unwrap();
        assert_eq!(r.counts, vec![61, 1, 38, 0]);
        assert_eq!(r.percentages, vec![61.0, 1.0, 38.0, 0.0]);
        let sum: f64 = r.percentages.iter().sum();
        assert!((sum - 100.0).abs() <= 0.5);
    }

    #[test]
    fn empty_population_rejected() {
        let err =
            FitnessReport::from_values(&[], &[0.3, 0.7, 1.0], PopulationSource::FinalGeneration)
                .unwrap_err();
        assert_eq!(err, ReportError::EmptyPopulation);
    }

    #[test]
    fn all_covered_goes_to_exact_hit_class() {
        let values = vec![400.0; 10];
        let r =
            FitnessReport::from_values(&values, &[0.3, 0.7, 1.0], PopulationSource::FinalGeneration)
                .unwrap();
        assert_eq!(r.counts, vec![0, 0, 0, 10]);
        assert_eq!(r.percentages[3], 100.0);
    }

    #[test]
    fn labels() {
        let r = FitnessReport::from_values(
            &[0.1],
            &[0.3, 0.7, 1.0],
            PopulationSource::FinalGeneration,
        )
        .unwrap();
        assert_eq!(r.class_label(0), "0 <= f < 0.3");
        assert_eq!(r.class_label(2), "0.7 <= f < 1");
        assert_eq!(r.class_label(3), "f >= 1 (exact hit)");
    }
}
