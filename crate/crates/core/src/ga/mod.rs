//! Genetic search over binary-encoded input vectors, plus a random-search
//! baseline. Evolution is elitist: the fittest individuals are carried over
//! unchanged, the rest of the mating pool is drawn by fitness-proportionate
//! (roulette-wheel) sampling, then two-point crossover and bitwise mutation
//! produce the next generation.

mod engine;

pub use engine::{evolve, random_search, GenerationStats, Method, RunResult};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitness::{DEFAULT_DELTA, DEFAULT_THRESHOLDS};

fn default_population_size() -> usize {
    100
}
fn default_bits_per_var() -> usize {
    15
}
fn default_pc() -> f64 {
    0.5
}
fn default_pm() -> f64 {
    0.05
}
fn default_elite_count() -> usize {
    2
}
fn default_max_generations() -> usize {
    500
}
fn default_step_limit() -> usize {
    10_000
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_thresholds() -> Vec<f64> {
    DEFAULT_THRESHOLDS.to_vec()
}

/// Run parameters. Defaults: population
/// 100, 15 bits per variable, two-point crossover with pc = 0.5, per-bit
/// mutation pm = 0.05, 500 generations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    #[serde(default = "default_population_size")]
    pub population_size: usize,
    #[serde(default = "default_bits_per_var")]
    pub bits_per_var: usize,
    /// Per-pair crossover probability.
    #[serde(default = "default_pc")]
    pub pc: f64,
    /// Per-bit mutation probability.
    #[serde(default = "default_pm")]
    pub pm: f64,
    #[serde(default = "default_elite_count")]
    pub elite_count: usize,
    #[serde(default = "default_max_generations")]
    pub max_generations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stop as soon as the target is covered instead of spending the whole
    /// generation budget.
    #[serde(default)]
    pub early_stop: bool,
    #[serde(default = "default_step_limit")]
    pub step_limit: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: default_population_size(),
            bits_per_var: default_bits_per_var(),
            pc: default_pc(),
            pm: default_pm(),
            elite_count: default_elite_count(),
            max_generations: default_max_generations(),
            seed: 0,
            early_stop: false,
            step_limit: default_step_limit(),
            delta: default_delta(),
            thresholds: default_thresholds(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("population_size must be positive")]
    EmptyPopulation,
    #[error("bits_per_var must be in 1..=63, got {0}")]
    BitsPerVar(usize),
    #[error("probability {name} = {value} outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("elite_count {elite} must be smaller than population_size {pop}")]
    EliteCount { elite: usize, pop: usize },
    #[error("delta must be positive, got {0}")]
    Delta(f64),
    #[error("thresholds must be strictly increasing")]
    Thresholds,
    #[error("step_limit must be positive")]
    StepLimit,
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population_size == 0 {
            return Err(ConfigError::EmptyPopulation);
        }
        if self.bits_per_var == 0 || self.bits_per_var > 63 {
            return Err(ConfigError::BitsPerVar(self.bits_per_var));
        }
        for (name, value) in [("pc", self.pc), ("pm", self.pm)] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(ConfigError::Probability { name, value });
            }
        }
        if self.elite_count >= self.population_size {
            return Err(ConfigError::EliteCount {
                elite: self.elite_count,
                pop: self.population_size,
            });
        }
        if self.delta <= 0.0 || self.delta.is_nan() {
            return Err(ConfigError::Delta(self.delta));
        }
        if self.thresholds.is_empty() || self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Thresholds);
        }
        if self.step_limit == 0 {
            return Err(ConfigError::StepLimit);
        }
        Ok(())
    }

    /// Parse a TOML run configuration.
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Decode a fixed-width bit group into a value of the inclusive domain
/// [lo, hi]: the bits read as an unsigned big-endian integer u, mapped to
/// `lo + floor(u * (hi - lo + 1) / 2^k)`. Monotone in u, surjective when the
/// domain is no larger than 2^k, and the identity offset when the sizes
/// match.
pub fn decode(bits: &[bool], lo: i64, hi: i64) -> i64 {
    debug_assert!(!bits.is_empty() && bits.len() <= 63);
    debug_assert!(lo <= hi);
    let u = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    let span = (hi as i128) - (lo as i128) + 1;
    let scaled = ((u as i128) * span) >> bits.len();
    lo + scaled as i64
}

/// Uniform random bit string.
pub fn random_bits<R: Rng>(rng: &mut R, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

/// Two-point crossover: with probability pc, draw 0 <= i < j <= L uniformly
/// and swap the segment [i, j) between the parents; otherwise return plain
/// copies.
pub fn two_point_crossover<R: Rng>(
    p1: &[bool],
    p2: &[bool],
    pc: f64,
    rng: &mut R,
) -> (Vec<bool>, Vec<bool>) {
    assert_eq!(p1.len(), p2.len());
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.gen::<f64>() < pc {
        let (i, j) = draw_cut_points(p1.len(), rng);
        for k in i..j {
            std::mem::swap(&mut c1[k], &mut c2[k]);
        }
    }
    (c1, c2)
}

/// Uniform pair of distinct cut points in 0..=len, ordered.
fn draw_cut_points<R: Rng>(len: usize, rng: &mut R) -> (usize, usize) {
    loop {
        let a = rng.gen_range(0..=len);
        let b = rng.gen_range(0..=len);
        if a != b {
            return (a.min(b), a.max(b));
        }
    }
}

/// Flip each bit independently with probability pm.
pub fn mutate<R: Rng>(bits: &[bool], pm: f64, rng: &mut R) -> Vec<bool> {
    bits.iter()
        .map(|&b| if rng.gen::<f64>() < pm { !b } else { b })
        .collect()
}

/// Fitness-proportionate draw: returns an index into `weights` (all
/// positive).
pub fn roulette_pick<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        r -= w;
        if r <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits_of(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn string_of(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[test]
    fn decode_bounds_and_identity() {
        assert_eq!(decode(&[false; 15], 0, 32767), 0);
        assert_eq!(decode(&[true; 15], 0, 32767), 32767);
        // u = 5 under the identity scaling
        let mut five = vec![false; 15];
        five[12] = true;
        five[14] = true;
        assert_eq!(decode(&five, 0, 32767), 5);
    }

    #[test]
    fn decode_stays_in_domain_and_monotone() {
        for k in [1usize, 3, 8] {
            let (lo, hi) = (-7i64, 12i64);
            let mut prev = i64::MIN;
            for u in 0..(1u64 << k) {
                let bits: Vec<bool> = (0..k).rev().map(|i| (u >> i) & 1 == 1).collect();
                let v = decode(&bits, lo, hi);
                assert!((lo..=hi).contains(&v));
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn decode_surjective_when_domain_fits() {
        let k = 5usize;
        let (lo, hi) = (3i64, 20i64);
        let mut seen = std::collections::BTreeSet::new();
        for u in 0..(1u64 << k) {
            let bits: Vec<bool> = (0..k).rev().map(|i| (u >> i) & 1 == 1).collect();
            seen.insert(decode(&bits, lo, hi));
        }
        assert_eq!(seen.len(), (hi - lo + 1) as usize);
    }

    #[test]
    fn crossover_known_cuts() {
        // scan seeds until the cut points (2, 4) come up, then check the
        // exchanged segments exactly
        for seed in 0..10_000u64 {
            let mut probe = ChaCha8Rng::seed_from_u64(seed);
            let _: f64 = probe.gen();
            let (i, j) = draw_cut_points(6, &mut probe);
            if (i, j) == (2, 4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (c1, c2) =
                    two_point_crossover(&bits_of("000000"), &bits_of("111111"), 1.0, &mut rng);
                assert_eq!(string_of(&c1), "001100");
                assert_eq!(string_of(&c2), "110011");
                return;
            }
        }
        panic!("no seed produced cut points (2, 4)");
    }

    #[test]
    fn crossover_pc_zero_copies_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (c1, c2) = two_point_crossover(&bits_of("0101"), &bits_of("1110"), 0.0, &mut rng);
        assert_eq!(string_of(&c1), "0101");
        assert_eq!(string_of(&c2), "1110");
    }

    #[test]
    fn crossover_full_swap_at_outer_cuts() {
        for seed in 0..10_000u64 {
            let mut probe = ChaCha8Rng::seed_from_u64(seed);
            let _: f64 = probe.gen();
            if draw_cut_points(4, &mut probe) == (0, 4) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (c1, c2) =
                    two_point_crossover(&bits_of("0000"), &bits_of("1111"), 1.0, &mut rng);
                assert_eq!(string_of(&c1), "1111");
                assert_eq!(string_of(&c2), "0000");
                return;
            }
        }
        panic!("no seed produced cut points (0, 4)");
    }

    #[test]
    fn mutation_probability_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = bits_of("0110010");
        assert_eq!(mutate(&b, 0.0, &mut rng), b);
        let flipped = mutate(&b, 1.0, &mut rng);
        assert!(flipped.iter().zip(&b).all(|(x, y)| x != y));
    }

    #[test]
    fn mutation_flip_rate_near_pm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = vec![false; 15];
        let mut flips = 0usize;
        let runs = 10_000;
        for _ in 0..runs {
            flips += mutate(&base, 0.05, &mut rng)
                .iter()
                .filter(|&&b| b)
                .count();
        }
        let mean = flips as f64 / runs as f64;
        assert!((mean - 0.75).abs() < 0.75 * 0.05, "mean flips {mean}");
    }

    #[test]
    fn roulette_frequencies_follow_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let weights = [3.0, 1.0];
        let mut counts = [0u32; 2];
        let draws = 40_000;
        for _ in 0..draws {
            counts[roulette_pick(&weights, &mut rng)] += 1;
        }
        // chi-square against 3:1 with 1 dof; 10.83 is the 0.1% point
        let expected = [draws as f64 * 0.75, draws as f64 * 0.25];
        let chi2: f64 = counts
            .iter()
            .zip(&expected)
            .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
            .sum();
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }

    #[test]
    fn config_defaults_follow_settings() {
        let c = GaConfig::default();
        assert_eq!(c.population_size, 100);
        assert_eq!(c.bits_per_var, 15);
        assert_eq!(c.pc, 0.5);
        assert_eq!(c.pm, 0.05);
        assert_eq!(c.max_generations, 500);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_rejects_degenerates() {
        let c = GaConfig {
            population_size: 0,
            ..GaConfig::default()
        };
        assert_eq!(c.validate(), Err(ConfigError::EmptyPopulation));
        let c = GaConfig {
            pm: 1.5,
            ..GaConfig::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::Probability { .. })));
        let c = GaConfig {
            elite_count: 100,
            ..GaConfig::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::EliteCount { .. })));
    }

    #[test]
    fn config_from_toml() {
        let c = GaConfig::from_toml("population_size = 10\npm = 0.01\nseed = 42\n").unwrap();
        assert_eq!(c.population_size, 10);
        assert_eq!(c.pm, 0.01);
        assert_eq!(c.seed, 42);
        assert_eq!(c.bits_per_var, 15);
        assert!(GaConfig::from_toml("no_such_key = 1").is_err());
    }
}
