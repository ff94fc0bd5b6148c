//! Shared test helpers: a seeded generator of random structured programs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generates syntactically valid, definitely-assigned programs with a
/// bounded number of predicates. Deterministic for a fixed seed.
pub struct ProgramGenerator {
    rng: ChaCha8Rng,
    next_var: usize,
    next_label: usize,
}

impl ProgramGenerator {
    pub fn new(seed: u64) -> Self {
        ProgramGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_var: 0,
            next_label: 0,
        }
    }

    /// Produce one program as source text with at most `max_predicates`
    /// if/while statements.
    pub fn generate(&mut self, max_predicates: usize) -> String {
        self.next_var = 0;
        self.next_label = 0;
        let mut out = String::new();
        let inputs = self.rng.gen_range(1..=3);
        let mut defined: Vec<String> = Vec::new();
        for i in 0..inputs {
            let lo = self.rng.gen_range(-100..=0);
            let hi = lo + self.rng.gen_range(1..=200);
            let name = format!("in{i}");
            out.push_str(&format!("input {name} in [{lo}, {hi}];\n"));
            defined.push(name);
        }
        let mut budget = max_predicates;
        self.block(&mut out, 0, &mut budget, &mut defined);
        out
    }

    fn fresh_var(&mut self) -> String {
        let v = format!("v{}", self.next_var);
        self.next_var += 1;
        v
    }

    fn expr(&mut self, depth: usize, defined: &[String]) -> String {
        if depth == 0 || self.rng.gen_bool(0.4) {
            if !defined.is_empty() && self.rng.gen_bool(0.6) {
                defined[self.rng.gen_range(0..defined.len())].clone()
            } else {
                let v: i32 = self.rng.gen_range(-20..=20);
                if v < 0 {
                    format!("({v})")
                } else {
                    v.to_string()
                }
            }
        } else {
            let op = ["+", "-", "*"][self.rng.gen_range(0..3)];
            let lhs = self.expr(depth - 1, defined);
            let rhs = self.expr(depth - 1, defined);
            format!("({lhs} {op} {rhs})")
        }
    }

    fn predicate(&mut self, defined: &[String]) -> String {
        let op = ["<", "<=", ">", ">=", "=", "!="][self.rng.gen_range(0..6)];
        let lhs = self.expr(1, defined);
        let rhs = self.expr(1, defined);
        format!("{lhs} {op} {rhs}")
    }

    fn block(&mut self, out: &mut String, depth: usize, budget: &mut usize, defined: &mut Vec<String>) {
        let statements = self.rng.gen_range(1..=4);
        for _ in 0..statements {
            let can_branch = *budget > 0 && depth < 4;
            let roll: f64 = self.rng.gen();
            if can_branch && roll < 0.25 {
                *budget -= 1;
                let pred = self.predicate(defined);
                out.push_str(&format!("if {pred} {{\n"));
                // definitions inside a branch are not definite afterwards
                let mut inner = defined.clone();
                self.block(out, depth + 1, budget, &mut inner);
                if self.rng.gen_bool(0.5) {
                    out.push_str("} else {\n");
                    let mut inner = defined.clone();
                    self.block(out, depth + 1, budget, &mut inner);
                }
                out.push_str("}\n");
            } else if can_branch && roll < 0.35 {
                *budget -= 1;
                let pred = self.predicate(defined);
                out.push_str(&format!("while {pred} {{\n"));
                let mut inner = defined.clone();
                self.block(out, depth + 1, budget, &mut inner);
                out.push_str("}\n");
            } else if roll < 0.8 {
                let target = if !defined.is_empty() && self.rng.gen_bool(0.3) {
                    defined[self.rng.gen_range(0..defined.len())].clone()
                } else {
                    self.fresh_var()
                };
                let expr = self.expr(2, defined);
                out.push_str(&format!("{target} := {expr};\n"));
                if !defined.contains(&target) {
                    defined.push(target);
                }
            } else {
                let label = format!("r{}", self.next_label);
                self.next_label += 1;
                let expr = self.expr(1, defined);
                out.push_str(&format!("record {label} {expr};\n"));
            }
        }
    }
}
