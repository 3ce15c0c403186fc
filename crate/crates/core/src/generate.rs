//! Random valid models and protocols, for property tests and benchmarks.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::causal::InterventionProtocol;
use crate::distribution::{Distribution, Prob};
use crate::expr::{BinOp, CmpOp, Expr};
use crate::scm::{Assignment, NoiseDecl, Scm, VariableDecl};

#[derive(Debug, Clone, Copy)]
pub struct RandomScmConfig {
    pub max_variables: usize,
    pub max_range: usize,
    pub max_parents: usize,
    /// Largest integer weight used when drawing rational masses.
    pub max_weight: u32,
}

impl Default for RandomScmConfig {
    fn default() -> Self {
        Self {
            max_variables: 5,
            max_range: 3,
            max_parents: 3,
            max_weight: 6,
        }
    }
}

/// Random positive-sum rational masses for `len` values. Individual masses
/// may be zero when `allow_zero` is set.
pub fn random_masses<R: Rng + ?Sized>(rng: &mut R, len: usize, max_weight: u32, allow_zero: bool) -> Vec<Prob> {
    let low = if allow_zero { 0 } else { 1 };
    let mut weights: Vec<u32> = (0..len).map(|_| rng.random_range(low..=max_weight.max(1))).collect();
    if weights.iter().all(|w| *w == 0) {
        let i = rng.random_range(0..len);
        weights[i] = 1;
    }
    let total: u32 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| Prob::new(BigInt::from(w), BigInt::from(total)))
        .collect()
}

fn random_range<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Vec<i64> {
    if rng.random_bool(0.6) {
        let start = rng.random_range(-1..=1);
        (start..start + size as i64).collect()
    } else {
        let mut pool: Vec<i64> = (-2..=4).collect();
        pool.shuffle(rng);
        pool.truncate(size);
        if rng.random_bool(0.5) {
            pool.sort_unstable();
        }
        pool
    }
}

fn random_noise<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomScmConfig, own_range: &[i64]) -> Distribution {
    match rng.random_range(0..4) {
        0 => {
            let d = rng.random_range(1..=cfg.max_weight.max(1) as i64 + 2);
            let n = rng.random_range(0..=d);
            Distribution::bernoulli(Prob::new(n.into(), d.into())).expect("n <= d")
        }
        1 => {
            let size = rng.random_range(1..=3);
            let mut support: Vec<i64> = (-1..=3).collect();
            support.shuffle(rng);
            support.truncate(size);
            let masses = random_masses(rng, size, cfg.max_weight, true);
            Distribution::new(support, masses).expect("normalised masses")
        }
        2 => Distribution::point(rng.random_range(-1..=2)),
        _ => Distribution::uniform(own_range).expect("non-empty range"),
    }
}

/// A term built around `focus`, sometimes mixed with another input.
fn random_term<R: Rng + ?Sized>(rng: &mut R, focus: &str, inputs: &[String]) -> Expr {
    let v = Expr::var(focus);
    let other = Expr::var(inputs[rng.random_range(0..inputs.len())].clone());
    match rng.random_range(0..8) {
        0 => Expr::binary(BinOp::Mul, Expr::Lit(2), v),
        1 => Expr::binary(BinOp::Mul, v, other),
        2 => {
            let op = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge][rng.random_range(0..6)];
            Expr::compare(op, v, other)
        }
        3 => Expr::if_then_else(
            Expr::compare(CmpOp::Gt, v.clone(), Expr::Lit(rng.random_range(-1..=1))),
            other,
            Expr::binary(BinOp::Add, v, Expr::Lit(1)),
        ),
        4 => Expr::Neg(Box::new(v)),
        _ => v,
    }
}

/// Expression in `inputs` whose value always lies in `range`.
fn random_assignment<R: Rng + ?Sized>(rng: &mut R, inputs: &[String], range: &[i64]) -> Expr {
    if inputs.is_empty() {
        return Expr::Lit(range[rng.random_range(0..range.len())]);
    }
    let mut raw = random_term(rng, &inputs[0], inputs);
    for focus in &inputs[1..] {
        let op = if rng.random_bool(0.7) { BinOp::Add } else { BinOp::Sub };
        raw = Expr::binary(op, raw, random_term(rng, focus, inputs));
    }
    let k = range.len() as i64;
    let index = Expr::binary(BinOp::Mod, raw, Expr::Lit(k));
    let contiguous = range.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous {
        return if range[0] == 0 {
            index
        } else {
            Expr::binary(BinOp::Add, Expr::Lit(range[0]), index)
        };
    }
    // Map index i to range[i] with a chain of conditionals.
    let mut out = Expr::Lit(range[range.len() - 1]);
    for i in (0..range.len() - 1).rev() {
        out = Expr::if_then_else(
            Expr::compare(CmpOp::Eq, index.clone(), Expr::Lit(i as i64)),
            Expr::Lit(range[i]),
            out,
        );
    }
    out
}

/// A random valid model: random DAG, ranges, noise distributions and
/// range-safe assignments.
pub fn random_scm<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomScmConfig) -> Scm {
    let n = rng.random_range(1..=cfg.max_variables.max(1));
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let ranges: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            let max = cfg.max_range.max(1);
            let size = if max > 1 && rng.random_bool(0.9) {
                rng.random_range(2..=max)
            } else {
                rng.random_range(1..=max)
            };
            random_range(rng, size)
        })
        .collect();
    let mut causal_order: Vec<usize> = (0..n).collect();
    causal_order.shuffle(rng);

    let mut noises = Vec::new();
    let mut exprs: Vec<Option<Expr>> = vec![None; n];
    for (k, &v) in causal_order.iter().enumerate() {
        let mut inputs: Vec<String> = causal_order[..k]
            .iter()
            .filter(|_| rng.random_bool(0.75))
            .take(cfg.max_parents)
            .map(|&p| names[p].clone())
            .collect();
        if rng.random_bool(0.8) {
            let noise = format!("N{v}");
            noises.push(NoiseDecl::new(noise.clone(), random_noise(rng, cfg, &ranges[v])));
            inputs.push(noise);
        }
        exprs[v] = Some(random_assignment(rng, &inputs, &ranges[v]));
    }
    if rng.random_bool(0.05) {
        noises.push(NoiseDecl::new("Unused", Distribution::bernoulli(Prob::new(1.into(), 3.into())).unwrap()));
    }

    let variables = names
        .iter()
        .zip(&ranges)
        .map(|(name, r)| VariableDecl::new(name.clone(), r.clone()))
        .collect();
    let mut assignments: Vec<Assignment> = names
        .iter()
        .zip(exprs)
        .map(|(name, e)| Assignment::new(name.clone(), e.expect("every variable assigned")))
        .collect();
    assignments.shuffle(rng);
    let non_intervenable: Vec<String> = names.iter().filter(|_| rng.random_bool(0.1)).cloned().collect();
    Scm::from_parts(variables, noises, assignments, non_intervenable)
}

/// A random protocol over `var`'s range; some values may get zero mass.
pub fn random_protocol<R: Rng + ?Sized>(rng: &mut R, scm: &Scm, var: &str, max_weight: u32) -> InterventionProtocol {
    let range = scm.range(var).expect("variable exists").to_vec();
    let masses = random_masses(rng, range.len(), max_weight, true);
    let d = Distribution::new(range, masses).expect("normalised masses");
    InterventionProtocol::new(scm, var, d).expect("support equals range")
}
