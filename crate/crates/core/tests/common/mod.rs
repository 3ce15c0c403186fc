//! Brute-force reference computations that share no code with the library's
//! inference path: variables are evaluated by memoised recursion over the
//! assignment expressions, interventions override values directly, and
//! entropies are plain float sums.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use causal_control::{Prob, Scm};
use num_traits::{ToPrimitive, Zero};

pub type Joint = BTreeMap<Vec<i64>, Prob>;

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load(name: &str) -> Scm {
    causal_control::parse(&fixture(name)).expect("fixture parses")
}

pub fn rat(n: i64, d: i64) -> Prob {
    Prob::new(n.into(), d.into())
}

fn value(
    scm: &Scm,
    name: &str,
    noise: &HashMap<&str, i64>,
    fixed: Option<(&str, i64)>,
    memo: &RefCell<HashMap<String, i64>>,
) -> Option<i64> {
    if let Some(v) = noise.get(name) {
        return Some(*v);
    }
    if let Some((var, v)) = fixed {
        if var == name {
            return Some(v);
        }
    }
    if let Some(v) = memo.borrow().get(name) {
        return Some(*v);
    }
    let assignment = scm.assignment(name)?;
    let v = assignment
        .expr
        .eval_with(&|n: &str| value(scm, n, noise, fixed, memo))
        .expect("evaluates");
    memo.borrow_mut().insert(name.to_string(), v);
    Some(v)
}

/// Joint over all variables in declaration order, optionally with one
/// variable held fixed.
pub fn joint(scm: &Scm, fixed: Option<(&str, i64)>) -> Joint {
    let noises = scm.noises();
    let mut out = Joint::new();
    let mut digits = vec![0usize; noises.len()];
    loop {
        let mut weight = Prob::from_integer(1.into());
        let mut assignment = HashMap::new();
        for (d, n) in digits.iter().zip(noises) {
            let (v, m) = n.distribution.iter().nth(*d).unwrap();
            weight *= m;
            assignment.insert(n.name.as_str(), v);
        }
        if !weight.is_zero() {
            let memo = RefCell::new(HashMap::new());
            let tuple: Vec<i64> = scm
                .variables()
                .iter()
                .map(|v| value(scm, &v.name, &assignment, fixed, &memo).unwrap())
                .collect();
            *out.entry(tuple).or_insert_with(Prob::zero) += weight;
        }
        let mut i = noises.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < noises[i].distribution.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

pub fn index(scm: &Scm, var: &str) -> usize {
    scm.variables().iter().position(|v| v.name == var).unwrap()
}

/// Marginal masses of `var` in range order.
pub fn marginal(scm: &Scm, joint: &Joint, var: &str) -> Vec<Prob> {
    let i = index(scm, var);
    scm.range(var)
        .unwrap()
        .iter()
        .map(|x| {
            joint
                .iter()
                .filter(|(k, _)| k[i] == *x)
                .fold(Prob::zero(), |acc, (_, m)| acc + m)
        })
        .collect()
}

pub fn h(masses: &[Prob]) -> f64 {
    masses
        .iter()
        .map(|m| m.to_f64().unwrap())
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// `H(target | given)` by summing over positive-mass values of `given`.
pub fn h_given(scm: &Scm, joint: &Joint, target: &str, given: &str) -> f64 {
    let g = index(scm, given);
    let t = index(scm, target);
    let mut total = 0.0;
    for x in scm.range(given).unwrap() {
        let rows: Vec<(&Vec<i64>, &Prob)> = joint.iter().filter(|(k, _)| k[g] == *x).collect();
        let px = rows.iter().fold(Prob::zero(), |acc, (_, m)| acc + *m);
        if px.is_zero() {
            continue;
        }
        let cond: Vec<Prob> = scm
            .range(target)
            .unwrap()
            .iter()
            .map(|y| {
                rows.iter()
                    .filter(|(k, _)| k[t] == *y)
                    .fold(Prob::zero(), |acc, (_, m)| acc + *m)
                    / &px
            })
            .collect();
        total += px.to_f64().unwrap() * h(&cond);
    }
    total
}

pub fn mi(scm: &Scm, joint: &Joint, x: &str, y: &str) -> f64 {
    h(&marginal(scm, joint, y)) - h_given(scm, joint, y, x)
}

/// `Σ_x w(x) H(target | do(var = x))` for protocol masses `w` in range order.
pub fn hc(scm: &Scm, target: &str, var: &str, weights: &[Prob]) -> f64 {
    scm.range(var)
        .unwrap()
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(x, w)| {
            let j = joint(scm, Some((var, *x)));
            w.to_f64().unwrap() * h(&marginal(scm, &j, target))
        })
        .sum()
}

/// Whether some intervention on `var` changes the marginal of `target`.
pub fn total_effect(scm: &Scm, var: &str, target: &str) -> bool {
    let dists: Vec<Vec<Prob>> = scm
        .range(var)
        .unwrap()
        .iter()
        .map(|x| marginal(scm, &joint(scm, Some((var, *x))), target))
        .collect();
    dists.windows(2).any(|w| w[0] != w[1])
}

pub mod fuzz;
pub mod invariants;
