//! Exact entailed and post-intervention distributions.
//!
//! The joint over endogenous variables is built by walking every noise
//! configuration with positive mass, pushing it through the assignments in
//! topological order and adding its mass to the resulting tuple. Masses are
//! accumulated as integers over a common denominator, so the result is exact
//! and independent of summation order.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::compiled::CompiledScm;
use crate::distribution::{Distribution, Prob};
use crate::par::{map_chunks, map_items, Execution};
use crate::scm::{intervene_with_policy, InterventionError, InterventionPolicy, Scm};

const CHUNK: u64 = 4096;

/// Cap on the number of noise configurations enumerated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_states: u64,
}

impl EnumerationBudget {
    pub const DEFAULT_MAX_STATES: u64 = 1 << 24;

    /// Returns `None` when `max_states` is zero.
    pub fn new(max_states: u64) -> Option<Self> {
        (max_states >= 1).then_some(Self { max_states })
    }

    pub fn max_states(&self) -> u64 {
        self.max_states
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_states: Self::DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(
        "noise space has {required} states, over the enumeration budget of {max}; \
         use the sampling estimators instead"
    )]
    BudgetExceeded { required: String, max: u64 },
    #[error("conditional is undefined: evidence {0} has probability zero")]
    UndefinedConditional(String),
    #[error("model is not valid: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Intervention(#[from] InterventionError),
}

/// Exact joint distribution over all endogenous variables.
///
/// Only tuples with positive mass are stored; tuples are ordered by the
/// variables' declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    variables: Vec<String>,
    ranges: Vec<Vec<i64>>,
    entries: BTreeMap<Vec<i64>, Prob>,
}

impl JointTable {
    pub(crate) fn from_entries(variables: Vec<String>, ranges: Vec<Vec<i64>>, entries: BTreeMap<Vec<i64>, Prob>) -> Self {
        Self {
            variables,
            ranges,
            entries,
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn range(&self, var: &str) -> Option<&[i64]> {
        self.index_of(var).map(|i| self.ranges[i].as_slice())
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mass(&self, tuple: &[i64]) -> Prob {
        self.entries.get(tuple).cloned().unwrap_or_else(Prob::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64], &Prob)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn total_mass(&self) -> Prob {
        self.entries.values().fold(Prob::zero(), |acc, m| acc + m)
    }

    fn require(&self, var: &str) -> Result<usize, InferenceError> {
        self.index_of(var)
            .ok_or_else(|| InferenceError::UnknownVariable(var.to_string()))
    }
}

trait Weight: Clone + Send {
    fn unit() -> Self;
    fn times(&self, other: &Self) -> Self;
    fn add(&mut self, other: &Self);
    fn into_big(self) -> BigUint;
}

impl Weight for u128 {
    fn unit() -> Self {
        1
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Weight for BigUint {
    fn unit() -> Self {
        One::one()
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn into_big(self) -> BigUint {
        self
    }
}

/// Exact joint distribution entailed by `scm`.
pub fn entailed_joint(scm: &Scm, budget: &EnumerationBudget) -> Result<JointTable, InferenceError> {
    entailed_joint_with(scm, budget, Execution::default())
}

pub fn entailed_joint_with(
    scm: &Scm,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<JointTable, InferenceError> {
    let plan = CompiledScm::new(scm).map_err(|e| InferenceError::InvalidModel(e.to_string()))?;

    let full_states = plan
        .noises
        .iter()
        .fold(1u128, |acc, nz| acc.saturating_mul(nz.distribution.len() as u128));
    if full_states > u128::from(budget.max_states) {
        return Err(InferenceError::BudgetExceeded {
            required: full_states.to_string(),
            max: budget.max_states,
        });
    }

    // Integer numerators over a per-noise common denominator.
    let support = plan.positive_noise_support();
    let mut denominator = BigUint::one();
    let mut columns: Vec<Vec<(i64, BigUint)>> = Vec::with_capacity(support.len());
    for values in &support {
        let lcm = values
            .iter()
            .fold(BigInt::one(), |acc, (_, m)| acc.lcm(m.denom()));
        let column = values
            .iter()
            .map(|(v, m)| {
                let scaled = (m * Prob::from_integer(lcm.clone())).to_integer();
                (*v, scaled.to_biguint().expect("masses are non-negative"))
            })
            .collect();
        columns.push(column);
        denominator *= lcm.to_biguint().expect("denominators are positive");
    }

    let entries = if denominator.bits() <= 127 {
        let small: Vec<Vec<(i64, u128)>> = columns
            .iter()
            .map(|c| {
                c.iter()
                    .map(|(v, w)| (*v, u128::try_from(w).expect("bounded by denominator")))
                    .collect()
            })
            .collect();
        enumerate(&plan, &small, exec)?
    } else {
        enumerate(&plan, &columns, exec)?
    };

    let denom = BigInt::from(denominator);
    let entries = entries
        .into_iter()
        .map(|(k, w)| (k, Prob::new(BigInt::from(w), denom.clone())))
        .collect();
    Ok(JointTable {
        variables: plan.names.clone(),
        ranges: plan.ranges.clone(),
        entries,
    })
}

fn enumerate<W: Weight + Sync>(
    plan: &CompiledScm,
    columns: &[Vec<(i64, W)>],
    exec: Execution,
) -> Result<BTreeMap<Vec<i64>, BigUint>, InferenceError> {
    let radices: Vec<u64> = columns.iter().map(|c| c.len() as u64).collect();
    let total: u64 = radices.iter().product();
    let n = plan.num_variables();

    let partials = map_chunks(total, CHUNK, exec, |range| {
        let mut local: HashMap<Vec<i64>, W> = HashMap::new();
        let mut slots = vec![0i64; plan.slot_count()];
        // Mixed-radix digits of range.start, last noise fastest.
        let mut digits = vec![0usize; radices.len()];
        let mut rest = range.start;
        for (d, r) in digits.iter_mut().zip(&radices).rev() {
            *d = (rest % r) as usize;
            rest /= r;
        }
        for _ in range {
            let mut weight = W::unit();
            for (j, (&d, column)) in digits.iter().zip(columns).enumerate() {
                slots[n + j] = column[d].0;
                weight = weight.times(&column[d].1);
            }
            plan.run(&mut slots)
                .map_err(|e| InferenceError::InvalidModel(e.to_string()))?;
            let key = slots[..n].to_vec();
            match local.get_mut(&key) {
                Some(acc) => acc.add(&weight),
                None => {
                    local.insert(key, weight);
                }
            }
            for (d, r) in digits.iter_mut().zip(&radices).rev() {
                *d += 1;
                if (*d as u64) < *r {
                    break;
                }
                *d = 0;
            }
        }
        Ok::<_, InferenceError>(local)
    });

    let mut merged: BTreeMap<Vec<i64>, BigUint> = BTreeMap::new();
    for part in partials {
        for (k, w) in part? {
            *merged.entry(k).or_default() += w.into_big();
        }
    }
    merged.retain(|_, w| !w.is_zero());
    Ok(merged)
}

/// Marginal distribution of `var`, over its full declared range.
pub fn marginal(joint: &JointTable, var: &str) -> Result<Distribution, InferenceError> {
    let i = joint.require(var)?;
    let range = &joint.ranges[i];
    let mut masses = vec![Prob::zero(); range.len()];
    for (tuple, m) in joint.iter() {
        let k = range.iter().position(|v| *v == tuple[i]).expect("tuple inside range");
        masses[k] += m;
    }
    Ok(Distribution::from_parts_unchecked(range.clone(), masses))
}

/// Distribution of `target` given that every `(variable, value)` in
/// `evidence` holds.
pub fn conditional(
    joint: &JointTable,
    target: &str,
    evidence: &[(&str, i64)],
) -> Result<Distribution, InferenceError> {
    let t = joint.require(target)?;
    let idx = evidence
        .iter()
        .map(|(v, x)| joint.require(v).map(|i| (i, *x)))
        .collect::<Result<Vec<_>, _>>()?;
    let range = &joint.ranges[t];
    let mut masses = vec![Prob::zero(); range.len()];
    let mut total = Prob::zero();
    for (tuple, m) in joint.iter() {
        if idx.iter().all(|&(i, x)| tuple[i] == x) {
            let k = range.iter().position(|v| *v == tuple[t]).expect("tuple inside range");
            masses[k] += m;
            total += m;
        }
    }
    if total.is_zero() {
        let shown = evidence
            .iter()
            .map(|(v, x)| format!("{v}={x}"))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(InferenceError::UndefinedConditional(shown));
    }
    for m in &mut masses {
        *m /= &total;
    }
    Ok(Distribution::from_parts_unchecked(range.clone(), masses))
}

/// Joint distribution after `do(do_var = do_value)`. The non-intervenable
/// restriction is not applied here; callers at the user boundary enforce it.
pub fn post_intervention_joint(
    scm: &Scm,
    do_var: &str,
    do_value: i64,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<JointTable, InferenceError> {
    let cut = intervene_with_policy(scm, do_var, do_value, InterventionPolicy::AllowNonIntervenable)?;
    entailed_joint_with(&cut, budget, exec)
}

/// `p^{do(do_var = do_value)}` of `target`.
pub fn post_intervention_distribution(
    scm: &Scm,
    do_var: &str,
    do_value: i64,
    target: &str,
    budget: &EnumerationBudget,
) -> Result<Distribution, InferenceError> {
    let joint = post_intervention_joint(scm, do_var, do_value, budget, Execution::default())?;
    marginal(&joint, target)
}

/// Post-intervention distributions of `target` for every value of `var`'s
/// range, in range order.
pub fn interventional_marginals(
    scm: &Scm,
    var: &str,
    target: &str,
    budget: &EnumerationBudget,
    exec: Execution,
) -> Result<Vec<(i64, Distribution)>, InferenceError> {
    let range = scm
        .range(var)
        .ok_or_else(|| InferenceError::UnknownVariable(var.to_string()))?;
    if !scm.is_endogenous(target) {
        return Err(InferenceError::UnknownVariable(target.to_string()));
    }
    map_items(range, exec, |&x| {
        let joint = post_intervention_joint(scm, var, x, budget, exec)?;
        Ok((x, marginal(&joint, target)?))
    })
    .into_iter()
    .collect()
}

/// Whether some atomic intervention on `cause` changes the distribution of
/// `target`. Distributions are compared exactly.
pub fn has_total_effect(
    scm: &Scm,
    cause: &str,
    target: &str,
    budget: &EnumerationBudget,
) -> Result<bool, InferenceError> {
    let observed = marginal(&entailed_joint(scm, budget)?, target)?;
    let per_value = interventional_marginals(scm, cause, target, budget, Execution::default())?;
    Ok(per_value.iter().any(|(_, d)| *d != observed))
}
