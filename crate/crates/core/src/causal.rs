//! Intervention protocols, causal entropy and causal information gain.
//!
//! Causal entropy of `Y` under a protocol `X'` is the protocol-weighted
//! average of the entropies of `Y`'s post-intervention distributions
//! `p^{do(X = x)}_Y`. Causal information gain is `H(Y)` minus that average. It
//! is not symmetric and can be negative.

use std::collections::BTreeMap;

use num_traits::Signed;
use thiserror::Error;

use crate::distribution::{to_f64, Distribution, Prob};
use crate::inference::{
    entailed_joint_with, interventional_marginals, marginal, EnumerationBudget,
    InferenceError,
};
use crate::info::{entropy, mutual_information, Bits, CompensatedSum};
use crate::par::Execution;
use crate::scm::Scm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CausalError {
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("unknown endogenous variable `{0}`")]
    UnknownVariable(String),
    #[error("protocol for `{variable}` must cover exactly its range {expected:?}, got {found:?}")]
    ProtocolSupport {
        variable: String,
        expected: Vec<i64>,
        found: Vec<i64>,
    },
    #[error("`{0}` cannot be both the intervened variable and the target")]
    TargetIsIntervened(String),
    #[error("variable `{0}` cannot be intervened on (pass the override to allow it)")]
    NonIntervenable(String),
    #[error("candidate list is empty")]
    NoCandidates,
    #[error("no protocol supplied for candidate `{0}`")]
    MissingProtocol(String),
}

/// A distribution over an intervenable variable's range, selecting which
/// atomic interventions are performed and how often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterventionProtocol {
    variable: String,
    distribution: Distribution,
}

impl InterventionProtocol {
    /// Checks that `distribution` covers exactly the declared range of
    /// `variable` (zero masses allowed) and reorders it to range order.
    pub fn new(scm: &Scm, variable: &str, distribution: Distribution) -> Result<Self, CausalError> {
        let range = scm
            .range(variable)
            .ok_or_else(|| CausalError::UnknownVariable(variable.to_string()))?;
        let distribution = distribution
            .reordered(range)
            .ok_or_else(|| CausalError::ProtocolSupport {
                variable: variable.to_string(),
                expected: range.to_vec(),
                found: distribution.support().to_vec(),
            })?;
        Ok(Self {
            variable: variable.to_string(),
            distribution,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn distribution(&self) -> &Distribution {
        &self.distribution
    }
}

/// Uniform protocol over the declared range of `var`.
pub fn uniform_protocol(scm: &Scm, var: &str) -> Result<InterventionProtocol, CausalError> {
    let range = scm
        .range(var)
        .ok_or_else(|| CausalError::UnknownVariable(var.to_string()))?;
    let distribution = Distribution::uniform(range)
        .map_err(|_| CausalError::UnknownVariable(var.to_string()))?;
    InterventionProtocol::new(scm, var, distribution)
}

/// Protocol that intervenes with the observational distribution of `var`.
pub fn observational_protocol(
    scm: &Scm,
    var: &str,
    budget: &EnumerationBudget,
) -> Result<InterventionProtocol, CausalError> {
    if !scm.is_endogenous(var) {
        return Err(CausalError::UnknownVariable(var.to_string()));
    }
    let joint = entailed_joint_with(scm, budget, Execution::default())?;
    InterventionProtocol::new(scm, var, marginal(&joint, var)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CausalOptions {
    pub budget: EnumerationBudget,
    /// Permit hypothetical interventions on variables marked non-intervenable.
    pub allow_nonintervenable: bool,
    pub execution: Execution,
}

/// Causal entropy together with the per-value post-intervention results it
/// was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalBreakdown {
    pub target: String,
    pub protocol: InterventionProtocol,
    /// `(x, p^{do(X=x)}_Y, H(Y | do(X=x)))` for every `x` in the range.
    pub per_value: Vec<(i64, Distribution, Bits)>,
    pub causal_entropy: Bits,
}

fn check_query(
    scm: &Scm,
    target: &str,
    protocol: &InterventionProtocol,
    opts: &CausalOptions,
) -> Result<(), CausalError> {
    if !scm.is_endogenous(target) {
        return Err(CausalError::UnknownVariable(target.to_string()));
    }
    if protocol.variable == target {
        return Err(CausalError::TargetIsIntervened(target.to_string()));
    }
    if !opts.allow_nonintervenable && !scm.is_intervenable(&protocol.variable) {
        return Err(CausalError::NonIntervenable(protocol.variable.clone()));
    }
    let range = scm.range(&protocol.variable).unwrap_or(&[]);
    if protocol.distribution.support() != range {
        return Err(CausalError::ProtocolSupport {
            variable: protocol.variable.clone(),
            expected: range.to_vec(),
            found: protocol.distribution.support().to_vec(),
        });
    }
    Ok(())
}

/// Protocol-weighted average of per-value entropies.
///
/// Weights of values whose post-intervention distributions coincide are
/// summed exactly before the single float multiply, so identical
/// distributions contribute exactly their shared entropy. Groups are visited
/// in ascending order of their first value.
fn weighted_entropy(protocol: &Distribution, per_value: &[(i64, Distribution, Bits)]) -> Bits {
    let mut groups: Vec<(&Distribution, Bits, Prob)> = Vec::new();
    for ((_, dist, h), w) in per_value.iter().zip(protocol.masses()) {
        if !w.is_positive() {
            continue;
        }
        match groups.iter_mut().find(|(d, _, _)| *d == dist) {
            Some(group) => group.2 += w,
            None => groups.push((dist, *h, w.clone())),
        }
    }
    let sum: CompensatedSum = groups
        .into_iter()
        .map(|(_, h, w)| if w == Prob::from_integer(1.into()) { h.0 } else { to_f64(&w) * h.0 })
        .collect();
    Bits(sum.value())
}

pub fn causal_entropy_breakdown(
    scm: &Scm,
    target: &str,
    protocol: &InterventionProtocol,
    opts: &CausalOptions,
) -> Result<CausalBreakdown, CausalError> {
    check_query(scm, target, protocol, opts)?;
    let per_value: Vec<(i64, Distribution, Bits)> =
        interventional_marginals(scm, &protocol.variable, target, &opts.budget, opts.execution)?
            .into_iter()
            .map(|(x, d)| {
                let h = entropy(&d);
                (x, d, h)
            })
            .collect();
    let causal_entropy = weighted_entropy(&protocol.distribution, &per_value);
    Ok(CausalBreakdown {
        target: target.to_string(),
        protocol: protocol.clone(),
        per_value,
        causal_entropy,
    })
}

/// `Hc(target | do(X ~ X'))` where `X'` is `protocol`.
pub fn causal_entropy(
    scm: &Scm,
    target: &str,
    protocol: &InterventionProtocol,
    opts: &CausalOptions,
) -> Result<Bits, CausalError> {
    Ok(causal_entropy_breakdown(scm, target, protocol, opts)?.causal_entropy)
}

/// `Ic(target | do(X ~ X')) = H(target) - Hc(target | do(X ~ X'))`.
pub fn causal_information_gain(
    scm: &Scm,
    target: &str,
    protocol: &InterventionProtocol,
    opts: &CausalOptions,
) -> Result<Bits, CausalError> {
    let hc = causal_entropy(scm, target, protocol, opts)?;
    let joint = entailed_joint_with(scm, &opts.budget, opts.execution)?;
    let h = entropy(&marginal(&joint, target)?);
    Ok(h - hc)
}

/// How [`rank_features`] picks a protocol for each candidate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ProtocolKind {
    #[default]
    Uniform,
    Observational,
    /// One protocol per candidate, keyed by variable name.
    Explicit(BTreeMap<String, InterventionProtocol>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub candidate: String,
    pub protocol: InterventionProtocol,
    pub target_entropy: Bits,
    pub causal_entropy: Bits,
    pub causal_information_gain: Bits,
    pub has_total_effect: bool,
    /// `H(target | do(candidate = x))` for every `x` in range order.
    pub per_value_entropy: Vec<(i64, Bits)>,
    pub mutual_information: Bits,
}

/// Candidates scored against one target, sorted by causal information gain.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalReport {
    pub target: String,
    pub target_entropy: Bits,
    /// Descending causal information gain; ties keep declaration order.
    pub records: Vec<FeatureRecord>,
}

impl CausalReport {
    pub fn causal_order(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.candidate.as_str()).collect()
    }

    /// Candidates by descending mutual information, ties in declaration order.
    pub fn mutual_information_order(&self, scm: &Scm) -> Vec<&str> {
        let mut recs: Vec<&FeatureRecord> = self.records.iter().collect();
        recs.sort_by(|a, b| {
            b.mutual_information
                .0
                .total_cmp(&a.mutual_information.0)
                .then_with(|| scm.variable_index(&a.candidate).cmp(&scm.variable_index(&b.candidate)))
        });
        recs.into_iter().map(|r| r.candidate.as_str()).collect()
    }
}

/// Scores every candidate by causal information gain on `target`, with the
/// mutual information alongside for contrast.
///
/// Candidates marked non-intervenable are rejected unless
/// `opts.allow_nonintervenable` is set.
pub fn rank_features(
    scm: &Scm,
    target: &str,
    candidates: &[String],
    protocol_kind: &ProtocolKind,
    opts: &CausalOptions,
) -> Result<CausalReport, CausalError> {
    if candidates.is_empty() {
        return Err(CausalError::NoCandidates);
    }
    if !scm.is_endogenous(target) {
        return Err(CausalError::UnknownVariable(target.to_string()));
    }
    let joint = entailed_joint_with(scm, &opts.budget, opts.execution)?;
    let target_entropy = entropy(&marginal(&joint, target)?);

    let mut records = Vec::with_capacity(candidates.len());
    for candidate in candidates {
        if !scm.is_endogenous(candidate) {
            return Err(CausalError::UnknownVariable(candidate.clone()));
        }
        let protocol = match protocol_kind {
            ProtocolKind::Uniform => uniform_protocol(scm, candidate)?,
            ProtocolKind::Observational => {
                InterventionProtocol::new(scm, candidate, marginal(&joint, candidate)?)?
            }
            ProtocolKind::Explicit(map) => map
                .get(candidate)
                .cloned()
                .ok_or_else(|| CausalError::MissingProtocol(candidate.clone()))?,
        };
        let breakdown = causal_entropy_breakdown(scm, target, &protocol, opts)?;
        let observed = marginal(&joint, target)?;
        let has_effect = breakdown.per_value.iter().any(|(_, d, _)| *d != observed);
        records.push(FeatureRecord {
            candidate: candidate.clone(),
            protocol,
            target_entropy,
            causal_entropy: breakdown.causal_entropy,
            causal_information_gain: target_entropy - breakdown.causal_entropy,
            has_total_effect: has_effect,
            per_value_entropy: breakdown.per_value.iter().map(|(x, _, h)| (*x, *h)).collect(),
            mutual_information: mutual_information(&joint, candidate, target)?,
        });
    }
    records.sort_by(|a, b| {
        b.causal_information_gain
            .0
            .total_cmp(&a.causal_information_gain.0)
            .then_with(|| scm.variable_index(&a.candidate).cmp(&scm.variable_index(&b.candidate)))
    });
    Ok(CausalReport {
        target: target.to_string(),
        target_entropy,
        records,
    })
}
