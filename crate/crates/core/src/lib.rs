//! Exact discrete structural causal models with causal information measures.
//!
//! The crate covers the whole pipeline from a textual model to a ranked list
//! of features:
//!
//! - [`scm`]: model types, structural validation and atomic interventions.
//! - [`dsl`]: the line-oriented `.scm` text format and its expression language.
//! - [`inference`]: exact entailed, marginal, conditional and post-intervention
//!   distributions by enumeration over the noise space.
//! - [`info`]: entropy, conditional entropy, mutual information, KL divergence.
//! - [`causal`]: intervention protocols, causal entropy, causal information
//!   gain and feature ranking.
//! - [`sampling`]: seeded forward sampling and plug-in estimators, used as an
//!   independent oracle and as a fallback for large models.
//!
//! Probabilities are exact rationals everywhere; floating point only appears
//! when a logarithm is taken.

pub mod causal;
pub mod distribution;
pub mod dsl;
pub mod expr;
pub mod generate;
pub mod inference;
pub mod info;
pub mod par;
pub mod sampling;
pub mod scm;

mod compiled;

pub use causal::{
    causal_entropy, causal_entropy_breakdown, CausalBreakdown, causal_information_gain, observational_protocol,
    rank_features, uniform_protocol, CausalError, CausalOptions, CausalReport, FeatureRecord,
    InterventionProtocol, ProtocolKind,
};
pub use distribution::{format_rational, parse_rational, Distribution, DistributionError, Prob};
pub use dsl::{parse, parse_document, parse_expression, serialize, Diagnostic, Diagnostics, ScmDocument};
pub use expr::{eval_expression, EvalError, Expr};
pub use inference::{
    conditional, entailed_joint, entailed_joint_with, has_total_effect, interventional_marginals,
    marginal, post_intervention_distribution, post_intervention_joint, EnumerationBudget,
    InferenceError, JointTable,
};
pub use info::{
    conditional_entropy, entropy, kl_divergence, mutual_information, mutual_information_kl, Bits,
    KlError,
};
pub use par::Execution;
pub use sampling::{
    estimate_causal_quantities, estimate_conditional_entropy, estimate_entropy,
    estimate_mutual_information, forward_sample, forward_sample_with, SampleBatch, SamplingError,
};
pub use scm::{
    intervene, intervene_with_policy, topological_order, validate, Assignment, CycleError,
    InterventionPolicy, InterventionError, NoiseDecl, Scm,
    ValidationReport, VariableDecl, Violation,
};
