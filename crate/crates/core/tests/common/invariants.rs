//! Checks of the no-effect and asymmetry relations between total effects,
//! causal entropy and causal information gain on one model.

use causal_control::generate::random_protocol;
use causal_control::{
    causal_entropy, entailed_joint, entropy, has_total_effect, marginal, observational_protocol,
    uniform_protocol, CausalOptions, EnumerationBudget, InterventionProtocol, Scm,
};
use rand::Rng;

pub const TOL: f64 = 1e-9;

/// Which relation a failed check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    NoEffectKeepsEntropy,
    GainImpliesEffect,
    OneWayEntropyChange,
    OneWayGain,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub relation: Relation,
    pub detail: String,
}

/// Uniform, observational and `extra` random protocols for `var`.
pub fn protocols<R: Rng>(scm: &Scm, var: &str, extra: usize, rng: &mut R) -> Vec<InterventionProtocol> {
    let mut out = vec![
        uniform_protocol(scm, var).unwrap(),
        observational_protocol(scm, var, &EnumerationBudget::default()).unwrap(),
    ];
    out.extend((0..extra).map(|_| random_protocol(rng, scm, var, 6)));
    out
}

struct Directed {
    effect: bool,
    target_entropy: f64,
    causal_entropies: Vec<f64>,
}

impl Directed {
    fn gains(&self) -> impl Iterator<Item = f64> + '_ {
        self.causal_entropies.iter().map(|hc| self.target_entropy - hc)
    }
}

fn directed<R: Rng>(scm: &Scm, cause: &str, target: &str, opts: &CausalOptions, rng: &mut R) -> Directed {
    let joint = entailed_joint(scm, &opts.budget).unwrap();
    let target_entropy = entropy(&marginal(&joint, target).unwrap()).0;
    let causal_entropies = protocols(scm, cause, 5, rng)
        .iter()
        .map(|p| causal_entropy(scm, target, p, opts).unwrap().0)
        .collect();
    Directed {
        effect: has_total_effect(scm, cause, target, &opts.budget).unwrap(),
        target_entropy,
        causal_entropies,
    }
}

/// Every violated relation over all pairs of distinct variables.
pub fn check<R: Rng>(scm: &Scm, rng: &mut R) -> Vec<Failure> {
    let opts = CausalOptions {
        allow_nonintervenable: true,
        ..CausalOptions::default()
    };
    let names: Vec<String> = scm.variable_names().map(str::to_string).collect();
    let mut failures = Vec::new();
    let mut fail = |relation, detail: String| failures.push(Failure { relation, detail });

    for (i, x) in names.iter().enumerate() {
        for y in &names[i + 1..] {
            let xy = directed(scm, x, y, &opts, rng);
            let yx = directed(scm, y, x, &opts, rng);
            for (cause, target, d) in [(x, y, &xy), (y, x, &yx)] {
                if !d.effect {
                    for hc in &d.causal_entropies {
                        if (hc - d.target_entropy).abs() > TOL {
                            fail(
                                Relation::NoEffectKeepsEntropy,
                                format!("{cause}->{target}: Hc={hc} H={}", d.target_entropy),
                            );
                        }
                    }
                }
                if d.gains().any(|g| g.abs() > TOL) && !d.effect {
                    fail(Relation::GainImpliesEffect, format!("{cause}->{target}"));
                }
            }
            if xy.gains().any(|g| g.abs() > TOL) && yx.gains().any(|g| g.abs() > TOL) {
                fail(Relation::OneWayEntropyChange, format!("{x}<->{y}"));
            }
            for gx in xy.gains() {
                for gy in yx.gains() {
                    if gx.abs().min(gy.abs()) > TOL {
                        fail(Relation::OneWayGain, format!("{x}<->{y}: {gx} {gy}"));
                    }
                }
            }
        }
    }
    failures
}
