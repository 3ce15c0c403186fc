mod common;

use causal_control::generate::{random_protocol, random_scm, RandomScmConfig};
use causal_control::inference::post_intervention_joint;
use causal_control::info::mutual_information_kl;
use causal_control::{
    causal_entropy, causal_information_gain, conditional, conditional_entropy, entailed_joint,
    entailed_joint_with, entropy, has_total_effect, intervene_with_policy, marginal, mutual_information,
    observational_protocol, parse, serialize, validate, CausalOptions, EnumerationBudget, Execution,
    InterventionPolicy, Prob, Scm,
};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(seed: u64) -> (Scm, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scm = random_scm(&mut rng, &RandomScmConfig::default());
    (scm, rng)
}

fn pick<'a>(scm: &'a Scm, rng: &mut ChaCha8Rng) -> &'a str {
    let vars = scm.variables();
    &vars[rng.random_range(0..vars.len())].name
}

fn opts() -> CausalOptions {
    CausalOptions {
        allow_nonintervenable: true,
        ..CausalOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_models_are_valid(seed in any::<u64>()) {
        let (scm, _) = model(seed);
        prop_assert!(validate(&scm).is_valid());
    }

    #[test]
    fn intervention_replaces_one_assignment(seed in any::<u64>()) {
        let (scm, mut rng) = model(seed);
        let before = scm.clone();
        let var = pick(&scm, &mut rng).to_string();
        let range = scm.range(&var).unwrap();
        let value = range[rng.random_range(0..range.len())];
        let cut = intervene_with_policy(&scm, &var, value, InterventionPolicy::AllowNonIntervenable).unwrap();
        prop_assert_eq!(&scm, &before);
        prop_assert!(cut.parents(&var).is_empty());
        prop_assert_eq!(cut.noises(), scm.noises());
        let changed: Vec<&str> = cut
            .assignments()
            .iter()
            .filter(|a| scm.assignment(&a.target) != Some(*a))
            .map(|a| a.target.as_str())
            .collect();
        prop_assert!(changed.is_empty() || changed == vec![var.as_str()]);
        prop_assert!(validate(&cut).is_valid());
        let joint = entailed_joint(&cut, &EnumerationBudget::default()).unwrap();
        prop_assert!(marginal(&joint, &var).unwrap().is_point_mass());
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let (scm, _) = model(seed);
        let text = serialize(&scm);
        prop_assert_eq!(parse(&text).unwrap(), scm, "{}", text);
    }

    #[test]
    fn joint_matches_oracle(seed in any::<u64>()) {
        let (scm, mut rng) = model(seed);
        let budget = EnumerationBudget::default();
        let joint = entailed_joint(&scm, &budget).unwrap();
        prop_assert_eq!(joint.total_mass(), Prob::from_integer(1.into()));
        let oracle = common::joint(&scm, None);
        prop_assert_eq!(joint.len(), oracle.len());
        for (k, m) in joint.iter() {
            prop_assert_eq!(oracle.get(k), Some(m));
        }
        prop_assert_eq!(&entailed_joint_with(&scm, &budget, Execution::Sequential).unwrap(), &joint);

        let var = pick(&scm, &mut rng).to_string();
        let value = scm.range(&var).unwrap()[0];
        let cut = post_intervention_joint(&scm, &var, value, &budget, Execution::Sequential).unwrap();
        let oracle_cut = common::joint(&scm, Some((&var, value)));
        for (k, m) in cut.iter() {
            prop_assert_eq!(oracle_cut.get(k), Some(m));
        }
    }

    #[test]
    fn total_probability(seed in any::<u64>()) {
        let (scm, mut rng) = model(seed);
        let joint = entailed_joint(&scm, &EnumerationBudget::default()).unwrap();
        let x = pick(&scm, &mut rng).to_string();
        let y = pick(&scm, &mut rng).to_string();
        let px = marginal(&joint, &x).unwrap();
        let py = marginal(&joint, &y).unwrap();
        let mut total = vec![Prob::zero(); py.len()];
        for (v, m) in px.iter() {
            if m.is_zero() {
                prop_assert!(conditional(&joint, &y, &[(x.as_str(), v)]).is_err());
                continue;
            }
            let cond = conditional(&joint, &y, &[(x.as_str(), v)]).unwrap();
            for (t, c) in total.iter_mut().zip(cond.masses()) {
                *t += m * c;
            }
        }
        prop_assert_eq!(total.as_slice(), py.masses());
    }

    #[test]
    fn information_identities(seed in any::<u64>()) {
        let (scm, mut rng) = model(seed);
        let joint = entailed_joint(&scm, &EnumerationBudget::default()).unwrap();
        let oracle = common::joint(&scm, None);
        let x = pick(&scm, &mut rng).to_string();
        let y = pick(&scm, &mut rng).to_string();
        let hy = entropy(&marginal(&joint, &y).unwrap()).0;
        let size = scm.range(&y).unwrap().len() as f64;
        prop_assert!(hy >= 0.0 && hy <= size.log2() + 1e-12);
        let hyx = conditional_entropy(&joint, &y, &x).unwrap().0;
        prop_assert!(hyx <= hy + 1e-12);
        prop_assert!((hyx - common::h_given(&scm, &oracle, &y, &x)).abs() <= 1e-9);
        let ixy = mutual_information(&joint, &x, &y).unwrap().0;
        let iyx = mutual_information(&joint, &y, &x).unwrap().0;
        prop_assert!((ixy - iyx).abs() <= 1e-9);
        prop_assert!(ixy >= -1e-9);
        prop_assert!((ixy - mutual_information_kl(&joint, &x, &y).unwrap().0).abs() <= 1e-9);
    }

    #[test]
    fn causal_entropy_matches_oracle(seed in any::<u64>()) {
        let (scm, mut rng) = model(seed);
        prop_assume!(scm.variables().len() >= 2);
        let x = pick(&scm, &mut rng).to_string();
        let y = loop {
            let y = pick(&scm, &mut rng);
            if y != x { break y.to_string(); }
        };
        let protocol = random_protocol(&mut rng, &scm, &x, 6);
        let hc = causal_entropy(&scm, &y, &protocol, &opts()).unwrap().0;
        prop_assert!((hc - common::hc(&scm, &y, &x, protocol.distribution().masses())).abs() <= 1e-9);
        let ic = causal_information_gain(&scm, &y, &protocol, &opts()).unwrap().0;
        let h = entropy(&marginal(&entailed_joint(&scm, &EnumerationBudget::default()).unwrap(), &y).unwrap()).0;
        prop_assert!((ic - (h - hc)).abs() <= 1e-12);
        prop_assert_eq!(
            has_total_effect(&scm, &x, &y, &EnumerationBudget::default()).unwrap(),
            common::total_effect(&scm, &x, &y)
        );
    }

    #[test]
    fn effect_relations(seed in any::<u64>()) {
        let (scm, mut rng) = model(seed);
        let failures = common::invariants::check(&scm, &mut rng);
        prop_assert!(failures.is_empty(), "{:?}\n{}", failures, serialize(&scm));
    }

    #[test]
    fn parentless_cause_bridge(seed in any::<u64>()) {
        let (scm, _) = model(seed);
        let budget = EnumerationBudget::default();
        let joint = entailed_joint(&scm, &budget).unwrap();
        for x in scm.variable_names().filter(|v| scm.parents(v).is_empty()) {
            let p = observational_protocol(&scm, x, &budget).unwrap();
            for y in scm.variable_names().filter(|y| *y != x) {
                let hc = causal_entropy(&scm, y, &p, &opts()).unwrap().0;
                let hyx = conditional_entropy(&joint, y, x).unwrap().0;
                prop_assert!((hc - hyx).abs() <= 1e-9, "{x} {y}");
                let ic = causal_information_gain(&scm, y, &p, &opts()).unwrap().0;
                prop_assert!((ic - mutual_information(&joint, x, y).unwrap().0).abs() <= 1e-9);
            }
        }
    }
}
