use std::fmt::Write;

use crate::distribution::{format_rational, Distribution};
use crate::scm::Scm;

/// Renders `scm` in the `.scm` format: variables, noises, assignments, then
/// non-intervenable markers, each group in model order. Implicit noises are
/// not written.
pub fn serialize(scm: &Scm) -> String {
    let mut out = String::new();
    for v in scm.variables() {
        let range = v.range.iter().map(i64::to_string).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "var {} in {{{range}}}", v.name);
    }
    for n in scm.noises() {
        let _ = writeln!(out, "noise {} ~ {}", n.name, noise_spec(scm, &n.name, &n.distribution));
    }
    for a in scm.assignments() {
        let _ = writeln!(out, "assign {} := {}", a.target, a.expr);
    }
    for name in scm.non_intervenable() {
        let _ = writeln!(out, "nonintervenable {name}");
    }
    out
}

fn noise_spec(scm: &Scm, name: &str, d: &Distribution) -> String {
    if d.support() == [0, 1] {
        return format!("bernoulli({})", format_rational(&d.masses()[1]));
    }
    if d.len() == 1 {
        return format!("point({})", d.support()[0]);
    }
    if d.is_uniform() && uniform_round_trips(scm, name, d) {
        return "uniform".to_string();
    }
    let entries = d
        .iter()
        .map(|(v, m)| format!("{v}:{}", format_rational(m)))
        .collect::<Vec<_>>()
        .join(", ");
    format!("categorical({entries})")
}

/// `uniform` re-parses to a uniform distribution over the range of the only
/// variable reading the noise; emit it only when that gives back `d`.
fn uniform_round_trips(scm: &Scm, name: &str, d: &Distribution) -> bool {
    let mut readers = scm
        .assignments()
        .iter()
        .filter(|a| a.expr.references().contains(name));
    match (readers.next(), readers.next()) {
        (Some(a), None) => scm.range(&a.target) == Some(d.support()),
        _ => false,
    }
}
