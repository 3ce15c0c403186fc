//! Structural causal model types, structural validation and atomic
//! interventions.
//!
//! An [`Scm`] is a plain value: it can be built in an invalid state (for
//! example with a cyclic parent graph) so that [`validate`] can describe what
//! is wrong with it. Every other operation in the crate expects a model that
//! validates cleanly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::distribution::Distribution;
use crate::expr::{EvalError, Expr};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableDecl {
    pub name: String,
    pub range: Vec<i64>,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, range: Vec<i64>) -> Self {
        Self {
            name: name.into(),
            range,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NoiseDecl {
    pub name: String,
    pub distribution: Distribution,
}

impl NoiseDecl {
    pub fn new(name: impl Into<String>, distribution: Distribution) -> Self {
        Self {
            name: name.into(),
            distribution,
        }
    }

    /// The noise variable's range is the support of its distribution.
    pub fn range(&self) -> &[i64] {
        self.distribution.support()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub target: String,
    pub expr: Expr,
}

impl Assignment {
    pub fn new(target: impl Into<String>, expr: Expr) -> Self {
        Self {
            target: target.into(),
            expr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scm {
    variables: Vec<VariableDecl>,
    noises: Vec<NoiseDecl>,
    assignments: Vec<Assignment>,
    non_intervenable: BTreeSet<String>,
}

impl Scm {
    /// Assembles a model without checking it. Use [`validate`] before handing
    /// it to inference.
    pub fn from_parts(
        variables: Vec<VariableDecl>,
        noises: Vec<NoiseDecl>,
        assignments: Vec<Assignment>,
        non_intervenable: impl IntoIterator<Item = String>,
    ) -> Self {
        Self {
            variables,
            noises,
            assignments,
            non_intervenable: non_intervenable.into_iter().collect(),
        }
    }

    pub fn variables(&self) -> &[VariableDecl] {
        &self.variables
    }

    pub fn noises(&self) -> &[NoiseDecl] {
        &self.noises
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn non_intervenable(&self) -> &BTreeSet<String> {
        &self.non_intervenable
    }

    pub fn variable_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.variables.iter().map(|v| v.name.as_str())
    }

    pub fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn range(&self, name: &str) -> Option<&[i64]> {
        self.variable(name).map(|v| v.range.as_slice())
    }

    pub fn noise(&self, name: &str) -> Option<&NoiseDecl> {
        self.noises.iter().find(|n| n.name == name)
    }

    pub fn noise_index(&self, name: &str) -> Option<usize> {
        self.noises.iter().position(|n| n.name == name)
    }

    pub fn assignment(&self, target: &str) -> Option<&Assignment> {
        self.assignments.iter().find(|a| a.target == target)
    }

    pub fn is_endogenous(&self, name: &str) -> bool {
        self.variable(name).is_some()
    }

    pub fn is_intervenable(&self, name: &str) -> bool {
        self.is_endogenous(name) && !self.non_intervenable.contains(name)
    }

    /// Endogenous parents of `name`, in declaration order.
    pub fn parents(&self, name: &str) -> Vec<&str> {
        let Some(a) = self.assignment(name) else {
            return Vec::new();
        };
        let refs = a.expr.references();
        self.variable_names().filter(|v| refs.contains(v)).collect()
    }

    /// Noise variable referenced by the assignment of `name`, if any. A
    /// missing reference stands for an implicit point mass at zero.
    pub fn noise_of(&self, name: &str) -> Option<&str> {
        let a = self.assignment(name)?;
        let refs = a.expr.references();
        self.noises
            .iter()
            .map(|n| n.name.as_str())
            .find(|n| refs.contains(n))
    }

    /// Parent edges `(parent, child)` of the causal graph, ordered by child and
    /// then parent declaration order.
    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for v in &self.variables {
            for p in self.parents(&v.name) {
                out.push((p.to_string(), v.name.clone()));
            }
        }
        out
    }

    /// Variables reachable from `name` along parent edges, excluding `name`.
    pub fn descendants(&self, name: &str) -> BTreeSet<String> {
        let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
        for v in &self.variables {
            for p in self.parents(&v.name) {
                children.entry(p).or_default().push(&v.name);
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![name];
        while let Some(n) = stack.pop() {
            for c in children.get(n).into_iter().flatten() {
                if seen.insert(c.to_string()) {
                    stack.push(c);
                }
            }
        }
        seen
    }
}

/// A single structural problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyRange {
        variable: String,
    },
    DuplicateRangeValue {
        variable: String,
        value: i64,
    },
    DuplicateName {
        name: String,
    },
    MissingAssignment {
        variable: String,
    },
    DuplicateAssignment {
        variable: String,
    },
    UnknownAssignmentTarget {
        target: String,
    },
    DanglingReference {
        variable: String,
        name: String,
    },
    MultipleNoises {
        variable: String,
        noises: Vec<String>,
    },
    SharedNoise {
        noise: String,
        variables: Vec<String>,
    },
    UnknownNonIntervenable {
        name: String,
    },
    Cycle {
        members: Vec<String>,
    },
    RangeOverflow {
        variable: String,
        value: i64,
        valuation: Vec<(String, i64)>,
    },
    Evaluation {
        variable: String,
        error: EvalError,
        valuation: Vec<(String, i64)>,
    },
}

impl Violation {
    /// The variable or noise this violation is anchored to.
    pub fn subject(&self) -> &str {
        match self {
            Violation::EmptyRange { variable }
            | Violation::DuplicateRangeValue { variable, .. }
            | Violation::MissingAssignment { variable }
            | Violation::DuplicateAssignment { variable }
            | Violation::DanglingReference { variable, .. }
            | Violation::MultipleNoises { variable, .. }
            | Violation::RangeOverflow { variable, .. }
            | Violation::Evaluation { variable, .. } => variable,
            Violation::DuplicateName { name } | Violation::UnknownNonIntervenable { name } => name,
            Violation::UnknownAssignmentTarget { target } => target,
            Violation::SharedNoise { noise, .. } => noise,
            Violation::Cycle { members } => members.first().map(String::as_str).unwrap_or(""),
        }
    }
}

fn fmt_valuation(valuation: &[(String, i64)]) -> String {
    valuation
        .iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyRange { variable } => write!(f, "variable `{variable}` has an empty range"),
            Violation::DuplicateRangeValue { variable, value } => {
                write!(f, "range of `{variable}` lists {value} twice")
            }
            Violation::DuplicateName { name } => write!(f, "name `{name}` is declared more than once"),
            Violation::MissingAssignment { variable } => {
                write!(f, "variable `{variable}` has no structural assignment")
            }
            Violation::DuplicateAssignment { variable } => {
                write!(f, "variable `{variable}` has more than one structural assignment")
            }
            Violation::UnknownAssignmentTarget { target } => {
                write!(f, "assignment to undeclared variable `{target}`")
            }
            Violation::DanglingReference { variable, name } => {
                write!(f, "assignment of `{variable}` references undeclared `{name}`")
            }
            Violation::MultipleNoises { variable, noises } => write!(
                f,
                "assignment of `{variable}` references more than one noise: {}",
                noises.join(", ")
            ),
            Violation::SharedNoise { noise, variables } => write!(
                f,
                "noise `{noise}` is used by several assignments: {}",
                variables.join(", ")
            ),
            Violation::UnknownNonIntervenable { name } => {
                write!(f, "`{name}` is marked non-intervenable but is not an endogenous variable")
            }
            Violation::Cycle { members } => {
                write!(f, "parent graph has a cycle through {{{}}}", members.join(", "))
            }
            Violation::RangeOverflow {
                variable,
                value,
                valuation,
            } => write!(
                f,
                "assignment of `{variable}` yields {value}, outside its range, at {}",
                fmt_valuation(valuation)
            ),
            Violation::Evaluation {
                variable,
                error,
                valuation,
            } => write!(
                f,
                "assignment of `{variable}` fails ({error}) at {}",
                fmt_valuation(valuation)
            ),
        }
    }
}

/// Outcome of [`validate`]; an empty report means the model is valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of `scm`.
///
/// Range safety is checked exhaustively: each assignment is evaluated on every
/// joint valuation of its referenced variables drawn from their declared
/// ranges (noise ranges are distribution supports).
pub fn validate(scm: &Scm) -> ValidationReport {
    let mut violations = Vec::new();

    let mut seen_names = BTreeSet::new();
    let all_names = scm
        .variables
        .iter()
        .map(|v| &v.name)
        .chain(scm.noises.iter().map(|n| &n.name));
    for name in all_names {
        if !seen_names.insert(name.as_str()) {
            violations.push(Violation::DuplicateName { name: name.clone() });
        }
    }

    for v in &scm.variables {
        if v.range.is_empty() {
            violations.push(Violation::EmptyRange {
                variable: v.name.clone(),
            });
        }
        for (i, value) in v.range.iter().enumerate() {
            if v.range[..i].contains(value) {
                violations.push(Violation::DuplicateRangeValue {
                    variable: v.name.clone(),
                    value: *value,
                });
            }
        }
    }

    let mut assigned: BTreeMap<&str, usize> = BTreeMap::new();
    for a in &scm.assignments {
        if !scm.is_endogenous(&a.target) {
            violations.push(Violation::UnknownAssignmentTarget {
                target: a.target.clone(),
            });
        }
        *assigned.entry(a.target.as_str()).or_default() += 1;
    }
    for v in &scm.variables {
        match assigned.get(v.name.as_str()) {
            None => violations.push(Violation::MissingAssignment {
                variable: v.name.clone(),
            }),
            Some(n) if *n > 1 => violations.push(Violation::DuplicateAssignment {
                variable: v.name.clone(),
            }),
            _ => {}
        }
    }

    let mut noise_users: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut references_ok = BTreeSet::new();
    for a in &scm.assignments {
        let refs = a.expr.references();
        let mut ok = true;
        for r in &refs {
            if scm.variable(r).is_none() && scm.noise(r).is_none() {
                violations.push(Violation::DanglingReference {
                    variable: a.target.clone(),
                    name: r.to_string(),
                });
                ok = false;
            }
        }
        let noises: Vec<&str> = scm
            .noises
            .iter()
            .map(|n| n.name.as_str())
            .filter(|n| refs.contains(n))
            .collect();
        if noises.len() > 1 {
            violations.push(Violation::MultipleNoises {
                variable: a.target.clone(),
                noises: noises.iter().map(|n| n.to_string()).collect(),
            });
            ok = false;
        }
        for n in noises {
            noise_users.entry(n).or_default().push(a.target.clone());
        }
        if ok {
            references_ok.insert(a.target.as_str());
        }
    }
    for (noise, users) in noise_users {
        if users.len() > 1 {
            violations.push(Violation::SharedNoise {
                noise: noise.to_string(),
                variables: users,
            });
        }
    }

    for name in &scm.non_intervenable {
        if !scm.is_endogenous(name) {
            violations.push(Violation::UnknownNonIntervenable { name: name.clone() });
        }
    }

    if let Err(CycleError { members }) = topological_order(scm) {
        for component in members {
            violations.push(Violation::Cycle { members: component });
        }
    }

    for a in &scm.assignments {
        if !references_ok.contains(a.target.as_str()) {
            continue;
        }
        let Some(target) = scm.variable(&a.target) else {
            continue;
        };
        if let Some(v) = check_assignment_range(scm, a, &target.range) {
            violations.push(v);
        }
    }

    ValidationReport { violations }
}

/// Exhausts all valuations of the assignment's inputs; returns the first
/// failure found (in lexicographic valuation order).
fn check_assignment_range(scm: &Scm, a: &Assignment, target_range: &[i64]) -> Option<Violation> {
    let inputs: Vec<(&str, &[i64])> = a
        .expr
        .references()
        .into_iter()
        .map(|r| {
            let range = scm
                .range(r)
                .or_else(|| scm.noise(r).map(NoiseDecl::range))
                .unwrap_or(&[]);
            (r, range)
        })
        .collect();
    if inputs.iter().any(|(_, r)| r.is_empty()) {
        return None;
    }
    let mut cursor = vec![0usize; inputs.len()];
    loop {
        let lookup = |name: &str| {
            inputs
                .iter()
                .position(|(n, _)| *n == name)
                .map(|i| inputs[i].1[cursor[i]])
        };
        let valuation = || -> Vec<(String, i64)> {
            inputs
                .iter()
                .zip(&cursor)
                .map(|((n, r), &i)| (n.to_string(), r[i]))
                .collect()
        };
        match a.expr.eval_with(&lookup) {
            Ok(value) if !target_range.contains(&value) => {
                return Some(Violation::RangeOverflow {
                    variable: a.target.clone(),
                    value,
                    valuation: valuation(),
                });
            }
            Ok(_) => {}
            Err(error) => {
                return Some(Violation::Evaluation {
                    variable: a.target.clone(),
                    error,
                    valuation: valuation(),
                });
            }
        }
        // Odometer step, last input fastest.
        let mut i = inputs.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < inputs[i].1.len() {
                break;
            }
            cursor[i] = 0;
        }
    }
}

/// The parent graph contains at least one cycle. Each entry of `members` is
/// one strongly connected component on a cycle, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parent graph is cyclic: {}", members.iter().map(|c| format!("{{{}}}", c.join(", "))).collect::<Vec<_>>().join(" "))]
pub struct CycleError {
    pub members: Vec<Vec<String>>,
}

/// Endogenous variables ordered so that every variable follows its parents.
/// Ties are broken by declaration order, so the result is deterministic.
pub fn topological_order(scm: &Scm) -> Result<Vec<String>, CycleError> {
    let n = scm.variables.len();
    let parents: Vec<Vec<usize>> = scm
        .variables
        .iter()
        .map(|v| {
            scm.parents(&v.name)
                .into_iter()
                .filter_map(|p| scm.variable_index(p))
                .collect()
        })
        .collect();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        return Ok(order
            .into_iter()
            .map(|i| scm.variables[i].name.clone())
            .collect());
    }

    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|i| graph.add_node(i)).collect();
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            graph.add_edge(nodes[p], nodes[child], ());
        }
    }
    let mut members: Vec<Vec<usize>> = petgraph::algo::tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || parents[graph[scc[0]]].contains(&graph[scc[0]]))
        .map(|scc| {
            let mut idx: Vec<usize> = scc.into_iter().map(|node| graph[node]).collect();
            idx.sort_unstable();
            idx
        })
        .collect();
    members.sort();
    Err(CycleError {
        members: members
            .into_iter()
            .map(|c| c.into_iter().map(|i| scm.variables[i].name.clone()).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterventionError {
    #[error("unknown endogenous variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} is outside the range of `{variable}`")]
    ValueOutOfRange { variable: String, value: i64 },
    #[error("variable `{0}` cannot be intervened on")]
    NonIntervenable(String),
}

/// Whether [`intervene_with_policy`] honours the model's non-intervenable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterventionPolicy {
    #[default]
    RespectRestrictions,
    AllowNonIntervenable,
}

/// Atomic intervention `do(var = value)`.
///
/// The returned model differs from `scm` only in the assignment of `var`,
/// which becomes the constant `value` (an implicit point-mass noise), so `var`
/// loses all its parents. Noise declarations are left untouched.
pub fn intervene(scm: &Scm, var: &str, value: i64) -> Result<Scm, InterventionError> {
    intervene_with_policy(scm, var, value, InterventionPolicy::RespectRestrictions)
}

pub fn intervene_with_policy(
    scm: &Scm,
    var: &str,
    value: i64,
    policy: InterventionPolicy,
) -> Result<Scm, InterventionError> {
    let decl = scm
        .variable(var)
        .ok_or_else(|| InterventionError::UnknownVariable(var.to_string()))?;
    if policy == InterventionPolicy::RespectRestrictions && scm.non_intervenable.contains(var) {
        return Err(InterventionError::NonIntervenable(var.to_string()));
    }
    if !decl.range.contains(&value) {
        return Err(InterventionError::ValueOutOfRange {
            variable: var.to_string(),
            value,
        });
    }
    let mut out = scm.clone();
    for a in out.assignments.iter_mut().filter(|a| a.target == var) {
        a.expr = Expr::Lit(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Prob;
    use crate::expr::BinOp;

    fn bern(n: i64, d: i64) -> Distribution {
        Distribution::bernoulli(Prob::new(n.into(), d.into())).unwrap()
    }

    fn add(a: &str, b: &str) -> Expr {
        Expr::binary(BinOp::Add, Expr::var(a), Expr::var(b))
    }

    pub(crate) fn icecream(y_range: Vec<i64>) -> Scm {
        Scm::from_parts(
            vec![
                VariableDecl::new("X1", vec![0, 1, 2]),
                VariableDecl::new("X2", vec![0, 1]),
                VariableDecl::new("W", vec![0, 1]),
                VariableDecl::new("Y", y_range),
            ],
            vec![
                NoiseDecl::new("N_X1", bern(1, 64)),
                NoiseDecl::new("N_X2", bern(1, 4)),
                NoiseDecl::new("N_W", bern(1, 2)),
            ],
            vec![
                Assignment::new("Y", add("X2", "W")),
                Assignment::new("X1", add("W", "N_X1")),
                Assignment::new("X2", Expr::var("N_X2")),
                Assignment::new("W", Expr::var("N_W")),
            ],
            ["W".to_string()],
        )
    }

    #[test]
    fn icecream_is_valid() {
        let report = validate(&icecream(vec![0, 1, 2]));
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn two_cycle_is_reported() {
        let scm = Scm::from_parts(
            vec![VariableDecl::new("X", vec![0, 1]), VariableDecl::new("Y", vec![0, 1])],
            vec![],
            vec![
                Assignment::new("X", Expr::var("Y")),
                Assignment::new("Y", Expr::var("X")),
            ],
            [],
        );
        let report = validate(&scm);
        assert_eq!(
            report.violations,
            vec![Violation::Cycle {
                members: vec!["X".into(), "Y".into()]
            }]
        );
        assert!(topological_order(&scm).is_err());
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let scm = Scm::from_parts(
            vec![VariableDecl::new("X", vec![0, 1])],
            vec![],
            vec![Assignment::new("X", Expr::var("X"))],
            [],
        );
        assert!(validate(&scm)
            .violations
            .contains(&Violation::Cycle { members: vec!["X".into()] }));
    }

    #[test]
    fn narrowed_outcome_range_overflows() {
        // X2 + W over {0,1} x {0,1}: the only escaping valuation is X2 = 1, W = 1.
        let report = validate(&icecream(vec![0, 1]));
        assert_eq!(
            report.violations,
            vec![Violation::RangeOverflow {
                variable: "Y".into(),
                value: 2,
                valuation: vec![("W".into(), 1), ("X2".into(), 1)],
            }]
        );
    }

    #[test]
    fn structural_problems_are_listed() {
        let scm = Scm::from_parts(
            vec![
                VariableDecl::new("A", vec![0, 0]),
                VariableDecl::new("B", vec![]),
                VariableDecl::new("N", vec![0]),
            ],
            vec![
                NoiseDecl::new("N", Distribution::point(0)),
                NoiseDecl::new("M", Distribution::point(0)),
            ],
            vec![
                Assignment::new("A", add("N", "M")),
                Assignment::new("C", Expr::var("Q")),
            ],
            ["Z".to_string()],
        );
        let report = validate(&scm);
        let has = |pred: &dyn Fn(&Violation) -> bool| report.violations.iter().any(pred);
        assert!(has(&|v| matches!(v, Violation::DuplicateName { name } if name == "N")));
        assert!(has(&|v| matches!(v, Violation::DuplicateRangeValue { value: 0, .. })));
        assert!(has(&|v| matches!(v, Violation::EmptyRange { variable } if variable == "B")));
        assert!(has(&|v| matches!(v, Violation::MissingAssignment { variable } if variable == "B")));
        assert!(has(&|v| matches!(v, Violation::UnknownAssignmentTarget { target } if target == "C")));
        assert!(has(&|v| matches!(v, Violation::DanglingReference { name, .. } if name == "Q")));
        assert!(has(&|v| matches!(v, Violation::UnknownNonIntervenable { name } if name == "Z")));
    }

    #[test]
    fn shared_and_multiple_noises() {
        let scm = Scm::from_parts(
            vec![VariableDecl::new("A", vec![0, 1, 2]), VariableDecl::new("B", vec![0, 1])],
            vec![NoiseDecl::new("N", bern(1, 2)), NoiseDecl::new("M", bern(1, 2))],
            vec![
                Assignment::new("A", add("N", "M")),
                Assignment::new("B", Expr::var("N")),
            ],
            [],
        );
        let report = validate(&scm);
        assert!(report.violations.contains(&Violation::MultipleNoises {
            variable: "A".into(),
            noises: vec!["N".into(), "M".into()],
        }));
        assert!(report.violations.contains(&Violation::SharedNoise {
            noise: "N".into(),
            variables: vec!["A".into(), "B".into()],
        }));
    }

    #[test]
    fn mod_by_zero_surfaces_as_violation() {
        let scm = Scm::from_parts(
            vec![VariableDecl::new("A", vec![0, 1])],
            vec![NoiseDecl::new("N", bern(1, 2))],
            vec![Assignment::new("A", Expr::binary(BinOp::Mod, Expr::Lit(1), Expr::var("N")))],
            [],
        );
        assert!(matches!(
            validate(&scm).violations.as_slice(),
            [Violation::Evaluation { error: EvalError::ModByZero, .. }]
        ));
    }

    #[test]
    fn topological_orders() {
        let order = topological_order(&icecream(vec![0, 1, 2])).unwrap();
        let pos = |n: &str| order.iter().position(|o| o == n).unwrap();
        assert!(pos("W") < pos("X1"));
        assert!(pos("W") < pos("Y"));
        assert!(pos("X2") < pos("Y"));
        // declaration order breaks ties among roots
        assert_eq!(order, vec!["X2", "W", "X1", "Y"]);

        let single = Scm::from_parts(
            vec![VariableDecl::new("A", vec![0])],
            vec![],
            vec![Assignment::new("A", Expr::Lit(0))],
            [],
        );
        assert_eq!(topological_order(&single).unwrap(), vec!["A"]);
    }

    #[test]
    fn intervention_cuts_incoming_edges() {
        let scm = icecream(vec![0, 1, 2]);
        let cut = intervene(&scm, "X1", 2).unwrap();
        assert!(cut.parents("X1").is_empty());
        assert_eq!(cut.noise_of("X1"), None);
        let expected: Vec<_> = scm.edges().into_iter().filter(|(_, c)| c != "X1").collect();
        assert_eq!(cut.edges(), expected);
        assert!(validate(&cut).is_valid());
        // input untouched
        assert_eq!(scm.parents("X1"), vec!["W"]);
    }

    #[test]
    fn intervention_errors() {
        let scm = icecream(vec![0, 1, 2]);
        assert_eq!(
            intervene(&scm, "W", 1),
            Err(InterventionError::NonIntervenable("W".into()))
        );
        assert_eq!(
            intervene(&scm, "X2", 5),
            Err(InterventionError::ValueOutOfRange {
                variable: "X2".into(),
                value: 5
            })
        );
        assert_eq!(
            intervene(&scm, "N_W", 0),
            Err(InterventionError::UnknownVariable("N_W".into()))
        );
        assert!(intervene_with_policy(&scm, "W", 1, InterventionPolicy::AllowNonIntervenable).is_ok());
    }

    #[test]
    fn descendants_follow_edges() {
        let scm = icecream(vec![0, 1, 2]);
        let d = scm.descendants("W");
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec!["X1", "Y"]);
        assert!(scm.descendants("Y").is_empty());
    }
}
