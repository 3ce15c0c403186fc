//! The `.scm` text format.
//!
//! One statement per line, `#` starts a comment:
//!
//! ```text
//! var X1 in {0, 1, 2}
//! noise N_X1 ~ bernoulli(1/64)
//! noise N ~ categorical(0:1/2, 3:1/2)
//! noise P ~ point(0)
//! noise U ~ uniform
//! assign X1 := W + N_X1
//! nonintervenable W
//! ```
//!
//! Declarations may appear in any order. A `uniform` noise takes its range
//! from the variable whose assignment reads it. Assignments that read no
//! noise get an implicit point mass at zero.

mod lexer;
mod parser;
mod serialize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use serialize::serialize;

use crate::distribution::{Distribution, DistributionError, Prob};
use crate::expr::Expr;
use crate::scm::{validate, Assignment, NoiseDecl, Scm, VariableDecl, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    UnknownIdentifier,
    Duplicate,
    Probability,
    Validation,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::Lexical => "lexical error",
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::UnknownIdentifier => "unknown identifier",
            DiagnosticKind::Duplicate => "duplicate declaration",
            DiagnosticKind::Probability => "invalid probability",
            DiagnosticKind::Validation => "invalid model",
        })
    }
}

/// A positioned problem in a model file. Lines and columns start at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            kind,
            line,
            column,
            message: message.into(),
        }
    }

    fn at(kind: DiagnosticKind, pos: Position, message: impl Into<String>) -> Self {
        Self::new(kind, pos.line, pos.column, message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind, self.message)
    }
}

/// One or more diagnostics, sorted by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    /// True when every diagnostic comes from structural validation rather
    /// than from reading the text.
    pub fn is_validation_only(&self) -> bool {
        self.0.iter().all(|d| d.kind == DiagnosticKind::Validation)
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoiseSpec {
    Bernoulli(Prob, Position),
    Categorical(Vec<(i64, Prob)>, Position),
    Point(i64),
    Uniform(Position),
}

/// A statement or comment line, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Var {
        name: String,
        range: Vec<i64>,
        position: Position,
    },
    Noise {
        name: String,
        spec: NoiseSpec,
        position: Position,
    },
    Assign {
        name: String,
        expr: Expr,
        position: Position,
        /// Every identifier operand of `expr` where it occurs.
        references: Vec<(String, Position)>,
    },
    NonIntervenable {
        name: String,
        position: Position,
    },
    Comment {
        line: usize,
        text: String,
    },
}

/// A parsed model file: its items in order and the model they describe.
///
/// The model has resolved names and checked probabilities but has not been
/// through [`validate`]; use [`ScmDocument::violations`] for that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScmDocument {
    pub items: Vec<Item>,
    scm: Scm,
}

impl ScmDocument {
    pub fn scm(&self) -> &Scm {
        &self.scm
    }

    pub fn into_scm(self) -> Scm {
        self.scm
    }

    fn declaration(&self, name: &str) -> Option<Position> {
        self.items.iter().find_map(|item| match item {
            Item::Var { name: n, position, .. } | Item::Noise { name: n, position, .. } if n == name => {
                Some(*position)
            }
            _ => None,
        })
    }

    fn assignment(&self, name: &str) -> Option<Position> {
        self.items.iter().find_map(|item| match item {
            Item::Assign { name: n, position, .. } if n == name => Some(*position),
            _ => None,
        })
    }

    /// Where a violation is best reported: the assignment of the offending
    /// variable when there is one, otherwise its declaration.
    pub fn position_of(&self, v: &Violation) -> Position {
        let subject = v.subject();
        let preferred = match v {
            Violation::EmptyRange { .. }
            | Violation::DuplicateRangeValue { .. }
            | Violation::MissingAssignment { .. }
            | Violation::DuplicateName { .. }
            | Violation::SharedNoise { .. } => self.declaration(subject),
            Violation::UnknownNonIntervenable { .. } => self.items.iter().find_map(|item| match item {
                Item::NonIntervenable { name, position } if name == subject => Some(*position),
                _ => None,
            }),
            _ => self.assignment(subject),
        };
        preferred
            .or_else(|| self.assignment(subject))
            .or_else(|| self.declaration(subject))
            .unwrap_or(Position { line: 1, column: 1 })
    }

    /// Structural violations of the model, each with a source position.
    pub fn violations(&self) -> Vec<(Position, Violation)> {
        validate(&self.scm)
            .violations
            .into_iter()
            .map(|v| (self.position_of(&v), v))
            .collect()
    }
}

/// Parses a single-line expression such as `(N_X + 1) mod 2`.
pub fn parse_expression(text: &str) -> Result<Expr, Diagnostic> {
    if text.contains('\n') {
        return Err(Diagnostic::new(DiagnosticKind::Syntax, 1, 1, "expression must fit on one line"));
    }
    let lexed = lexer::lex_line(1, text)?;
    parser::LineParser::new(1, text.chars().count(), &lexed.tokens).standalone_expr()
}

/// Reads the items of `text` and resolves names and distributions.
pub fn parse_document(text: &str) -> Result<ScmDocument, Diagnostics> {
    let mut items = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let lexed = match lexer::lex_line(line_no, line) {
            Ok(l) => l,
            Err(d) => {
                errors.push(d);
                continue;
            }
        };
        if !lexed.tokens.is_empty() {
            let mut p = parser::LineParser::new(line_no, line.chars().count(), &lexed.tokens);
            match p.statement() {
                Ok(item) => items.push(item),
                Err(d) => errors.push(d),
            }
        }
        if let Some(text) = lexed.comment {
            items.push(Item::Comment { line: line_no, text });
        }
    }
    if !errors.is_empty() {
        return Err(Diagnostics(errors));
    }
    resolve(items)
}

/// Parses and validates a model. Any structural violation is reported as a
/// positioned diagnostic.
pub fn parse(text: &str) -> Result<Scm, Diagnostics> {
    let doc = parse_document(text)?;
    let violations = doc.violations();
    if violations.is_empty() {
        return Ok(doc.into_scm());
    }
    let mut diags: Vec<Diagnostic> = violations
        .into_iter()
        .map(|(pos, v)| Diagnostic::at(DiagnosticKind::Validation, pos, v.to_string()))
        .collect();
    diags.sort_by_key(|d| (d.line, d.column));
    Err(Diagnostics(diags))
}

fn resolve(items: Vec<Item>) -> Result<ScmDocument, Diagnostics> {
    let mut errors = Vec::new();
    let mut declared: BTreeMap<&str, Position> = BTreeMap::new();
    let mut vars: BTreeMap<&str, &[i64]> = BTreeMap::new();
    let mut noises: BTreeSet<&str> = BTreeSet::new();

    for item in &items {
        let (name, position) = match item {
            Item::Var { name, position, range } => {
                vars.insert(name, range);
                (name, position)
            }
            Item::Noise { name, position, .. } => {
                noises.insert(name);
                (name, position)
            }
            _ => continue,
        };
        if let Some(first) = declared.get(name.as_str()) {
            errors.push(Diagnostic::at(
                DiagnosticKind::Duplicate,
                *position,
                format!("`{name}` is already declared at line {}", first.line),
            ));
        } else {
            declared.insert(name, *position);
        }
    }

    let mut assigned: BTreeMap<&str, Position> = BTreeMap::new();
    let mut readers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut flagged: BTreeSet<&str> = BTreeSet::new();
    for item in &items {
        match item {
            Item::Assign {
                name,
                expr,
                position,
                references,
            } => {
                if !vars.contains_key(name.as_str()) {
                    let what = if noises.contains(name.as_str()) {
                        "is a noise variable and cannot be assigned"
                    } else {
                        "is not a declared variable"
                    };
                    errors.push(Diagnostic::at(
                        DiagnosticKind::UnknownIdentifier,
                        *position,
                        format!("`{name}` {what}"),
                    ));
                }
                if let Some(first) = assigned.insert(name, *position) {
                    errors.push(Diagnostic::at(
                        DiagnosticKind::Duplicate,
                        *position,
                        format!("`{name}` is already assigned at line {}", first.line),
                    ));
                }
                for r in expr.references() {
                    if noises.contains(r) {
                        readers.entry(r).or_default().push(name);
                    } else if !vars.contains_key(r) {
                        let at = references
                            .iter()
                            .find(|(n, _)| n == r)
                            .map_or(*position, |(_, p)| *p);
                        errors.push(Diagnostic::at(
                            DiagnosticKind::UnknownIdentifier,
                            at,
                            format!("assignment of `{name}` references undeclared `{r}`"),
                        ));
                    }
                }
            }
            Item::NonIntervenable { name, position } => {
                if !vars.contains_key(name.as_str()) {
                    errors.push(Diagnostic::at(
                        DiagnosticKind::UnknownIdentifier,
                        *position,
                        format!("`{name}` is not a declared variable"),
                    ));
                }
                if !flagged.insert(name) {
                    errors.push(Diagnostic::at(
                        DiagnosticKind::Duplicate,
                        *position,
                        format!("`{name}` is already marked non-intervenable"),
                    ));
                }
            }
            _ => {}
        }
    }

    let mut noise_decls = Vec::new();
    for item in &items {
        let Item::Noise { name, spec, .. } = item else {
            continue;
        };
        let built = match spec {
            NoiseSpec::Bernoulli(p, at) => Distribution::bernoulli(p.clone()).map_err(|e| (e, *at)),
            NoiseSpec::Categorical(entries, at) => {
                let (support, masses): (Vec<i64>, Vec<Prob>) = entries.iter().cloned().unzip();
                Distribution::new(support, masses).map_err(|e| (e, *at))
            }
            NoiseSpec::Point(v) => Ok(Distribution::point(*v)),
            NoiseSpec::Uniform(at) => match readers.get(name.as_str()).map(Vec::as_slice) {
                Some([reader]) => match vars.get(reader) {
                    Some(range) => Distribution::uniform(range).map_err(|e| (e, *at)),
                    None => continue,
                },
                Some(_) => {
                    errors.push(Diagnostic::at(
                        DiagnosticKind::Syntax,
                        *at,
                        format!("uniform noise `{name}` is read by several assignments; its range is ambiguous"),
                    ));
                    continue;
                }
                None => {
                    errors.push(Diagnostic::at(
                        DiagnosticKind::Syntax,
                        *at,
                        format!(
                            "uniform noise `{name}` is not read by any assignment, so it has no range; \
                             use `categorical` instead"
                        ),
                    ));
                    continue;
                }
            },
        };
        match built {
            Ok(d) => noise_decls.push(NoiseDecl::new(name.clone(), d)),
            Err((e, at)) => errors.push(probability_error(e, at, name)),
        }
    }

    if !errors.is_empty() {
        errors.sort_by_key(|d| (d.line, d.column));
        return Err(Diagnostics(errors));
    }

    let mut variables = Vec::new();
    let mut assignments = Vec::new();
    let mut non_intervenable = Vec::new();
    for item in &items {
        match item {
            Item::Var { name, range, .. } => variables.push(VariableDecl::new(name.clone(), range.clone())),
            Item::Assign { name, expr, .. } => assignments.push(Assignment::new(name.clone(), expr.clone())),
            Item::NonIntervenable { name, .. } => non_intervenable.push(name.clone()),
            _ => {}
        }
    }
    let scm = Scm::from_parts(variables, noise_decls, assignments, non_intervenable);
    Ok(ScmDocument { items, scm })
}

fn probability_error(e: DistributionError, at: Position, name: &str) -> Diagnostic {
    let message = match &e {
        DistributionError::BernoulliParameter(p) => {
            format!("bernoulli parameter {p} of `{name}` is outside [0, 1]")
        }
        DistributionError::NotNormalized(total) => {
            format!("probabilities of `{name}` sum to {total}, not 1")
        }
        DistributionError::NegativeMass { value, mass } => {
            format!("mass {mass} for value {value} of `{name}` is negative")
        }
        other => format!("distribution of `{name}`: {other}"),
    };
    let kind = match e {
        DistributionError::DuplicateValue(_) => DiagnosticKind::Duplicate,
        _ => DiagnosticKind::Probability,
    };
    Diagnostic::at(kind, at, message)
}
