//! Index-based evaluation plan shared by exact enumeration and sampling.

use crate::distribution::{Distribution, Prob};
use crate::expr::{apply_binary, apply_compare, BinOp, CmpOp, EvalError, Expr};
use crate::scm::{topological_order, Scm};

#[derive(Debug, Clone)]
enum Op {
    Lit(i64),
    Slot(usize),
    Neg(Box<Op>),
    Binary(BinOp, Box<Op>, Box<Op>),
    Compare(CmpOp, Box<Op>, Box<Op>),
    If(Box<Op>, Box<Op>, Box<Op>),
}

impl Op {
    fn eval(&self, slots: &[i64]) -> Result<i64, EvalError> {
        match self {
            Op::Lit(v) => Ok(*v),
            Op::Slot(i) => Ok(slots[*i]),
            Op::Neg(inner) => inner.eval(slots)?.checked_neg().ok_or(EvalError::Overflow),
            Op::Binary(op, a, b) => apply_binary(*op, a.eval(slots)?, b.eval(slots)?),
            Op::Compare(op, a, b) => Ok(apply_compare(*op, a.eval(slots)?, b.eval(slots)?)),
            Op::If(c, t, e) => {
                if c.eval(slots)? != 0 {
                    t.eval(slots)
                } else {
                    e.eval(slots)
                }
            }
        }
    }
}

/// A noise variable that some assignment actually reads.
#[derive(Debug, Clone)]
pub(crate) struct ActiveNoise {
    /// Position in `Scm::noises`; keys the sampling stream.
    pub decl_index: usize,
    pub distribution: Distribution,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledScm {
    pub names: Vec<String>,
    pub ranges: Vec<Vec<i64>>,
    /// Variable indices in topological order.
    order: Vec<usize>,
    ops: Vec<Op>,
    pub noises: Vec<ActiveNoise>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CompileError {
    Cycle(String),
    MissingAssignment(String),
    Unresolved { variable: String, name: String },
}

impl std::fmt::Display for CompileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompileError::Cycle(msg) => f.write_str(msg),
            CompileError::MissingAssignment(v) => write!(f, "variable `{v}` has no assignment"),
            CompileError::Unresolved { variable, name } => {
                write!(f, "assignment of `{variable}` references undeclared `{name}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum RunError {
    Eval { variable: String, error: EvalError },
    OutOfRange { variable: String, value: i64 },
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Eval { variable, error } => {
                write!(f, "assignment of `{variable}` failed: {error}")
            }
            RunError::OutOfRange { variable, value } => {
                write!(f, "assignment of `{variable}` produced {value}, outside its range")
            }
        }
    }
}

impl CompiledScm {
    pub fn new(scm: &Scm) -> Result<Self, CompileError> {
        let order_names = topological_order(scm).map_err(|e| CompileError::Cycle(e.to_string()))?;
        let names: Vec<String> = scm.variable_names().map(str::to_string).collect();
        let ranges = scm.variables().iter().map(|v| v.range.clone()).collect();
        let n = names.len();

        let mut noises: Vec<ActiveNoise> = Vec::new();
        let mut ops = Vec::with_capacity(n);
        for name in &names {
            let a = scm
                .assignment(name)
                .ok_or_else(|| CompileError::MissingAssignment(name.clone()))?;
            let mut resolve = |r: &str| -> Result<usize, CompileError> {
                if let Some(i) = scm.variable_index(r) {
                    return Ok(i);
                }
                let decl_index = scm.noise_index(r).ok_or_else(|| CompileError::Unresolved {
                    variable: name.clone(),
                    name: r.to_string(),
                })?;
                if let Some(j) = noises.iter().position(|nz| nz.decl_index == decl_index) {
                    return Ok(n + j);
                }
                noises.push(ActiveNoise {
                    decl_index,
                    distribution: scm.noises()[decl_index].distribution.clone(),
                });
                Ok(n + noises.len() - 1)
            };
            ops.push(compile_expr(&a.expr, &mut resolve)?);
        }
        let order = order_names
            .iter()
            .map(|o| names.iter().position(|n| n == o).expect("ordered name is declared"))
            .collect();
        Ok(Self {
            names,
            ranges,
            order,
            ops,
            noises,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn slot_count(&self) -> usize {
        self.names.len() + self.noises.len()
    }

    /// Fills the endogenous slots given the noise slots already written.
    pub fn run(&self, slots: &mut [i64]) -> Result<(), RunError> {
        for &i in &self.order {
            let value = self.ops[i].eval(slots).map_err(|error| RunError::Eval {
                variable: self.names[i].clone(),
                error,
            })?;
            if !self.ranges[i].contains(&value) {
                return Err(RunError::OutOfRange {
                    variable: self.names[i].clone(),
                    value,
                });
            }
            slots[i] = value;
        }
        Ok(())
    }

    /// Noise values with positive mass, with their masses, per active noise.
    pub fn positive_noise_support(&self) -> Vec<Vec<(i64, Prob)>> {
        self.noises
            .iter()
            .map(|nz| {
                nz.distribution
                    .iter()
                    .filter(|(_, m)| **m > Prob::from_integer(0.into()))
                    .map(|(v, m)| (v, m.clone()))
                    .collect()
            })
            .collect()
    }
}

fn compile_expr<F>(e: &Expr, resolve: &mut F) -> Result<Op, CompileError>
where
    F: FnMut(&str) -> Result<usize, CompileError>,
{
    Ok(match e {
        Expr::Lit(v) => Op::Lit(*v),
        Expr::Var(name) => Op::Slot(resolve(name)?),
        Expr::Neg(inner) => Op::Neg(Box::new(compile_expr(inner, resolve)?)),
        Expr::Binary { op, lhs, rhs } => Op::Binary(
            *op,
            Box::new(compile_expr(lhs, resolve)?),
            Box::new(compile_expr(rhs, resolve)?),
        ),
        Expr::Compare { op, lhs, rhs } => Op::Compare(
            *op,
            Box::new(compile_expr(lhs, resolve)?),
            Box::new(compile_expr(rhs, resolve)?),
        ),
        Expr::If {
            cond,
            then,
            otherwise,
        } => Op::If(
            Box::new(compile_expr(cond, resolve)?),
            Box::new(compile_expr(then, resolve)?),
            Box::new(compile_expr(otherwise, resolve)?),
        ),
    })
}
