//! Expression trees for the right-hand side of structural assignments.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Integer expression over named variables.
///
/// Comparisons evaluate to `1` or `0`; a conditional treats any nonzero
/// condition as true.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(i64),
    Var(String),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    If {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("modulus by zero")]
    ModByZero,
    #[error("negative modulus {0}")]
    NegativeModulus(i64),
    #[error("integer overflow")]
    Overflow,
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn compare(op: CmpOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Compare {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn if_then_else(cond: Expr, then: Expr, otherwise: Expr) -> Self {
        Expr::If {
            cond: Box::new(cond),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    /// Names referenced anywhere in the tree, sorted.
    pub fn references(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(name) => {
                out.insert(name.as_str());
            }
            Expr::Neg(inner) => inner.collect_refs(out),
            Expr::Binary { lhs, rhs, .. } | Expr::Compare { lhs, rhs, .. } => {
                lhs.collect_refs(out);
                rhs.collect_refs(out);
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                cond.collect_refs(out);
                then.collect_refs(out);
                otherwise.collect_refs(out);
            }
        }
    }

    /// Evaluates with variable values supplied by `lookup`.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<i64, EvalError>
    where
        F: Fn(&str) -> Option<i64>,
    {
        match self {
            Expr::Lit(v) => Ok(*v),
            Expr::Var(name) => lookup(name).ok_or_else(|| EvalError::Unbound(name.clone())),
            Expr::Neg(inner) => inner.eval_with(lookup)?.checked_neg().ok_or(EvalError::Overflow),
            Expr::Binary { op, lhs, rhs } => {
                apply_binary(*op, lhs.eval_with(lookup)?, rhs.eval_with(lookup)?)
            }
            Expr::Compare { op, lhs, rhs } => Ok(apply_compare(
                *op,
                lhs.eval_with(lookup)?,
                rhs.eval_with(lookup)?,
            )),
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                if cond.eval_with(lookup)? != 0 {
                    then.eval_with(lookup)
                } else {
                    otherwise.eval_with(lookup)
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::If { .. } => 0,
            Expr::Compare { .. } => 1,
            Expr::Binary {
                op: BinOp::Add | BinOp::Sub,
                ..
            } => 2,
            Expr::Binary { .. } => 3,
            Expr::Neg(_) => 4,
            Expr::Lit(v) if *v < 0 => 4,
            Expr::Lit(_) | Expr::Var(_) => 5,
        }
    }
}

/// Evaluates `expr` against a name-to-value environment.
pub fn eval_expression(expr: &Expr, env: &HashMap<String, i64>) -> Result<i64, EvalError> {
    expr.eval_with(&|name: &str| env.get(name).copied())
}

pub(crate) fn apply_binary(op: BinOp, a: i64, b: i64) -> Result<i64, EvalError> {
    match op {
        BinOp::Add => a.checked_add(b).ok_or(EvalError::Overflow),
        BinOp::Sub => a.checked_sub(b).ok_or(EvalError::Overflow),
        BinOp::Mul => a.checked_mul(b).ok_or(EvalError::Overflow),
        BinOp::Mod => {
            if b == 0 {
                Err(EvalError::ModByZero)
            } else if b < 0 {
                Err(EvalError::NegativeModulus(b))
            } else {
                Ok(a.rem_euclid(b))
            }
        }
    }
}

pub(crate) fn apply_compare(op: CmpOp, a: i64, b: i64) -> i64 {
    let holds = match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
    };
    i64::from(holds)
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "mod",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Mod => 3,
        }
    }
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

// Printing emits the fewest parentheses that re-parse to the same tree.
// A conditional swallows everything to its right, so it is wrapped unless it
// is the whole expression or an else branch.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Lit(v) => write!(f, "{v}"),
        Expr::Var(name) => f.write_str(name),
        Expr::Neg(inner) => {
            f.write_str("-")?;
            // A literal directly after unary minus would fold into a negative
            // literal on re-parse.
            let wrap = !matches!(**inner, Expr::Var(_) | Expr::Neg(_));
            write_child(inner, wrap, f)
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            write_child(lhs, lhs.precedence() < p, f)?;
            write!(f, " {} ", op.symbol())?;
            write_child(rhs, rhs.precedence() <= p, f)
        }
        Expr::Compare { op, lhs, rhs } => {
            write_child(lhs, lhs.precedence() <= 1, f)?;
            write!(f, " {} ", op.symbol())?;
            write_child(rhs, rhs.precedence() <= 1, f)
        }
        Expr::If {
            cond,
            then,
            otherwise,
        } => {
            f.write_str("if ")?;
            write_child(cond, matches!(**cond, Expr::If { .. }), f)?;
            f.write_str(" then ")?;
            write_child(then, matches!(**then, Expr::If { .. }), f)?;
            f.write_str(" else ")?;
            write_expr(otherwise, f)
        }
    }
}

fn write_child(e: &Expr, wrap: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if wrap {
        f.write_str("(")?;
        write_expr(e, f)?;
        f.write_str(")")
    } else {
        write_expr(e, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> HashMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn sum_of_parents() {
        let e = Expr::binary(BinOp::Add, Expr::var("X2"), Expr::var("W"));
        assert_eq!(eval_expression(&e, &env(&[("X2", 1), ("W", 1)])), Ok(2));
    }

    #[test]
    fn flipped_noise() {
        let e = Expr::binary(
            BinOp::Mod,
            Expr::binary(BinOp::Add, Expr::var("N_X"), Expr::Lit(1)),
            Expr::Lit(2),
        );
        assert_eq!(eval_expression(&e, &env(&[("N_X", 1)])), Ok(0));
        assert_eq!(e.to_string(), "(N_X + 1) mod 2");
    }

    #[test]
    fn conditional_on_mediator() {
        // if M == 1 then X else (X + 1) mod 2, at M = 0, X = 1
        let e = Expr::if_then_else(
            Expr::compare(CmpOp::Eq, Expr::var("M"), Expr::Lit(1)),
            Expr::var("X"),
            Expr::binary(
                BinOp::Mod,
                Expr::binary(BinOp::Add, Expr::var("X"), Expr::Lit(1)),
                Expr::Lit(2),
            ),
        );
        assert_eq!(eval_expression(&e, &env(&[("M", 0), ("X", 1)])), Ok(0));
        assert_eq!(eval_expression(&e, &env(&[("M", 1), ("X", 1)])), Ok(1));
        assert_eq!(e.to_string(), "if M == 1 then X else (X + 1) mod 2");
    }

    #[test]
    fn modulus_rules() {
        let m = |a, b| apply_binary(BinOp::Mod, a, b);
        assert_eq!(m(-1, 3), Ok(2));
        assert_eq!(m(7, 3), Ok(1));
        assert_eq!(m(1, 0), Err(EvalError::ModByZero));
        assert_eq!(m(1, -2), Err(EvalError::NegativeModulus(-2)));
        assert_eq!(apply_binary(BinOp::Mul, i64::MAX, 2), Err(EvalError::Overflow));
    }

    #[test]
    fn unbound_variable() {
        let e = Expr::var("Z");
        assert_eq!(
            eval_expression(&e, &HashMap::new()),
            Err(EvalError::Unbound("Z".into()))
        );
    }

    #[test]
    fn comparisons_yield_indicator() {
        let lt = Expr::compare(CmpOp::Lt, Expr::Lit(1), Expr::Lit(2));
        let ge = Expr::compare(CmpOp::Ge, Expr::Lit(1), Expr::Lit(2));
        assert_eq!(eval_expression(&lt, &HashMap::new()), Ok(1));
        assert_eq!(eval_expression(&ge, &HashMap::new()), Ok(0));
    }

    #[test]
    fn printing_parenthesizes_minimally() {
        let e = Expr::binary(
            BinOp::Sub,
            Expr::var("a"),
            Expr::binary(BinOp::Sub, Expr::var("b"), Expr::var("c")),
        );
        assert_eq!(e.to_string(), "a - (b - c)");
        let n = Expr::Neg(Box::new(Expr::Lit(3)));
        assert_eq!(n.to_string(), "-(3)");
        assert_eq!(Expr::Lit(-3).to_string(), "-3");
        let nested = Expr::binary(
            BinOp::Add,
            Expr::if_then_else(Expr::var("a"), Expr::Lit(1), Expr::Lit(2)),
            Expr::Lit(1),
        );
        assert_eq!(nested.to_string(), "(if a then 1 else 2) + 1");
    }
}
