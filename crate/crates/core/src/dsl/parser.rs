//! Recursive-descent parser for single statements and expressions.

use num_bigint::BigInt;

use super::lexer::{Tok, Token};
use super::{Diagnostic, DiagnosticKind, Item, NoiseSpec, Position};
use crate::distribution::{parse_rational, Prob};
use crate::expr::{BinOp, CmpOp, Expr};

const MAX_DEPTH: usize = 200;

const RESERVED: &[&str] = &["if", "then", "else", "mod", "in"];

pub(crate) struct LineParser<'a> {
    line: usize,
    line_len: usize,
    tokens: &'a [Token],
    pos: usize,
    depth: usize,
    /// Identifier operands seen so far, with their positions.
    references: Vec<(String, Position)>,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> LineParser<'a> {
    pub fn new(line: usize, line_len: usize, tokens: &'a [Token]) -> Self {
        Self {
            line,
            line_len,
            tokens,
            pos: 0,
            depth: 0,
            references: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.column)
            .unwrap_or(self.line_len + 1)
    }

    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(DiagnosticKind::Syntax, self.line, self.column(), message)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn name(&mut self, what: &str) -> PResult<(String, Position)> {
        let position = Position {
            line: self.line,
            column: self.column(),
        };
        match self.peek() {
            Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, position))
            }
            Some(Tok::Ident(s)) => Err(self.error(format!("`{s}` is reserved and cannot name a {what}"))),
            _ => Err(self.unexpected(&format!("{what} name"))),
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.tokens.len() {
            Err(self.unexpected("end of line"))
        } else {
            Ok(())
        }
    }

    /// Parses a whole line as a single expression.
    pub fn standalone_expr(&mut self) -> PResult<Expr> {
        let e = self.expr()?;
        self.finish()?;
        Ok(e)
    }

    /// Parses one non-empty statement line.
    pub fn statement(&mut self) -> PResult<Item> {
        let item = match self.peek() {
            Some(Tok::Ident(kw)) => match kw.as_str() {
                "var" => {
                    self.pos += 1;
                    let (name, position) = self.name("variable")?;
                    self.expect_keyword("in")?;
                    let range = self.int_set()?;
                    Item::Var {
                        name,
                        range,
                        position,
                    }
                }
                "noise" => {
                    self.pos += 1;
                    let (name, position) = self.name("noise")?;
                    self.expect(Tok::Tilde, "`~`")?;
                    let spec = self.noise_spec()?;
                    Item::Noise {
                        name,
                        spec,
                        position,
                    }
                }
                "assign" => {
                    self.pos += 1;
                    let (name, position) = self.name("variable")?;
                    self.expect(Tok::Define, "`:=`")?;
                    self.references.clear();
                    let expr = self.expr()?;
                    Item::Assign {
                        name,
                        expr,
                        position,
                        references: std::mem::take(&mut self.references),
                    }
                }
                "nonintervenable" => {
                    self.pos += 1;
                    let (name, position) = self.name("variable")?;
                    Item::NonIntervenable { name, position }
                }
                _ => {
                    return Err(self.error(format!(
                        "unknown statement `{kw}`; expected `var`, `noise`, `assign` or `nonintervenable`"
                    )))
                }
            },
            _ => return Err(self.unexpected("a statement keyword")),
        };
        self.finish()?;
        Ok(item)
    }

    fn int_set(&mut self) -> PResult<Vec<i64>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut values = vec![self.int()?];
        while self.eat(&Tok::Comma) {
            values.push(self.int()?);
        }
        self.expect(Tok::RBrace, "`,` or `}`")?;
        Ok(values)
    }

    fn int(&mut self) -> PResult<i64> {
        let col = self.column();
        let negative = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Number(s)) if !s.contains('.') => {
                let s = s.clone();
                self.pos += 1;
                int_literal(&s, negative).ok_or_else(|| {
                    Diagnostic::new(DiagnosticKind::Syntax, self.line, col, "integer literal out of range")
                })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn rational(&mut self) -> PResult<Prob> {
        let col = self.column();
        let negative = self.eat(&Tok::Minus);
        let num = match self.bump() {
            Some(Tok::Number(s)) => s,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a probability such as `1/4` or `0.25`"));
            }
        };
        let mut text = if negative { format!("-{num}") } else { num.clone() };
        if self.eat(&Tok::Slash) {
            match self.bump() {
                Some(Tok::Number(d)) if !d.contains('.') && !num.contains('.') => {
                    text = format!("{text}/{d}");
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("an integer denominator"));
                }
            }
        }
        parse_rational(&text).ok_or_else(|| {
            Diagnostic::new(
                DiagnosticKind::Probability,
                self.line,
                col,
                format!("`{text}` is not a valid probability (zero denominator)"),
            )
        })
    }

    fn noise_spec(&mut self) -> PResult<NoiseSpec> {
        let col = self.column();
        let kind = match self.bump() {
            Some(Tok::Ident(s)) => s,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("a distribution"));
            }
        };
        let at = Position {
            line: self.line,
            column: col,
        };
        let spec = match kind.as_str() {
            "bernoulli" => {
                self.expect(Tok::LParen, "`(`")?;
                let p = self.rational()?;
                self.expect(Tok::RParen, "`)`")?;
                NoiseSpec::Bernoulli(p, at)
            }
            "categorical" => {
                self.expect(Tok::LParen, "`(`")?;
                let mut entries = Vec::new();
                loop {
                    let v = self.int()?;
                    self.expect(Tok::Colon, "`:`")?;
                    let m = self.rational()?;
                    entries.push((v, m));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                NoiseSpec::Categorical(entries, at)
            }
            "point" => {
                self.expect(Tok::LParen, "`(`")?;
                let v = self.int()?;
                self.expect(Tok::RParen, "`)`")?;
                NoiseSpec::Point(v)
            }
            "uniform" => NoiseSpec::Uniform(at),
            other => {
                return Err(Diagnostic::new(
                    DiagnosticKind::Syntax,
                    self.line,
                    col,
                    format!(
                        "unknown distribution `{other}`; expected `bernoulli`, `categorical`, `point` or `uniform`"
                    ),
                ))
            }
        };
        Ok(spec)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.error("expression nests too deeply"))
        } else {
            Ok(())
        }
    }

    /// comparison := sum (cmp-op sum)?
    pub fn expr(&mut self) -> PResult<Expr> {
        self.enter()?;
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Tok::EqEq) => Some(CmpOp::Eq),
            Some(Tok::Ne) => Some(CmpOp::Ne),
            Some(Tok::Lt) => Some(CmpOp::Lt),
            Some(Tok::Le) => Some(CmpOp::Le),
            Some(Tok::Gt) => Some(CmpOp::Gt),
            Some(Tok::Ge) => Some(CmpOp::Ge),
            _ => None,
        };
        let out = match op {
            Some(op) => {
                self.pos += 1;
                let rhs = self.sum()?;
                if matches!(
                    self.peek(),
                    Some(Tok::EqEq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)
                ) {
                    return Err(self.error("comparisons do not chain; add parentheses"));
                }
                Expr::compare(op, lhs, rhs)
            }
            None => lhs,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Ident(s)) if s == "mod" => BinOp::Mod,
                Some(Tok::Slash) => {
                    return Err(self.error("division is not supported; use `mod` or rewrite the assignment"))
                }
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.enter()?;
            // `-` directly followed by a literal is a negative literal.
            if let Some(Tok::Number(_)) = self.peek_at(1) {
                let out = self.int().map(Expr::Lit);
                self.depth -= 1;
                return out;
            }
            self.pos += 1;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().cloned() {
            Some(Tok::Number(s)) => {
                if s.contains('.') {
                    return Err(self.error("expressions are integer-valued; decimal literals are not allowed"));
                }
                self.int().map(Expr::Lit)
            }
            Some(Tok::Ident(s)) if s == "if" => {
                self.pos += 1;
                self.enter()?;
                let cond = self.expr()?;
                self.expect_keyword("then")?;
                let then = self.expr()?;
                self.expect_keyword("else")?;
                let otherwise = self.expr()?;
                self.depth -= 1;
                Ok(Expr::if_then_else(cond, then, otherwise))
            }
            Some(Tok::Ident(s)) if RESERVED.contains(&s.as_str()) => {
                Err(self.unexpected("an operand"))
            }
            Some(Tok::Ident(s)) => {
                let position = Position {
                    line: self.line,
                    column: self.column(),
                };
                self.references.push((s.clone(), position));
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("an operand")),
        }
    }
}

fn int_literal(digits: &str, negative: bool) -> Option<i64> {
    let magnitude: BigInt = digits.parse().ok()?;
    let value = if negative { -magnitude } else { magnitude };
    i64::try_from(value).ok()
}
