//! Finite probability distributions with exact rational masses.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// An exact probability mass.
pub type Prob = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("distribution has an empty support")]
    EmptySupport,
    #[error("support has {support} values but {masses} masses were given")]
    LengthMismatch { support: usize, masses: usize },
    #[error("value {0} appears more than once in the support")]
    DuplicateValue(i64),
    #[error("mass {mass} for value {value} is negative")]
    NegativeMass { value: i64, mass: String },
    #[error("masses sum to {0}, not 1")]
    NotNormalized(String),
    #[error("bernoulli parameter {0} is outside [0, 1]")]
    BernoulliParameter(String),
}

/// A probability distribution over a finite ordered set of integers.
///
/// Zero masses are allowed and kept; the support is the declared range the
/// distribution lives on, not just the values with positive mass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    support: Vec<i64>,
    masses: Vec<Prob>,
}

impl Distribution {
    pub fn new(support: Vec<i64>, masses: Vec<Prob>) -> Result<Self, DistributionError> {
        if support.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        if support.len() != masses.len() {
            return Err(DistributionError::LengthMismatch {
                support: support.len(),
                masses: masses.len(),
            });
        }
        for (i, v) in support.iter().enumerate() {
            if support[..i].contains(v) {
                return Err(DistributionError::DuplicateValue(*v));
            }
        }
        let mut total = Prob::zero();
        for (v, m) in support.iter().zip(&masses) {
            if m.is_negative() {
                return Err(DistributionError::NegativeMass {
                    value: *v,
                    mass: format_rational(m),
                });
            }
            total += m;
        }
        if !total.is_one() {
            return Err(DistributionError::NotNormalized(format_rational(&total)));
        }
        Ok(Self { support, masses })
    }

    /// Point mass at `value`.
    pub fn point(value: i64) -> Self {
        Self {
            support: vec![value],
            masses: vec![Prob::one()],
        }
    }

    /// Bernoulli distribution on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: Prob) -> Result<Self, DistributionError> {
        if p.is_negative() || p > Prob::one() {
            return Err(DistributionError::BernoulliParameter(format_rational(&p)));
        }
        Ok(Self {
            support: vec![0, 1],
            masses: vec![Prob::one() - &p, p],
        })
    }

    /// Uniform distribution over `values`.
    pub fn uniform(values: &[i64]) -> Result<Self, DistributionError> {
        if values.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        let mass = Prob::new(BigInt::one(), BigInt::from(values.len()));
        Self::new(values.to_vec(), vec![mass; values.len()])
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn masses(&self) -> &[Prob] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Mass of `value`; zero when the value is outside the support.
    pub fn mass(&self, value: i64) -> Prob {
        self.support
            .iter()
            .position(|v| *v == value)
            .map(|i| self.masses[i].clone())
            .unwrap_or_else(Prob::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Prob)> + '_ {
        self.support.iter().copied().zip(self.masses.iter())
    }

    /// Values carrying strictly positive mass, in support order.
    pub fn positive_support(&self) -> impl Iterator<Item = i64> + '_ {
        self.iter().filter(|(_, m)| m.is_positive()).map(|(v, _)| v)
    }

    pub fn is_point_mass(&self) -> bool {
        self.masses.iter().filter(|m| m.is_positive()).count() == 1
    }

    /// True when every value of the support carries the same mass.
    pub fn is_uniform(&self) -> bool {
        self.masses.iter().all(|m| *m == self.masses[0])
    }

    /// Reorders the support to follow `order`. `order` must be a permutation
    /// of the current support.
    pub fn reordered(&self, order: &[i64]) -> Option<Self> {
        if order.len() != self.support.len() {
            return None;
        }
        let mut masses = Vec::with_capacity(order.len());
        for v in order {
            let i = self.support.iter().position(|s| s == v)?;
            masses.push(self.masses[i].clone());
        }
        Some(Self {
            support: order.to_vec(),
            masses,
        })
    }

    /// Builds a distribution from raw masses that are known to be valid.
    pub(crate) fn from_parts_unchecked(support: Vec<i64>, masses: Vec<Prob>) -> Self {
        debug_assert_eq!(support.len(), masses.len());
        Self { support, masses }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, m)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}:{}", format_rational(m))?;
        }
        Ok(())
    }
}

/// Renders a rational as `p/q` in lowest terms, or as a bare integer when the
/// denominator is one.
pub fn format_rational(r: &Prob) -> String {
    // BigRational is always kept reduced with a positive denominator.
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25` into an exact
/// rational. Returns `None` on malformed input or a zero denominator.
pub fn parse_rational(text: &str) -> Option<Prob> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = parse_int(n.trim())?;
        let d = parse_int(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(Prob::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) || (int_digits.is_empty() && int_part.len() > 1) {
            return None;
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut numer: BigInt = digits.parse().ok()?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10u8), frac_part.len());
        return Some(Prob::new(numer, denom));
    }
    parse_int(text).map(Prob::from_integer)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Lossy conversion used only at the logarithm step.
pub(crate) fn to_f64(r: &Prob) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Extremely unbalanced numerator/denominator; fall back to ratio of
        // the leading bits.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}
