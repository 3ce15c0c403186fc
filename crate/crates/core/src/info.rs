//! Entropy, conditional entropy, mutual information and KL divergence, in bits.
//!
//! Inputs are exact; floats enter only when a mass is fed to `log2`. Sums use
//! Neumaier compensation and treat `0 log 0` as zero.

use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::distribution::{to_f64, Distribution, Prob};
use crate::inference::{conditional, marginal, InferenceError, JointTable};

/// An information quantity in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Bits(pub f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for Bits {
    type Output = Bits;
    fn add(self, rhs: Bits) -> Bits {
        Bits(self.0 + rhs.0)
    }
}

impl Sub for Bits {
    type Output = Bits;
    fn sub(self, rhs: Bits) -> Bits {
        Bits(self.0 - rhs.0)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*} bit", p, self.0),
            None => write!(f, "{} bit", self.0),
        }
    }
}

/// Neumaier-compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `-Σ p(x) log2 p(x)` over the positive-mass values.
pub fn entropy(p: &Distribution) -> Bits {
    let sum: CompensatedSum = p
        .masses()
        .iter()
        .filter(|m| m.is_positive())
        .map(|m| {
            let x = to_f64(m);
            -x * x.log2()
        })
        .collect();
    // Rounding can leave -0.0 or a hair below zero for a point mass.
    Bits(sum.value().max(0.0))
}

/// `H(target | given) = Σ_x p(x) H(target | given = x)`.
pub fn conditional_entropy(joint: &JointTable, target: &str, given: &str) -> Result<Bits, InferenceError> {
    let given_dist = marginal(joint, given)?;
    let mut sum = CompensatedSum::default();
    for (x, px) in given_dist.iter().filter(|(_, m)| m.is_positive()) {
        let slice = conditional(joint, target, &[(given, x)])?;
        sum.add(to_f64(px) * entropy(&slice).0);
    }
    Ok(Bits(sum.value().max(0.0)))
}

/// Mutual information as entropy reduction, `H(y) - H(y | x)`.
///
/// Debug builds also evaluate the KL form and check agreement within 1e-9.
pub fn mutual_information(joint: &JointTable, x: &str, y: &str) -> Result<Bits, InferenceError> {
    let hy = entropy(&marginal(joint, y)?);
    let hy_given_x = conditional_entropy(joint, y, x)?;
    let mi = hy - hy_given_x;
    debug_assert!(
        (mi.0 - mutual_information_kl(joint, x, y)?.0).abs() <= 1e-9,
        "entropy-reduction and KL forms of I({x};{y}) disagree"
    );
    Ok(mi)
}

/// Mutual information as the KL divergence between `p(x, y)` and
/// `p(x) p(y)`.
pub fn mutual_information_kl(joint: &JointTable, x: &str, y: &str) -> Result<Bits, InferenceError> {
    let px = marginal(joint, x)?;
    let py = marginal(joint, y)?;
    let ix = joint.index_of(x).expect("checked by marginal");
    let iy = joint.index_of(y).expect("checked by marginal");
    let mut pair: std::collections::BTreeMap<(i64, i64), Prob> = Default::default();
    for (tuple, m) in joint.iter() {
        *pair.entry((tuple[ix], tuple[iy])).or_insert_with(Prob::zero) += m;
    }
    let sum: CompensatedSum = pair
        .into_iter()
        .filter(|(_, m)| m.is_positive())
        .map(|((a, b), m)| {
            let ratio = &m / (px.mass(a) * py.mass(b));
            to_f64(&m) * to_f64(&ratio).log2()
        })
        .collect();
    Ok(Bits(sum.value()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlError {
    #[error("distributions are defined on different supports")]
    SupportMismatch,
    #[error("divergence is infinite: p({0}) > 0 but q({0}) = 0")]
    Infinite(i64),
}

/// `Σ p(x) log2(p(x) / q(x))`, with `0 log(0/q) = 0`.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<Bits, KlError> {
    if p.support() != q.support() {
        return Err(KlError::SupportMismatch);
    }
    let mut sum = CompensatedSum::default();
    for ((v, pm), qm) in p.iter().zip(q.masses()) {
        if pm.is_zero() {
            continue;
        }
        if qm.is_zero() {
            return Err(KlError::Infinite(v));
        }
        sum.add(to_f64(pm) * to_f64(&(pm / qm)).log2());
    }
    Ok(Bits(sum.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Prob {
        Prob::new(n.into(), d.into())
    }

    fn dist(support: Vec<i64>, masses: &[(i64, i64)]) -> Distribution {
        Distribution::new(support, masses.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Distribution::bernoulli(rat(1, 2)).unwrap()), Bits(1.0));
        assert_eq!(entropy(&Distribution::point(3)), Bits(0.0));
        let y = dist(vec![0, 1, 2], &[(3, 8), (1, 2), (1, 8)]);
        let expected = 2.0 - 0.375 * 3f64.log2();
        assert!((entropy(&y).0 - expected).abs() < 1e-12);
        // zero-mass values are ignored
        let z = dist(vec![0, 1, 2], &[(1, 2), (1, 2), (0, 1)]);
        assert_eq!(entropy(&z), Bits(1.0));
    }

    #[test]
    fn kl_examples() {
        let half = Distribution::bernoulli(rat(1, 2)).unwrap();
        let quarter = Distribution::bernoulli(rat(1, 4)).unwrap();
        assert_eq!(kl_divergence(&half, &half), Ok(Bits(0.0)));
        // two-term hand sum: 0.5 log2(0.5 / 0.75) + 0.5 log2(0.5 / 0.25)
        let hand = 0.5 * (2.0f64 / 3.0).log2() + 0.5 * 2.0f64.log2();
        let kl = kl_divergence(&half, &quarter).unwrap().0;
        assert!((kl - hand).abs() < 1e-12);
        assert!((kl - 0.2075).abs() < 1e-4);

        let p0 = Distribution::bernoulli(rat(0, 1)).unwrap();
        assert_eq!(kl_divergence(&p0, &p0), Ok(Bits(0.0)));
        assert_eq!(kl_divergence(&half, &p0), Err(KlError::Infinite(1)));
        assert_eq!(
            kl_divergence(&half, &Distribution::uniform(&[0, 1, 2]).unwrap()),
            Err(KlError::SupportMismatch)
        );
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let values = [1.0, 1e-16, 1e-16, 1e-16, 1e-16];
        let s: CompensatedSum = values.iter().copied().collect();
        assert_eq!(s.value(), 1.0 + 4e-16);
    }

    #[test]
    fn bits_display() {
        assert_eq!(format!("{:.4}", Bits(1.405639)), "1.4056 bit");
    }
}
