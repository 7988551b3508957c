use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::Exponent;

/// A q-factor `(a; α₁,…,α_ℓ)`, acting by `f ↦ z^a ∏ f(q^{α_i} z)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QFactor {
    a: Exponent,
    alphas: Vec<i64>,
}

impl QFactor {
    /// Builds a factor; `alphas` is sorted.
    pub fn new(a: Exponent, mut alphas: Vec<i64>) -> Self {
        alphas.sort_unstable();
        QFactor { a, alphas }
    }

    pub fn int(a: i64, alphas: &[i64]) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(a)), alphas.to_vec())
    }

    /// The constant factor `(a; ∅)`.
    pub fn constant(a: Exponent) -> Self {
        QFactor { a, alphas: Vec::new() }
    }

    pub fn a(&self) -> &Exponent {
        &self.a
    }

    pub fn alphas(&self) -> &[i64] {
        &self.alphas
    }

    /// `ℓ`.
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `α(A) = α₁+…+α_ℓ`.
    pub fn alpha_sum(&self) -> i64 {
        self.alphas.iter().sum()
    }

    pub fn first_alpha(&self) -> Option<i64> {
        self.alphas.first().copied()
    }

    pub fn last_alpha(&self) -> Option<i64> {
        self.alphas.last().copied()
    }

    /// `a` as a machine integer when it is one.
    pub fn a_int(&self) -> Option<i64> {
        if self.a.is_integer() {
            self.a.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Nonnegative integer `a` with `ℓ ≥ 1`.
    pub fn is_shifting(&self) -> bool {
        !self.alphas.is_empty() && self.a_int().is_some_and(|a| a >= 1)
    }

    pub fn is_nonshifting(&self) -> bool {
        !self.alphas.is_empty() && self.a.is_zero()
    }

    /// `#{i : α_i = α_ℓ}`.
    pub fn scope(&self) -> usize {
        match self.alphas.last() {
            Some(top) => self.alphas.iter().filter(|&x| x == top).count(),
            None => 0,
        }
    }

    pub fn with_a(&self, a: Exponent) -> Self {
        QFactor { a, alphas: self.alphas.clone() }
    }

    /// Same `a`, with every index shifted by `k`.
    pub fn shift_alphas(&self, k: i64) -> Self {
        QFactor { a: self.a.clone(), alphas: self.alphas.iter().map(|x| x + k).collect() }
    }

    /// Product of factors: `(a;α)·(b;β) = (a+b; α∪β)`.
    pub fn product(&self, o: &Self) -> Self {
        let mut alphas = self.alphas.clone();
        alphas.extend_from_slice(&o.alphas);
        Self::new(&self.a + &o.a, alphas)
    }

    /// Removes one occurrence of `gamma`, if present.
    pub fn remove_alpha(&self, gamma: i64) -> Option<Self> {
        let k = self.alphas.iter().position(|&x| x == gamma)?;
        let mut alphas = self.alphas.clone();
        alphas.remove(k);
        Some(QFactor { a: self.a.clone(), alphas })
    }
}

pub(crate) fn fmt_exponent(e: &Exponent) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for QFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphas: Vec<String> = self.alphas.iter().map(|x| x.to_string()).collect();
        write!(f, "({};{})", fmt_exponent(&self.a), alphas.join(","))
    }
}

impl fmt::Debug for QFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
