use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::{Coeff, Exponent, Laurent, QFactor};
use crate::error::{QError, Result};

/// A q-operator: a finite weighted sum of q-factors with no zero weights.
#[derive(Clone, PartialEq)]
pub struct QOperator<C: Coeff> {
    terms: BTreeMap<QFactor, C>,
}

/// Numeric operator.
pub type NumOp = QOperator<Complex64>;
/// Exact operator over Laurent polynomials in `q`.
pub type ExactOp = QOperator<Laurent>;

/// `P = P₀ + P₊ + P_∅`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<C: Coeff> {
    pub nonshifting: QOperator<C>,
    pub shifting: QOperator<C>,
    pub constant: QOperator<C>,
}

/// `(ᾱ(P₀), α̲(P₀), ᾱ(P₊), α̲(P₊), ā(P))`; `None` for an empty part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaStats {
    pub p0_max: Option<i64>,
    pub p0_min: Option<i64>,
    pub plus_max: Option<i64>,
    pub plus_min: Option<i64>,
    pub a_max: Exponent,
}

impl<C: Coeff> Default for QOperator<C> {
    fn default() -> Self {
        QOperator { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> QOperator<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (QFactor, C)>>(terms: I) -> Self {
        let mut p = Self::new();
        for (f, c) in terms {
            p.add_term(f, c);
        }
        p
    }

    /// Single term `c·A`.
    pub fn monomial(f: QFactor, c: C) -> Self {
        Self::from_terms([(f, c)])
    }

    /// Accumulates `c·A`, dropping exact zeros.
    pub fn add_term(&mut self, f: QFactor, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&f) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&f);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(f, c);
            }
        }
    }

    /// Drops coefficients that evaluate to exactly zero.
    pub fn cleaned(mut self) -> Self {
        if !C::EXACT {
            self.terms.retain(|_, c| c.magnitude() > 0.0);
        }
        self
    }

    pub fn max_magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QFactor, &C)> {
        self.terms.iter()
    }

    pub fn factors(&self) -> impl Iterator<Item = &QFactor> {
        self.terms.keys()
    }

    pub fn get(&self, f: &QFactor) -> Option<&C> {
        self.terms.get(f)
    }

    pub fn coeff(&self, f: &QFactor) -> C {
        self.terms.get(f).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of `(0; ∅)`.
    pub fn constant_coeff(&self) -> C {
        self.coeff(&QFactor::constant(Exponent::zero()))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `ℓ(P)`.
    pub fn length(&self) -> usize {
        self.terms.keys().map(QFactor::len).max().unwrap_or(0)
    }

    /// `ᾱ(P)`: largest last index over factors of positive length.
    pub fn alpha_max(&self) -> Option<i64> {
        self.terms.keys().filter_map(QFactor::last_alpha).max()
    }

    /// `α̲(P)`: smallest first index over factors of positive length.
    pub fn alpha_min(&self) -> Option<i64> {
        self.terms.keys().filter_map(QFactor::first_alpha).min()
    }

    /// `ā(P)`.
    pub fn a_max(&self) -> Option<Exponent> {
        self.terms.keys().map(|f| f.a().clone()).max()
    }

    pub fn all_integer_a(&self) -> bool {
        self.terms.keys().all(|f| f.a_int().is_some_and(|a| a >= 0))
    }

    pub fn filter<F: Fn(&QFactor, &C) -> bool>(&self, keep: F) -> Self {
        QOperator {
            terms: self
                .terms
                .iter()
                .filter(|(f, c)| keep(f, c))
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (f, c) in o.iter() {
            p.add_term(f.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.iter().map(|(f, c)| (f.clone(), c.mul(k))))
    }

    /// Operator product, with `(a;α)(b;β) = (a+b; α∪β)`.
    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::new();
        for (f, c) in self.iter() {
            for (g, d) in o.iter() {
                p.add_term(f.product(g), c.mul(d));
            }
        }
        p
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> QOperator<D> {
        QOperator::from_terms(self.iter().map(|(k, c)| (k.clone(), f(c))))
    }

    pub fn map_factors<F: Fn(&QFactor, &C) -> (QFactor, C)>(&self, f: F) -> Self {
        Self::from_terms(self.iter().map(|(k, c)| f(k, c)))
    }

    /// Numeric specialization at `q`.
    pub fn to_numeric(&self, q: Complex64) -> NumOp {
        self.map_coeffs(|c| c.eval_at(q)).cleaned()
    }

    /// Splits into nonshifting, shifting and constant parts.
    pub fn decompose(&self) -> Result<Decomposition<C>> {
        let mut d = Decomposition {
            nonshifting: Self::new(),
            shifting: Self::new(),
            constant: Self::new(),
        };
        for (f, c) in self.iter() {
            let a = match f.a_int() {
                Some(a) if a >= 0 => a,
                _ => return Err(QError::NonIntegerExponent(super::factor::fmt_exponent(f.a()))),
            };
            let part = if f.is_empty() {
                &mut d.constant
            } else if a == 0 {
                &mut d.nonshifting
            } else {
                &mut d.shifting
            };
            part.terms.insert(f.clone(), c.clone());
        }
        Ok(d)
    }

    pub fn alpha_stats(&self) -> Result<AlphaStats> {
        if self.is_empty() {
            return Err(QError::EmptyInput("alpha_stats of the zero operator".into()));
        }
        let d = self.decompose()?;
        Ok(AlphaStats {
            p0_max: d.nonshifting.alpha_max(),
            p0_min: d.nonshifting.alpha_min(),
            plus_max: d.shifting.alpha_max(),
            plus_min: d.shifting.alpha_min(),
            a_max: self.a_max().unwrap(),
        })
    }
}

impl<C: Coeff> Decomposition<C> {
    pub fn recompose(&self) -> QOperator<C> {
        self.nonshifting.add(&self.shifting).add(&self.constant)
    }
}

impl<C: Coeff> fmt::Display for QOperator<C> {
    /// Sum of `(coefficient)·(a;α)` terms in factor order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.iter().map(|(k, c)| format!("({c}){k}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl<C: Coeff> fmt::Debug for QOperator<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: i64) -> Laurent {
        Laurent::from_i64(n)
    }

    fn qcatalan() -> ExactOp {
        ExactOp::from_terms([
            (QFactor::int(0, &[]), l(1)),
            (QFactor::int(0, &[0]), l(-1)),
            (QFactor::int(1, &[0, 1]), l(1)),
        ])
    }

    #[test]
    fn decompose_qcatalan() {
        let d = qcatalan().decompose().unwrap();
        assert_eq!(d.nonshifting, ExactOp::monomial(QFactor::int(0, &[0]), l(-1)));
        assert_eq!(d.shifting, ExactOp::monomial(QFactor::int(1, &[0, 1]), l(1)));
        assert_eq!(d.constant, ExactOp::monomial(QFactor::int(0, &[]), l(1)));
        assert_eq!(d.recompose(), qcatalan());
    }

    #[test]
    fn decompose_constant_only() {
        let p = ExactOp::monomial(QFactor::int(0, &[]), l(3));
        let d = p.decompose().unwrap();
        assert!(d.nonshifting.is_empty() && d.shifting.is_empty());
        assert_eq!(d.constant, p);
    }

    #[test]
    fn decompose_rejects_fractional_a() {
        let p = ExactOp::monomial(QFactor::new(Exponent::new(1.into(), 2.into()), vec![0]), l(1));
        assert!(matches!(p.decompose(), Err(QError::NonIntegerExponent(_))));
    }

    #[test]
    fn alpha_stats_qcatalan() {
        let s = qcatalan().alpha_stats().unwrap();
        assert_eq!((s.p0_max, s.p0_min, s.plus_max, s.plus_min), (Some(0), Some(0), Some(1), Some(0)));
    }

    #[test]
    fn alpha_stats_single_nonshifting() {
        let s = ExactOp::monomial(QFactor::int(0, &[0]), l(1)).alpha_stats().unwrap();
        assert_eq!((s.p0_max, s.p0_min, s.plus_max, s.plus_min), (Some(0), Some(0), None, None));
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = qcatalan();
        assert!(p.sub(&p).is_empty());
    }
}
