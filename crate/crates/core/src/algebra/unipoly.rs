use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::Coeff;

/// Univariate Laurent polynomial with integer exponents.
#[derive(Clone, PartialEq)]
pub struct UniPoly<C: Coeff> {
    terms: BTreeMap<i64, C>,
}

impl<C: Coeff> Default for UniPoly<C> {
    fn default() -> Self {
        UniPoly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> UniPoly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    /// Coefficients of `1, x, x², …`.
    pub fn from_dense(coeffs: Vec<C>) -> Self {
        Self::from_terms(coeffs.into_iter().enumerate().map(|(k, c)| (k as i64, c)))
    }

    pub fn add_term(&mut self, k: i64, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn coeff(&self, k: i64) -> C {
        self.terms.get(&k).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn order(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> UniPoly<D> {
        UniPoly::from_terms(self.terms().map(|(k, c)| (k, f(c))))
    }

    pub fn to_numeric(&self, q: Complex64) -> UniPoly<Complex64> {
        self.map(|c| c.eval_at(q)).cleaned()
    }

    /// Drops negligible coefficients (numeric mode only).
    pub fn cleaned(mut self) -> Self {
        if !C::EXACT {
            let scale = self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max);
            self.terms.retain(|_, c| !c.negligible(scale));
        }
        self
    }

    /// Division by `x^{order}`.
    pub fn strip_order(&self) -> Self {
        let o = self.order().unwrap_or(0);
        Self::from_terms(self.terms().map(|(k, c)| (k - o, c.clone())))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (i, a) in self.terms() {
            for (j, b) in o.terms() {
                p.add_term(i + j, a.mul(b));
            }
        }
        p
    }

    /// Rendering in the variable `var`, e.g. `1-40*z-72*q^(-1)*z^2`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.terms() {
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                k if k > 0 => format!("{var}^{k}"),
                k => format!("{var}^({k})"),
            };
            let ce = c.expr();
            let body = if mono.is_empty() {
                ce
            } else if ce == "1" {
                mono
            } else if ce == "-1" {
                format!("-{mono}")
            } else {
                format!("{ce}*{mono}")
            };
            if !out.is_empty() && !body.starts_with('-') {
                out.push('+');
            }
            out.push_str(&body);
        }
        out
    }
}

impl UniPoly<Complex64> {
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| c * x.powi(k as i32)).sum()
    }

    /// Dense coefficients from degree 0 upward, after removing the order.
    pub fn dense(&self) -> Vec<Complex64> {
        let p = self.strip_order();
        let d = p.degree().unwrap_or(0) as usize;
        (0..=d).map(|k| p.coeff(k as i64)).collect()
    }
}

impl<C: Coeff> fmt::Display for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl<C: Coeff> fmt::Debug for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
