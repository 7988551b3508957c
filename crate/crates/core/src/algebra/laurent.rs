use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Exponent;

/// Laurent polynomial in `q` with rational exponents and rational coefficients.
///
/// Stored densely on the exponent grid `(1/grid)·ℤ` with a common
/// coefficient denominator. The representation is canonical, so derived
/// equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent {
    grid: u64,
    low: i64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { grid: 1, low: 0, num: Vec::new(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::constant(&BigRational::one())
    }

    pub fn constant(c: &BigRational) -> Self {
        Self::monomial(c, &Exponent::zero())
    }

    pub fn from_i64(n: i64) -> Self {
        Self::constant(&BigRational::from_integer(BigInt::from(n)))
    }

    /// `c·q^e`.
    pub fn monomial(c: &BigRational, e: &Exponent) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let grid = e.denom().to_u64().expect("exponent denominator too large");
        let low = e.numer().to_i64().expect("exponent numerator too large");
        Laurent { grid, low, num: vec![c.numer().clone()], den: c.denom().clone() }.normalized()
    }

    /// `q^e`.
    pub fn q_pow(e: &Exponent) -> Self {
        Self::monomial(&BigRational::one(), e)
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, BigRational)>,
    {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc.add(&Self::monomial(&c, &e)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.num.len() == 1 && self.low == 0 && self.den.is_one() && self.num[0].is_one()
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.num.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn is_monomial(&self) -> bool {
        self.term_count() == 1
    }

    /// Denominator of the exponent grid.
    pub fn grid(&self) -> u64 {
        self.grid
    }

    /// Nonzero terms `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> Vec<(Exponent, BigRational)> {
        let g = BigInt::from(self.grid);
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let e = BigRational::new(BigInt::from(self.low + i as i64), g.clone());
                (e, BigRational::new(c.clone(), self.den.clone()))
            })
            .collect()
    }

    /// Coefficient of `q^e`.
    pub fn coeff(&self, e: &Exponent) -> BigRational {
        let scaled = e * BigRational::from_integer(BigInt::from(self.grid));
        if !scaled.is_integer() {
            return BigRational::zero();
        }
        let k = scaled.to_integer().to_i64().unwrap_or(i64::MAX) - self.low;
        if k < 0 || k as usize >= self.num.len() {
            return BigRational::zero();
        }
        BigRational::new(self.num[k as usize].clone(), self.den.clone())
    }

    /// Largest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<Exponent> {
        if self.is_zero() {
            return None;
        }
        let top = self.low + self.num.len() as i64 - 1;
        Some(BigRational::new(BigInt::from(top), BigInt::from(self.grid)))
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<Exponent> {
        if self.is_zero() {
            return None;
        }
        Some(BigRational::new(BigInt::from(self.low), BigInt::from(self.grid)))
    }

    /// The constant value when the polynomial has no `q` dependence.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.num.len() == 1 && self.low == 0 {
            return Some(BigRational::new(self.num[0].clone(), self.den.clone()));
        }
        None
    }

    pub fn neg(&self) -> Self {
        Laurent {
            grid: self.grid,
            low: self.low,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let grid = self.grid.lcm(&other.grid);
        let (la, va) = self.stretched(grid);
        let (lb, vb) = other.stretched(grid);
        let low = la.min(lb);
        let high = (la + va.len() as i64).max(lb + vb.len() as i64);
        let mut num = vec![BigInt::zero(); (high - low) as usize];
        let same_den = self.den == other.den;
        for (i, c) in va.iter().enumerate() {
            if !c.is_zero() {
                let slot = &mut num[(la - low) as usize + i];
                *slot += if same_den { c.clone() } else { c * &other.den };
            }
        }
        for (i, c) in vb.iter().enumerate() {
            if !c.is_zero() {
                let slot = &mut num[(lb - low) as usize + i];
                *slot += if same_den { c.clone() } else { c * &self.den };
            }
        }
        let den = if same_den { self.den.clone() } else { &self.den * &other.den };
        Laurent { grid, low, num, den }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let grid = self.grid.lcm(&other.grid);
        let (la, va) = self.stretched(grid);
        let (lb, vb) = other.stretched(grid);
        let nzb: Vec<(usize, &BigInt)> =
            vb.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let mut num = vec![BigInt::zero(); va.len() + vb.len() - 1];
        for (i, a) in va.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in &nzb {
                num[i + j] += a * b;
            }
        }
        Laurent { grid, low: la + lb, num, den: &self.den * &other.den }.normalized()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Laurent {
            grid: self.grid,
            low: self.low,
            num: self.num.iter().map(|x| x * c.numer()).collect(),
            den: &self.den * c.denom(),
        }
        .normalized()
    }

    /// Multiplication by `q^e`.
    pub fn shift(&self, e: &Exponent) -> Self {
        self.mul(&Self::q_pow(e))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient, or `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if other.is_monomial() {
            let (e, c) = other.terms().pop().unwrap();
            return Some(self.shift(&-e).scale(&c.recip()));
        }
        let grid = self.grid.lcm(&other.grid);
        let (la, va) = self.stretched(grid);
        let (lb, vb) = other.stretched(grid);
        let to_rat = |v: &[BigInt], d: &BigInt| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::new(c.clone(), d.clone())).collect()
        };
        let mut rem = to_rat(&va, &self.den);
        let div = to_rat(&vb, &other.den);
        if rem.len() < div.len() {
            return None;
        }
        let lead = div.last().unwrap().clone();
        let qlen = rem.len() - div.len() + 1;
        let mut quot = vec![BigRational::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + div.len() - 1] / &lead;
            if !c.is_zero() {
                for (j, d) in div.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        let g = BigInt::from(grid);
        let terms = quot.into_iter().enumerate().map(|(i, c)| {
            (BigRational::new(BigInt::from(la - lb + i as i64), g.clone()), c)
        });
        Some(Self::from_terms(terms))
    }

    /// Multiplicative inverse when the value is a monomial.
    pub fn inv(&self) -> Option<Self> {
        Self::one().div_exact(self).filter(|_| self.is_monomial())
    }

    /// Substitution `q ↦ 1/q`.
    pub fn invert_q(&self) -> Self {
        let mut num = self.num.clone();
        num.reverse();
        Laurent {
            grid: self.grid,
            low: -(self.low + self.num.len() as i64 - 1),
            num,
            den: self.den.clone(),
        }
        .normalized()
    }

    /// Substitution `q^β ↦ q^{pβ}` for a positive integer `p`.
    pub fn scale_exponents(&self, p: u64) -> Self {
        let pp = BigRational::from_integer(BigInt::from(p));
        Self::from_terms(self.terms().into_iter().map(|(e, c)| (e * &pp, c)))
    }

    /// Value at a complex `q`, with `q^e = exp(e·Log q)` on the principal branch.
    pub fn eval(&self, q: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let lq = q.ln();
        let step = lq / self.grid as f64;
        let den = big_to_f64(&self.den);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (self.low + i as i64) as f64;
            acc += (step * k).exp() * (big_to_f64(c) / den);
        }
        acc
    }

    fn stretched(&self, grid: u64) -> (i64, Vec<BigInt>) {
        let f = grid / self.grid;
        if f == 1 {
            return (self.low, self.num.clone());
        }
        let f = f as usize;
        let mut v = vec![BigInt::zero(); (self.num.len() - 1) * f + 1];
        for (i, c) in self.num.iter().enumerate() {
            v[i * f] = c.clone();
        }
        (self.low * f as i64, v)
    }

    fn normalized(mut self) -> Self {
        while self.num.last().is_some_and(|c| c.is_zero()) {
            self.num.pop();
        }
        let lead = self.num.iter().take_while(|c| c.is_zero()).count();
        if lead == self.num.len() {
            return Self::zero();
        }
        if lead > 0 {
            self.num.drain(..lead);
            self.low += lead as i64;
        }
        if self.den.is_negative() {
            self.den = -self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
        if self.grid > 1 {
            let mut h = self.grid.gcd(&(self.low.unsigned_abs()));
            for (i, c) in self.num.iter().enumerate() {
                if h == 1 {
                    break;
                }
                if !c.is_zero() {
                    h = h.gcd(&((self.low + i as i64).unsigned_abs()));
                }
            }
            if h > 1 {
                let hs = h as usize;
                let new_low = self.low / h as i64;
                let num = self.num.iter().step_by(hs).cloned().collect::<Vec<_>>();
                debug_assert_eq!((self.low + (self.num.len() as i64 - 1)) % h as i64, 0);
                self.grid /= h;
                self.low = new_low;
                self.num = num;
            }
        }
        self
    }
}

pub(crate) fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_q_power(e: &Exponent) -> String {
    if e.is_one() {
        "q".to_string()
    } else if e.is_integer() && e.is_positive() {
        format!("q^{}", e.numer())
    } else {
        format!("q^({})", fmt_rational(e))
    }
}

impl Laurent {
    /// Rendering with explicit `*`, accepted by the equation parser.
    pub fn to_expr_string(&self) -> String {
        self.render("*")
    }

    fn render(&self, sep: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.terms() {
            let body = if e.is_zero() {
                fmt_rational(&c)
            } else if c.is_one() {
                fmt_q_power(&e)
            } else if (-&c).is_one() {
                format!("-{}", fmt_q_power(&e))
            } else {
                format!("{}{}{}", fmt_rational(&c), sep, fmt_q_power(&e))
            };
            if !out.is_empty() && !body.starts_with('-') {
                out.push('+');
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for Laurent {
    /// Canonical ascending form such as `1+3q+3q^2+4q^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(""))
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({})", self)
    }
}
