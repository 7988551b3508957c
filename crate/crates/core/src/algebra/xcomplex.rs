//! Complex numbers with an unbounded binary exponent.

use std::f64::consts::LN_2;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::coeff::{fmt_complex, EPS0};
use super::{Coeff, Exponent};
use crate::error::Result;

/// `m · 2^e` with `max(|Re m|, |Im m|)` in `[0.5, 1)`, or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtComplex {
    m: Complex64,
    e: i64,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex { m: Complex64 { re: 0.0, im: 0.0 }, e: 0 };

    pub fn new(z: Complex64) -> Self {
        ExtComplex { m: z, e: 0 }.normalized()
    }

    /// `exp(w)`, valid far outside the `f64` range.
    pub fn exp(w: Complex64) -> Self {
        let k = (w.re / LN_2).floor();
        let r = w.re - k * LN_2;
        let m = Complex64::from_polar(r.exp(), w.im);
        ExtComplex { m, e: k as i64 }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    /// Nearest `Complex64`; overflows to infinity and underflows to zero.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return self.m;
        }
        let e = self.e.clamp(-2200, 2200) as i32;
        let s = if e.abs() > 1000 {
            let h = e / 2;
            2f64.powi(h) * 2f64.powi(e - h)
        } else {
            2f64.powi(e)
        };
        self.m * s
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex64 {
        self.m.ln() + Complex64::new(self.e as f64 * LN_2, 0.0)
    }

    /// `ln |self|`, `-∞` at zero.
    pub fn ln_norm(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.norm().ln() + self.e as f64 * LN_2
        }
    }

    /// `|self|` without leaving the extended range.
    pub fn abs(&self) -> Self {
        ExtComplex { m: Complex64::new(self.m.norm(), 0.0), e: self.e }.normalized()
    }

    pub fn norm(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn div(&self, o: &Self) -> Self {
        ExtComplex { m: self.m / o.m, e: self.e - o.e }.normalized()
    }

    fn normalized(self) -> Self {
        let big = self.m.re.abs().max(self.m.im.abs());
        if big == 0.0 || !big.is_finite() {
            return ExtComplex { m: self.m, e: if big == 0.0 { 0 } else { self.e } };
        }
        let k = big.log2().floor() as i64 + 1;
        let scale = 2f64.powi(-k as i32);
        ExtComplex { m: self.m * scale, e: self.e + k }
    }

    fn aligned(&self, o: &Self) -> (Complex64, Complex64, i64) {
        if self.is_zero() {
            return (Complex64::new(0.0, 0.0), o.m, o.e);
        }
        if o.is_zero() {
            return (self.m, Complex64::new(0.0, 0.0), self.e);
        }
        let e = self.e.max(o.e);
        let sh = |x: &ExtComplex| {
            let d = e - x.e;
            if d > 1100 {
                Complex64::new(0.0, 0.0)
            } else {
                x.m * 2f64.powi(-(d as i32))
            }
        };
        (sh(self), sh(o), e)
    }

    /// Decimal scientific rendering that survives any exponent.
    pub fn to_sci(&self) -> (String, String) {
        let part = |x: f64| -> String {
            if x == 0.0 {
                return "0".into();
            }
            let l = x.abs().log10() + self.e as f64 * std::f64::consts::LOG10_2;
            let d = l.floor();
            let mant = 10f64.powf(l - d);
            let sign = if x < 0.0 { "-" } else { "" };
            if d.abs() < 300.0 {
                format!("{sign}{}", mant * 10f64.powf(d))
            } else {
                format!("{sign}{:.15}e{}", mant, d as i64)
            }
        };
        (part(self.m.re), part(self.m.im))
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.to_complex();
        if c.re.is_finite() && c.im.is_finite() && (self.is_zero() || c.norm() > 0.0) {
            return f.write_str(&fmt_complex(c));
        }
        let (re, im) = self.to_sci();
        if im == "0" {
            f.write_str(&re)
        } else if im.starts_with('-') {
            write!(f, "{re}{im}i")
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

impl Coeff for ExtComplex {
    type Q = Complex64;
    const EXACT: bool = false;

    fn zero() -> Self {
        Self::ZERO
    }
    fn one() -> Self {
        Self::new(Complex64::new(1.0, 0.0))
    }
    fn from_rational(r: &BigRational) -> Self {
        Self::new(Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0))
    }
    fn is_zero(&self) -> bool {
        ExtComplex::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        let (a, b, e) = self.aligned(o);
        ExtComplex { m: a + b, e }.normalized()
    }
    fn sub(&self, o: &Self) -> Self {
        let (a, b, e) = self.aligned(o);
        ExtComplex { m: a - b, e }.normalized()
    }
    fn mul(&self, o: &Self) -> Self {
        ExtComplex { m: self.m * o.m, e: self.e + o.e }.normalized()
    }
    fn neg(&self) -> Self {
        ExtComplex { m: -self.m, e: self.e }
    }
    fn q_pow(q: &Complex64, e: &Exponent) -> Self {
        if e.is_zero() {
            return Self::one();
        }
        if e.is_integer() {
            if let Some(n) = e.to_integer().to_i64() {
                let mut base = Self::new(*q);
                if n < 0 {
                    base = Self::one().div(&base);
                }
                let mut k = n.unsigned_abs();
                let mut acc = Self::one();
                while k > 0 {
                    if k & 1 == 1 {
                        acc = acc.mul(&base);
                    }
                    base = base.mul(&base);
                    k >>= 1;
                }
                return acc;
            }
        }
        Self::exp(q.ln() * e.to_f64().unwrap_or(f64::NAN))
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            Some(self.div(o))
        }
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn log_magnitude(&self) -> f64 {
        self.ln_norm()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.ln_norm() <= (EPS0 * (1.0 + scale)).ln()
    }
    fn eval_at(&self, _: Complex64) -> Complex64 {
        self.to_complex()
    }
    fn pow_rational(&self, e: &Exponent) -> Result<Self> {
        if self.is_zero() {
            return Ok(*self);
        }
        Ok(Self::exp(self.ln() * e.to_f64().unwrap_or(f64::NAN)))
    }
    fn expr(&self) -> String {
        format!("({self})")
    }
}
