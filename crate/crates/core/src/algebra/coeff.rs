use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Exponent, Laurent};
use crate::error::{QError, Result};

/// Relative threshold below which numeric coefficients count as zero.
pub const EPS0: f64 = 1e-12;

/// Coefficient ring shared by exact and numeric operators.
///
/// `Q` is whatever is needed to form powers of `q`: nothing in exact mode,
/// the numeric value of `q` otherwise.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Q: Clone + fmt::Debug + Send + Sync;
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `q^e` on the principal branch.
    fn q_pow(q: &Self::Q, e: &Exponent) -> Self;
    /// Exact quotient if one exists in the ring.
    fn try_div(&self, o: &Self) -> Option<Self>;
    /// Size used to scale the numeric zero threshold.
    fn magnitude(&self) -> f64;
    /// `ln` of [`Coeff::magnitude`], finite even where the magnitude overflows.
    fn log_magnitude(&self) -> f64 {
        self.magnitude().ln()
    }
    /// Zero test relative to `scale`; exact values ignore the scale.
    fn negligible(&self, scale: f64) -> bool;
    fn eval_at(&self, q: Complex64) -> Complex64;
    /// `self^e`, erroring when the power leaves the ring.
    fn pow_rational(&self, e: &Exponent) -> Result<Self>;
    /// Rendering usable as a factor in a product, parenthesized if needed.
    fn expr(&self) -> String;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn add_assign(&mut self, o: &Self) {
        *self = Coeff::add(self, o);
    }

    /// `q ↦ 1/q` on symbolic coefficients; numeric values are left as they are.
    fn substitute_inverse_q(&self) -> Self {
        self.clone()
    }

    /// `q^β ↦ q^{pβ}` on symbolic coefficients; numeric values are left as they are.
    fn rescale_q(&self, _p: u64) -> Self {
        self.clone()
    }
}

impl Coeff for Laurent {
    type Q = ();
    const EXACT: bool = true;

    fn zero() -> Self {
        Laurent::zero()
    }
    fn one() -> Self {
        Laurent::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        Laurent::constant(r)
    }
    fn is_zero(&self) -> bool {
        Laurent::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Laurent::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Laurent::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Laurent::mul(self, o)
    }
    fn neg(&self) -> Self {
        Laurent::neg(self)
    }
    fn q_pow(_: &(), e: &Exponent) -> Self {
        Laurent::q_pow(e)
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        self.div_exact(o)
    }
    fn magnitude(&self) -> f64 {
        if Laurent::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn negligible(&self, _: f64) -> bool {
        Laurent::is_zero(self)
    }
    fn eval_at(&self, q: Complex64) -> Complex64 {
        self.eval(q)
    }
    fn pow_rational(&self, e: &Exponent) -> Result<Self> {
        if e.is_integer() {
            let n = e.to_integer().to_i64().ok_or_else(|| {
                QError::NonRepresentableExponent(format!("exponent {e} too large"))
            })?;
            let base = if n < 0 {
                self.inv().ok_or_else(|| {
                    QError::NonRepresentableExponent(format!("({self})^({e}) is not a Laurent polynomial"))
                })?
            } else {
                self.clone()
            };
            return Ok(base.pow(n.unsigned_abs() as u32));
        }
        let terms = self.terms();
        if terms.len() == 1 && terms[0].1.is_one() {
            return Ok(Laurent::q_pow(&(&terms[0].0 * e)));
        }
        Err(QError::NonRepresentableExponent(format!("({self})^({e}) is not a Laurent polynomial")))
    }
    fn substitute_inverse_q(&self) -> Self {
        self.invert_q()
    }
    fn rescale_q(&self, p: u64) -> Self {
        self.scale_exponents(p)
    }
    fn expr(&self) -> String {
        if self.term_count() > 1 {
            format!("({})", self.to_expr_string())
        } else {
            self.to_expr_string()
        }
    }
}

impl Coeff for Complex64 {
    type Q = Complex64;
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn q_pow(q: &Complex64, e: &Exponent) -> Self {
        if e.is_zero() {
            return Complex64::new(1.0, 0.0);
        }
        if e.is_integer() {
            if let Some(n) = e.to_integer().to_i32() {
                return q.powi(n);
            }
        }
        (q.ln() * e.to_f64().unwrap_or(f64::NAN)).exp()
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        if Coeff::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= EPS0 * (1.0 + scale)
    }
    fn eval_at(&self, _: Complex64) -> Complex64 {
        *self
    }
    fn pow_rational(&self, e: &Exponent) -> Result<Self> {
        Ok(Self::q_pow(self, e))
    }
    fn expr(&self) -> String {
        if self.re != 0.0 && self.im != 0.0 {
            format!("({})", fmt_complex(*self))
        } else {
            fmt_complex(*self)
        }
    }
}

/// Gaussian Laurent polynomial `re + i·im`, used while parsing text that may contain `i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussLaurent {
    pub re: Laurent,
    pub im: Laurent,
}

impl GaussLaurent {
    pub fn real(re: Laurent) -> Self {
        GaussLaurent { re, im: Laurent::zero() }
    }

    pub fn imag_unit() -> Self {
        GaussLaurent { re: Laurent::zero(), im: Laurent::one() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Display for GaussLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re.to_expr_string())
        } else if self.re.is_zero() {
            write!(f, "({})*i", self.im.to_expr_string())
        } else {
            write!(f, "({})+({})*i", self.re.to_expr_string(), self.im.to_expr_string())
        }
    }
}

impl Coeff for GaussLaurent {
    type Q = ();
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::real(Laurent::zero())
    }
    fn one() -> Self {
        Self::real(Laurent::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        Self::real(Laurent::constant(r))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        GaussLaurent { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussLaurent { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    fn mul(&self, o: &Self) -> Self {
        GaussLaurent {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    fn neg(&self) -> Self {
        GaussLaurent { re: self.re.neg(), im: self.im.neg() }
    }
    fn q_pow(_: &(), e: &Exponent) -> Self {
        Self::real(Laurent::q_pow(e))
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        if o.im.is_zero() {
            Some(GaussLaurent { re: self.re.div_exact(&o.re)?, im: self.im.div_exact(&o.re)? })
        } else if o.re.is_zero() {
            // (x + iy) / (i b) = y/b - i x/b
            Some(GaussLaurent { re: self.im.div_exact(&o.im)?, im: self.re.div_exact(&o.im)?.neg() })
        } else {
            None
        }
    }
    fn magnitude(&self) -> f64 {
        if Coeff::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn negligible(&self, _: f64) -> bool {
        Coeff::is_zero(self)
    }
    fn eval_at(&self, q: Complex64) -> Complex64 {
        self.re.eval(q) + Complex64::i() * self.im.eval(q)
    }
    fn pow_rational(&self, e: &Exponent) -> Result<Self> {
        if self.is_real() {
            return Ok(Self::real(self.re.pow_rational(e)?));
        }
        if e.is_integer() && !e.is_negative() {
            let n = e.to_integer().to_u32().ok_or_else(|| {
                QError::NonRepresentableExponent(format!("exponent {e} too large"))
            })?;
            return Ok(Coeff::pow(self, n));
        }
        Err(QError::NonRepresentableExponent(format!("({self})^({e})")))
    }
    fn substitute_inverse_q(&self) -> Self {
        GaussLaurent { re: self.re.invert_q(), im: self.im.invert_q() }
    }
    fn rescale_q(&self, p: u64) -> Self {
        GaussLaurent { re: self.re.scale_exponents(p), im: self.im.scale_exponents(p) }
    }
    fn expr(&self) -> String {
        if self.is_real() {
            self.re.expr()
        } else {
            format!("({self})")
        }
    }
}

/// Coefficient arithmetic mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// Coefficient with a runtime mode tag, for values crossing I/O boundaries.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Exact(Laurent),
    Numeric(Complex64),
}

impl Coefficient {
    pub fn mode(&self) -> Mode {
        match self {
            Coefficient::Exact(_) => Mode::Exact,
            Coefficient::Numeric(_) => Mode::Numeric,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(x) => x.is_zero(),
            Coefficient::Numeric(x) => Coeff::is_zero(x),
        }
    }

    pub fn eval_at_q(&self, q: Complex64) -> Complex64 {
        match self {
            Coefficient::Exact(x) => x.eval(q),
            Coefficient::Numeric(x) => *x,
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Ok(Coefficient::Exact(a.add(b))),
            (Coefficient::Numeric(a), Coefficient::Numeric(b)) => Ok(Coefficient::Numeric(a + b)),
            _ => Err(QError::ModeMismatch),
        }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Ok(Coefficient::Exact(a.mul(b))),
            (Coefficient::Numeric(a), Coefficient::Numeric(b)) => Ok(Coefficient::Numeric(a * b)),
            _ => Err(QError::ModeMismatch),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Coefficient::Exact(a) => Coefficient::Exact(a.neg()),
            Coefficient::Numeric(a) => Coefficient::Numeric(-a),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(x) => write!(f, "{x}"),
            Coefficient::Numeric(x) => write!(f, "{}", fmt_complex(*x)),
        }
    }
}

/// Compact complex rendering such as `2`, `-0.5i` or `1.5-2i`.
pub fn fmt_complex(x: Complex64) -> String {
    if x.im == 0.0 {
        format!("{}", x.re)
    } else if x.re == 0.0 {
        format!("{}i", x.im)
    } else if x.im < 0.0 {
        format!("{}-{}i", x.re, -x.im)
    } else {
        format!("{}+{}i", x.re, x.im)
    }
}

/// Parses `2`, `0.5`, `-0.3+0.4i`, `1e-3-2i`, `i` or `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (body[..k].parse::<f64>().ok()?, &body[k..]),
            None => (0.0, body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse::<f64>().ok()?,
        };
        return Some(Complex64::new(re, im));
    }
    s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
}
