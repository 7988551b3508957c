//! Equation text to q-operator, and back.
//!
//! ```text
//! equation := expr ("=" expr)? ;
//! expr     := ("+"|"-")? term (("+"|"-") term)* ;
//! term     := factor ("*" factor)* ;
//! factor   := base ("^" exponent)? ;
//! base     := rational | "q" | "z" | "i" | "f" "(" arg ")" | "(" expr ")" ;
//! arg      := ("q" ("^" int)? "*")? "z" | "z" "/" "q" ("^" int)? ;
//! exponent := rational | "(" "-"? rational ")" ;
//! rational := int ("/" int)? ;
//! ```

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Coeff, Exponent, ExactOp, GaussLaurent, Laurent, Mode, NumOp, QFactor, QOperator};
use crate::error::{QError, Result};

/// Parsed equation text.
#[derive(Clone, Debug)]
pub struct EquationSource {
    pub text: String,
    /// `lhs − rhs`.
    pub parsed: QOperator<GaussLaurent>,
    /// Common denominator of all `q`-exponents.
    pub q_denominator: u64,
    pub declared_mode: Mode,
}

impl EquationSource {
    pub fn to_exact(&self) -> Result<ExactOp> {
        if self.declared_mode == Mode::Numeric {
            return Err(QError::ModeError("the equation uses i and needs numeric mode".into()));
        }
        Ok(self.parsed.map_coeffs(|c| c.re.clone()))
    }

    pub fn to_numeric(&self, q: Complex64) -> NumOp {
        self.parsed.map_coeffs(|c| c.eval_at(q)).cleaned()
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

type Val = QOperator<GaussLaurent>;

fn constant(c: GaussLaurent) -> Val {
    Val::monomial(QFactor::constant(Exponent::zero()), c)
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, chars: src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), pos: 0 }
    }

    fn err_at(&self, pos: usize, msg: impl Into<String>) -> QError {
        let byte = self.chars.get(pos).map(|c| c.0).unwrap_or(self.src.len());
        let before = &self.src[..byte];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
        QError::Syntax { line, col, msg: msg.into() }
    }

    fn err(&self, msg: impl Into<String>) -> QError {
        self.err_at(self.pos, msg)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{ch}'")))
        }
    }

    fn equation(&mut self) -> Result<Val> {
        let lhs = self.expr()?;
        let p = if self.eat('=') { lhs.sub(&self.expr()?) } else { lhs };
        if self.pos < self.chars.len() {
            return Err(self.err("unexpected input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Val> {
        let negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Val> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Val> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.pos;
        let e = self.exponent()?;
        self.power(base, &e).map_err(|m| self.err_at(at, m))
    }

    fn power(&self, base: Val, e: &Exponent) -> std::result::Result<Val, String> {
        if e.is_integer() && !e.is_negative() {
            let n = e.to_integer().to_u32().ok_or("exponent too large")?;
            let mut acc = constant(GaussLaurent::one());
            for _ in 0..n {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        let mut it = base.iter();
        let (f, c) = match (it.next(), it.next()) {
            (Some(t), None) => t,
            _ => return Err(format!("exponent {e} needs a single-term base")),
        };
        if !f.is_empty() {
            return Err(format!("exponent {e} cannot apply to f"));
        }
        let c = c.pow_rational(e).map_err(|x| x.to_string())?;
        Ok(Val::monomial(QFactor::constant(f.a() * e), c))
    }

    fn base(&mut self) -> Result<Val> {
        match self.peek() {
            Some(ch) if ch.is_ascii_digit() => {
                let r = self.rational()?;
                Ok(constant(GaussLaurent::from_rational(&r)))
            }
            Some('q') => {
                self.pos += 1;
                Ok(constant(GaussLaurent::real(Laurent::q_pow(&Exponent::one()))))
            }
            Some('z') => {
                self.pos += 1;
                Ok(Val::monomial(QFactor::constant(Exponent::one()), GaussLaurent::one()))
            }
            Some('i') => {
                self.pos += 1;
                Ok(constant(GaussLaurent::imag_unit()))
            }
            Some('f') => {
                self.pos += 1;
                self.expect('(')?;
                let k = self.arg()?;
                self.expect(')')?;
                Ok(Val::monomial(QFactor::new(Exponent::zero(), vec![k]), GaussLaurent::one()))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(ch) => Err(self.err(format!("unexpected '{ch}'"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// σ-index of `f(q^k*z)` or `f(z/q^k)`.
    fn arg(&mut self) -> Result<i64> {
        if self.eat('q') {
            let k = self.sigma_power()?;
            self.expect('*')?;
            self.expect('z')?;
            return Ok(k);
        }
        self.expect('z')?;
        if self.eat('/') {
            self.expect('q')?;
            return Ok(-self.sigma_power()?);
        }
        Ok(0)
    }

    fn sigma_power(&mut self) -> Result<i64> {
        if !self.eat('^') {
            return Ok(1);
        }
        let at = self.pos;
        if self.peek() == Some('(') {
            return Err(QError::NonIntegerSigmaIndex(format!("at column {}", self.col_of(at))));
        }
        let neg = self.eat('-');
        let n = self.int()?;
        if self.peek() == Some('/') && self.chars.get(self.pos + 1).is_some_and(|c| c.1.is_ascii_digit()) {
            return Err(QError::NonIntegerSigmaIndex(format!("at column {}", self.col_of(at))));
        }
        let n = n.to_i64().ok_or_else(|| self.err_at(at, "σ-index too large"))?;
        Ok(if neg { -n } else { n })
    }

    fn col_of(&self, pos: usize) -> usize {
        match self.err_at(pos, "") {
            QError::Syntax { col, .. } => col,
            _ => 0,
        }
    }

    fn exponent(&mut self) -> Result<Exponent> {
        if self.eat('(') {
            let neg = self.eat('-');
            let r = self.rational()?;
            self.expect(')')?;
            return Ok(if neg { -r } else { r });
        }
        self.rational()
    }

    fn rational(&mut self) -> Result<BigRational> {
        let n = self.int()?;
        if self.peek() == Some('/') && self.chars.get(self.pos + 1).is_some_and(|c| c.1.is_ascii_digit()) {
            self.pos += 1;
            let at = self.pos;
            let d = self.int()?;
            if d.is_zero() {
                return Err(self.err_at(at, "zero denominator"));
            }
            return Ok(BigRational::new(n, d));
        }
        Ok(BigRational::from_integer(n))
    }

    fn int(&mut self) -> Result<BigInt> {
        let start = self.pos;
        let mut s = String::new();
        while let Some(ch) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(ch);
            self.pos += 1;
        }
        if s.is_empty() {
            return Err(self.err_at(start, "expected an integer"));
        }
        Ok(s.parse().unwrap())
    }
}

pub fn parse_equation(text: &str) -> Result<EquationSource> {
    let parsed = Parser::new(text).equation()?;
    let mut d = 1u64;
    let mut numeric = false;
    for (_, c) in parsed.iter() {
        d = d.lcm(&c.re.grid()).lcm(&c.im.grid());
        numeric |= !c.is_real();
    }
    Ok(EquationSource {
        text: text.to_string(),
        parsed,
        q_denominator: d,
        declared_mode: if numeric { Mode::Numeric } else { Mode::Exact },
    })
}

fn fmt_rat(e: &Exponent) -> String {
    crate::algebra::factor::fmt_exponent(e)
}

fn z_power(a: &Exponent) -> Option<String> {
    if a.is_zero() {
        None
    } else if a.is_one() {
        Some("z".into())
    } else if a.is_integer() && a.is_positive() {
        Some(format!("z^{}", a.numer()))
    } else {
        Some(format!("z^({})", fmt_rat(a)))
    }
}

fn f_call(k: i64) -> String {
    match k {
        0 => "f(z)".into(),
        1 => "f(q*z)".into(),
        -1 => "f(z/q)".into(),
        k if k > 1 => format!("f(q^{k}*z)"),
        k => format!("f(z/q^{})", -k),
    }
}

/// Monomial `z^a ∏ f(q^{α_i} z)` in equation syntax, `None` for `(0; ∅)`.
pub fn factor_expr(f: &QFactor) -> Option<String> {
    let mut parts: Vec<String> = z_power(f.a()).into_iter().collect();
    let al = f.alphas();
    let mut i = 0;
    while i < al.len() {
        let j = al[i..].iter().take_while(|&&x| x == al[i]).count();
        let call = f_call(al[i]);
        parts.push(if j == 1 { call } else { format!("{call}^{j}") });
        i += j;
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("*"))
    }
}

/// Equation text `… = 0` for `P`; reparsing gives `P` back.
pub fn print_equation<C: Coeff>(p: &QOperator<C>) -> String {
    format!("{} = 0", print_operator(p))
}

/// Expression text for `P` as a polynomial in `z` and the shifts of `f`.
pub fn print_operator<C: Coeff>(p: &QOperator<C>) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (f, c) in p.iter() {
        let ce = c.expr();
        let body = match factor_expr(f) {
            None => ce,
            Some(m) if ce == "1" => m,
            Some(m) if ce == "-1" => format!("-{m}"),
            Some(m) => format!("{ce}*{m}"),
        };
        if !out.is_empty() {
            out.push_str(if body.starts_with('-') { " " } else { " + " });
        }
        if body.starts_with('-') && !out.is_empty() {
            out.push_str("- ");
            out.push_str(&body[1..]);
        } else {
            out.push_str(&body);
        }
    }
    out
}
