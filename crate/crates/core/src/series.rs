//! Power-series solutions of equations in solved form.
//!
//! The coefficients come from the basic recursion, in exact mode (Laurent
//! polynomials in `q`) or numerically at a fixed `q`. The module also holds the
//! generic order and degree sequences, the leading-coefficient check and a few
//! evaluation utilities.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::algebra::{Coeff, Exponent, ExactOp, ExtComplex, Laurent, NumOp, QOperator};
use crate::asymptotics::crest;
use crate::error::{QError, Result};
use crate::solver::is_in_solved_form;

/// Relative size below which a numeric linear coefficient counts as zero.
const LINEAR_EPS: f64 = 1e-12;

/// How `f₀` was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialValue<C> {
    /// Determined by the equation at `n = 0`.
    Forced,
    /// Taken from the caller (homogeneous degenerate case).
    Supplied(C),
}

/// `f₀, …, f_N` for the solution of `P f = 0`.
#[derive(Clone, Debug)]
pub struct Series<C: Coeff> {
    pub coeffs: Vec<C>,
    pub q: C::Q,
    pub source: QOperator<C>,
    pub initial: InitialValue<C>,
}

/// Exact coefficients in `ℚ[q^{±1/d}]`.
pub type ExactSeries = Series<Laurent>;
/// Numeric coefficients at a fixed `q`, free of overflow.
pub type NumSeries = Series<ExtComplex>;

fn int(n: i64) -> Exponent {
    Exponent::from_integer(BigInt::from(n))
}

fn a_usize(e: &Exponent) -> Result<usize> {
    if e.is_integer() && !e.is_negative() {
        usize::try_from(e.to_integer()).map_err(|_| QError::NonIntegerExponent(e.to_string()))
    } else {
        Err(QError::NonIntegerExponent(e.to_string()))
    }
}

/// Numeric zero test for a sum relative to its largest part; exact sums must vanish.
fn cancels<C: Coeff>(sum: &C, largest_log: f64) -> bool {
    if C::EXACT || sum.is_zero() {
        return sum.is_zero();
    }
    sum.log_magnitude() <= largest_log + LINEAR_EPS.ln()
}

fn q_power<C: Coeff>(q: &C::Q, e: i64) -> C {
    C::q_pow(q, &int(e))
}

struct ShiftTerm<C> {
    a: usize,
    alphas: Vec<i64>,
    coeff: C,
    /// `conv[i][m] = [z^m] ∏_{j ≤ i} f(q^{α_j} z)`.
    conv: Vec<Vec<C>>,
}

/// Solves `P f = 0` for `f₀, …, f_N`.
///
/// `f₀` is forced when the `n = 0` equation is linear with a nonzero
/// coefficient; when that equation is identically zero it must be supplied.
pub fn solve_coefficients<C: Coeff>(p: &QOperator<C>, q: &C::Q, n_max: usize, f0: Option<C>) -> Result<Series<C>> {
    if !is_in_solved_form(p) {
        return Err(QError::NotSolvedForm);
    }
    let mut linear: Vec<(i64, C)> = Vec::new();
    let mut constants: BTreeMap<usize, C> = BTreeMap::new();
    let mut shifts: Vec<ShiftTerm<C>> = Vec::new();
    for (f, c) in p.iter() {
        let a = a_usize(f.a())?;
        if f.is_empty() {
            constants.insert(a, c.clone());
        } else if a == 0 {
            linear.push((f.alphas()[0], c.clone()));
        } else {
            shifts.push(ShiftTerm { a, alphas: f.alphas().to_vec(), coeff: c.clone(), conv: vec![Vec::new(); f.len()] });
        }
    }
    let weights: BTreeSet<i64> = shifts.iter().flat_map(|s| s.alphas.iter().copied()).collect();
    let mut weighted: BTreeMap<i64, Vec<C>> = weights.iter().map(|&al| (al, Vec::new())).collect();

    let mut coeffs: Vec<C> = Vec::with_capacity(n_max + 1);
    let mut initial = InitialValue::Forced;
    for n in 0..=n_max {
        let mut lin = C::zero();
        let mut lin_log = f64::NEG_INFINITY;
        for (al, c) in &linear {
            let t = c.mul(&q_power::<C>(q, al * n as i64));
            lin_log = lin_log.max(t.log_magnitude());
            lin.add_assign(&t);
        }
        let mut rest = constants.get(&n).cloned().unwrap_or_else(C::zero);
        for s in &shifts {
            if s.a <= n {
                rest.add_assign(&s.coeff.mul(&s.conv[s.alphas.len() - 1][n - s.a]));
            }
        }
        let fn_ = if cancels(&lin, lin_log) {
            if n > 0 || !rest.is_zero() {
                return Err(QError::UniquenessViolated(n));
            }
            match &f0 {
                Some(v) => {
                    initial = InitialValue::Supplied(v.clone());
                    v.clone()
                }
                None => return Err(QError::MissingInitialValue),
            }
        } else {
            let v = rest.neg().try_div(&lin).ok_or(QError::NonPolynomialQuotient(n))?;
            if n == 0 {
                if let Some(given) = &f0 {
                    let d = given.sub(&v);
                    let agrees = if C::EXACT { d.is_zero() } else { d.magnitude() <= 1e-9 * (1.0 + v.magnitude()) };
                    if !agrees {
                        return Err(QError::NotApplicable(format!("f_0 is forced to {v} by the equation")));
                    }
                }
            }
            v
        };
        for (al, w) in weighted.iter_mut() {
            w.push(fn_.mul(&q_power::<C>(q, al * n as i64)));
        }
        for s in &mut shifts {
            for i in 0..s.alphas.len() {
                let w = &weighted[&s.alphas[i]];
                let next = if i == 0 {
                    w[n].clone()
                } else {
                    let prev = &s.conv[i - 1];
                    let mut acc = C::zero();
                    for j in 0..=n {
                        acc.add_assign(&prev[j].mul(&w[n - j]));
                    }
                    acc
                };
                s.conv[i].push(next);
            }
        }
        coeffs.push(fn_);
    }
    Ok(Series { coeffs, q: q.clone(), source: p.clone(), initial })
}

/// Numeric solve at `q`, carried out in extended-range arithmetic.
pub fn solve_numeric(p: &NumOp, q: Complex64, n_max: usize, f0: Option<Complex64>) -> Result<NumSeries> {
    solve_coefficients(&p.map_coeffs(|c| ExtComplex::new(*c)), &q, n_max, f0.map(ExtComplex::new))
}

/// `[zⁿ](P f)` for `n ≤ N`, by direct truncated products.
pub fn apply_truncated<C: Coeff>(p: &QOperator<C>, q: &C::Q, f: &[C]) -> Result<Vec<C>> {
    let len = f.len();
    let mut out = vec![C::zero(); len];
    for (fac, c) in p.iter() {
        let a = a_usize(fac.a())?;
        if a >= len {
            continue;
        }
        let m = len - a;
        let mut prod: Vec<C> = (0..m).map(|k| if k == 0 { C::one() } else { C::zero() }).collect();
        for &al in fac.alphas() {
            let s: Vec<C> = (0..m).map(|k| f[k].mul(&q_power::<C>(q, al * k as i64))).collect();
            let mut next = vec![C::zero(); m];
            for (i, x) in prod.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in s.iter().enumerate().take(m - i) {
                    next[i + j].add_assign(&x.mul(y));
                }
            }
            prod = next;
        }
        for (k, v) in prod.iter().enumerate() {
            out[a + k].add_assign(&c.mul(v));
        }
    }
    Ok(out)
}

impl<C: Coeff> Series<C> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Residual coefficients `[zⁿ](P f)`, `n ≤ N`.
    pub fn residuals(&self) -> Result<Vec<C>> {
        apply_truncated(&self.source, &self.q, &self.coeffs)
    }
}

impl ExactSeries {
    /// `n,polynomial,degree` rows in canonical ascending powers of `q`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,polynomial,degree\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let d = c.degree().map(|d| d.to_string()).unwrap_or_default();
            s.push_str(&format!("{n},{c},{d}\n"));
        }
        s
    }

    /// The series evaluated at a numeric `q`.
    pub fn eval_at(&self, q: Complex64) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.eval(q)).collect()
    }
}

impl NumSeries {
    /// `n,re,im` rows; values outside the `f64` range use a decimal exponent.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,re,im\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let (re, im) = c.to_sci();
            s.push_str(&format!("{n},{re},{im}\n"));
        }
        s
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_complex()).collect()
    }

    /// Largest `|[zⁿ](P f)|` relative to the same sum taken over absolute values.
    pub fn max_relative_residual(&self) -> Result<f64> {
        let res = self.residuals()?;
        let abs_op = self.source.map_coeffs(|c| c.abs());
        let abs_f: Vec<ExtComplex> = self.coeffs.iter().map(|c| c.abs()).collect();
        let scale = apply_truncated(&abs_op, &Complex64::new(self.q.norm(), 0.0), &abs_f)?;
        let mut worst: f64 = 0.0;
        for (r, s) in res.iter().zip(&scale) {
            if r.is_zero() {
                continue;
            }
            if s.is_zero() {
                return Ok(f64::INFINITY);
            }
            worst = worst.max((r.ln_norm() - s.ln_norm()).exp());
        }
        Ok(worst)
    }
}

/// Truncated sum and, when the tail looks geometric, a bound on the remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_bound: Option<f64>,
}

/// Horner evaluation of the truncation at `z`.
pub fn evaluate_series(f: &NumSeries, z: Complex64) -> Evaluation {
    let vals = f.values();
    let value = vals.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let n = vals.len();
    let tail_bound = if n >= 2 && vals[n - 2].norm() > 0.0 {
        let ratio = (vals[n - 1] / vals[n - 2]).norm() * z.norm();
        let last = vals[n - 1].norm() * z.norm().powi(n as i32 - 1);
        (ratio < 1.0).then(|| last / (1.0 - ratio))
    } else {
        None
    };
    Evaluation { value, tail_bound }
}

/// `(G f)(z) = ∑ G_A z^a ∏ f(q^{α_i} z)`.
pub fn apply_at(g: &NumOp, f: &NumSeries, z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (fac, c) in g.iter() {
        let a = a_usize(fac.a())?;
        let mut t = c * z.powi(a as i32);
        for &al in fac.alphas() {
            t *= evaluate_series(f, f.q.powi(al as i32) * z).value;
        }
        acc += t;
    }
    Ok(acc)
}

/// Zero of `z ↦ (G f)(z)` by Newton's method from `seed`.
pub fn find_scalar_zero(g: &NumOp, f: &NumSeries, seed: Complex64, tol: f64) -> Result<Complex64> {
    let mut z = seed;
    for _ in 0..100 {
        let v = apply_at(g, f, z)?;
        if !v.is_finite() {
            break;
        }
        if v.norm() <= tol {
            return Ok(z);
        }
        let h = 1e-6 * (1.0 + z.norm());
        let d = (apply_at(g, f, z + h)? - apply_at(g, f, z - h)?) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        z -= v / d;
    }
    Err(QError::NoConvergence(format!("no zero of (G f)(z) found from seed {seed}")))
}

fn nonshifting_alpha<C: Coeff>(p: &QOperator<C>, top: bool) -> Option<i64> {
    let it = p.iter().filter(|(f, _)| f.a().is_zero() && !f.is_empty());
    if top {
        it.filter_map(|(f, _)| f.last_alpha()).max()
    } else {
        it.filter_map(|(f, _)| f.first_alpha()).min()
    }
}

fn shifting_factors<C: Coeff>(p: &QOperator<C>) -> Result<Vec<(usize, Vec<i64>)>> {
    let mut out = Vec::new();
    for f in p.factors() {
        let a = a_usize(f.a())?;
        if a > 0 && !f.is_empty() {
            out.push((a, f.alphas().to_vec()));
        }
    }
    Ok(out)
}

/// Generic degree `δ₀, …, δ_N`, from `δ_n = max α_ℓ(n−a) + δ_{n−a}` over
/// shifting factors with `a ≤ n` and `α_ℓ ≥ 0` (empty max is 0).
pub fn generic_degree<C: Coeff>(p: &QOperator<C>, n_max: usize) -> Result<Vec<i64>> {
    if !is_in_solved_form(p) {
        return Err(QError::NotSolvedForm);
    }
    if nonshifting_alpha(p, true) != Some(0) {
        return Err(QError::NotNormalized("generic degree needs max alpha over P0 equal to 0".into()));
    }
    let shifts: Vec<(usize, i64)> = shifting_factors(p)?
        .into_iter()
        .filter_map(|(a, al)| al.last().copied().filter(|&t| t >= 0).map(|t| (a, t)))
        .collect();
    let mut delta = vec![0i64; n_max + 1];
    for n in 0..=n_max {
        delta[n] = shifts
            .iter()
            .filter(|&&(a, _)| a <= n)
            .map(|&(a, top)| top * (n - a) as i64 + delta[n - a])
            .max()
            .unwrap_or(0);
    }
    Ok(delta)
}

/// Generic order `ω₀, …, ω_N` by iterated min-plus convolutions.
pub fn generic_order<C: Coeff>(p: &QOperator<C>, n_max: usize) -> Result<Vec<i64>> {
    if !is_in_solved_form(p) {
        return Err(QError::NotSolvedForm);
    }
    if nonshifting_alpha(p, false) != Some(0) {
        return Err(QError::NotNormalized("generic order needs min alpha over P0 equal to 0".into()));
    }
    let mut constants = BTreeSet::new();
    for (f, c) in p.iter() {
        if f.is_empty() && !c.is_zero() {
            constants.insert(a_usize(f.a())?);
        }
    }
    let mut shifts: Vec<(usize, Vec<i64>, Vec<Vec<i64>>)> =
        shifting_factors(p)?.into_iter().map(|(a, al)| { let l = al.len(); (a, al, vec![Vec::new(); l]) }).collect();
    let mut omega: Vec<i64> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let w = if constants.contains(&n) {
            0
        } else {
            shifts.iter().filter(|s| s.0 <= n).map(|s| s.2[s.1.len() - 1][n - s.0]).min().unwrap_or(0)
        };
        omega.push(w);
        for (_, alphas, conv) in &mut shifts {
            for i in 0..alphas.len() {
                let seq = |m: usize| alphas[i] * m as i64 + omega[m];
                let next = if i == 0 {
                    seq(n)
                } else {
                    (0..=n).map(|j| conv[i - 1][j] + seq(n - j)).min().unwrap()
                };
                conv[i].push(next);
            }
        }
    }
    Ok(omega)
}

/// First index from which the leading-coefficient relation holds, per `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingCheck {
    pub k: i64,
    /// `None` when the relation still fails at `n_max`.
    pub first_index: Option<usize>,
}

/// Checks `[q^k] 𝒞(B) (q^{−H n(n−h)/2} f_n) = 0` for `n ≤ n_max`, with `𝒞` the
/// crest polynomial at `f₀` and `B` the backward shift.
pub fn verify_leading_coefficients(p: &ExactOp, f: &ExactSeries, ks: &[i64], n_max: usize) -> Result<Vec<LeadingCheck>> {
    if f.coeffs.len() <= n_max {
        return Err(QError::NotApplicable(format!("need f_n up to n = {n_max}")));
    }
    if p.iter().any(|(_, c)| c.as_rational().is_none()) {
        return Err(QError::NotApplicable("coefficients of P depend on q".into()));
    }
    let p0 = nonshifting_alpha(p, true);
    let plus = p.decompose()?.shifting.alpha_max();
    if p0 != Some(0) || plus.is_none_or(|m| m <= 0) {
        return Err(QError::NotApplicable("needs 0 = max alpha over P0 < max alpha over P+".into()));
    }
    let report = crest(p, &f.coeffs[0], &())?;
    let (big_h, h) = (report.height.clone(), report.coheight.clone());
    let borel: Vec<Laurent> = (0..=n_max)
        .map(|n| {
            let nn = int(n as i64);
            let e = -(&big_h * &nn * (&nn - &h)) / int(2);
            f.coeffs[n].shift(&e)
        })
        .collect();
    let poly: Vec<(usize, Laurent)> = report.poly.terms().map(|(j, c)| (j as usize, c.clone())).collect();
    let u: Vec<Laurent> = (0..=n_max)
        .map(|n| {
            let mut acc = Laurent::zero();
            for (j, c) in &poly {
                if *j <= n {
                    acc = acc.add(&c.mul(&borel[n - j]));
                }
            }
            acc
        })
        .collect();
    Ok(ks
        .iter()
        .map(|&k| {
            let e = int(k);
            let first_index = match (0..=n_max).rev().find(|&n| !u[n].coeff(&e).is_zero()) {
                None => Some(0),
                Some(last) if last < n_max => Some(last + 1),
                Some(_) => None,
            };
            LeadingCheck { k, first_index }
        })
        .collect())
}
