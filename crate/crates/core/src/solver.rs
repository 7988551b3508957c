//! Newton-Puiseux search: solved forms, next exponents, expansion trees and
//! reduction to solved form.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::algebra::{Coeff, Exponent, ExactOp, Laurent, NumOp, QFactor, QOperator, EPS0};
use crate::error::{QError, Result};
use crate::polygon::{cloud, exponent_json, indicial_polynomial, initial_polynomial, points_at_coslope, polygon_of, CloudPoint};
use crate::roots::{nonzero_roots, DEFAULT_TOL};
use crate::transforms::{derivative, step_translate_simplify, translate};

/// True iff some factor has `a = 0` and positive length.
pub fn has_nonshifting_part<C: Coeff>(p: &QOperator<C>) -> bool {
    p.factors().any(|f| f.a().is_zero() && !f.is_empty())
}

/// All `a ∈ ℕ` and the nonshifting part is nonzero and linear.
pub fn is_in_solved_form<C: Coeff>(p: &QOperator<C>) -> bool {
    has_nonshifting_part(p)
        && p.factors().all(|f| f.a().is_integer() && !f.a().is_negative() && !(f.a().is_zero() && f.len() > 1))
}

/// Outcome of the uniqueness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uniqueness {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Checks `∑_{A ∈ P₀} P_A q^{α₁ n} ≠ 0` for `0 ≤ n ≤ n_max`.
pub fn uniqueness_condition<C: Coeff>(p: &QOperator<C>, q: &C::Q, n_max: usize) -> Result<Uniqueness> {
    if !is_in_solved_form(p) {
        return Err(QError::NotSolvedForm);
    }
    let linear: Vec<(i64, &C)> = p
        .iter()
        .filter(|(f, _)| f.a().is_zero() && f.len() == 1)
        .map(|(f, c)| (f.alphas()[0], c))
        .collect();
    for n in 0..=n_max {
        let mut acc = C::zero();
        let mut scale = 0.0;
        for &(al, c) in &linear {
            let t = c.mul(&C::q_pow(q, &Exponent::from_integer(BigInt::from(al * n as i64))));
            scale += t.magnitude();
            acc.add_assign(&t);
        }
        if acc.negligible(if C::EXACT { 0.0 } else { scale.max(1.0) - 1.0 }) {
            return Ok(Uniqueness { holds: false, first_violation: Some(n) });
        }
    }
    Ok(Uniqueness { holds: true, first_violation: None })
}

/// Best rational approximation of `x` with denominator at most `max_den`, if within `tol`.
pub fn recognize_rational(x: f64, max_den: u64, tol: f64) -> Option<Exponent> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(Exponent::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Largest denominator tried when reading `log_q r` as a rational exponent.
pub const MAX_EXPONENT_DENOMINATOR: u64 = 64;

/// `log_q r` as a rational, when it is real and rational up to `1e−9(1+|λ|)`.
fn rational_log(r: Complex64, q: Complex64) -> Option<Exponent> {
    let lam = r.ln() / q.ln();
    if !lam.re.is_finite() || lam.im.abs() > 1e-9 * (1.0 + lam.norm()) {
        return None;
    }
    recognize_rational(lam.re, MAX_EXPONENT_DENOMINATOR, 1e-9 * (1.0 + lam.re.abs()))
}

/// `Ψ` at a cloud point, or `None` when it vanishes identically.
fn indicial_or_none(p: &NumOp, pt: &CloudPoint) -> Option<crate::algebra::UniPoly<Complex64>> {
    let scale: f64 = crate::polygon::factors_at(p, pt).iter().map(|(_, c)| c.norm()).sum();
    let psi = indicial_polynomial(p, pt);
    let kept = crate::algebra::UniPoly::from_terms(
        psi.terms().filter(|(_, c)| c.norm() > EPS0 * (1.0 + scale)).map(|(k, c)| (k, *c)),
    );
    (!kept.is_zero()).then_some(kept)
}

/// Candidate exponents above `μ_min` (or equal to it under `flag_equal`): polygon
/// co-slopes plus rational `log_q` of indicial roots at the relevant vertices.
///
/// An identically vanishing indicial polynomial raises [`QError::InfinitelyMany`]
/// when `strict` is set or when no polygon co-slope qualifies; otherwise that
/// vertex is skipped.
pub fn next_coslopes(p: &NumOp, mu_min: Option<&Exponent>, flag_equal: bool, q: Complex64, strict: bool) -> Result<Vec<Exponent>> {
    let poly = polygon_of(p)?;
    let admit = |mu: &Exponent| match mu_min {
        None => true,
        Some(m) => mu > m || (flag_equal && mu == m),
    };
    let mut out: Vec<Exponent> = poly.coslopes.iter().filter(|m| admit(m)).cloned().collect();
    let from_polygon = !out.is_empty();

    let cl = cloud(p);
    let lowest = mu_min.map(|m| points_at_coslope(&cl, m).iter().map(|pt| pt.ell).min().unwrap_or(0));
    let mut blocked = false;
    for (k, v) in poly.vertices.iter().enumerate() {
        if lowest.is_some_and(|l| v.ell > l) {
            continue;
        }
        let hi = (k > 0).then(|| &poly.coslopes[k - 1]);
        let lo = poly.coslopes.get(k);
        let Some(psi) = indicial_or_none(p, v) else {
            blocked = true;
            continue;
        };
        if psi.strip_order().degree() == Some(0) {
            continue;
        }
        for (r, _) in nonzero_roots(&psi, DEFAULT_TOL)?.iter() {
            let Some(lam) = rational_log(r, q) else { continue };
            let above_lo = lo.is_none_or(|l| lam > *l);
            let below_hi = hi.is_none_or(|h| lam < *h);
            if above_lo && below_hi && admit(&lam) {
                out.push(lam);
            }
        }
    }
    if blocked && (strict || !from_polygon) {
        return Err(QError::InfinitelyMany);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Last exponent of a node.
#[derive(Clone, Debug, PartialEq)]
pub enum Mu {
    NegInf,
    Value(Exponent),
}

/// Node state in the expansion tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Has children.
    Open,
    /// Depth exhausted, or nothing further to add.
    Leaf,
    /// No exponent left while the constant part is nonzero.
    DeadEnd,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Open => "open",
            Status::Leaf => "leaf",
            Status::DeadEnd => "dead_end",
        }
    }
}

/// A monomial `c z^μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub c: Complex64,
    pub mu: Exponent,
}

#[derive(Clone, Debug)]
pub struct ExpansionNode {
    pub mu: Mu,
    /// Operator after translating by every term on the path.
    pub op: NumOp,
    pub term: Option<Term>,
    /// Multiplicity of `c` as a root of the initial polynomial.
    pub multiplicity: usize,
    pub status: Status,
    pub children: Vec<ExpansionNode>,
}

impl ExpansionNode {
    pub fn to_json(&self) -> Value {
        let mu = match &self.mu {
            _ if self.status == Status::DeadEnd => json!("unavailable"),
            Mu::NegInf => json!("-inf"),
            Mu::Value(m) => exponent_json(m),
        };
        let term = match &self.term {
            None => Value::Null,
            Some(t) => json!({ "re": t.c.re, "im": t.c.im, "mu": exponent_json(&t.mu) }),
        };
        json!({
            "mu": mu,
            "term": term,
            "multiplicity": self.multiplicity,
            "status": self.status.as_str(),
            "children": self.children.iter().map(ExpansionNode::to_json).collect::<Vec<_>>(),
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ExpansionNode::size).sum::<usize>()
    }
}

/// Parameters of [`recursive_solve`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub depth: usize,
    pub mu_min: Option<Exponent>,
    pub flag_equal: bool,
    pub q: Complex64,
    pub power_series_only: bool,
    pub prune_order: Option<Exponent>,
    pub strict: bool,
    pub tol: f64,
}

impl SolveOptions {
    pub fn new(depth: usize, q: Complex64) -> Self {
        SolveOptions {
            depth,
            mu_min: None,
            flag_equal: false,
            q,
            power_series_only: false,
            prune_order: None,
            strict: false,
            tol: DEFAULT_TOL,
        }
    }
}

fn has_constant_part(p: &NumOp) -> bool {
    p.factors().any(|f| f.is_empty())
}

/// `T_{cz^μ}P`, with the cancelled point of ordinate 0 on `L_μ` removed exactly.
fn translate_root(p: &NumOp, c: Complex64, mu: &Exponent, q: Complex64) -> Result<NumOp> {
    let nu = points_at_coslope(&cloud(p), mu)
        .first()
        .map(|pt| pt.level(mu))
        .ok_or_else(|| QError::EmptyInput("translation of the zero operator".into()))?;
    let phi = initial_polynomial(p, mu, &q)?;
    let scale: f64 = phi.terms().map(|(k, a)| a.norm() * c.norm().powi(k as i32)).sum();
    let t = translate(p, &c, mu, &q);
    let k = QFactor::constant(nu);
    let drop = t.get(&k).is_some_and(|v| v.norm() <= 1e-8 * (1.0 + scale));
    Ok(if drop { t.filter(|f, _| *f != k) } else { t })
}

/// Depth-`k` tree of candidate initial terms.
pub fn recursive_solve(p: &NumOp, opts: &SolveOptions) -> Result<ExpansionNode> {
    let mu = opts.mu_min.clone().map_or(Mu::NegInf, Mu::Value);
    grow(p.clone(), mu, None, 1, opts.depth, opts.flag_equal, opts)
}

fn grow(op: NumOp, mu: Mu, term: Option<Term>, multiplicity: usize, k: usize, flag_equal: bool, opts: &SolveOptions) -> Result<ExpansionNode> {
    let mut node = ExpansionNode { mu, op, term, multiplicity, status: Status::Leaf, children: Vec::new() };
    if k == 0 || node.op.is_empty() {
        return Ok(node);
    }
    let mu_min = match &node.mu {
        Mu::NegInf => None,
        Mu::Value(m) => Some(m.clone()),
    };
    let mut list = next_coslopes(&node.op, mu_min.as_ref(), flag_equal, opts.q, opts.strict)?;
    if opts.power_series_only {
        list.retain(|m| m.is_integer() && !m.is_negative());
    }
    if list.is_empty() {
        if has_constant_part(&node.op) {
            node.status = Status::DeadEnd;
        }
        return Ok(node);
    }
    for m in list {
        let phi = initial_polynomial(&node.op, &m, &opts.q)?;
        let roots = match nonzero_roots(&phi, opts.tol) {
            Ok(r) => r,
            Err(QError::ZeroPolynomial) if !opts.strict => continue,
            Err(QError::ZeroPolynomial) => return Err(QError::InfinitelyMany),
            Err(e) => return Err(e),
        };
        for (r, mult) in roots.iter() {
            let mut child_op = translate_root(&node.op, r, &m, opts.q)?;
            if let Some(nu) = &opts.prune_order {
                child_op = child_op.filter(|f, _| CloudPoint::new(f.a().clone(), f.len()).level(&m) <= *nu);
            }
            let term = Some(Term { c: r, mu: m.clone() });
            node.children.push(grow(child_op, Mu::Value(m.clone()), term, mult, k - 1, false, opts)?);
        }
    }
    if !node.children.is_empty() {
        node.status = Status::Open;
    }
    Ok(node)
}

/// One root-to-leaf path.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub terms: Vec<Term>,
    /// False when the path ends in a dead end.
    pub complete: bool,
}

impl Expansion {
    /// Dense coefficients `c_0, …, c_d` of an expansion with exponents in ℕ.
    pub fn dense(&self) -> Option<Vec<Complex64>> {
        let mut out: Vec<Complex64> = Vec::new();
        for t in &self.terms {
            if !t.mu.is_integer() || t.mu.is_negative() {
                return None;
            }
            let k = t.mu.to_integer().to_usize()?;
            if out.len() <= k {
                out.resize(k + 1, Complex64::new(0.0, 0.0));
            }
            out[k] += t.c;
        }
        Some(out)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("({})*z^({})", crate::algebra::fmt_complex(t.c), crate::algebra::factor::fmt_exponent(&t.mu)))
            .collect();
        parts.join(" + ")
    }
}

/// Sums of monomials along every root-to-leaf path.
pub fn initial_expansions(tree: &ExpansionNode) -> Vec<Expansion> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(tree, &mut path, &mut out);
    out
}

fn collect(node: &ExpansionNode, path: &mut Vec<Term>, out: &mut Vec<Expansion>) {
    let pushed = node.term.as_ref().map(|t| path.push(t.clone())).is_some();
    if node.children.is_empty() {
        out.push(Expansion { terms: path.clone(), complete: node.status != Status::DeadEnd });
    }
    for ch in &node.children {
        collect(ch, path, out);
    }
    if pushed {
        path.pop();
    }
}

/// A rewrite applied while reducing to solved form.
#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    /// `S_z T_c`.
    Translate(Complex64),
    /// `∂_γ`.
    Derivative(i64),
}

#[derive(Clone, Debug)]
pub struct SolvedForm {
    /// Coefficients `f_0, …, f_{k−1}` consumed by the translations.
    pub prefix: Vec<Complex64>,
    pub steps: Vec<Step>,
    pub op: NumOp,
}

impl SolvedForm {
    /// Replays the steps on the exact operator when every prefix coefficient is rational.
    pub fn replay_exact(&self, p: &ExactOp) -> Option<ExactOp> {
        let mut cur = p.clone();
        for s in &self.steps {
            cur = match s {
                Step::Translate(c) => {
                    if c.im.abs() > 1e-9 * (1.0 + c.norm()) {
                        return None;
                    }
                    let r = recognize_rational(c.re, 1 << 20, 1e-9 * (1.0 + c.re.abs()))?;
                    step_translate_simplify(&cur, &Laurent::constant(&r), &(), 0.0).ok()?
                }
                Step::Derivative(g) => derivative(&cur, *g),
            };
        }
        is_in_solved_form(&cur).then_some(cur)
    }
}

fn nonshifting_alphas(p: &NumOp) -> Vec<i64> {
    let mut out: Vec<i64> = p
        .factors()
        .filter(|f| f.a().is_zero() && f.len() > 1)
        .flat_map(|f| f.alphas().to_vec())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn replay(p: &NumOp, coeffs: &[Complex64], q: Complex64, tol: f64, max_derivatives: usize) -> Option<SolvedForm> {
    let mut cur = p.clone();
    let mut steps = Vec::new();
    let mut used = 0usize;
    let mut derivs = 0usize;
    let done = |cur: &NumOp, steps: &Vec<Step>, used: usize| SolvedForm {
        prefix: coeffs[..used].to_vec(),
        steps: steps.clone(),
        op: cur.clone(),
    };
    while used < coeffs.len() {
        if is_in_solved_form(&cur) {
            return Some(done(&cur, &steps, used));
        }
        let c = coeffs[used];
        let progress = |n: &NumOp| is_in_solved_form(n) || has_nonshifting_part(n);
        match step_translate_simplify(&cur, &c, &q, tol) {
            Ok(n) if progress(&n) => {
                cur = n;
                steps.push(Step::Translate(c));
                used += 1;
                continue;
            }
            _ => {}
        }
        // Stuck at a pivot of ordinate ≥ 2: differentiate before stepping.
        let mut advanced = false;
        for g in nonshifting_alphas(&cur) {
            if derivs >= max_derivatives {
                break;
            }
            let d = derivative(&cur, g).cleaned();
            if is_in_solved_form(&d) {
                steps.push(Step::Derivative(g));
                return Some(done(&d, &steps, used));
            }
            if let Ok(n) = step_translate_simplify(&d, &c, &q, tol) {
                if progress(&n) {
                    steps.push(Step::Derivative(g));
                    steps.push(Step::Translate(c));
                    cur = n;
                    used += 1;
                    derivs += 1;
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            return None;
        }
    }
    is_in_solved_form(&cur).then(|| done(&cur, &steps, used))
}

/// Brings `P` to solved form along power-series prefixes of at most `max_steps` terms.
///
/// An operator already in solved form comes back unchanged with an empty prefix.
pub fn to_solved_form(p: &NumOp, max_steps: usize, q: Complex64, tol: f64) -> Result<Vec<SolvedForm>> {
    if is_in_solved_form(p) {
        return Ok(vec![SolvedForm { prefix: Vec::new(), steps: Vec::new(), op: p.clone() }]);
    }
    let zero = Exponent::zero();
    let first = next_coslopes(p, Some(&zero), true, q, false)?;
    if !first.is_empty() && first.iter().all(|m| !m.is_integer()) {
        return Err(QError::NeedsRamification);
    }
    let mut opts = SolveOptions::new(max_steps, q);
    opts.mu_min = Some(zero);
    opts.flag_equal = true;
    opts.power_series_only = true;
    opts.tol = tol.min(DEFAULT_TOL);
    let tree = recursive_solve(p, &opts)?;
    let max_derivatives = p.length().saturating_sub(1);
    let mut out: Vec<SolvedForm> = Vec::new();
    for e in initial_expansions(&tree) {
        if !e.complete {
            continue;
        }
        let Some(coeffs) = e.dense() else { continue };
        let Some(sf) = replay(p, &coeffs, q, 1e-8, max_derivatives) else { continue };
        let same = |o: &SolvedForm| {
            o.steps.len() == sf.steps.len()
                && o.prefix.len() == sf.prefix.len()
                && o.prefix.iter().zip(&sf.prefix).all(|(a, b)| (a - b).norm() <= 1e-8 * (1.0 + a.norm()))
        };
        if !out.iter().any(same) {
            out.push(sf);
        }
    }
    Ok(out)
}
