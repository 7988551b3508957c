//! Numeric roots of univariate polynomials.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::UniPoly;
use crate::error::{QError, Result};

/// Default absolute/relative tolerance for root finding.
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Distinct roots with multiplicities, ordered by (modulus, argument in `[0, 2π)`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSet {
    #[serde(serialize_with = "ser_complex_vec")]
    pub roots: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    pub residual: f64,
}

fn ser_complex_vec<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl RootSet {
    pub fn empty() -> Self {
        RootSet { roots: Vec::new(), multiplicities: Vec::new(), residual: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of roots counted with multiplicity.
    pub fn total(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Complex64, usize)> + '_ {
        self.roots.iter().copied().zip(self.multiplicities.iter().copied())
    }
}

/// Smallest-modulus root report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallestRoot {
    pub root: Complex64,
    pub multiplicity: usize,
    pub unique_at_modulus: bool,
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn abs_scale(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// Total order used everywhere roots are listed.
pub fn root_order(a: &Complex64, b: &Complex64) -> Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > 1e-9 * (1.0 + ma.max(mb)) {
        return ma.partial_cmp(&mb).unwrap_or(Ordering::Equal);
    }
    canonical_arg(a).partial_cmp(&canonical_arg(b)).unwrap_or(Ordering::Equal)
}

fn canonical_arg(z: &Complex64) -> f64 {
    let t = z.arg();
    if t < -1e-12 {
        t + 2.0 * PI
    } else {
        t.max(0.0)
    }
}

fn tidy(z: Complex64) -> Complex64 {
    let m = z.norm();
    let re = if z.re.abs() <= 1e-14 * m { 0.0 } else { z.re };
    let im = if z.im.abs() <= 1e-14 * m { 0.0 } else { z.im };
    Complex64::new(re, im)
}

/// Aberth–Ehrlich iteration on dense coefficients `p[0] + p[1] x + …` with `p[0] ≠ 0`.
fn aberth(p: &[Complex64], tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let n = p.len() - 1;
    let lead = p[n];
    let cauchy = 1.0 + p[..n].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max);
    let lower = {
        let a0 = p[0].norm();
        a0 / (a0 + p[1..].iter().map(|c| c.norm()).fold(0.0, f64::max))
    };
    let radius = (lower * cauchy).sqrt().clamp(lower, cauchy);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut moved = false;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (v, d) = horner(p, z[k]);
            if v.norm() <= 4.0 * f64::EPSILON * abs_scale(p, z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = v / d;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                z[k] += bump;
                moved = true;
                continue;
            }
            z[k] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                done[k] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    for &r in &z {
        let (v, _) = horner(p, r);
        if !(v.norm() <= tol * abs_scale(p, r).max(f64::MIN_POSITIVE)) {
            return Err(QError::NoConvergence(format!(
                "root finder stalled after {max_iter} iterations"
            )));
        }
    }
    Ok(z)
}

/// Groups nearby approximations, then polishes each cluster centre with
/// Newton's method on the derivative of order `multiplicity − 1`.
fn cluster(p: &[Complex64], z: Vec<Complex64>, tol: f64) -> (Vec<Complex64>, Vec<usize>) {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for r in z {
        let radius = |c: &Complex64| (10.0 * tol).max(1e-7 * (1.0 + c.norm()));
        match groups.iter_mut().find(|g| {
            let c = centroid(g);
            (c - r).norm() <= radius(&c)
        }) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    let mut out = Vec::new();
    for g in groups {
        let m = g.len();
        let mut c = centroid(&g);
        if m > 1 {
            let mut dp = p.to_vec();
            for _ in 0..m - 1 {
                dp = derivative(&dp);
            }
            for _ in 0..50 {
                let (v, d) = horner(&dp, c);
                if d.norm() == 0.0 {
                    break;
                }
                let step = v / d;
                c -= step;
                if step.norm() <= 4.0 * f64::EPSILON * (1.0 + c.norm()) {
                    break;
                }
            }
        }
        out.push((tidy(c), m));
    }
    out.sort_by(|a, b| root_order(&a.0, &b.0));
    out.into_iter().unzip()
}

fn centroid(g: &[Complex64]) -> Complex64 {
    g.iter().sum::<Complex64>() / g.len() as f64
}

/// All complex roots of `p` with multiplicities.
pub fn complex_roots(p: &UniPoly<Complex64>, tol: f64, max_iter: usize) -> Result<RootSet> {
    let p = p.clone().cleaned();
    if p.is_zero() {
        return Err(QError::ZeroPolynomial);
    }
    let order = p.order().unwrap().max(0) as usize;
    let dense = p.dense();
    if dense.len() + order <= 1 {
        return Err(QError::ConstantPolynomial);
    }
    let mut roots = Vec::new();
    let mut mult = Vec::new();
    if order > 0 {
        roots.push(Complex64::new(0.0, 0.0));
        mult.push(order);
    }
    if dense.len() > 1 {
        let z = aberth(&dense, tol, max_iter)?;
        let (r, m) = cluster(&dense, z, tol);
        roots.extend(r);
        mult.extend(m);
    }
    let residual = roots
        .iter()
        .map(|&r| horner(&dense, r).0.norm())
        .fold(0.0, f64::max);
    Ok(RootSet { roots, multiplicities: mult, residual })
}

/// Nonzero roots: the `x`-order is divided out first.
pub fn nonzero_roots(p: &UniPoly<Complex64>, tol: f64) -> Result<RootSet> {
    let p = p.clone().cleaned();
    if p.is_zero() {
        return Err(QError::ZeroPolynomial);
    }
    let stripped = p.strip_order();
    if stripped.degree() == Some(0) {
        return Ok(RootSet::empty());
    }
    complex_roots(&stripped, tol, DEFAULT_MAX_ITER)
}

/// Root of least modulus, for a polynomial with nonzero constant term.
pub fn smallest_modulus_root(p: &UniPoly<Complex64>) -> Result<SmallestRoot> {
    let p = p.clone().cleaned();
    if p.is_zero() {
        return Err(QError::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Err(QError::ConstantPolynomial);
    }
    let rs = complex_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let (root, multiplicity) = rs.iter().next().unwrap();
    let m = root.norm();
    let unique_at_modulus =
        rs.roots.iter().skip(1).all(|r| (r.norm() - m).abs() > 1e-8 * m.max(f64::MIN_POSITIVE));
    Ok(SmallestRoot { root, multiplicity, unique_at_modulus })
}

/// `D = 1/s` with `∑ e^{−s α_i} = 1`; zero when `α₁ = 0`, infinite for one positive index.
pub fn depth_root(alphas: &[i64]) -> Result<f64> {
    let first = *alphas.first().ok_or_else(|| QError::EmptyInput("depth of a factor of length 0".into()))?;
    if first < 0 {
        return Err(QError::NegativeAlpha);
    }
    if first == 0 {
        return Ok(0.0);
    }
    if alphas.len() == 1 {
        return Ok(f64::INFINITY);
    }
    let laplace = |s: f64| alphas.iter().map(|&a| (-s * a as f64).exp()).sum::<f64>();
    let mut hi = 1.0;
    while laplace(hi) >= 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if laplace(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Ok(1.0 / (0.5 * (lo + hi)))
}
