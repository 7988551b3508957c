//! Height, crest, edge and depth of an operator, the q-Borel rescalings, regime
//! classification and empirical constants for divergent solutions.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::algebra::{Coeff, Exponent, ExactOp, ExtComplex, NumOp, QFactor, QOperator, UniPoly};
use crate::error::{QError, Result};
use crate::polygon::exponent_json;
use crate::roots::{complex_roots, smallest_modulus_root, RootSet, SmallestRoot, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::series::{solve_coefficients, NumSeries};
use crate::solver::is_in_solved_form;
use crate::transforms::step_translate_simplify;

fn int(n: i64) -> Exponent {
    Exponent::from_integer(BigInt::from(n))
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `(a, α)` for every factor with positive `a` and positive length.
fn shifting<C: Coeff>(p: &QOperator<C>) -> Result<Vec<(&QFactor, &C, i64)>> {
    let mut out = Vec::new();
    for (f, c) in p.iter() {
        if f.is_empty() || f.a().is_zero() {
            continue;
        }
        match f.a_int() {
            Some(a) if a > 0 => out.push((f, c, a)),
            _ => return Err(QError::NonIntegerExponent(f.a().to_string())),
        }
    }
    Ok(out)
}

fn p0_alpha<C: Coeff>(p: &QOperator<C>, top: bool) -> Option<i64> {
    let it = p.factors().filter(|f| f.a().is_zero() && !f.is_empty());
    if top {
        it.filter_map(|f| f.last_alpha()).max()
    } else {
        it.filter_map(|f| f.first_alpha()).min()
    }
}

fn plus_alpha<C: Coeff>(p: &QOperator<C>, top: bool) -> Option<i64> {
    let it = p.factors().filter(|f| !f.a().is_zero() && !f.is_empty());
    if top {
        it.filter_map(|f| f.last_alpha()).max()
    } else {
        it.filter_map(|f| f.first_alpha()).min()
    }
}

/// `H(P) = max α_ℓ/a` over shifting factors and `h(P)`, the least `a` attaining it.
pub fn height_coheight<C: Coeff>(p: &QOperator<C>) -> Result<(Exponent, Exponent)> {
    let sh = shifting(p)?;
    let big_h = sh
        .iter()
        .map(|(f, _, a)| Exponent::new(BigInt::from(f.last_alpha().unwrap()), BigInt::from(*a)))
        .max()
        .ok_or(QError::NoShiftingPart)?;
    let h = sh
        .iter()
        .filter(|(f, _, a)| int(f.last_alpha().unwrap()) == &big_h * int(*a))
        .map(|(_, _, a)| *a)
        .min()
        .unwrap();
    Ok((big_h, int(h)))
}

/// Crest of an operator with its crest polynomial at a given `f₀`.
#[derive(Clone, Debug)]
pub struct CrestReport<C: Coeff> {
    pub height: Exponent,
    pub coheight: Exponent,
    pub crest: QOperator<C>,
    /// Scope `s(A)` of every shifting crest factor.
    pub scopes: Vec<(QFactor, usize)>,
    /// `𝒞(z) = ∑ P_A s(A) q^{−H a(a−h)/2} f₀^{ℓ−1} z^a`.
    pub poly: UniPoly<C>,
}

impl<C: Coeff> CrestReport<C> {
    /// No shifting crest factor has more than one index.
    pub fn is_linear(&self) -> bool {
        self.crest.factors().all(|f| f.len() <= 1)
    }

    pub fn numeric_poly(&self, q: Complex64) -> UniPoly<Complex64> {
        self.poly.to_numeric(q)
    }

    pub fn roots(&self, q: Complex64) -> Result<RootSet> {
        complex_roots(&self.numeric_poly(q), DEFAULT_TOL, DEFAULT_MAX_ITER)
    }

    pub fn smallest_root(&self, q: Complex64) -> Result<SmallestRoot> {
        smallest_modulus_root(&self.numeric_poly(q))
    }

    pub fn to_json(&self, q: Complex64) -> Value {
        let scopes: Vec<Value> = self.scopes.iter().map(|(f, s)| json!([f.to_string(), s])).collect();
        let mut v = json!({
            "H": exponent_json(&self.height),
            "h": exponent_json(&self.coheight),
            "crest": crate::parse::print_operator(&self.crest),
            "scopes": scopes,
            "crest_poly": self.poly.render("z"),
        });
        if let Ok(rs) = self.roots(q) {
            v["roots"] = json!(rs.roots.iter().map(|z| complex_json(*z)).collect::<Vec<_>>());
            v["multiplicities"] = json!(rs.multiplicities);
            if let Some(r) = rs.roots.first() {
                v["R"] = json!(r.norm());
            }
        }
        v
    }
}

/// Crest `P_{(0;0)}(0;0) + ∑_{α_ℓ = H a} P_A A` and its polynomial at `f₀`.
pub fn crest<C: Coeff>(p: &QOperator<C>, f0: &C, q: &C::Q) -> Result<CrestReport<C>> {
    if p0_alpha(p, true) != Some(0) {
        return Err(QError::NotNormalized("the crest needs max alpha over P0 equal to 0".into()));
    }
    let (big_h, h) = height_coheight(p)?;
    if big_h.is_negative() {
        return Err(QError::NotApplicable("the height is negative".into()));
    }
    let base = QFactor::int(0, &[0]);
    let p00 = p.get(&base).cloned().ok_or_else(|| QError::NotNormalized("no (0;0) term".into()))?;
    let mut crest = QOperator::monomial(base, p00.clone());
    let mut scopes = Vec::new();
    let mut poly = UniPoly::from_terms([(0, p00)]);
    for (f, c, a) in shifting(p)? {
        if int(f.last_alpha().unwrap()) != &big_h * int(a) {
            continue;
        }
        crest.add_term(f.clone(), c.clone());
        let s = f.scope();
        scopes.push((f.clone(), s));
        let e = -(&big_h * int(a) * (int(a) - &h)) / int(2);
        let w = c.mul(&C::from_i64(s as i64)).mul(&C::q_pow(q, &e)).mul(&f0.pow(f.len() as u32 - 1));
        poly.add_term(a, w);
    }
    Ok(CrestReport { height: big_h, coheight: h, crest, scopes, poly })
}

/// `g_n = q^{−H n(n−h)/2} f_n` with an empirical radius of convergence.
#[derive(Clone, Debug)]
pub struct BorelTransform {
    pub values: Vec<ExtComplex>,
    pub radius: Option<f64>,
}

/// Crest q-Borel transform of a numeric series.
pub fn crest_borel(f: &NumSeries, big_h: &Exponent, h: &Exponent) -> BorelTransform {
    let values: Vec<ExtComplex> = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let nn = int(n as i64);
            let e = -(big_h * &nn * (&nn - h)) / int(2);
            c.mul(&ExtComplex::q_pow(&f.q, &e))
        })
        .collect();
    let lag = h.to_integer().to_usize().unwrap_or(1).max(1);
    let n = values.len();
    let radius = (n > lag)
        .then(|| (&values[n - 1 - lag], &values[n - 1]))
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .map(|(a, b)| ((a.ln_norm() - b.ln_norm()) / lag as f64).exp());
    BorelTransform { values, radius }
}

/// Elevation, edge and edge polynomial.
#[derive(Clone, Debug)]
pub struct EdgeReport<C: Coeff> {
    pub elevation: Exponent,
    pub edge: QOperator<C>,
    /// `𝓔(z) = ∑_{A ∈ edge} P_A q^{−E a²/2} z^a`.
    pub poly: UniPoly<C>,
}

/// `E(P) = min α₁/a` over shifting factors, with the edge `α₁ = E a`.
pub fn edge_elevation<C: Coeff>(p: &QOperator<C>, q: &C::Q) -> Result<EdgeReport<C>> {
    if !is_in_solved_form(p) {
        return Err(QError::NotSolvedForm);
    }
    if p0_alpha(p, false) != Some(0) {
        return Err(QError::NotNormalized("the edge needs min alpha over P0 equal to 0".into()));
    }
    let e = shifting(p)?
        .iter()
        .map(|(f, _, a)| Exponent::new(BigInt::from(f.first_alpha().unwrap()), BigInt::from(*a)))
        .min()
        .ok_or(QError::NoShiftingPart)?;
    let mut edge = QOperator::new();
    let mut poly = UniPoly::zero();
    for (f, c) in p.iter() {
        let (Some(first), Some(a)) = (f.first_alpha(), f.a_int()) else { continue };
        if int(first) == &e * int(a) {
            edge.add_term(f.clone(), c.clone());
            poly.add_term(a, c.mul(&C::q_pow(q, &(-(&e * int(a * a)) / int(2)))));
        }
    }
    Ok(EdgeReport { elevation: e, edge, poly })
}

/// Smallest `s` making `q^{−s a²/2} [z^a]P` bounded in degree: `max 2 deg_q P_A / a²`
/// over factors with `a ≥ 1`.
pub fn coefficient_gevrey_order(p: &ExactOp) -> Option<Exponent> {
    p.iter()
        .filter_map(|(f, c)| {
            let a = f.a_int().filter(|&a| a >= 1)?;
            Some(c.degree()? * int(2) / int(a * a))
        })
        .max()
}

/// Depth `D(P)` and co-depth `d(P)`.
pub fn depth_codepth<C: Coeff>(p: &QOperator<C>) -> Result<(f64, f64)> {
    if p0_alpha(p, false) != Some(0) {
        return Err(QError::NotNormalized("the depth needs min alpha over P0 equal to 0".into()));
    }
    if plus_alpha(p, false).is_some_and(|m| m < 0) {
        return Err(QError::NegativeAlpha);
    }
    let sh = shifting(p)?;
    if sh.is_empty() {
        return Err(QError::NoShiftingPart);
    }
    let mut depths = Vec::with_capacity(sh.len());
    for (f, _, a) in &sh {
        let d = crate::roots::depth_root(f.alphas())?;
        let co = if f.len() > 1 { *a as f64 / (f.len() - 1) as f64 } else { f64::INFINITY };
        depths.push((d, co));
    }
    let best = depths.iter().map(|x| x.0).fold(f64::INFINITY, f64::min);
    let same = |d: f64| d == best || (d - best).abs() <= 1e-12 * best.abs();
    let co = depths.iter().filter(|x| same(x.0)).map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    Ok((best, co))
}

/// Coarse asymptotic regime of the power-series solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Analytic,
    Entire,
    Divergent,
    Balanced,
    Other,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Analytic => "Analytic",
            Regime::Entire => "Entire",
            Regime::Divergent => "Divergent",
            Regime::Balanced => "Balanced",
            Regime::Other => "Other",
        })
    }
}

/// Regime with the normalizing shift of the σ-indices and the growth template.
#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport {
    pub tag: Regime,
    /// `k` in `A ↦ (a; α + k)` used to normalize `P₀`.
    pub shift: i64,
    /// Whether the conclusion is reached through `q ↦ 1/q`.
    pub reflected: bool,
    pub height: Option<(Exponent, Exponent)>,
    pub growth: String,
}

impl RegimeReport {
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "regime": self.tag.to_string(),
            "shift": self.shift,
            "reflected": self.reflected,
            "growth": self.growth,
        });
        if let Some((h1, h2)) = &self.height {
            v["H"] = exponent_json(h1);
            v["h"] = exponent_json(h2);
        }
        v
    }
}

fn shifted<C: Coeff>(p: &QOperator<C>, k: i64, negate: bool) -> QOperator<C> {
    p.map_factors(|f, c| {
        let al: Vec<i64> = f.alphas().iter().map(|&x| if negate { -x } else { x } + k).collect();
        (QFactor::new(f.a().clone(), al), c.clone())
    })
}

/// Classifies by comparing the extreme σ-indices of `P₀` and `P₊` on the side
/// selected by `|q|`.
pub fn classify_regime<C: Coeff>(p: &QOperator<C>, q: Complex64) -> RegimeReport {
    let other = |growth: &str| RegimeReport { tag: Regime::Other, shift: 0, reflected: false, height: None, growth: growth.into() };
    if !is_in_solved_form(p) {
        return other("not in solved form");
    }
    let m = q.norm();
    if (m - 1.0).abs() < 1e-12 || m == 0.0 {
        return other("|q| = 1 or q = 0");
    }
    let small = m < 1.0;
    let (Some(p0), plus) = (p0_alpha(p, !small), plus_alpha(p, !small)) else { return other("empty nonshifting part") };
    let shift = -p0;
    let Some(plus) = plus else {
        return RegimeReport { tag: Regime::Analytic, shift, reflected: false, height: None, growth: "f is a polynomial in z".into() };
    };
    let gap = plus + shift;
    let divergent_height = |negate: bool| {
        let k = if negate { p0 } else { shift };
        height_coheight(&shifted(p, k, negate)).ok()
    };
    let (tag, reflected) = match (small, gap.signum()) {
        (true, 0) => (Regime::Analytic, false),
        (true, 1) => (Regime::Entire, false),
        (true, _) => (Regime::Divergent, true),
        (false, 1) => (Regime::Divergent, false),
        (false, 0) => (Regime::Balanced, true),
        (false, _) => (Regime::Entire, true),
    };
    let height = (tag == Regime::Divergent).then(|| divergent_height(reflected)).flatten();
    let growth = match tag {
        Regime::Analytic | Regime::Balanced => "f_n = O(c^-n): convergent".to_string(),
        Regime::Entire => match depth_codepth(&shifted(p, if reflected { p0 } else { shift }, reflected)) {
            Ok((d, _)) => format!("f_n decays like q^(D n log n + O(n)) with D = {d}"),
            Err(_) => "f_n decays faster than geometrically".to_string(),
        },
        Regime::Divergent => match &height {
            Some((h1, h2)) => format!("f_n ~ q^(H n(n-h)/2) R^-n with H = {h1}, h = {h2}"),
            None => "f_n ~ q^(H n(n-h)/2) R^-n".to_string(),
        },
        Regime::Other => String::new(),
    };
    RegimeReport { tag, shift, reflected, height, growth }
}

/// Operator reached by translating and simplifying until the crest is linear.
#[derive(Clone, Debug)]
pub struct Linearized<C: Coeff> {
    pub op: QOperator<C>,
    /// `f₀` of each consumed step, so `f = prefix₀ + z(prefix₁ + z(… + z g))`.
    pub prefix: Vec<C>,
    pub steps: usize,
    /// Height of every operator visited, the final one included.
    pub heights: Vec<Exponent>,
}

/// Repeats `P ← S_z T_{f₀} P` until the crest is linear.
pub fn linearize_crest<C: Coeff>(p: &QOperator<C>, q: &C::Q, max_steps: usize, tol: f64) -> Result<Linearized<C>> {
    if p0_alpha(p, true) != Some(0) {
        return Err(QError::NotNormalized("needs max alpha over P0 equal to 0".into()));
    }
    if !plus_alpha(p, true).is_some_and(|m| m > 0) {
        return Err(QError::NotDivergentRegime("needs max alpha over P+ above that of P0".into()));
    }
    let mut op = p.clone();
    let mut prefix = Vec::new();
    let mut heights = Vec::new();
    loop {
        let f0 = solve_coefficients(&op, q, 0, None)?.coeffs.remove(0);
        let report = crest(&op, &f0, q)?;
        heights.push(report.height.clone());
        if report.is_linear() {
            return Ok(Linearized { op, steps: prefix.len(), prefix, heights });
        }
        if prefix.len() == max_steps {
            return Err(QError::MaxStepsExceeded {
                steps: max_steps,
                heights: heights.iter().map(|h| h.to_string()).collect(),
            });
        }
        op = step_translate_simplify(&op, &f0, q, tol)?;
        prefix.push(f0);
    }
}

/// How the normalized sequence was formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// One shifting crest factor: phase `w^{-n}` with `w^a` from that factor.
    SingleFactor,
    /// A unique simple root `ζ` of smallest modulus: factor `ζⁿ`.
    UniqueRoot,
    /// Several roots share the smallest modulus: factor `|ζ|ⁿ` only.
    ModulusOnly,
}

/// Tail statistics of one residue class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassEstimate {
    pub residue: usize,
    pub estimate: Complex64,
    /// Largest difference between consecutive samples in the tail window.
    pub uncertainty: f64,
    /// Difference between the last two samples.
    pub final_difference: f64,
    pub samples: usize,
}

/// Empirical constants `c_m` in `f_n ≈ c_{n mod a} q^{H n(n−h)/2} ρⁿ`.
#[derive(Clone, Debug)]
pub struct DivergentReport {
    pub height: Exponent,
    pub coheight: Exponent,
    pub radius: f64,
    pub roots: RootSet,
    pub normalization: Normalization,
    pub period: usize,
    pub normalized: Vec<Complex64>,
    pub classes: Vec<ClassEstimate>,
}

impl DivergentReport {
    pub fn to_json(&self) -> Value {
        let classes: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                json!({
                    "residue": c.residue,
                    "estimate": complex_json(c.estimate),
                    "uncertainty": c.uncertainty,
                    "final_difference": c.final_difference,
                    "samples": c.samples,
                })
            })
            .collect();
        json!({
            "H": exponent_json(&self.height),
            "h": exponent_json(&self.coheight),
            "R": self.radius,
            "roots": self.roots.roots.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            "normalization": format!("{:?}", self.normalization),
            "period": self.period,
            "classes": classes,
        })
    }

    /// `n,normalized_value_re,normalized_value_im,residue_class` rows.
    pub fn plot_csv(&self) -> String {
        let mut s = String::from("n,normalized_value_re,normalized_value_im,residue_class\n");
        for (n, v) in self.normalized.iter().enumerate() {
            s.push_str(&format!("{n},{},{},{}\n", v.re, v.im, n % self.period));
        }
        s
    }
}

/// Normalizes `f_n` by the predicted growth and averages the tail per residue class.
pub fn divergent_estimate(p: &NumOp, f: &NumSeries) -> Result<DivergentReport> {
    let q = f.q;
    if q.norm() <= 1.0 || p0_alpha(p, true) != Some(0) || !plus_alpha(p, true).is_some_and(|m| m > 0) {
        return Err(QError::NotDivergentRegime("needs |q| > 1 and 0 = max alpha over P0 < max alpha over P+".into()));
    }
    let f0 = f.coeffs.first().ok_or_else(|| QError::EmptyInput("empty series".into()))?.to_complex();
    let report = crest(p, &f0, &q)?;
    let roots = report.roots(q)?;
    let smallest = report.smallest_root(q)?;
    let radius = smallest.root.norm();
    let factors = shifting(&report.crest)?;
    let (normalization, period, ln_w) = if factors.len() == 1 {
        let a = factors[0].2 as usize;
        let top = report.poly.coeff(a as i64);
        let p00 = report.poly.coeff(0);
        (Normalization::SingleFactor, a, (-top / p00).ln() / a as f64)
    } else if smallest.unique_at_modulus && smallest.multiplicity == 1 {
        (Normalization::UniqueRoot, 1, -smallest.root.ln())
    } else {
        (Normalization::ModulusOnly, 1, Complex64::new(-radius.ln(), 0.0))
    };
    let n_max = f.len() - 1;
    if n_max < 4 * period {
        return Err(QError::NotApplicable(format!("need at least {} coefficients", 4 * period + 1)));
    }
    let (big_h, h) = (report.height.clone(), report.coheight.clone());
    let normalized: Vec<Complex64> = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let nn = int(n as i64);
            let e = -(&big_h * &nn * (&nn - &h)) / int(2);
            c.mul(&ExtComplex::q_pow(&q, &e)).mul(&ExtComplex::exp(-ln_w * n as f64)).to_complex()
        })
        .collect();
    let start = (3 * n_max).div_ceil(4);
    let classes = (0..period)
        .map(|m| {
            let idx: Vec<usize> = (start..=n_max).filter(|n| n % period == m).collect();
            let vals: Vec<Complex64> = idx.iter().map(|&n| normalized[n]).collect();
            let estimate = vals.iter().sum::<Complex64>() / vals.len().max(1) as f64;
            let diffs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
            ClassEstimate {
                residue: m,
                estimate,
                uncertainty: diffs.iter().copied().fold(0.0, f64::max),
                final_difference: diffs.last().copied().unwrap_or(f64::INFINITY),
                samples: vals.len(),
            }
        })
        .collect();
    Ok(DivergentReport { height: big_h, coheight: h, radius, roots, normalization, period, normalized, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Laurent};
    use crate::series::{solve_coefficients, solve_numeric};
    use crate::testutil::{cq, exact_op, fixture, fixture_exact, qcatalan};
    use crate::transforms::translate;
    use proptest::prelude::*;

    fn to_f64(e: &Exponent) -> f64 {
        e.to_f64().unwrap_or(f64::NAN)
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn heights_of_fixtures() {
        assert_eq!(height_coheight(&fixture_exact("drake1")).unwrap(), (rat(2, 1), rat(1, 1)));
        assert_eq!(height_coheight(&fixture_exact("drake2")).unwrap(), (rat(1, 2), rat(2, 1)));
        assert_eq!(height_coheight(&exact_op(&[(1, 3, &[5])])).unwrap(), (rat(5, 3), rat(3, 1)));
        assert_eq!(height_coheight(&exact_op(&[(1, 0, &[0])])).unwrap_err(), QError::NoShiftingPart);
    }

    #[test]
    fn crest_of_running_example() {
        let p = fixture_exact("running8");
        let r = crest(&p, &Laurent::from_i64(2), &()).unwrap();
        let expect = exact_op(&[(1, 0, &[0]), (-5, 1, &[0, 1, 1]), (-3, 2, &[1, 2, 2, 2])]);
        assert_eq!(r.crest, expect);
        assert_eq!(r.poly, UniPoly::from_terms([(0, cq(1, 0)), (1, cq(-40, 0)), (2, cq(-72, -1))]));
        let root = r.smallest_root(c(2.0)).unwrap().root;
        assert!((root - c((109f64.sqrt() - 10.0) / 18.0)).norm() < 1e-10);
        assert!(r.crest.factors().filter(|f| !f.a().is_zero()).all(|f| int(f.last_alpha().unwrap()) == &r.height * f.a()));
    }

    #[test]
    fn crest_polynomial_with_symbolic_start() {
        let p = fixture_exact("running8");
        for t in 1..4i64 {
            let r = crest(&p, &Laurent::from_i64(t), &()).unwrap();
            let expect = UniPoly::from_terms([(0, cq(1, 0)), (1, cq(-10 * t * t, 0)), (2, cq(-9 * t * t * t, -1))]);
            assert_eq!(r.poly, expect);
        }
    }

    #[test]
    fn crest_of_drake2_and_qcatalan() {
        let r = crest(&fixture_exact("drake2"), &Laurent::one(), &()).unwrap();
        assert_eq!(r.crest, ExactOp::from_terms([(QFactor::int(0, &[0]), cq(1, 0)), (QFactor::int(2, &[0, 1]), cq(-1, 1))]));
        assert_eq!(r.poly, UniPoly::from_terms([(0, cq(1, 0)), (2, cq(-1, 1))]));
        let r = crest(&qcatalan(), &Laurent::from_i64(3), &()).unwrap();
        assert_eq!(r.poly, UniPoly::from_terms([(0, cq(1, 0)), (1, cq(-3, 0))]));
        assert!(!r.is_linear());
    }

    #[test]
    fn crest_needs_normalized_p0() {
        let p = exact_op(&[(1, 0, &[1]), (-1, 0, &[]), (-1, 1, &[0, 2])]);
        assert_eq!(crest(&p, &Laurent::one(), &()).unwrap_err().name(), "NotNormalized");
    }

    #[test]
    fn borel_of_gevrey_half() {
        let q = c(2.0);
        let f = solve_numeric(&fixture("gevrey_half").to_numeric(q), q, 30, None).unwrap();
        let (big_h, h) = height_coheight(&fixture_exact("gevrey_half")).unwrap();
        assert_eq!((big_h.clone(), h.clone()), (rat(1, 1), rat(1, 1)));
        let b = crest_borel(&f, &big_h, &h);
        for n in 1..=30usize {
            let expect = 2f64.powf(n as f64 / 2.0) * 2f64.powi(n as i32 - 1);
            assert!((b.values[n].to_complex() - c(expect)).norm() <= 1e-10 * expect);
        }
        assert!((b.radius.unwrap() - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-10);
        let same = crest_borel(&f, &rat(0, 1), &h);
        assert_eq!(same.values, f.coeffs);
    }

    #[test]
    fn borel_radius_of_drake1() {
        let q = c(2.0);
        let p = fixture("drake1").to_numeric(q);
        let f = solve_numeric(&p, q, 60, None).unwrap();
        let r = crest(&p, &c(1.0), &q).unwrap();
        let b = crest_borel(&f, &r.height, &r.coheight);
        let big_r = r.smallest_root(q).unwrap().root.norm();
        assert!((b.radius.unwrap() / big_r - 1.0).abs() < 0.05, "{:?} vs {big_r}", b.radius);
    }

    #[test]
    fn edge_examples() {
        let p = exact_op(&[(-1, 0, &[]), (1, 0, &[0]), (1, 1, &[1])]);
        let e = edge_elevation(&p, &()).unwrap();
        assert_eq!(e.elevation, rat(1, 1));
        let expect = UniPoly::from_terms([(0, cq(1, 0)), (1, Laurent::q_pow(&rat(-1, 2)))]);
        assert_eq!(e.poly, expect);
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[0]), (-1, 2, &[3])]);
        assert_eq!(edge_elevation(&p, &()).unwrap().elevation, rat(0, 1));
        assert_eq!(edge_elevation(&exact_op(&[(1, 0, &[0]), (-1, 0, &[])]), &()).unwrap_err(), QError::NoShiftingPart);
    }

    #[test]
    fn elevation_versus_coefficient_growth() {
        let mut p = exact_op(&[(1, 0, &[0]), (-1, 0, &[])]);
        for k in 1..=10 {
            p.add_term(QFactor::int(k, &[k]), Laurent::from_i64(-1));
        }
        assert_eq!(edge_elevation(&p, &()).unwrap().elevation, rat(1, 1));
        assert_eq!(coefficient_gevrey_order(&p), Some(rat(0, 1)));
        assert_eq!(coefficient_gevrey_order(&fixture_exact("gevrey_half")), Some(rat(1, 1)));
    }

    #[test]
    fn depth_examples() {
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[1, 1])]);
        let (d, co) = depth_codepth(&p).unwrap();
        assert!((d - 1.0 / std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(co, 1.0);
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[0, 2]), (-1, 2, &[1, 1])]);
        assert_eq!(depth_codepth(&p).unwrap().0, 0.0);
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[2]), (-1, 2, &[1])]);
        assert_eq!(depth_codepth(&p).unwrap().0, f64::INFINITY);
    }

    #[test]
    fn entire_solution_decay() {
        let q = c(0.5);
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[1, 1])]);
        let (d, co) = depth_codepth(&p).unwrap();
        let f = solve_numeric(&p.to_numeric(q), q, 100, None).unwrap();
        for n in [25usize, 50, 100] {
            let x = n as f64;
            let log_g = f.coeffs[n].ln_norm() - d * (x + co) * x.ln() * q.norm().ln();
            assert!((log_g / x).exp() < 1e3, "n={n}: {}", (log_g / x).exp());
        }
    }

    #[test]
    fn regimes() {
        let cat = qcatalan();
        assert_eq!(classify_regime(&cat, c(0.5)).tag, Regime::Analytic);
        let r = classify_regime(&cat, c(2.0));
        assert_eq!(r.tag, Regime::Divergent);
        assert_eq!(r.height, Some((rat(1, 1), rat(1, 1))));
        let bars = fixture_exact("bargraphs");
        assert_eq!(classify_regime(&bars, c(0.4)).tag, Regime::Analytic);
        assert_eq!(classify_regime(&bars, c(2.5)).tag, Regime::Balanced);
        let entire = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[1, 1])]);
        assert_eq!(classify_regime(&entire, c(0.5)).tag, Regime::Entire);
        assert_eq!(classify_regime(&fixture_exact("qpainleve1"), c(2.0)).tag, Regime::Other);
    }

    #[test]
    fn jones_regimes() {
        let j = fixture_exact("jones8");
        let big = classify_regime(&j, c(2.0));
        assert_eq!((big.tag, big.shift, big.reflected), (Regime::Divergent, -6, false));
        assert_eq!(big.height, Some((rat(2, 1), rat(1, 1))));
        let small = classify_regime(&j, c(0.5));
        assert_eq!((small.tag, small.reflected), (Regime::Divergent, true));
        assert_eq!(small.height, Some((rat(2, 1), rat(1, 1))));
    }

    #[test]
    fn linearize_qcatalan() {
        let l = linearize_crest(&qcatalan(), &(), 5, 0.0).unwrap();
        assert_eq!(l.steps, 1);
        assert_eq!(l.prefix, vec![Laurent::one()]);
        let r = crest(&l.op, &Laurent::one(), &()).unwrap();
        assert_eq!(r.crest, ExactOp::from_terms([(QFactor::int(0, &[0]), cq(1, 0)), (QFactor::int(1, &[1]), cq(-1, 1))]));
    }

    #[test]
    fn linearize_in_two_steps() {
        let l = linearize_crest(&fixture_exact("crest_two_steps"), &(), 5, 0.0).unwrap();
        assert_eq!(l.steps, 2);
        assert_eq!(l.prefix, vec![Laurent::one(), Laurent::from_i64(-1)]);
        // h = q² z − 2q³ z² h(qz) + q⁴ z³ h(qz)², as h − (…) = 0.
        let expect = ExactOp::from_terms([
            (QFactor::int(0, &[0]), cq(1, 0)),
            (QFactor::int(1, &[]), cq(-1, 2)),
            (QFactor::int(2, &[1]), cq(2, 3)),
            (QFactor::int(3, &[1, 1]), cq(-1, 4)),
        ]);
        assert_eq!(l.op, expect);
        assert_eq!(l.heights, vec![rat(1, 1), rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn linearize_does_not_terminate() {
        let p = fixture_exact("crest_nonterminating");
        match linearize_crest(&p, &(), 5, 0.0).unwrap_err() {
            QError::MaxStepsExceeded { steps, heights } => {
                assert_eq!(steps, 5);
                assert_eq!(heights, vec!["1", "1/2", "1/3", "1/4", "1/5", "1/6"]);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn drake1_constant_converges() {
        let q = c(2.0);
        let p = fixture("drake1").to_numeric(q);
        let f = solve_numeric(&p, q, 60, None).unwrap();
        let r = divergent_estimate(&p, &f).unwrap();
        assert_eq!(r.period, 1);
        let cl = &r.classes[0];
        assert!(cl.estimate.re > 0.0 && cl.estimate.im.abs() < 1e-9);
        assert!(cl.final_difference < 1e-6);
        let direct: Vec<f64> = (50..=60).map(|n| f.coeffs[n].ln_norm() - (n * n) as f64 * 2f64.ln()).collect();
        assert!((direct[10].exp() - cl.estimate.re).abs() < 1e-6);
        assert!((direct[10] - direct[9]).abs() < (direct[1] - direct[0]).abs() + 1e-12);
    }

    #[test]
    fn drake2_classes_converge() {
        let q = c(2.0);
        let p = fixture("drake2").to_numeric(q);
        let f = solve_numeric(&p, q, 60, None).unwrap();
        let r = divergent_estimate(&p, &f).unwrap();
        assert_eq!((r.period, r.normalization), (2, Normalization::SingleFactor));
        for cl in &r.classes {
            assert!(cl.final_difference < 1e-6 && cl.estimate.norm() > 1e-6, "{cl:?}");
        }
        assert!(r.plot_csv().lines().count() == 62);
    }

    #[test]
    fn estimate_needs_divergent_regime() {
        let q = c(0.5);
        let p = qcatalan().to_numeric(q);
        let f = solve_numeric(&p, q, 20, None).unwrap();
        assert_eq!(divergent_estimate(&p, &f).unwrap_err().name(), "NotDivergentRegime");
    }

    #[test]
    fn degree_tracks_height() {
        for name in ["qcatalan", "running8"] {
            let p = fixture_exact(name);
            let f = solve_coefficients(&p, &(), 25, None).unwrap();
            let (big_h, h) = height_coheight(&p).unwrap();
            let gaps: Vec<f64> = (5..=25i64)
                .map(|n| to_f64(&(f.coeffs[n as usize].degree().unwrap() - &big_h * int(n) * (int(n) - &h) / int(2))))
                .collect();
            let spread = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - gaps.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(spread <= 4.0, "{name}: {gaps:?}");
        }
    }

    fn arb_operator() -> impl Strategy<Value = ExactOp> {
        let factor = (0i64..4, prop::collection::vec(0i64..4, 1..4), 1i64..5);
        prop::collection::vec(factor, 1..6).prop_map(|fs| {
            let mut p = exact_op(&[(1, 0, &[0]), (-1, 0, &[])]);
            p.add_term(QFactor::int(1, &[1]), Laurent::from_i64(1));
            for (a, al, c) in fs {
                p.add_term(QFactor::int(a, &al), Laurent::from_i64(c));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn translation_preserves_height(p in arb_operator(), cc in 1i64..4) {
            let t = translate(&p, &Laurent::from_i64(cc), &rat(0, 1), &());
            let (h0, c0) = height_coheight(&p).unwrap();
            let (h1, c1) = height_coheight(&t).unwrap();
            prop_assert_eq!(h0, h1);
            prop_assert!(c1 >= c0);
        }
    }
}
