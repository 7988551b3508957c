//! Cloud of points, Newton-Puiseux polygon, indicial and initial polynomials.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::algebra::{Coeff, Exponent, QFactor, QOperator, UniPoly};
use crate::error::{QError, Result};

/// A point `(a, ℓ)` of the cloud.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CloudPoint {
    pub a: Exponent,
    pub ell: usize,
}

impl CloudPoint {
    pub fn new(a: Exponent, ell: usize) -> Self {
        CloudPoint { a, ell }
    }

    pub fn int(a: i64, ell: usize) -> Self {
        CloudPoint { a: Exponent::from_integer(a.into()), ell }
    }

    /// `a + μℓ`.
    pub fn level(&self, mu: &Exponent) -> Exponent {
        &self.a + mu * Exponent::from_integer(BigInt::from(self.ell))
    }
}

/// Vertices from lowest to highest ordinate and the co-slopes of the edges between them.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    pub vertices: Vec<CloudPoint>,
    pub coslopes: Vec<Exponent>,
}

fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn exponent_json(e: &Exponent) -> Value {
    json!([int_json(e.numer()), int_json(e.denom())])
}

impl NewtonPolygon {
    /// `{"vertices":[[a_num,a_den,ell],…],"coslopes":[[num,den],…]}`.
    pub fn to_json(&self) -> Value {
        let vertices: Vec<Value> = self
            .vertices
            .iter()
            .map(|v| json!([int_json(v.a.numer()), int_json(v.a.denom()), v.ell]))
            .collect();
        let coslopes: Vec<Value> = self.coslopes.iter().map(exponent_json).collect();
        json!({ "vertices": vertices, "coslopes": coslopes })
    }

    /// Intercept `ν` of edge `k`, so that the edge lies on `a + μℓ = ν`.
    pub fn intercept(&self, k: usize) -> Exponent {
        self.vertices[k].level(&self.coslopes[k])
    }
}

pub fn cloud<C: Coeff>(p: &QOperator<C>) -> BTreeSet<CloudPoint> {
    p.factors().map(|f| CloudPoint::new(f.a().clone(), f.len())).collect()
}

/// Factors of `p` sitting at the cloud point `pt`.
pub fn factors_at<C: Coeff>(p: &QOperator<C>, pt: &CloudPoint) -> Vec<(QFactor, C)> {
    p.iter()
        .filter(|(f, _)| f.len() == pt.ell && f.a() == &pt.a)
        .map(|(f, c)| (f.clone(), c.clone()))
        .collect()
}

/// One point per ordinate, the one with least abscissa, by increasing ordinate.
pub fn leftmost_points<'a, I: IntoIterator<Item = &'a CloudPoint>>(cloud: I) -> Vec<CloudPoint> {
    let mut best: BTreeMap<usize, Exponent> = BTreeMap::new();
    for p in cloud {
        best.entry(p.ell)
            .and_modify(|a| {
                if p.a < *a {
                    *a = p.a.clone();
                }
            })
            .or_insert_with(|| p.a.clone());
    }
    best.into_iter().map(|(ell, a)| CloudPoint { a, ell }).collect()
}

fn coslope(v: &CloudPoint, p: &CloudPoint) -> Exponent {
    let dy = Exponent::from_integer(BigInt::from(v.ell as i64 - p.ell as i64));
    (&p.a - &v.a) / dy
}

/// Lower-left hull of leftmost points given by strictly increasing ordinate.
pub fn newton_puiseux_polygon(points: &[CloudPoint]) -> Result<NewtonPolygon> {
    if points.is_empty() {
        return Err(QError::EmptyInput("polygon of an empty cloud".into()));
    }
    let mut vertices = vec![points[0].clone()];
    let mut coslopes = Vec::new();
    let mut k = 0;
    while k + 1 < points.len() {
        let v = &points[k];
        let mut best: Option<(usize, Exponent)> = None;
        for (j, p) in points.iter().enumerate().skip(k + 1) {
            let mu = coslope(v, p);
            if best.as_ref().is_none_or(|(_, m)| mu >= *m) {
                best = Some((j, mu));
            }
        }
        let (j, mu) = best.unwrap();
        vertices.push(points[j].clone());
        coslopes.push(mu);
        k = j;
    }
    Ok(NewtonPolygon { vertices, coslopes })
}

/// Convenience: polygon of an operator.
pub fn polygon_of<C: Coeff>(p: &QOperator<C>) -> Result<NewtonPolygon> {
    newton_puiseux_polygon(&leftmost_points(&cloud(p)))
}

/// Cloud points minimizing `a + μℓ`.
pub fn points_at_coslope<'a, I: IntoIterator<Item = &'a CloudPoint>>(cloud: I, mu: &Exponent) -> Vec<CloudPoint> {
    let mut best: Option<Exponent> = None;
    let mut out: Vec<CloudPoint> = Vec::new();
    for p in cloud {
        let lv = p.level(mu);
        match &best {
            Some(b) if lv > *b => {}
            Some(b) if lv == *b => out.push(p.clone()),
            _ => {
                best = Some(lv);
                out = vec![p.clone()];
            }
        }
    }
    out.sort();
    out
}

/// `Ψ_{P,pt}(t) = ∑_{A at pt} P_A t^{α(A)}`.
pub fn indicial_polynomial<C: Coeff>(p: &QOperator<C>, pt: &CloudPoint) -> UniPoly<C> {
    UniPoly::from_terms(factors_at(p, pt).into_iter().map(|(f, c)| (f.alpha_sum(), c)))
}

/// `Φ_{P,μ}(c) = ∑_{(b,m) ∈ L_μ} c^m Ψ_{P,(b,m)}(q^μ)`.
pub fn initial_polynomial<C: Coeff>(p: &QOperator<C>, mu: &Exponent, q: &C::Q) -> Result<UniPoly<C>> {
    let cl = cloud(p);
    if cl.is_empty() {
        return Err(QError::EmptyInput("initial polynomial of the zero operator".into()));
    }
    let on_line = points_at_coslope(&cl, mu);
    let mut phi = UniPoly::zero();
    for pt in &on_line {
        for (f, c) in factors_at(p, pt) {
            let w = mu * Exponent::from_integer(BigInt::from(f.alpha_sum()));
            phi.add_term(pt.ell as i64, c.mul(&C::q_pow(q, &w)));
        }
    }
    Ok(phi.cleaned())
}
