//! Operator rewrites: translation, simplification by `z`, σ-conjugation,
//! reflection, argument scaling, derivatives and ramification.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{Coeff, Exponent, QFactor, QOperator, EPS0};
use crate::error::{QError, Result};

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

fn int(n: i64) -> Exponent {
    Exponent::from_integer(BigInt::from(n))
}

/// `T_{cz^μ}P`, by substituting `Y_i ← c q^{iμ} z^μ + Y_i` and collecting terms.
pub fn translate<C: Coeff>(p: &QOperator<C>, c: &C, mu: &Exponent, q: &C::Q) -> QOperator<C> {
    if c.is_zero() {
        return p.clone();
    }
    // Each coefficient with the sum of the magnitudes of its contributions.
    let mut acc: BTreeMap<QFactor, (C, f64)> = BTreeMap::new();
    for (f, pa) in p.iter() {
        // Group equal indices: (α, multiplicity, c q^{αμ}).
        let mut groups: Vec<(i64, usize, C)> = Vec::new();
        for &al in f.alphas() {
            match groups.last_mut() {
                Some((g, m, _)) if *g == al => *m += 1,
                _ => groups.push((al, 1, c.mul(&C::q_pow(q, &(mu * int(al)))))),
            }
        }
        // Enumerate how many Y's are kept from each group.
        let mut keep = vec![0usize; groups.len()];
        loop {
            let mut coef = pa.clone();
            let mut alphas = Vec::new();
            let mut replaced = 0usize;
            for (g, &k) in groups.iter().zip(&keep) {
                let (al, m, mono) = g;
                coef = coef.mul(&C::from_i64(binomial(*m, k))).mul(&mono.pow((m - k) as u32));
                alphas.extend(std::iter::repeat_n(*al, k));
                replaced += m - k;
            }
            let a = f.a() + mu * int(replaced as i64);
            let e = acc.entry(QFactor::new(a, alphas)).or_insert_with(|| (C::zero(), 0.0));
            e.1 += coef.magnitude();
            e.0.add_assign(&coef);
            let mut i = 0;
            while i < groups.len() && keep[i] == groups[i].1 {
                keep[i] = 0;
                i += 1;
            }
            if i == groups.len() {
                break;
            }
            keep[i] += 1;
        }
    }
    QOperator::from_terms(acc.into_iter().filter_map(|(f, (c, scale))| {
        let keep = if C::EXACT { !c.is_zero() } else { c.magnitude() > EPS0 * scale };
        keep.then_some((f, c))
    }))
}

/// `S_z P`, realizing `P(z g(z))/z`.
pub fn simplify_by_z<C: Coeff>(p: &QOperator<C>, q: &C::Q) -> Result<QOperator<C>> {
    let k0 = QFactor::constant(Exponent::zero());
    if p.get(&k0).is_some() {
        return Err(QError::NonzeroConstant);
    }
    Ok(QOperator::from_terms(p.iter().map(|(f, c)| {
        let a = f.a() + int(f.len() as i64 - 1);
        (f.with_a(a), c.mul(&C::q_pow(q, &int(f.alpha_sum()))))
    })))
}

/// `[z⁰] P(c, …, c)`: the constant term after substituting the constant `c`.
pub fn constant_term_at<C: Coeff>(p: &QOperator<C>, c: &C) -> C {
    let mut acc = C::zero();
    for (f, pa) in p.iter() {
        if f.a().is_zero() {
            acc.add_assign(&pa.mul(&c.pow(f.len() as u32)));
        }
    }
    acc
}

/// `S_z T_c P`, requiring `[z⁰]P(c) = 0` (exactly, or to `tol` relative in numeric mode).
pub fn step_translate_simplify<C: Coeff>(p: &QOperator<C>, c: &C, q: &C::Q, tol: f64) -> Result<QOperator<C>> {
    let r = constant_term_at(p, c);
    if !r.is_zero() {
        let scale: f64 = p
            .iter()
            .filter(|(f, _)| f.a().is_zero())
            .map(|(f, pa)| pa.magnitude() * c.magnitude().powi(f.len() as i32))
            .sum();
        if C::EXACT || r.magnitude() > tol * (1.0 + scale) {
            return Err(QError::ConstantNotRoot);
        }
    }
    let k0 = QFactor::constant(Exponent::zero());
    let t = translate(p, c, &Exponent::zero(), q).filter(|f, _| *f != k0);
    simplify_by_z(&t, q)
}

/// Which side σ^k acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Right: `A ↦ (a; α+k)`; left: `A ↦ q^{ka}(a; α+k)`.
pub fn sigma_conjugate<C: Coeff>(p: &QOperator<C>, k: i64, side: Side, q: &C::Q) -> QOperator<C> {
    p.map_factors(|f, c| {
        let w = match side {
            Side::Right => c.clone(),
            Side::Left => c.mul(&C::q_pow(q, &(f.a() * int(k)))),
        };
        (f.shift_alphas(k), w)
    })
}

/// `RA = (a; −α_ℓ, …, −α₁)`; with `invert_q`, symbolic coefficients also get `q ↦ 1/q`.
pub fn reflect<C: Coeff>(p: &QOperator<C>, invert_q: bool) -> QOperator<C> {
    p.map_factors(|f, c| {
        let alphas = f.alphas().iter().map(|x| -x).collect();
        let w = if invert_q { c.substitute_inverse_q() } else { c.clone() };
        (QFactor::new(f.a().clone(), alphas), w)
    })
}

/// `M_λ A = λ^a A`.
pub fn scale_argument<C: Coeff>(p: &QOperator<C>, lambda: &C) -> Result<QOperator<C>> {
    if lambda.is_zero() {
        return Err(QError::NotApplicable("scaling by zero".into()));
    }
    let mut out = QOperator::new();
    for (f, c) in p.iter() {
        out.add_term(f.clone(), c.mul(&lambda.pow_rational(f.a())?));
    }
    Ok(out)
}

/// `∂_γ A = #{i : α_i = γ} · A∖γ`.
pub fn derivative<C: Coeff>(p: &QOperator<C>, gamma: i64) -> QOperator<C> {
    let mut out = QOperator::new();
    for (f, c) in p.iter() {
        let count = f.alphas().iter().filter(|&&x| x == gamma).count();
        if let Some(g) = f.remove_alpha(gamma) {
            out.add_term(g, c.mul(&C::from_i64(count as i64)));
        }
    }
    out
}

/// `z ↦ z^p`, `q ↦ r = q^{1/p}`: `(a; α) ↦ (pa; α)` over `r`.
pub fn ramify<C: Coeff>(p: &QOperator<C>, pp: u64) -> Result<QOperator<C>> {
    if pp == 0 {
        return Err(QError::NotApplicable("ramification index must be positive".into()));
    }
    let mut out = QOperator::new();
    let pe = int(pp as i64);
    for (f, c) in p.iter() {
        let a = f.a() * &pe;
        if !a.is_integer() {
            return Err(QError::IncompatibleDenominator(crate::algebra::factor::fmt_exponent(f.a()), pp));
        }
        out.add_term(f.with_a(a), c.rescale_q(pp));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ExactOp, Laurent};
    use crate::polygon::{cloud, CloudPoint};
    use crate::testutil::{cq, exact_op, qcatalan};
    use proptest::prelude::*;

    fn l(n: i64) -> Laurent {
        Laurent::from_i64(n)
    }

    #[test]
    fn translate_by_minus_z() {
        let p = exact_op(&[(1, 0, &[0]), (1, 1, &[]), (1, 1, &[0]), (1, 1, &[1]), (1, 1, &[0, 1])]);
        let t = translate(&p, &l(-1), &rat(1, 1), &());
        let want = ExactOp::from_terms([
            (QFactor::int(0, &[0]), l(1)),
            (QFactor::int(1, &[0]), l(1)),
            (QFactor::int(1, &[1]), l(1)),
            (QFactor::int(2, &[0]), cq(-1, 1)),
            (QFactor::int(2, &[1]), l(-1)),
            (QFactor::int(1, &[0, 1]), l(1)),
            (QFactor::int(2, &[]), cq(-1, 1).add(&l(-1))),
            (QFactor::int(3, &[]), cq(1, 1)),
        ]);
        assert_eq!(t, want);
    }

    #[test]
    fn translate_by_zero_is_identity() {
        let p = qcatalan();
        assert_eq!(translate(&p, &l(0), &rat(0, 1), &()), p);
    }

    #[test]
    fn translate_qcatalan_by_one() {
        let p = qcatalan().neg();
        let t = translate(&p, &l(1), &rat(0, 1), &());
        let want = exact_op(&[(-1, 0, &[0]), (1, 1, &[]), (1, 1, &[0]), (1, 1, &[1]), (1, 1, &[0, 1])]);
        assert_eq!(t, want);
    }

    #[test]
    fn simplify_examples() {
        let s = simplify_by_z(&exact_op(&[(1, 1, &[])]), &()).unwrap();
        assert_eq!(s, exact_op(&[(1, 0, &[])]));
        let s = simplify_by_z(&exact_op(&[(1, 1, &[0, 1])]), &()).unwrap();
        assert_eq!(s, ExactOp::monomial(QFactor::int(2, &[0, 1]), cq(1, 1)));
        assert_eq!(simplify_by_z(&qcatalan(), &()), Err(QError::NonzeroConstant));
    }

    #[test]
    fn qpainleve_simplification() {
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[-1, 0, 0, 1]), (-1, 1, &[])]);
        let g = step_translate_simplify(&p, &l(0), &(), 0.0).unwrap();
        assert_eq!(g, exact_op(&[(1, 0, &[0]), (-1, 3, &[-1, 0, 0, 1]), (-1, 0, &[])]));
    }

    #[test]
    fn step_on_qcatalan() {
        let g = step_translate_simplify(&qcatalan().neg(), &l(1), &(), 0.0).unwrap();
        let want = ExactOp::from_terms([
            (QFactor::int(0, &[0]), l(-1)),
            (QFactor::int(0, &[]), l(1)),
            (QFactor::int(1, &[0]), l(1)),
            (QFactor::int(1, &[1]), cq(1, 1)),
            (QFactor::int(2, &[0, 1]), cq(1, 1)),
        ]);
        assert_eq!(g, want);
    }

    #[test]
    fn step_on_square() {
        // f = 1 + z f^2 becomes g = 1 + 2 z g + z^2 g^2
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[0, 0])]);
        let g = step_translate_simplify(&p, &l(1), &(), 0.0).unwrap();
        assert_eq!(g, exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-2, 1, &[0]), (-1, 2, &[0, 0])]));
    }

    #[test]
    fn step_on_two_step_example() {
        // f = 1 - 2 z f(qz) + z f(qz)^2
        let p = exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (2, 1, &[1]), (-1, 1, &[1, 1])]);
        let g = step_translate_simplify(&p, &l(1), &(), 0.0).unwrap();
        let want = ExactOp::from_terms([
            (QFactor::int(0, &[0]), l(1)),
            (QFactor::int(0, &[]), l(1)),
            (QFactor::int(2, &[1, 1]), cq(-1, 2)),
        ]);
        assert_eq!(g, want);
        assert_eq!(step_translate_simplify(&p, &l(2), &(), 0.0), Err(QError::ConstantNotRoot));
    }

    #[test]
    fn sigma_examples() {
        let p = exact_op(&[(1, 1, &[0])]);
        let left = sigma_conjugate(&p, 1, Side::Left, &());
        assert_eq!(left, ExactOp::monomial(QFactor::int(1, &[1]), cq(1, 1)));
        let p = exact_op(&[(1, 0, &[2]), (1, 0, &[1, 3]), (1, 2, &[4])]);
        let r = sigma_conjugate(&p, -3, Side::Right, &());
        assert_eq!(r.decompose().unwrap().nonshifting.alpha_max(), Some(0));
    }

    #[test]
    fn reflect_examples() {
        let p = exact_op(&[(1, 1, &[0, 2])]);
        assert_eq!(reflect(&p, false), exact_op(&[(1, 1, &[-2, 0])]));
        let p = ExactOp::monomial(QFactor::int(1, &[1]), cq(3, 2));
        assert_eq!(reflect(&p, true), ExactOp::monomial(QFactor::int(1, &[-1]), cq(3, -2)));
    }

    #[test]
    fn scale_examples() {
        let p = qcatalan();
        assert_eq!(scale_argument(&p, &l(1)).unwrap(), p);
        let s = scale_argument(&exact_op(&[(1, 2, &[0])]), &l(3)).unwrap();
        assert_eq!(s, exact_op(&[(9, 2, &[0])]));
        let half = ExactOp::monomial(QFactor::new(rat(1, 2), vec![0]), l(1));
        assert!(matches!(scale_argument(&half, &l(2)), Err(QError::NonRepresentableExponent(_))));
    }

    #[test]
    fn derivative_examples() {
        let p = exact_op(&[(1, 7, &[1, 5, 5, 5, 5, 8])]);
        assert_eq!(derivative(&p, 5), exact_op(&[(4, 7, &[1, 5, 5, 5, 8])]));
        assert!(derivative(&exact_op(&[(1, 3, &[])]), 0).is_empty());
        let p = exact_op(&[(1, 0, &[0, 0]), (1, 0, &[1; 6]), (1, 3, &[1, 1]), (1, 4, &[1]), (1, 2, &[])]);
        assert_eq!(derivative(&p, 1), exact_op(&[(6, 0, &[1; 5]), (2, 3, &[1]), (1, 4, &[])]));
    }

    #[test]
    fn ramify_examples() {
        let p = ExactOp::monomial(QFactor::new(rat(3, 2), vec![0, 1]), cq(1, 1));
        let r = ramify(&p, 2).unwrap();
        assert_eq!(r, ExactOp::monomial(QFactor::int(3, &[0, 1]), cq(1, 2)));
        assert_eq!(ramify(&qcatalan(), 1).unwrap(), qcatalan());
        assert!(matches!(ramify(&p, 3), Err(QError::IncompatibleDenominator(_, 3))));
    }

    #[test]
    fn qpainleve_in_cube_variable() {
        // h = w h(w/r) h^2 h(rw) + 1 over r; ramified by 3 it is the g-equation over q.
        let h = exact_op(&[(1, 0, &[0]), (-1, 1, &[-1, 0, 0, 1]), (-1, 0, &[])]);
        let g = exact_op(&[(1, 0, &[0]), (-1, 3, &[-1, 0, 0, 1]), (-1, 0, &[])]);
        assert_eq!(ramify(&h, 3).unwrap(), g);
    }

    pub(crate) fn arb_op() -> impl Strategy<Value = ExactOp> {
        proptest::collection::vec((-3i64..4, 0i64..4, proptest::collection::vec(-2i64..3, 0..4), -1i64..2), 1..6)
            .prop_map(|ts| {
                ExactOp::from_terms(ts.into_iter().map(|(c, a, al, e)| {
                    (QFactor::int(a, &al), cq(if c == 0 { 1 } else { c }, e))
                }))
            })
    }

    fn arb_c() -> impl Strategy<Value = Laurent> {
        (-3i64..4, -1i64..2).prop_map(|(c, e)| cq(c, e))
    }

    proptest! {
        #[test]
        fn derivative_commutes_with_translation(p in arb_op(), c in arb_c(), mu in -2i64..3, g in -2i64..3) {
            let mu = rat(mu, 1);
            prop_assert_eq!(derivative(&translate(&p, &c, &mu, &()), g), translate(&derivative(&p, g), &c, &mu, &()));
        }

        #[test]
        fn reflection_is_involutive(p in arb_op()) {
            prop_assert_eq!(reflect(&reflect(&p, true), true), p.clone());
            prop_assert_eq!(reflect(&reflect(&p, false), false), p);
        }

        #[test]
        fn translation_stays_on_coslope_lines(p in arb_op(), c in arb_c(), mu_n in -2i64..3, mu_d in 1i64..3) {
            let mu = rat(mu_n, mu_d);
            let t = translate(&p, &c, &mu, &());
            let src = cloud(&p);
            for pt in cloud(&t) {
                prop_assert!(src.iter().any(|s| s.ell >= pt.ell && s.level(&mu) == pt.level(&mu)));
            }
            // The highest point of each line keeps its coefficients.
            for s in &src {
                let top = src.iter().filter(|o| o.level(&mu) == s.level(&mu)).map(|o| o.ell).max().unwrap();
                if s.ell == top {
                    let at = |op: &ExactOp, pt: &CloudPoint| crate::polygon::factors_at(op, pt);
                    prop_assert_eq!(at(&t, s), at(&p, s));
                }
            }
        }
    }
}
