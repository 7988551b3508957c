//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use qalg::algebra::{rat, ExactOp, Laurent, QFactor, UniPoly};
use qalg::asymptotics::{crest, linearize_crest};
use qalg::parse::{parse_equation, EquationSource};
use qalg::polygon::{cloud, initial_polynomial, points_at_coslope, polygon_of, CloudPoint};
use qalg::series::{find_scalar_zero, generic_order, solve_coefficients, solve_numeric, verify_leading_coefficients};
use qalg::solver::{is_in_solved_form, to_solved_form};
use qalg::transforms::{constant_term_at, derivative, reflect, step_translate_simplify, translate};
use qalg::QError;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn fixture(name: &str) -> EquationSource {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.qeq"));
    parse_equation(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn exact(name: &str) -> ExactOp {
    fixture(name).to_exact().unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cq(c: i64, e: i64) -> Laurent {
    Laurent::from_i64(c).mul(&Laurent::q_pow(&rat(e, 1)))
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn catalan_degrees() -> Check {
    let p = exact("qcatalan");
    let f = solve_coefficients(&p, &(), 25, None).map_err(|e| e.to_string())?;
    for n in 1..=25usize {
        let d = f.coeffs[n].degree().ok_or(format!("f_{n} vanishes"))?;
        ensure(d == rat((n * (n - 1) / 2) as i64, 1), format!("deg f_{n} = {d}"))?;
        let o = f.coeffs[n].order().unwrap();
        ensure(o == rat(0, 1), format!("ord f_{n} = {o}"))?;
    }
    let omega = generic_order(&p, 50).map_err(|e| e.to_string())?;
    ensure(omega.iter().all(|&w| w == 0), format!("generic order {omega:?}"))?;
    Ok("deg_q f_n = n(n-1)/2 for n <= 25 (exact); generic order 0 for n <= 50".into())
}

fn cfa_polygon() -> Check {
    let p = exact("cfa");
    let poly = polygon_of(&p).map_err(|e| e.to_string())?;
    let want = [CloudPoint::int(5, 0), CloudPoint::int(1, 2), CloudPoint::int(0, 4), CloudPoint::int(3, 6)];
    let mut got = poly.vertices.clone();
    got.sort();
    let mut want_sorted = want.to_vec();
    want_sorted.sort();
    ensure(got == want_sorted, format!("vertices {:?}", poly.vertices))?;
    let mut cs = poly.coslopes.clone();
    cs.sort();
    ensure(cs == vec![rat(-3, 2), rat(1, 2), rat(2, 1)], format!("co-slopes {cs:?}"))?;
    let mut at2 = points_at_coslope(&cloud(&p), &rat(2, 1));
    at2.sort();
    let mut want2 = vec![CloudPoint::int(5, 0), CloudPoint::int(3, 1), CloudPoint::int(1, 2)];
    want2.sort();
    ensure(at2 == want2, format!("points at co-slope 2: {at2:?}"))?;
    Ok("vertices {(5,0),(1,2),(0,4),(3,6)}, co-slopes {2,1/2,-3/2}, L_2 = {(5,0),(3,1),(1,2)} (exact)".into())
}

fn initial_polynomials() -> Check {
    let p = exact("cfa");
    let phi2 = initial_polynomial(&p, &rat(2, 1), &()).map_err(|e| e.to_string())?;
    let want = UniPoly::from_terms([(0, cq(1, 0)), (1, cq(-2, 0)), (2, cq(1, 0))]);
    ensure(phi2 == want, format!("Phi_2 = {}", phi2.render("c")))?;
    let q = c(4.0);
    let phi = initial_polynomial(&p, &rat(1, 2), &()).map_err(|e| e.to_string())?.to_numeric(q);
    let c4 = 4.0 * q * q - 9.0 * q.powf(1.5) + 2.0 * q;
    let want = UniPoly::from_terms([(2, q.powi(-3)), (4, c4)]);
    let mut err: f64 = 0.0;
    for k in 0..=4 {
        err = err.max((phi.coeff(k) - want.coeff(k)).norm());
    }
    ensure(err <= 1e-12, format!("Phi_1/2 at q=4 differs by {err:e}"))?;
    Ok(format!("Phi_2 = (c-1)^2 exactly; Phi_1/2 at q=4 max coefficient error {err:.1e} <= 1e-12"))
}

fn qpia_solved_form() -> Check {
    let src = fixture("qpainleve1");
    let q = c(2.0);
    let forms = to_solved_form(&src.to_numeric(q), 4, q, 1e-10).map_err(|e| e.to_string())?;
    let zero = forms.iter().find(|f| f.prefix.len() == 1 && f.prefix[0].norm() < 1e-12).ok_or("no solved form with prefix 0")?;
    let got = zero.replay_exact(&src.to_exact().unwrap()).ok_or("exact replay failed")?;
    let want = parse_equation("f(z) = z^3*f(z/q)*f(z)^2*f(q*z) + 1").unwrap().to_exact().unwrap();
    ensure(got == want, format!("got {}", qalg::parse::print_equation(&got)))?;
    Ok("prefix f0 = 0 gives g = z^3 g(z/q) g(z)^2 g(qz) + 1 term by term".into())
}

fn gevrey_fixture() -> Check {
    let f = solve_coefficients(&exact("gevrey_half"), &(), 20, None).map_err(|e| e.to_string())?;
    let mut g = vec![1i64];
    for _ in 1..=20 {
        g.push(g.iter().sum());
    }
    for (n, (fq, gn)) in f.coeffs.iter().zip(&g).enumerate() {
        let want = Laurent::from_i64(*gn).mul(&Laurent::q_pow(&rat((n * n) as i64, 2)));
        ensure(*fq == want, format!("f_{n} = {fq}"))?;
    }
    ensure(g[20] == 1 << 19, "g_20")?;
    Ok("f_n = q^(n^2/2) g_n with g_n = 2^(n-1) for n <= 20 (exact)".into())
}

fn running_crest() -> Check {
    let r = crest(&exact("running8"), &Laurent::from_i64(2), &()).map_err(|e| e.to_string())?;
    let want = UniPoly::from_terms([(0, cq(1, 0)), (1, cq(-40, 0)), (2, cq(-72, -1))]);
    ensure(r.poly == want, format!("crest polynomial {}", r.poly.render("z")))?;
    let roots = r.roots(c(2.0)).map_err(|e| e.to_string())?;
    let pos = roots.roots.iter().find(|z| z.re > 0.0 && z.im.abs() < 1e-12).ok_or("no positive root")?;
    let want = (109f64.sqrt() - 10.0) / 18.0;
    let err = (pos.re - want).abs();
    ensure(err <= 1e-10, format!("positive root off by {err:e}"))?;
    Ok(format!("crest polynomial 1-40z-72q^-1 z^2 (exact); positive root error {err:.1e} <= 1e-10"))
}

fn drake2_growth() -> Check {
    let q = c(2.0);
    let r = crest(&exact("drake2"), &Laurent::one(), &()).map_err(|e| e.to_string())?;
    ensure(r.poly == UniPoly::from_terms([(0, cq(1, 0)), (2, cq(-1, 1))]), format!("crest polynomial {}", r.poly.render("z")))?;
    let f = solve_numeric(&fixture("drake2").to_numeric(q), q, 60, None).map_err(|e| e.to_string())?;
    let ln2 = 2f64.ln();
    let even: Vec<f64> = (1..=30).map(|m| (f.coeffs[2 * m].ln_norm() - (m * m) as f64 * ln2).exp()).collect();
    let odd: Vec<f64> = (1..30).map(|m| (f.coeffs[2 * m + 1].ln_norm() - (m * m + m) as f64 * ln2).exp()).collect();
    let mut parts = Vec::new();
    for (name, s) in [("even", &even), ("odd", &odd)] {
        let last = s[s.len() - 1];
        let diff = (last - s[s.len() - 2]).abs();
        ensure(diff < 1e-6 && last > 1e-6, format!("{name}: limit {last}, last difference {diff:e}"))?;
        parts.push(format!("{name} -> {last:.9} (diff {diff:.1e})"));
    }
    Ok(format!("crest polynomial 1-qz^2; {}; tolerance 1e-6", parts.join(", ")))
}

/// Colored Jones polynomial of the figure-8 knot by its defining finite sum.
fn jones_direct(n: usize, q: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let n = n as i32;
    (0..n)
        .map(|k| {
            let mut t = q.powi(n * k);
            for i in 0..k {
                t *= (1.0 - q.powi(-(n + 1) - i)) * (1.0 - q.powi(-(n - 1) + i));
            }
            t
        })
        .sum()
}

fn euler(q: f64) -> f64 {
    (1..400).map(|k| 1.0 - q.powi(k)).product()
}

fn jones() -> Check {
    let n = 25usize;
    let big = jones_direct(n, 2.0) * 2f64.powi(-((n * (n - 1)) as i32)) * euler(0.5);
    let small = jones_direct(n, 0.5) * 0.5f64.powi((n * (n - 1)) as i32);
    let small_err = (small - euler(0.5)).abs();
    let q = c(2.0);
    let g = solve_numeric(&fixture("jones8").to_numeric(q), q, 20, Some(c(1.0))).map_err(|e| e.to_string())?;
    let fixture_err = (0..=20)
        .map(|k| {
            let jk = jones_direct(k, 2.0);
            (g.coeffs[k].to_complex() * 2f64.powi(k as i32) - jk).norm() / jk.abs()
        })
        .fold(0.0, f64::max);
    let detail = format!(
        "q=2: J_n q^-n(n-1) (1/q;1/q)_inf = {big:.9} at n=25 (target 1, tol 1e-6); q=1/2: |J_n q^n(n-1) - (q;q)_inf| = {small_err:.1e} (tol 1e-6); operator fixture max relative error {fixture_err:.1e} for n <= 20 (tol 1e-8)"
    );
    if (big - 1.0).abs() < 1e-6 && small_err < 1e-6 && fixture_err < 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn catalan_singularity() -> Check {
    let q = c(0.5);
    let f = solve_numeric(&exact("qcatalan").to_numeric(q), q, 200, None).map_err(|e| e.to_string())?;
    let ratio = |n: usize| f.coeffs[n].div(&f.coeffs[n + 1]).to_complex();
    let zeta0 = ratio(199);
    let drift = (zeta0 - ratio(198)).norm();
    ensure(drift < 1e-10, format!("ratios still move by {drift:e}"))?;
    // G = z f(qz) - 1
    let g = qalg::algebra::NumOp::from_terms([(QFactor::int(1, &[1]), c(1.0)), (QFactor::int(0, &[]), c(-1.0))]);
    let zeta = find_scalar_zero(&g, &f, zeta0, 1e-12).map_err(|e| e.to_string())?;
    let resid = qalg::series::apply_at(&g, &f, zeta0).map_err(|e| e.to_string())?.norm();
    ensure(resid < 1e-8 && (zeta - zeta0).norm() < 1e-8, format!("zeta0 {zeta0}, zeta {zeta}, residual {resid:e}"))?;
    Ok(format!("zeta = {:.12} from f_n/f_(n+1), |zeta f(q zeta) - 1| = {resid:.1e} < 1e-8", zeta0.re))
}

fn arb_laurent() -> impl Strategy<Value = Laurent> {
    (-3i64..=3, -1i64..=1).prop_filter("nonzero", |(c, _)| *c != 0).prop_map(|(c, e)| cq(c, e))
}

fn arb_factor(min_a: i64) -> impl Strategy<Value = QFactor> {
    (min_a..3, prop::collection::vec(-1i64..3, 0..3)).prop_map(|(a, al)| QFactor::int(a, &al))
}

fn arb_op() -> impl Strategy<Value = ExactOp> {
    prop::collection::vec((arb_factor(0), arb_laurent()), 1..5).prop_map(ExactOp::from_terms)
}

fn arb_solved() -> impl Strategy<Value = ExactOp> {
    let linear = prop::collection::vec((-1i64..3, arb_laurent()), 0..3);
    let shifting = prop::collection::vec((arb_factor(1), arb_laurent()), 0..4);
    (linear, shifting).prop_map(|(lin, sh)| {
        let mut p = ExactOp::from_terms([(QFactor::int(0, &[0]), Laurent::one())]);
        for (al, c) in lin {
            p.add_term(QFactor::int(0, &[al]), c);
        }
        for (f, c) in sh {
            if f.is_empty() {
                continue;
            }
            p.add_term(f, c);
        }
        p.cleaned()
    })
}

fn contained(before: &ExactOp, after: &ExactOp, mu: &qalg::algebra::Exponent) -> bool {
    let orig = cloud(before);
    cloud(after).iter().all(|pt| {
        orig.iter().any(|o| o.ell >= pt.ell && o.a.clone() + mu * rat((o.ell - pt.ell) as i64, 1) == pt.a)
    })
}

fn transform_properties() -> Check {
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    let mus = [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1), rat(-1, 1)];
    runner
        .run(&(arb_op(), arb_laurent(), 0usize..5, -1i64..3), |(p, cc, mi, gamma)| {
            let mu = &mus[mi];
            prop_assert_eq!(translate(&p, &Laurent::zero(), mu, &()), p.clone().cleaned());
            let t = translate(&p, &cc, mu, &());
            prop_assert_eq!(derivative(&t, gamma), translate(&derivative(&p, gamma), &cc, mu, &()));
            prop_assert_eq!(reflect(&reflect(&p, true), true), p.clone());
            prop_assert!(contained(&p, &t, mu));
            Ok(())
        })
        .map_err(|e| format!("translation/derivative/reflection: {e}"))?;
    runner
        .run(&(arb_solved(), 1i64..4), |(p, f0)| {
            let f0 = Laurent::from_i64(f0);
            let mut p = p;
            let r = constant_term_at(&p, &f0);
            p.add_term(QFactor::int(0, &[]), r.neg());
            let p = p.cleaned();
            prop_assert!(is_in_solved_form(&p));
            let g = step_translate_simplify(&p, &f0, &(), 0.0).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(is_in_solved_form(&g), "{:?}", g);
            Ok(())
        })
        .map_err(|e| format!("solved form stability: {e}"))?;
    Ok("200 random exact operators each: T_0 = id, d T = T d, R R = id, cloud containment, S_z T_f0 keeps solved form".into())
}

fn linearization() -> Check {
    let cat = linearize_crest(&exact("qcatalan"), &(), 5, 0.0).map_err(|e| e.to_string())?;
    let r = crest(&cat.op, &Laurent::one(), &()).map_err(|e| e.to_string())?;
    let want = ExactOp::from_terms([(QFactor::int(0, &[0]), cq(1, 0)), (QFactor::int(1, &[1]), cq(-1, 1))]);
    ensure(cat.steps == 1 && r.crest == want, format!("q-Catalan: {} steps, crest {:?}", cat.steps, r.crest))?;
    let two = linearize_crest(&exact("crest_two_steps"), &(), 5, 0.0).map_err(|e| e.to_string())?;
    let want = ExactOp::from_terms([
        (QFactor::int(0, &[0]), cq(1, 0)),
        (QFactor::int(1, &[]), cq(-1, 2)),
        (QFactor::int(2, &[1]), cq(2, 3)),
        (QFactor::int(3, &[1, 1]), cq(-1, 4)),
    ]);
    ensure(two.steps == 2 && two.op == want, format!("two-step example: {} steps", two.steps))?;
    match linearize_crest(&exact("crest_nonterminating"), &(), 6, 0.0) {
        Err(QError::MaxStepsExceeded { heights, .. }) => {
            let want: Vec<String> = (1..=7).map(|k| if k == 1 { "1".to_string() } else { format!("1/{k}") }).collect();
            ensure(heights == want, format!("height trace {heights:?}"))?;
        }
        other => return Err(format!("non-terminating example returned {other:?}")),
    }
    Ok("q-Catalan 1 step to (0;0)-q(1;1); second example 2 steps; third example MaxStepsExceeded with heights 1, 1/2, ..., 1/7".into())
}

fn leading_coefficients() -> Check {
    let p = exact("qcatalan");
    let f = solve_coefficients(&p, &(), 20, None).map_err(|e| e.to_string())?;
    let checks = verify_leading_coefficients(&p, &f, &[0, 1, 2], 20).map_err(|e| e.to_string())?;
    let shown: Vec<String> = checks.iter().map(|c| format!("k={}: N={:?}", c.k, c.first_index)).collect();
    ensure(checks.iter().all(|c| c.first_index.is_some()), shown.join(", "))?;
    Ok(format!("{} (n_max = 20)", shown.join(", ")))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("q-Catalan exact degrees and orders", catalan_degrees),
        ("CFA polygon", cfa_polygon),
        ("CFA initial polynomials", initial_polynomials),
        ("q-Painleve solved form", qpia_solved_form),
        ("q^(n^2/2) fixture", gevrey_fixture),
        ("running example crest", running_crest),
        ("Drake2 normalized growth", drake2_growth),
        ("figure-8 colored Jones", jones),
        ("q-Catalan singularity", catalan_singularity),
        ("transform properties", transform_properties),
        ("crest linearization", linearization),
        ("leading coefficients", leading_coefficients),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
