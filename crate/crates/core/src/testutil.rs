//! Hand-built operators shared by unit tests.

use crate::algebra::{rat, ExactOp, Laurent, QFactor};

/// `∑ c·(a; α)` with integer data.
pub fn exact_op(terms: &[(i64, i64, &[i64])]) -> ExactOp {
    ExactOp::from_terms(terms.iter().map(|&(c, a, al)| (QFactor::int(a, al), Laurent::from_i64(c))))
}

/// `c·q^e` with integer data.
pub fn cq(c: i64, e: i64) -> Laurent {
    Laurent::from_i64(c).mul(&Laurent::q_pow(&rat(e, 1)))
}

/// `f = 1 + z f f(qz)`, as `Y₀ − 1 − z Y₀ Y₁`.
pub fn qcatalan() -> ExactOp {
    exact_op(&[(1, 0, &[0]), (-1, 0, &[]), (-1, 1, &[0, 1])])
}

pub fn cfa() -> ExactOp {
    ExactOp::from_terms([
        (QFactor::int(0, &[1, 1, 1, 1]), cq(4, 0)),
        (QFactor::int(0, &[0, 0, 1, 2]), cq(-9, 0)),
        (QFactor::int(0, &[0, 0, 0, 2]), cq(2, 0)),
        (QFactor::int(1, &[0, 2]), cq(1, -4)),
        (QFactor::int(3, &[0, 0, 0, 0, 5, 5]), cq(-1, 0)),
        (QFactor::int(3, &[2]), cq(-1, -4)),
        (QFactor::int(3, &[0]), cq(-1, 0)),
        (QFactor::int(5, &[]), cq(1, 0)),
    ])
}

/// Parsed fixture from the workspace `fixtures/` directory.
pub fn fixture(name: &str) -> crate::parse::EquationSource {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.qeq"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    crate::parse::parse_equation(&text).unwrap()
}

/// Exact operator of a fixture.
pub fn fixture_exact(name: &str) -> ExactOp {
    fixture(name).to_exact().unwrap()
}
