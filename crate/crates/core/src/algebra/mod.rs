//! Coefficients, q-factors and q-operators.

pub mod coeff;
pub mod factor;
pub mod laurent;
pub mod operator;
pub mod pochhammer;
pub mod unipoly;
pub mod xcomplex;

pub use coeff::{fmt_complex, parse_complex, Coeff, Coefficient, GaussLaurent, Mode, EPS0};
pub use factor::QFactor;
pub use laurent::Laurent;
pub use operator::{AlphaStats, Decomposition, ExactOp, NumOp, QOperator};
pub use pochhammer::pochhammer;
pub use unipoly::UniPoly;
pub use xcomplex::ExtComplex;

/// Exact rational exponent of `z` or `q`.
pub type Exponent = num_rational::BigRational;

/// `n/d` as an [`Exponent`].
pub fn rat(n: i64, d: i64) -> Exponent {
    Exponent::new(n.into(), d.into())
}
