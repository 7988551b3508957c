use num_complex::Complex64;

use crate::error::{QError, Result};

const MAX_FACTORS: usize = 1_000_000;

/// `(z;q)_n = ∏_{0≤k<n}(1 − z q^k)`, with `n = None` meaning the infinite product.
pub fn pochhammer(z: Complex64, q: Complex64, n: Option<u64>, tol: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut qk = Complex64::new(1.0, 0.0);
    match n {
        Some(n) => {
            for _ in 0..n {
                acc *= Complex64::new(1.0, 0.0) - z * qk;
                qk *= q;
            }
            Ok(acc)
        }
        None => {
            if q.norm() >= 1.0 {
                return Err(QError::DivergentProduct);
            }
            for _ in 0..MAX_FACTORS {
                let update = z * qk;
                acc *= Complex64::new(1.0, 0.0) - update;
                qk *= q;
                if update.norm() < tol {
                    return Ok(acc);
                }
            }
            Err(QError::NoConvergence("infinite q-Pochhammer product".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn empty_product() {
        assert_eq!(pochhammer(c(0.7), c(3.0), Some(0), 1e-12).unwrap(), c(1.0));
    }

    #[test]
    fn two_factors() {
        let v = pochhammer(c(0.5), c(0.5), Some(2), 1e-12).unwrap();
        assert!((v - c(3.0 / 8.0)).norm() < 1e-15);
    }

    #[test]
    fn euler_function_at_half() {
        // Frozen from an independent 50-digit evaluation.
        let v = pochhammer(c(0.5), c(0.5), None, 1e-12).unwrap();
        assert!((v.re - 0.288_788_095_086_602_4).abs() < 1e-12);
    }

    #[test]
    fn infinite_product_needs_small_q() {
        assert_eq!(pochhammer(c(0.5), c(1.0), None, 1e-12), Err(QError::DivergentProduct));
    }
}
