//! Bernoulli numbers (exact) and Bernoulli polynomials.
//!
//! Numbers use the standard convention `B_1 = -1/2`, so `B_m(0) = B_m`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest index held in the exact table. `B_200` is about `1e215`, still
/// inside the `f64` range.
pub const MAX_BERNOULLI_INDEX: usize = 200;

fn table() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1.
        let mut b: Vec<BigRational> = Vec::with_capacity(MAX_BERNOULLI_INDEX + 1);
        b.push(BigRational::one());
        for m in 1..=MAX_BERNOULLI_INDEX {
            if m > 1 && m % 2 == 1 {
                b.push(BigRational::zero());
                continue;
            }
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                if !bk.is_zero() {
                    acc += bk * BigRational::from_integer(binom.clone());
                }
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }
        b
    })
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact Bernoulli number `B_m`.
pub fn bernoulli_number_exact(m: usize) -> Result<BigRational> {
    table().get(m).cloned().ok_or_else(|| {
        Error::InvalidParameter(format!("Bernoulli index {m} exceeds table limit {MAX_BERNOULLI_INDEX}"))
    })
}

/// `B_m` rounded to the scalar type.
pub fn bernoulli_number<T: Real>(m: usize) -> Result<T> {
    bernoulli_number_exact(m).map(|r| T::lit(rational_to_f64(&r)))
}

/// Standard Bernoulli polynomial `B_m(x) = sum_k C(m, k) B_k x^(m-k)`.
///
/// Coefficients are formed exactly and rounded once; the polynomial is then
/// evaluated by Horner's rule.
pub fn bernoulli_poly<T: Real>(m: usize, x: T) -> Result<T> {
    let b = table();
    if m >= b.len() {
        return Err(Error::InvalidParameter(format!(
            "Bernoulli polynomial degree {m} exceeds table limit {MAX_BERNOULLI_INDEX}"
        )));
    }
    // Coefficient of x^(m-k) is C(m, k) B_k; Horner runs from x^m down.
    let mut binom = BigInt::one();
    let mut acc = T::zero();
    for (k, bk) in b.iter().enumerate().take(m + 1) {
        let coeff = bk * BigRational::from_integer(binom.clone());
        acc = acc * x + T::lit(rational_to_f64(&coeff));
        binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    Ok(acc)
}
