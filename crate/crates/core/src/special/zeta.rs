//! Riemann and Hurwitz zeta values at integer arguments, and digamma.
//!
//! All three use an explicit partial sum followed by the Euler–Maclaurin
//! tail, so the cost is a few dozen terms instead of the `tol^(-1/(s-1))`
//! terms a bare partial sum would need.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::bernoulli::bernoulli_number;

/// Shift point above which the Euler–Maclaurin tail is used.
const SHIFT: f64 = 20.0;
/// Number of Bernoulli correction terms in the tails.
const EM_TERMS: usize = 12;

/// Riemann zeta `sum_{mu >= 1} mu^(-s)` for integer `s >= 2`.
///
/// Terms are added one at a time; after each, the Euler–Maclaurin estimate
/// of the tail (integral, half-term and first Bernoulli correction) is
/// formed. Summation stops once the bound on the first neglected correction
/// falls below `tol`, and the estimated tail is included in the result.
pub fn zeta_partial<T: Real>(s: u32, tol: T) -> Result<T> {
    if s < 2 {
        return Err(Error::InvalidParameter(format!("zeta_partial needs s >= 2, got {s}")));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter("zeta_partial needs tol > 0".into()));
    }
    let sf = T::from_int(s as i64);
    let mut sum = T::zero();
    let mut k = 1i64;
    loop {
        let kf = T::from_int(k);
        sum += kf.powi(-(s as i32));
        // Next correction after the B_2 term scales as s(s+1)(s+2) k^(-s-3) / 720.
        let next = sf * (sf + T::one()) * (sf + T::two()) * kf.powi(-(s as i32) - 3) / T::lit(720.0);
        if next < tol || k > 10_000_000 {
            let tail = kf.powi(1 - s as i32) / (sf - T::one()) - kf.powi(-(s as i32)) * T::half()
                + sf * kf.powi(-(s as i32) - 1) / T::lit(12.0);
            return Ok(sum + tail);
        }
        k += 1;
    }
}

/// Hurwitz zeta `sum_{k >= 0} (k + a)^(-s)` for integer `s >= 2`, `a > 0`.
pub fn hurwitz_zeta<T: Real>(s: u32, a: T) -> Result<T> {
    if s < 2 || !(a > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "hurwitz_zeta needs s >= 2 and a > 0, got s = {s}, a = {a}"
        )));
    }
    let si = s as i32;
    let mut head = T::zero();
    let mut b = a;
    while b < T::lit(SHIFT) {
        head += b.powi(-si);
        b += T::one();
    }
    let sf = T::from_int(s as i64);
    let mut tail = b.powi(1 - si) / (sf - T::one()) + b.powi(-si) * T::half();
    // Rising factorial s (s+1) ... (s+2j-2) / (2j)! times b^(-s-2j+1).
    let mut factor = sf / b.powi(si + 1);
    let b2 = b * b;
    let mut fact = T::two();
    for j in 1..=EM_TERMS {
        let term = bernoulli_number::<T>(2 * j)? * factor / fact;
        tail += term;
        if term.abs() < T::epsilon() * tail.abs() * T::lit(1e-2) {
            break;
        }
        let jf = T::from_int(j as i64);
        let r1 = sf + T::two() * jf - T::one();
        let r2 = sf + T::two() * jf;
        factor *= r1 * r2 / b2;
        fact *= (T::two() * jf + T::one()) * (T::two() * jf + T::two());
    }
    Ok(head + tail)
}

/// Digamma `psi(x)` for `x > 0`.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "digamma",
            x: x.as_f64(),
        });
    }
    let mut shift = T::zero();
    let mut y = x;
    while y < T::lit(SHIFT) {
        shift -= y.recip();
        y += T::one();
    }
    let inv2 = (y * y).recip();
    let mut pow = inv2;
    let mut series = T::zero();
    for k in 1..=EM_TERMS {
        let term = bernoulli_number::<T>(2 * k)? * pow / T::from_int(2 * k as i64);
        series += term;
        if term.abs() < T::epsilon() * T::lit(1e-2) {
            break;
        }
        pow *= inv2;
    }
    Ok(shift + y.ln() - (T::two() * y).recip() - series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_two_closed_form() {
        let z = zeta_partial(2, 1e-9_f64).unwrap();
        assert!((z - PI * PI / 6.0).abs() < 1e-9);
    }

    #[test]
    fn zeta_three_anchor() {
        let z = zeta_partial(3, 1e-6_f64).unwrap();
        assert!((z - 1.202).abs() < 5e-4);
    }

    #[test]
    fn zeta_five_brute_force() {
        let mut brute = 0.0_f64;
        for mu in (1..=10_000_000u64).rev() {
            brute += (mu as f64).powi(-5);
        }
        let z = zeta_partial(5, 1e-9_f64).unwrap();
        assert!((z - brute).abs() < 1e-9);
    }

    #[test]
    fn hurwitz_reduces_to_riemann() {
        let z = hurwitz_zeta(3, 1.0_f64).unwrap();
        assert!((z - 1.202_056_903_159_594_2).abs() < 1e-14);
        let z4 = hurwitz_zeta(4, 1.0_f64).unwrap();
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_shift_identity() {
        for &a in &[0.3_f64, 2.7, 64.2] {
            let lhs = hurwitz_zeta(5, a).unwrap() - hurwitz_zeta(5, a + 1.0).unwrap();
            assert!((lhs - a.powi(-5)).abs() < 1e-14 * a.powi(-5).max(1.0));
        }
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0_f64).unwrap() + 0.577_215_664_901_532_9).abs() < 1e-14);
        let half = -0.577_215_664_901_532_9 - 2.0 * 2f64.ln();
        assert!((digamma(0.5_f64).unwrap() - half).abs() < 1e-14);
        let x = 70.3_f64;
        assert!((digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x).abs() < 1e-14);
    }

    #[test]
    fn bad_arguments() {
        assert!(zeta_partial(1, 1e-6_f64).is_err());
        assert!(hurwitz_zeta(2, 0.0_f64).is_err());
        assert!(digamma(-1.0_f64).is_err());
    }
}
