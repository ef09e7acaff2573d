//! Integer-order cylinder functions of real argument.
//!
//! `J_n` comes from Miller's backward recurrence normalised with
//! `J_0 + 2 sum J_2k = 1`, except where the ascending series is cheaper and
//! free of cancellation (`x^2/4 <= n + 1`), and above
//! [`ASYMPTOTIC_THRESHOLD`] with `n < x`, where `J_0`, `J_1` come from Hankel's
//! expansion and forward recurrence is stable. `Y_0` and `Y_1` are built from the
//! Neumann series in even/odd `J_k` for moderate arguments and from Hankel's
//! asymptotic expansion above [`ASYMPTOTIC_THRESHOLD`]; higher `Y_n` follow by
//! forward recurrence, which is stable for the dominant solution.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{parity_sign, Real};

/// Argument above which `Y_0`, `Y_1` use Hankel's asymptotic expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = 25.0;

/// A cylinder-function value tagged with its order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderFnValue<T: Real> {
    pub order: i32,
    pub argument: T,
    pub value: Complex<T>,
}

impl<T: Real> CylinderFnValue<T> {
    pub fn bessel_j(order: i32, argument: T) -> Self {
        Self {
            order,
            argument,
            value: Complex::new(bessel_j(order, argument), T::zero()),
        }
    }

    pub fn hankel1(order: i32, argument: T) -> Result<Self> {
        Ok(Self {
            order,
            argument,
            value: hankel1(order, argument)?,
        })
    }
}

/// Ascending power series for `J_n(x)`, `n >= 0`.
pub(crate) fn j_series<T: Real>(n: usize, x: T) -> T {
    let half = x * T::half();
    let mut lead = T::one();
    for k in 1..=n {
        lead *= half / T::from_int(k as i64);
    }
    if lead == T::zero() {
        return lead;
    }
    let q = -half * half;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..400 {
        term *= q / (T::from_int(k) * T::from_int(n as i64 + k));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(0.25) {
            break;
        }
    }
    lead * sum
}

fn series_is_safe<T: Real>(n: usize, x: T) -> bool {
    x * x <= T::lit(4.0) * T::from_int(n as i64 + 1)
}

/// Miller start index: far enough above `max(nmax, x)` that the truncation
/// error is below double-precision round-off.
fn miller_start<T: Real>(nmax: usize, x: T) -> usize {
    let top = (nmax as f64).max(x.as_f64().ceil());
    let m = top + 30.0 + 12.0 * top.cbrt();
    let m = m as usize;
    m + (m % 2)
}

/// `J_0(x), ..., J_nmax(x)` for `x >= 0`.
pub fn bessel_j_seq<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); nmax + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let x = x.abs();
    if x > T::lit(ASYMPTOTIC_THRESHOLD) && T::from_int(nmax as i64) < x {
        // Forward recurrence is stable while the order stays below x.
        out[0] = hankel_asymptotic(0, x).0;
        if nmax >= 1 {
            out[1] = hankel_asymptotic(1, x).0;
        }
        let two_over_x = T::two() / x;
        for k in 1..nmax {
            out[k + 1] = two_over_x * T::from_int(k as i64) * out[k] - out[k - 1];
        }
        return out;
    }
    let start = miller_start(nmax, x);
    let big = T::max_value().sqrt();
    let rescale = big.recip();
    let two_over_x = T::two() / x;

    let mut above = T::zero();
    let mut cur = T::min_positive_value().sqrt();
    let mut norm = T::zero();
    // `cur` holds the unnormalised value at order k, `above` the one at k + 1.
    let mut k = start;
    loop {
        if k <= nmax {
            out[k] = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { T::two() * cur };
        }
        if k == 0 {
            break;
        }
        let below = two_over_x * T::from_int(k as i64) * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > big {
            cur *= rescale;
            above *= rescale;
            norm *= rescale;
            for v in out.iter_mut().skip(k + 1) {
                *v *= rescale;
            }
        }
    }
    let scale = norm.recip();
    for v in out.iter_mut() {
        *v *= scale;
    }
    for (n, v) in out.iter_mut().enumerate() {
        if series_is_safe(n, x) {
            *v = j_series(n, x);
        }
    }
    out
}

/// Bessel function of the first kind `J_n(x)` for any integer order.
///
/// `J_n(0) = delta_{n0}`; negative orders and arguments follow
/// `J_{-n}(x) = J_n(-x) = (-1)^n J_n(x)`.
pub fn bessel_j<T: Real>(n: i32, x: T) -> T {
    let m = n.unsigned_abs() as usize;
    let mut sign = if n < 0 { parity_sign::<T>(m as i64) } else { T::one() };
    if x < T::zero() {
        sign *= parity_sign::<T>(m as i64);
    }
    let ax = x.abs();
    let v = if ax == T::zero() {
        if m == 0 {
            T::one()
        } else {
            T::zero()
        }
    } else if series_is_safe(m, ax) {
        j_series(m, ax)
    } else {
        bessel_j_seq(m, ax)[m]
    };
    sign * v
}

/// Hankel's asymptotic expansion: `(J_nu, Y_nu)` for `nu` in {0, 1}.
fn hankel_asymptotic<T: Real>(nu: u32, x: T) -> (T, T) {
    let mu = T::from_int(4 * (nu * nu) as i64);
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..200i64 {
        let odd = T::from_int(2 * k - 1);
        term *= (mu - odd * odd) / (T::from_int(k) * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    let chi = x - (T::from_int(nu as i64) * T::half() + T::lit(0.25)) * T::PI();
    let amp = (T::two() / (T::PI() * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// `(Y_0(x), Y_1(x))`, `x > 0`.
fn y0_y1<T: Real>(x: T) -> (T, T) {
    if x > T::lit(ASYMPTOTIC_THRESHOLD) {
        return (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1);
    }
    let kmax = (x.as_f64() + 12.0 * x.as_f64().cbrt() + 30.0) as usize;
    let j = bessel_j_seq(kmax + 2, x);
    let log_term = (x * T::half()).ln() + T::euler_gamma();
    let mut s0 = T::zero();
    let mut s1 = T::zero();
    let mut k = 1usize;
    while 2 * k < kmax + 2 {
        let kk = T::from_int(k as i64);
        let sign = parity_sign::<T>(k as i64);
        s0 += sign * j[2 * k] / kk;
        s1 += sign * T::from_int(2 * k as i64 + 1) * j[2 * k + 1] / (kk * (kk + T::one()));
        k += 1;
    }
    let two_over_pi = T::FRAC_2_PI();
    let y0 = two_over_pi * (log_term * j[0] - T::two() * s0);
    let y1 = two_over_pi * (-j[0] / x + (log_term - T::one()) * j[1] - s1);
    (y0, y1)
}

/// `Y_0(x), ..., Y_nmax(x)`.
pub fn bessel_y_seq<T: Real>(nmax: usize, x: T) -> Result<Vec<T>> {
    if !(x > T::zero()) {
        return Err(Error::Domain {
            function: "bessel_y",
            x: x.as_f64(),
        });
    }
    let (y0, y1) = y0_y1(x);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(y0);
    if nmax >= 1 {
        out.push(y1);
    }
    let two_over_x = T::two() / x;
    for k in 1..nmax {
        let next = two_over_x * T::from_int(k as i64) * out[k] - out[k - 1];
        out.push(next);
    }
    Ok(out)
}

/// Bessel function of the second kind `Y_n(x)`, `x > 0`.
pub fn bessel_y<T: Real>(n: i32, x: T) -> Result<T> {
    let m = n.unsigned_abs() as usize;
    let v = bessel_y_seq(m, x)?[m];
    Ok(if n < 0 { parity_sign::<T>(m as i64) * v } else { v })
}

/// `H^(1)_0(x), ..., H^(1)_nmax(x)`.
pub fn hankel1_seq<T: Real>(nmax: usize, x: T) -> Result<Vec<Complex<T>>> {
    let y = bessel_y_seq(nmax, x)?;
    let j = bessel_j_seq(nmax, x);
    Ok(j.into_iter().zip(y).map(|(j, y)| Complex::new(j, y)).collect())
}

/// Hankel function of the first kind `H^(1)_n(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1<T: Real>(n: i32, x: T) -> Result<Complex<T>> {
    let m = n.unsigned_abs() as usize;
    let h = Complex::new(bessel_j(m as i32, x), bessel_y(m as i32, x)?);
    Ok(if n < 0 { h * parity_sign::<T>(m as i64) } else { h })
}

/// `dJ_n/dx` from `2 J'_n = J_{n-1} - J_{n+1}`.
pub fn bessel_j_prime<T: Real>(n: i32, x: T) -> T {
    (bessel_j(n - 1, x) - bessel_j(n + 1, x)) * T::half()
}

/// `dY_n/dx`, `x > 0`.
pub fn bessel_y_prime<T: Real>(n: i32, x: T) -> Result<T> {
    Ok((bessel_y(n - 1, x)? - bessel_y(n + 1, x)?) * T::half())
}

/// `dH^(1)_n/dx`, `x > 0`.
pub fn hankel1_prime<T: Real>(n: i32, x: T) -> Result<Complex<T>> {
    Ok((hankel1(n - 1, x)? - hankel1(n + 1, x)?) * T::half())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain ascending series, no shortcuts: independent oracle for `J_n`.
    fn series_oracle(n: u32, x: f64, terms: u32) -> f64 {
        let mut sum = 0.0;
        for k in 0..terms {
            let mut t = 1.0;
            for i in 1..=k {
                t *= -(x * x / 4.0) / i as f64;
            }
            for i in 1..=(n + k) {
                t /= i as f64;
            }
            sum += t * (x / 2.0).powi(n as i32);
        }
        sum
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0_f64), 1.0);
        assert_eq!(bessel_j(1, 0.0_f64), 0.0);
        assert_eq!(bessel_j(-3, 0.0_f64), 0.0);
    }

    #[test]
    fn j_matches_forty_term_series() {
        let oracle = series_oracle(3, 2.5, 40);
        let v = bessel_j(3, 2.5_f64);
        assert!(((v - oracle) / oracle).abs() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn j_miller_branch_matches_series() {
        // x^2/4 > n + 1 forces the Miller route; the series is still exact
        // enough in extended summation at x = 7.
        for n in 0..6u32 {
            let oracle = series_oracle(n, 7.0, 60);
            let v = bessel_j(n as i32, 7.0_f64);
            assert!((v - oracle).abs() < 1e-13, "n={n}: {v} vs {oracle}");
        }
    }

    #[test]
    fn j_reference_values() {
        // Values from standard tables.
        let cases = [
            (0, 1.0_f64, 0.765_197_686_557_966_6_f64),
            (1, 1.0, 0.440_050_585_744_933_5),
            (0, 10.0, -0.245_935_764_451_348_3),
            (5, 10.0, -0.234_061_528_186_793_7),
            (0, 50.0, 0.055_812_327_669_251_85),
            (20, 10.0, 1.151_336_924_781_340_5e-5),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x);
            assert!(((got - want) / want).abs() < 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn y_reference_values() {
        let cases = [
            (0, 1.0_f64, 0.088_256_964_215_676_96_f64),
            (1, 1.0, -0.781_212_821_300_288_7),
            (0, 10.0, 0.055_671_167_283_599_39),
            (2, 7.0, -0.060_526_609_468_272_13),
            (0, 30.0, -0.117_295_731_686_664_03),
            (1, 30.0, 0.084_425_570_661_747_23),
        ];
        for (n, x, want) in cases {
            let got = bessel_y(n, x).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "Y_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn y_recurrence_oracle() {
        // Seed from n = 0, 1 and recur upward independently of the kernel's
        // sequence routine.
        let x = 7.0_f64;
        let y0 = bessel_y(0, x).unwrap();
        let y1 = bessel_y(1, x).unwrap();
        let y2 = 2.0 / x * y1 - y0;
        assert!((bessel_y(2, x).unwrap() - y2).abs() < 1e-10 * y2.abs());
    }

    #[test]
    fn y_is_singular_at_origin() {
        assert!(matches!(bessel_y(0, 0.0_f64), Err(Error::Domain { .. })));
        assert!(matches!(hankel1(2, 0.0_f64), Err(Error::Domain { .. })));
    }

    #[test]
    fn y0_small_argument_log() {
        for &x in &[1e-3_f64, 1e-5, 1e-8] {
            let y = bessel_y(0, x).unwrap();
            let lead = 2.0 / std::f64::consts::PI * ((x / 2.0).ln() + 0.577_215_664_901_532_9);
            assert!((y - lead).abs() < 1e-5, "x={x}: {y} vs {lead}");
        }
        assert!(bessel_y(0, 1e-300_f64).unwrap() < -400.0);
    }

    #[test]
    fn hankel_large_argument_magnitude() {
        let x = 50.0_f64;
        let h = hankel1(0, x).unwrap();
        let lead = (2.0 / (std::f64::consts::PI * x)).sqrt();
        assert!((h.norm() - lead).abs() < 0.005 * lead);
    }

    #[test]
    fn hankel_prime_identity() {
        for &x in &[0.3_f64, 2.0, 17.0, 40.0] {
            let d = hankel1_prime(0, x).unwrap();
            let h1 = hankel1(1, x).unwrap();
            assert!((d + h1).norm() < 1e-14 * h1.norm());
        }
    }

    #[test]
    fn hankel_composes_real_kernels() {
        let h = hankel1(4, 3.3_f64).unwrap();
        assert_eq!(h.re, bessel_j(4, 3.3));
        assert_eq!(h.im, bessel_y(4, 3.3).unwrap());
    }

    #[test]
    fn reflection_is_a_sign_flip() {
        for n in 0..8 {
            for &x in &[0.4_f64, 3.0, 31.0] {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(bessel_j(-n, x), s * bessel_j(n, x));
                assert_eq!(bessel_y(-n, x).unwrap(), s * bessel_y(n, x).unwrap());
                assert_eq!(hankel1(-n, x).unwrap(), hankel1(n, x).unwrap() * s);
            }
        }
    }

    #[test]
    fn sequences_agree_with_single_orders() {
        let x = 12.5_f64;
        let js = bessel_j_seq(30, x);
        let hs = hankel1_seq(30, x).unwrap();
        for n in 0..=30 {
            assert!((js[n] - bessel_j(n as i32, x)).abs() < 1e-15);
            let h = hankel1(n as i32, x).unwrap();
            assert!((hs[n] - h).norm() <= 1e-14 * h.norm());
        }
    }

    #[test]
    fn high_order_small_argument_does_not_underflow_early() {
        let v = bessel_j(50, 1e-3_f64);
        assert!(v > 0.0 && v < 1e-200);
        let oracle = series_oracle(50, 1e-3, 5);
        assert!(((v - oracle) / oracle).abs() < 1e-12);
    }

    #[test]
    fn single_precision_instantiation() {
        let v = bessel_j(1, 2.0_f32);
        assert!((v - 0.576_724_8).abs() < 1e-6);
        let h = hankel1(0, 2.0_f32).unwrap();
        assert!((h.im - 0.510_375_7).abs() < 1e-5);
    }
}
