//! Small-spacing forms of the lattice sums: the propagating ("Bessel")
//! part, approximations of the remaining ("Neumann") part, truncated
//! expansions for the first few orders, and the leading constants `h_n`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, parity_sign, re, Real};
use crate::schlomilch::elementary::{bernoulli_even, bernoulli_odd, exp_euler};
use crate::schlomilch::modes::ModeStructure;
use crate::special::{bernoulli_number, bernoulli_poly, hurwitz_zeta, zeta_partial};

/// Explicit terms before the Laurent tail in [`rational_tail_sum`].
const EXPLICIT_TERMS: usize = 64;
/// Laurent coefficients used for the tail.
const LAURENT_TERMS: usize = 32;

fn mirror_if_negative<T: Real>(n: i32, modes: &ModeStructure<T>) -> Result<(u32, ModeStructure<T>)> {
    if n >= 0 {
        Ok((n as u32, modes.clone()))
    } else {
        Ok((n.unsigned_abs(), modes.mirrored()?))
    }
}

/// `sum_{mu >= start} N(1/mu) / D(1/mu)` for polynomials with `N` vanishing
/// to second order at the origin. `num[k]`, `den[k]` multiply `x^k`.
///
/// Terms up to a cut-off are summed directly; the rest is expanded in
/// powers of `1/mu` and summed with Hurwitz zeta values.
fn rational_tail_sum<T: Real>(num: &[T], den: &[T], start: usize, scale: T) -> Result<T> {
    let eval = |x: T, p: &[T]| p.iter().rev().fold(T::zero(), |acc, &c| acc * x + c);
    let end = start + EXPLICIT_TERMS + (T::lit(8.0) * scale).ceil().as_f64() as usize;
    let mut explicit = T::zero();
    for mu in (start..end).rev() {
        let x = T::from_int(mu as i64).recip();
        explicit += eval(x, num) / eval(x, den);
    }
    // Laurent coefficients of N/D by series division.
    let mut c = [T::zero(); LAURENT_TERMS];
    for k in 0..LAURENT_TERMS {
        let mut acc = num.get(k).copied().unwrap_or_else(T::zero);
        for j in 1..=k {
            acc -= den.get(j).copied().unwrap_or_else(T::zero) * c[k - j];
        }
        c[k] = acc / den[0];
    }
    debug_assert!(c[0] == T::zero() && c[1] == T::zero());
    let endf = T::from_int(end as i64);
    let mut tail = T::zero();
    for (k, ck) in c.iter().enumerate().skip(2) {
        if *ck == T::zero() {
            continue;
        }
        tail += *ck * hurwitz_zeta(k as u32, endf)?;
    }
    Ok(explicit + tail)
}

/// Propagating ("Bessel series") part of `I_n`:
/// `(1/(pi Delta)) sum_mu cos(2k phi_mu)/cos(phi_mu) - delta_k0` for `n = 2k`,
/// `(1/(i pi Delta)) sum_mu sin((2k+1) phi_mu)/cos(phi_mu)` for `n = 2k+1`.
pub fn bessel_series<T: Real>(n: i32, modes: &ModeStructure<T>) -> Result<Complex<T>> {
    let (m, modes) = mirror_if_negative(n, modes)?;
    let nf = T::from_int(m as i64);
    let scale = (T::PI() * modes.delta).recip();
    if m % 2 == 0 {
        let s: T = modes
            .phi
            .iter()
            .map(|&(mu, phi)| (nf * phi).cos() / modes.cos_phi(mu))
            .fold(T::zero(), |a, b| a + b);
        Ok(re(s * scale - if m == 0 { T::one() } else { T::zero() }))
    } else {
        let s: T = modes
            .phi
            .iter()
            .map(|&(mu, phi)| (nf * phi).sin() / modes.cos_phi(mu))
            .fold(T::zero(), |a, b| a + b);
        Ok(Complex::new(T::zero(), -s * scale))
    }
}

/// Which approximation of the "Neumann series" to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeumannForm {
    /// Any number of propagating orders; evanescent terms replaced by their
    /// leading large-`mu` forms.
    General,
    /// One propagating order; order-zero sum kept as a series over `mu`.
    SingleModeSeries,
    /// One propagating order; series replaced by their leading zeta terms.
    SingleMode,
}

/// Approximate `N_n = (I_n - J_n) / i`, `J_n` being [`bessel_series`].
pub fn neumann_series<T: Real>(n: i32, modes: &ModeStructure<T>, form: NeumannForm) -> Result<Complex<T>> {
    let (m, modes) = mirror_if_negative(n, modes)?;
    if form != NeumannForm::General && !modes.single_mode() {
        return Err(Error::PreconditionViolated(format!(
            "single-mode Neumann series requested with mu_+ = {}, mu_- = {}",
            modes.mu_plus, modes.mu_minus
        )));
    }
    match form {
        NeumannForm::General => neumann_general(m, &modes),
        NeumannForm::SingleModeSeries if m == 0 => neumann0_series(&modes),
        _ => neumann_single_mode(m, &modes),
    }
}

fn log_term<T: Real>(delta: T) -> T {
    -(T::two() / T::PI()) * (exp_euler::<T>() * delta * T::half()).ln()
}

fn harmonic<T: Real>(m: usize) -> T {
    (1..=m).fold(T::zero(), |acc, k| acc + T::from_int(k as i64).recip())
}

/// Sum over `mu > mu_branch` of `(Delta / 2 mu)^p / (mu/Delta +- s - Delta/(2 mu))`.
fn evanescent_leading<T: Real>(p: u32, modes: &ModeStructure<T>, branch: i32) -> Result<T> {
    let delta = modes.delta;
    let s = T::from_int(branch as i64) * modes.sin_psi;
    let start = 1 + if branch > 0 { modes.mu_plus } else { modes.mu_minus };
    // In x = 1/mu: (Delta/2)^p Delta x^(p+1) / (1 + s Delta x - Delta^2 x^2 / 2).
    let mut num = vec![T::zero(); p as usize + 2];
    num[p as usize + 1] = (delta * T::half()).powi(p as i32) * delta;
    let den = [T::one(), s * delta, -delta * delta * T::half()];
    rational_tail_sum(&num, &den, start, delta)
}

fn neumann_general<T: Real>(m: u32, modes: &ModeStructure<T>) -> Result<Complex<T>> {
    let pi = T::PI();
    let delta = modes.delta;
    let s = modes.sin_psi;
    let x0 = delta * s;
    if m == 0 {
        let mut value = log_term(delta) + (harmonic::<T>(modes.mu_plus) + harmonic::<T>(modes.mu_minus)) / pi;
        for branch in [1, -1] {
            let sb = T::from_int(branch as i64) * s;
            let start = 1 + if branch > 0 { modes.mu_plus } else { modes.mu_minus };
            // (Delta x/2 - s_b) Delta^2 x^2 / (1 + s_b Delta x - Delta^2 x^2 / 2).
            let num = [T::zero(), T::zero(), -sb * delta * delta, delta.powi(3) * T::half()];
            let den = [T::one(), sb * delta, -delta * delta * T::half()];
            value -= rational_tail_sum(&num, &den, start, delta)? / (pi * delta);
        }
        return Ok(re(value));
    }
    // Split sum over propagating orders: sum_{mu >= 0} - sum_{mu < 0}.
    let split = |f: &dyn Fn(T) -> T| {
        modes.propagating().fold(T::zero(), |acc, mu| {
            let v = f(T::from_int(mu) + x0);
            if mu >= 0 {
                acc + v
            } else {
                acc - v
            }
        })
    };
    let scale = T::lit(4.0) / (delta * delta);
    let ep = evanescent_leading(m, modes, 1)?;
    let em = evanescent_leading(m, modes, -1)?;
    if m.is_multiple_of(2) {
        let k = m / 2;
        let kf = T::from_int(k as i64);
        let poly = |y: T| {
            let mut coeff = -T::two() * kf / (delta * delta);
            let mut acc = T::zero();
            for j in 1..=k {
                let jf = T::from_int(j as i64);
                acc += coeff * y.powi(2 * j as i32 - 1);
                coeff *= -(kf + jf) * (kf - jf) / ((T::two() * jf) * (T::two() * jf + T::one())) * scale;
            }
            acc
        };
        let value = (kf.recip() + bernoulli_even(k, modes)?) / pi + split(&poly) / pi
            - parity_sign::<T>(k as i64) / (pi * delta) * (ep + em);
        Ok(re(value))
    } else {
        let k = (m - 1) / 2;
        let kf = T::from_int(k as i64);
        let poly = |y: T| {
            let mut coeff = delta.recip();
            let mut acc = T::zero();
            for j in 0..=k {
                let jf = T::from_int(j as i64);
                acc += coeff * y.powi(2 * j as i32);
                coeff *= -(kf + jf + T::one()) * (kf - jf) / ((T::two() * jf + T::one()) * (T::two() * jf + T::two()))
                    * scale;
            }
            acc
        };
        // Everything carries an overall 1/i.
        let value = T::two() / pi * bernoulli_odd(k, modes)? + split(&poly) / pi
            - parity_sign::<T>(k as i64) / (pi * delta) * (ep - em);
        Ok(Complex::new(T::zero(), -value))
    }
}

/// Order-zero Neumann part for a single propagating order, kept as a series.
fn neumann0_series<T: Real>(modes: &ModeStructure<T>) -> Result<Complex<T>> {
    let delta = modes.delta;
    let s2 = modes.sin_psi * modes.sin_psi;
    let d2 = delta * delta;
    // Delta^3 x^3 ((1 + 2 s^2) - Delta^2 x^2 / 2) / (1 - (1 + s^2) Delta^2 x^2 + Delta^4 x^4 / 4).
    let num = [
        T::zero(),
        T::zero(),
        T::zero(),
        delta.powi(3) * (T::one() + T::two() * s2),
        T::zero(),
        -delta.powi(5) * T::half(),
    ];
    let den = [
        T::one(),
        T::zero(),
        -(T::one() + s2) * d2,
        T::zero(),
        d2 * d2 * T::lit(0.25),
    ];
    let sum = rational_tail_sum(&num, &den, 1, delta)?;
    Ok(re(log_term(delta) - sum / (T::PI() * delta)))
}

fn neumann_single_mode<T: Real>(m: u32, modes: &ModeStructure<T>) -> Result<Complex<T>> {
    let pi = T::PI();
    let delta = modes.delta;
    let s = modes.sin_psi;
    let x0 = delta * s;
    let scale = T::lit(4.0) / (delta * delta);
    if m == 0 {
        let z3 = zeta_partial(3, T::lit(1e-15))?;
        return Ok(re(
            log_term(delta) - (T::one() + T::two() * s * s) * delta * delta * z3 / pi
        ));
    }
    if m.is_multiple_of(2) {
        let k = m / 2;
        let kf = T::from_int(k as i64);
        // (-1)^j 2^(2j-1) (k+j-1)! / ((2j-1)! (k-j)! Delta^(2j)).
        let mut coeff = -T::two() * kf / (delta * delta);
        let mut sum = T::zero();
        for j in 1..=k {
            let jf = T::from_int(j as i64);
            sum += coeff * (bernoulli_poly(2 * j as usize, x0)? / jf + x0.powi(2 * j as i32 - 1));
            coeff *= -(kf + jf) * (kf - jf) / ((T::two() * jf) * (T::two() * jf + T::one())) * scale;
        }
        let f = parity_sign::<T>(k as i64 + 1) / (pi * delta)
            * T::two().powi(1 - 2 * k as i32)
            * delta.powi(2 * k as i32 + 1)
            * hurwitz_zeta(2 * k + 1, T::one())?;
        Ok(re((kf.recip() + sum) / pi + f))
    } else {
        let k = (m - 1) / 2;
        let kf = T::from_int(k as i64);
        // (-1)^j 2^(2j) (k+j)! / ((2j)! (k-j)! Delta^(2j+1)).
        let mut coeff = delta.recip();
        let mut sum = T::zero();
        for j in 0..=k {
            let jf = T::from_int(j as i64);
            sum += coeff * (bernoulli_poly(2 * j as usize + 1, x0)? / (jf + T::half()) + x0.powi(2 * j as i32));
            coeff *=
                -(kf + jf + T::one()) * (kf - jf) / ((T::two() * jf + T::one()) * (T::two() * jf + T::two())) * scale;
        }
        let f = parity_sign::<T>(k as i64 + 1) / (pi * delta)
            * s
            * T::two().powi(-2 * k as i32)
            * delta.powi(2 * k as i32 + 3)
            * hurwitz_zeta(2 * k + 3, T::one())?;
        // (1/(i pi)) sum + i f.
        Ok(Complex::new(T::zero(), -sum / pi + f))
    }
}

/// Power of `k_r d` that the leading term of `I_n` carries:
/// `I_n ~ h_n / (k_r d)^e`, `e = 1` for `|n| <= 1`, `2 floor(|n|/2)` otherwise.
pub fn leading_exponent(n: i32) -> i32 {
    let m = n.abs();
    if m <= 1 {
        1
    } else {
        2 * (m / 2)
    }
}

/// Leading constant `h_n` for `sin phi_0 = sin_phi0` (with `cos phi_0 >= 0`).
///
/// `h_0 = 2 sec phi_0`, `h_1 = -2i tan phi_0`,
/// `h_2k = (i/k) (-1)^k 2^(4k-1) pi^(2k-1) B_2k` and
/// `h_(2k+1) = -4ik h_2k sin phi_0`; negative orders follow from
/// `h_(-n)(sin phi_0) = h_n(-sin phi_0)`.
pub fn h_constant<T: Real>(n: i32, sin_phi0: T) -> Result<Complex<T>> {
    let s = if n < 0 { -sin_phi0 } else { sin_phi0 };
    let m = n.unsigned_abs();
    let c = (T::one() - s * s).sqrt();
    let i = imag_unit::<T>();
    match m {
        0 => Ok(re(T::two() / c)),
        1 => Ok(i * (-T::two() * s / c)),
        _ => {
            let k = m / 2;
            let kf = T::from_int(k as i64);
            let pi = T::PI();
            let mag = parity_sign::<T>(k as i64)
                * T::two().powi(4 * k as i32 - 1)
                * pi.powi(2 * k as i32 - 1)
                * bernoulli_number::<T>(2 * k as usize)?
                / kf;
            let h_even = i * mag;
            if m.is_multiple_of(2) {
                Ok(h_even)
            } else {
                Ok(h_even * i * (-T::lit(4.0) * kf * s))
            }
        }
    }
}

/// Truncated small-`k_r d` expansion of `I_n`: the explicit expansions for
/// `|n| <= 4` and the leading term `h_n / (k_r d)^e` beyond.
pub fn leading_terms<T: Real>(n: i32, modes: &ModeStructure<T>) -> Result<Complex<T>> {
    let (m, modes) = mirror_if_negative(n, modes)?;
    if !modes.single_mode() {
        return Err(Error::PreconditionViolated(format!(
            "small-spacing expansion needs a single propagating order (mu_+ = {}, mu_- = {})",
            modes.mu_plus, modes.mu_minus
        )));
    }
    let pi = T::PI();
    let i = imag_unit::<T>();
    let kd = T::two() * pi * modes.delta;
    let s = modes.sin_psi;
    let s2 = s * s;
    let c = (T::one() - s2).sqrt();
    let z3 = || hurwitz_zeta(3, T::one());
    let z5 = || hurwitz_zeta(5, T::one());
    let two_pi = T::two() * pi;
    let val = match m {
        0 => {
            re(T::two() / (kd * c) - T::one())
                + i * (-(T::two() / pi) * (exp_euler::<T>() * kd / (T::lit(4.0) * pi)).ln()
                    - kd * kd / (T::two() * pi.powi(3)) * (T::half() + s2) * z3()?)
        }
        1 => re(T::two() * s / pi + kd * kd * s / (T::two() * pi.powi(3)) * z3()?) + i * (-T::two() * s / (kd * c)),
        2 => {
            let cos2 = T::one() - T::two() * s2;
            re(T::two() * cos2 / (kd * c))
                + i * (-T::lit(4.0) * pi / (T::lit(3.0) * kd * kd)
                    + (T::one() - T::two() * s2) / pi
                    + kd * kd / two_pi.powi(3) * z3()?)
        }
        3 => {
            let sin3 = T::lit(3.0) * s - T::lit(4.0) * s * s2;
            re(-T::lit(16.0) * pi * s / (T::lit(3.0) * kd * kd)
                + T::two() * s / pi * (T::one() - T::lit(4.0) / T::lit(3.0) * s2)
                - s * kd.powi(4) / (T::two() * two_pi.powi(5)) * z5()?)
                + i * (-T::two() * sin3 / (kd * c))
        }
        4 => {
            let cos4 = T::one() - T::lit(8.0) * s2 + T::lit(8.0) * s2 * s2;
            re(T::two() * cos4 / (kd * c))
                + i * (-T::lit(32.0) * pi.powi(3) / (T::lit(15.0) * kd.powi(4))
                    - T::lit(16.0) * pi / (kd * kd) * (T::one() / T::lit(6.0) - s2)
                    + (T::one() - T::lit(8.0) * s2 + T::lit(8.0) * s2 * s2) / (T::two() * pi)
                    - kd.powi(4) / (T::lit(4.0) * two_pi.powi(5)) * z5()?)
        }
        _ => h_constant(m as i32, s)? / kd.powi(leading_exponent(m as i32)),
    };
    Ok(val)
}
