//! Elementary-function representation of the lattice sums.
//!
//! Each sum splits into finite trigonometric sums over propagating grating
//! orders, a Bernoulli-polynomial part, and series over evanescent orders.
//! The evanescent series decay only algebraically (like `mu^-(n+1)`), so
//! they are summed explicitly up to a cut-off and completed with an
//! asymptotic tail: writing `u = 1/cosh(eta)`, each term is
//! `u^(n+1) (1 + sqrt(1 - u^2))^(-n) / sqrt(1 - u^2)`, a power series in `u^2`
//! whose powers sum to Hurwitz zeta values.

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::{imag_unit, parity_sign, re, Real};
use crate::schlomilch::modes::ModeStructure;
use crate::special::{bernoulli_poly, digamma, hurwitz_zeta};

/// Explicit evanescent terms summed before switching to the tail expansion.
const EXPLICIT_TERMS: usize = 64;
/// Terms of the power series in `u^2` used for the tail.
const TAIL_SERIES: usize = 24;

/// First evanescent index of a branch (`+1` or `-1`).
fn first_evanescent<T: Real>(modes: &ModeStructure<T>, branch: i32) -> usize {
    1 + if branch > 0 { modes.mu_plus } else { modes.mu_minus }
}

/// Cut-off index: far enough that `u <= 1/4` on the tail.
fn cutoff<T: Real>(modes: &ModeStructure<T>, start: usize) -> usize {
    let need = (T::lit(4.0) * modes.delta + modes.sin_psi.abs() * modes.delta)
        .ceil()
        .as_f64() as usize;
    (start + EXPLICIT_TERMS).max(need + EXPLICIT_TERMS)
}

/// `(e^(-eta), sinh eta)` from `cosh eta = c >= 1` without cancellation.
fn decay<T: Real>(c: T) -> (T, T) {
    let sh = (c * c - T::one()).sqrt();
    ((c + sh).recip(), sh)
}

/// Power-series coefficients `g_j` with
/// `(1 + sqrt(1 - w))^(-n) (1 - w)^(-1/2) = 2^(-n) sum_j g_j w^j`.
fn tail_coefficients<T: Real>(n: u32) -> Vec<T> {
    let len = TAIL_SERIES;
    // q(w) = (1 + sqrt(1 - w)) / 2.
    let mut binom = T::one();
    let mut q = vec![T::one(); len];
    for (j, qj) in q.iter_mut().enumerate().skip(1) {
        let jf = T::from_int(j as i64);
        binom *= (T::half() - jf + T::one()) / jf;
        *qj = binom * parity_sign::<T>(j as i64) * T::half();
    }
    // h = q^(-n) via (q h' = a q' h).
    let a = -T::from_int(n as i64);
    let mut h = vec![T::zero(); len];
    h[0] = T::one();
    for k in 1..len {
        let kf = T::from_int(k as i64);
        let mut acc = T::zero();
        for i in 1..=k {
            acc += ((a + T::one()) * T::from_int(i as i64) - kf) * q[i] * h[k - i];
        }
        h[k] = acc / kf;
    }
    // (1 - w)^(-1/2) = sum C(2j, j) / 4^j w^j.
    let mut r = vec![T::one(); len];
    for j in 1..len {
        let jf = T::from_int(j as i64);
        r[j] = r[j - 1] * (T::two() * jf - T::one()) / (T::two() * jf);
    }
    (0..len)
        .map(|k| (0..=k).fold(T::zero(), |acc, i| acc + h[i] * r[k - i]))
        .collect()
}

/// `sum_{mu > mu_branch} e^(-n eta_mu) / sinh eta_mu` for `n >= 1`.
pub fn evanescent_sum<T: Real>(n: u32, modes: &ModeStructure<T>, branch: i32) -> Result<T> {
    let start = first_evanescent(modes, branch);
    let end = cutoff(modes, start);
    let mut explicit = T::zero();
    // Ascending terms decrease; add the small ones first.
    for mu in (start..end).rev() {
        let (e, sh) = decay(modes.cosh_eta(branch, mu));
        explicit += e.powi(n as i32) / sh;
    }
    // Tail: u_mu = Delta / (mu + sigma), sigma = +-Delta sin psi.
    let sigma = T::from_int(branch as i64) * modes.delta * modes.sin_psi;
    let shift = T::from_int(end as i64) + sigma;
    let g = tail_coefficients::<T>(n);
    let mut tail = T::zero();
    for (j, gj) in g.iter().enumerate() {
        let p = n + 1 + 2 * j as u32;
        let term = *gj * modes.delta.powi(p as i32) * hurwitz_zeta(p, shift)?;
        tail += term;
        if term.abs() <= T::epsilon() * tail.abs() * T::lit(1e-2) {
            break;
        }
    }
    Ok(explicit + tail * T::two().powi(-(n as i32)))
}

/// `sum_{mu > mu_branch} [1 / (Delta sinh eta_mu) - 1 / mu]`.
pub fn evanescent_log_sum<T: Real>(modes: &ModeStructure<T>, branch: i32) -> Result<T> {
    let start = first_evanescent(modes, branch);
    let end = cutoff(modes, start);
    let delta = modes.delta;
    let mut explicit = T::zero();
    for mu in (start..end).rev() {
        let (_, sh) = decay(modes.cosh_eta(branch, mu));
        explicit += (delta * sh).recip() - T::from_int(mu as i64).recip();
    }
    // 1/(Delta sinh eta) = (1/(mu + sigma)) (1 - u^2)^(-1/2); the leading
    // 1/(mu + sigma) - 1/mu sums to psi(end) - psi(end + sigma).
    let sigma = T::from_int(branch as i64) * delta * modes.sin_psi;
    let endf = T::from_int(end as i64);
    let shift = endf + sigma;
    let mut tail = digamma(endf)? - digamma(shift)?;
    let mut coeff = T::one();
    for j in 1..TAIL_SERIES {
        let jf = T::from_int(j as i64);
        coeff *= (T::two() * jf - T::one()) / (T::two() * jf);
        let p = 2 * j as u32 + 1;
        let term = coeff * delta.powi(p as i32 - 1) * hurwitz_zeta(p, shift)?;
        tail += term;
        if term.abs() <= T::epsilon() * T::lit(1e-2) * (tail.abs() + explicit.abs()) {
            break;
        }
    }
    Ok(explicit + tail)
}

/// Propagating-order sums `sum_mu trig(n phi_mu) / cos phi_mu`, over all
/// orders and as the split `sum_{mu >= 0} - sum_{mu < 0}`.
struct PropagatingSums<T: Real> {
    cos_all: T,
    sin_all: T,
    cos_split: T,
    sin_split: T,
}

fn propagating_sums<T: Real>(n: u32, modes: &ModeStructure<T>) -> PropagatingSums<T> {
    let mut out = PropagatingSums {
        cos_all: T::zero(),
        sin_all: T::zero(),
        cos_split: T::zero(),
        sin_split: T::zero(),
    };
    let nf = T::from_int(n as i64);
    for &(mu, phi) in &modes.phi {
        let c = modes.cos_phi(mu);
        let (s_n, c_n) = (nf * phi).sin_cos();
        let (a, b) = (c_n / c, s_n / c);
        out.cos_all += a;
        out.sin_all += b;
        if mu >= 0 {
            out.cos_split += a;
            out.sin_split += b;
        } else {
            out.cos_split -= a;
            out.sin_split -= b;
        }
    }
    out
}

/// Bernoulli part of the even-order sums:
/// `sum_{m=1}^{k} (-1)^m 2^(2m) (k+m-1)! B_2m(Delta s) / ((2m)! (k-m)! Delta^(2m))`.
pub(crate) fn bernoulli_even<T: Real>(k: u32, modes: &ModeStructure<T>) -> Result<T> {
    let x = modes.delta * modes.sin_psi;
    let scale = T::lit(4.0) / (modes.delta * modes.delta);
    let kf = T::from_int(k as i64);
    let mut coeff = kf * T::half() * scale;
    let mut sum = T::zero();
    for m in 1..=k {
        let mf = T::from_int(m as i64);
        sum += parity_sign::<T>(m as i64) * coeff * bernoulli_poly(2 * m as usize, x)?;
        coeff *= (kf + mf) * (kf - mf) / ((T::two() * mf + T::one()) * (T::two() * mf + T::two())) * scale;
    }
    Ok(sum)
}

/// Bernoulli part of the odd-order sums:
/// `sum_{m=0}^{k} (-1)^m 2^(2m) (k+m)! B_(2m+1)(Delta s) / ((2m+1)! (k-m)! Delta^(2m+1))`.
pub(crate) fn bernoulli_odd<T: Real>(k: u32, modes: &ModeStructure<T>) -> Result<T> {
    let x = modes.delta * modes.sin_psi;
    let scale = T::lit(4.0) / (modes.delta * modes.delta);
    let kf = T::from_int(k as i64);
    let mut coeff = modes.delta.recip();
    let mut sum = T::zero();
    for m in 0..=k {
        let mf = T::from_int(m as i64);
        sum += parity_sign::<T>(m as i64) * coeff * bernoulli_poly(2 * m as usize + 1, x)?;
        coeff *=
            (kf + mf + T::one()) * (kf - mf) / ((T::two() * mf + T::two()) * (T::two() * mf + T::from_int(3))) * scale;
    }
    Ok(sum)
}

/// `exp(Euler gamma)`, the constant written as `gamma` in the log term.
pub(crate) fn exp_euler<T: Real>() -> T {
    T::euler_gamma().exp()
}

/// Lattice sum of non-negative order `n` from the elementary representation.
pub fn elementary_nonneg<T: Real>(n: u32, modes: &ModeStructure<T>) -> Result<Complex<T>> {
    let pi = T::PI();
    let delta = modes.delta;
    let i = imag_unit::<T>();
    let prop = propagating_sums(n, modes);
    if n == 0 {
        let harmonic = |m: usize| (1..=m).fold(T::zero(), |acc, k| acc + T::from_int(k as i64).recip());
        let real = -T::one() + prop.cos_all / (pi * delta);
        let imag = -(T::two() / pi) * (delta * exp_euler::<T>() * T::half()).ln()
            + (harmonic(modes.mu_plus) + harmonic(modes.mu_minus)) / pi
            - (evanescent_log_sum(modes, 1)? + evanescent_log_sum(modes, -1)?) / pi;
        return Ok(Complex::new(real, imag));
    }
    let ep = evanescent_sum(n, modes, 1)?;
    let em = evanescent_sum(n, modes, -1)?;
    if n.is_multiple_of(2) {
        let k = n / 2;
        let sign = parity_sign::<T>(k as i64);
        let real = prop.cos_all / (pi * delta);
        let imag = (T::from_int(k as i64).recip() + bernoulli_even(k, modes)?) / pi
            - (prop.sin_split + sign * (ep + em)) / (pi * delta);
        Ok(Complex::new(real, imag))
    } else {
        let k = (n - 1) / 2;
        let sign = parity_sign::<T>(k as i64 + 1);
        let real = T::two() / pi * bernoulli_odd(k, modes)? + (prop.cos_split + sign * (ep - em)) / (pi * delta);
        let imag = -prop.sin_all / (pi * delta);
        Ok(re(real) + i * imag)
    }
}

/// Lattice sum `I_n` of any order; negative orders use the structure for
/// `-sin psi_i`.
pub fn elementary<T: Real>(n: i32, modes: &ModeStructure<T>) -> Result<Complex<T>> {
    if n >= 0 {
        elementary_nonneg(n as u32, modes)
    } else {
        elementary_nonneg(n.unsigned_abs(), &modes.mirrored()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schlomilch::direct::direct_sum;

    /// Plain summation to a large cut-off plus the integral estimate of the rest.
    fn brute_evanescent(n: u32, delta: f64, s: f64, start: usize) -> f64 {
        let mut sum = 0.0;
        let end = 2_000_000usize;
        for mu in (start..end).rev() {
            let c = s + mu as f64 / delta;
            let eta = c.acosh();
            sum += (-(n as f64) * eta).exp() / eta.sinh();
        }
        // Terms ~ 2 (Delta / 2 mu)^(n+1): integral of the remainder.
        let e = end as f64;
        sum + 2.0 * (delta / 2.0).powi(n as i32 + 1) * e.powi(-(n as i32)) / n as f64
    }

    #[test]
    fn evanescent_tail_matches_brute_force() {
        for &(delta, s) in &[(0.2_f64, 0.0), (0.45, -0.7), (1.3, -0.5)] {
            let modes = ModeStructure::new(delta, s).unwrap();
            for n in 1..4u32 {
                let fast = evanescent_sum(n, &modes, 1).unwrap();
                let slow = brute_evanescent(n, delta, s, modes.mu_plus + 1);
                assert!(
                    ((fast - slow) / slow).abs() < 1e-9,
                    "n={n} delta={delta}: {fast} {slow}"
                );
            }
        }
    }

    #[test]
    fn log_tail_matches_brute_force() {
        let delta = 0.3_f64;
        let s = -0.3;
        let modes = ModeStructure::new(delta, s).unwrap();
        let mut slow = 0.0;
        let end = 4_000_000usize;
        for mu in (1..end).rev() {
            let c = s + mu as f64 / delta;
            slow += 1.0 / (delta * c.acosh().sinh()) - 1.0 / mu as f64;
        }
        // Remainder ~ -(s Delta) / mu^2 summed: s Delta ... integral.
        slow += -s * delta / end as f64;
        let fast = evanescent_log_sum(&modes, 1).unwrap();
        assert!((fast - slow).abs() < 1e-9, "{fast} {slow}");
    }

    #[test]
    fn agrees_with_direct_summation() {
        for &(delta, s) in &[(0.2_f64, 0.0), (0.45, -0.7), (1.3, -0.5)] {
            let modes = ModeStructure::new(delta, s).unwrap();
            for n in -4..=4 {
                let e = elementary(n, &modes).unwrap();
                let d = direct_sum(n, delta, s, 1e-11).unwrap();
                assert!(
                    (e - d).norm() < 1e-8 * d.norm().max(1.0),
                    "n={n} delta={delta} s={s}: {e} vs {d}"
                );
            }
        }
    }

    #[test]
    fn odd_orders_real_part_vanishes_at_normal_azimuth() {
        let modes = ModeStructure::new(0.3_f64, 0.0).unwrap();
        for n in [1u32, 3, 5] {
            let v = elementary_nonneg(n, &modes).unwrap();
            assert_eq!(v.im, 0.0);
            assert!(v.re.abs() < 1e-13);
        }
    }

    #[test]
    fn tail_series_leading_coefficients() {
        // (1 + sqrt(1 - w))^(-1) (1 - w)^(-1/2) / 2^(-1) = 1 + 3w/4 + ...
        let g = tail_coefficients::<f64>(1);
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert!((g[1] - 0.75).abs() < 1e-15);
    }
}
