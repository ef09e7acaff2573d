//! Lattice sums by accelerated summation of the defining Hankel series.
//!
//! The series `I_n = sum_p H_n(p kappa) [(-1)^n e^(i p kappa s) + e^(-i p kappa s)]`
//! (with `kappa = 2 pi Delta`, `s = sin psi_i`) converges only like
//! `p^(-1/2)` with an oscillating phase. It is split into the two
//! single-frequency series `U_n = sum_p H_n(p kappa) e^(i p kappa s)` and
//! `V_n = sum_p H_n(p kappa) e^(-i p kappa s)`. Each has terms behaving like
//! `e^(i p theta) p^(-1/2)` with `theta = kappa (1 +- s)`; partial sums taken
//! every half quasi-period are fed to Wynn's epsilon algorithm.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, parity_sign, Real};
use crate::schlomilch::accel::{wynn_epsilon, Extrapolation};
use crate::schlomilch::modes::check_wood;
use crate::special::hankel1_seq;

/// Number of blocks fed to the epsilon table on the first attempt.
const FIRST_BLOCKS: usize = 24;
/// Largest number of blocks tried before giving up.
const MAX_BLOCKS: usize = 64;

/// Block length: half the quasi-period of `e^(i p theta)`.
fn block_length<T: Real>(theta: T) -> usize {
    let two_pi = T::two() * T::PI();
    let mut t = theta % two_pi;
    if t < T::zero() {
        t += two_pi;
    }
    let t = t.min(two_pi - t);
    if !(t > T::zero()) {
        return 1;
    }
    ((T::PI() / t).round().as_f64() as usize).max(1)
}

/// Accelerated values of `U_n`, `V_n` for `n = 0..=nmax`.
struct SplitSums<T: Real> {
    u: Vec<Extrapolation<T>>,
    v: Vec<Extrapolation<T>>,
}

fn split_sums<T: Real>(nmax: usize, delta: T, sin_psi: T, blocks: usize) -> Result<SplitSums<T>> {
    let kappa = T::two() * T::PI() * delta;
    let lu = block_length(kappa * (T::one() + sin_psi));
    let lv = block_length(kappa * (T::one() - sin_psi));
    let pmax = lu.max(lv) * blocks;
    let mut su = vec![Complex::default(); nmax + 1];
    let mut sv = vec![Complex::default(); nmax + 1];
    let mut pu: Vec<Vec<Complex<T>>> = vec![Vec::with_capacity(blocks); nmax + 1];
    let mut pv: Vec<Vec<Complex<T>>> = vec![Vec::with_capacity(blocks); nmax + 1];
    for p in 1..=pmax {
        let x = kappa * T::from_int(p as i64);
        let h = hankel1_seq(nmax, x)?;
        let phase = cis(x * sin_psi);
        let eu = phase;
        let ev = phase.conj();
        for n in 0..=nmax {
            su[n] += h[n] * eu;
            sv[n] += h[n] * ev;
        }
        if p % lu == 0 && p / lu <= blocks {
            for n in 0..=nmax {
                pu[n].push(su[n]);
            }
        }
        if p % lv == 0 && p / lv <= blocks {
            for n in 0..=nmax {
                pv[n].push(sv[n]);
            }
        }
    }
    Ok(SplitSums {
        u: pu.iter().map(|s| wynn_epsilon(s)).collect(),
        v: pv.iter().map(|s| wynn_epsilon(s)).collect(),
    })
}

/// Accelerated lattice sums `I_n` for every `|n| <= nmax`, returned as a
/// vector indexed by `n + nmax`.
///
/// `tol` bounds the estimated extrapolation error relative to the size of
/// the two single-frequency series that make up each `I_n`.
pub fn direct_sums<T: Real>(nmax: usize, delta: T, sin_psi: T, tol: T) -> Result<Vec<Complex<T>>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!("Delta = {delta} must be positive")));
    }
    check_wood(delta, sin_psi)?;
    let mut history = Vec::new();
    let mut blocks = FIRST_BLOCKS;
    loop {
        let sums = split_sums(nmax, delta, sin_psi, blocks)?;
        let mut worst = T::zero();
        for n in 0..=nmax {
            let scale = sums.u[n].value.norm() + sums.v[n].value.norm();
            let err = (sums.u[n].error + sums.v[n].error) / scale.max(T::min_positive_value());
            worst = worst.max(err);
        }
        history.push(worst.as_f64());
        if worst <= tol {
            let mut out = vec![Complex::default(); 2 * nmax + 1];
            for n in 0..=nmax {
                let sign = parity_sign::<T>(n as i64);
                let (u, v) = (sums.u[n].value, sums.v[n].value);
                out[nmax + n] = u * sign + v;
                out[nmax - n] = v * sign + u;
            }
            return Ok(out);
        }
        if blocks >= MAX_BLOCKS {
            return Err(Error::NoConvergence {
                context: format!("direct lattice sum (Delta = {delta}, sin psi_i = {sin_psi})"),
                iterations: blocks,
                estimate: worst.as_f64(),
                history,
            });
        }
        blocks = (blocks * 3 / 2).min(MAX_BLOCKS);
    }
}

/// Single accelerated lattice sum `I_n`.
pub fn direct_sum<T: Real>(n: i32, delta: T, sin_psi: T, tol: T) -> Result<Complex<T>> {
    let m = n.unsigned_abs() as usize;
    let all = direct_sums(m, delta, sin_psi, tol)?;
    Ok(all[(m as i64 + n as i64) as usize])
}
