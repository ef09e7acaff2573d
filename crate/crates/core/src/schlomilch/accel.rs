//! Wynn's epsilon algorithm for complex sequences.

use num_complex::Complex;

use crate::scalar::Real;

/// Limit estimate and a heuristic error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation<T: Real> {
    pub value: Complex<T>,
    pub error: T,
}

/// Runs the full epsilon table on `partial` and returns the even-column
/// entry whose last three elements agree best.
///
/// The error estimate for a column is `|e_k - e_(k-1)| + |e_(k-1) - e_(k-2)|`
/// on its trailing entries. Zero differences, which arise once a column has
/// converged to round-off, end the recursion instead of dividing by zero.
pub fn wynn_epsilon<T: Real>(partial: &[Complex<T>]) -> Extrapolation<T> {
    let n = partial.len();
    let last = partial.last().copied().unwrap_or_default();
    let mut best = Extrapolation {
        value: last,
        error: if n >= 3 {
            (partial[n - 1] - partial[n - 2]).norm() + (partial[n - 2] - partial[n - 3]).norm()
        } else {
            T::infinity()
        },
    };
    let mut prev: Vec<Complex<T>> = vec![Complex::default(); n + 1];
    let mut cur: Vec<Complex<T>> = partial.to_vec();
    let mut column = 0usize;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff.norm() == T::zero() {
                break;
            }
            next.push(prev[i + 1] + diff.inv());
        }
        column += 1;
        if next.len() < cur.len() - 1 {
            // Truncated column: keep what is usable for the even-column check.
            if column.is_multiple_of(2) {
                consider(&next, &mut best);
            }
            break;
        }
        if column.is_multiple_of(2) {
            consider(&next, &mut best);
        }
        prev = cur;
        cur = next;
    }
    best
}

fn consider<T: Real>(col: &[Complex<T>], best: &mut Extrapolation<T>) {
    let k = col.len();
    if k < 3 {
        return;
    }
    let err = (col[k - 1] - col[k - 2]).norm() + (col[k - 2] - col[k - 3]).norm();
    if err.is_finite() && err < best.error {
        *best = Extrapolation {
            value: col[k - 1],
            error: err,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_log_series() {
        // sum (-1)^(k+1)/k = ln 2.
        let mut s = Complex::new(0.0_f64, 0.0);
        let mut partial = Vec::new();
        for k in 1..=20 {
            s += Complex::new(if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64, 0.0);
            partial.push(s);
        }
        let e = wynn_epsilon(&partial);
        assert!((e.value.re - 2f64.ln()).abs() < 1e-12, "{:?}", e);
        assert!(e.error < 1e-10);
    }

    #[test]
    fn geometric_is_exact_after_one_step() {
        let z = Complex::new(0.3_f64, 0.4);
        let mut s = Complex::new(0.0, 0.0);
        let mut t = Complex::new(1.0, 0.0);
        let mut partial = Vec::new();
        for _ in 0..6 {
            s += t;
            t *= z;
            partial.push(s);
        }
        let e = wynn_epsilon(&partial);
        let want = Complex::new(1.0, 0.0) / (Complex::new(1.0, 0.0) - z);
        assert!((e.value - want).norm() < 1e-13);
    }

    #[test]
    fn constant_sequence() {
        let p = vec![Complex::new(2.0_f64, -1.0); 5];
        let e = wynn_epsilon(&p);
        assert_eq!(e.value, Complex::new(2.0, -1.0));
    }
}
