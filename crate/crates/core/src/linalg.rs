//! Dense complex linear algebra: LU with partial pivoting and a one-norm
//! condition estimate.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T: Real> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::default(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    /// Builds a matrix from independently computed rows.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "row length mismatch");
            data.extend(r);
        }
        Self { n, data }
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Complex::default(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// `P A = L U` with unit lower-triangular `L`.
#[derive(Debug, Clone)]
pub struct LuFactor<T: Real> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactor<T> {
    pub fn new(mut a: DenseMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, a[(i, k)].norm()))
                    .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > T::zero()) {
                return Err(Error::IllConditioned {
                    condition: f64::INFINITY,
                    limit: f64::NAN,
                });
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f.norm() == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.dim();
        let mut y: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.dim();
        let mut v = b.to_vec();
        // U^H v = b.
        for i in 0..n {
            let mut acc = v[i];
            for j in 0..i {
                acc -= self.lu[(j, i)].conj() * v[j];
            }
            v[i] = acc / self.lu[(i, i)].conj();
        }
        // L^H w = v.
        for i in (0..n).rev() {
            let mut acc = v[i];
            for j in i + 1..n {
                acc -= self.lu[(j, i)].conj() * v[j];
            }
            v[i] = acc;
        }
        let mut x = vec![Complex::default(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = v[k];
        }
        x
    }

    /// Estimate of `||A^-1||_1` (Hager's method with Higham's safeguard).
    pub fn inverse_norm1_estimate(&self) -> T {
        let n = self.lu.dim();
        if n == 0 {
            return T::zero();
        }
        let norm1 = |v: &[Complex<T>]| v.iter().fold(T::zero(), |acc, z| acc + z.norm());
        let nf = T::from_int(n as i64);
        let mut x = vec![Complex::new(nf.recip(), T::zero()); n];
        let mut est = T::zero();
        for iter in 0..5 {
            let y = self.solve(&x);
            let ny = norm1(&y);
            if iter > 0 && ny <= est {
                break;
            }
            est = ny;
            let xi: Vec<Complex<T>> = y
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r > T::zero() {
                        z / r
                    } else {
                        Complex::new(T::one(), T::zero())
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, T::zero()), |b, c| if c.1 > b.1 { c } else { b });
            let ztx = z.iter().zip(&x).fold(T::zero(), |acc, (a, b)| acc + (a.conj() * b).re);
            if iter > 0 && zmax <= ztx {
                break;
            }
            x = vec![Complex::default(); n];
            x[j] = Complex::new(T::one(), T::zero());
        }
        // Alternating test vector guards against the estimate stalling.
        let alt: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { T::one() } else { -T::one() };
                let t = if n > 1 {
                    T::from_int(i as i64) / T::from_int(n as i64 - 1)
                } else {
                    T::zero()
                };
                Complex::new(sign * (T::one() + t), T::zero())
            })
            .collect();
        let alt_est = T::two() * norm1(&self.solve(&alt)) / (T::lit(3.0) * nf);
        est.max(alt_est)
    }
}

/// Solution of an equilibrated dense system with its condition estimate.
#[derive(Debug, Clone)]
pub struct Solution<T: Real> {
    pub x: Vec<Complex<T>>,
    /// One-norm condition estimate of the row/column-equilibrated matrix.
    pub condition: T,
}

/// Solves `A x = b` after row and column scaling; fails if the condition
/// estimate of the scaled matrix exceeds `limit`.
pub fn solve_equilibrated<T: Real>(a: &DenseMatrix<T>, b: &[Complex<T>], limit: T) -> Result<Solution<T>> {
    let n = a.dim();
    let mut scaled = a.clone();
    let mut r = vec![T::one(); n];
    for (i, ri) in r.iter_mut().enumerate() {
        let m = scaled.row(i).iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
        if m > T::zero() {
            *ri = m.recip();
            for z in scaled.row_mut(i) {
                *z *= *ri;
            }
        }
    }
    let mut c = vec![T::one(); n];
    for (j, cj) in c.iter_mut().enumerate() {
        let m = (0..n).fold(T::zero(), |acc, i| acc.max(scaled[(i, j)].norm()));
        if m > T::zero() {
            *cj = m.recip();
            for i in 0..n {
                scaled[(i, j)] *= *cj;
            }
        }
    }
    let norm = scaled.norm1();
    let lu = LuFactor::new(scaled).map_err(|_| Error::IllConditioned {
        condition: f64::INFINITY,
        limit: limit.as_f64(),
    })?;
    let condition = norm * lu.inverse_norm1_estimate();
    if !(condition <= limit) {
        return Err(Error::IllConditioned {
            condition: condition.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let rb: Vec<Complex<T>> = b.iter().zip(&r).map(|(v, s)| v * *s).collect();
    let y = lu.solve(&rb);
    let x = y.iter().zip(&c).map(|(v, s)| v * *s).collect();
    Ok(Solution { x, condition })
}
