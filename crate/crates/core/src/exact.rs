//! The truncated exact coupled system for the multiple-scattering
//! coefficients and its direct and iterative solvers.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_equilibrated, DenseMatrix};
use crate::model::{derive, incident_coeff, order_coefficients, GratingParams, IncidentWave, OrderCoefficients};
use crate::scalar::Real;
use crate::schlomilch::{SchlomilchTable, SumMethod};

/// Largest admissible one-norm condition estimate of the equilibrated system.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Default truncation order of the exact system.
pub const DEFAULT_TRUNCATION: usize = 12;
/// Largest truncation reached by automatic doubling.
pub const MAX_TRUNCATION: usize = 48;

/// How a coefficient set was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    DirectSolve,
    NeumannIteration,
    Asymptotic,
}

/// Multiple-scattering coefficients `A_n`, `A_n^H` for `|n| <= n_trunc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet<T: Real> {
    pub n_trunc: usize,
    /// `A_n` indexed by `n + n_trunc`.
    pub a: Vec<Complex<T>>,
    /// `A_n^H` indexed by `n + n_trunc`.
    pub a_h: Vec<Complex<T>>,
    pub residual: T,
    pub method: SolveMethod,
}

impl<T: Real> CoefficientSet<T> {
    fn index(&self, n: i64) -> Option<usize> {
        (n.unsigned_abs() as usize <= self.n_trunc).then(|| (n + self.n_trunc as i64) as usize)
    }

    /// `A_n`, zero outside the truncation.
    pub fn a(&self, n: i64) -> Complex<T> {
        self.index(n).map_or(Complex::default(), |i| self.a[i])
    }

    /// `A_n^H`, zero outside the truncation.
    pub fn a_h(&self, n: i64) -> Complex<T> {
        self.index(n).map_or(Complex::default(), |i| self.a_h[i])
    }

    pub fn orders(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n_trunc as i64)..=self.n_trunc as i64
    }

    /// Largest coefficient difference against `other` over the common orders.
    pub fn max_difference(&self, other: &Self) -> T {
        let n = self.n_trunc.max(other.n_trunc) as i64;
        (-n..=n).fold(T::zero(), |acc, k| {
            acc.max((self.a(k) - other.a(k)).norm())
                .max((self.a_h(k) - other.a_h(k)).norm())
        })
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> T {
        self.a
            .iter()
            .chain(&self.a_h)
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }
}

/// The assembled linear system with the data needed to re-evaluate it.
#[derive(Debug, Clone)]
pub struct ExactSystem<T: Real> {
    pub n_trunc: usize,
    /// Interleaved unknowns `(A_n, A_n^H)` for `n = -N..=N`.
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<Complex<T>>,
    /// Per-order coefficients indexed by `n + N`.
    pub coefficients: Vec<OrderCoefficients<T>>,
    /// Incident coefficients indexed by `n + N`.
    pub incident: Vec<Complex<T>>,
    /// Lattice sums `I_k` indexed by `k + 2N`.
    pub sums: Vec<Complex<T>>,
}

impl<T: Real> ExactSystem<T> {
    pub fn unknowns(&self) -> usize {
        self.rhs.len()
    }

    fn sum(&self, k: i64) -> Complex<T> {
        self.sums[(k + 2 * self.n_trunc as i64) as usize]
    }

    /// `(sum_m A_m I_{n-m}, sum_m A_m^H I_{n-m})` for every order.
    fn interactions(&self, a: &[Complex<T>], a_h: &[Complex<T>]) -> Vec<(Complex<T>, Complex<T>)> {
        let n = self.n_trunc as i64;
        (-n..=n)
            .map(|k| {
                (-n..=n).fold((Complex::default(), Complex::default()), |(s, sh), m| {
                    let i = self.sum(k - m);
                    let j = (m + n) as usize;
                    (s + a[j] * i, sh + a_h[j] * i)
                })
            })
            .collect()
    }

    /// `(LHS - RHS, RHS)` of both boundary conditions at every order,
    /// interleaved like the unknowns and evaluated from the unfactored equations.
    fn defects(&self, a: &[Complex<T>], a_h: &[Complex<T>]) -> Vec<(Complex<T>, Complex<T>)> {
        let inter = self.interactions(a, a_h);
        let mut out = Vec::with_capacity(2 * inter.len());
        for (j, (s, sh)) in inter.into_iter().enumerate() {
            let k = &self.coefficients[j];
            let e = self.incident[j];
            let lhs_mu = k.b_mu * (a[j] + k.c * (e + s));
            let rhs_mu = -(a_h[j] + k.a_mu * sh);
            let lhs_eps = k.b_eps * (a_h[j] + k.c * sh);
            let rhs_eps = a[j] + k.a_eps * (e + s);
            out.push((lhs_mu - rhs_mu, rhs_mu));
            out.push((lhs_eps - rhs_eps, rhs_eps));
        }
        out
    }

    /// Largest `|LHS - RHS| / (1 + |RHS|)` over both boundary conditions at
    /// every order, evaluated from the unfactored equations.
    pub fn residual(&self, a: &[Complex<T>], a_h: &[Complex<T>]) -> T {
        self.defects(a, a_h)
            .into_iter()
            .fold(T::zero(), |acc, (d, r)| acc.max(d.norm() / (T::one() + r.norm())))
    }

    fn package(&self, x: &[Complex<T>], method: SolveMethod) -> CoefficientSet<T> {
        let a: Vec<_> = x.iter().step_by(2).copied().collect();
        let a_h: Vec<_> = x.iter().skip(1).step_by(2).copied().collect();
        let residual = self.residual(&a, &a_h);
        CoefficientSet {
            n_trunc: self.n_trunc,
            a,
            a_h,
            residual,
            method,
        }
    }
}

/// Builds the `2(2N+1)` square system of the two boundary conditions.
///
/// Row `2j` is the magnetic-type condition and row `2j+1` the electric-type
/// condition of order `n = j - N`, both moved to the form `M x = r`.
pub fn assemble<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    sums: &SchlomilchTable<T>,
    n_trunc: usize,
) -> Result<ExactSystem<T>> {
    let derived = derive(params, wave)?;
    if sums.n_max < 2 * n_trunc {
        return Err(Error::PreconditionViolated(format!(
            "lattice sums cover |n| <= {} but truncation {} needs {}",
            sums.n_max,
            n_trunc,
            2 * n_trunc
        )));
    }
    let scale = T::one().max(derived.delta.abs());
    if (sums.delta - derived.delta).abs() > T::lit(1e-12) * scale {
        return Err(Error::PreconditionViolated(format!(
            "lattice sums built for Delta = {} but the configuration has Delta = {}",
            sums.delta.as_f64(),
            derived.delta.as_f64()
        )));
    }
    let n = n_trunc as i64;
    let coefficients = (-n..=n)
        .map(|k| order_coefficients(k as i32, &derived, params))
        .collect::<Result<Vec<_>>>()?;
    let incident: Vec<_> = (-n..=n).map(|k| incident_coeff(k as i32, wave)).collect();
    let lattice: Vec<_> = (-2 * n..=2 * n).map(|k| sums.at(k)).collect();
    let size = 2 * (2 * n_trunc + 1);

    let rows: Vec<(Vec<Complex<T>>, Complex<T>)> = (0..size)
        .into_par_iter()
        .map(|row| {
            let j = row / 2;
            let k = &coefficients[j];
            let e = incident[j];
            let mut r = vec![Complex::default(); size];
            let nk = j as i64 - n;
            if row % 2 == 0 {
                r[2 * j] += k.b_mu;
                r[2 * j + 1] += Complex::new(T::one(), T::zero());
                for m in 0..=2 * n_trunc {
                    let i = lattice[(nk - (m as i64 - n) + 2 * n) as usize];
                    r[2 * m] += k.b_mu * k.c * i;
                    r[2 * m + 1] += k.a_mu * i;
                }
                (r, -(k.b_mu * k.c * e))
            } else {
                r[2 * j + 1] += k.b_eps;
                r[2 * j] -= Complex::new(T::one(), T::zero());
                for m in 0..=2 * n_trunc {
                    let i = lattice[(nk - (m as i64 - n) + 2 * n) as usize];
                    r[2 * m + 1] += k.b_eps * k.c * i;
                    r[2 * m] -= k.a_eps * i;
                }
                (r, k.a_eps * e)
            }
        })
        .collect();
    let (matrix_rows, rhs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(ExactSystem {
        n_trunc,
        matrix: DenseMatrix::from_rows(matrix_rows),
        rhs,
        coefficients,
        incident,
        sums: lattice,
    })
}

/// Dense LU solve of the assembled system.
///
/// The unknowns of each order are first measured in units of the isolated
/// rod's response, which spans many decades across orders; without this the
/// high orders inherit an absolute error set by the largest coefficient.
pub fn solve_direct<T: Real>(system: &ExactSystem<T>) -> Result<CoefficientSet<T>> {
    let iso = isolated_solution(system);
    let units: Vec<T> = iso
        .orders()
        .flat_map(|n| {
            let u = iso.a(n).norm().max(iso.a_h(n).norm());
            let u = if u > T::zero() { u } else { T::one() };
            [u, u]
        })
        .collect();
    let mut matrix = system.matrix.clone();
    for i in 0..matrix.dim() {
        for (z, &u) in matrix.row_mut(i).iter_mut().zip(&units) {
            *z *= u;
        }
    }
    let sol = solve_equilibrated(&matrix, &system.rhs, T::lit(CONDITION_LIMIT))?;
    let x: Vec<Complex<T>> = sol.x.iter().zip(&units).map(|(v, &u)| v * u).collect();
    Ok(system.package(&x, SolveMethod::DirectSolve))
}

/// Solves one order's pair of conditions given the interaction sums.
fn block_solve<T: Real>(
    k: &OrderCoefficients<T>,
    e: Complex<T>,
    s: Complex<T>,
    sh: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let r1 = -(k.b_mu * k.c * (e + s)) - k.a_mu * sh;
    let r2 = k.a_eps * (e + s) - k.b_eps * k.c * sh;
    let det = k.b_mu * k.b_eps + T::one();
    ((r1 * k.b_eps - r2) / det, (k.b_mu * r2 + r1) / det)
}

/// Coefficients of a single rod with no lattice interaction.
pub fn isolated_solution<T: Real>(system: &ExactSystem<T>) -> CoefficientSet<T> {
    let zero = Complex::default();
    let mut x = Vec::with_capacity(system.unknowns());
    for (k, &e) in system.coefficients.iter().zip(&system.incident) {
        let (a, ah) = block_solve(k, e, zero, zero);
        x.push(a);
        x.push(ah);
    }
    let mut set = system.package(&x, SolveMethod::NeumannIteration);
    set.residual = system.residual(&set.a, &set.a_h);
    set
}

/// Outcome of the block-Jacobi iteration.
#[derive(Debug, Clone)]
pub struct NeumannOutcome<T: Real> {
    pub coefficients: CoefficientSet<T>,
    pub iterations: usize,
    /// Successive-iterate max-norm differences.
    pub differences: Vec<T>,
}

impl<T: Real> NeumannOutcome<T> {
    /// Ratios of successive differences.
    pub fn contraction_ratios(&self) -> Vec<T> {
        self.differences
            .windows(2)
            .filter(|w| w[0] > T::zero())
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Fixed-point iteration on the interaction sums, seeded from the isolated
/// rod: each sweep solves every order's 2x2 block with the previous sums.
pub fn solve_neumann<T: Real>(system: &ExactSystem<T>, max_iter: usize, tol: T) -> Result<NeumannOutcome<T>> {
    let seed = isolated_solution(system);
    let (mut a, mut a_h) = (seed.a, seed.a_h);
    let mut differences = Vec::new();
    for it in 1..=max_iter {
        let inter = system.interactions(&a, &a_h);
        let mut next_a = Vec::with_capacity(a.len());
        let mut next_h = Vec::with_capacity(a.len());
        for (j, (s, sh)) in inter.into_iter().enumerate() {
            let (x, y) = block_solve(&system.coefficients[j], system.incident[j], s, sh);
            next_a.push(x);
            next_h.push(y);
        }
        let diff = a
            .iter()
            .zip(&next_a)
            .chain(a_h.iter().zip(&next_h))
            .fold(T::zero(), |acc, (u, v)| acc.max((u - v).norm()));
        a = next_a;
        a_h = next_h;
        differences.push(diff);
        if !diff.is_finite() {
            break;
        }
        if diff <= tol {
            let residual = system.residual(&a, &a_h);
            return Ok(NeumannOutcome {
                coefficients: CoefficientSet {
                    n_trunc: system.n_trunc,
                    a,
                    a_h,
                    residual,
                    method: SolveMethod::NeumannIteration,
                },
                iterations: it,
                differences,
            });
        }
    }
    let ratios: Vec<f64> = differences.windows(2).map(|w| (w[1] / w[0]).as_f64()).collect();
    Err(Error::NoConvergence {
        context: "Neumann iteration".into(),
        iterations: differences.len(),
        estimate: differences.last().map_or(f64::NAN, |d| d.as_f64()),
        history: ratios,
    })
}

/// Lattice sums sufficient for truncation `n_trunc`.
pub fn lattice_sums<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    n_trunc: usize,
    method: SumMethod,
) -> Result<SchlomilchTable<T>> {
    let derived = derive(params, wave)?;
    SchlomilchTable::build(derived.delta, wave.psi_i, 2 * n_trunc, method, T::lit(1e-13))
}

/// Convenience: assemble and solve directly at one truncation.
pub fn solve_exact<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    n_trunc: usize,
) -> Result<CoefficientSet<T>> {
    let sums = lattice_sums(params, wave, n_trunc, SumMethod::Elementary)?;
    solve_direct(&assemble(params, wave, &sums, n_trunc)?)
}

/// One row of a truncation study.
#[derive(Debug, Clone)]
pub struct TruncationEntry<T: Real> {
    pub n_trunc: usize,
    pub coefficients: CoefficientSet<T>,
    /// Max-norm change from the previous entry, relative to the largest coefficient.
    pub change: Option<T>,
}

/// Solves at each truncation of an increasing list.
pub fn truncation_study<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    n_list: &[usize],
) -> Result<Vec<TruncationEntry<T>>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PreconditionViolated("truncation list must increase".into()));
    }
    let nmax = n_list.last().copied().unwrap_or(0);
    let sums = lattice_sums(params, wave, nmax, SumMethod::Elementary)?;
    let mut out: Vec<TruncationEntry<T>> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let coefficients = solve_direct(&assemble(params, wave, &sums, n)?)?;
        let change = out.last().map(|prev| {
            let scale = coefficients.max_norm().max(T::min_positive_value());
            prev.coefficients.max_difference(&coefficients) / scale
        });
        out.push(TruncationEntry {
            n_trunc: n,
            coefficients,
            change,
        });
    }
    Ok(out)
}

/// Doubles the truncation from `DEFAULT_TRUNCATION` until successive
/// solutions agree to `tol` or `MAX_TRUNCATION` is reached.
pub fn solve_converged<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    tol: T,
) -> Result<CoefficientSet<T>> {
    let sums = lattice_sums(params, wave, MAX_TRUNCATION, SumMethod::Elementary)?;
    let mut n = DEFAULT_TRUNCATION;
    let mut prev = solve_direct(&assemble(params, wave, &sums, n)?)?;
    loop {
        let next_n = (2 * n).min(MAX_TRUNCATION);
        let next = solve_direct(&assemble(params, wave, &sums, next_n)?)?;
        let change = prev.max_difference(&next) / next.max_norm().max(T::min_positive_value());
        if change <= tol {
            return Ok(next);
        }
        if next_n == MAX_TRUNCATION {
            return Err(Error::TruncationNotConverged {
                change: change.as_f64(),
                tol: tol.as_f64(),
            });
        }
        n = next_n;
        prev = next;
    }
}
