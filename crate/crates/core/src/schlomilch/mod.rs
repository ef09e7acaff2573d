//! Generalised Schlömilch lattice sums `I_n(k_r d)`.

pub mod accel;
pub mod direct;
pub mod elementary;
pub mod modes;
pub mod small_delta;

pub use direct::{direct_sum, direct_sums};
pub use elementary::elementary;
pub use modes::{mode_structure, sine_of_azimuth, ModeStructure};
pub use small_delta::{bessel_series, h_constant, leading_exponent, leading_terms, neumann_series, NeumannForm};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the values of a [`SchlomilchTable`] were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMethod {
    /// Accelerated summation of the Hankel series.
    Direct,
    /// Elementary-function representation.
    Elementary,
    /// Truncated small-spacing expansions.
    Asymptotic,
}

/// Lattice sums `I_n` for every `|n| <= n_max` at one `(Delta, psi_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchlomilchTable<T: Real> {
    pub delta: T,
    pub psi_i: T,
    pub n_max: usize,
    pub method: SumMethod,
    values: Vec<Complex<T>>,
}

impl<T: Real> SchlomilchTable<T> {
    /// Computes the table. `tol` is used by [`SumMethod::Direct`] only.
    pub fn build(delta: T, psi_i: T, n_max: usize, method: SumMethod, tol: T) -> Result<Self> {
        let sin_psi = sine_of_azimuth(psi_i);
        let values = match method {
            SumMethod::Direct => direct_sums(n_max, delta, sin_psi, tol)?,
            SumMethod::Elementary | SumMethod::Asymptotic => {
                let modes = ModeStructure::new(delta, sin_psi)?;
                let orders: Vec<i32> = (-(n_max as i32)..=n_max as i32).collect();
                let f = |n: i32| match method {
                    SumMethod::Elementary => elementary(n, &modes),
                    _ => leading_terms(n, &modes),
                };
                orders.into_par_iter().map(f).collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self {
            delta,
            psi_i,
            n_max,
            method,
            values,
        })
    }

    /// A table of zeros: the isolated-cylinder limit.
    pub fn zeros(delta: T, psi_i: T, n_max: usize, method: SumMethod) -> Self {
        Self {
            delta,
            psi_i,
            n_max,
            method,
            values: vec![Complex::default(); 2 * n_max + 1],
        }
    }

    /// Builds a table from explicit values ordered `n = -n_max ..= n_max`.
    pub fn from_values(delta: T, psi_i: T, method: SumMethod, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "lattice-sum table needs an odd number of entries, got {}",
                values.len()
            )));
        }
        Ok(Self {
            delta,
            psi_i,
            n_max: values.len() / 2,
            method,
            values,
        })
    }

    /// `I_n`, or `None` outside the stored range.
    pub fn get(&self, n: i64) -> Option<Complex<T>> {
        if n.unsigned_abs() as usize > self.n_max {
            return None;
        }
        Some(self.values[(n + self.n_max as i64) as usize])
    }

    /// `I_n`; panics outside the stored range.
    pub fn at(&self, n: i64) -> Complex<T> {
        self.get(n)
            .unwrap_or_else(|| panic!("lattice sum of order {n} not in table (n_max = {})", self.n_max))
    }

    /// Values ordered `n = -n_max ..= n_max`.
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn table_symmetry_and_methods_agree() {
        let psi = PI + 0.4;
        let d = SchlomilchTable::build(0.3_f64, psi, 5, SumMethod::Direct, 1e-11).unwrap();
        let e = SchlomilchTable::build(0.3_f64, psi, 5, SumMethod::Elementary, 0.0).unwrap();
        for n in -5..=5 {
            let (a, b) = (d.at(n), e.at(n));
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "n={n}");
        }
        let mirrored = SchlomilchTable::build(0.3_f64, PI - 0.4, 5, SumMethod::Direct, 1e-11).unwrap();
        for n in 0..=5 {
            assert!((d.at(-n) - mirrored.at(n)).norm() < 1e-9 * d.at(-n).norm().max(1.0));
        }
        assert_eq!(d.get(6), None);
    }

    #[test]
    fn wood_anomaly_growth_is_monotone() {
        // Delta (1 - sin psi) -> 1 from below at sin psi = -0.25.
        let s = -0.25_f64;
        let mut last = 0.0;
        for gap in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4] {
            let delta = (1.0 - gap) / (1.0 - s);
            let m = ModeStructure::new(delta, s).unwrap();
            let h0 = elementary(0, &m).unwrap().norm();
            assert!(h0 > last, "gap {gap}: {h0} <= {last}");
            last = h0;
        }
    }
}
