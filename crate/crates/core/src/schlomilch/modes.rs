//! Propagating and evanescent grating orders.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inputs closer than this to `Delta (1 +- sin psi_i)` integer are rejected.
pub const WOOD_HARD_BAND: f64 = 1e-9;
/// Inputs closer than this are accepted with a warning.
pub const WOOD_WARN_BAND: f64 = 1e-3;
/// Number of evanescent decay rates kept per branch for inspection.
const STORED_EVANESCENT: usize = 16;

/// `sin(psi)` with exact zeros at integer multiples of `pi` given exactly.
pub fn sine_of_azimuth<T: Real>(psi: T) -> T {
    let turns = psi / T::PI();
    if turns == turns.round() && turns.abs() < T::lit(1e6) {
        T::zero()
    } else {
        psi.sin()
    }
}

/// Grating-order bookkeeping for one `(Delta, sin psi_i)` pair.
///
/// Propagating orders `mu` in `[-mu_minus, mu_plus]` carry the angle with
/// `sin phi_mu = sin psi_i + mu / Delta` and `cos phi_mu >= 0`. Evanescent
/// orders beyond the bounds decay at `cosh eta_mu^(+-) = +-sin psi_i + mu / Delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeStructure<T: Real> {
    pub delta: T,
    pub sin_psi: T,
    pub mu_plus: usize,
    pub mu_minus: usize,
    /// `eta_(mu_plus + 1), eta_(mu_plus + 2), ...` (first few only).
    pub eta_plus: Vec<T>,
    /// `eta_(mu_minus + 1), ...` (first few only).
    pub eta_minus: Vec<T>,
    /// `(mu, phi_mu)` for every propagating order, ascending in `mu`.
    pub phi: Vec<(i64, T)>,
}

/// Distance of `v` to the nearest integer.
fn integer_distance<T: Real>(v: T) -> T {
    (v - v.round()).abs()
}

/// Fails with `WoodAnomaly` inside the hard band; logs a warning inside the
/// soft band.
pub fn check_wood<T: Real>(delta: T, sin_psi: T) -> Result<()> {
    for (branch, v) in [('-', delta * (T::one() - sin_psi)), ('+', delta * (T::one() + sin_psi))] {
        let dist = integer_distance(v);
        if dist < T::lit(WOOD_HARD_BAND) {
            return Err(Error::WoodAnomaly {
                branch,
                value: v.as_f64(),
                distance: dist.as_f64(),
            });
        }
        if dist < T::lit(WOOD_WARN_BAND) {
            log::warn!(
                "Delta*(1 {branch} sin psi_i) = {v} is within {dist:e} of an integer; lattice sums lose accuracy"
            );
        }
    }
    Ok(())
}

impl<T: Real> ModeStructure<T> {
    pub fn new(delta: T, sin_psi: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("Delta = {delta} must be positive")));
        }
        if !(sin_psi.abs() < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "|sin psi_i| = {} must be below 1 (grazing incidence excluded)",
                sin_psi.abs()
            )));
        }
        check_wood(delta, sin_psi)?;
        let mu_plus = (delta * (T::one() - sin_psi)).floor().as_f64() as usize;
        let mu_minus = (delta * (T::one() + sin_psi)).floor().as_f64() as usize;
        let mut s = Self {
            delta,
            sin_psi,
            mu_plus,
            mu_minus,
            eta_plus: Vec::new(),
            eta_minus: Vec::new(),
            phi: Vec::new(),
        };
        s.eta_plus = (1..=STORED_EVANESCENT)
            .map(|k| s.cosh_eta(1, mu_plus + k).acosh())
            .collect();
        s.eta_minus = (1..=STORED_EVANESCENT)
            .map(|k| s.cosh_eta(-1, mu_minus + k).acosh())
            .collect();
        s.phi = (-(mu_minus as i64)..=mu_plus as i64)
            .map(|mu| (mu, s.sin_phi(mu).asin()))
            .collect();
        Ok(s)
    }

    /// Structure for `-sin psi_i`, which gives the sums of negative order.
    pub fn mirrored(&self) -> Result<Self> {
        Self::new(self.delta, -self.sin_psi)
    }

    /// `sin phi_mu = sin psi_i + mu / Delta`.
    pub fn sin_phi(&self, mu: i64) -> T {
        self.sin_psi + T::from_int(mu) / self.delta
    }

    /// `cos phi_mu`, non-negative root.
    pub fn cos_phi(&self, mu: i64) -> T {
        let s = self.sin_phi(mu);
        (T::one() - s * s).max(T::zero()).sqrt()
    }

    /// `cosh eta_mu^(+-) = +-sin psi_i + mu / Delta`, `branch` = +1 or -1.
    pub fn cosh_eta(&self, branch: i32, mu: usize) -> T {
        T::from_int(branch as i64) * self.sin_psi + T::from_int(mu as i64) / self.delta
    }

    /// Propagating orders `-mu_minus ..= mu_plus`.
    pub fn propagating(&self) -> impl Iterator<Item = i64> + '_ {
        -(self.mu_minus as i64)..=self.mu_plus as i64
    }

    pub fn single_mode(&self) -> bool {
        self.mu_plus == 0 && self.mu_minus == 0
    }
}

/// Convenience wrapper taking the azimuth itself.
pub fn mode_structure<T: Real>(delta: T, psi_i: T) -> Result<ModeStructure<T>> {
    ModeStructure::new(delta, sine_of_azimuth(psi_i))
}
