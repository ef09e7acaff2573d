//! Physical configuration, derived wavenumbers and the per-order
//! coefficients of the coupled boundary-value system.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, imag_unit, parity_sign, re, Real};
use crate::special::{bessel_j, bessel_j_prime, hankel1, hankel1_prime};

/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability (H/m), CODATA 2018.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Geometry and material of the grating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingParams<T: Real> {
    /// Cylinder radius `a` (m).
    pub radius_a: T,
    /// Centre-to-centre spacing `d` (m).
    pub spacing_d: T,
    pub eps_r: T,
    pub mu_r: T,
}

impl<T: Real> GratingParams<T> {
    pub fn new(radius_a: T, spacing_d: T, eps_r: T, mu_r: T) -> Result<Self> {
        let p = Self {
            radius_a,
            spacing_d,
            eps_r,
            mu_r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.radius_a, self.spacing_d, self.eps_r, self.mu_r]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("grating parameters must be finite".into()));
        }
        if !(self.radius_a > T::zero()) || !(self.spacing_d > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "radius_a = {} and spacing_d = {} must be positive",
                self.radius_a, self.spacing_d
            )));
        }
        if T::two() * self.radius_a > self.spacing_d {
            return Err(Error::InvalidParameter(format!(
                "cylinders overlap: 2 a = {} exceeds d = {}",
                T::two() * self.radius_a,
                self.spacing_d
            )));
        }
        if !(self.eps_r > T::zero()) || !(self.mu_r > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "eps_r = {} and mu_r = {} must be positive",
                self.eps_r, self.mu_r
            )));
        }
        Ok(())
    }

    pub fn a_over_d(&self) -> T {
        self.radius_a / self.spacing_d
    }
}

/// Obliquely incident E-polarised plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentWave<T: Real> {
    /// Free-space wavenumber (rad/m).
    pub k0: T,
    /// Polar angle from the cylinder axis, in `(0, pi/2]`.
    pub theta_i: T,
    /// Azimuth of propagation, `psi_i = pi + phi_i`.
    pub psi_i: T,
    /// Amplitude of the vertical electric component (V/m).
    pub amplitude_e0v: T,
}

impl<T: Real> IncidentWave<T> {
    pub fn new(k0: T, theta_i: T, psi_i: T, amplitude_e0v: T) -> Result<Self> {
        let w = Self {
            k0,
            theta_i,
            psi_i,
            amplitude_e0v,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k0 > T::zero()) || !self.k0.is_finite() {
            return Err(Error::InvalidParameter(format!("k0 = {} must be positive", self.k0)));
        }
        if !(self.theta_i > T::zero()) || self.theta_i > T::FRAC_PI_2() {
            return Err(Error::InvalidParameter(format!(
                "theta_i = {} must lie in (0, pi/2]",
                self.theta_i
            )));
        }
        if !self.psi_i.is_finite() {
            return Err(Error::InvalidParameter("psi_i must be finite".into()));
        }
        if !self.amplitude_e0v.is_finite() || self.amplitude_e0v == T::zero() {
            return Err(Error::InvalidParameter(
                "amplitude_e0v must be finite and nonzero".into(),
            ));
        }
        Ok(())
    }
}

/// Scalars shared by every solver, computed once per configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities<T: Real> {
    /// Transverse wavenumber `k0 sin(theta_i)`.
    pub k_r: T,
    /// Axial wavenumber `k0 cos(theta_i)`.
    pub k_z: T,
    /// Transverse wavenumber inside the rods.
    pub k_1: T,
    /// Normalised spacing `k_r d / 2 pi`.
    pub delta: T,
    /// Cross-polarisation coupling constant.
    pub f: T,
    /// Denominator of the small-argument scattering matrices.
    pub d: T,
    /// `sqrt(mu0 / eps0)` (ohms).
    pub xi0: T,
    /// `sqrt(eps0 / mu0)` (siemens).
    pub eta0: T,
    /// `sin(psi_i)`.
    pub sin_psi: T,
}

impl<T: Real> DerivedQuantities<T> {
    /// `k_r / k_1`.
    pub fn kappa(&self) -> T {
        self.k_r / self.k_1
    }

    /// `k_r a`.
    pub fn kr_a(&self, params: &GratingParams<T>) -> T {
        self.k_r * params.radius_a
    }

    /// `k_r d`.
    pub fn kr_d(&self, params: &GratingParams<T>) -> T {
        self.k_r * params.spacing_d
    }
}

/// Computes the derived wavenumbers and constants.
pub fn derive<T: Real>(params: &GratingParams<T>, wave: &IncidentWave<T>) -> Result<DerivedQuantities<T>> {
    params.validate()?;
    wave.validate()?;
    let (sin_t, mut cos_t) = wave.theta_i.sin_cos();
    if wave.theta_i == T::FRAC_PI_2() {
        // cos(pi/2) rounds to ~6e-17; normal incidence must decouple exactly.
        cos_t = T::zero();
    }
    let cos2 = cos_t * cos_t;
    let em = params.eps_r * params.mu_r;
    if !(em > cos2) {
        return Err(Error::EvanescentInterior {
            eps_mu: em.as_f64(),
            cos2_theta: cos2.as_f64(),
        });
    }
    let k_r = wave.k0 * sin_t;
    let k_z = wave.k0 * cos_t;
    let k_1 = wave.k0 * (em - cos2).sqrt();
    let f = (em - T::one()) * cos_t / (em - cos2);
    let kappa2 = (k_r / k_1).powi(2);
    let d = (T::one() + params.eps_r * kappa2) * (T::one() + params.mu_r * kappa2) - f * f;
    let e0 = T::lit(EPSILON_0);
    let m0 = T::lit(MU_0);
    Ok(DerivedQuantities {
        k_r,
        k_z,
        k_1,
        delta: k_r * params.spacing_d / (T::two() * T::PI()),
        f,
        d,
        xi0: (m0 / e0).sqrt(),
        eta0: (e0 / m0).sqrt(),
        sin_psi: crate::schlomilch::sine_of_azimuth(wave.psi_i),
    })
}

/// Which material constant enters a coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Medium {
    Eps,
    Mu,
}

impl Medium {
    fn relative<T: Real>(self, params: &GratingParams<T>) -> T {
        match self {
            Medium::Eps => params.eps_r,
            Medium::Mu => params.mu_r,
        }
    }

    /// `sqrt(eps0 mu0 / zeta0^2)`: the impedance for `Eps`, the admittance for `Mu`.
    fn impedance<T: Real>(self, derived: &DerivedQuantities<T>) -> T {
        match self {
            Medium::Eps => derived.xi0,
            Medium::Mu => derived.eta0,
        }
    }
}

/// `J_n(k_r a) / H_n(k_r a)`.
pub fn c_n<T: Real>(n: i32, derived: &DerivedQuantities<T>, params: &GratingParams<T>) -> Result<Complex<T>> {
    let x = derived.kr_a(params);
    let m = n.abs();
    Ok(re(bessel_j(m, x)) / hankel1(m, x)?)
}

/// Shared pieces of the `a_n^zeta`, `b_n^zeta` quotients for `n >= 0`.
struct RodQuotient<T: Real> {
    numerator_a: Complex<T>,
    numerator_b: Complex<T>,
    denominator: Complex<T>,
}

fn rod_quotient<T: Real>(
    m: i32,
    zeta: Medium,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> Result<RodQuotient<T>> {
    let x = derived.kr_a(params);
    let y = derived.k_1 * params.radius_a;
    let zk = zeta.relative(params) * derived.kappa();
    let j_in = bessel_j(m, y);
    let jp_in = bessel_j_prime(m, y);
    let j_out = bessel_j(m, x);
    let jp_out = bessel_j_prime(m, x);
    let h = hankel1(m, x)?;
    let hp = hankel1_prime(m, x)?;
    let denominator = hp * j_in - h * (zk * jp_in);
    let scale = (hp * j_in).norm() + (h * (zk * jp_in)).norm();
    if !(denominator.norm() > T::lit(1e-14) * scale) {
        return Err(Error::SingularDenominator {
            quantity: match zeta {
                Medium::Eps => "a_n^eps/b_n^eps",
                Medium::Mu => "a_n^mu/b_n^mu",
            },
            order: m,
        });
    }
    Ok(RodQuotient {
        numerator_a: re(j_in * jp_out - zk * j_out * jp_in),
        numerator_b: h * j_in,
        denominator,
    })
}

/// `a_n^zeta`; even in `n`.
pub fn a_zeta_n<T: Real>(
    n: i32,
    zeta: Medium,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> Result<Complex<T>> {
    let q = rod_quotient(n.abs(), zeta, derived, params)?;
    Ok(q.numerator_a / q.denominator)
}

/// `b_n^zeta`, proportional to `i n F / (k_r a)`; odd in `n`.
pub fn b_zeta_n<T: Real>(
    n: i32,
    zeta: Medium,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> Result<Complex<T>> {
    let m = n.abs();
    if m == 0 || derived.f == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let q = rod_quotient(m, zeta, derived, params)?;
    let factor = imag_unit::<T>() * (T::from_int(m as i64) * derived.f / derived.kr_a(params));
    let b = q.numerator_b / q.denominator * factor * zeta.impedance(derived);
    Ok(if n < 0 { -b } else { b })
}

/// All per-order coefficients of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderCoefficients<T: Real> {
    pub c: Complex<T>,
    pub a_eps: Complex<T>,
    pub a_mu: Complex<T>,
    pub b_eps: Complex<T>,
    pub b_mu: Complex<T>,
}

pub fn order_coefficients<T: Real>(
    n: i32,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> Result<OrderCoefficients<T>> {
    Ok(OrderCoefficients {
        c: c_n(n, derived, params)?,
        a_eps: a_zeta_n(n, Medium::Eps, derived, params)?,
        a_mu: a_zeta_n(n, Medium::Mu, derived, params)?,
        b_eps: b_zeta_n(n, Medium::Eps, derived, params)?,
        b_mu: b_zeta_n(n, Medium::Mu, derived, params)?,
    })
}

/// Incident-field coefficient `sin(theta_i) E0v exp(-i n psi_i)`.
pub fn incident_coeff<T: Real>(n: i32, wave: &IncidentWave<T>) -> Complex<T> {
    let amp = wave.theta_i.sin() * wave.amplitude_e0v;
    // Reduce the phase exactly for integer multiples of pi to keep
    // exp(-i n pi) = (-1)^n free of round-off.
    if wave.psi_i == T::PI() {
        return re(amp * parity_sign::<T>(n as i64));
    }
    cis(-T::from_int(n as i64) * wave.psi_i) * amp
}

/// Order-independent constants of the small-argument scattering matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SConstants<T: Real> {
    pub s_eps_mu: T,
    pub s_mu_eps: T,
    pub s_plus_xi: Complex<T>,
    pub s_minus_xi: Complex<T>,
    pub s_plus_eta: Complex<T>,
    pub s_minus_eta: Complex<T>,
}

/// `s_eps_mu`, `s_mu_eps` and the cross-polarisation constants
/// `s_(+-)xi = +-2i xi0 F`, `s_(+-)eta = -+2i eta0 F`.
pub fn s_constants<T: Real>(derived: &DerivedQuantities<T>, params: &GratingParams<T>) -> SConstants<T> {
    let k2 = derived.kappa().powi(2);
    let f2 = derived.f * derived.f;
    let one = T::one();
    let xi = imag_unit::<T>() * (T::two() * derived.xi0 * derived.f);
    let eta = imag_unit::<T>() * (T::two() * derived.eta0 * derived.f);
    SConstants {
        s_eps_mu: (one - params.eps_r * k2) * (one + params.mu_r * k2) + f2,
        s_mu_eps: (one - params.mu_r * k2) * (one + params.eps_r * k2) + f2,
        s_plus_xi: xi,
        s_minus_xi: -xi,
        s_plus_eta: -eta,
        s_minus_eta: eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn setup(
        eps: f64,
        mu: f64,
        theta: f64,
        psi: f64,
    ) -> (GratingParams<f64>, IncidentWave<f64>, DerivedQuantities<f64>) {
        let p = GratingParams::new(0.1, 1.0, eps, mu).unwrap();
        let w = IncidentWave::new(1.0 / theta.sin(), theta, psi, 1.0).unwrap();
        let d = derive(&p, &w).unwrap();
        (p, w, d)
    }

    #[test]
    fn normal_incidence_has_no_coupling() {
        let (_, _, d) = setup(3.0, 2.0, FRAC_PI_2, PI);
        assert!(d.f.abs() < 1e-16);
        let want = (1.0 + 1.0 / 2.0) * (1.0 + 1.0 / 3.0);
        assert!((d.d - want).abs() < 1e-14);
    }

    #[test]
    fn vacuum_rods_have_no_coupling() {
        for &t in &[0.2, 0.7, 1.3] {
            let (_, _, d) = setup(1.0, 1.0, t, PI);
            assert_eq!(d.f, 0.0);
        }
    }

    #[test]
    fn wavenumbers_are_consistent() {
        let (_, w, d) = setup(2.5, 1.3, 0.6, 3.5);
        let lhs = d.k_r * d.k_r + d.k_z * d.k_z;
        assert!((lhs - w.k0 * w.k0).abs() < 1e-14 * w.k0 * w.k0);
        assert!((d.xi0 * d.eta0 - 1.0).abs() < 1e-15);
        assert!((d.xi0 - 376.730_313_6).abs() < 1e-6);
    }

    #[test]
    fn evanescent_interior_rejected() {
        let p = GratingParams::new(0.1, 1.0, 0.5, 0.5).unwrap();
        let w = IncidentWave::new(1.0, 0.2, PI, 1.0).unwrap();
        assert!(matches!(derive(&p, &w), Err(Error::EvanescentInterior { .. })));
    }

    #[test]
    fn overlapping_rods_rejected() {
        assert!(GratingParams::new(0.6, 1.0, 2.0, 1.0).is_err());
        assert!(GratingParams::new(0.5, 1.0, 2.0, 1.0).is_ok());
    }

    #[test]
    fn c_n_small_argument() {
        let (p, _, d) = setup(2.0, 1.0, FRAC_PI_4, PI);
        let p = GratingParams {
            radius_a: 0.1 / d.k_r,
            ..p
        };
        let c1 = c_n(1, &d, &p).unwrap();
        let lead = Complex::new(0.0, PI * (0.05_f64).powi(2));
        assert!((c1 - lead).norm() < 0.05 * lead.norm());
        let c0 = c_n(0, &d, &p).unwrap();
        let direct = bessel_j(0, 0.1_f64) / hankel1(0, 0.1_f64).unwrap();
        assert!((c0 - direct).norm() < 1e-10 * direct.norm());
        assert_eq!(c_n(-3, &d, &p).unwrap(), c_n(3, &d, &p).unwrap());
    }

    #[test]
    fn b_vanishes_where_expected() {
        let (p, _, d) = setup(2.0, 1.5, 0.8, PI);
        assert_eq!(b_zeta_n(0, Medium::Eps, &d, &p).unwrap(), Complex::new(0.0, 0.0));
        let (p, _, d) = setup(2.0, 1.5, FRAC_PI_2, PI);
        assert_eq!(b_zeta_n(2, Medium::Mu, &d, &p).unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn transparent_rods_scatter_nothing() {
        let (p, _, d) = setup(1.0, 1.0, 0.9, PI);
        for n in -4..=4 {
            assert!(a_zeta_n(n, Medium::Eps, &d, &p).unwrap().norm() < 1e-15);
            assert!(a_zeta_n(n, Medium::Mu, &d, &p).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn parity_in_order() {
        let (p, _, d) = setup(2.0, 1.5, 0.8, 3.9);
        for n in 1..6 {
            for z in [Medium::Eps, Medium::Mu] {
                assert_eq!(a_zeta_n(n, z, &d, &p).unwrap(), a_zeta_n(-n, z, &d, &p).unwrap());
                assert_eq!(b_zeta_n(n, z, &d, &p).unwrap(), -b_zeta_n(-n, z, &d, &p).unwrap());
            }
        }
    }

    #[test]
    fn incident_coefficients() {
        let w = IncidentWave::new(1.0, 0.7, PI, 2.0).unwrap();
        let amp = 0.7_f64.sin() * 2.0;
        assert_eq!(incident_coeff(0, &w), Complex::new(amp, 0.0));
        assert_eq!(incident_coeff(3, &w), Complex::new(-amp, 0.0));
        let w = IncidentWave::new(1.0, 0.7, 3.7, 2.0).unwrap();
        for n in -5..=5 {
            assert!((incident_coeff(n, &w).norm() - amp).abs() < 1e-15);
        }
    }

    #[test]
    fn s_constants_mirror_and_vanish() {
        let (p, _, d) = setup(2.0, 3.0, FRAC_PI_2, PI);
        let s = s_constants(&d, &p);
        assert_eq!(s.s_plus_xi.norm() + s.s_minus_eta.norm(), 0.0);
        let q = GratingParams {
            eps_r: 3.0,
            mu_r: 2.0,
            ..p
        };
        let dq = derive(&q, &IncidentWave::new(1.0, FRAC_PI_2, PI, 1.0).unwrap()).unwrap();
        let sq = s_constants(&dq, &q);
        assert!((s.s_eps_mu - sq.s_mu_eps).abs() < 1e-15);
        assert!((s.s_mu_eps - sq.s_eps_mu).abs() < 1e-15);
    }

    #[test]
    fn s_ratio_two_ways() {
        let (p, _, d) = setup(2.0, 1.4, 0.6, PI);
        let s = s_constants(&d, &p);
        let t = 0.6_f64;
        let em = 2.0 * 1.4;
        let q = t.sin().powi(2) / (em - t.cos().powi(2));
        let f = (em - 1.0) * t.cos() / (em - t.cos().powi(2));
        let direct = ((1.0 - 2.0 * q) * (1.0 + 1.4 * q) + f * f) / ((1.0 + 2.0 * q) * (1.0 + 1.4 * q) - f * f);
        assert!((s.s_eps_mu / d.d - direct).abs() < 1e-13);
    }

    #[test]
    fn d_positive_on_grid() {
        for i in 0..10 {
            for j in 0..10 {
                for k in 1..=8 {
                    let eps = 1.0 + i as f64;
                    let mu = 1.0 + j as f64;
                    let t = FRAC_PI_2 * k as f64 / 8.0;
                    let (_, _, d) = setup(eps, mu, t, PI);
                    assert!(d.d > 0.0);
                    assert!((0.0..1.0).contains(&d.f));
                }
            }
        }
    }
}
