//! Incident and exterior axial fields in the frame of one cylinder.
//!
//! Cylinder `s` is centred at `x = s d, y = 0`; `phi_s` is measured from the
//! `+x` axis. The in-plane incident direction is `(sin psi_i, -cos psi_i)`,
//! so the incident field advances by `exp(i k_r d sin psi_i)` per period.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::CoefficientSet;
use crate::model::{derive, incident_coeff, DerivedQuantities, GratingParams, IncidentWave};
use crate::scalar::{cis, parity_sign, Real};
use crate::schlomilch::{SchlomilchTable, SumMethod};
use crate::special::{bessel_j_seq, hankel1_seq};

/// Extra orders beyond `k_r R` that make the incident expansion converge.
const INCIDENT_GUARD: usize = 40;

/// Default lowest order of the regular lattice re-expansion.
pub const REGULAR_ORDER: usize = 32;

/// Lattice sums for field evaluation with coefficients truncated at
/// `n_trunc`: orders up to `n_trunc + max(n_trunc, REGULAR_ORDER)`.
pub fn field_sums<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    n_trunc: usize,
) -> Result<SchlomilchTable<T>> {
    let derived = derive(params, wave)?;
    let n_max = n_trunc + n_trunc.max(REGULAR_ORDER);
    SchlomilchTable::build(derived.delta, wave.psi_i, n_max, SumMethod::Elementary, T::lit(1e-13))
}

/// A point in the polar frame of cylinder `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPosition<T: Real> {
    pub s: i64,
    pub r: T,
    pub phi: T,
    pub z: T,
}

impl<T: Real> CylinderPosition<T> {
    /// Expresses the Cartesian point `(x, y, z)` in the frame of cylinder `s`.
    pub fn from_cartesian(x: T, y: T, z: T, s: i64, spacing_d: T) -> Self {
        let dx = x - T::from_int(s) * spacing_d;
        Self {
            s,
            r: dx.hypot(y),
            phi: y.atan2(dx),
            z,
        }
    }

    /// Frame of the cylinder whose centre is closest to `(x, y)`.
    pub fn nearest(x: T, y: T, z: T, spacing_d: T) -> Self {
        let s = (x / spacing_d).round().to_i64().unwrap_or(0);
        Self::from_cartesian(x, y, z, s, spacing_d)
    }

    pub fn to_cartesian(&self, spacing_d: T) -> (T, T) {
        let (sin, cos) = self.phi.sin_cos();
        (T::from_int(self.s) * spacing_d + self.r * cos, self.r * sin)
    }
}

/// Axial field components at one exterior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample<T: Real> {
    pub position: CylinderPosition<T>,
    pub e_z: Complex<T>,
    pub h_z: Complex<T>,
}

/// `exp(i k_r s d sin psi_i) exp(-i k_z z)`.
fn frame_phase<T: Real>(pos: &CylinderPosition<T>, derived: &DerivedQuantities<T>, spacing_d: T) -> Complex<T> {
    cis(derived.k_r * T::from_int(pos.s) * spacing_d * derived.sin_psi - derived.k_z * pos.z)
}

/// `(-1)^n exp(i n phi)`: the angular basis in this frame.
fn angular<T: Real>(n: i64, phi: T) -> Complex<T> {
    cis(T::from_int(n) * phi) * parity_sign::<T>(n)
}

/// `J_n(x)` for `|n| <= nmax`, indexed `n + nmax`.
fn j_signed<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let pos = bessel_j_seq(nmax, x);
    let n = nmax as i64;
    (-n..=n)
        .map(|k| pos[k.unsigned_abs() as usize] * if k < 0 { parity_sign::<T>(k) } else { T::one() })
        .collect()
}

/// Number of incident orders needed at radius `r`.
fn incident_terms<T: Real>(k_r: T, r: T) -> usize {
    (k_r * r).ceil().to_usize().unwrap_or(0) + INCIDENT_GUARD
}

/// Partial sum of the incident expansion over `|n| <= n_terms`.
pub fn incident_field<T: Real>(
    position: &CylinderPosition<T>,
    wave: &IncidentWave<T>,
    params: &GratingParams<T>,
    n_terms: usize,
) -> Result<Complex<T>> {
    let derived = derive(params, wave)?;
    let j = j_signed(n_terms, derived.k_r * position.r);
    let n = n_terms as i64;
    let sum = (-n..=n).fold(Complex::<T>::default(), |acc, k| {
        acc + incident_coeff(k as i32, wave) * j[(k + n) as usize] * angular(k, position.phi)
    });
    Ok(sum * frame_phase(position, &derived, params.spacing_d))
}

/// Closed-form incident plane wave at `(x, y, z)`.
pub fn plane_wave<T: Real>(x: T, y: T, z: T, wave: &IncidentWave<T>, params: &GratingParams<T>) -> Result<Complex<T>> {
    let derived = derive(params, wave)?;
    let cos_psi = wave.psi_i.cos();
    let amp = wave.theta_i.sin() * wave.amplitude_e0v;
    Ok(cis(derived.k_r * (x * derived.sin_psi - y * cos_psi) - derived.k_z * z) * amp)
}

/// Per-order expansion coefficients shared by every exterior evaluation.
///
/// The lattice re-expansion converges like `(R_s / d)^n` because of the two
/// nearest neighbours. Their outgoing waves are therefore added directly in
/// their own frames and removed from the lattice sums, leaving a regular part
/// that converges like `(R_s / 2d)^n`.
#[derive(Debug, Clone)]
pub struct FieldEvaluator<T: Real> {
    derived: DerivedQuantities<T>,
    wave: IncidentWave<T>,
    params: GratingParams<T>,
    n_trunc: usize,
    /// Highest order `L` of the regular re-expansion.
    regular_order: usize,
    /// `sum_m A_m I'_(n-m)` without the nearest-neighbour terms, indexed `n + L`.
    interaction: Vec<Complex<T>>,
    interaction_h: Vec<Complex<T>>,
    a: Vec<Complex<T>>,
    a_h: Vec<Complex<T>>,
}

/// Nearest-neighbour (`p = 1`) term of the lattice sum `I_k`.
fn neighbour_term<T: Real>(k: i64, derived: &DerivedQuantities<T>, h: &[Complex<T>]) -> Complex<T> {
    let kd = T::two() * T::PI() * derived.delta;
    let hk = h[k.unsigned_abs() as usize] * if k < 0 { parity_sign::<T>(k) } else { T::one() };
    let phase = kd * derived.sin_psi;
    hk * (cis(phase) * parity_sign::<T>(k) + cis(-phase))
}

impl<T: Real> FieldEvaluator<T> {
    /// The regular re-expansion runs to order `L = n_max - N`, `n_max`
    /// being the highest order in `sums`; a larger table sharpens fields
    /// away from the rod axis without changing the coefficients.
    pub fn new(
        coeffs: &CoefficientSet<T>,
        sums: &SchlomilchTable<T>,
        wave: &IncidentWave<T>,
        params: &GratingParams<T>,
    ) -> Result<Self> {
        let derived = derive(params, wave)?;
        let n_trunc = coeffs.n_trunc;
        if sums.n_max < 2 * n_trunc {
            return Err(Error::PreconditionViolated(format!(
                "lattice sums cover |n| <= {} but the coefficients need {}",
                sums.n_max,
                2 * n_trunc
            )));
        }
        let regular_order = sums.n_max - n_trunc;
        let (n, l) = (n_trunc as i64, regular_order as i64);
        let h_near = hankel1_seq(sums.n_max, T::two() * T::PI() * derived.delta)?;
        let far: Vec<Complex<T>> = (-(l + n)..=l + n)
            .map(|k| sums.at(k) - neighbour_term(k, &derived, &h_near))
            .collect();
        let mut interaction = Vec::with_capacity(2 * regular_order + 1);
        let mut interaction_h = Vec::with_capacity(2 * regular_order + 1);
        for k in -l..=l {
            let (s, sh) = coeffs
                .orders()
                .fold((Complex::default(), Complex::default()), |(s, sh), m| {
                    let i = far[(k - m + l + n) as usize];
                    (s + coeffs.a(m) * i, sh + coeffs.a_h(m) * i)
                });
            interaction.push(s);
            interaction_h.push(sh);
        }
        Ok(Self {
            derived,
            wave: *wave,
            params: *params,
            n_trunc,
            regular_order,
            interaction,
            interaction_h,
            a: coeffs.a.clone(),
            a_h: coeffs.a_h.clone(),
        })
    }

    fn check_exterior(&self, r: T) -> Result<()> {
        if r < self.params.radius_a {
            return Err(Error::InteriorPoint {
                r: r.as_f64(),
                radius: self.params.radius_a.as_f64(),
            });
        }
        Ok(())
    }

    /// Outgoing waves `sum_n (A_n, A_n^H) H_n(k_r R) b_n(phi)` of one cylinder in its own frame.
    fn outgoing(&self, r: T, phi: T) -> Result<(Complex<T>, Complex<T>)> {
        let n = self.n_trunc as i64;
        let h_pos = hankel1_seq(self.n_trunc, self.derived.k_r * r)?;
        let mut e = Complex::<T>::default();
        let mut h = Complex::<T>::default();
        for k in -n..=n {
            let hk = h_pos[k.unsigned_abs() as usize] * if k < 0 { parity_sign::<T>(k) } else { T::one() };
            let w = hk * angular(k, phi);
            let i = (k + n) as usize;
            e += self.a[i] * w;
            h += self.a_h[i] * w;
        }
        Ok((e, h))
    }

    /// Exterior `E_z`, `H_z` at `position`.
    ///
    /// The remaining lattice re-expansion is regular inside the circle
    /// through the second neighbours, so `R_s` should stay below `2d`.
    pub fn sample(&self, position: &CylinderPosition<T>) -> Result<FieldSample<T>> {
        self.check_exterior(position.r)?;
        let d = self.params.spacing_d;
        if position.r >= T::two() * d {
            log::warn!(
                "R_s = {} is outside the convergence disc of the lattice re-expansion (2d = {})",
                position.r.as_f64(),
                (T::two() * d).as_f64()
            );
        }
        let (sin, cos) = position.phi.sin_cos();
        let (dx, dy) = (position.r * cos, position.r * sin);
        let neighbours = [-1i64, 1].map(|p| {
            let rx = dx - T::from_int(p) * d;
            (p, rx.hypot(dy), dy.atan2(rx))
        });
        for &(_, r, _) in &neighbours {
            self.check_exterior(r)?;
        }

        let x = self.derived.k_r * position.r;
        let l = self.regular_order as i64;
        let n_inc = incident_terms(self.derived.k_r, position.r).max(self.regular_order);
        let j = j_signed(n_inc, x);
        let jn = |k: i64| j[(k + n_inc as i64) as usize];

        let mut e = Complex::<T>::default();
        for k in -(n_inc as i64)..=n_inc as i64 {
            e += incident_coeff(k as i32, &self.wave) * jn(k) * angular(k, position.phi);
        }
        let mut regular = Complex::<T>::default();
        let mut regular_h = Complex::<T>::default();
        let mut edge = T::zero();
        for k in -l..=l {
            let i = (k + l) as usize;
            let basis = angular(k, position.phi) * jn(k);
            let term = self.interaction[i] * basis;
            regular += term;
            regular_h += self.interaction_h[i] * basis;
            if k.abs() == l {
                edge = edge.max(term.norm());
            }
        }
        let (own, own_h) = self.outgoing(position.r, position.phi)?;
        let mut scattered = regular + own;
        let mut scattered_h = regular_h + own_h;
        let kd = self.derived.k_r * d;
        for &(p, r, phi) in &neighbours {
            let (ne, nh) = self.outgoing(r, phi)?;
            let shift = cis(T::from_int(p) * kd * self.derived.sin_psi);
            scattered += ne * shift;
            scattered_h += nh * shift;
        }
        e += scattered;
        if l > 0 && edge > T::lit(1e-9) * e.norm() {
            log::warn!(
                "field expansion tail: last retained term {:e} relative to the sum",
                (edge / e.norm()).as_f64()
            );
        }
        let phase = frame_phase(position, &self.derived, d);
        Ok(FieldSample {
            position: *position,
            e_z: e * phase,
            h_z: scattered_h * phase,
        })
    }
}

/// Exterior field at one point; see [`FieldEvaluator::sample`].
pub fn exterior_field<T: Real>(
    position: &CylinderPosition<T>,
    coeffs: &CoefficientSet<T>,
    sums: &SchlomilchTable<T>,
    wave: &IncidentWave<T>,
    params: &GratingParams<T>,
) -> Result<FieldSample<T>> {
    FieldEvaluator::new(coeffs, sums, wave, params)?.sample(position)
}

/// Rectangular sampling grid in the plane `z = const`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T: Real> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
    pub nx: usize,
    pub ny: usize,
    pub z: T,
}

/// One grid node; `sample` is `None` inside a rod.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint<T: Real> {
    pub x: T,
    pub y: T,
    pub sample: Option<FieldSample<T>>,
}

fn axis<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * T::from_int(i as i64) / T::from_int(n as i64 - 1))
            .collect(),
    }
}

/// Evaluates the field on a grid, each node in its nearest cylinder's frame.
/// Rows run over `y` outermost so the output order is deterministic.
pub fn field_grid<T: Real>(evaluator: &FieldEvaluator<T>, grid: &GridSpec<T>) -> Result<Vec<GridPoint<T>>> {
    let xs = axis(grid.x0, grid.x1, grid.nx);
    let ys = axis(grid.y0, grid.y1, grid.ny);
    let nodes: Vec<(T, T)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let d = evaluator.params.spacing_d;
    nodes
        .into_par_iter()
        .map(|(x, y)| {
            let pos = CylinderPosition::nearest(x, y, grid.z, d);
            match evaluator.sample(&pos) {
                Ok(s) => Ok(GridPoint { x, y, sample: Some(s) }),
                Err(Error::InteriorPoint { .. }) => Ok(GridPoint { x, y, sample: None }),
                Err(e) => Err(e),
            }
        })
        .collect()
}
