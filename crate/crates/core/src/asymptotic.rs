//! Small-spacing asymptotic solution: single-rod scattering matrices for
//! `k_r a << 1`, the lattice interaction expanded in powers of `a/d`, and the
//! coupled system for the wavelength-independent coefficients.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{CoefficientSet, SolveMethod, CONDITION_LIMIT};
use crate::linalg::{solve_equilibrated, DenseMatrix};
use crate::model::{derive, incident_coeff, s_constants, DerivedQuantities, GratingParams, IncidentWave};
use crate::scalar::{imag_unit, re, Real};
use crate::schlomilch::{h_constant, ModeStructure};

/// Default number of interaction orders retained.
pub const DEFAULT_M_TRUNC: usize = 4;

/// Which of the paired cross-polarisation constants a matrix uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// Wavelength-independent part of the small-argument scattering matrix of one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMatrix2x2<T: Real> {
    pub order: u32,
    pub branch: Branch,
    pub entries: [[Complex<T>; 2]; 2],
}

impl<T: Real> ScatteringMatrix2x2<T> {
    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }
}

/// `i n pi / (2^n n!)^2`.
fn order_prefactor<T: Real>(n: u32) -> Complex<T> {
    let mut denom = T::one();
    for k in 1..=n {
        denom = denom * T::two() * T::from_int(k as i64);
    }
    imag_unit::<T>() * (T::from_int(n as i64) * T::PI() / (denom * denom))
}

/// `(1/D) [[s^em_n, s^xi_(+-n)], [s^eta_(+-n), s^me_n]]` for `n >= 1`.
pub fn scattering_matrix<T: Real>(
    n: u32,
    branch: Branch,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> Result<ScatteringMatrix2x2<T>> {
    if n == 0 {
        return Err(Error::PreconditionViolated(
            "the small-argument scattering matrix is defined for n >= 1".into(),
        ));
    }
    let s = s_constants(derived, params);
    let pre = order_prefactor::<T>(n) / derived.d;
    let (xi, eta) = match branch {
        Branch::Plus => (s.s_plus_xi, s.s_plus_eta),
        Branch::Minus => (s.s_minus_xi, s.s_minus_eta),
    };
    Ok(ScatteringMatrix2x2 {
        order: n,
        branch,
        entries: [[pre * s.s_eps_mu, pre * xi], [pre * eta, pre * s.s_mu_eps]],
    })
}

/// Matrix acting on signed order `p != 0`: positive orders take the
/// `Minus` cross-polarisation branch, negative orders the `Plus` branch.
pub fn order_matrix<T: Real>(
    p: i32,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> Result<ScatteringMatrix2x2<T>> {
    let branch = if p > 0 { Branch::Minus } else { Branch::Plus };
    scattering_matrix(p.unsigned_abs(), branch, derived, params)
}

/// `s_eps_mu / D` and `s_mu_eps / D` written directly in the incidence
/// angle and the material constants.
pub fn diagonal_ratios<T: Real>(theta_i: T, eps_r: T, mu_r: T) -> (T, T) {
    let c2 = theta_i.cos().powi(2);
    let q = theta_i.sin().powi(2) / (mu_r * eps_r - c2);
    let f = (mu_r * eps_r - T::one()) * theta_i.cos() / (mu_r * eps_r - c2);
    let one = T::one();
    let d = (one + eps_r * q) * (one + mu_r * q) - f * f;
    (
        ((one - eps_r * q) * (one + mu_r * q) + f * f) / d,
        ((one - mu_r * q) * (one + eps_r * q) + f * f) / d,
    )
}

/// Leading constants `h_n` for `|n| <= max_order`.
#[derive(Debug, Clone)]
pub struct HTable<T: Real> {
    max_order: i32,
    values: Vec<Complex<T>>,
}

impl<T: Real> HTable<T> {
    pub fn new(max_order: i32, sin_phi0: T) -> Result<Self> {
        let values = (-max_order..=max_order)
            .map(|n| h_constant(n, sin_phi0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { max_order, values })
    }

    /// Copy with every odd-order constant set to zero.
    pub fn without_odd(&self) -> Self {
        let mut out = self.clone();
        for n in -self.max_order..=self.max_order {
            if n % 2 != 0 {
                out.values[(n + self.max_order) as usize] = Complex::default();
            }
        }
        out
    }

    pub fn get(&self, n: i32) -> Complex<T> {
        assert!(n.abs() <= self.max_order, "h_{n} outside the table");
        self.values[(n + self.max_order) as usize]
    }
}

/// Wavelength-independent coefficients `(A_(p,0), A^H_(p,0))` for `|p| <= 2M+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSet<T: Real> {
    pub m_trunc: usize,
    /// Indexed by `p + 2M + 1`.
    pub omega: Vec<[Complex<T>; 2]>,
    /// Residual of the solved linear system.
    pub residual: T,
}

impl<T: Real> AsymptoticSet<T> {
    pub fn zeros(m_trunc: usize) -> Self {
        Self {
            m_trunc,
            omega: vec![[Complex::default(); 2]; 2 * p_max(m_trunc) as usize + 1],
            residual: T::zero(),
        }
    }

    pub fn p_max(&self) -> i32 {
        p_max(self.m_trunc)
    }

    /// `omega_p`, zero outside the retained orders.
    pub fn omega(&self, p: i32) -> [Complex<T>; 2] {
        if p.abs() > self.p_max() {
            return [Complex::default(); 2];
        }
        self.omega[(p + self.p_max()) as usize]
    }

    pub fn orders(&self) -> std::ops::RangeInclusive<i32> {
        -self.p_max()..=self.p_max()
    }
}

fn p_max(m_trunc: usize) -> i32 {
    2 * m_trunc as i32 + 1
}

/// Power of `k_r a` carried by order `p`: 2 at `p = 0`, `|p| + 1` for odd
/// and `|p| + 2` for even nonzero orders.
pub fn scale_exponent(p: i32) -> i32 {
    match p.abs() {
        0 => 2,
        m if m % 2 == 1 => m + 1,
        m => m + 2,
    }
}

/// One interaction term: `(a/d)^weight * h_order * omega_source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Coupling {
    source: i32,
    weight: i32,
    h_order: i32,
    /// Interaction index `m` (0 for the order-zero self term).
    m: usize,
}

/// Interaction terms feeding order `p` with sources restricted to `|q| <= p_max`.
fn couplings(p: i32, p_max: i32) -> Vec<Coupling> {
    if p == 0 {
        return (-1..=1)
            .map(|m| Coupling {
                source: -m,
                weight: 0,
                h_order: m,
                m: 0,
            })
            .collect();
    }
    let sg = p.signum();
    let a = p.abs();
    let mut out = Vec::new();
    for m in 1..=(p_max as usize + 1) {
        let mi = m as i32;
        if a % 2 == 1 {
            let n = (a + 1) / 2;
            out.push(Coupling {
                source: -sg * (2 * mi - 1),
                weight: 2 * (mi + n - 1),
                h_order: sg * 2 * (mi + n - 1),
                m,
            });
        } else {
            let n = a / 2;
            out.push(Coupling {
                source: -sg * 2 * (mi - 1),
                weight: 2 * (mi + n - 1),
                h_order: sg * 2 * (mi + n - 1),
                m,
            });
            out.push(Coupling {
                source: -sg * (2 * mi - 1),
                weight: 2 * (mi + n - 1),
                h_order: sg * (2 * mi + 2 * n - 1),
                m,
            });
        }
    }
    out.retain(|c| c.source.abs() <= p_max);
    out
}

/// Largest `h` order any coupling up to `p_max` needs.
fn required_h_order(p_max: i32) -> i32 {
    (-p_max..=p_max)
        .flat_map(|p| couplings(p, p_max))
        .map(|c| c.h_order.abs())
        .max()
        .unwrap_or(1)
}

/// Lattice interaction felt by order `p`: `(a/d)^(2(n-1)) (G, G^H)` for
/// `p != 0` and the self term `(G_00, G^H_00)` for `p = 0`.
///
/// Fails when the last retained interaction index contributes more than
/// `tol` relative to the total.
pub fn interaction_sums<T: Real>(
    omega: &AsymptoticSet<T>,
    h: &HTable<T>,
    a_over_d: T,
    p: i32,
    tol: T,
) -> Result<[Complex<T>; 2]> {
    let terms = couplings(p, omega.p_max());
    let last_m = terms.iter().map(|c| c.m).max().unwrap_or(0);
    let mut total: [Complex<T>; 2] = [Complex::default(); 2];
    let mut tail: [Complex<T>; 2] = [Complex::default(); 2];
    for c in &terms {
        let w = h.get(c.h_order) * a_over_d.powi(c.weight);
        let src = omega.omega(c.source);
        for k in 0..2 {
            total[k] += w * src[k];
            if c.m == last_m && last_m > 0 {
                tail[k] += w * src[k];
            }
        }
    }
    let size = total[0].norm().max(total[1].norm());
    let tail_size = tail[0].norm().max(tail[1].norm());
    if tail_size > tol * size {
        return Err(Error::TruncationNotConverged {
            change: (tail_size / size).as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(total)
}

/// Tuning and test hooks of the asymptotic solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticOptions {
    pub m_trunc: usize,
    /// Relative change allowed when the truncation grows by one.
    pub tol: f64,
    /// Drop every odd-order leading constant.
    pub zero_odd_h: bool,
    /// Keep only the forcing of orders `|p| = 1`.
    pub odd_forcing_only: bool,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            m_trunc: DEFAULT_M_TRUNC,
            tol: 1e-6,
            zero_odd_h: false,
            odd_forcing_only: false,
        }
    }
}

/// `omega = f + W omega` over interleaved pairs for `p = -P..=P`.
#[derive(Debug, Clone)]
pub struct AsymptoticSystem<T: Real> {
    pub m_trunc: usize,
    pub coupling: DenseMatrix<T>,
    pub forcing: Vec<Complex<T>>,
}

impl<T: Real> AsymptoticSystem<T> {
    fn unpack(&self, x: &[Complex<T>], residual: T) -> AsymptoticSet<T> {
        AsymptoticSet {
            m_trunc: self.m_trunc,
            omega: x.chunks(2).map(|c| [c[0], c[1]]).collect(),
            residual,
        }
    }

    fn residual(&self, x: &[Complex<T>]) -> T {
        let wx = self.coupling.matvec(x);
        x.iter()
            .zip(&wx)
            .zip(&self.forcing)
            .fold(T::zero(), |acc, ((xi, wi), fi)| {
                acc.max((xi - wi - fi).norm() / (T::one() + fi.norm()))
            })
    }

    /// Direct solve of `(I - W) omega = f`.
    pub fn solve(&self) -> Result<AsymptoticSet<T>> {
        let n = self.forcing.len();
        let mut m = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] -= self.coupling[(i, j)];
            }
        }
        let sol = solve_equilibrated(&m, &self.forcing, T::lit(CONDITION_LIMIT))?;
        let r = self.residual(&sol.x);
        Ok(self.unpack(&sol.x, r))
    }

    /// Fixed-point iteration `omega <- f + W omega` from `omega = f`.
    pub fn iterate(&self, max_iter: usize, tol: T) -> Result<AsymptoticSet<T>> {
        let mut x = self.forcing.clone();
        let mut history = Vec::new();
        for _ in 0..max_iter {
            let wx = self.coupling.matvec(&x);
            let next: Vec<_> = wx.iter().zip(&self.forcing).map(|(w, f)| w + f).collect();
            let diff = x
                .iter()
                .zip(&next)
                .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()));
            x = next;
            history.push(diff.as_f64());
            if diff <= tol {
                let r = self.residual(&x);
                return Ok(self.unpack(&x, r));
            }
        }
        Err(Error::NoConvergence {
            context: "asymptotic fixed-point iteration".into(),
            iterations: history.len(),
            estimate: history.last().copied().unwrap_or(f64::NAN),
            history,
        })
    }
}

/// Order-zero single-rod response `diag(i pi (eps_r - 1)/4, i pi (mu_r - 1)/4)`.
fn order_zero_response<T: Real>(params: &GratingParams<T>) -> [Complex<T>; 2] {
    let q = T::PI() / T::lit(4.0);
    [
        imag_unit::<T>() * (q * (params.eps_r - T::one())),
        imag_unit::<T>() * (q * (params.mu_r - T::one())),
    ]
}

/// Assembles the coupled system for the wavelength-independent coefficients.
pub fn assemble_asymptotic<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    options: &AsymptoticOptions,
) -> Result<AsymptoticSystem<T>> {
    let derived = derive(params, wave)?;
    let ad = params.a_over_d();
    if !(ad < T::half()) {
        return Err(Error::PreconditionViolated(format!(
            "the interaction expansion needs a/d < 1/2, got {}",
            ad.as_f64()
        )));
    }
    let modes = ModeStructure::new(derived.delta, derived.sin_psi)?;
    if !modes.single_mode() {
        return Err(Error::PreconditionViolated(format!(
            "the small-spacing expansion needs a single propagating order (mu_+ = {}, mu_- = {})",
            modes.mu_plus, modes.mu_minus
        )));
    }
    let pm = p_max(options.m_trunc);
    let mut h = HTable::new(required_h_order(pm), derived.sin_psi)?;
    if options.zero_odd_h {
        h = h.without_odd();
    }
    let size = 2 * (2 * pm as usize + 1);
    let mut coupling = DenseMatrix::zeros(size);
    let mut forcing = vec![Complex::default(); size];
    let at = |p: i32| (2 * (p + pm)) as usize;
    for p in -pm..=pm {
        let row = at(p);
        let e = incident_coeff(p, wave);
        if p == 0 {
            // The self term of order zero is O(1/(k_r d)) and is not fed back.
            if !options.odd_forcing_only {
                forcing[row] = order_zero_response(params)[0] * e;
            }
            continue;
        }
        let s = order_matrix(p, &derived, params)?;
        let forced = p.abs() == 1 || (p.abs() == 2 && !options.odd_forcing_only);
        if forced {
            let f = s.apply([e, Complex::default()]);
            forcing[row] = f[0];
            forcing[row + 1] = f[1];
        }
        for c in couplings(p, pm) {
            let w = h.get(c.h_order) * ad.powi(c.weight);
            if w == Complex::default() {
                continue;
            }
            let col = at(c.source);
            for i in 0..2 {
                for j in 0..2 {
                    coupling[(row + i, col + j)] += w * s.entries[i][j];
                }
            }
        }
    }
    Ok(AsymptoticSystem {
        m_trunc: options.m_trunc,
        coupling,
        forcing,
    })
}

/// Solves the asymptotic system and checks it against truncation `M + 1`.
pub fn solve_asymptotic<T: Real>(
    params: &GratingParams<T>,
    wave: &IncidentWave<T>,
    options: &AsymptoticOptions,
) -> Result<AsymptoticSet<T>> {
    let set = assemble_asymptotic(params, wave, options)?.solve()?;
    let finer_opts = AsymptoticOptions {
        m_trunc: options.m_trunc + 1,
        ..*options
    };
    let finer = assemble_asymptotic(params, wave, &finer_opts)?.solve()?;
    let scale = set
        .omega
        .iter()
        .flat_map(|w| w.iter())
        .fold(T::zero(), |acc, z| acc.max(z.norm()));
    let change = set.orders().fold(T::zero(), |acc, p| {
        let (a, b) = (set.omega(p), finer.omega(p));
        acc.max((a[0] - b[0]).norm()).max((a[1] - b[1]).norm())
    });
    if change > T::lit(options.tol) * scale {
        return Err(Error::TruncationNotConverged {
            change: (change / scale).as_f64(),
            tol: options.tol,
        });
    }
    Ok(set)
}

/// Scales the wavelength-independent coefficients by `(k_r a)^exponent`.
pub fn reconstruct<T: Real>(
    set: &AsymptoticSet<T>,
    derived: &DerivedQuantities<T>,
    params: &GratingParams<T>,
) -> CoefficientSet<T> {
    let x = derived.kr_a(params);
    let scaled: Vec<[Complex<T>; 2]> = set
        .orders()
        .map(|p| {
            let w = set.omega(p);
            let f = re(x.powi(scale_exponent(p)));
            [w[0] * f, w[1] * f]
        })
        .collect();
    CoefficientSet {
        n_trunc: set.p_max() as usize,
        a: scaled.iter().map(|w| w[0]).collect(),
        a_h: scaled.iter().map(|w| w[1]).collect(),
        residual: set.residual,
        method: SolveMethod::Asymptotic,
    }
}
