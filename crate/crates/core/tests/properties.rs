use std::f64::consts::PI;

use grating_core::exact::{assemble, lattice_sums, solve_direct};
use grating_core::model::{a_zeta_n, b_zeta_n, c_n, derive, incident_coeff, Medium};
use grating_core::schlomilch::{direct_sum, elementary, ModeStructure, SumMethod};
use grating_core::special::{
    bernoulli_number, bernoulli_poly, bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, hankel1,
};
use grating_core::{GratingParams, IncidentWave};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian(n in 0i32..=20, x in prop::sample::select(vec![0.1, 1.0, 5.0, 20.0])) {
        let w = bessel_j(n, x) * bessel_y_prime(n, x).unwrap() - bessel_j_prime(n, x) * bessel_y(n, x).unwrap();
        prop_assert!(rel(w, 2.0 / (PI * x)) < 1e-9);
    }

    #[test]
    fn wronskian_continuous(n in 0i32..=20, x in 0.1f64..50.0) {
        let w = bessel_j(n, x) * bessel_y_prime(n, x).unwrap() - bessel_j_prime(n, x) * bessel_y(n, x).unwrap();
        prop_assert!(rel(w, 2.0 / (PI * x)) < 1e-9);
    }

    #[test]
    fn three_term_recurrence(n in 1i32..=20, x in prop::sample::select(vec![0.1, 1.0, 5.0, 20.0])) {
        let k = 2.0 * n as f64 / x;
        let j = |m| bessel_j(m, x);
        let y = |m| bessel_y(m, x).unwrap();
        let rj = (j(n - 1) + j(n + 1) - k * j(n)).abs() / j(n).abs();
        let ry = (y(n - 1) + y(n + 1) - k * y(n)).abs() / y(n).abs();
        // J_n is tiny at high order and small x; the recurrence is checked
        // relative to the largest participating term there.
        let scale_j = j(n - 1).abs().max(j(n).abs()) / j(n).abs();
        prop_assert!(rj < 1e-9 * scale_j, "J residual {rj}");
        prop_assert!(ry < 1e-9, "Y residual {ry}");
    }

    #[test]
    fn negative_orders_flip_sign_only(n in 0i32..40, x in 0.05f64..80.0) {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(bessel_j(-n, x), s * bessel_j(n, x));
        prop_assert_eq!(bessel_y(-n, x).unwrap(), s * bessel_y(n, x).unwrap());
        prop_assert_eq!(hankel1(-n, x).unwrap(), hankel1(n, x).unwrap() * s);
    }

    #[test]
    fn bernoulli_shift(m in 1usize..=30, x in -1.0f64..1.0) {
        let lhs = bernoulli_poly::<f64>(m, x + 1.0).unwrap() - bernoulli_poly::<f64>(m, x).unwrap();
        let rhs = m as f64 * x.powi(m as i32 - 1);
        // Round-off of the monomial form is set by sum_k C(m,k) |B_k| |x+1|^(m-k).
        let mut binom = 1.0;
        let mut cond = 0.0;
        for k in 0..=m {
            cond += binom * bernoulli_number::<f64>(k).unwrap().abs() * (x.abs() + 1.0).powi((m - k) as i32);
            binom *= (m - k) as f64 / (k + 1) as f64;
        }
        prop_assert!((lhs - rhs).abs() < 1e-13 * cond, "{lhs} vs {rhs} (cond {cond})");
    }

    #[test]
    fn wavenumbers_and_constants(
        eps in 1.05f64..10.0,
        mu in 1.0f64..10.0,
        theta in 0.05f64..=PI / 2.0,
        k0 in 0.1f64..20.0,
    ) {
        let p = GratingParams::new(0.1, 1.0, eps, mu).unwrap();
        let w = IncidentWave::new(k0, theta, 2.0, 1.0).unwrap();
        let d = derive(&p, &w).unwrap();
        prop_assert!(rel(d.k_r * d.k_r + d.k_z * d.k_z, k0 * k0) < 1e-14);
        prop_assert!(d.f >= 0.0 && d.f < 1.0);
        prop_assert!(d.d > 0.0);
        prop_assert!(d.delta > 0.0);
    }

    #[test]
    fn coupling_constant_decreases_toward_normal_incidence(eps in 1.1f64..8.0, t in 0.1f64..1.4) {
        let p = GratingParams::new(0.1, 1.0, eps, 1.0).unwrap();
        let f = |theta: f64| derive(&p, &IncidentWave::new(1.0, theta, 2.0, 1.0).unwrap()).unwrap().f;
        prop_assert!(f(t + 0.05) < f(t));
    }

    #[test]
    fn coefficient_parity(n in 1i32..8, eps in 1.2f64..6.0, mu in 1.0f64..3.0, theta in 0.2f64..1.5) {
        let p = GratingParams::new(0.2, 1.0, eps, mu).unwrap();
        let w = IncidentWave::new(1.3, theta, 2.0, 1.0).unwrap();
        let d = derive(&p, &w).unwrap();
        prop_assert_eq!(c_n(n, &d, &p).unwrap(), c_n(-n, &d, &p).unwrap());
        for m in [Medium::Eps, Medium::Mu] {
            prop_assert_eq!(a_zeta_n(n, m, &d, &p).unwrap(), a_zeta_n(-n, m, &d, &p).unwrap());
            prop_assert_eq!(b_zeta_n(n, m, &d, &p).unwrap(), -b_zeta_n(-n, m, &d, &p).unwrap());
        }
    }

    #[test]
    fn incident_coefficients_have_common_modulus(n in -30i32..30, psi in 0.0f64..(2.0 * PI)) {
        let w = IncidentWave::new(1.0, 0.9, psi, 2.5).unwrap();
        prop_assert!(rel(incident_coeff(n, &w).norm(), 0.9f64.sin() * 2.5) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lattice_sums_mirror_in_azimuth(n in 0i32..=5, delta in 0.08f64..0.45, s in -0.8f64..0.8) {
        let a = direct_sum(-n, delta, s, 1e-12).unwrap();
        let b = direct_sum(n, delta, -s, 1e-12).unwrap();
        prop_assert!((a - b).norm() < 1e-9 * b.norm());
    }

    #[test]
    fn elementary_matches_direct(n in -6i32..=6, delta in 0.08f64..0.45, s in -0.8f64..0.8) {
        let modes = ModeStructure::new(delta, s).unwrap();
        let e = elementary(n, &modes).unwrap();
        let d = direct_sum(n, delta, s, 1e-12).unwrap();
        prop_assert!((e - d).norm() < 1e-6 * d.norm());
    }

    #[test]
    fn reciprocity_in_azimuth(psi in 0.2f64..3.0, theta in 0.3f64..1.5, ad in 0.05f64..0.3) {
        let p = GratingParams::new(ad, 1.0, 2.5, 1.3).unwrap();
        let solve = |psi: f64| {
            let w = IncidentWave::new(0.9 / theta.sin(), theta, psi, 1.0).unwrap();
            let sums = lattice_sums(&p, &w, 6, SumMethod::Elementary).unwrap();
            solve_direct(&assemble(&p, &w, &sums, 6).unwrap()).unwrap()
        };
        let a = solve(psi);
        let b = solve(-psi);
        let scale = a.max_norm();
        for n in -6..=6 {
            prop_assert!((a.a(n).norm() - b.a(-n).norm()).abs() < 1e-9 * scale);
            prop_assert!((a.a_h(n).norm() - b.a_h(-n).norm()).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn normal_incidence_decouples_polarisations(psi in 0.2f64..3.0, ad in 0.05f64..0.4, kd in 0.2f64..2.5) {
        let p = GratingParams::new(ad, 1.0, 3.0, 1.5).unwrap();
        let w = IncidentWave::new(kd, PI / 2.0, psi, 1.0).unwrap();
        let sums = lattice_sums(&p, &w, 8, SumMethod::Elementary).unwrap();
        let set = solve_direct(&assemble(&p, &w, &sums, 8).unwrap()).unwrap();
        let a = set.a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let h = set.a_h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        prop_assert!(h <= 1e-12 * a);
        prop_assert!(set.residual < 1e-10);
    }
}
