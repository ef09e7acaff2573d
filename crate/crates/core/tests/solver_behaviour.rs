use std::f64::consts::PI;

use grating_core::asymptotic::{reconstruct, solve_asymptotic, AsymptoticOptions};
use grating_core::exact::{
    assemble, lattice_sums, solve_converged, solve_direct, solve_exact, solve_neumann, truncation_study,
};
use grating_core::fields::{CylinderPosition, FieldEvaluator};
use grating_core::model::{derive, incident_coeff, order_coefficients};
use grating_core::schlomilch::{elementary, ModeStructure, SumMethod};
use grating_core::{GratingParams, IncidentWave};
use num_complex::Complex64;

/// a/d, k_r d and angles; eps_r = 2, mu_r = 1, d = 1.
fn config(ad: f64, kd: f64, theta: f64, psi: f64) -> (GratingParams<f64>, IncidentWave<f64>) {
    let p = GratingParams::new(ad, 1.0, 2.0, 1.0).unwrap();
    let w = IncidentWave::new(kd / theta.sin(), theta, psi, 1.0).unwrap();
    (p, w)
}

#[test]
fn truncation_self_convergence() {
    let (p, w) = config(0.1, 0.2, PI / 4.0, PI);
    let study = truncation_study(&p, &w, &[4, 8, 12]).unwrap();
    let a8 = study[1].coefficients.a(1);
    let a12 = study[2].coefficients.a(1);
    assert!((a12 - a8).norm() < 1e-8 * a12.norm());
    assert!(study[2].change.unwrap() < 1e-8);
    assert!(study[0].change.is_none());
}

#[test]
fn coefficients_decay_with_order() {
    let (p, w) = config(0.1, 0.5, 1.0, 2.3);
    let set = solve_converged(&p, &w, 1e-8).unwrap();
    for n in 3..10 {
        assert!(set.a(n + 1).norm() < set.a(n).norm());
        assert!(set.a(-n - 1).norm() < set.a(-n).norm());
    }
}

#[test]
fn smallest_truncation_is_one_self_interacting_pair() {
    let (p, w) = config(0.15, 0.7, 0.8, 2.4);
    let d = derive(&p, &w).unwrap();
    let sums = lattice_sums(&p, &w, 0, SumMethod::Elementary).unwrap();
    let set = solve_direct(&assemble(&p, &w, &sums, 0).unwrap()).unwrap();

    // Cramer's rule on the two boundary conditions with only I_0.
    let k = order_coefficients(0, &d, &p).unwrap();
    let i0 = elementary(0, &ModeStructure::new(d.delta, d.sin_psi).unwrap()).unwrap();
    let e = incident_coeff(0, &w);
    let one = Complex64::new(1.0, 0.0);
    let m = [
        [k.b_mu * (one + k.c * i0), one + k.a_mu * i0],
        [-(one + k.a_eps * i0), k.b_eps * (one + k.c * i0)],
    ];
    let r = [-(k.b_mu * k.c * e), k.a_eps * e];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let a = (r[0] * m[1][1] - m[0][1] * r[1]) / det;
    let ah = (m[0][0] * r[1] - r[0] * m[1][0]) / det;
    assert!((set.a(0) - a).norm() < 1e-12 * a.norm());
    assert!((set.a_h(0) - ah).norm() <= 1e-12 * a.norm());
}

#[test]
fn neumann_contraction_shrinks_with_radius() {
    let mut ratios = Vec::new();
    for ad in [0.2, 0.1, 0.05] {
        let (p, w) = config(ad, 0.2, PI / 4.0, 2.0);
        let sums = lattice_sums(&p, &w, 8, SumMethod::Elementary).unwrap();
        let sys = assemble(&p, &w, &sums, 8).unwrap();
        let out = solve_neumann(&sys, 500, 1e-14).unwrap();
        let direct = solve_direct(&sys).unwrap();
        assert!(direct.max_difference(&out.coefficients) < 1e-8);
        let r = out.contraction_ratios();
        ratios.push(r[r.len() / 2]);
    }
    assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
}

#[test]
fn neumann_fixed_point_at_origin() {
    let (p, w) = config(0.1, 0.2, PI / 4.0, 2.0);
    let sums = lattice_sums(&p, &w, 4, SumMethod::Elementary).unwrap();
    let mut sys = assemble(&p, &w, &sums, 4).unwrap();
    sys.incident.iter_mut().for_each(|e| *e = Complex64::default());
    let out = solve_neumann(&sys, 10, 0.0).unwrap();
    assert_eq!(out.iterations, 1);
    assert_eq!(out.coefficients.max_norm(), 0.0);
}

#[test]
fn neumann_reports_divergence() {
    // Touching rods with a near-resonant spacing: the block iteration does not contract.
    let (p, w) = config(0.5, 5.5, 1.2, 2.0);
    let sums = lattice_sums(&p, &w, 6, SumMethod::Elementary).unwrap();
    let sys = assemble(&p, &w, &sums, 6).unwrap();
    match solve_neumann(&sys, 30, 1e-14) {
        Err(grating_core::Error::NoConvergence { history, .. }) => assert!(!history.is_empty()),
        Ok(out) => panic!("unexpected convergence after {} sweeps", out.iterations),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn asymptotic_decouples_at_normal_incidence() {
    let (p, w) = config(0.1, 0.2, PI / 2.0, 2.0);
    let set = solve_asymptotic(&p, &w, &AsymptoticOptions::default()).unwrap();
    let coeffs = reconstruct(&set, &derive(&p, &w).unwrap(), &p);
    let a = coeffs.a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let h = coeffs.a_h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    assert!(h <= 1e-12 * a);
}

#[test]
fn asymptotic_is_linear_in_amplitude() {
    let (p, w) = config(0.1, 0.2, 1.0, 2.0);
    let w3 = IncidentWave::new(w.k0, w.theta_i, w.psi_i, 3.0).unwrap();
    let a = solve_asymptotic(&p, &w, &AsymptoticOptions::default()).unwrap();
    let b = solve_asymptotic(&p, &w3, &AsymptoticOptions::default()).unwrap();
    for q in a.orders() {
        for k in 0..2 {
            assert!((a.omega(q)[k] * 3.0 - b.omega(q)[k]).norm() < 1e-12 * (1.0 + b.omega(q)[k].norm()));
        }
    }
}

#[test]
fn axial_dependence_is_a_pure_phase() {
    let (p, w) = config(0.1, 0.6, 0.9, 2.2);
    let sums = lattice_sums(&p, &w, 12, SumMethod::Elementary).unwrap();
    let set = solve_direct(&assemble(&p, &w, &sums, 12).unwrap()).unwrap();
    let ev = FieldEvaluator::new(&set, &sums, &w, &p).unwrap();
    let at = |z: f64| {
        ev.sample(&CylinderPosition {
            s: 0,
            r: 0.3,
            phi: 1.1,
            z,
        })
        .unwrap()
    };
    let base = at(0.0).e_z.norm();
    for z in [0.5, 3.0, -7.0] {
        assert!((at(z).e_z.norm() - base).abs() < 1e-13 * base);
    }
}

#[test]
fn high_orders_keep_their_own_relative_accuracy() {
    // At psi = pi, |A_n| = |A_-n|; the tiny high orders must honour this
    // to their own precision, not to that of A_0.
    let (p, w) = config(0.1, 0.6, PI / 4.0, PI);
    let set = solve_exact(&p, &w, 20).unwrap();
    for n in 1..=20 {
        let (a, b) = (set.a(n).norm(), set.a(-n).norm());
        assert!((a - b).abs() < 1e-8 * a, "order {n}: {a:e} vs {b:e}");
    }
}

#[test]
fn near_field_is_stable_in_truncation() {
    let (p, w) = config(0.1, 0.6, PI / 4.0, 2.2);
    let field = |n_trunc: usize| {
        let sums = lattice_sums(&p, &w, n_trunc, SumMethod::Elementary).unwrap();
        let set = solve_direct(&assemble(&p, &w, &sums, n_trunc).unwrap()).unwrap();
        let ev = FieldEvaluator::new(&set, &sums, &w, &p).unwrap();
        ev.sample(&CylinderPosition::from_cartesian(0.12, 0.01, 0.0, 0, 1.0))
            .unwrap()
            .e_z
    };
    let reference = field(12);
    for n_trunc in [16, 20, 28] {
        let e = field(n_trunc);
        assert!(
            (e - reference).norm() < 1e-9 * reference.norm(),
            "N = {n_trunc}: {e} vs {reference}"
        );
    }
}
