//! Cylinder functions, Bernoulli numbers and zeta values.

pub mod bernoulli;
pub mod bessel;
pub mod zeta;

pub use bernoulli::{bernoulli_number, bernoulli_number_exact, bernoulli_poly};
pub use bessel::{
    bessel_j, bessel_j_prime, bessel_j_seq, bessel_y, bessel_y_prime, bessel_y_seq, hankel1, hankel1_prime,
    hankel1_seq, CylinderFnValue,
};
pub use zeta::{digamma, hurwitz_zeta, zeta_partial};
