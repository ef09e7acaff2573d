//! Multiple scattering of obliquely incident, vertically polarised plane
//! waves by an infinite grating of dielectric circular cylinders.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to one of them.
//!
//! ```
//! use grating_core::{exact, GratingParams64, IncidentWave64};
//!
//! let params = GratingParams64::new(0.1, 1.0, 2.0, 1.0).unwrap();
//! let wave = IncidentWave64::new(0.5, std::f64::consts::FRAC_PI_4, std::f64::consts::PI, 1.0).unwrap();
//! let coeffs = exact::solve_exact(&params, &wave, 12).unwrap();
//! assert!(coeffs.residual < 1e-10);
//! ```

// `!(x > 0)` style guards are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod error;
pub mod exact;
pub mod fields;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod schlomilch;
pub mod special;

pub use asymptotic::{reconstruct, solve_asymptotic, AsymptoticOptions, AsymptoticSet, Branch, ScatteringMatrix2x2};
pub use error::{Error, Result};
pub use exact::{
    assemble, solve_converged, solve_direct, solve_exact, solve_neumann, truncation_study, CoefficientSet, ExactSystem,
    SolveMethod,
};
pub use fields::{exterior_field, field_sums, incident_field, CylinderPosition, FieldEvaluator, FieldSample, GridSpec};
pub use model::{derive, DerivedQuantities, GratingParams, IncidentWave};
pub use scalar::Real;
pub use schlomilch::{SchlomilchTable, SumMethod};

pub type GratingParams64 = GratingParams<f64>;
pub type IncidentWave64 = IncidentWave<f64>;
pub type DerivedQuantities64 = DerivedQuantities<f64>;
pub type SchlomilchTable64 = SchlomilchTable<f64>;
pub type CoefficientSet64 = CoefficientSet<f64>;
pub type AsymptoticSet64 = AsymptoticSet<f64>;
pub type FieldSample64 = FieldSample<f64>;

pub type GratingParams32 = GratingParams<f32>;
pub type IncidentWave32 = IncidentWave<f32>;
pub type DerivedQuantities32 = DerivedQuantities<f32>;
pub type SchlomilchTable32 = SchlomilchTable<f32>;
pub type CoefficientSet32 = CoefficientSet<f32>;
pub type AsymptoticSet32 = AsymptoticSet<f32>;
pub type FieldSample32 = FieldSample<f32>;
