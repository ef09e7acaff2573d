use thiserror::Error;

/// Errors raised by the grating computations.
///
/// Numerical values are carried as `f64` whatever the scalar type of the
/// computation, so one error type serves every instantiation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function} is singular at x = {x:e}")]
    Domain { function: &'static str, x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("EvanescentInterior: eps_r*mu_r = {eps_mu} does not exceed cos^2(theta_i) = {cos2_theta}")]
    EvanescentInterior { eps_mu: f64, cos2_theta: f64 },

    #[error("WoodAnomaly: Delta*(1 {branch} sin psi_i) = {value} lies within {distance:e} of an integer")]
    WoodAnomaly { branch: char, value: f64, distance: f64 },

    #[error("NoConvergence in {context} after {iterations} iterations (last estimate {estimate:e})")]
    NoConvergence {
        context: String,
        iterations: usize,
        estimate: f64,
        history: Vec<f64>,
    },

    #[error("SingularDenominator: {quantity} denominator vanishes at order {order}")]
    SingularDenominator { quantity: &'static str, order: i32 },

    #[error("IllConditioned: condition estimate {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),

    #[error("TruncationNotConverged: change {change:e} exceeds tolerance {tol:e}")]
    TruncationNotConverged { change: f64, tol: f64 },

    #[error("InteriorPoint: R_s = {r} is inside the cylinder of radius {radius}")]
    InteriorPoint { r: f64, radius: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
