//! Constants and conversions between the reduced units used by the CLI and
//! the natural units used internally.

use std::f64::consts::PI;

/// ζ(3), Apéry's constant.
#[allow(clippy::excessive_precision)]
pub const ZETA_3: f64 = 1.202_056_903_159_594_285_399_738_161_511_449_990_8;

/// Lengths reported in units of `Λ = 2πc/Ω`.
pub fn lambda_to_natural(length_in_lambda: f64) -> f64 {
    2.0 * PI * length_in_lambda
}

pub fn natural_to_lambda(length: f64) -> f64 {
    length / (2.0 * PI)
}

/// Pressure of two perfect mirrors, `π²/(240 L⁴)`.
pub fn ideal_pressure(length: f64) -> f64 {
    PI.powi(2) / (240.0 * length.powi(4))
}

/// Energy per area of two perfect mirrors, `−π²/(720 L³)`.
pub fn ideal_energy(length: f64) -> f64 {
    -PI.powi(2) / (720.0 * length.powi(3))
}
