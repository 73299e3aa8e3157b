//! Single-interface reflection amplitudes for TE and TM waves.
//!
//! Branch convention at complex frequency: normal wavevectors are
//! `k_z = i √(k² − ω²)` in vacuum and `k_z,m = i √(k² − εμω²)` in the medium,
//! principal root, with a radicand lying exactly on the negative real axis
//! read as `−i0` (the retarded side, `ω + i0`). The cuts therefore sit where
//! the waves propagate, and the evanescent sector, where surface plasmons
//! live, continues analytically into the lower half-plane.
//!
//! At `ω = iξ` both reduce to `i q`, `i q_m` with the positive real decay
//! constants `q`, `q_m`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};
use crate::response::{DrudeParams, MetamaterialMuParams, ResponseModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TE, Polarization::TM];
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TE => "TE",
            Self::TM => "TM",
        })
    }
}

/// A semi-infinite plate described by its permittivity and permeability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mirror {
    pub epsilon: ResponseModel,
    pub mu: ResponseModel,
}

impl Mirror {
    pub fn new(epsilon: ResponseModel, mu: ResponseModel) -> Result<Self> {
        let m = Self { epsilon, mu };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.epsilon.validate()?;
        self.mu.validate()?;
        if self.epsilon.is_perfect() && self.mu.is_perfect() {
            return Err(CasimirError::InvalidParameter(
                "a mirror cannot have both infinite permittivity and permeability".into(),
            ));
        }
        Ok(())
    }

    pub fn vacuum() -> Self {
        Self {
            epsilon: ResponseModel::Vacuum,
            mu: ResponseModel::Vacuum,
        }
    }

    pub fn drude(p: DrudeParams) -> Self {
        Self {
            epsilon: ResponseModel::DrudeEpsilon(p),
            mu: ResponseModel::Vacuum,
        }
    }

    pub fn metamaterial(epsilon: ResponseModel, mu: MetamaterialMuParams) -> Self {
        Self {
            epsilon,
            mu: ResponseModel::MetamaterialMuKk(mu),
        }
    }

    /// Perfect electric conductor: `r_TM = 1`, `r_TE = −1`.
    pub fn perfect_electric() -> Self {
        Self {
            epsilon: ResponseModel::Perfect,
            mu: ResponseModel::Vacuum,
        }
    }

    /// Perfect magnetic conductor: `r_TE = 1`, `r_TM = −1`.
    pub fn perfect_magnetic() -> Self {
        Self {
            epsilon: ResponseModel::Vacuum,
            mu: ResponseModel::Perfect,
        }
    }

    /// The dual mirror with ε and μ exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            epsilon: self.mu.clone(),
            mu: self.epsilon.clone(),
        }
    }

    pub fn characteristic_frequencies(&self) -> Vec<f64> {
        let mut v = self.epsilon.characteristic_frequencies();
        v.extend(self.mu.characteristic_frequencies());
        v
    }

    /// The response that enters the numerator for `pol` (ε for TM, μ for TE)
    /// and the other one.
    fn split(&self, pol: Polarization) -> (&ResponseModel, &ResponseModel) {
        match pol {
            Polarization::TM => (&self.epsilon, &self.mu),
            Polarization::TE => (&self.mu, &self.epsilon),
        }
    }
}

/// `q = √(ξ² + k²)`, the vacuum decay constant on the imaginary axis.
pub fn vacuum_decay(xi: f64, k: f64) -> f64 {
    xi.hypot(k)
}

/// ε and μ of a mirror evaluated once at `ω = iξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagResponse {
    pub epsilon: f64,
    pub mu: f64,
}

impl ImagResponse {
    pub fn reflection(&self, pol: Polarization, xi: f64, k: f64) -> f64 {
        let (a, b) = match pol {
            Polarization::TM => (self.epsilon, self.mu),
            Polarization::TE => (self.mu, self.epsilon),
        };
        if a.is_infinite() {
            return 1.0;
        }
        if b.is_infinite() {
            return -1.0;
        }
        let q = vacuum_decay(xi, k);
        let qm = (a * b * xi * xi + k * k).sqrt();
        (a * q - qm) / (a * q + qm)
    }
}

impl Mirror {
    pub fn at_imag(&self, xi: f64) -> Result<ImagResponse> {
        Ok(ImagResponse {
            epsilon: self.epsilon.imag_axis(xi)?,
            mu: self.mu.imag_axis(xi)?,
        })
    }
}

/// Reflection amplitude at `ω = iξ`, `ξ > 0`.
pub fn reflection_imag(m: &Mirror, pol: Polarization, xi: f64, k: f64) -> Result<f64> {
    Ok(m.at_imag(xi)?.reflection(pol, xi, k))
}

/// The `ξ → 0⁺` limit of [`reflection_imag`] at fixed `k > 0`; zero at `k = 0`.
pub fn reflection_static(m: &Mirror, pol: Polarization, k: f64) -> Result<f64> {
    if k == 0.0 {
        return Ok(0.0);
    }
    let (lead, other) = m.split(pol);
    let a = lead.static_limit();
    let b = other.static_limit();
    if a.value.is_infinite() && b.value.is_infinite() {
        return Err(CasimirError::InvalidParameter(
            "both responses infinite".into(),
        ));
    }
    if a.value.is_infinite() {
        return Ok(1.0);
    }
    // lim ε μ ξ²
    let product = if b.value.is_infinite() {
        b.xi2_value * a.value
    } else {
        0.0
    };
    if product.is_infinite() {
        return Ok(-1.0);
    }
    let qm = (product + k * k).sqrt();
    Ok((a.value * k - qm) / (a.value * k + qm))
}

/// Principal square root with radicands on the negative real axis read as
/// `z − i0`, i.e. mapped to `−i√|z|`.
pub fn sqrt_retarded(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::new(0.0, -(-z.re).sqrt())
    } else {
        z.sqrt()
    }
}

/// `i √(k² − n²ω²)` for refractive-index-squared `n2`.
pub fn normal_wavevector(n2: Complex64, omega: Complex64, k: f64) -> Complex64 {
    Complex64::i() * sqrt_retarded(k * k - n2 * omega * omega)
}

/// Vacuum normal wavevector `k_z`.
pub fn vacuum_kz(omega: Complex64, k: f64) -> Complex64 {
    normal_wavevector(Complex64::new(1.0, 0.0), omega, k)
}

/// Numerator and denominator of the complex reflection amplitude, `r = num/den`.
///
/// Kept separate so callers can clear the reflection poles (`den = 0`).
pub fn reflection_complex_parts(
    m: &Mirror,
    pol: Polarization,
    omega: Complex64,
    k: f64,
) -> Result<(Complex64, Complex64)> {
    let (lead, other) = m.split(pol);
    let one = Complex64::new(1.0, 0.0);
    match (lead.is_perfect(), other.is_perfect()) {
        (true, true) => {
            return Err(CasimirError::InvalidParameter(
                "both responses infinite".into(),
            ))
        }
        (true, false) => return Ok((one, one)),
        (false, true) => return Ok((-one, one)),
        _ => {}
    }
    let a = lead.complex(omega)?;
    let b = other.complex(omega)?;
    let kz = vacuum_kz(omega, k);
    let kzm = normal_wavevector(a * b, omega, k);
    Ok((a * kz - kzm, a * kz + kzm))
}

/// Reflection amplitude at complex frequency.
pub fn reflection_complex(m: &Mirror, pol: Polarization, omega: Complex64, k: f64) -> Result<Complex64> {
    let (num, den) = reflection_complex_parts(m, pol, omega, k)?;
    if den.norm() == 0.0 {
        return Err(CasimirError::NonFinite {
            context: format!("reflection pole at omega = {omega}, k = {k}"),
        });
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drude(wp: f64, g: f64) -> Mirror {
        Mirror::drude(DrudeParams::new(wp, g).unwrap())
    }

    #[test]
    fn vacuum_decay_examples() {
        assert_eq!(vacuum_decay(0.0, 1.0), 1.0);
        assert_eq!(vacuum_decay(3.0, 4.0), 5.0);
        assert_eq!(vacuum_decay(1.0, 0.0), 1.0);
    }

    #[test]
    fn vacuum_mirror_does_not_reflect() {
        let m = Mirror::vacuum();
        for pol in Polarization::BOTH {
            for (xi, k) in [(0.1, 0.0), (1.0, 3.0), (7.0, 0.2)] {
                assert_eq!(reflection_imag(&m, pol, xi, k).unwrap(), 0.0);
            }
            let r = reflection_complex(&m, pol, Complex64::new(0.7, -0.2), 1.3).unwrap();
            assert!(r.norm() < 1e-15);
        }
    }

    #[test]
    fn conductor_limits() {
        let e = Mirror::new(ResponseModel::Constant { value: 1e12 }, ResponseModel::Vacuum).unwrap();
        let h = e.swapped();
        for (xi, k) in [(0.5, 0.5), (1.0, 0.0), (2.0, 3.0)] {
            assert!((reflection_imag(&e, Polarization::TM, xi, k).unwrap() - 1.0).abs() < 1e-5);
            assert!((reflection_imag(&e, Polarization::TE, xi, k).unwrap() + 1.0).abs() < 1e-5);
            assert!((reflection_imag(&h, Polarization::TE, xi, k).unwrap() - 1.0).abs() < 1e-5);
            assert!((reflection_imag(&h, Polarization::TM, xi, k).unwrap() + 1.0).abs() < 1e-5);
        }
        let pec = Mirror::perfect_electric();
        assert_eq!(reflection_imag(&pec, Polarization::TM, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(reflection_imag(&pec, Polarization::TE, 1.0, 1.0).unwrap(), -1.0);
        let pmc = Mirror::perfect_magnetic();
        assert_eq!(reflection_imag(&pmc, Polarization::TE, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(reflection_imag(&pmc, Polarization::TM, 1.0, 1.0).unwrap(), -1.0);
        assert!(Mirror::new(ResponseModel::Perfect, ResponseModel::Perfect).is_err());
    }

    #[test]
    fn drude_static_limits() {
        let m = drude(1.0, 0.1);
        assert_eq!(reflection_static(&m, Polarization::TE, 0.7).unwrap(), 0.0);
        assert_eq!(reflection_static(&m, Polarization::TM, 0.7).unwrap(), 1.0);
        assert_eq!(reflection_static(&m, Polarization::TM, 0.0).unwrap(), 0.0);
        // the static value is the limit of the imaginary-axis routine
        for pol in Polarization::BOTH {
            let near = reflection_imag(&m, pol, 1e-9, 0.7).unwrap();
            let lim = reflection_static(&m, pol, 0.7).unwrap();
            assert!((near - lim).abs() < 1e-6, "{pol}: {near} vs {lim}");
        }
        // without damping the TE limit stays finite (plasma-model behaviour)
        let p = drude(1.0, 0.0);
        let te = reflection_static(&p, Polarization::TE, 0.5).unwrap();
        let q = (1.0f64 + 0.25).sqrt();
        assert!((te - (0.5 - q) / (0.5 + q)).abs() < 1e-15);
    }

    #[test]
    fn metamaterial_static_limit() {
        let mu = MetamaterialMuParams::new(0.5, 1.0, 0.0).unwrap();
        let m = Mirror::metamaterial(ResponseModel::Vacuum, mu);
        let te = reflection_static(&m, Polarization::TE, 2.0).unwrap();
        assert!((te - 0.5 / 2.5).abs() < 1e-15);
        assert_eq!(reflection_static(&m, Polarization::TM, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn complex_matches_imaginary_axis() {
        let mirrors = [
            drude(1.0, 0.0),
            drude(1.3, 0.05),
            Mirror::metamaterial(
                ResponseModel::Vacuum,
                MetamaterialMuParams::new(0.4, 0.8, 0.0).unwrap(),
            ),
        ];
        for m in &mirrors {
            for pol in Polarization::BOTH {
                for (xi, k) in [(0.3, 0.0), (1.0, 2.0), (4.0, 0.5)] {
                    let a = reflection_imag(m, pol, xi, k).unwrap();
                    let b = reflection_complex(m, pol, Complex64::new(0.0, xi), k).unwrap();
                    assert!((b.re - a).abs() < 1e-14 && b.im.abs() < 1e-14, "{pol} {xi} {k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn surface_plasmon_pole() {
        // lossless plasma: r_TM has a pole at ε = −1 in the quasi-static limit
        let m = drude(1.0, 0.0);
        let w = Complex64::new(0.5f64.sqrt(), 0.0);
        let (_, den) = reflection_complex_parts(&m, Polarization::TM, w, 1e6).unwrap();
        let (num, _) = reflection_complex_parts(&m, Polarization::TM, w, 1e6).unwrap();
        assert!(den.norm() < 1e-6 * num.norm());
    }
}
