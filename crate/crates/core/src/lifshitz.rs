//! Casimir pressure and energy per unit area from the Lifshitz formula,
//! evaluated on the imaginary frequency axis.
//!
//! With `g = r₁ r₂ e^{−2qL}` and `q = √(ξ² + k²)`:
//!
//! ```text
//! F(T = 0) = 1/(2π²) ∫dξ ∫dk k q Σ_pol g/(1 − g)
//! F(T > 0) = T/π Σ'_n ∫dk k q_n Σ_pol g_n/(1 − g_n),   ξ_n = 2πnT
//! E(T = 0) = 1/(4π²) ∫dξ ∫dk k Σ_pol ln(1 − g)
//! ```
//!
//! The primed sum gives the `n = 0` term half weight. Positive `F` means
//! attraction and `F = −∂E/∂L`.
//!
//! The real-frequency form of the same integral, with `coth(βω/2)` and an
//! oscillating `e^{2ik_zL}`, is rotated onto `ω = iξ` where every factor is
//! real and smooth; residues of `coth` at `ω = iξ_n` give the Matsubara sum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};
use crate::fresnel::{reflection_static, vacuum_decay, ImagResponse, Mirror, Polarization};
use crate::quadrature::{integrate_to_infinity, QuadTolerance};

/// Smallest accepted gap, `10⁻⁶ Λ` in natural units.
pub const MIN_SEPARATION: f64 = 2.0 * PI * 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Gap `L` in units of `c/Ω`.
    pub separation: f64,
    /// Temperature in units of `ħΩ/k_B`.
    pub temperature: f64,
    pub mirror1: Mirror,
    pub mirror2: Mirror,
}

impl CavityConfig {
    pub fn new(separation: f64, temperature: f64, mirror1: Mirror, mirror2: Mirror) -> Result<Self> {
        let cfg = Self {
            separation,
            temperature,
            mirror1,
            mirror2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.separation >= MIN_SEPARATION && self.separation.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "separation must be finite and at least {MIN_SEPARATION:e}, got {}",
                self.separation
            )));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "temperature must be finite and non-negative, got {}",
                self.temperature
            )));
        }
        self.mirror1.validate()?;
        self.mirror2.validate()
    }

    pub fn with_separation(&self, separation: f64) -> Self {
        Self {
            separation,
            ..self.clone()
        }
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        Self {
            temperature,
            ..self.clone()
        }
    }

    /// Both mirrors with ε and μ exchanged (TE ↔ TM relabelling).
    pub fn swapped(&self) -> Self {
        Self {
            mirror1: self.mirror1.swapped(),
            mirror2: self.mirror2.swapped(),
            ..self.clone()
        }
    }

    /// Frequencies used to seed quadrature partitions.
    fn frequency_breaks(&self) -> Vec<f64> {
        let mut v = self.mirror1.characteristic_frequencies();
        v.extend(self.mirror2.characteristic_frequencies());
        v.push(0.5 / self.separation);
        v.retain(|w| *w > 0.0 && w.is_finite());
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// How the Matsubara sum is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatsubaraCutoff {
    /// Stop once a geometric bound on the remaining terms, built from the
    /// `e^{−2ξ_n L}` envelope, drops below the tolerance.
    GeometricTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub max_subdivisions: usize,
    pub matsubara_cutoff: MatsubaraCutoff,
    pub max_matsubara_terms: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-6,
            max_subdivisions: 2000,
            matsubara_cutoff: MatsubaraCutoff::GeometricTail,
            max_matsubara_terms: 200_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(relative_tolerance: f64) -> Self {
        Self {
            relative_tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance <= 1e-2) {
            return Err(CasimirError::InvalidParameter(format!(
                "relative tolerance must lie in (0, 1e-2], got {}",
                self.relative_tolerance
            )));
        }
        if self.max_subdivisions == 0 || self.max_matsubara_terms == 0 {
            return Err(CasimirError::InvalidParameter(
                "subdivision and Matsubara budgets must be positive".into(),
            ));
        }
        Ok(())
    }

    fn outer(&self) -> QuadTolerance {
        QuadTolerance::relative(self.relative_tolerance).with_max_subdivisions(self.max_subdivisions)
    }

    fn inner(&self) -> QuadTolerance {
        QuadTolerance::relative(0.1 * self.relative_tolerance)
            .with_max_subdivisions(self.max_subdivisions)
    }
}

/// Pressure in units of `ħΩ (Ω/c)³`; positive is attractive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureResult {
    pub pressure: f64,
    pub estimated_error: f64,
    /// Number of Matsubara terms summed (finite temperature only).
    pub n_matsubara_terms: Option<usize>,
}

/// Energy per unit area in units of `ħΩ (Ω/c)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub energy: f64,
    pub estimated_error: f64,
}

/// Reflection products `r₁r₂` for (TE, TM) at one frequency.
#[derive(Debug, Clone, Copy)]
struct Responses {
    m1: ImagResponse,
    m2: ImagResponse,
}

enum FrequencyRow {
    Imag(f64, Responses),
    Static,
}

impl FrequencyRow {
    fn at(cfg: &CavityConfig, xi: f64) -> Result<Self> {
        if xi == 0.0 {
            return Ok(Self::Static);
        }
        Ok(Self::Imag(
            xi,
            Responses {
                m1: cfg.mirror1.at_imag(xi)?,
                m2: cfg.mirror2.at_imag(xi)?,
            },
        ))
    }

    fn xi(&self) -> f64 {
        match self {
            Self::Imag(xi, _) => *xi,
            Self::Static => 0.0,
        }
    }

    fn product(&self, cfg: &CavityConfig, pol: Polarization, k: f64) -> Result<f64> {
        match self {
            Self::Imag(xi, r) => Ok(r.m1.reflection(pol, *xi, k) * r.m2.reflection(pol, *xi, k)),
            Self::Static => Ok(reflection_static(&cfg.mirror1, pol, k)? * reflection_static(&cfg.mirror2, pol, k)?),
        }
    }
}

/// `g = r₁ r₂ e^{−2qL}` at `ω = iξ`; `ξ = 0` uses the static limits.
pub fn roundtrip_factor(cfg: &CavityConfig, xi: f64, k: f64, pol: Polarization) -> Result<f64> {
    if !(xi >= 0.0) || !(k >= 0.0) {
        return Err(CasimirError::InvalidParameter(format!(
            "roundtrip factor needs xi >= 0 and k >= 0, got xi = {xi}, k = {k}"
        )));
    }
    let row = FrequencyRow::at(cfg, xi)?;
    let q = vacuum_decay(xi, k);
    let g = row.product(cfg, pol, k)? * (-2.0 * q * cfg.separation).exp();
    check_passive(g, xi, k)?;
    Ok(g)
}

fn check_passive(g: f64, xi: f64, k: f64) -> Result<()> {
    // exp(−2qL) → 1 only at q = 0, where the r's of perfect mirrors are ±1
    if g.abs() >= 1.0 && !(xi == 0.0 && k == 0.0) {
        return Err(CasimirError::NonPassive { magnitude: g.abs(), xi, k });
    }
    Ok(())
}

/// `1 − rr e^{−x}` without cancellation when `rr → 1`, `x → 0`.
fn one_minus_g(rr: f64, x: f64) -> f64 {
    (1.0 - rr) - rr * (-x).exp_m1()
}

/// What is integrated over the transverse wavenumber.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Kernel {
    /// `q² Σ g/(1−g)` per `dq` (pressure).
    Pressure,
    /// `q Σ ln(1−g)` per `dq` (energy).
    Energy,
}

/// `∫_ξ^∞ dq (kernel)`, i.e. `∫₀^∞ dk k (…)` rewritten with `k dk = q dq`, in
/// the variable `x = 2qL`.
fn wavenumber_integral(cfg: &CavityConfig, row: &FrequencyRow, kernel: Kernel, tol: QuadTolerance) -> Result<(f64, f64)> {
    let l = cfg.separation;
    let xi = row.xi();
    let mut failure: Option<CasimirError> = None;
    let breaks: Vec<f64> = cfg.frequency_breaks().iter().map(|w| 2.0 * l * w).collect();
    let start = 2.0 * xi * l;
    let f = |x: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        let q = x / (2.0 * l);
        let k = (q * q - xi * xi).max(0.0).sqrt();
        let mut acc = 0.0;
        for pol in Polarization::BOTH {
            let rr = match row.product(cfg, pol, k) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return 0.0;
                }
            };
            if rr == 0.0 {
                continue;
            }
            let g = rr * (-x).exp();
            if let Err(e) = check_passive(g, xi, k) {
                failure = Some(e);
                return 0.0;
            }
            let d = one_minus_g(rr, x);
            acc += match kernel {
                Kernel::Pressure => g / d,
                Kernel::Energy => {
                    if g.abs() < 0.5 {
                        (-g).ln_1p()
                    } else {
                        d.ln()
                    }
                }
            };
        }
        let weight = match kernel {
            Kernel::Pressure => q * q,
            Kernel::Energy => q,
        };
        weight * acc / (2.0 * l)
    };
    let est = integrate_to_infinity(f, start, 2.0, &breaks, tol);
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    Ok((est.value, est.error))
}

/// `∫₀^∞ dξ ∫ dq (kernel)` with the inner error folded into the outer estimate.
fn frequency_integral(cfg: &CavityConfig, spec: &QuadratureSpec, kernel: Kernel) -> Result<(f64, f64)> {
    let mut failure: Option<CasimirError> = None;
    let mut inner_error = 0.0;
    let breaks = cfg.frequency_breaks();
    let scale = 0.5 / cfg.separation;
    let est = integrate_to_infinity(
        |xi| {
            if failure.is_some() || xi <= 0.0 {
                return 0.0;
            }
            let row = match FrequencyRow::at(cfg, xi) {
                Ok(r) => r,
                Err(e) => {
                    failure = Some(e);
                    return 0.0;
                }
            };
            match wavenumber_integral(cfg, &row, kernel, spec.inner()) {
                Ok((v, e)) => {
                    inner_error = f64::max(inner_error, e / v.abs().max(f64::MIN_POSITIVE));
                    v
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        0.0,
        scale,
        &breaks,
        spec.outer(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    Ok((est.value, est.error + inner_error * est.value.abs()))
}

fn require_temperature(cfg: &CavityConfig, zero: bool) -> Result<()> {
    if zero && cfg.temperature != 0.0 {
        return Err(CasimirError::InvalidParameter(format!(
            "zero-temperature routine called with T = {}",
            cfg.temperature
        )));
    }
    if !zero && cfg.temperature <= 0.0 {
        return Err(CasimirError::InvalidParameter(
            "finite-temperature routine needs T > 0".into(),
        ));
    }
    Ok(())
}

/// Pressure at `T = 0`.
pub fn pressure_zero_t(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<PressureResult> {
    cfg.validate()?;
    spec.validate()?;
    require_temperature(cfg, true)?;
    let (v, e) = frequency_integral(cfg, spec, Kernel::Pressure)?;
    let norm = 1.0 / (2.0 * PI * PI);
    Ok(PressureResult {
        pressure: norm * v,
        estimated_error: norm * e,
        n_matsubara_terms: None,
    })
}

/// Energy per unit area at `T = 0`.
pub fn energy_zero_t(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<EnergyResult> {
    cfg.validate()?;
    spec.validate()?;
    require_temperature(cfg, true)?;
    let (v, e) = frequency_integral(cfg, spec, Kernel::Energy)?;
    let norm = 1.0 / (4.0 * PI * PI);
    Ok(EnergyResult {
        energy: norm * v,
        estimated_error: norm * e,
    })
}

/// Pressure at `T > 0` from the Matsubara sum.
pub fn pressure_finite_t(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<PressureResult> {
    cfg.validate()?;
    spec.validate()?;
    require_temperature(cfg, false)?;
    let t = cfg.temperature;
    let l = cfg.separation;
    let step = 2.0 * PI * t;
    // per-term decay of the e^{−2ξ_n L} envelope
    let envelope = (-2.0 * step * l).exp();

    let (first, mut error) = wavenumber_integral(cfg, &FrequencyRow::Static, Kernel::Pressure, spec.inner())?;
    let mut sum = 0.5 * first;
    error *= 0.5;
    let mut n = 0usize;
    loop {
        n += 1;
        if n > spec.max_matsubara_terms {
            return Err(CasimirError::MatsubaraNotConverged {
                terms: n - 1,
                last_term: sum,
            });
        }
        let xi = step * n as f64;
        let row = FrequencyRow::at(cfg, xi)?;
        let (term, term_err) = wavenumber_integral(cfg, &row, Kernel::Pressure, spec.inner())?;
        sum += term;
        error += term_err;
        // terms behave as (ξ + 1/2L)² e^{−2ξL}; successive ratios only shrink
        let h = 0.5 / l;
        let ratio = envelope * ((xi + step + h) / (xi + h)).powi(2);
        if ratio < 1.0 {
            let tail = term.abs() * ratio / (1.0 - ratio);
            if tail <= 0.1 * spec.relative_tolerance * sum.abs() || (sum == 0.0 && term == 0.0) {
                error += tail;
                break;
            }
        }
    }
    let norm = t / PI;
    Ok(PressureResult {
        pressure: norm * sum,
        estimated_error: norm * error,
        n_matsubara_terms: Some(n + 1),
    })
}

/// Dispatches on the temperature.
pub fn pressure(cfg: &CavityConfig, spec: &QuadratureSpec) -> Result<PressureResult> {
    if cfg.temperature == 0.0 {
        pressure_zero_t(cfg, spec)
    } else {
        pressure_finite_t(cfg, spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::DrudeParams;
    use crate::units::{ideal_energy, ideal_pressure, ZETA_3};

    fn pec_pair(l: f64, t: f64) -> CavityConfig {
        CavityConfig::new(l, t, Mirror::perfect_electric(), Mirror::perfect_electric()).unwrap()
    }

    #[test]
    fn roundtrip_examples() {
        let vac = CavityConfig::new(1.0, 0.0, Mirror::vacuum(), Mirror::vacuum()).unwrap();
        assert_eq!(roundtrip_factor(&vac, 0.5, 0.5, Polarization::TM).unwrap(), 0.0);
        // qL = ln 2 with r₁r₂ = 1
        let l = 1.0;
        let q = 2f64.ln() / l;
        let g = roundtrip_factor(&pec_pair(l, 0.0), q * 0.6, q * 0.8, Polarization::TE).unwrap();
        assert!((g - 0.25).abs() < 1e-15);
        let far = pec_pair(1e6, 0.0);
        assert!(roundtrip_factor(&far, 0.3, 0.4, Polarization::TM).unwrap() < 1e-300);
    }

    #[test]
    fn rejects_bad_configurations() {
        assert!(CavityConfig::new(0.0, 0.0, Mirror::vacuum(), Mirror::vacuum()).is_err());
        assert!(CavityConfig::new(1e-7, 0.0, Mirror::vacuum(), Mirror::vacuum()).is_err());
        assert!(CavityConfig::new(1.0, -1.0, Mirror::vacuum(), Mirror::vacuum()).is_err());
        let spec = QuadratureSpec::with_tolerance(0.5);
        assert!(pressure_zero_t(&pec_pair(1.0, 0.0), &spec).is_err());
        assert!(pressure_zero_t(&pec_pair(1.0, 0.1), &QuadratureSpec::default()).is_err());
        assert!(pressure_finite_t(&pec_pair(1.0, 0.0), &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn passivity_guard() {
        assert!(check_passive(1.0, 0.1, 0.1).is_err());
        assert!(check_passive(-1.2, 0.1, 0.1).is_err());
        assert!(check_passive(0.999, 0.1, 0.1).is_ok());
        assert!(check_passive(1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn ideal_plates() {
        let spec = QuadratureSpec::with_tolerance(1e-7);
        for l in [0.3, 1.0, 4.0] {
            let p = pressure_zero_t(&pec_pair(l, 0.0), &spec).unwrap();
            assert!((p.pressure / ideal_pressure(l) - 1.0).abs() < 1e-6, "{l}: {p:?}");
            let e = energy_zero_t(&pec_pair(l, 0.0), &spec).unwrap();
            assert!((e.energy / ideal_energy(l) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn high_temperature_ideal_limit() {
        let l = 1.0;
        let t = 5.0;
        let p = pressure_finite_t(&pec_pair(l, t), &QuadratureSpec::with_tolerance(1e-8)).unwrap();
        let lim = t * ZETA_3 / (4.0 * PI * l.powi(3));
        assert!((p.pressure / lim - 1.0).abs() < 1e-2);
    }

    #[test]
    fn drude_zero_mode_has_no_te_part() {
        let m = Mirror::drude(DrudeParams::new(1.0, 0.05).unwrap());
        let cfg = CavityConfig::new(1.0, 0.1, m.clone(), m).unwrap();
        assert_eq!(roundtrip_factor(&cfg, 0.0, 0.7, Polarization::TE).unwrap(), 0.0);
        let tm = roundtrip_factor(&cfg, 0.0, 0.7, Polarization::TM).unwrap();
        assert!((tm - (-1.4f64).exp()).abs() < 1e-15);
    }
}
