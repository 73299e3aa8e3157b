//! Material response functions ε and μ on the imaginary axis and at complex
//! frequency, plus the Kramers–Kronig rotation of real-axis absorption.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};
use crate::quadrature::{integrate_to_infinity, Estimate, QuadTolerance};

/// Lossy Drude permittivity `ε(ω) = 1 − ω_p²/(ω² + iγω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeParams {
    pub plasma_frequency: f64,
    pub damping: f64,
}

impl DrudeParams {
    pub fn new(plasma_frequency: f64, damping: f64) -> Result<Self> {
        let p = Self {
            plasma_frequency,
            damping,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn lossless(plasma_frequency: f64) -> Result<Self> {
        Self::new(plasma_frequency, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.plasma_frequency > 0.0 && self.plasma_frequency.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "plasma frequency must be positive, got {}",
                self.plasma_frequency
            )));
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "Drude damping must be non-negative, got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

/// Metamaterial permeability `μ(ω) = 1 + f ω²/(ω₀² − ω² − iκω)` with
/// filling factor `0 < f < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetamaterialMuParams {
    pub oscillator_strength: f64,
    pub resonance: f64,
    pub magnetic_damping: f64,
}

impl MetamaterialMuParams {
    pub fn new(oscillator_strength: f64, resonance: f64, magnetic_damping: f64) -> Result<Self> {
        let p = Self {
            oscillator_strength,
            resonance,
            magnetic_damping,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.oscillator_strength > 0.0 && self.oscillator_strength < 1.0) {
            return Err(CasimirError::InvalidParameter(format!(
                "oscillator strength must lie in (0, 1), got {}",
                self.oscillator_strength
            )));
        }
        if !(self.resonance > 0.0 && self.resonance.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "magnetic resonance must be positive, got {}",
                self.resonance
            )));
        }
        if !(self.magnetic_damping >= 0.0 && self.magnetic_damping.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "magnetic damping must be non-negative, got {}",
                self.magnetic_damping
            )));
        }
        Ok(())
    }

    /// `ω₀ √f`, the scale of the rotated permeability.
    pub fn magnetic_plasma_frequency(&self) -> f64 {
        self.resonance * self.oscillator_strength.sqrt()
    }
}

/// One Lorentz term `s ω_j²/(ω_j² − ω² − iγ_j ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzOscillator {
    pub strength: f64,
    pub resonance: f64,
    pub damping: f64,
}

/// Drude term plus Lorentz oscillators, continued to complex frequency
/// by direct substitution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrudeLorentzParams {
    #[serde(default)]
    pub drude: Option<DrudeParams>,
    #[serde(default)]
    pub oscillators: Vec<LorentzOscillator>,
}

impl DrudeLorentzParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(d) = &self.drude {
            d.validate()?;
        }
        for o in &self.oscillators {
            if !(o.strength >= 0.0 && o.resonance > 0.0 && o.damping >= 0.0) {
                return Err(CasimirError::InvalidParameter(format!(
                    "Lorentz oscillator needs strength >= 0, resonance > 0, damping >= 0: {o:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Absorption spectrum `Im χ(ω)` sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct TabulatedAbsorption {
    samples: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for TabulatedAbsorption {
    type Error = CasimirError;

    fn try_from(samples: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(samples)
    }
}

impl From<TabulatedAbsorption> for Vec<(f64, f64)> {
    fn from(t: TabulatedAbsorption) -> Self {
        t.samples
    }
}

impl TabulatedAbsorption {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CasimirError::InvalidTable("table is empty".into()));
        }
        for (i, &(w, im)) in samples.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(CasimirError::InvalidTable(format!(
                    "row {i}: frequency must be positive and finite, got {w}"
                )));
            }
            if !(im >= 0.0 && im.is_finite()) {
                return Err(CasimirError::InvalidTable(format!(
                    "row {i}: absorption must be non-negative (passivity), got {im}"
                )));
            }
            if i > 0 && w <= samples[i - 1].0 {
                return Err(CasimirError::InvalidTable(format!(
                    "row {i}: frequencies must be strictly increasing ({} then {w})",
                    samples[i - 1].0
                )));
            }
        }
        Ok(Self { samples })
    }

    /// Samples `absorption` on `grid` (which must be valid table frequencies).
    pub fn sample<F: Fn(f64) -> f64>(grid: &[f64], absorption: F) -> Result<Self> {
        Self::new(grid.iter().map(|&w| (w, absorption(w))).collect())
    }

    /// Parses whitespace-delimited `ω Im χ` rows; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let mut next = |what: &str| -> Result<f64> {
                let tok = cols.next().ok_or_else(|| {
                    CasimirError::InvalidTable(format!("line {}: missing {what}", lineno + 1))
                })?;
                tok.parse::<f64>().map_err(|e| {
                    CasimirError::InvalidTable(format!("line {}: bad {what} `{tok}`: {e}", lineno + 1))
                })
            };
            let w = next("frequency")?;
            let im = next("absorption")?;
            if cols.next().is_some() {
                return Err(CasimirError::InvalidTable(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            }
            samples.push((w, im));
        }
        Self::new(samples)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Coefficient `C` of the `C/ω³` tail, least-squares fitted to the last
    /// decade of samples.
    pub fn tail_coefficient(&self) -> f64 {
        let last = self.samples[self.samples.len() - 1].0;
        let (num, den) = self
            .samples
            .iter()
            .filter(|(w, _)| *w >= 0.1 * last)
            .fold((0.0, 0.0), |(n, d), &(w, y)| {
                let b = w.powi(-3);
                (n + y * b, d + b * b)
            });
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

/// Result of a tabulated Kramers–Kronig rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KkEstimate {
    pub value: f64,
    /// Part of `value − 1` contributed by the extrapolated `C/ω³` tail.
    pub tail: f64,
}

/// Models a half-space's ε or μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseModel {
    Vacuum,
    /// Frequency-independent value.
    Constant { value: f64 },
    /// Infinite response (perfect electric or magnetic conductor).
    Perfect,
    DrudeEpsilon(DrudeParams),
    /// Metamaterial permeability rotated to the imaginary axis in the
    /// weak-absorption limit.
    MetamaterialMuKk(MetamaterialMuParams),
    DrudeLorentzDirect(DrudeLorentzParams),
    TabulatedKk { table: TabulatedAbsorption },
}

/// Value of a response function as `ξ → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticLimit {
    /// `lim χ(iξ)`, possibly `+∞`.
    pub value: f64,
    /// `lim ξ² χ(iξ)`, relevant only when `value` is infinite.
    pub xi2_value: f64,
}

impl ResponseModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Vacuum => "vacuum",
            Self::Constant { .. } => "constant",
            Self::Perfect => "perfect",
            Self::DrudeEpsilon(_) => "drude_epsilon",
            Self::MetamaterialMuKk(_) => "metamaterial_mu_kk",
            Self::DrudeLorentzDirect(_) => "drude_lorentz_direct",
            Self::TabulatedKk { .. } => "tabulated_kk",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Vacuum | Self::Perfect | Self::TabulatedKk { .. } => Ok(()),
            Self::Constant { value } => {
                if *value > 0.0 && value.is_finite() {
                    Ok(())
                } else {
                    Err(CasimirError::InvalidParameter(format!(
                        "constant response must be positive and finite, got {value}"
                    )))
                }
            }
            Self::DrudeEpsilon(p) => p.validate(),
            Self::MetamaterialMuKk(p) => p.validate(),
            Self::DrudeLorentzDirect(p) => p.validate(),
        }
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self, Self::Perfect)
    }

    /// `χ(iξ)` for `ξ > 0`; `+∞` for [`ResponseModel::Perfect`].
    pub fn imag_axis(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0) {
            return Err(CasimirError::InvalidParameter(format!(
                "imaginary-axis evaluation needs xi > 0, got {xi}"
            )));
        }
        Ok(match self {
            Self::Vacuum => 1.0,
            Self::Constant { value } => *value,
            Self::Perfect => f64::INFINITY,
            Self::DrudeEpsilon(p) => drude_epsilon_imag(p, xi)?,
            Self::MetamaterialMuKk(p) => metamaterial_mu_imag(p, xi)?,
            Self::DrudeLorentzDirect(p) => drude_lorentz_imag(p, xi),
            Self::TabulatedKk { table } => kk_rotate(table, xi)?,
        })
    }

    /// The `ξ → 0⁺` limit used for the zero Matsubara term.
    pub fn static_limit(&self) -> StaticLimit {
        let finite = |value| StaticLimit {
            value,
            xi2_value: 0.0,
        };
        match self {
            Self::Vacuum => finite(1.0),
            Self::Constant { value } => finite(*value),
            Self::Perfect => StaticLimit {
                value: f64::INFINITY,
                xi2_value: f64::INFINITY,
            },
            Self::DrudeEpsilon(p) => drude_static(Some(p), 1.0),
            Self::MetamaterialMuKk(p) => finite(1.0 + p.oscillator_strength),
            Self::DrudeLorentzDirect(p) => {
                let lorentz: f64 = p.oscillators.iter().map(|o| o.strength).sum();
                drude_static(p.drude.as_ref(), 1.0 + lorentz)
            }
            Self::TabulatedKk { table } => {
                let value = kk_rotate(table, 0.0).unwrap_or(f64::INFINITY);
                finite(value)
            }
        }
    }

    /// `χ(ω)` at complex frequency.
    pub fn complex(&self, omega: Complex64) -> Result<Complex64> {
        match self {
            Self::Vacuum => Ok(Complex64::new(1.0, 0.0)),
            Self::Constant { value } => Ok(Complex64::new(*value, 0.0)),
            Self::Perfect => Err(CasimirError::ModelEvaluation {
                model: self.name(),
                at: format!("{omega}"),
                reason: "infinite response has no finite value".into(),
            }),
            Self::DrudeEpsilon(p) => drude_epsilon_complex(p, omega),
            Self::MetamaterialMuKk(p) => {
                let w0 = p.resonance;
                let den = w0 * w0 - omega * omega - Complex64::i() * p.magnetic_damping * omega;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(pole_error(self.name(), omega));
                }
                Ok(1.0 + p.oscillator_strength * w0 * w0 / den)
            }
            Self::DrudeLorentzDirect(p) => drude_lorentz_complex(p, omega),
            Self::TabulatedKk { .. } => Err(CasimirError::ModelEvaluation {
                model: self.name(),
                at: format!("{omega}"),
                reason: "tabulated data is only available on the imaginary axis".into(),
            }),
        }
    }

    /// Exact `Im χ(ω)` on the real axis, where the model has a closed form.
    pub fn absorption(&self, omega: f64) -> Option<f64> {
        match self {
            Self::Vacuum | Self::Constant { .. } => Some(0.0),
            Self::DrudeEpsilon(p) => Some(drude_absorption(p, omega)),
            Self::MetamaterialMuKk(p) => Some(metamaterial_mu_absorption(p, omega)),
            Self::DrudeLorentzDirect(p) => Some(
                p.drude.as_ref().map_or(0.0, |d| drude_absorption(d, omega))
                    + p.oscillators
                        .iter()
                        .map(|o| lorentz_absorption(o, omega))
                        .sum::<f64>(),
            ),
            Self::Perfect | Self::TabulatedKk { .. } => None,
        }
    }

    /// Frequencies where the response changes character; used to seed
    /// quadrature partitions.
    pub fn characteristic_frequencies(&self) -> Vec<f64> {
        match self {
            Self::DrudeEpsilon(p) => drude_scales(p),
            Self::MetamaterialMuKk(p) => vec![p.resonance, p.magnetic_plasma_frequency()],
            Self::DrudeLorentzDirect(p) => {
                let mut v = p.drude.as_ref().map(drude_scales).unwrap_or_default();
                v.extend(p.oscillators.iter().map(|o| o.resonance));
                v
            }
            Self::TabulatedKk { table } => {
                let s = table.samples();
                let peak = s
                    .iter()
                    .max_by(|a, b| (a.0 * a.1).total_cmp(&(b.0 * b.1)))
                    .map(|p| p.0);
                peak.into_iter().collect()
            }
            _ => Vec::new(),
        }
    }
}

fn drude_scales(p: &DrudeParams) -> Vec<f64> {
    let mut v = vec![p.plasma_frequency];
    if p.damping > 0.0 {
        v.push(p.damping);
    }
    v
}

fn drude_static(drude: Option<&DrudeParams>, rest: f64) -> StaticLimit {
    match drude {
        None => StaticLimit {
            value: rest,
            xi2_value: 0.0,
        },
        Some(p) => StaticLimit {
            value: f64::INFINITY,
            // ξ² ω_p²/(ξ(ξ+γ)) → ω_p² only without damping
            xi2_value: if p.damping > 0.0 {
                0.0
            } else {
                p.plasma_frequency.powi(2)
            },
        },
    }
}

fn pole_error(model: &'static str, omega: Complex64) -> CasimirError {
    CasimirError::ModelEvaluation {
        model,
        at: format!("{omega}"),
        reason: "pole of the response function".into(),
    }
}

/// `ε(iξ) = 1 + ω_p²/(ξ(ξ+γ))`.
pub fn drude_epsilon_imag(p: &DrudeParams, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(CasimirError::InvalidParameter(format!(
            "Drude permittivity diverges at xi = {xi}; the zero-frequency term is handled by the caller"
        )));
    }
    Ok(1.0 + p.plasma_frequency.powi(2) / (xi * (xi + p.damping)))
}

/// `ε(ω) = 1 − ω_p²/(ω² + iγω)` at complex `ω`.
pub fn drude_epsilon_complex(p: &DrudeParams, omega: Complex64) -> Result<Complex64> {
    let den = omega * (omega + Complex64::i() * p.damping);
    if den.norm() == 0.0 {
        return Err(pole_error("drude_epsilon", omega));
    }
    Ok(1.0 - p.plasma_frequency.powi(2) / den)
}

/// `Im ε(ω)` of the Drude model on the positive real axis.
pub fn drude_absorption(p: &DrudeParams, omega: f64) -> f64 {
    let g = p.damping;
    p.plasma_frequency.powi(2) * g / (omega * (omega * omega + g * g))
}

/// Imaginary-axis permeability `1 + f ω₀²/(ω₀² + ξ²)` obtained by rotating
/// the metamaterial absorption in the weak-damping limit.
pub fn metamaterial_mu_imag(p: &MetamaterialMuParams, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(CasimirError::InvalidParameter(format!(
            "metamaterial permeability needs xi >= 0, got {xi}"
        )));
    }
    let w0sq = p.resonance * p.resonance;
    Ok(1.0 + p.oscillator_strength * w0sq / (w0sq + xi * xi))
}

/// Direct substitution `ω → iξ` in the metamaterial permeability:
/// `1 − f ξ²/(ω₀² + ξ² + κξ)`. Diagnostic only; it is not the rotated form.
pub fn metamaterial_mu_direct_imag(p: &MetamaterialMuParams, xi: f64) -> f64 {
    let w0sq = p.resonance * p.resonance;
    1.0 - p.oscillator_strength * xi * xi / (w0sq + xi * xi + p.magnetic_damping * xi)
}

/// `Im μ(ω)` of the metamaterial permeability on the real axis.
pub fn metamaterial_mu_absorption(p: &MetamaterialMuParams, omega: f64) -> f64 {
    let w0sq = p.resonance * p.resonance;
    let k = p.magnetic_damping;
    let d = w0sq - omega * omega;
    p.oscillator_strength * omega * omega * k * omega / (d * d + k * k * omega * omega)
}

fn lorentz_absorption(o: &LorentzOscillator, omega: f64) -> f64 {
    let d = o.resonance.powi(2) - omega * omega;
    o.strength * o.resonance.powi(2) * o.damping * omega / (d * d + (o.damping * omega).powi(2))
}

fn drude_lorentz_imag(p: &DrudeLorentzParams, xi: f64) -> f64 {
    let drude = p.drude.as_ref().map_or(0.0, |d| {
        d.plasma_frequency.powi(2) / (xi * (xi + d.damping))
    });
    let lorentz: f64 = p
        .oscillators
        .iter()
        .map(|o| {
            let w2 = o.resonance.powi(2);
            o.strength * w2 / (w2 + xi * xi + o.damping * xi)
        })
        .sum();
    1.0 + drude + lorentz
}

fn drude_lorentz_complex(p: &DrudeLorentzParams, omega: Complex64) -> Result<Complex64> {
    let mut eps = match &p.drude {
        Some(d) => drude_epsilon_complex(d, omega)?,
        None => Complex64::new(1.0, 0.0),
    };
    for o in &p.oscillators {
        let w2 = o.resonance.powi(2);
        let den = w2 - omega * omega - Complex64::i() * o.damping * omega;
        if den.norm() == 0.0 {
            return Err(pole_error("drude_lorentz_direct", omega));
        }
        eps += o.strength * w2 / den;
    }
    Ok(eps)
}

/// `1 + (2/π) ∫₀^∞ dω ω Im χ(ω)/(ω² + ξ²)` for tabulated absorption.
///
/// `ω Im χ` is interpolated linearly between samples and integrated against
/// the kernel in closed form; below the first sample it continues as an even
/// function `g₀ + bω²`, above the last sample `Im χ` continues as a fitted
/// `C/ω³`.
pub fn kk_rotate(table: &TabulatedAbsorption, xi: f64) -> Result<f64> {
    kk_rotate_detailed(table, xi).map(|e| e.value)
}

pub fn kk_rotate_detailed(table: &TabulatedAbsorption, xi: f64) -> Result<KkEstimate> {
    if !(xi >= 0.0) {
        return Err(CasimirError::InvalidParameter(format!(
            "Kramers-Kronig rotation needs xi >= 0, got {xi}"
        )));
    }
    let s = table.samples();
    let g = |i: usize| s[i].0 * s[i].1;

    // ω Im χ is even in ω: below the first sample continue it as g₀ + bω²
    // through the first two samples, with g₀ = 0 unless the data call for a
    // finite limit (a conductor, whose response diverges at ξ = 0)
    let (w1, g1) = (s[0].0, g(0));
    let g0 = if s.len() > 1 {
        let (w2, g2) = (s[1].0, g(1));
        let b = (g2 - g1) / (w2 * w2 - w1 * w1);
        (g1 - b * w1 * w1).clamp(0.0, g1)
    } else {
        0.0
    };
    let b = (g1 - g0) / (w1 * w1);
    let mut sum = if xi == 0.0 {
        if g0 > 0.0 {
            f64::INFINITY
        } else {
            b * w1
        }
    } else {
        let a = (w1 / xi).atan();
        g0 * a / xi + b * (w1 - xi * a)
    };

    for i in 1..s.len() {
        let (wa, wb) = (s[i - 1].0, s[i].0);
        let (ga, gb) = (g(i - 1), g(i));
        let slope = (gb - ga) / (wb - wa);
        let intercept = ga - slope * wa;
        let (i0, i1) = if xi == 0.0 {
            (1.0 / wa - 1.0 / wb, (wb / wa).ln())
        } else {
            // atan(b/ξ) − atan(a/ξ) without cancellation for a, b > 0
            let datan = (xi * (wb - wa) / (xi * xi + wa * wb)).atan();
            let dlog = ((wb - wa) * (wb + wa) / (wa * wa + xi * xi)).ln_1p();
            (datan / xi, 0.5 * dlog)
        };
        sum += intercept * i0 + slope * i1;
    }

    let last = s[s.len() - 1].0;
    let c = table.tail_coefficient();
    let t = xi / last;
    let tail_kernel = if t < 1e-3 {
        (1.0 / 3.0 - t * t / 5.0 + t.powi(4) / 7.0) / last.powi(3)
    } else {
        (1.0 - t.atan() / t) / (xi * xi * last)
    };
    let tail = 2.0 / PI * c * tail_kernel;
    Ok(KkEstimate {
        value: 1.0 + 2.0 / PI * sum + tail,
        tail,
    })
}

/// Kramers–Kronig rotation of an analytically known absorption, integrated
/// adaptively with the partition split at `ξ` and at `resonances`.
pub fn kk_rotate_fn<F>(absorption: F, xi: f64, resonances: &[f64], tol: QuadTolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if !(xi >= 0.0) {
        return Err(CasimirError::InvalidParameter(format!(
            "Kramers-Kronig rotation needs xi >= 0, got {xi}"
        )));
    }
    let mut breaks: Vec<f64> = resonances.to_vec();
    if xi > 0.0 {
        breaks.push(xi);
    }
    let scale = breaks.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let est = integrate_to_infinity(
        |w| {
            if w <= 0.0 {
                return 0.0;
            }
            w * absorption(w) / (w * w + xi * xi)
        },
        0.0,
        scale,
        &breaks,
        tol,
    )?;
    Ok(Estimate {
        value: 1.0 + 2.0 / PI * est.value,
        error: 2.0 / PI * est.error,
        evaluations: est.evaluations,
    })
}

/// Resonance-aware frequency grid for sampling absorption into a table:
/// a log grid over `[lo, hi]` merged with a linear grid resolving
/// `centre ± span` at the given `spacing`.
pub fn refined_grid(lo: f64, hi: f64, per_decade: usize, peaks: &[(f64, f64, f64)]) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).ceil() as usize;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect();
    for &(centre, span, spacing) in peaks {
        let m = (2.0 * span / spacing).ceil() as usize;
        grid.extend((0..=m).map(|i| centre - span + 2.0 * span * i as f64 / m as f64).filter(|w| *w > 0.0));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    grid
}
