//! Complex eigenfrequencies of the cavity and the mode-sum form of the energy.
//!
//! A mode is a zero of `N(ω) = 1 − r₁r₂ e^{2ik_zL}` with `k_z = i√(k² − ω²)`.
//! Roots are located with the argument principle applied to
//!
//! ```text
//! R(ω) = (d₁d₂ e^{−ik_zL} − n₁n₂ e^{ik_zL}) / k_z,     r_j = n_j/d_j
//! ```
//!
//! which has the same zeros as `N` but is even in `k_z` (no vacuum branch
//! cut) and free of the reflection poles.
//!
//! The energy per unit area and per transverse wavenumber is written as
//!
//! ```text
//! E_k = ½ Σ_n Re[ω_n − (2i/π) ω_n ln(ω_n/ω_c)] + B(ω_c)
//! ```
//!
//! where the sum runs over the modes with `0 < Re ω_n < ω_c` and the
//! background `B` is the spectral integral `−(1/2π) Im ∫ ω N'/N dω` with each
//! mode pair `1/(ω − ω_n) + 1/(ω + ω_n*)` taken out. The background is
//! integrated on a contour lifted off the real axis, where it is smooth. The
//! total is independent of `ω_c`; the split between the two pieces is not.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, Result};
use crate::fresnel::{reflection_complex_parts, vacuum_kz, Mirror, Polarization};
use crate::lifshitz::{CavityConfig, EnergyResult, PressureResult};
use crate::quadrature::{integrate_partitioned, integrate_to_infinity, QuadTolerance};
use crate::response::{DrudeParams, ResponseModel};
use crate::units::ZETA_3;

/// Coefficient of the lossless coupled-plasmon energy at short distance.
pub const PLASMON_ALPHA: f64 = 1.193;

/// Largest `ω_p L` for which the short-distance plasmon formula is trusted.
pub const SHORT_DISTANCE_LIMIT: f64 = 0.1;

/// Largest accepted imaginary part of a returned mode.
const GAIN_TOLERANCE: f64 = 1e-12;

/// Required `|D|` at a polished root.
const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Beyond `2kL` this large the cavity energy per `k` is below roundoff of
/// the mode and background terms and is set to zero.
const NEGLIGIBLE_EXPONENT: f64 = 60.0;

/// Relative size below which roots sharing a rectangle are not separated.
const CLUSTER_SIZE: f64 = 1e-7;

/// Split positions tried in turn when a dividing line passes too close to a root.
const SPLIT_RATIOS: [f64; 5] = [0.5137, 0.4681, 0.5531, 0.4229, 0.5903];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMode {
    pub omega: Complex64,
    pub k: f64,
    pub pol: Polarization,
    pub branch_index: usize,
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` searched for modes.
///
/// `im_max` sits slightly above the real axis so that lossless roots lie
/// strictly inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Initial samples per edge for the winding number.
    pub edge_samples: usize,
    /// Maximal bisection depth.
    pub max_depth: usize,
}

impl SearchRegion {
    pub fn new(re_max: f64, im_min: f64) -> Result<Self> {
        let r = Self {
            re_min: 1e-3 * re_max,
            re_max,
            im_min,
            im_max: 1e-3 * re_max,
            edge_samples: 32,
            max_depth: 60,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn with_re_min(mut self, re_min: f64) -> Self {
        self.re_min = re_min;
        self
    }

    pub fn with_im_max(mut self, im_max: f64) -> Self {
        self.im_max = im_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.re_min > 0.0
            && self.re_max > self.re_min
            && self.re_max.is_finite()
            && self.im_min <= 0.0
            && self.im_max > 0.0
            && self.im_max > self.im_min
            && self.im_min.is_finite()
            && self.im_max.is_finite()
            && self.edge_samples >= 4
            && self.max_depth >= 1;
        if ok {
            Ok(())
        } else {
            Err(CasimirError::InvalidParameter(format!(
                "bad search region {self:?}"
            )))
        }
    }
}

/// Cutoff frequency of the mode sum, with an optional self-check at a second
/// cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub omega_c: f64,
    /// Relative tolerance of the background quadrature.
    pub tolerance: f64,
    /// If set, the energy is recomputed at `factor · ω_c` and the two must
    /// agree within `tolerance_check`.
    pub verify_factor: Option<f64>,
    pub tolerance_check: f64,
}

impl CutoffSpec {
    pub fn new(omega_c: f64) -> Result<Self> {
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(CasimirError::InvalidParameter(format!(
                "cutoff must be positive, got {omega_c}"
            )));
        }
        Ok(Self {
            omega_c,
            tolerance: 1e-10,
            verify_factor: None,
            tolerance_check: 1e-6,
        })
    }

    pub fn verified(mut self, factor: f64, tolerance: f64) -> Self {
        self.verify_factor = Some(factor);
        self.tolerance_check = tolerance;
        self
    }
}

/// Separation whose energy is subtracted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Reference {
    /// Mirrors at infinite distance. The contour form vanishes there exactly.
    Decoupled,
    /// A finite reference gap.
    Finite(f64),
}

impl Reference {
    /// `max(20 L, 50/k)`.
    pub fn far(separation: f64, k: f64) -> Self {
        Self::Finite((20.0 * separation).max(50.0 / k))
    }
}

/// Mode-sum energy per unit area at fixed `k`, summed over polarizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSumEnergy {
    pub energy: f64,
    /// `½ Σ Re[ω_n − (2i/π) ω_n ln(ω_n/ω_c)]` over retained modes.
    pub discrete: f64,
    /// The logarithmic part of `discrete` alone.
    pub log_term: f64,
    pub background: f64,
    pub estimated_error: f64,
    pub omega_c: f64,
    pub modes: Vec<ComplexMode>,
}

/// `D(ω) = e^{−2ik_zL}/(r₁r₂) − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionResidual {
    pub value: Complex64,
    /// Set when `r₁r₂ = 0`; `value` is then infinite.
    pub reflection_vanishes: bool,
}

/// The two coupled surface-plasmon frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmonPair {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl PlasmonPair {
    /// `ω_−` has no positive real part; it is returned as given by the
    /// closed form but does not correspond to an oscillating mode.
    pub fn minus_overdamped(&self) -> bool {
        self.minus.re <= 0.0
    }
}

/// Cavity at fixed `(k, pol)`.
struct Cavity<'a> {
    cfg: &'a CavityConfig,
    pol: Polarization,
    k: f64,
    /// Constant `s` in the factor `e^{−sL}` keeping `R` in range.
    shift: f64,
}

impl<'a> Cavity<'a> {
    fn new(cfg: &'a CavityConfig, pol: Polarization, k: f64) -> Self {
        Self {
            cfg,
            pol,
            k,
            shift: k,
        }
    }

    fn length(&self) -> f64 {
        self.cfg.separation
    }

    /// `(n₁n₂, d₁d₂, k_z)`.
    fn parts(&self, w: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let (n1, d1) = reflection_complex_parts(&self.cfg.mirror1, self.pol, w, self.k)?;
        let (n2, d2) = reflection_complex_parts(&self.cfg.mirror2, self.pol, w, self.k)?;
        Ok((n1 * n2, d1 * d2, vacuum_kz(w, self.k)))
    }

    /// `|R|` relative to the size of its two terms; roundoff level at a root.
    fn even_relative(&self, w: Complex64) -> Result<f64> {
        let (n1, d1) = reflection_complex_parts(&self.cfg.mirror1, self.pol, w, self.k)?;
        let (n2, d2) = reflection_complex_parts(&self.cfg.mirror2, self.pol, w, self.k)?;
        let ikl = Complex64::i() * vacuum_kz(w, self.k) * self.length();
        let s = self.shift * self.length();
        let (a, b) = ((-ikl - s).exp(), (ikl - s).exp());
        let size = (n1.norm() + d1.norm()) * (n2.norm() + d2.norm()) * (a.norm() + b.norm());
        Ok((d1 * d2 * a - n1 * n2 * b).norm() / size)
    }

    /// `R(ω) e^{−sL}`.
    fn even(&self, w: Complex64) -> Result<Complex64> {
        let (n, d, kz) = self.parts(w)?;
        let scale = 1e-9 * (self.k + w.norm());
        if kz.norm() < scale {
            // removable point k_z = 0; step off it
            return self.even(w + Complex64::new(0.0, 4.0 * scale));
        }
        let l = self.length();
        let ikl = Complex64::i() * kz * l;
        let s = self.shift * l;
        let value = (d * (-ikl - s).exp() - n * (ikl - s).exp()) / kz;
        finite(value, "mode function", w)
    }

    /// `ln N(ω)` on the principal branch, for `ω` in the upper half-plane.
    fn log_n(&self, w: Complex64) -> Result<Complex64> {
        let (n, d, kz) = self.parts(w)?;
        let g = n / d * (2.0 * Complex64::i() * kz * self.length()).exp();
        let value = if g.norm() < 1e-3 {
            -g * (1.0 + g * (0.5 + g * (1.0 / 3.0 + 0.25 * g)))
        } else {
            (1.0 - g).ln()
        };
        finite(value, "ln N", w)
    }

    /// `N'/N` by a five-point stencil on `ln N`, step `δ`.
    fn log_derivative(&self, w: Complex64, delta: f64) -> Result<Complex64> {
        let c = self.log_n(w)?;
        let rel = |z: Complex64| -> Result<Complex64> {
            let v = self.log_n(z)? - c;
            // same sheet as the centre value
            Ok(Complex64::new(v.re, wrap(v.im)))
        };
        let h = Complex64::new(delta, 0.0);
        let p1 = rel(w + h)?;
        let m1 = rel(w - h)?;
        let p2 = rel(w + 2.0 * h)?;
        let m2 = rel(w - 2.0 * h)?;
        Ok((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * delta))
    }

    fn residual(&self, w: Complex64) -> Result<DispersionResidual> {
        let (n, d, kz) = self.parts(w)?;
        if n.norm() == 0.0 {
            return Ok(DispersionResidual {
                value: Complex64::new(f64::INFINITY, 0.0),
                reflection_vanishes: true,
            });
        }
        let e = (-2.0 * Complex64::i() * kz * self.length()).exp();
        Ok(DispersionResidual {
            value: (d * e - n) / n,
            reflection_vanishes: false,
        })
    }
}

fn wrap(phase: f64) -> f64 {
    let two_pi = 2.0 * PI;
    phase - two_pi * (phase / two_pi).round()
}

fn finite(v: Complex64, what: &str, w: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(CasimirError::NonFinite {
            context: format!("{what} at omega = {w}"),
        })
    }
}

/// Dispersion residual `D(ω) = e^{−2ik_zL}/(r₁r₂) − 1`.
///
/// Its zeros are the cavity modes. With `k_z = i√(k² − ω²)` the factor
/// `e^{−2ik_zL}` equals `e^{2κL}` in the evanescent sector. Identical mirrors
/// give `e^{−2ik_zL}/r² − 1`.
pub fn dispersion_residual(
    cfg: &CavityConfig,
    pol: Polarization,
    k: f64,
    omega: Complex64,
) -> Result<DispersionResidual> {
    cfg.validate()?;
    Cavity::new(cfg, pol, k).residual(omega)
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    re_lo: f64,
    re_hi: f64,
    im_lo: f64,
    im_hi: f64,
}

impl Rect {
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }

    fn size(&self) -> f64 {
        (self.re_hi - self.re_lo).max(self.im_hi - self.im_lo)
    }

    fn contains(&self, w: Complex64, margin: f64) -> bool {
        w.re >= self.re_lo - margin
            && w.re <= self.re_hi + margin
            && w.im >= self.im_lo - margin
            && w.im <= self.im_hi + margin
    }

    fn split(&self, ratio: f64) -> (Rect, Rect) {
        if self.re_hi - self.re_lo >= self.im_hi - self.im_lo {
            let m = self.re_lo + ratio * (self.re_hi - self.re_lo);
            (Rect { re_hi: m, ..*self }, Rect { re_lo: m, ..*self })
        } else {
            let m = self.im_lo + ratio * (self.im_hi - self.im_lo);
            (Rect { im_hi: m, ..*self }, Rect { im_lo: m, ..*self })
        }
    }

    fn mismatch(&self, winding: i64, found: usize) -> CasimirError {
        CasimirError::WindingMismatch {
            re_lo: self.re_lo,
            re_hi: self.re_hi,
            im_lo: self.im_lo,
            im_hi: self.im_hi,
            winding,
            found,
        }
    }
}

struct RootFinder<'a> {
    cav: Cavity<'a>,
    edge_samples: usize,
    max_depth: usize,
    scale: f64,
}

impl RootFinder<'_> {
    /// Winding number of `R` around `rect`, or `None` if the boundary passes
    /// too close to a root to resolve the phase.
    fn winding(&self, rect: &Rect) -> Result<Option<i64>> {
        let c = rect.corners();
        let mut total = 0.0;
        for j in 0..4 {
            match self.edge_phase(c[j], c[(j + 1) % 4])? {
                Some(p) => total += p,
                None => return Ok(None),
            }
        }
        let w = total / (2.0 * PI);
        if (w - w.round()).abs() > 1e-3 {
            return Ok(None);
        }
        Ok(Some(w.round() as i64))
    }

    /// `R` and `d ln R/dt` at `a + (b − a) t`.
    fn edge_sample(&self, a: Complex64, b: Complex64, t: f64) -> Result<(f64, Complex64, Complex64)> {
        let d = b - a;
        let z = a + d * t;
        let h = 1e-6 * (z.norm() + d.norm());
        let u = d / d.norm() * h;
        let r = self.cav.even(z)?;
        let dr = (self.cav.even(z + u)? - self.cav.even(z - u)?) / (2.0 * u);
        Ok((t, r, dr / r * d))
    }

    fn edge_phase(&self, a: Complex64, b: Complex64) -> Result<Option<f64>> {
        const MAX_STEP: f64 = 0.8;
        let n = self.edge_samples;
        let min_step = 1e-13 * self.scale.max((b - a).norm()) / (b - a).norm();
        let mut stack = Vec::with_capacity(n + 1);
        for j in (0..=n).rev() {
            stack.push(self.edge_sample(a, b, j as f64 / n as f64)?);
        }
        let mut total = 0.0;
        let (mut t0, mut r0, mut g0) = stack.pop().expect("edge samples");
        while let Some(&(t1, r1, g1)) = stack.last() {
            let dt = t1 - t0;
            let ratio = r1 / r0;
            // both the chord and the local rates must be small
            let ok = ratio.arg().abs() <= MAX_STEP
                && ratio.norm().ln().abs() <= 1.0
                && g0.norm() * dt <= MAX_STEP
                && g1.norm() * dt <= MAX_STEP;
            if ok {
                total += ratio.arg();
                stack.pop();
                t0 = t1;
                r0 = r1;
                g0 = g1;
                continue;
            }
            if dt < min_step {
                return Ok(None);
            }
            stack.push(self.edge_sample(a, b, t0 + 0.5 * dt)?);
        }
        Ok(Some(total))
    }

    fn newton(&self, seed: Complex64, cluster: bool) -> Result<Option<Complex64>> {
        let mut w = seed;
        for _ in 0..80 {
            let h = 1e-7 * (w.norm() + 1e-3 * self.scale);
            let hc = Complex64::new(h, 0.0);
            let f = self.cav.even(w)?;
            let df = (self.cav.even(w + hc)? - self.cav.even(w - hc)?) / (2.0 * h);
            if df.norm() == 0.0 || !df.re.is_finite() {
                return Ok(None);
            }
            let step = f / df;
            w -= step;
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Ok(None);
            }
            if step.norm() <= 1e-15 * w.norm().max(self.scale) {
                break;
            }
        }
        if cluster {
            // D is ill-conditioned at a near-multiple root
            return Ok((self.cav.even_relative(w)? < 1e-10).then_some(w));
        }
        let d = self.cav.residual(w)?;
        if d.reflection_vanishes || d.value.norm() > RESIDUAL_TOLERANCE {
            return Ok(None);
        }
        Ok(Some(w))
    }

    fn root_in(&self, rect: &Rect, cluster: bool) -> Result<Option<Complex64>> {
        let c = Complex64::new(0.5 * (rect.re_lo + rect.re_hi), 0.5 * (rect.im_lo + rect.im_hi));
        let dx = 0.25 * (rect.re_hi - rect.re_lo);
        let dy = 0.25 * (rect.im_hi - rect.im_lo);
        let seeds = [
            c,
            c + Complex64::new(-dx, -dy),
            c + Complex64::new(dx, -dy),
            c + Complex64::new(dx, dy),
            c + Complex64::new(-dx, dy),
        ];
        // a multiple root is only resolved to about √ε
        let margin = if cluster {
            1e-6 * self.scale
        } else {
            1e-9 * rect.size()
        };
        for s in seeds {
            if let Some(w) = self.newton(s, cluster)? {
                if rect.contains(w, margin) {
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    }

    fn solve(&self, rect: Rect, winding: i64, depth: usize, out: &mut Vec<Complex64>) -> Result<()> {
        if winding == 0 {
            return Ok(());
        }
        if winding < 0 {
            // a pole of R inside: the region violates the analyticity assumption
            return Err(rect.mismatch(winding, 0));
        }
        // a cluster narrower than the resolution counts as one multiple root
        let cluster = rect.size() < CLUSTER_SIZE * self.scale;
        if winding == 1 || cluster {
            if let Some(mut w) = self.root_in(&rect, cluster)? {
                // passive cavities have no zeros above the axis; a positive
                // imaginary part within the root's resolution is roundoff
                let resolution = if cluster { 1e-6 * self.scale } else { 1e-9 * w.norm() };
                if w.im > 0.0 && w.im <= resolution {
                    w.im = 0.0;
                }
                out.extend(std::iter::repeat(w).take(winding as usize));
                return Ok(());
            }
        }
        if depth >= self.max_depth {
            return Err(rect.mismatch(winding, 0));
        }
        for ratio in SPLIT_RATIOS {
            let (a, b) = rect.split(ratio);
            let (Some(wa), Some(wb)) = (self.winding(&a)?, self.winding(&b)?) else {
                continue;
            };
            if wa + wb != winding {
                continue;
            }
            self.solve(a, wa, depth + 1, out)?;
            self.solve(b, wb, depth + 1, out)?;
            return Ok(());
        }
        Err(rect.mismatch(winding, 0))
    }
}

fn transparent(m: &Mirror) -> bool {
    let unit = |r: &ResponseModel| match r {
        ResponseModel::Vacuum => true,
        ResponseModel::Constant { value } => *value == 1.0,
        _ => false,
    };
    unit(&m.epsilon) && unit(&m.mu)
}

/// All modes of the cavity inside `region`, sorted by real part.
///
/// The number of roots is certified against the winding number of the mode
/// function around the region; a mismatch is an error naming the offending
/// sub-rectangle. The region must not enclose poles or branch points of the
/// material responses.
pub fn find_modes(
    cfg: &CavityConfig,
    pol: Polarization,
    k: f64,
    region: &SearchRegion,
) -> Result<Vec<ComplexMode>> {
    cfg.validate()?;
    region.validate()?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(CasimirError::InvalidParameter(format!("bad wavenumber {k}")));
    }
    if transparent(&cfg.mirror1) || transparent(&cfg.mirror2) {
        return Ok(Vec::new());
    }
    let finder = RootFinder {
        cav: Cavity::new(cfg, pol, k),
        edge_samples: region.edge_samples,
        max_depth: region.max_depth,
        scale: region.re_max,
    };
    let mut rect = Rect {
        re_lo: region.re_min,
        re_hi: region.re_max,
        im_lo: region.im_min,
        im_hi: region.im_max,
    };
    // a root on the outer boundary: nudge the boundary outwards
    let mut winding = None;
    for j in 0..6 {
        if let Some(w) = finder.winding(&rect)? {
            winding = Some(w);
            break;
        }
        let bump = 3.7e-4 * (j + 1) as f64;
        rect.re_hi *= 1.0 + bump;
        rect.re_lo *= 1.0 - bump;
        rect.im_lo -= bump * (rect.im_hi - rect.im_lo);
    }
    let winding = winding.ok_or_else(|| rect.mismatch(-1, 0))?;
    let mut roots = Vec::new();
    finder.solve(rect, winding, 0, &mut roots)?;

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    // the same root reached from two rectangles agrees to Newton precision;
    // genuine near-degenerate pairs are further apart than that
    let duplicate = |a: Complex64, b: Complex64| a != b && (a - b).norm() < 1e-10 * a.norm().max(b.norm());
    if roots.len() as i64 != winding || roots.windows(2).any(|p| duplicate(p[0], p[1])) {
        return Err(rect.mismatch(winding, roots.len()));
    }
    if let Some(w) = roots.iter().find(|w| w.im > GAIN_TOLERANCE) {
        return Err(CasimirError::ModelEvaluation {
            model: "cavity",
            at: format!("{w}"),
            reason: "growing mode in the upper half-plane".into(),
        });
    }
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(n, omega)| ComplexMode {
            omega,
            k,
            pol,
            branch_index: n,
        })
        .collect())
}

/// Frequency above which the medium supports propagating waves at this `k`;
/// the mode function has a branch cut there.
fn continuum_onset(m: &Mirror, k: f64) -> f64 {
    if m.epsilon.is_perfect() || m.mu.is_perfect() {
        return f64::INFINITY;
    }
    let plain = |r: &ResponseModel| match r {
        ResponseModel::Vacuum => Some(1.0),
        ResponseModel::Constant { value } => Some(*value),
        _ => None,
    };
    match (&m.epsilon, plain(&m.epsilon), plain(&m.mu)) {
        (_, Some(e), Some(mu)) => k / (e * mu).sqrt(),
        (ResponseModel::DrudeEpsilon(p), None, Some(mu)) => (p.plasma_frequency.powi(2) + k * k / mu).sqrt(),
        _ => m
            .characteristic_frequencies()
            .into_iter()
            .fold(k, f64::min),
    }
}

fn max_damping(m: &Mirror) -> f64 {
    let d = |r: &ResponseModel| match r {
        ResponseModel::DrudeEpsilon(p) => p.damping,
        ResponseModel::MetamaterialMuKk(p) => p.magnetic_damping,
        ResponseModel::DrudeLorentzDirect(p) => p
            .oscillators
            .iter()
            .map(|o| o.damping)
            .chain(p.drude.iter().map(|d| d.damping))
            .fold(0.0, f64::max),
        _ => 0.0,
    };
    d(&m.epsilon).max(d(&m.mu))
}

/// Default search region below the cutoff and below the continuum onset.
pub fn default_region(cfg: &CavityConfig, k: f64, omega_c: f64) -> Option<SearchRegion> {
    let onset = continuum_onset(&cfg.mirror1, k).min(continuum_onset(&cfg.mirror2, k));
    let re_max = omega_c.min(onset * (1.0 - 1e-3));
    let gamma = max_damping(&cfg.mirror1).max(max_damping(&cfg.mirror2));
    let low = cfg
        .mirror1
        .characteristic_frequencies()
        .into_iter()
        .chain(cfg.mirror2.characteristic_frequencies())
        .chain([re_max, 1.0 / cfg.separation])
        .filter(|f| *f > 0.0)
        .fold(f64::INFINITY, f64::min);
    let re_min = 1e-2 * low;
    if !(re_max > 2.0 * re_min) {
        return None;
    }
    SearchRegion::new(re_max, -(0.05 * re_max + 2.0 * gamma))
        .ok()
        .map(|r| r.with_re_min(re_min))
}

/// `a` with its imaginary part forced to the closed lower half-plane.
fn lower(a: Complex64) -> Complex64 {
    if a.im >= 0.0 {
        Complex64::new(a.re, -0.0)
    } else {
        a
    }
}

/// Antiderivative of `ω [1/(ω − a) + 1/(ω + a*)]`, continuous in the upper
/// half-plane.
fn pair_antiderivative(a: Complex64, w: Complex64) -> Complex64 {
    let a = lower(a);
    let ac = a.conj();
    2.0 * w + a * (w - a).ln() - ac * (w + ac).ln()
}

fn pair_pole(a: Complex64, w: Complex64) -> Complex64 {
    let a = lower(a);
    1.0 / (w - a) + 1.0 / (w + a.conj())
}

/// `Re[ω_n − (2i/π) ω_n ln(ω_n/ω_c)]`, split into the bare and log parts.
fn mode_term(a: Complex64, omega_c: f64) -> (f64, f64) {
    let log = (-2.0 * Complex64::i() / PI * a * (a / omega_c).ln()).re;
    (a.re, log)
}

struct PolarizationEnergy {
    energy: f64,
    bare: f64,
    log: f64,
    error: f64,
}

fn breakpoints(cfg: &CavityConfig, k: f64, roots: &[Complex64], omega_c: f64) -> Vec<f64> {
    let mut pts = vec![0.0, omega_c, k];
    pts.extend(roots.iter().map(|w| w.re));
    for m in [&cfg.mirror1, &cfg.mirror2] {
        pts.push(continuum_onset(m, k));
        pts.extend(m.characteristic_frequencies());
        if let ResponseModel::DrudeEpsilon(p) = &m.epsilon {
            pts.push(p.plasma_frequency * FRAC_1_SQRT_2);
        }
    }
    pts.retain(|p| p.is_finite() && *p >= 0.0 && *p <= omega_c);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * omega_c);
    pts
}

fn polarization_energy(
    cav: &Cavity,
    roots: &[Complex64],
    omega_c: f64,
    tol: QuadTolerance,
) -> Result<PolarizationEnergy> {
    let eta = omega_c / 16.0;
    let smooth = |w: Complex64| -> Result<Complex64> {
        let delta = 1e-3 * w.norm().min(eta);
        let mut g = cav.log_derivative(w, delta)?;
        for &a in roots {
            g -= pair_pole(a, w);
        }
        Ok(g)
    };
    let mut failure = None;
    let mut guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };

    // ω = i s, s ∈ [0, η]
    let up = integrate_partitioned(
        |s| guard(smooth(Complex64::new(0.0, s)).map(|g| -s * g.im)),
        &[0.0, eta],
        tol,
    );
    // ω = x + iη, x ∈ [0, ω_c]
    let pts = breakpoints(cav.cfg, cav.k, roots, omega_c);
    let across = integrate_partitioned(
        |x| {
            let w = Complex64::new(x, eta);
            guard(smooth(w).map(|g| (w * g).im))
        },
        &pts,
        tol,
    );
    // ω = ω_c + i(η + s), s ≥ 0, without subtraction
    let l = cav.length();
    let tail = integrate_to_infinity(
        |s| {
            let w = Complex64::new(omega_c, eta + s);
            let delta = 1e-3 * eta.min(w.norm());
            guard(
                cav.log_derivative(w, delta)
                    .map(|g| (w * g * Complex64::i()).im),
            )
        },
        0.0,
        1.0 / (2.0 * l),
        &[],
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (up, across, tail) = (up?, across?, tail?);

    let top = Complex64::new(omega_c, eta);
    let zero = Complex64::new(0.0, 0.0);
    let pairs: f64 = roots
        .iter()
        .map(|&a| (pair_antiderivative(a, top) - pair_antiderivative(a, zero)).im)
        .sum();
    let energy = -(up.value + across.value + tail.value + pairs) / (2.0 * PI);
    let (bare, log) = roots.iter().fold((0.0, 0.0), |(b, g), &a| {
        let (tb, tg) = mode_term(a, omega_c);
        (b + 0.5 * tb, g + 0.5 * tg)
    });
    Ok(PolarizationEnergy {
        energy,
        bare,
        log,
        error: (up.error + across.error + tail.error) / (2.0 * PI),
    })
}

fn energy_at(cfg: &CavityConfig, k: f64, omega_c: f64, tolerance: f64) -> Result<ModeSumEnergy> {
    let mut out = ModeSumEnergy {
        energy: 0.0,
        discrete: 0.0,
        log_term: 0.0,
        background: 0.0,
        estimated_error: 0.0,
        omega_c,
        modes: Vec::new(),
    };
    if 2.0 * k * cfg.separation > NEGLIGIBLE_EXPONENT || transparent(&cfg.mirror1) || transparent(&cfg.mirror2) {
        return Ok(out);
    }
    let tol = QuadTolerance::relative(tolerance)
        .with_absolute(tolerance * 1e-3 * energy_floor(cfg))
        .with_max_subdivisions(4000);
    for pol in Polarization::BOTH {
        let modes = match default_region(cfg, k, omega_c) {
            Some(region) => find_modes(cfg, pol, k, &region)?,
            None => Vec::new(),
        };
        let roots: Vec<Complex64> = modes.iter().map(|m| m.omega).collect();
        let cav = Cavity::new(cfg, pol, k);
        let e = polarization_energy(&cav, &roots, omega_c, tol)?;
        out.energy += e.energy;
        out.discrete += e.bare + e.log;
        out.log_term += e.log;
        out.estimated_error += e.error;
        out.modes.extend(modes);
    }
    out.background = out.energy - out.discrete;
    Ok(out)
}

/// Magnitude scale used for absolute quadrature floors.
fn energy_floor(cfg: &CavityConfig) -> f64 {
    let inv = 1.0 / cfg.separation;
    let f = cfg
        .mirror1
        .characteristic_frequencies()
        .into_iter()
        .chain(cfg.mirror2.characteristic_frequencies())
        .fold(0.0, f64::max);
    if f > 0.0 {
        inv.min(f)
    } else {
        inv
    }
}

/// Mode-sum energy per unit area at transverse wavenumber `k`, summed over
/// both polarizations, relative to `reference`.
///
/// `∫dk k/(2π) E_k` is the energy per unit area.
pub fn mode_sum_energy_density(
    cfg: &CavityConfig,
    k: f64,
    cutoff: &CutoffSpec,
    reference: Reference,
) -> Result<ModeSumEnergy> {
    cfg.validate()?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(CasimirError::InvalidParameter(format!("bad wavenumber {k}")));
    }
    let omega_c = nudge_cutoff(cfg, k, cutoff.omega_c)?;
    let mut e = energy_at(cfg, k, omega_c, cutoff.tolerance)?;
    if let Reference::Finite(l_ref) = reference {
        if !(l_ref > cfg.separation) {
            return Err(CasimirError::InvalidParameter(format!(
                "reference gap {l_ref} must exceed the separation {}",
                cfg.separation
            )));
        }
        let far = energy_at(&cfg.with_separation(l_ref), k, omega_c, cutoff.tolerance)?;
        e.energy -= far.energy;
        e.discrete -= far.discrete;
        e.log_term -= far.log_term;
        e.background -= far.background;
        e.estimated_error += far.estimated_error;
    }
    if let Some(factor) = cutoff.verify_factor {
        let other = CutoffSpec {
            omega_c: factor * cutoff.omega_c,
            verify_factor: None,
            ..*cutoff
        };
        let check = mode_sum_energy_density(cfg, k, &other, reference)?;
        let scale = e.energy.abs().max(e.estimated_error);
        if (check.energy - e.energy).abs() > cutoff.tolerance_check * scale {
            let missed: Vec<String> = check
                .modes
                .iter()
                .filter(|m| m.omega.re < omega_c)
                .filter(|m| !e.modes.iter().any(|n| n.pol == m.pol && (n.omega - m.omega).norm() < 1e-8 * omega_c))
                .map(|m| format!("{} {}", m.pol, m.omega))
                .collect();
            return Err(CasimirError::CutoffDependence(format!(
                "energy {} at cutoff {omega_c} but {} at {}; modes missed below the first cutoff: [{}]",
                e.energy,
                check.energy,
                other.omega_c,
                missed.join(", ")
            )));
        }
    }
    Ok(e)
}

/// Moves `ω_c` off real modes, where the pair terms are singular.
fn nudge_cutoff(cfg: &CavityConfig, k: f64, omega_c: f64) -> Result<f64> {
    let mut w = omega_c;
    for _ in 0..8 {
        let mut clear = true;
        for pol in Polarization::BOTH {
            let n = Cavity::new(cfg, pol, k).log_n(Complex64::new(w, 1e-9 * w))?;
            if n.re < -12.0 {
                clear = false;
            }
        }
        if clear {
            return Ok(w);
        }
        w *= 1.0137;
    }
    Ok(w)
}

/// Settings for the `k`-integrated mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSumSpec {
    /// `ω_c(k) = factor · (√(k² + Ω²) + π/L)` with `Ω` the largest material
    /// frequency.
    pub cutoff_factor: f64,
    /// Relative tolerance of the `k` integral.
    pub relative_tolerance: f64,
    /// Relative tolerance of each per-`k` evaluation.
    pub inner_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for ModeSumSpec {
    fn default() -> Self {
        Self {
            cutoff_factor: 1.5,
            relative_tolerance: 1e-6,
            inner_tolerance: 1e-9,
            max_subdivisions: 400,
        }
    }
}

impl ModeSumSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.cutoff_factor >= 1.0
            && self.relative_tolerance > 0.0
            && self.relative_tolerance <= 1e-2
            && self.inner_tolerance > 0.0
            && self.inner_tolerance <= self.relative_tolerance
            && self.max_subdivisions > 0;
        if ok {
            Ok(())
        } else {
            Err(CasimirError::InvalidParameter(format!("bad mode-sum settings {self:?}")))
        }
    }

    pub fn cutoff(&self, cfg: &CavityConfig, k: f64) -> f64 {
        let big = cfg
            .mirror1
            .characteristic_frequencies()
            .into_iter()
            .chain(cfg.mirror2.characteristic_frequencies())
            .fold(0.0, f64::max);
        self.cutoff_factor * ((k * k + big * big).sqrt() + PI / cfg.separation)
    }
}

/// Energy per unit area at zero temperature from the mode sum, integrated
/// over the transverse wavenumber.
pub fn mode_sum_energy(cfg: &CavityConfig, spec: &ModeSumSpec) -> Result<EnergyResult> {
    cfg.validate()?;
    spec.validate()?;
    let mut failure = None;
    let l = cfg.separation;
    let est = integrate_to_infinity(
        |k| {
            let run = || -> Result<f64> {
                let cut = CutoffSpec {
                    tolerance: spec.inner_tolerance,
                    ..CutoffSpec::new(spec.cutoff(cfg, k))?
                };
                Ok(k / (2.0 * PI) * mode_sum_energy_density(cfg, k, &cut, Reference::Decoupled)?.energy)
            };
            run().unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        },
        0.0,
        1.0 / (2.0 * l),
        &[],
        QuadTolerance::relative(spec.relative_tolerance).with_max_subdivisions(spec.max_subdivisions),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    Ok(EnergyResult {
        energy: est.value,
        estimated_error: est.error,
    })
}

/// Pressure `dE/dL` (attraction positive) from the mode-sum energy by a
/// five-point difference; the three-point result bounds the truncation error.
pub fn mode_sum_pressure(cfg: &CavityConfig, spec: &ModeSumSpec) -> Result<PressureResult> {
    let l = cfg.separation;
    let h = 2e-3 * l;
    let mut e = [0.0; 4];
    let mut quad_err = 0.0;
    for (slot, off) in e.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
        let r = mode_sum_energy(&cfg.with_separation(l + off * h), spec)?;
        *slot = r.energy;
        quad_err += r.estimated_error;
    }
    let five = (e[0] - 8.0 * e[1] + 8.0 * e[2] - e[3]) / (12.0 * h);
    let three = (e[2] - e[1]) / (2.0 * h);
    Ok(PressureResult {
        pressure: five,
        estimated_error: (five - three).abs() + 1.5 * quad_err / h,
        n_matsubara_terms: None,
    })
}

/// Coupled surface plasmons of two Drude half-spaces in the quasi-static limit,
/// `ω_± = (1/√2) √(ω_p²(1 ± e^{−kL}) − γ²/2) − iγ/2`.
pub fn plasmon_frequencies(p: &DrudeParams, k: f64, separation: f64) -> PlasmonPair {
    let e = (-k * separation).exp();
    let wp2 = p.plasma_frequency.powi(2);
    let g = p.damping;
    let branch = |sign: f64| {
        let radicand = Complex64::new(wp2 * (1.0 + sign * e) - 0.5 * g * g, 0.0);
        FRAC_1_SQRT_2 * radicand.sqrt() - Complex64::new(0.0, 0.5 * g)
    };
    PlasmonPair {
        plus: branch(1.0),
        minus: branch(-1.0),
    }
}

/// Coefficient `15 ζ(3)/π⁴` of the damping correction.
pub fn damping_coefficient() -> f64 {
    15.0 * ZETA_3 / PI.powi(4)
}

/// Short-distance pressure between identical Drude mirrors,
/// `(α ω_p/2π − 15ζ(3)γ/π⁴) π²/(240 L³)`, to first order in `γ`.
///
/// Valid for `ω_p L ≪ 1`; see [`plasmon_regime_valid`].
pub fn plasmon_force_short_distance(p: &DrudeParams, separation: f64) -> f64 {
    let bracket = PLASMON_ALPHA * p.plasma_frequency / (2.0 * PI) - damping_coefficient() * p.damping;
    bracket * PI.powi(2) / (240.0 * separation.powi(3))
}

pub fn plasmon_regime_valid(p: &DrudeParams, separation: f64) -> bool {
    p.plasma_frequency * separation <= SHORT_DISTANCE_LIMIT
}
