//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! All drivers share one error-ordered work list, so breakpoints only seed the
//! initial partition and refinement goes wherever the error estimate is largest.
//! Semi-infinite ranges are mapped onto `[0, 1)` with `x = a + s t / (1 - t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::CasimirError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Stopping rule for the adaptive drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_subdivisions: usize,
}

impl QuadTolerance {
    pub fn relative(relative: f64) -> Self {
        Self {
            relative,
            absolute: 0.0,
            max_subdivisions: 2000,
        }
    }

    pub fn with_absolute(mut self, absolute: f64) -> Self {
        self.absolute = absolute;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Segment, CasimirError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut res_abs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(CasimirError::NonFinite {
            context: format!("integrand on [{lo:e}, {hi:e}]"),
        });
    }
    let error = rescale_error(
        (kronrod - gauss) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

/// Adaptive integration of `f` over the union of consecutive intervals
/// `[points[0], points[1]], [points[1], points[2]], ...`.
pub fn integrate_partitioned<F>(
    mut f: F,
    points: &[f64],
    tol: QuadTolerance,
) -> Result<Estimate, CasimirError>
where
    F: FnMut(f64) -> f64,
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod21(&mut f, w[0], w[1])?);
            evaluations += 21;
        }
    }
    let mut subdivisions = 0;
    loop {
        // Summing in a fixed (sorted) order keeps the result independent of
        // heap internals.
        let (value, error) = totals(&heap);
        if error <= tol.absolute.max(tol.relative * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(Estimate {
                    value,
                    error,
                    evaluations,
                })
            }
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if subdivisions >= tol.max_subdivisions || mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            let (lo, hi) = heap.peek().map(|s| (s.lo, s.hi)).unwrap_or((0.0, 0.0));
            return Err(CasimirError::QuadratureNotConverged {
                value,
                error,
                worst_lo: lo,
                worst_hi: hi,
            });
        }
        heap.push(kronrod21(&mut f, worst.lo, mid)?);
        heap.push(kronrod21(&mut f, mid, worst.hi)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut parts: Vec<(f64, f64, f64)> = heap.iter().map(|s| (s.lo, s.value, s.error)).collect();
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    parts
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.1, e + p.2))
}

/// Adaptive integration over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: QuadTolerance) -> Result<Estimate, CasimirError>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    integrate_partitioned(f, &[a, b], tol)
}

/// Integral over `[a, ∞)`. `scale` sets where the map `x = a + s t/(1-t)`
/// puts `t = 1/2`; `breaks` (any order, values ≤ a ignored) seed the partition.
pub fn integrate_to_infinity<F>(
    mut f: F,
    a: f64,
    scale: f64,
    breaks: &[f64],
    tol: QuadTolerance,
) -> Result<Estimate, CasimirError>
where
    F: FnMut(f64) -> f64,
{
    assert!(scale > 0.0 && scale.is_finite(), "scale must be positive");
    let mut ts: Vec<f64> = vec![0.0, 1.0];
    for &b in breaks {
        if b > a && b.is_finite() {
            let d = b - a;
            ts.push(d / (d + scale));
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let x = a + scale * t / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    integrate_partitioned(mapped, &ts, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let e = integrate(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, QuadTolerance::relative(1e-12)).unwrap();
        assert!((e.value - (64.0 / 6.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn bose_integral_to_infinity() {
        // ∫ x³/(eˣ−1) = π⁴/15
        let e = integrate_to_infinity(
            |x| x.powi(3) / x.exp_m1(),
            0.0,
            3.0,
            &[],
            QuadTolerance::relative(1e-11),
        )
        .unwrap();
        let exact = std::f64::consts::PI.powi(4) / 15.0;
        assert!((e.value - exact).abs() < 1e-10 * exact);
        assert!(e.error < 1e-9 * exact);
    }

    #[test]
    fn narrow_peak_with_breakpoint() {
        let w = 1e-4;
        let lorentz = |x: f64| w / std::f64::consts::PI / ((x - 1.0).powi(2) + w * w);
        let e = integrate_to_infinity(lorentz, 0.0, 1.0, &[1.0], QuadTolerance::relative(1e-9)).unwrap();
        let exact = 0.5 + (1.0 / w).atan() / std::f64::consts::PI;
        assert!((e.value - exact).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_worst_interval() {
        let err = integrate(
            |x: f64| 1.0 / x.abs().sqrt().max(1e-300),
            -1.0,
            1.0,
            QuadTolerance::relative(1e-15).with_max_subdivisions(5),
        )
        .unwrap_err();
        match err {
            CasimirError::QuadratureNotConverged { worst_lo, worst_hi, .. } => {
                assert!(worst_lo <= 0.0 && worst_hi >= 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
