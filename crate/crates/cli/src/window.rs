use serde::{Deserialize, Serialize};

use crate::config::{Method, ScanSpec};
use crate::scan::{evaluate, Row};

/// Relative precision in `L` of a bisection-refined bound.
pub const BOUND_PRECISION: f64 = 1e-3;

/// A distance interval (units of `Λ`) where the pressure is negative.
///
/// An open side means the curve was still negative at the end of the grid,
/// so the bound is the grid end rather than a sign change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepulsiveWindow {
    pub method: Method,
    #[serde(rename = "T")]
    pub t: f64,
    pub l_lo: f64,
    pub l_hi: f64,
    pub lower_open: bool,
    pub upper_open: bool,
    /// Bounds located by re-evaluating the pressure, not by interpolation.
    pub refined: bool,
}

impl RepulsiveWindow {
    /// Width on a logarithmic scale, `ln(L_hi/L_lo)`.
    pub fn log_width(&self) -> f64 {
        (self.l_hi / self.l_lo).ln()
    }
}

/// Zero of the line through `(ln a, pa)` and `(ln b, pb)`.
fn interpolate(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (la, lb) = (a.0.ln(), b.0.ln());
    (la + (lb - la) * a.1 / (a.1 - b.1)).exp()
}

/// Bisection in `ln L` between `pos` (pressure ≥ 0) and `neg` (< 0).
fn bisect<F: Fn(f64) -> Option<f64>>(mut pos: f64, mut neg: f64, pressure: &F) -> Option<f64> {
    while (pos - neg).abs() > BOUND_PRECISION * pos.min(neg) {
        let mid = (pos * neg).sqrt();
        if pressure(mid)? < 0.0 {
            neg = mid;
        } else {
            pos = mid;
        }
    }
    Some((pos * neg).sqrt())
}

/// Negative runs of `(L, pressure)` samples sorted by `L`, as
/// `(lo, hi, lower_open, upper_open, refined)`.
///
/// With `pressure` given, each sign change is refined by bisection;
/// otherwise, or if an evaluation fails, the bound is interpolated.
pub fn negative_intervals<F>(points: &[(f64, f64)], pressure: Option<&F>) -> Vec<(f64, f64, bool, bool, bool)>
where
    F: Fn(f64) -> Option<f64>,
{
    let bound = |pos: (f64, f64), neg: (f64, f64)| -> (f64, bool) {
        pressure
            .and_then(|f| bisect(pos.0, neg.0, f))
            .map_or((interpolate(pos, neg), false), |l| (l, true))
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if points[i].1 >= 0.0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < points.len() && points[i].1 < 0.0 {
            i += 1;
        }
        let end = i - 1;
        let (lo, lo_ref, lower_open) = if start == 0 {
            (points[0].0, true, true)
        } else {
            let (l, r) = bound(points[start - 1], points[start]);
            (l, r, false)
        };
        let (hi, hi_ref, upper_open) = if end + 1 == points.len() {
            (points[end].0, true, true)
        } else {
            let (l, r) = bound(points[end + 1], points[end]);
            (l, r, false)
        };
        out.push((lo, hi, lower_open, upper_open, lo_ref && hi_ref));
    }
    out
}

/// All repulsive windows of one `(method, T)` curve.
///
/// Failed rows are skipped. When `spec` is the config that produced the
/// rows, bounds are refined by re-evaluating the pressure.
pub fn find_repulsive_windows(rows: &[Row], method: Method, t: f64, spec: Option<&ScanSpec>) -> Vec<RepulsiveWindow> {
    let mut points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == method && r.t == t)
        .filter_map(|r| r.pressure.map(|p| (r.l, p)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eval = |l: f64| spec.and_then(|s| evaluate(s, method, l, t).pressure);
    let refine = spec.map(|_| &eval);
    negative_intervals(&points, refine)
        .into_iter()
        .map(|(l_lo, l_hi, lower_open, upper_open, refined)| RepulsiveWindow {
            method,
            t,
            l_lo,
            l_hi,
            lower_open,
            upper_open,
            refined: refined && spec.is_some(),
        })
        .collect()
}

/// Windows for every `(method, T)` present, in order of first appearance.
pub fn all_windows(rows: &[Row], spec: Option<&ScanSpec>) -> Vec<(Method, f64, Vec<RepulsiveWindow>)> {
    let mut keys: Vec<(Method, f64)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.method, r.t)) {
            keys.push((r.method, r.t));
        }
    }
    keys.into_iter()
        .map(|(m, t)| (m, t, find_repulsive_windows(rows, m, t, spec)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type Pressure = fn(f64) -> Option<f64>;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 0.01 * 1e4f64.powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn positive_curve_has_no_window() {
        let pts: Vec<_> = grid(20).into_iter().map(|l| (l, 1.0 / l)).collect();
        assert!(negative_intervals::<Pressure>(&pts, None).is_empty());
    }

    #[test]
    fn one_sign_change_pair_is_bracketed() {
        let f = |l: f64| Some((l - 0.3) * (l - 7.0));
        let pts: Vec<_> = grid(15).into_iter().map(|l| (l, f(l).unwrap())).collect();
        let w = negative_intervals(&pts, Some(&f));
        assert_eq!(w.len(), 1);
        let (lo, hi, lo_open, hi_open, refined) = w[0];
        assert!(!lo_open && !hi_open && refined);
        assert!((lo / 0.3 - 1.0).abs() < BOUND_PRECISION);
        assert!((hi / 7.0 - 1.0).abs() < BOUND_PRECISION);

        let rough = negative_intervals::<Pressure>(&pts, None);
        assert!(!rough[0].4);
        assert!(rough[0].0 > 0.1 && rough[0].0 < 1.0);
    }

    #[test]
    fn windows_at_the_grid_edge_are_open() {
        let pts: Vec<_> = grid(10).into_iter().map(|l| (l, 1.0 - l)).collect();
        let w = negative_intervals::<Pressure>(&pts, None);
        assert_eq!(w.len(), 1);
        assert!(!w[0].2 && w[0].3);
        assert_eq!(w[0].1, 100.0);
    }

    #[test]
    fn disjoint_windows_are_all_reported() {
        let f = |l: f64| Some((l.ln() * 2.0).sin());
        let pts: Vec<_> = grid(200).into_iter().map(|l| (l, f(l).unwrap())).collect();
        let w = negative_intervals(&pts, Some(&f));
        assert!(w.len() >= 3);
        for (lo, ..) in w.iter().filter(|w| !w.2) {
            let k = (2.0 * lo.ln() / std::f64::consts::PI).round();
            assert!((lo.ln() - k * std::f64::consts::PI / 2.0).abs() < 2e-3);
        }
    }
}
