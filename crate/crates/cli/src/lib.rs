//! Library behind the `casimir` command: scan configs, pressure curves,
//! repulsive-window detection and output formats.

pub mod config;
pub mod output;
pub mod scan;
pub mod window;

use std::time::{SystemTime, UNIX_EPOCH};

use casimir_core::modes::{default_region, find_modes, ComplexMode};
use casimir_core::{Polarization, Result as CoreResult};
use thiserror::Error;

pub use config::{ConfigError, Method, ScanConfig, ScanSpec};
pub use output::Format;
pub use scan::{PressureCurve, Provenance, Row};
pub use window::RepulsiveWindow;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for a configuration problem.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for a numerical failure.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error(
        "mode sum and Lifshitz disagree at L = {l}, T = {t}: {lifshitz} +/- {lifshitz_err} vs {mode_sum} +/- {mode_sum_err}"
    )]
    CrossCheck {
        l: f64,
        t: f64,
        lifshitz: f64,
        lifshitz_err: f64,
        mode_sum: f64,
        mode_sum_err: f64,
    },
}

/// Runs a resolved scan and attaches provenance.
///
/// When both the mode sum and Lifshitz are requested for identical lossless
/// mirrors, every point must agree within the combined error bars.
pub fn scan(spec: &ScanSpec) -> Result<PressureCurve, ScanError> {
    let rows = scan::run_scan(spec);
    if scan::lossless_identical(spec) {
        if let Some((a, b)) = scan::cross_check(&rows).into_iter().next() {
            return Err(ScanError::CrossCheck {
                l: a.l,
                t: a.t,
                lifshitz: a.pressure.unwrap_or(f64::NAN),
                lifshitz_err: a.err.unwrap_or(f64::NAN),
                mode_sum: b.pressure.unwrap_or(f64::NAN),
                mode_sum_err: b.err.unwrap_or(f64::NAN),
            });
        }
    }
    let generated_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    Ok(PressureCurve {
        provenance: Some(Provenance {
            config_hash: spec.config.hash(),
            version: VERSION.to_string(),
            generated_at,
        }),
        config: Some(spec.config.clone()),
        rows,
    })
}

/// Complex spectrum of the cavity at distance `l` (units of `Λ`) and
/// transverse wavenumber `k`, both polarizations, inside the default search
/// region below the mode-sum cutoff.
pub fn spectrum(spec: &ScanSpec, l: f64, k: f64) -> CoreResult<Vec<ComplexMode>> {
    let cfg = spec.cavity(l, 0.0)?;
    let Some(region) = default_region(&cfg, k, spec.mode_sum.cutoff(&cfg, k)) else {
        return Ok(vec![]);
    };
    let mut modes = Vec::new();
    for pol in Polarization::BOTH {
        modes.extend(find_modes(&cfg, pol, k, &region)?);
    }
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_of_a_drude_cavity_holds_the_plasmon_pair() {
        let spec = ScanConfig::from_toml(
            r#"
            distances = { values = [0.01] }
            mirror1 = { epsilon = { kind = "drude_epsilon", plasma_frequency = 1.0, damping = 0.02 } }
            mirror2 = { epsilon = { kind = "drude_epsilon", plasma_frequency = 1.0, damping = 0.02 } }
            "#,
        )
        .unwrap()
        .resolve()
        .unwrap();
        let modes = spectrum(&spec, 0.01, 5.0).unwrap();
        let tm: Vec<_> = modes.iter().filter(|m| m.pol == Polarization::TM).collect();
        assert_eq!(tm.len(), 2);
        for m in tm {
            assert!(m.omega.im < 0.0 && (m.omega.im + 0.01).abs() < 2.0 * 0.02 * 0.02);
        }
    }

    #[test]
    fn lossless_cross_check_passes() {
        let spec = ScanConfig::from_toml(
            r#"
            method = ["lifshitz", "mode_sum"]
            distances = { values = [0.2] }
            mirror1 = { epsilon = { kind = "drude_epsilon", plasma_frequency = 1.0, damping = 0.0 } }
            mirror2 = { epsilon = { kind = "drude_epsilon", plasma_frequency = 1.0, damping = 0.0 } }
            "#,
        )
        .unwrap()
        .resolve()
        .unwrap();
        let curve = scan(&spec).unwrap();
        assert_eq!(curve.rows.len(), 2);
        assert!(curve.failures().next().is_none());
    }
}
