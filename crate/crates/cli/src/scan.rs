use casimir_core::lifshitz::pressure;
use casimir_core::modes::{mode_sum_pressure, plasmon_force_short_distance, plasmon_regime_valid};
use casimir_core::units::lambda_to_natural;
use casimir_core::{PressureResult, Result as CoreResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{drude_only, Method, ScanConfig, ScanSpec};

/// One scan point. `pressure` and `err` are the dimensionless `P L⁴/(ħc)`;
/// they are absent when the evaluation failed, and `error` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub pressure: Option<f64>,
    pub err: Option<f64>,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.pressure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    /// Seconds since the Unix epoch; not part of the hash.
    pub generated_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureCurve {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ScanConfig>,
    pub rows: Vec<Row>,
}

impl PressureCurve {
    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.failed())
    }
}

/// Pressure `P L⁴` at one point, or the reason it could not be computed.
pub fn evaluate(spec: &ScanSpec, method: Method, l: f64, t: f64) -> Row {
    let mut warning = None;
    let result = (|| -> CoreResult<PressureResult> {
        let cfg = spec.cavity(l, t)?;
        match method {
            Method::Lifshitz => pressure(&cfg, &spec.quadrature),
            Method::ModeSum => mode_sum_pressure(&cfg, &spec.mode_sum),
            Method::PlasmonApprox => {
                let p = drude_only(&spec.mirror1).expect("checked when resolving the config");
                if !plasmon_regime_valid(&p, cfg.separation) {
                    warning = Some(format!(
                        "omega_p L = {:.3} is outside the short-distance regime",
                        p.plasma_frequency * cfg.separation
                    ));
                }
                // closed form: no numerical error, the model error is not estimated
                Ok(PressureResult {
                    pressure: plasmon_force_short_distance(&p, cfg.separation),
                    estimated_error: 0.0,
                    n_matsubara_terms: None,
                })
            }
        }
    })();
    let scale = lambda_to_natural(l).powi(4);
    match result {
        Ok(r) => Row {
            l,
            t,
            pressure: Some(r.pressure * scale),
            err: Some(r.estimated_error * scale),
            method,
            warning,
            error: None,
        },
        Err(e) => Row {
            l,
            t,
            pressure: None,
            err: None,
            method,
            warning,
            error: Some(e.to_string()),
        },
    }
}

/// Evaluates every `(T, L, method)` in parallel; rows come back ordered by
/// temperature, then distance, then the listed method order.
pub fn run_scan(spec: &ScanSpec) -> Vec<Row> {
    let points: Vec<(f64, f64, Method)> = spec
        .temperatures
        .iter()
        .flat_map(|&t| {
            spec.distances
                .iter()
                .flat_map(move |&l| spec.methods.iter().map(move |&m| (t, l, m)))
        })
        .collect();
    points
        .par_iter()
        .map(|&(t, l, m)| evaluate(spec, m, l, t))
        .collect()
}

/// Pairs of rows where the mode sum and Lifshitz disagree beyond their
/// combined error bars. Only meaningful for identical lossless mirrors.
pub fn cross_check(rows: &[Row]) -> Vec<(Row, Row)> {
    let mut bad = Vec::new();
    for a in rows.iter().filter(|r| r.method == Method::Lifshitz) {
        let Some(b) = rows
            .iter()
            .find(|r| r.method == Method::ModeSum && r.l == a.l && r.t == a.t)
        else {
            continue;
        };
        if let (Some(pa), Some(ea), Some(pb), Some(eb)) = (a.pressure, a.err, b.pressure, b.err) {
            if (pa - pb).abs() > ea + eb {
                bad.push((a.clone(), b.clone()));
            }
        }
    }
    bad
}

/// Whether the configured mirrors are identical and free of absorption,
/// the setting in which the mode sum and Lifshitz must agree.
pub fn lossless_identical(spec: &ScanSpec) -> bool {
    use casimir_core::ResponseModel as R;
    let lossless = |m: &R| match m {
        R::Vacuum | R::Constant { .. } | R::Perfect => true,
        R::DrudeEpsilon(p) => p.damping == 0.0,
        R::DrudeLorentzDirect(p) => {
            p.drude.map_or(true, |d| d.damping == 0.0) && p.oscillators.iter().all(|o| o.damping == 0.0)
        }
        R::MetamaterialMuKk(_) | R::TabulatedKk { .. } => false,
    };
    spec.mirror1 == spec.mirror2 && lossless(&spec.mirror1.epsilon) && lossless(&spec.mirror1.mu)
}
