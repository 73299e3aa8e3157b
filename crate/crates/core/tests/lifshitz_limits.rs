use std::f64::consts::PI;

use casimir_core::lifshitz::{energy_zero_t, pressure_finite_t, pressure_zero_t};
use casimir_core::modes::plasmon_force_short_distance;
use casimir_core::units::{ideal_pressure, ZETA_3};
use casimir_core::{CavityConfig, DrudeParams, Mirror, QuadratureSpec};

fn drude_pair(l: f64, t: f64, wp: f64, g: f64) -> CavityConfig {
    let m = Mirror::drude(DrudeParams::new(wp, g).unwrap());
    CavityConfig::new(l, t, m.clone(), m).unwrap()
}

#[test]
fn mixed_ideal_pair_is_repulsive() {
    // Σ (−1)^{n+1}/n⁴ = (7/8) ζ(4)
    let cfg = CavityConfig::new(1.0, 0.0, Mirror::perfect_electric(), Mirror::perfect_magnetic()).unwrap();
    let p = pressure_zero_t(&cfg, &QuadratureSpec::with_tolerance(1e-8)).unwrap();
    assert!((p.pressure / ideal_pressure(1.0) + 7.0 / 8.0).abs() < 1e-6, "{p:?}");
}

#[test]
fn drude_short_distance_matches_plasmon_formula() {
    for gamma in [0.0, 0.01] {
        let p = DrudeParams::new(1.0, gamma).unwrap();
        let l = 0.01;
        let full = pressure_zero_t(&drude_pair(l, 0.0, 1.0, gamma), &QuadratureSpec::with_tolerance(1e-6)).unwrap();
        let approx = plasmon_force_short_distance(&p, l);
        assert!((full.pressure / approx - 1.0).abs() < 0.05, "gamma {gamma}: {} vs {approx}", full.pressure);
    }
}

#[test]
fn energy_derivative_is_pressure() {
    let spec = QuadratureSpec::with_tolerance(1e-8);
    let l = 1.5;
    let h = 0.005 * l;
    let ep = energy_zero_t(&drude_pair(l + h, 0.0, 1.0, 0.05), &spec).unwrap().energy;
    let em = energy_zero_t(&drude_pair(l - h, 0.0, 1.0, 0.05), &spec).unwrap().energy;
    // attraction is positive, so P = dE/dL
    let fd = (ep - em) / (2.0 * h);
    let p = pressure_zero_t(&drude_pair(l, 0.0, 1.0, 0.05), &spec).unwrap().pressure;
    assert!((fd / p - 1.0).abs() < 5e-3, "{fd} vs {p}");
    assert!(energy_zero_t(&drude_pair(l, 0.0, 1.0, 0.05), &spec).unwrap().energy < 0.0);
}

#[test]
fn far_apart_mirrors_stay_below_ideal() {
    let l = 1e4;
    let e = energy_zero_t(&drude_pair(l, 0.0, 1.0, 0.05), &QuadratureSpec::default()).unwrap();
    let ideal = PI * PI / (720.0 * l.powi(3));
    assert!(e.energy < 0.0 && e.energy.abs() < ideal, "{e:?}");
}

#[test]
fn low_temperature_approaches_zero_temperature() {
    let l = 2.0 * PI;
    let spec = QuadratureSpec::with_tolerance(1e-6);
    let cold = pressure_finite_t(&drude_pair(l, 1e-3, 1.0, 0.01), &spec).unwrap();
    let zero = pressure_zero_t(&drude_pair(l, 0.0, 1.0, 0.01), &spec).unwrap();
    let rel = cold.pressure / zero.pressure - 1.0;
    println!("T=1e-3 relative shift {rel:e}, {} terms", cold.n_matsubara_terms.unwrap());
    assert!(rel.abs() < 5e-3);
}

#[test]
fn hot_ideal_plates() {
    let l = 1.0;
    let t = 3.0;
    let cfg = CavityConfig::new(l, t, Mirror::perfect_electric(), Mirror::perfect_electric()).unwrap();
    let p = pressure_finite_t(&cfg, &QuadratureSpec::with_tolerance(1e-8)).unwrap();
    let lim = t * ZETA_3 / (4.0 * PI * l.powi(3));
    assert!((p.pressure / lim - 1.0).abs() < 1e-2);
}
