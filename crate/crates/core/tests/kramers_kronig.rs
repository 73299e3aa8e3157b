use casimir_core::response::{
    drude_absorption, kk_rotate, kk_rotate_detailed, metamaterial_mu_absorption, metamaterial_mu_imag, refined_grid,
};
use casimir_core::{DrudeParams, MetamaterialMuParams, ResponseModel, TabulatedAbsorption};

fn narrow_lorentzian() -> (MetamaterialMuParams, TabulatedAbsorption) {
    let p = MetamaterialMuParams::new(0.5, 1.0, 1e-3).unwrap();
    let grid = refined_grid(1e-4, 1e3, 200, &[(1.0, 0.05, 2e-5)]);
    let table = TabulatedAbsorption::sample(&grid, |w| metamaterial_mu_absorption(&p, w)).unwrap();
    (p, table)
}

#[test]
fn narrow_lorentzian_rotates_to_the_weak_absorption_form() {
    let (p, table) = narrow_lorentzian();
    let v0 = kk_rotate_detailed(&table, 0.0).unwrap();
    assert!((v0.value - 1.5).abs() < 1e-3, "{v0:?}");
    let mut last = f64::INFINITY;
    for i in 0..=100 {
        let xi = 0.1 * i as f64;
        let v = kk_rotate(&table, xi).unwrap();
        let exact = metamaterial_mu_imag(&p, xi).unwrap();
        assert!((v / exact - 1.0).abs() < 1e-3, "xi {xi}: {v} vs {exact}");
        assert!(v <= last);
        last = v;
    }
}

#[test]
fn drude_table_rotates_to_the_closed_form() {
    let p = DrudeParams::new(1.0, 0.1).unwrap();
    let grid = refined_grid(1e-5, 1e4, 400, &[]);
    let table = TabulatedAbsorption::sample(&grid, |w| drude_absorption(&p, w)).unwrap();
    let model = ResponseModel::DrudeEpsilon(p);
    for xi in [0.01, 0.1, 1.0, 10.0] {
        let est = kk_rotate_detailed(&table, xi).unwrap();
        let exact = model.imag_axis(xi).unwrap();
        assert!((est.value / exact - 1.0).abs() < 1e-4, "xi {xi}: {} vs {exact}", est.value);
        assert!(est.tail >= 0.0 && est.tail < 1e-3 * (est.value - 1.0));
    }
}

#[test]
fn zero_absorption_rotates_to_one() {
    let table = TabulatedAbsorption::sample(&refined_grid(0.1, 10.0, 10, &[]), |_| 0.0).unwrap();
    assert_eq!(kk_rotate(&table, 2.0).unwrap(), 1.0);
}
