use inls_core::spectral::{free_propagate, FourierMultiplier};
use inls_core::{ComplexField, GridSpec};
use num_complex::Complex64;

/// `e^{it Delta}` of `exp(-|x|^2 / (2 w^2))` in closed form.
fn gaussian_free(grid: &GridSpec, w: f64, t: f64) -> ComplexField {
    let d = grid.dimension() as f64;
    let z = Complex64::new(w * w, 2.0 * t);
    let amp = (Complex64::new(w * w, 0.0) / z).powf(d / 2.0);
    ComplexField::from_fn(grid.clone(), |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        amp * (-r2 / (2.0 * z)).exp()
    })
    .unwrap()
}

fn relative_error(grid: &GridSpec, t: f64) -> f64 {
    let u0 = ComplexField::gaussian(grid.clone(), 1.0, 1.0);
    let exact = gaussian_free(grid, 1.0, t);
    free_propagate(&u0, t).l2_distance(&exact).unwrap() / exact.l2_norm()
}

#[test]
fn gaussian_closed_form_1d() {
    let g = GridSpec::new(1, 512, 32.0).unwrap();
    for t in [0.1, 0.5, 1.0, 2.0] {
        let err = relative_error(&g, t);
        assert!(err < 1e-8, "t = {t}: {err:e}");
    }
}

#[test]
fn gaussian_closed_form_3d() {
    let g = GridSpec::new(3, 64, 16.0).unwrap();
    let err = relative_error(&g, 0.5);
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn free_flow_is_unitary() {
    let g = GridSpec::new(3, 32, 8.0).unwrap();
    let u0 = ComplexField::from_fn(g, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::new(1.0 + x[0], x[1] - 0.5 * x[2]) * (-r2 / 3.0).exp()
    })
    .unwrap();
    let m0 = u0.mass();
    for t in [0.01, 0.3, 5.0, 100.0] {
        let m = free_propagate(&u0, t).mass();
        assert!(((m - m0) / m0).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn propagator_symbol_has_unit_modulus() {
    let g = GridSpec::new(2, 32, 5.0).unwrap();
    let p = FourierMultiplier::free_propagator(&g, 0.7);
    assert!(p.symbol().iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
}
