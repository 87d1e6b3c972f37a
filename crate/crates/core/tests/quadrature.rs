use std::f64::consts::PI;

use inls_core::spectral::{rescale_field, sobolev_norm};
use inls_core::weighted::{weighted_lebesgue_norm, WeightedNormSpec};
use inls_core::{ComplexField, GridSpec};

const GAMMA_7_4: f64 = 0.919_062_526_848_883_2;

#[test]
fn homogeneous_norm_of_gaussian() {
    // |f|_{H^s dot}^2 = 2 pi Gamma(s + 3/2) for exp(-|x|^2/2) in d = 3
    let g = GridSpec::new(3, 64, 12.0).unwrap();
    let f = ComplexField::gaussian(g, 1.0, 1.0);
    let n = sobolev_norm(&f, 0.25, true).unwrap();
    let exact = (2.0 * PI * GAMMA_7_4).sqrt();
    assert!((n / exact - 1.0).abs() < 1e-3, "{n} vs {exact}");
    let n0 = sobolev_norm(&f, 0.0, true).unwrap();
    assert!((n0 / PI.powf(0.75) - 1.0).abs() < 1e-10);
}

#[test]
fn weighted_gaussian_integral() {
    // int |x|^{-1} exp(-|x|^2) dx = 2 pi in d = 3
    let g = GridSpec::new(3, 64, 8.0).unwrap();
    let f = ComplexField::gaussian(g, 1.0, 1.0);
    let spec = WeightedNormSpec::spatial(2.0, 0.5).unwrap();
    let n = weighted_lebesgue_norm(&f, &spec).unwrap();
    let exact = (2.0 * PI).sqrt();
    assert!((n / exact - 1.0).abs() < 1e-2, "{n} vs {exact}");
}

fn smooth_shell(r: f64) -> f64 {
    let step = |t: f64| 0.5 * (1.0 + (8.0 * t).tanh());
    step(r - 2.0) * step(5.0 - r)
}

/// `4 pi int r^{2-a} g(r)^2 dr` by the midpoint rule.
fn radial_integral(a: f64) -> f64 {
    let n = 200_000;
    let h = 8.0 / n as f64;
    (0..n)
        .map(|i| {
            let r = (i as f64 + 0.5) * h;
            r.powf(2.0 - a) * smooth_shell(r).powi(2)
        })
        .sum::<f64>()
        * h
        * 4.0
        * PI
}

#[test]
fn annulus_against_radial_quadrature() {
    let g = GridSpec::new(3, 64, 6.0).unwrap();
    let f = ComplexField::from_fn(g, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        num_complex::Complex64::new(smooth_shell(r), 0.0)
    })
    .unwrap();
    for gamma in [0.25, 0.5, 1.0] {
        let spec = WeightedNormSpec::spatial(2.0, gamma).unwrap();
        let exact = radial_integral(2.0 * gamma).sqrt();
        let n = weighted_lebesgue_norm(&f, &spec).unwrap();
        assert!((n / exact - 1.0).abs() < 5e-3, "gamma {gamma}: {n} vs {exact}");
    }
}

#[test]
fn rescaled_norm_follows_power_law() {
    let g = GridSpec::new(3, 64, 12.0).unwrap();
    let f = ComplexField::gaussian(g, 1.0, 1.0);
    let (alpha, beta, s) = (1.0, 1.0, 0.25);
    let n1 = sobolev_norm(&f, s, true).unwrap();
    let n2 = sobolev_norm(&rescale_field(&f, 2.0, alpha, beta).unwrap(), s, true).unwrap();
    let slope = (n2 / n1).log2();
    let predicted = s + (2.0 - alpha) / beta - 1.5;
    assert!((slope - predicted).abs() < 0.02, "{slope} vs {predicted}");
}

#[test]
fn homogeneous_norm_error_shrinks_with_box() {
    let exact = (2.0 * PI * GAMMA_7_4).sqrt();
    let err = |n, l| {
        let f = ComplexField::gaussian(GridSpec::new(3, n, l).unwrap(), 1.0, 1.0);
        (sobolev_norm(&f, 0.25, true).unwrap() / exact - 1.0).abs()
    };
    let (coarse, fine) = (err(64, 12.0), err(128, 24.0));
    // lattice error near xi = 0 scales like (pi/L)^{d + 2s}
    let rate = (coarse / fine).log2();
    assert!(rate > 3.0, "{coarse:e} -> {fine:e}, rate {rate}");
}
