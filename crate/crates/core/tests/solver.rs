use inls_core::exponents::{int, rat, ProblemParams};
use inls_core::solver::{
    lifespan_estimate, picard_solve, scattering_state, splitstep_solve_steps, LifespanConfig,
    PicardConfig,
};
use inls_core::{ComplexField, Error, GridSpec};
use num_complex::Complex64;

fn reference_params() -> ProblemParams {
    ProblemParams::l2(3, int(1), rat(2, 3), 1).unwrap()
}

fn reference_datum(n: usize, l: f64, norm: f64) -> ComplexField {
    let g = GridSpec::new(3, n, l).unwrap();
    let f = ComplexField::gaussian(g, 1.0, 1.0);
    f.scale_real(norm / f.l2_norm())
}

fn drift(masses: &[f64]) -> f64 {
    masses
        .iter()
        .map(|m| ((m - masses[0]) / masses[0]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn reference_run_mass_and_agreement() {
    let p = reference_params();
    let u0 = reference_datum(32, 16.0, 0.1);
    let cfg = PicardConfig::new(0.25, 32);
    let sol = picard_solve(&u0, &p, &cfg).unwrap();
    let split = splitstep_solve_steps(&u0, &p, 0.25, 32).unwrap();
    let pm: Vec<f64> = sol.trajectory.snapshots().iter().map(|u| u.mass()).collect();
    let sm: Vec<f64> = split.snapshots().iter().map(|u| u.mass()).collect();
    assert!(drift(&pm) < 1e-6, "{:e}", drift(&pm));
    assert!(drift(&sm) < 1e-12, "{:e}", drift(&sm));
    assert!(sol.trajectory.sup_l2_distance(&split).unwrap() < 1e-4);
    assert!(sol.increment_ratios().iter().all(|&r| r <= 0.6));
}

#[test]
fn strang_splitting_is_second_order() {
    let p = ProblemParams::l2(3, int(1), rat(2, 3), -1).unwrap();
    let g = GridSpec::new(3, 32, 8.0).unwrap();
    let u0 = ComplexField::from_fn(g, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::from_polar((-r2 / 2.0).exp(), 0.5 * x[0])
    })
    .unwrap();
    let t = 0.5;
    let fine = splitstep_solve_steps(&u0, &p, t, 512).unwrap();
    let err = |steps| {
        splitstep_solve_steps(&u0, &p, t, steps)
            .unwrap()
            .last()
            .l2_distance(fine.last())
            .unwrap()
    };
    let (e1, e2) = (err(16), err(32));
    let order = (e1 / e2).log2();
    assert!((1.8..2.4).contains(&order), "order {order}");
}

#[test]
fn picard_matches_splitstep_as_steps_refine() {
    let p = reference_params();
    let u0 = reference_datum(16, 8.0, 0.5);
    let gap = |steps| {
        let pic = picard_solve(&u0, &p, &PicardConfig::new(0.5, steps)).unwrap();
        let split = splitstep_solve_steps(&u0, &p, 0.5, steps).unwrap();
        pic.trajectory.last().l2_distance(split.last()).unwrap()
    };
    let (a, b) = (gap(8), gap(16));
    assert!(b < a, "{a:e} -> {b:e}");
}

#[test]
fn large_focusing_data_does_not_converge() {
    let p = ProblemParams::l2(3, int(1), rat(2, 3), -1).unwrap();
    let u0 = reference_datum(16, 8.0, 50.0);
    let cfg = PicardConfig::new(5.0, 8);
    match picard_solve(&u0, &p, &cfg) {
        Err(Error::NoConvergence { .. }) | Err(Error::BlowUp { .. }) => {}
        other => panic!("expected a solver failure, got {:?}", other.map(|s| s.iterations)),
    }
}

#[test]
fn lifespan_decreases_with_amplitude() {
    let p = ProblemParams::l2(3, int(1), rat(1, 3), 1).unwrap();
    let u0 = reference_datum(16, 8.0, 1.0);
    let cfg = PicardConfig::new(1.0, 8);
    let search = LifespanConfig {
        t_min: 1e-3,
        t_max: 1e4,
        bisections: 8,
    };
    let small = lifespan_estimate(1.0, &u0, &p, &cfg, &search).unwrap();
    let large = lifespan_estimate(4.0, &u0, &p, &cfg, &search).unwrap();
    assert!(large.t_star < small.t_star);
    assert!(small.bracket.0 <= small.t_star && small.t_star <= small.bracket.1);
}

#[test]
fn small_critical_data_settles() {
    let p = reference_params();
    let g = GridSpec::new(3, 16, 32.0).unwrap();
    let f = ComplexField::gaussian(g, 1.0, 4.0);
    let u0 = f.scale_real(0.01 / f.l2_norm());
    let sol = picard_solve(&u0, &p, &PicardConfig::new(8.0, 32)).unwrap();
    let state = scattering_state(&sol.trajectory).unwrap();
    let inc = &state.increments;
    assert!(inc.last().unwrap() < &inc[0]);
    assert!(*inc.last().unwrap() < 1e-3);
}
