use inls_core::exponents::{
    compute_thetas, critical_index, derive_dual_hs_first, derive_dual_hs_second, derive_dual_l2,
    format_rational, int, parse_rational, rat, region_sample, sample_params, theorem_conditions,
    Mode, Rational,
};
use inls_core::random::{gaussian_random_field, RandomFieldSpec};
use inls_core::spectral::{free_propagate, fractional_derivative, sobolev_norm};
use inls_core::weighted::{weighted_lebesgue_norm, WeightedNormSpec};
use inls_core::{ComplexField, GridSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_grid() -> GridSpec {
    GridSpec::new(3, 16, 6.0).unwrap()
}

fn field(seed: u64) -> ComplexField {
    gaussian_random_field(&small_grid(), &RandomFieldSpec::new(0.0), seed, 0).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::L2), Just(Mode::Hs)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn sampled_triples_obey_theorem_and_duals(seed in any::<u64>(), mode in mode()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample_params(mode, &mut rng);
        let s: Rational = if mode == Mode::L2 { int(0) } else { p.s().clone() };
        for t in region_sample(&p, mode, 4, seed).unwrap() {
            let d = int(p.d() as i64);
            prop_assert_eq!(
                int(2) * &t.inv_q,
                &d * (rat(1, 2) - &t.inv_r) + &t.gamma - &s
            );
            prop_assert!(theorem_conditions(&p, &t, mode).all());
            match mode {
                Mode::L2 => prop_assert!(derive_dual_l2(&p, &t).unwrap().passes()),
                Mode::Hs => {
                    prop_assert!(derive_dual_hs_first(&p, &t).unwrap().passes());
                    prop_assert!(derive_dual_hs_second(&p, &t).unwrap().derivation.passes());
                }
            }
        }
    }

    #[test]
    fn critical_index_vanishes_at_mass_critical_power(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample_params(Mode::L2, &mut rng);
        let critical = *p.beta() == p.critical_beta();
        prop_assert_eq!(critical_index(&p) == int(0), critical);
        prop_assert_eq!(compute_thetas(&p).theta0 == int(0), critical);
    }

    #[test]
    fn weighted_norm_is_homogeneous(seed in 0u64..1000, c in 0.01f64..100.0, gamma in 0.0f64..1.0) {
        let f = field(seed);
        let spec = WeightedNormSpec::spatial(2.5, gamma).unwrap();
        let a = weighted_lebesgue_norm(&f.scale(Complex64::new(0.0, c)), &spec).unwrap();
        let b = weighted_lebesgue_norm(&f, &spec).unwrap();
        prop_assert!(close(a, c * b, 1e-12));
    }

    #[test]
    fn discrete_holder_has_constant_one(
        s1 in 0u64..1000,
        s2 in 0u64..1000,
        r in 1.0f64..2.5,
        g1 in 0.0f64..0.35,
        g2 in 0.0f64..0.35,
    ) {
        let (f, g) = (field(s1), field(s2 + 1000));
        let fg = f.zip_with(&g, |a, b| a * b).unwrap();
        let lhs = weighted_lebesgue_norm(&fg, &WeightedNormSpec::spatial(r, g1 + g2).unwrap()).unwrap();
        let rhs = weighted_lebesgue_norm(&f, &WeightedNormSpec::spatial(2.0 * r, g1).unwrap()).unwrap()
            * weighted_lebesgue_norm(&g, &WeightedNormSpec::spatial(2.0 * r, g2).unwrap()).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn free_flow_preserves_mass(seed in 0u64..1000, t in -50.0f64..50.0) {
        let f = field(seed);
        prop_assert!(close(free_propagate(&f, t).mass(), f.mass(), 1e-12));
    }

    #[test]
    fn free_flow_group_law(seed in 0u64..1000, t in -5.0f64..5.0, s in -5.0f64..5.0) {
        let f = field(seed);
        let a = free_propagate(&free_propagate(&f, t), s);
        let b = free_propagate(&f, t + s);
        prop_assert!(a.l2_distance(&b).unwrap() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn fractional_orders_add(seed in 0u64..1000, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let f = field(seed);
        let lhs = fractional_derivative(&fractional_derivative(&f, a).unwrap(), b).unwrap();
        let rhs = fractional_derivative(&f, a + b).unwrap();
        prop_assert!(lhs.l2_distance(&rhs).unwrap() <= 1e-10 * rhs.l2_norm());
    }

    #[test]
    fn random_fields_have_unit_seminorm(seed in any::<u64>(), index in 0u64..100, s in 0.0f64..0.9) {
        let spec = RandomFieldSpec::new(s);
        let f = gaussian_random_field(&small_grid(), &spec, seed, index).unwrap();
        prop_assert!(close(sobolev_norm(&f, s, true).unwrap(), 1.0, 1e-12));
        let again = gaussian_random_field(&small_grid(), &spec, seed, index).unwrap();
        prop_assert_eq!(f, again);
    }
}
