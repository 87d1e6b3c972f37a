use super::rational::{int, max_of, min_of, rat, Rational};
use super::{Conditions, DualTriple, ExponentTriple, Mode, ProblemParams};

fn d_of(d: u32) -> Rational {
    int(d as i64)
}

/// Named conditions of the homogeneous weighted estimate for `(q, r, gamma)`
/// at regularity `s`.
pub fn prop1_conditions(triple: &ExponentTriple, s: &Rational, d: u32) -> Conditions {
    let d = d_of(d);
    let half = rat(1, 2);
    let ExponentTriple {
        inv_q,
        inv_r,
        gamma,
    } = triple;
    let g = gamma - s;
    let mut c = Conditions::new();
    c.push(
        "scaling",
        int(2) * inv_q == &d * (&half - inv_r) + gamma - s,
    );
    c.push("inv_q_lower", &g / int(2) < *inv_q);
    c.push("inv_q_upper", *inv_q <= half);
    c.push("inv_r_lower", &g / int(2) <= *inv_r);
    c.push("inv_r_upper", *inv_r < half);
    c.push("gamma_lower", int(3) * s < *gamma);
    c.push("gamma_upper", *gamma < int(1) + s);
    c
}

pub fn check_prop1(triple: &ExponentTriple, s: &Rational, d: u32) -> bool {
    prop1_conditions(triple, s, d).all()
}

/// Unweighted `(q, r)` with `gamma = 0`, `s = 0`: `2/q = d(1/2 - 1/r)` and
/// `2 <= q <= inf`, `2 <= r <= 2d/(d - 2)`.
pub fn classical_conditions(triple: &ExponentTriple, d: u32) -> Conditions {
    let dd = d_of(d);
    let half = rat(1, 2);
    let mut c = Conditions::new();
    c.push("gamma_zero", triple.gamma == int(0));
    c.push(
        "scaling",
        int(2) * &triple.inv_q == &dd * (&half - &triple.inv_r),
    );
    c.push("inv_q_range", triple.inv_q >= int(0) && triple.inv_q <= half);
    c.push(
        "inv_r_range",
        triple.inv_r >= &half - int(1) / &dd && triple.inv_r <= half,
    );
    c
}

/// Named conditions of the dual (source-side) estimate for `(q~, r~, gamma~)`.
pub fn prop1_dual_conditions(dual: &DualTriple, s: &Rational, d: u32) -> Conditions {
    let d = d_of(d);
    let half = rat(1, 2);
    let DualTriple {
        inv_qt,
        inv_rt,
        gamma_t,
    } = dual;
    let g = gamma_t + s;
    let mut c = Conditions::new();
    c.push(
        "scaling",
        int(2) * inv_qt == &d * (&half - inv_rt) + gamma_t + s,
    );
    c.push("inv_q_lower", &g / int(2) < *inv_qt);
    c.push("inv_q_upper", *inv_qt <= half);
    c.push("inv_r_lower", &g / int(2) <= *inv_rt);
    c.push("inv_r_upper", *inv_rt < half);
    c.push("gamma_lower", s < gamma_t);
    c.push("gamma_upper", *gamma_t < int(1) - s);
    c
}

pub fn check_prop1_dual(dual: &DualTriple, s: &Rational, d: u32) -> bool {
    prop1_dual_conditions(dual, s, d).all()
}

/// Conditions on `(q, r, gamma, sigma)` under which the interpolated estimate
/// `||e^{it Delta} f||_{L^q L^r(|x|^{-r gamma})} <~ ||f||_{H^{-sigma}}` holds.
pub fn interp_conditions(
    inv_q: &Rational,
    inv_r: &Rational,
    gamma: &Rational,
    sigma: &Rational,
    d: u32,
) -> Conditions {
    let dd = d_of(d);
    let half = rat(1, 2);
    let theta = gamma + sigma;
    let corner = &theta / int(2);
    let mut c = Conditions::new();
    c.push("theta_positive", theta > int(0));
    c.push("theta_below_one", theta < int(1));
    c.push(
        "sigma_lower",
        -(gamma * (&dd - int(2))) / &dd < *sigma,
    );
    c.push("sigma_upper", sigma < gamma);
    c.push("scaling", int(2) * inv_q == &dd * (&half - inv_r) + &theta);
    c.push("inv_q_lower", corner <= *inv_q);
    c.push("inv_q_upper", *inv_q <= half);
    c.push("inv_r_lower", corner <= *inv_r);
    c.push("inv_r_upper", *inv_r <= half);
    c.push("not_corner", !(*inv_q == corner && *inv_r == half));
    c
}

pub fn check_interp_region(
    inv_q: &Rational,
    inv_r: &Rational,
    gamma: &Rational,
    sigma: &Rational,
    d: u32,
) -> bool {
    interp_conditions(inv_q, inv_r, gamma, sigma, d).all()
}

pub(crate) fn hypotheses(p: &ProblemParams, mode: Mode) -> Conditions {
    let d = d_of(p.d());
    let (alpha, beta, s) = (p.alpha(), p.beta(), p.s());
    let mut c = Conditions::new();
    c.push("d_at_least_3", p.d() >= 3);
    c.push("alpha_in_range", *alpha > int(0) && *alpha < int(2));
    match mode {
        Mode::L2 => {
            c.push("s_zero", *s == int(0));
            c.push("beta_positive", *beta > int(0));
            c.push("beta_upper", *beta <= (int(4) - int(2) * alpha) / &d);
        }
        Mode::Hs => {
            c.push("s_in_range", *s > int(0) && *s < rat(1, 3));
            let a1 = (int(26) - int(3) * &d) / int(12);
            let a2 = (int(12) * s + int(4) * &d * s - int(8) * s * s) / (&d + int(4) * s);
            c.push("alpha_lower", max_of(&a1, &a2) < *alpha);
            let b1 = (int(10) * s - int(2) * alpha) / (&d - int(6) * s);
            c.push("beta_lower", max_of(&int(0), &b1) < *beta);
            c.push(
                "beta_upper",
                *beta <= (int(4) - int(2) * alpha) / (&d - int(2) * s),
            );
        }
    }
    c
}

/// Every inequality of the `L^2` well-posedness theorem for `(q, r, gamma)`,
/// including the hypotheses on the parameters.
pub fn thm1_conditions(p: &ProblemParams, t: &ExponentTriple) -> Conditions {
    let d = d_of(p.d());
    let (alpha, beta) = (p.alpha(), p.beta());
    let b1 = beta + int(1);
    let half = rat(1, 2);
    let mut c = hypotheses(p, Mode::L2);
    let g_lo = max_of(&int(0), &((alpha - int(1)) / &b1));
    let g_hi = min_of(&int(1), &(alpha / &b1));
    c.push("gamma_lower", g_lo < t.gamma);
    c.push("gamma_upper", t.gamma < g_hi);
    c.push(
        "scaling",
        int(2) * &t.inv_q == &d * (&half - &t.inv_r) + &t.gamma,
    );
    c.push("inv_q_lower", &t.gamma / int(2) < t.inv_q);
    c.push("inv_q_upper", t.inv_q <= half);
    c.push("inv_r_lower", int(1) / (int(2) * &b1) < t.inv_r);
    let r_hi = (&d - int(2) * (alpha - int(1))) / (int(2) * &d * &b1) + &t.gamma / &d;
    c.push("inv_r_upper", t.inv_r < r_hi);
    c
}

pub fn check_thm1(p: &ProblemParams, t: &ExponentTriple) -> bool {
    thm1_conditions(p, t).all()
}

/// Every inequality of the `H^s` well-posedness theorem for `(q, r, gamma)`,
/// including the hypotheses on the parameters.
pub fn thm2_conditions(p: &ProblemParams, t: &ExponentTriple) -> Conditions {
    let d = d_of(p.d());
    let (alpha, beta, s) = (p.alpha(), p.beta(), p.s());
    let b1 = beta + int(1);
    let half = rat(1, 2);
    let mut c = hypotheses(p, Mode::Hs);
    let g_lo = max_of(&(int(3) * s), &((alpha + s - int(1)) / &b1));
    let g_hi = min_of(
        &min_of(&(int(1) + s), &((alpha - s) / &b1)),
        &((&d * beta + int(2) * alpha - int(4) * s) / (int(2) * &b1)),
    );
    c.push("gamma_lower", g_lo < t.gamma);
    c.push("gamma_upper", t.gamma < g_hi);
    c.push(
        "scaling",
        int(2) * &t.inv_q == &d * (&half - &t.inv_r) + &t.gamma - s,
    );
    c.push("inv_q_lower", (&t.gamma - s) / int(2) < t.inv_q);
    c.push("inv_q_upper", t.inv_q <= half);
    let base = int(1) / (int(2) * &b1);
    let r_lo = max_of(
        &base,
        &(&base + (int(2) * s - alpha) / (&d * &b1) + &t.gamma / &d),
    );
    c.push("inv_r_lower", r_lo < t.inv_r);
    let r_hi =
        (&d - int(2) * s - int(2) * (alpha - int(1))) / (int(2) * &d * &b1) + &t.gamma / &d;
    c.push("inv_r_upper", t.inv_r < r_hi);
    c
}

pub fn check_thm2(p: &ProblemParams, t: &ExponentTriple) -> bool {
    thm2_conditions(p, t).all()
}

/// Conditions of the theorem of `mode` for one triple.
pub fn theorem_conditions(p: &ProblemParams, t: &ExponentTriple, mode: Mode) -> Conditions {
    match mode {
        Mode::L2 => thm1_conditions(p, t),
        Mode::Hs => thm2_conditions(p, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> (ProblemParams, ExponentTriple) {
        let p = ProblemParams::l2(3, int(1), rat(2, 3), 1).unwrap();
        let t = ExponentTriple::from_scaling(3, &int(0), rat(2, 5), rat(1, 2));
        (p, t)
    }

    #[test]
    fn worked_example_is_admissible() {
        let (p, t) = example();
        assert_eq!(t.inv_q, rat(2, 5));
        assert!(check_prop1(&t, &int(0), 3));
        assert!(check_thm1(&p, &t), "{:?}", thm1_conditions(&p, &t).failures());
    }

    #[test]
    fn strict_bounds_are_strict() {
        let s = rat(1, 10);
        let t = ExponentTriple::from_scaling(3, &s, rat(2, 5), rat(3, 10));
        assert_eq!(prop1_conditions(&t, &s, 3).get("gamma_lower"), Some(false));
        let t = ExponentTriple::from_scaling(3, &int(0), rat(1, 2), rat(1, 2));
        assert!(!check_prop1(&t, &int(0), 3));

        let (p, _) = example();
        let gamma = int(1) / (p.beta() + int(1));
        let t = ExponentTriple::from_scaling(3, &int(0), rat(2, 5), gamma);
        assert_eq!(thm1_conditions(&p, &t).get("gamma_upper"), Some(false));
    }

    #[test]
    fn interp_region_edges() {
        let z = int(0);
        // gamma + sigma = 1
        let t = ExponentTriple::from_scaling(3, &z, rat(2, 5), int(1));
        assert!(!check_interp_region(&t.inv_q, &t.inv_r, &int(1), &z, 3));
        // excluded corner: 1/q = theta/2, 1/r = 1/2
        let theta = rat(1, 2);
        assert!(!check_interp_region(&rat(1, 4), &rat(1, 2), &theta, &z, 3));
        assert!(check_interp_region(&rat(2, 5), &rat(2, 5), &theta, &z, 3));
    }
}
