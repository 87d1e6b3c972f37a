use serde::Serialize;

use super::conditions::prop1_dual_conditions;
use super::rational::{format_rational, int, rat, Interval, Rational};
use super::{compute_thetas, Conditions, DualTriple, ExponentTriple, ProblemParams};
use crate::error::{Error, Result};

/// A dual triple together with its time exponent and the exact checks it
/// was audited against.
#[derive(Debug, Clone, Serialize)]
pub struct DualDerivation {
    pub dual: DualTriple,
    #[serde(with = "super::rational::serde_rational")]
    pub theta: Rational,
    pub checks: Conditions,
}

impl DualDerivation {
    pub fn passes(&self) -> bool {
        self.checks.all()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondDualDerivation {
    #[serde(flatten)]
    pub derivation: DualDerivation,
    /// Feasible set of `1/r~_2` before the midpoint is taken.
    pub interval: String,
}

fn in_unit_open(which: &'static str, x: &Rational) -> Result<()> {
    if *x > int(0) && *x < int(1) {
        Ok(())
    } else {
        Err(Error::InfeasibleDual {
            which,
            value: format_rational(x),
        })
    }
}

/// Hölder bookkeeping shared by the `L^2` and first `H^s` duals:
/// `1/q~' = theta + (beta+1)/q`, `1/r~' = (beta+1)/r`,
/// `gamma~ = alpha - gamma (beta+1)`.
fn holder_dual(
    p: &ProblemParams,
    t: &ExponentTriple,
    theta: Rational,
    s: &Rational,
) -> Result<DualDerivation> {
    let b1 = p.beta() + int(1);
    let inv_qt_prime = &theta + &b1 * &t.inv_q;
    let inv_rt_prime = &b1 * &t.inv_r;
    in_unit_open("1/q~'", &inv_qt_prime)?;
    in_unit_open("1/r~'", &inv_rt_prime)?;
    let dual = DualTriple::new(
        int(1) - &inv_qt_prime,
        int(1) - &inv_rt_prime,
        p.alpha() - &t.gamma * &b1,
    );
    let mut checks = prop1_dual_conditions(&dual, s, p.d());
    // q > q~'
    checks.push("time_ordering", t.inv_q < inv_qt_prime);
    Ok(DualDerivation {
        dual,
        theta,
        checks,
    })
}

/// Dual triple of the `L^2` nonlinear estimate.
pub fn derive_dual_l2(p: &ProblemParams, t: &ExponentTriple) -> Result<DualDerivation> {
    let theta0 = compute_thetas(p).theta0;
    holder_dual(p, t, theta0, &int(0))
}

/// Dual triple of the first `H^s` nonlinear estimate (no derivative on the
/// source side).
pub fn derive_dual_hs_first(p: &ProblemParams, t: &ExponentTriple) -> Result<DualDerivation> {
    let theta1 = compute_thetas(p).theta1;
    holder_dual(p, t, theta1, p.s())
}

/// Feasible set for `x = 1/r~_2`:
/// `(2s - alpha + gamma(beta+1))/d - (beta+1)/r + 1 < x
///    <= (d - alpha + gamma(beta+1))/(d-2) - d(beta+1)/((d-2) r)`,
/// `1 - (beta+1)/r <= x <= s/d + 1 - (beta+1)/r`, `s < x < 1/2`.
pub(crate) fn second_dual_interval(p: &ProblemParams, t: &ExponentTriple) -> Interval {
    let d = int(p.d() as i64);
    let (alpha, s) = (p.alpha(), p.s());
    let b1 = p.beta() + int(1);
    let g = &t.gamma * &b1;
    let br = &b1 * &t.inv_r;

    let mut iv = Interval::open(s.clone(), rat(1, 2));
    iv.raise_lower(
        (int(2) * s - alpha + &g) / &d - &br + int(1),
        false,
    );
    iv.lower_upper(
        (&d - alpha + &g) / (&d - int(2)) - &d * &br / (&d - int(2)),
        true,
    );
    iv.raise_lower(int(1) - &br, true);
    iv.lower_upper(s / &d + int(1) - &br, true);
    iv
}

/// Dual triple of the second `H^s` nonlinear estimate, which carries
/// `|nabla|^{-s}` and goes through the weighted Sobolev embedding.
pub fn derive_dual_hs_second(
    p: &ProblemParams,
    t: &ExponentTriple,
) -> Result<SecondDualDerivation> {
    let d = int(p.d() as i64);
    let (alpha, s) = (p.alpha(), p.s());
    let b1 = p.beta() + int(1);
    let iv = second_dual_interval(p, t);
    let inv_rt = iv
        .midpoint()
        .ok_or_else(|| Error::EmptyFeasibleInterval(iv.describe()))?;
    let inv_rt_prime = int(1) - &inv_rt;
    let a = alpha - &t.gamma * &b1;
    let br = &b1 * &t.inv_r;
    let gamma_t = &a - s - &d * &inv_rt_prime + &d * &br;
    // 2/q~_2 = -d/2 + alpha - gamma(beta+1) + d(beta+1)/r
    let inv_qt = (-(&d / int(2)) + &a + &d * &br) / int(2);
    let theta2 = compute_thetas(p).theta2;
    let inv_qt_prime = int(1) - &inv_qt;
    in_unit_open("1/q~_2'", &inv_qt_prime)?;
    in_unit_open("1/r~_2'", &inv_rt_prime)?;

    let dual = DualTriple::new(inv_qt, inv_rt, gamma_t.clone());
    let mut checks = prop1_dual_conditions(&dual, s, p.d());
    checks.push("time_ordering", t.inv_q < inv_qt_prime);
    checks.push(
        "theta_consistent",
        inv_qt_prime == &theta2 + &b1 * &t.inv_q,
    );
    // weighted Sobolev embedding: 1 < r/(beta+1) <= r~_2' < inf
    checks.push("sobolev_p_above_one", br < int(1));
    checks.push("sobolev_p_le_q", inv_rt_prime <= br);
    checks.push("sobolev_q_finite", inv_rt_prime > int(0));
    // -d/r~_2' < gamma~_2 <= alpha - gamma(beta+1) < d - d(beta+1)/r
    checks.push("sobolev_b_lower", -(&d * &inv_rt_prime) < gamma_t);
    checks.push("sobolev_b_le_a", gamma_t <= a);
    checks.push("sobolev_a_upper", a < &d - &d * &br);
    checks.push(
        "sobolev_balance",
        &a - &gamma_t - s == &d * &inv_rt_prime - &d * &br,
    );
    Ok(SecondDualDerivation {
        derivation: DualDerivation {
            dual,
            theta: theta2,
            checks,
        },
        interval: iv.describe(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::{check_prop1_dual, check_thm2, gamma_window, inv_r_window, Mode};

    #[test]
    fn l2_worked_example() {
        let p = ProblemParams::l2(3, int(1), rat(2, 3), 1).unwrap();
        let t = ExponentTriple::from_scaling(3, &int(0), rat(2, 5), rat(1, 2));
        let dd = derive_dual_l2(&p, &t).unwrap();
        assert_eq!(dd.dual.inv_rt_prime(), rat(2, 3));
        assert_eq!(dd.dual.gamma_t, rat(1, 6));
        assert_eq!(dd.theta, int(0));
        assert_eq!(dd.dual.inv_qt_prime(), rat(2, 3));
        assert!(dd.passes(), "{:?}", dd.checks.failures());
        assert!(check_prop1_dual(&dd.dual, &int(0), 3));
    }

    fn critical_hs() -> ProblemParams {
        let s = rat(1, 10);
        let p = ProblemParams::new(3, rat(3, 2), int(1), s, 1).unwrap();
        p.with_beta(p.critical_beta()).unwrap()
    }

    fn mid_triple(p: &ProblemParams) -> ExponentTriple {
        let g = gamma_window(p, Mode::Hs).midpoint().unwrap();
        let r = inv_r_window(p, Mode::Hs, &g).midpoint().unwrap();
        ExponentTriple::from_scaling(p.d(), p.s(), r, g)
    }

    #[test]
    fn hs_first_dual_at_critical_power() {
        let p = critical_hs();
        let t = mid_triple(&p);
        assert!(check_thm2(&p, &t));
        let dd = derive_dual_hs_first(&p, &t).unwrap();
        assert_eq!(dd.theta, int(0));
        assert!(dd.passes(), "{:?}", dd.checks.failures());
    }

    #[test]
    fn hs_second_dual_interval_and_midpoint() {
        let p = critical_hs();
        let t = mid_triple(&p);
        let iv = second_dual_interval(&p, &t);
        assert!(!iv.is_empty(), "{}", iv.describe());
        let dd = derive_dual_hs_second(&p, &t).unwrap();
        assert!(iv.contains(&dd.derivation.dual.inv_rt));
        assert!(dd.derivation.passes(), "{:?}", dd.derivation.checks.failures());
        let first = derive_dual_hs_first(&p, &t).unwrap();
        assert_eq!(&dd.derivation.theta - &first.theta, p.s() / int(2));
    }
}
