use serde::Serialize;

use super::rational::{int, max_of, rat, Interval, Rational};
use super::Conditions;

/// Parameter region of the `H^s` theorem for fixed `(d, s)` together with the
/// exact certificates that it is nonempty.
#[derive(Debug, Clone)]
pub struct HypothesisRegion {
    pub d: u32,
    pub s: Rational,
    pub alpha: Interval,
    pub certificates: Conditions,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub alpha_interval: String,
    pub beta_interval: String,
    pub certificates: Conditions,
}

/// `f_1(s) = -4 s^2 + 2 (1 + d) s`.
fn f1(d: &Rational, s: &Rational) -> Rational {
    int(-4) * s * s + int(2) * (int(1) + d) * s
}

/// `f_2(s) = -10 s^2 + (5d + 12 - 4 alpha) s`.
fn f2(d: &Rational, alpha: &Rational, s: &Rational) -> Rational {
    int(-10) * s * s + (int(5) * d + int(12) - int(4) * alpha) * s
}

/// Admissible `alpha` for `(d, s)` and the certificates of nonemptiness.
pub fn hypothesis_feasible(d: u32, s: &Rational) -> HypothesisRegion {
    let dd = int(d as i64);
    let third = rat(1, 3);
    let a1 = (int(26) - int(3) * &dd) / int(12);
    let a2 = (int(12) * s + int(4) * &dd * s - int(8) * s * s) / (&dd + int(4) * s);
    let alpha = Interval::open(max_of(&max_of(&a1, &a2), &int(0)), int(2));

    let mut c = Conditions::new();
    c.push("d_at_least_3", d >= 3);
    c.push("s_in_range", *s >= int(0) && *s < third);
    c.push(
        "f1_increasing_on_range",
        third < (&dd + int(1)) / int(4),
    );
    c.push("f1_at_one_third_below_d", f1(&dd, &third) < dd);
    c.push("f1_bound_at_s", f1(&dd, s) < dd);
    c.push("alpha_interval_nonempty", !alpha.is_empty());
    HypothesisRegion {
        d,
        s: s.clone(),
        alpha,
        certificates: c,
    }
}

impl HypothesisRegion {
    /// `max{0, (10s - 2 alpha)/(d - 6s)} < beta <= (4 - 2 alpha)/(d - 2s)`.
    pub fn beta_interval(&self, alpha: &Rational) -> Interval {
        let d = int(self.d as i64);
        let s = &self.s;
        let lo = max_of(
            &int(0),
            &((int(10) * s - int(2) * alpha) / (&d - int(6) * s)),
        );
        Interval::open_closed(lo, (int(4) - int(2) * alpha) / (&d - int(2) * s))
    }

    /// Exact certificates that the `beta` interval is nonempty and stays
    /// below the `s_c < 1/3` threshold for this `alpha`.
    pub fn certificates_for(&self, alpha: &Rational) -> Conditions {
        let d = int(self.d as i64);
        let s = &self.s;
        let third = rat(1, 3);
        let mut c = Conditions::new();
        c.push("alpha_admissible", self.alpha.contains(alpha));
        c.push(
            "f2_increasing_on_range",
            third < (int(5) * &d + int(12) - int(4) * alpha) / int(20),
        );
        c.push(
            "f2_at_one_third_below_2d",
            f2(&d, alpha, &third) < int(2) * &d,
        );
        c.push("f2_bound_at_s", f2(&d, alpha, s) < int(2) * &d);
        let crit = (int(4) - int(2) * alpha) / (&d - int(2) * s);
        c.push("beta_interval_nonempty", !self.beta_interval(alpha).is_empty());
        if *s > int(0) {
            c.push("critical_below_gamma_limit", crit < (alpha - int(4) * s) / (int(3) * s));
        }
        c.push(
            "critical_index_below_one_third",
            crit < (int(12) - int(6) * alpha) / (int(3) * &d - int(2)),
        );
        c
    }

    pub fn report(&self, alpha: &Rational) -> HypothesisReport {
        let mut certificates = self.certificates.clone();
        certificates.extend_prefixed("", &self.certificates_for(alpha));
        HypothesisReport {
            alpha_interval: self.alpha.describe(),
            beta_interval: self.beta_interval(alpha).describe(),
            certificates,
        }
    }
}
