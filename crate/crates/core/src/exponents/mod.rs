//! Exact exponent systems of the weighted Strichartz approach.
//!
//! Everything here is decided in rational arithmetic. Exponents are stored as
//! reciprocals `1/q`, `1/r` because every condition is affine in them, so open
//! and closed bounds are resolved exactly.

mod audit;
mod conditions;
mod dual;
mod hypothesis;
pub mod rational;
mod region;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
pub use rational::{format_rational, int, parse_rational, rat, to_f64, Interval, Rational};

pub use audit::{audit_random_params, audit_triples, sample_params, AuditFailure, AuditSummary};
pub use conditions::{
    check_interp_region, check_prop1, check_prop1_dual, check_thm1, check_thm2, classical_conditions,
    interp_conditions, theorem_conditions,
    prop1_conditions, prop1_dual_conditions, thm1_conditions, thm2_conditions,
};
pub use dual::{
    derive_dual_hs_first, derive_dual_hs_second, derive_dual_l2, DualDerivation,
    SecondDualDerivation,
};
pub use hypothesis::{hypothesis_feasible, HypothesisRegion};
pub use region::{gamma_window, inv_r_window, region_sample, DEFAULT_DENOMINATOR_BITS};

/// Which well-posedness theorem a parameter set is read against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `L^2` theory, `0 < beta <= (4 - 2 alpha)/d`, `s = 0`.
    L2,
    /// `H^s` theory, `0 < s < 1/3`, up to `beta = (4 - 2 alpha)/(d - 2s)`.
    Hs,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Mode::L2),
            "hs" => Ok(Mode::Hs),
            other => Err(Error::InvalidConfig(format!("unknown mode '{other}'"))),
        }
    }
}

/// PDE parameters `(d, alpha, beta, s, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ProblemParams {
    d: u32,
    #[serde(with = "rational::serde_rational")]
    alpha: Rational,
    #[serde(with = "rational::serde_rational")]
    beta: Rational,
    #[serde(with = "rational::serde_rational")]
    s: Rational,
    lambda: i8,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    d: u32,
    #[serde(with = "rational::serde_rational")]
    alpha: Rational,
    #[serde(with = "rational::serde_rational")]
    beta: Rational,
    #[serde(with = "rational::serde_rational", default)]
    s: Rational,
    lambda: i8,
}

impl TryFrom<RawParams> for ProblemParams {
    type Error = Error;

    fn try_from(p: RawParams) -> Result<Self> {
        Self::new(p.d, p.alpha, p.beta, p.s, p.lambda)
    }
}

impl ProblemParams {
    /// Checks the ranges common to both theorems: `d >= 3`, `0 < alpha < 2`,
    /// `beta > 0`, `0 <= s < 1/3`, `lambda = +-1`.
    pub fn new(d: u32, alpha: Rational, beta: Rational, s: Rational, lambda: i8) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if d < 3 {
            return bad("d must be >= 3");
        }
        if !(alpha > int(0) && alpha < int(2)) {
            return bad("alpha must lie in (0, 2)");
        }
        if beta <= int(0) {
            return bad("beta must be positive");
        }
        if !(s >= int(0) && s < rat(1, 3)) {
            return bad("s must lie in [0, 1/3)");
        }
        if lambda != 1 && lambda != -1 {
            return bad("lambda must be +1 (defocusing) or -1 (focusing)");
        }
        Ok(Self {
            d,
            alpha,
            beta,
            s,
            lambda,
        })
    }

    pub fn l2(d: u32, alpha: Rational, beta: Rational, lambda: i8) -> Result<Self> {
        Self::new(d, alpha, beta, int(0), lambda)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn lambda(&self) -> i8 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: i8) -> Result<Self> {
        Self::new(self.d, self.alpha.clone(), self.beta.clone(), self.s.clone(), lambda)
    }

    pub fn with_beta(&self, beta: Rational) -> Result<Self> {
        Self::new(self.d, self.alpha.clone(), beta, self.s.clone(), self.lambda)
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha)
    }

    pub fn beta_f64(&self) -> f64 {
        to_f64(&self.beta)
    }

    pub fn s_f64(&self) -> f64 {
        to_f64(&self.s)
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda as f64
    }

    /// `(4 - 2 alpha)/(d - 2s)`: the critical power for the ambient `s`.
    pub fn critical_beta(&self) -> Rational {
        (int(4) - int(2) * &self.alpha) / (int(self.d as i64) - int(2) * &self.s)
    }

    /// Hypotheses of the theorem for `mode` as named conditions.
    pub fn hypotheses(&self, mode: Mode) -> Conditions {
        conditions::hypotheses(self, mode)
    }

    pub fn validate(&self, mode: Mode) -> Result<()> {
        let h = self.hypotheses(mode);
        if h.all() {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "hypotheses of {mode:?} mode violated: {}",
                h.failures().join(", ")
            )))
        }
    }
}

/// `(1/q, 1/r, gamma)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentTriple {
    #[serde(with = "rational::serde_rational")]
    pub inv_q: Rational,
    #[serde(with = "rational::serde_rational")]
    pub inv_r: Rational,
    #[serde(with = "rational::serde_rational")]
    pub gamma: Rational,
}

impl ExponentTriple {
    pub fn new(inv_q: Rational, inv_r: Rational, gamma: Rational) -> Self {
        Self {
            inv_q,
            inv_r,
            gamma,
        }
    }

    /// Solves `2/q = d(1/2 - 1/r) + gamma - s` for `1/q`.
    pub fn from_scaling(d: u32, s: &Rational, inv_r: Rational, gamma: Rational) -> Self {
        let inv_q = (int(d as i64) * (rat(1, 2) - &inv_r) + &gamma - s) / int(2);
        Self::new(inv_q, inv_r, gamma)
    }

    pub fn q(&self) -> f64 {
        1.0 / to_f64(&self.inv_q)
    }

    pub fn r(&self) -> f64 {
        1.0 / to_f64(&self.inv_r)
    }

    pub fn gamma_f64(&self) -> f64 {
        to_f64(&self.gamma)
    }
}

/// `(1/q~, 1/r~, gamma~)` on the source side of the inhomogeneous estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualTriple {
    #[serde(with = "rational::serde_rational")]
    pub inv_qt: Rational,
    #[serde(with = "rational::serde_rational")]
    pub inv_rt: Rational,
    #[serde(with = "rational::serde_rational")]
    pub gamma_t: Rational,
}

impl DualTriple {
    pub fn new(inv_qt: Rational, inv_rt: Rational, gamma_t: Rational) -> Self {
        Self {
            inv_qt,
            inv_rt,
            gamma_t,
        }
    }

    /// `1/q~' = 1 - 1/q~`.
    pub fn inv_qt_prime(&self) -> Rational {
        int(1) - &self.inv_qt
    }

    pub fn inv_rt_prime(&self) -> Rational {
        int(1) - &self.inv_rt
    }

    /// Conjugate time exponent `q~'`.
    pub fn qt_prime(&self) -> f64 {
        1.0 / to_f64(&self.inv_qt_prime())
    }

    pub fn rt_prime(&self) -> f64 {
        1.0 / to_f64(&self.inv_rt_prime())
    }

    pub fn gamma_t_f64(&self) -> f64 {
        to_f64(&self.gamma_t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaValues {
    #[serde(with = "rational::serde_rational")]
    pub theta0: Rational,
    #[serde(with = "rational::serde_rational")]
    pub theta1: Rational,
    #[serde(with = "rational::serde_rational")]
    pub theta2: Rational,
}

/// `s_c = d/2 - (2 - alpha)/beta`.
pub fn critical_index(params: &ProblemParams) -> Rational {
    rat(params.d as i64, 2) - (int(2) - params.alpha()) / params.beta()
}

/// Time exponents of the nonlinear estimates:
/// `theta0 = 1 - d beta/4 - alpha/2`, `theta1 = theta0 + s beta/2`,
/// `theta2 = theta0 + s(beta + 1)/2`.
pub fn compute_thetas(params: &ProblemParams) -> ThetaValues {
    let d = int(params.d as i64);
    let beta = params.beta();
    let s = params.s();
    let theta0 = int(1) - &d * beta / int(4) - params.alpha() / int(2);
    let theta1 = &theta0 + s * beta / int(2);
    let theta2 = &theta0 + s * (beta + int(1)) / int(2);
    ThetaValues {
        theta0,
        theta1,
        theta2,
    }
}

/// Life-span exponent `-beta/theta0` (so `T ~ ||u0||^{-beta/theta0}`);
/// `None` in the critical case `theta0 = 0` and beyond.
pub fn lifespan_exponent(params: &ProblemParams) -> Option<Rational> {
    let theta0 = compute_thetas(params).theta0;
    if theta0 > int(0) {
        Some(-params.beta() / theta0)
    } else {
        None
    }
}

/// Ordered list of named exact checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Conditions {
    entries: Vec<(String, bool)>,
}

impl Conditions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, holds: bool) {
        self.entries.push((name.into(), holds));
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: &Conditions) {
        for (name, ok) in &other.entries {
            self.entries.push((format!("{prefix}{name}"), *ok));
        }
    }

    pub fn all(&self) -> bool {
        self.entries.iter().all(|(_, ok)| *ok)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.entries.iter().map(|(n, ok)| (n.as_str(), *ok))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Serialize for Conditions {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (name, ok) in &self.entries {
            map.serialize_entry(name, ok)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: u32, alpha: Rational, beta: Rational, s: Rational) -> ProblemParams {
        ProblemParams::new(d, alpha, beta, s, 1).unwrap()
    }

    #[test]
    fn critical_index_examples() {
        assert_eq!(critical_index(&params(3, int(1), rat(2, 3), int(0))), int(0));
        assert_eq!(critical_index(&params(3, int(1), int(2), int(0))), int(1));
        assert_eq!(critical_index(&params(4, rat(1, 2), int(1), int(0))), rat(1, 2));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(compute_thetas(&params(3, int(1), rat(2, 3), int(0))).theta0, int(0));
        assert_eq!(compute_thetas(&params(3, int(1), rat(1, 3), int(0))).theta0, rat(1, 4));
        // critical H^s power
        let s = rat(1, 10);
        let p = params(3, rat(3, 2), int(1), s.clone());
        let p = p.with_beta(p.critical_beta()).unwrap();
        let th = compute_thetas(&p);
        assert_eq!(th.theta1, int(0));
        assert_eq!(th.theta2, &s / int(2));
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(ProblemParams::new(2, int(1), int(1), int(0), 1).is_err());
        assert!(ProblemParams::new(3, int(2), int(1), int(0), 1).is_err());
        assert!(ProblemParams::new(3, int(1), int(0), int(0), 1).is_err());
        assert!(ProblemParams::new(3, int(1), int(1), rat(1, 3), 1).is_err());
        assert!(ProblemParams::new(3, int(1), int(1), int(0), 0).is_err());
    }

    #[test]
    fn params_serialize_as_fraction_strings() {
        let p = params(3, int(1), rat(2, 3), int(0));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"d":3,"alpha":"1","beta":"2/3","s":"0","lambda":1}"#);
        let back: ProblemParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn lifespan_exponent_closed_form() {
        let p = params(3, int(1), rat(1, 3), int(0));
        // -4 beta / (4 - 2 alpha - d beta) = -(4/3)/(1) = -4/3
        assert_eq!(lifespan_exponent(&p), Some(rat(-4, 3)));
        assert_eq!(lifespan_exponent(&params(3, int(1), rat(2, 3), int(0))), None);
    }
}
