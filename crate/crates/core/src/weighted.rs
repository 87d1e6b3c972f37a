//! Weighted Lebesgue and mixed space-time norms with power weights, and
//! numerical audits of the Hölder-chain nonlinear estimates.
//!
//! The weight `|x|^{-r gamma}` is evaluated at `max(|x|, h/2)`, the same
//! regularized distance the solver uses in the nonlinearity. With that choice
//! every Hölder step of the nonlinear estimates holds on the grid exactly.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{DualTriple, ExponentTriple, ProblemParams};
use crate::field::{ComplexField, Trajectory};
use crate::solver::nonlinear_term;
use crate::spectral::{fractional_derivative, Spectral};

/// Exponents of `L^q_t L^r_x(|x|^{-r gamma})`. A negative `gamma` gives the
/// growing weights of the source-side norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNormSpec {
    r: f64,
    gamma: f64,
    q: Option<f64>,
}

impl WeightedNormSpec {
    pub fn new(r: f64, gamma: f64, q: Option<f64>) -> Result<Self> {
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::InvalidNormSpec(format!("r must be in [1, inf), got {r}")));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidNormSpec(format!("gamma must be finite, got {gamma}")));
        }
        if let Some(q) = q {
            if !(q.is_finite() && q >= 1.0) {
                return Err(Error::InvalidNormSpec(format!("q must be in [1, inf), got {q}")));
            }
        }
        Ok(Self { r, gamma, q })
    }

    pub fn spatial(r: f64, gamma: f64) -> Result<Self> {
        Self::new(r, gamma, None)
    }

    /// `L^q L^r(|x|^{-r gamma})` of a primal triple.
    pub fn from_triple(t: &ExponentTriple) -> Result<Self> {
        Self::new(t.r(), t.gamma_f64(), Some(t.q()))
    }

    /// `L^{q~'} L^{r~'}(|x|^{r~' gamma~})` of a dual triple.
    pub fn from_dual(t: &DualTriple) -> Result<Self> {
        Self::new(t.rt_prime(), -t.gamma_t_f64(), Some(t.qt_prime()))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    /// Rejects `r gamma >= d`.
    pub fn check_integrable(&self, dimension: usize) -> Result<()> {
        let power = self.r * self.gamma;
        if power >= dimension as f64 {
            return Err(Error::WeightNotIntegrable { power, dimension });
        }
        Ok(())
    }
}

/// `(sum_x max(|x|, h/2)^{-r gamma} |f(x)|^r h^d)^{1/r}`.
pub fn weighted_lebesgue_norm(f: &ComplexField, spec: &WeightedNormSpec) -> Result<f64> {
    spec.check_integrable(f.grid().dimension())?;
    Ok(norm_with(f, spec.r, weight_table(f, spec).as_deref()))
}

/// `max(|x|, h/2)^{-r gamma}` per point, `None` for the flat weight.
fn weight_table(f: &ComplexField, spec: &WeightedNormSpec) -> Option<Vec<f64>> {
    if spec.gamma == 0.0 {
        return None;
    }
    let p = -spec.r * spec.gamma;
    Some(f.grid().clamped_radii().into_iter().map(|c| c.powf(p)).collect())
}

fn norm_with(f: &ComplexField, r: f64, weights: Option<&[f64]>) -> f64 {
    let half = 0.5 * r;
    let sum: f64 = match weights {
        None => f.values().iter().map(|z| z.norm_sqr().powf(half)).sum(),
        Some(w) => f
            .values()
            .iter()
            .zip(w)
            .map(|(z, c)| c * z.norm_sqr().powf(half))
            .sum(),
    };
    (sum * f.grid().cell_volume()).powf(1.0 / r)
}

/// Composite-trapezoid weights of the snapshot mesh.
pub fn trapezoid_weights(steps: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; steps + 1];
    w[0] = 0.5 * dt;
    w[steps] = 0.5 * dt;
    w
}

/// `(int_0^T a(t)^q dt)^{1/q}` for nonnegative samples on the mesh.
pub fn time_norm(samples: &[f64], dt: f64, q: f64) -> f64 {
    let w = trapezoid_weights(samples.len() - 1, dt);
    let s: f64 = samples.iter().zip(&w).map(|(a, w)| w * a.powf(q)).sum();
    s.powf(1.0 / q)
}

/// `L^q_t L^r_x(|x|^{-r gamma})` on `[0, T]`, trapezoid in time.
pub fn spacetime_norm(traj: &Trajectory, spec: &WeightedNormSpec) -> Result<f64> {
    let q = spec
        .q
        .ok_or_else(|| Error::InvalidNormSpec("space-time norm needs q".into()))?;
    let spatial = spatial_norms(traj, spec)?;
    Ok(time_norm(&spatial, traj.dt(), q))
}

fn spatial_norms(traj: &Trajectory, spec: &WeightedNormSpec) -> Result<Vec<f64>> {
    spec.check_integrable(traj.grid().dimension())?;
    let weights = weight_table(traj.initial(), spec);
    Ok(traj
        .snapshots()
        .iter()
        .map(|s| norm_with(s, spec.r, weights.as_deref()))
        .collect())
}

/// Space-time norms of the free evolution `e^{it Delta} f` on `[0, T]` for
/// several exponent sets at once, without storing the trajectory.
pub fn free_spacetime_norms(
    f: &ComplexField,
    final_time: f64,
    steps: usize,
    specs: &[WeightedNormSpec],
) -> Result<Vec<f64>> {
    if !(final_time.is_finite() && final_time > 0.0 && steps >= 1) {
        return Err(Error::InvalidConfig("need T > 0 and at least one step".into()));
    }
    let mut qs = Vec::with_capacity(specs.len());
    let mut tables = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.check_integrable(f.grid().dimension())?;
        qs.push(
            spec.q
                .ok_or_else(|| Error::InvalidNormSpec("space-time norm needs q".into()))?,
        );
        tables.push(weight_table(f, spec));
    }
    let spectral = Spectral::new(f.grid());
    let mut f_hat = f.values().to_vec();
    spectral.forward_in_place(&mut f_hat);
    let dt = final_time / steps as f64;
    let mut samples = vec![Vec::with_capacity(steps + 1); specs.len()];
    for k in 0..=steps {
        let t = k as f64 * dt;
        let mut v: Vec<Complex64> = f_hat
            .iter()
            .zip(spectral.frequency_norms_sq())
            .map(|(z, &k2)| z * Complex64::from_polar(1.0, -t * k2))
            .collect();
        spectral.inverse_in_place(&mut v);
        let u = ComplexField::from_parts(f.grid().clone(), v);
        for ((spec, w), out) in specs.iter().zip(&tables).zip(samples.iter_mut()) {
            out.push(norm_with(&u, spec.r, w.as_deref()));
        }
    }
    Ok(samples
        .iter()
        .zip(qs)
        .map(|(a, q)| time_norm(a, dt, q))
        .collect())
}

/// Both sides of a space-time inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Additive quadrature budget from comparing with the half-resolution
    /// time mesh.
    pub slack: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub const RELATIVE_TOLERANCE: f64 = 1e-6;

    fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + Self::RELATIVE_TOLERANCE) + slack;
        Self {
            lhs,
            rhs,
            slack,
            holds,
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.rhs > 0.0 {
            self.lhs / self.rhs
        } else if self.lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn source_trajectory(u: &Trajectory, v: &Trajectory, alpha: f64, beta: f64) -> Result<Trajectory> {
    u.check_mesh(v)?;
    let snaps = u
        .snapshots()
        .iter()
        .zip(v.snapshots())
        .map(|(a, b)| nonlinear_term(a, b, alpha, beta))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(u.final_time(), snaps)
}

/// `lhs = || |x|^{-alpha} |u|^beta v ||_{dual}`, `rhs = T^theta ||u||^beta ||v||`.
fn holder_sides(
    u: &Trajectory,
    v: &Trajectory,
    alpha: f64,
    beta: f64,
    theta: f64,
    primal: &WeightedNormSpec,
    dual: &WeightedNormSpec,
) -> Result<(f64, f64)> {
    let f = source_trajectory(u, v, alpha, beta)?;
    let lhs = spacetime_norm(&f, dual)?;
    let nu = spacetime_norm(u, primal)?;
    let nv = spacetime_norm(v, primal)?;
    let rhs = u.final_time().powf(theta) * nu.powf(beta) * nv;
    Ok((lhs, rhs))
}

fn with_richardson(
    u: &Trajectory,
    v: &Trajectory,
    sides: impl Fn(&Trajectory, &Trajectory) -> Result<(f64, f64)>,
) -> Result<InequalityCheck> {
    let (lhs, rhs) = sides(u, v)?;
    let slack = match (u.coarsened(), v.coarsened()) {
        (Some(uc), Some(vc)) => {
            let (lc, rc) = sides(&uc, &vc)?;
            ((lhs - lc).abs() + (rhs - rc).abs()) / 3.0
        }
        _ => 0.0,
    };
    Ok(InequalityCheck::new(lhs, rhs, slack))
}

/// The `L^2`-theory nonlinear estimate with constant 1 on `[0, T]`,
/// `T = u.final_time()`.
pub fn check_nonlinear_estimate_l2(
    u: &Trajectory,
    v: &Trajectory,
    params: &ProblemParams,
    triple: &ExponentTriple,
    dual: &DualTriple,
    theta0: f64,
) -> Result<InequalityCheck> {
    let primal = WeightedNormSpec::from_triple(triple)?;
    let dspec = WeightedNormSpec::from_dual(dual)?;
    let (alpha, beta) = (params.alpha_f64(), params.beta_f64());
    with_richardson(u, v, |a, b| {
        holder_sides(a, b, alpha, beta, theta0, &primal, &dspec)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsEstimateReport {
    /// First estimate, constant 1.
    pub first: InequalityCheck,
    /// Second estimate: `lhs` is the `|nabla|^{-s}` source norm, `rhs` is
    /// `T^{theta2} ||u||^beta ||v||`; only the ratio is meaningful.
    pub second_lhs: f64,
    pub second_rhs: f64,
}

impl HsEstimateReport {
    pub fn second_ratio(&self) -> f64 {
        if self.second_rhs > 0.0 {
            self.second_lhs / self.second_rhs
        } else {
            0.0
        }
    }
}

/// Both `H^s`-theory nonlinear estimates on `[0, T]`.
pub fn check_nonlinear_estimate_hs(
    u: &Trajectory,
    v: &Trajectory,
    params: &ProblemParams,
    triple: &ExponentTriple,
    first: (&DualTriple, f64),
    second: (&DualTriple, f64),
) -> Result<HsEstimateReport> {
    let primal = WeightedNormSpec::from_triple(triple)?;
    let d1 = WeightedNormSpec::from_dual(first.0)?;
    let d2 = WeightedNormSpec::from_dual(second.0)?;
    let (alpha, beta, s) = (params.alpha_f64(), params.beta_f64(), params.s_f64());
    let first_check = with_richardson(u, v, |a, b| {
        holder_sides(a, b, alpha, beta, first.1, &primal, &d1)
    })?;

    let f = source_trajectory(u, v, alpha, beta)?;
    let smoothed = f
        .snapshots()
        .iter()
        .map(|x| fractional_derivative(x, -s))
        .collect::<Result<Vec<_>>>()?;
    let smoothed = Trajectory::new(f.final_time(), smoothed)?;
    let second_lhs = spacetime_norm(&smoothed, &d2)?;
    let second_rhs = u.final_time().powf(second.1)
        * spacetime_norm(u, &primal)?.powf(beta)
        * spacetime_norm(v, &primal)?;
    Ok(HsEstimateReport {
        first: first_check,
        second_lhs,
        second_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;

    #[test]
    fn spec_validation() {
        assert!(WeightedNormSpec::new(0.5, 0.0, None).is_err());
        assert!(WeightedNormSpec::new(f64::INFINITY, 0.0, None).is_err());
        assert!(WeightedNormSpec::new(2.0, 0.0, Some(0.5)).is_err());
        let s = WeightedNormSpec::spatial(2.0, 1.5).unwrap();
        assert_eq!(
            s.check_integrable(3),
            Err(Error::WeightNotIntegrable {
                power: 3.0,
                dimension: 3
            })
        );
    }

    #[test]
    fn unweighted_norm_is_plain_quadrature() {
        let g = GridSpec::new(2, 8, 2.0).unwrap();
        let f = ComplexField::from_fn(g.clone(), |x| Complex64::new(x[0], x[1] * 0.5)).unwrap();
        let spec = WeightedNormSpec::spatial(3.0, 0.0).unwrap();
        let direct: f64 = f.values().iter().map(|z| z.norm_sqr().powf(1.5)).sum();
        let direct = (direct * g.cell_volume()).powf(1.0 / 3.0);
        assert_eq!(weighted_lebesgue_norm(&f, &spec).unwrap(), direct);
    }

    #[test]
    fn constant_trajectory_time_factor() {
        let g = GridSpec::new(3, 8, 4.0).unwrap();
        let f = ComplexField::gaussian(g, 1.0, 1.0);
        let spec = WeightedNormSpec::new(3.0, 0.5, Some(4.0)).unwrap();
        let x = weighted_lebesgue_norm(&f, &spec).unwrap();
        let t = Trajectory::constant(f, 0.7, 6).unwrap();
        let n = spacetime_norm(&t, &spec).unwrap();
        assert!((n - 0.7f64.powf(0.25) * x).abs() < 1e-12 * n);
    }
}
