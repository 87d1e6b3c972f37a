//! Time integration of `i u_t + Delta u = lambda |x|^{-alpha} |u|^beta u`.
//!
//! Two independent integrators share the grid and the regularized weight
//! `max(|x|, h/2)^{-alpha}`: Picard iteration of the Duhamel map with a
//! trapezoid time integral, and Strang split-step Fourier.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{compute_thetas, to_f64, ExponentTriple, ProblemParams};
use crate::field::{ComplexField, Trajectory};
use crate::spectral::{free_propagate, Spectral};
use crate::weighted::{spacetime_norm, WeightedNormSpec};

/// Default blow-up ceiling relative to the initial sup norm.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// `max(|x|, h/2)^{-alpha} |u|^beta v` pointwise.
pub fn nonlinear_term(
    u: &ComplexField,
    v: &ComplexField,
    alpha: f64,
    beta: f64,
) -> Result<ComplexField> {
    u.check_grid(v)?;
    let values = u
        .values()
        .iter()
        .zip(v.values())
        .zip(u.grid().clamped_radii())
        .map(|((a, b), c)| b * (c.powf(-alpha) * a.norm().powf(beta)))
        .collect();
    ComplexField::new(u.grid().clone(), values)
}

/// `F(u) = lambda max(|x|, h/2)^{-alpha} |u|^beta u`.
pub fn apply_nonlinearity(u: &ComplexField, params: &ProblemParams) -> ComplexField {
    let w = weights(u.grid(), params.alpha_f64());
    let mut out = u.values().to_vec();
    nonlinearity_in_place(&mut out, &w, params.beta_f64(), params.lambda_f64());
    ComplexField::from_parts(u.grid().clone(), out)
}

fn weights(grid: &crate::grid::GridSpec, alpha: f64) -> Vec<f64> {
    grid.clamped_radii()
        .into_iter()
        .map(|c| c.powf(-alpha))
        .collect()
}

fn nonlinearity_in_place(data: &mut [Complex64], w: &[f64], beta: f64, lambda: f64) {
    for (z, &w) in data.iter_mut().zip(w) {
        *z *= lambda * w * z.norm().powf(beta);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    pub final_time: f64,
    pub steps: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Radius of the contraction ball; informational, not enforced.
    #[serde(default)]
    pub m_bound: Option<f64>,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
    /// Drops the nonlinearity (`F = 0`).
    #[serde(default)]
    pub linear: bool,
}

fn default_max_iter() -> usize {
    64
}

fn default_tol() -> f64 {
    1e-10
}

fn default_blowup() -> f64 {
    BLOWUP_FACTOR
}

impl PicardConfig {
    pub fn new(final_time: f64, steps: usize) -> Self {
        Self {
            final_time,
            steps,
            max_iter: default_max_iter(),
            tol: default_tol(),
            m_bound: None,
            blowup_factor: default_blowup(),
            linear: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.final_time.is_finite() && self.final_time > 0.0) {
            return bad(format!("final time must be positive, got {}", self.final_time));
        }
        if self.steps < 8 {
            return bad(format!("need at least 8 time steps, got {}", self.steps));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.blowup_factor > 1.0) {
            return bad(format!("blow-up factor must exceed 1, got {}", self.blowup_factor));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.final_time / self.steps as f64
    }
}

struct BlowUpGuard {
    ceiling: f64,
}

impl BlowUpGuard {
    fn new(u0: &ComplexField, factor: f64) -> Self {
        let sup = u0.sup_norm();
        Self {
            ceiling: if sup > 0.0 { sup * factor } else { f64::INFINITY },
        }
    }

    fn check(&self, values: &[Complex64], time: f64) -> Result<()> {
        let bad = values
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()) || z.norm() > self.ceiling);
        if bad {
            Err(Error::BlowUp { time })
        } else {
            Ok(())
        }
    }
}

/// Evaluates the Duhamel map on a fixed mesh. In Fourier variables, with
/// `E = e^{-i dt |xi|^2}`,
/// `B_{k+1} = E (B_k + dt/2 F_k) + dt/2 F_{k+1}` and
/// `Phi(u)(t_k) = E^k u0 - i B_k`.
struct DuhamelOperator {
    spectral: Spectral,
    step: Vec<Complex64>,
    weights: Vec<f64>,
    u0_hat: Vec<Complex64>,
    u0: ComplexField,
    beta: f64,
    lambda: f64,
    dt: f64,
    steps: usize,
    linear: bool,
    guard: BlowUpGuard,
}

impl DuhamelOperator {
    fn new(u0: &ComplexField, params: &ProblemParams, config: &PicardConfig) -> Result<Self> {
        config.validate()?;
        let grid = u0.grid();
        let spectral = Spectral::new(grid);
        let dt = config.dt();
        let step = spectral
            .frequency_norms_sq()
            .iter()
            .map(|&k2| Complex64::from_polar(1.0, -dt * k2))
            .collect();
        let mut u0_hat = u0.values().to_vec();
        spectral.forward_in_place(&mut u0_hat);
        Ok(Self {
            weights: weights(grid, params.alpha_f64()),
            spectral,
            step,
            u0_hat,
            u0: u0.clone(),
            beta: params.beta_f64(),
            lambda: params.lambda_f64(),
            dt,
            steps: config.steps,
            linear: config.linear,
            guard: BlowUpGuard::new(u0, config.blowup_factor),
        })
    }

    fn source_hat(&self, u: &ComplexField) -> Vec<Complex64> {
        let mut f = u.values().to_vec();
        nonlinearity_in_place(&mut f, &self.weights, self.beta, self.lambda);
        self.spectral.forward_in_place(&mut f);
        f
    }

    /// `Phi(u)`, or the free evolution of `u0` when `u` is `None`.
    fn apply(&self, u: Option<&Trajectory>) -> Result<Trajectory> {
        let grid = self.u0.grid().clone();
        let n = grid.len();
        let zero = Complex64::new(0.0, 0.0);
        let half = Complex64::new(0.5 * self.dt, 0.0);
        let mut free = self.u0_hat.clone();
        let mut acc = vec![zero; n];
        let source = |k: usize| -> Option<Vec<Complex64>> {
            match u {
                Some(u) if !self.linear => Some(self.source_hat(&u.snapshots()[k])),
                _ => None,
            }
        };
        let mut prev = source(0);
        let mut snaps = Vec::with_capacity(self.steps + 1);
        snaps.push(self.u0.clone());
        for k in 1..=self.steps {
            let next = source(k);
            for i in 0..n {
                free[i] *= self.step[i];
            }
            if let (Some(p), Some(nx)) = (&prev, &next) {
                for i in 0..n {
                    acc[i] = (acc[i] + half * p[i]) * self.step[i] + half * nx[i];
                }
            }
            let mut out: Vec<Complex64> = free
                .iter()
                .zip(&acc)
                .map(|(f, b)| f - Complex64::i() * b)
                .collect();
            self.spectral.inverse_in_place(&mut out);
            self.guard.check(&out, k as f64 * self.dt)?;
            snaps.push(ComplexField::from_parts(grid.clone(), out));
            prev = next;
        }
        Trajectory::new(self.steps as f64 * self.dt, snaps)
    }
}

/// `e^{it Delta} u0` on the mesh of `config`.
pub fn free_trajectory(u0: &ComplexField, config: &PicardConfig) -> Result<Trajectory> {
    config.validate()?;
    let spectral = Spectral::new(u0.grid());
    let dt = config.dt();
    let mut u0_hat = u0.values().to_vec();
    spectral.forward_in_place(&mut u0_hat);
    let mut snaps = Vec::with_capacity(config.steps + 1);
    snaps.push(u0.clone());
    for k in 1..=config.steps {
        let t = k as f64 * dt;
        let mut v: Vec<Complex64> = u0_hat
            .iter()
            .zip(spectral.frequency_norms_sq())
            .map(|(z, &k2)| z * Complex64::from_polar(1.0, -t * k2))
            .collect();
        spectral.inverse_in_place(&mut v);
        snaps.push(ComplexField::from_parts(u0.grid().clone(), v));
    }
    Trajectory::new(config.final_time, snaps)
}

/// `Phi_{u0}(u)(t) = e^{it Delta} u0 - i int_0^t e^{i(t - tau) Delta} F(u(tau)) dtau`
/// on the mesh of `u`.
pub fn duhamel_map(
    traj: &Trajectory,
    u0: &ComplexField,
    params: &ProblemParams,
    config: &PicardConfig,
) -> Result<Trajectory> {
    if traj.grid() != u0.grid() {
        return Err(Error::GridMismatch);
    }
    if traj.steps() != config.steps
        || (traj.final_time() - config.final_time).abs() > 1e-12 * config.final_time
    {
        return Err(Error::InvalidConfig(
            "trajectory mesh differs from the configured mesh".into(),
        ));
    }
    DuhamelOperator::new(u0, params, config)?.apply(Some(traj))
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// `sup_t ||u^(k+1)(t) - u^(k)(t)||_{L^2}` for every iteration.
    pub increments: Vec<f64>,
}

impl PicardSolution {
    /// Ratios of consecutive increments.
    pub fn increment_ratios(&self) -> Vec<f64> {
        self.increments
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Picard iteration from the free evolution until the sup-in-time `L^2`
/// increment drops below `config.tol`.
pub fn picard_solve(
    u0: &ComplexField,
    params: &ProblemParams,
    config: &PicardConfig,
) -> Result<PicardSolution> {
    let op = DuhamelOperator::new(u0, params, config)?;
    let mut u = op.apply(None)?;
    let scale = u.sup_l2_norm().max(f64::MIN_POSITIVE);
    let mut increments = Vec::new();
    for it in 1..=config.max_iter {
        let next = op.apply(Some(&u))?;
        let inc = next.sup_l2_distance(&u)?;
        increments.push(inc);
        u = next;
        if inc < config.tol {
            return Ok(PicardSolution {
                trajectory: u,
                iterations: it,
                increments,
            });
        }
        // increments far above the data size: the iteration left any ball
        if !inc.is_finite() || inc > 1e3 * scale {
            return Err(Error::NoConvergence {
                iterations: it,
                last_increment: inc,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: config.max_iter,
        last_increment: *increments.last().unwrap_or(&f64::NAN),
    })
}

/// Strang split-step Fourier with `steps` steps of size `final_time/steps`:
/// half free step, exact phase rotation `e^{-i lambda w |u|^beta dt}`, half
/// free step.
pub fn splitstep_solve_steps(
    u0: &ComplexField,
    params: &ProblemParams,
    final_time: f64,
    steps: usize,
) -> Result<Trajectory> {
    splitstep_solve_with(u0, params, final_time, steps, false)
}

pub(crate) fn splitstep_solve_with(
    u0: &ComplexField,
    params: &ProblemParams,
    final_time: f64,
    steps: usize,
    linear: bool,
) -> Result<Trajectory> {
    if !(final_time.is_finite() && final_time > 0.0) || steps == 0 {
        return Err(Error::InvalidConfig(format!(
            "split-step needs T > 0 and at least one step, got T = {final_time}, steps = {steps}"
        )));
    }
    let grid = u0.grid().clone();
    let spectral = Spectral::new(&grid);
    let dt = final_time / steps as f64;
    let half: Vec<Complex64> = spectral
        .frequency_norms_sq()
        .iter()
        .map(|&k2| Complex64::from_polar(1.0, -0.5 * dt * k2))
        .collect();
    let w = weights(&grid, params.alpha_f64());
    let (beta, lambda) = (params.beta_f64(), params.lambda_f64());
    let guard = BlowUpGuard::new(u0, BLOWUP_FACTOR);
    let mut state = u0.values().to_vec();
    let mut snaps = Vec::with_capacity(steps + 1);
    snaps.push(u0.clone());
    let half_step = |v: &mut Vec<Complex64>| {
        spectral.forward_in_place(v);
        for (z, p) in v.iter_mut().zip(&half) {
            *z *= p;
        }
        spectral.inverse_in_place(v);
    };
    for k in 1..=steps {
        half_step(&mut state);
        if !linear {
            for (z, &wx) in state.iter_mut().zip(&w) {
                let phase = -lambda * wx * z.norm().powf(beta) * dt;
                *z *= Complex64::from_polar(1.0, phase);
            }
        }
        half_step(&mut state);
        guard.check(&state, k as f64 * dt)?;
        snaps.push(ComplexField::from_parts(grid.clone(), state.clone()));
    }
    Trajectory::new(final_time, snaps)
}

/// Strang split-step with step `dt`, which must divide `final_time`.
pub fn splitstep_solve(
    u0: &ComplexField,
    params: &ProblemParams,
    dt: f64,
    final_time: f64,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let steps = (final_time / dt).round();
    if steps < 1.0 || (steps * dt - final_time).abs() > 1e-9 * final_time {
        return Err(Error::InvalidConfig(format!(
            "dt = {dt} does not divide T = {final_time}"
        )));
    }
    splitstep_solve_steps(u0, params, final_time, steps as usize)
}

/// `d(u, v) = sup_t ||u - v||_{L^2} + ||u - v||_{L^q L^r(|x|^{-r gamma})}`.
pub fn contraction_distance(
    u: &Trajectory,
    v: &Trajectory,
    spec: &WeightedNormSpec,
) -> Result<f64> {
    let diff = u.sub(v)?;
    Ok(diff.sup_l2_norm() + spacetime_norm(&diff, spec)?)
}

/// `d(Phi u, Phi v) / d(u, v)` in the metric of the contraction argument.
pub fn contraction_ratio(
    u: &Trajectory,
    v: &Trajectory,
    u0: &ComplexField,
    params: &ProblemParams,
    config: &PicardConfig,
    triple: &ExponentTriple,
) -> Result<f64> {
    let spec = WeightedNormSpec::from_triple(triple)?;
    let base = contraction_distance(u, v, &spec)?;
    if base == 0.0 {
        return Err(Error::InvalidConfig(
            "contraction ratio needs two distinct trajectories".into(),
        ));
    }
    let pu = duhamel_map(u, u0, params, config)?;
    let pv = duhamel_map(v, u0, params, config)?;
    Ok(contraction_distance(&pu, &pv, &spec)? / base)
}

/// Bracketing settings for [`lifespan_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifespanConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub bisections: usize,
}

impl Default for LifespanConfig {
    fn default() -> Self {
        Self {
            t_min: 1e-3,
            t_max: 1e3,
            bisections: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifespanEstimate {
    pub scale: f64,
    pub t_star: f64,
    /// Largest converged and smallest failed horizon found.
    pub bracket: (f64, f64),
    /// `true` when the search hit `t_max` without a failure.
    pub censored: bool,
    pub probes: Vec<(f64, bool)>,
}

/// Largest horizon `T` on which Picard iteration for the datum `scale * u0`
/// converges within `config.max_iter` iterations, located by bisection in
/// `log T`. `config.final_time` is ignored; the step count is kept.
pub fn lifespan_estimate(
    scale: f64,
    u0: &ComplexField,
    params: &ProblemParams,
    config: &PicardConfig,
    search: &LifespanConfig,
) -> Result<LifespanEstimate> {
    subcritical_theta0(params)?;
    bisect_lifespan(scale, &u0.scale_real(scale), params, config, search)
}

fn subcritical_theta0(params: &ProblemParams) -> Result<f64> {
    let theta0 = to_f64(&compute_thetas(params).theta0);
    if theta0 <= 0.0 {
        return Err(Error::InvalidParams(
            "life-span scaling needs theta0 > 0 (subcritical power)".into(),
        ));
    }
    Ok(theta0)
}

fn bisect_lifespan(
    scale: f64,
    data: &ComplexField,
    params: &ProblemParams,
    config: &PicardConfig,
    search: &LifespanConfig,
) -> Result<LifespanEstimate> {
    if !(search.t_min > 0.0 && search.t_max > search.t_min) {
        return Err(Error::InvalidConfig("need 0 < t_min < t_max".into()));
    }
    let mut probes = Vec::new();
    let mut converges = |t: f64| -> Result<bool> {
        let cfg = PicardConfig {
            final_time: t,
            ..config.clone()
        };
        let ok = match picard_solve(data, params, &cfg) {
            Ok(_) => true,
            Err(Error::NoConvergence { .. } | Error::BlowUp { .. }) => false,
            Err(e) => return Err(e),
        };
        probes.push((t, ok));
        Ok(ok)
    };
    if !converges(search.t_min)? {
        return Ok(LifespanEstimate {
            scale,
            t_star: search.t_min,
            bracket: (0.0, search.t_min),
            censored: false,
            probes,
        });
    }
    if converges(search.t_max)? {
        return Ok(LifespanEstimate {
            scale,
            t_star: search.t_max,
            bracket: (search.t_max, f64::INFINITY),
            censored: true,
            probes,
        });
    }
    let (mut lo, mut hi) = (search.t_min, search.t_max);
    for _ in 0..search.bisections {
        let mid = (lo * hi).sqrt();
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LifespanEstimate {
        scale,
        t_star: (lo * hi).sqrt(),
        bracket: (lo, hi),
        censored: false,
        probes,
    })
}

/// How a family of data of growing `L^2` norm is generated from one profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LifespanFamily {
    /// `c * u0` on the fixed grid.
    Amplitude,
    /// The scaling image of `u0` with `mu = c^(1/e)`, `e = (2 - alpha)/beta - d/2`,
    /// on the grid contracted by `mu`. Its norm is `c ||u0||` as well.
    Scaling,
}

impl std::str::FromStr for LifespanFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplitude" => Ok(Self::Amplitude),
            "scaling" => Ok(Self::Scaling),
            other => Err(Error::InvalidConfig(format!("unknown family {other:?}"))),
        }
    }
}

/// Member `c` of the family.
pub fn family_datum(
    family: LifespanFamily,
    c: f64,
    u0: &ComplexField,
    params: &ProblemParams,
) -> Result<ComplexField> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidScale(c));
    }
    match family {
        LifespanFamily::Amplitude => Ok(u0.scale_real(c)),
        LifespanFamily::Scaling => {
            let (alpha, beta) = (params.alpha_f64(), params.beta_f64());
            let e = (2.0 - alpha) / beta - params.d() as f64 / 2.0;
            if e <= 0.0 {
                return Err(Error::InvalidParams(
                    "scaling family needs a subcritical power".into(),
                ));
            }
            u0.scaling_image(c.powf(1.0 / e), alpha, beta)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LifespanFit {
    pub family: LifespanFamily,
    pub estimates: Vec<LifespanEstimate>,
    pub norms: Vec<f64>,
    /// Least-squares slope of `log T*` against `log ||datum||_{L^2}`.
    pub slope: f64,
    /// `-beta / theta0`.
    pub predicted: f64,
}

impl LifespanFit {
    pub fn relative_error(&self) -> f64 {
        ((self.slope - self.predicted) / self.predicted).abs()
    }

    pub fn monotone(&self) -> bool {
        self.estimates.windows(2).all(|w| w[1].t_star <= w[0].t_star)
    }
}

/// Life spans over the family members `scales` (in increasing order) and
/// the fitted power law.
pub fn lifespan_fit(
    scales: &[f64],
    family: LifespanFamily,
    u0: &ComplexField,
    params: &ProblemParams,
    config: &PicardConfig,
    search: &LifespanConfig,
) -> Result<LifespanFit> {
    let theta0 = subcritical_theta0(params)?;
    if scales.len() < 2 {
        return Err(Error::InvalidConfig("need at least two scales".into()));
    }
    let results = scales
        .par_iter()
        .map(|&c| {
            let data = family_datum(family, c, u0, params)?;
            let norm = data.l2_norm();
            Ok((bisect_lifespan(c, &data, params, config, search)?, norm))
        })
        .collect::<Result<Vec<_>>>()?;
    let (estimates, norms): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let xs: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.t_star.ln()).collect();
    Ok(LifespanFit {
        family,
        estimates,
        norms,
        slope: least_squares_slope(&xs, &ys),
        predicted: -params.beta_f64() / theta0,
    })
}

/// Slope of the least-squares line through `(xs, ys)`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[derive(Debug, Clone)]
pub struct ScatteringState {
    /// `e^{-i T Delta} u(T)`.
    pub phi: ComplexField,
    /// `||e^{-i t_{k+1} Delta} u(t_{k+1}) - e^{-i t_k Delta} u(t_k)||_{L^2}`.
    pub increments: Vec<f64>,
}

/// Pulls the trajectory back by the free flow and measures how fast the
/// profiles settle. Fails with `NotCauchy` unless the increments over the
/// last quarter of the run stay below those over the first quarter.
pub fn scattering_state(traj: &Trajectory) -> Result<ScatteringState> {
    let spectral = Spectral::new(traj.grid());
    let profiles: Vec<ComplexField> = traj
        .snapshots()
        .iter()
        .zip(traj.times())
        .map(|(u, t)| spectral.propagate(u, -t))
        .collect();
    let increments = profiles
        .windows(2)
        .map(|w| w[1].l2_distance(&w[0]))
        .collect::<Result<Vec<_>>>()?;
    let quarter = (increments.len() / 4).max(1);
    let first = increments[..quarter].iter().cloned().fold(0.0, f64::max);
    let last = increments[increments.len() - quarter..]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if last > 0.0 && last >= first {
        return Err(Error::NotCauchy(format!(
            "final-quarter increment {last:.3e} is not below the initial {first:.3e}"
        )));
    }
    Ok(ScatteringState {
        phi: profiles.last().expect("nonempty trajectory").clone(),
        increments,
    })
}

/// `||u(T) - e^{iT Delta} phi||_{L^2}`.
pub fn scattering_residual(traj: &Trajectory, phi: &ComplexField) -> Result<f64> {
    free_propagate(phi, traj.final_time()).l2_distance(traj.last())
}
