use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solve::{masses, Outcome};
use super::{
    default_params, fmt, median, relative_drift, DatumConfig, ExperimentOutput,
    ExperimentReport, GridConfig, Table,
};
use crate::error::{Error, Result};
use crate::exponents::{
    compute_thetas, derive_dual_hs_first, derive_dual_hs_second, derive_dual_l2, parse_rational,
    rat, region_sample, to_f64, Mode, ProblemParams,
};
use crate::field::ComplexField;
use crate::random::{gaussian_random_field, RandomFieldSpec};
use crate::solver::{least_squares_slope, picard_solve, splitstep_solve_steps, PicardConfig};
use crate::spectral::{rescale_field, sobolev_norm};
use crate::weighted::{check_nonlinear_estimate_hs, check_nonlinear_estimate_l2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceRun {
    pub grid: GridConfig,
    pub datum: DatumConfig,
    pub final_time: f64,
    pub steps: usize,
    pub max_iter: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingAudit {
    pub grid: GridConfig,
    pub width: f64,
    /// Regularity of the homogeneous norm, as a rational string.
    pub s: String,
    pub lambdas: Vec<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateAudit {
    pub grid: GridConfig,
    pub final_time: f64,
    pub steps: usize,
    pub pairs: usize,
    /// Parameters of the `H^s` estimates.
    pub hs_params: ProblemParams,
    /// Bound on max/median of the second `H^s` estimate ratio.
    pub spread_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Parameters of the mass, scaling and `L^2` estimate audits.
    pub params: ProblemParams,
    pub reference: ReferenceRun,
    pub scaling: ScalingAudit,
    pub estimates: EstimateAudit,
    /// Number of random complex pairs for the pointwise inequality.
    pub pointwise_pairs: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            params: default_params(),
            reference: ReferenceRun {
                grid: GridConfig::new(32, 16.0),
                datum: DatumConfig::gaussian(0.1, 1.0),
                final_time: 0.25,
                steps: 32,
                max_iter: 64,
                tol: 1e-10,
            },
            scaling: ScalingAudit {
                grid: GridConfig::new(128, 12.0),
                width: 1.0,
                s: "1/4".into(),
                lambdas: vec![1.0, 2.0, 4.0],
                tolerance: 0.01,
            },
            estimates: EstimateAudit {
                grid: GridConfig::new(16, 4.0),
                final_time: 1.0,
                steps: 16,
                pairs: 100,
                hs_params: ProblemParams::new(3, rat(3, 2), rat(1, 3), rat(1, 10), 1)
                    .expect("valid defaults"),
                spread_bound: 10.0,
            },
            pointwise_pairs: 10_000,
        }
    }
}

/// Conservation, scaling, nonlinear-estimate and pointwise-inequality audits.
pub fn run_verify(cfg: &VerifyConfig) -> Result<ExperimentOutput> {
    let p = &cfg.params;
    p.validate(Mode::L2)?;
    cfg.estimates.hs_params.validate(Mode::Hs)?;
    let mut report = ExperimentReport::new("verify", Some(p.clone()), cfg, cfg.seed);
    let mut tables = Vec::new();

    mass_audit(cfg, &mut report)?;
    tables.push(scaling_audit(cfg, &mut report)?);
    tables.push(estimate_audit(cfg, &mut report)?);
    pointwise_audit(cfg, &mut report);

    Ok(ExperimentOutput {
        report,
        tables,
        trajectory: None,
    })
}

fn mass_audit(cfg: &VerifyConfig, report: &mut ExperimentReport) -> Result<()> {
    let r = &cfg.reference;
    let p = &cfg.params;
    let grid = r.grid.grid(p.d())?;
    let u0 = r.datum.build(&grid, 0.0, cfg.seed)?;
    let pcfg = PicardConfig {
        max_iter: r.max_iter,
        tol: r.tol,
        ..PicardConfig::new(r.final_time, r.steps)
    };
    let picard = Outcome::from_result(picard_solve(&u0, p, &pcfg))?;
    report.detail("picard", picard.status());
    match picard.done() {
        Some(sol) => {
            let drift = relative_drift(&masses(&sol.trajectory));
            report.measure("picard_mass_drift", drift);
            report.judge("picard_mass", drift < 1e-6);
        }
        None => report.judge("picard_mass", false),
    }
    let split = Outcome::from_result(splitstep_solve_steps(&u0, p, r.final_time, r.steps))?;
    match split.done() {
        Some(traj) => {
            let drift = relative_drift(&masses(traj));
            report.measure("splitstep_mass_drift", drift);
            report.judge("splitstep_mass", drift < 1e-12);
        }
        None => report.judge("splitstep_mass", false),
    }
    Ok(())
}

fn scaling_audit(cfg: &VerifyConfig, report: &mut ExperimentReport) -> Result<Table> {
    let a = &cfg.scaling;
    let p = &cfg.params;
    let s = to_f64(&parse_rational(&a.s)?);
    if a.lambdas.len() < 2 {
        return Err(Error::InvalidConfig("scaling audit needs two or more lambdas".into()));
    }
    let (alpha, beta) = (p.alpha_f64(), p.beta_f64());
    let grid = a.grid.grid(p.d())?;
    let f = ComplexField::gaussian(grid, 1.0, a.width);
    let norms = a
        .lambdas
        .par_iter()
        .map(|&l| sobolev_norm(&rescale_field(&f, l, alpha, beta)?, s, true))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = a.lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let predicted = s + (2.0 - alpha) / beta - p.d() as f64 / 2.0;
    let err = ((slope - predicted) / predicted).abs();
    report.measure("scaling_slope", slope);
    report.measure("scaling_predicted", predicted);
    report.measure("scaling_relative_error", err);
    report.judge("scaling_slope", err < a.tolerance);
    let mut table = Table::new("scaling", &["lambda", "norm"]);
    for (l, n) in a.lambdas.iter().zip(&norms) {
        table.push(vec![fmt(*l), fmt(*n)]);
    }
    Ok(table)
}

struct PairResult {
    l2: (f64, f64, f64, bool),
    first: (f64, f64, f64, bool),
    second_ratio: f64,
}

fn estimate_audit(cfg: &VerifyConfig, report: &mut ExperimentReport) -> Result<Table> {
    let e = &cfg.estimates;
    let p = &cfg.params;
    let hs = &e.hs_params;
    if p.d() != hs.d() {
        return Err(Error::InvalidConfig("estimate audits need one dimension".into()));
    }
    let grid = e.grid.grid(p.d())?;
    let tcfg = PicardConfig::new(e.final_time, e.steps);
    tcfg.validate()?;

    let triple = region_sample(p, Mode::L2, 1, cfg.seed)?.remove(0);
    let dual = derive_dual_l2(p, &triple)?;
    let theta0 = to_f64(&compute_thetas(p).theta0);
    let hs_triple = region_sample(hs, Mode::Hs, 1, cfg.seed)?.remove(0);
    let first = derive_dual_hs_first(hs, &hs_triple)?;
    let second = derive_dual_hs_second(hs, &hs_triple)?;
    let th = compute_thetas(hs);
    let (theta1, theta2) = (to_f64(&th.theta1), to_f64(&th.theta2));
    report.detail("l2_triple", &triple);
    report.detail("l2_dual", &dual);
    report.detail("hs_triple", &hs_triple);
    report.detail("hs_dual_first", &first);
    report.detail("hs_dual_second", &second);

    let l2_spec = RandomFieldSpec::new(0.0);
    let hs_spec = RandomFieldSpec::new(hs.s_f64());
    let free = |spec: &RandomFieldSpec, index: u64| -> Result<_> {
        let f = gaussian_random_field(&grid, spec, cfg.seed, index)?;
        crate::solver::free_trajectory(&f, &tcfg)
    };
    let results = (0..e.pairs as u64)
        .into_par_iter()
        .map(|i| -> Result<PairResult> {
            let (u, v) = (free(&l2_spec, 2 * i)?, free(&l2_spec, 2 * i + 1)?);
            let c = check_nonlinear_estimate_l2(&u, &v, p, &triple, &dual.dual, theta0)?;
            let (u, v) = (free(&hs_spec, 2 * i)?, free(&hs_spec, 2 * i + 1)?);
            let h = check_nonlinear_estimate_hs(
                &u,
                &v,
                hs,
                &hs_triple,
                (&first.dual, theta1),
                (&second.derivation.dual, theta2),
            )?;
            Ok(PairResult {
                l2: (c.lhs, c.rhs, c.slack, c.holds),
                first: (h.first.lhs, h.first.rhs, h.first.slack, h.first.holds),
                second_ratio: h.second_ratio(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = results.len();
    let l2_ok = results.iter().filter(|r| r.l2.3).count();
    let first_ok = results.iter().filter(|r| r.first.3).count();
    let ratio = |(l, r, _, _): (f64, f64, f64, bool)| if r > 0.0 { l / r } else { 0.0 };
    let l2_max = results.iter().map(|r| ratio(r.l2)).fold(0.0, f64::max);
    let first_max = results.iter().map(|r| ratio(r.first)).fold(0.0, f64::max);
    let second: Vec<f64> = results.iter().map(|r| r.second_ratio).collect();
    let second_max = second.iter().cloned().fold(0.0, f64::max);
    let second_median = median(&second);
    let spread = second_max / second_median;
    report.measure("l2_estimate_holds", l2_ok as f64);
    report.measure("l2_estimate_max_ratio", l2_max);
    report.measure("hs_first_holds", first_ok as f64);
    report.measure("hs_first_max_ratio", first_max);
    report.measure("hs_second_max_ratio", second_max);
    report.measure("hs_second_median_ratio", second_median);
    report.measure("hs_second_spread", spread);
    report.judge("l2_estimate", l2_ok == n);
    report.judge("hs_first_estimate", first_ok == n);
    report.judge("hs_second_bounded", spread < e.spread_bound);

    let mut table = Table::new(
        "estimates",
        &[
            "pair",
            "l2_lhs",
            "l2_rhs",
            "l2_slack",
            "hs_first_lhs",
            "hs_first_rhs",
            "hs_first_slack",
            "hs_second_ratio",
        ],
    );
    for (i, r) in results.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            fmt(r.l2.0),
            fmt(r.l2.1),
            fmt(r.l2.2),
            fmt(r.first.0),
            fmt(r.first.1),
            fmt(r.first.2),
            fmt(r.second_ratio),
        ]);
    }
    Ok(table)
}

/// `||u|^beta u - |v|^beta v| <= C (|u|^beta + |v|^beta) |u - v|` over random
/// complex pairs with moduli spread over six decades. The fitted `C` is
/// compared with the mean-value bound `beta + 1`.
fn pointwise_audit(cfg: &VerifyConfig, report: &mut ExperimentReport) {
    let beta = cfg.params.beta_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    let mut c: f64 = 0.0;
    let draw = |rng: &mut ChaCha8Rng| {
        let modulus = 10f64.powf(rng.random_range(-3.0..3.0));
        num_complex::Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU))
    };
    for _ in 0..cfg.pointwise_pairs {
        let u = draw(&mut rng);
        let v = draw(&mut rng);
        let lhs = (u * u.norm().powf(beta) - v * v.norm().powf(beta)).norm();
        let rhs = (u.norm().powf(beta) + v.norm().powf(beta)) * (u - v).norm();
        if rhs > 0.0 {
            c = c.max(lhs / rhs);
        }
    }
    report.measure("pointwise_constant", c);
    report.measure("pointwise_bound", beta + 1.0);
    report.judge("pointwise_inequality", c <= beta + 1.0);
}
