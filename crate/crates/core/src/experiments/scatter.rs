use serde::{Deserialize, Serialize};

use super::solve::Outcome;
use super::{
    default_params, fmt, DatumConfig, ExperimentOutput, ExperimentReport, GridConfig, Method,
    Table,
};
use crate::error::{Error, Result};
use crate::exponents::{compute_thetas, int, ProblemParams};
use crate::solver::{
    picard_solve, scattering_residual, scattering_state, splitstep_solve_steps, PicardConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    pub seed: u64,
    pub params: ProblemParams,
    pub grid: GridConfig,
    pub datum: DatumConfig,
    pub final_time: f64,
    pub steps: usize,
    /// `picard` or `splitstep`.
    pub method: Method,
    pub max_iter: usize,
    pub tol: f64,
    /// Bound on the last Cauchy increment.
    pub threshold: f64,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            params: default_params(),
            grid: GridConfig::new(32, 32.0),
            datum: DatumConfig::gaussian(0.01, 2.0),
            final_time: 8.0,
            steps: 64,
            method: Method::Picard,
            max_iter: 64,
            tol: 1e-10,
            threshold: 1e-3,
        }
    }
}

/// Pulls a long small-data run back by the free flow and reports how the
/// profiles settle.
pub fn run_scatter(cfg: &ScatterConfig) -> Result<ExperimentOutput> {
    let p = &cfg.params;
    let grid = cfg.grid.grid(p.d())?;
    let u0 = cfg.datum.build(&grid, p.s_f64(), cfg.seed)?;
    let pcfg = PicardConfig {
        max_iter: cfg.max_iter,
        tol: cfg.tol,
        ..PicardConfig::new(cfg.final_time, cfg.steps)
    };
    pcfg.validate()?;
    let mut report = ExperimentReport::new("scatter", Some(p.clone()), cfg, cfg.seed);
    report.detail("critical", compute_thetas(p).theta0 == int(0));

    let outcome = match cfg.method {
        Method::Picard => Outcome::from_result(picard_solve(&u0, p, &pcfg).map(|s| s.trajectory))?,
        Method::Splitstep => Outcome::from_result(splitstep_solve_steps(
            &u0,
            p,
            cfg.final_time,
            cfg.steps,
        ))?,
        Method::Both => {
            return Err(Error::InvalidConfig(
                "scatter runs one method: picard or splitstep".into(),
            ))
        }
    };
    report.detail("solver", outcome.status());
    let mut table = Table::new("increments", &["step", "time", "increment"]);
    let Some(traj) = outcome.done() else {
        report.judge("solved", false);
        return Ok(ExperimentOutput {
            report,
            tables: vec![table],
            trajectory: None,
        });
    };
    report.judge("solved", true);
    match scattering_state(traj) {
        Ok(state) => {
            let inc = &state.increments;
            let last = *inc.last().expect("at least one step");
            let residual = scattering_residual(traj, &state.phi)?;
            let increases = inc.windows(2).filter(|w| w[1] > w[0]).count();
            report.measure("first_increment", inc[0]);
            report.measure("final_increment", last);
            report.measure("increases", increases as f64);
            report.measure("residual", residual);
            report.measure("profile_mass", state.phi.mass());
            report.judge("decreasing", increases == 0);
            report.judge("final_increment", last < cfg.threshold);
            report.judge("residual", residual < 10.0 * last);
            let dt = traj.dt();
            for (k, x) in inc.iter().enumerate() {
                table.push(vec![(k + 1).to_string(), fmt((k + 1) as f64 * dt), fmt(*x)]);
            }
        }
        Err(Error::NotCauchy(msg)) => {
            report.detail("not_cauchy", msg);
            report.judge("decreasing", false);
        }
        Err(e) => return Err(e),
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
        trajectory: None,
    })
}
