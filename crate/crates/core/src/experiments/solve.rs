use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    default_params, fmt, relative_drift, DatumConfig, ExperimentOutput, ExperimentReport,
    GridConfig, Table,
};
use crate::error::{Error, Result};
use crate::exponents::ProblemParams;
use crate::field::{ComplexField, Trajectory};
use crate::solver::{picard_solve, splitstep_solve_steps, PicardConfig, PicardSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Splitstep,
    Both,
}

impl Method {
    fn picard(self) -> bool {
        matches!(self, Method::Picard | Method::Both)
    }

    fn splitstep(self) -> bool {
        matches!(self, Method::Splitstep | Method::Both)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(Method::Picard),
            "splitstep" => Ok(Method::Splitstep),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub seed: u64,
    pub params: ProblemParams,
    pub grid: GridConfig,
    pub datum: DatumConfig,
    pub final_time: f64,
    pub steps: usize,
    pub method: Method,
    pub max_iter: usize,
    pub tol: f64,
    /// Write the trajectory of the first requested method to `traj.bin`.
    pub dump: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            params: default_params(),
            grid: GridConfig::new(32, 16.0),
            datum: DatumConfig::gaussian(0.1, 1.0),
            final_time: 0.25,
            steps: 32,
            method: Method::Both,
            max_iter: 64,
            tol: 1e-10,
            dump: false,
        }
    }
}

impl SolveConfig {
    pub fn picard_config(&self) -> PicardConfig {
        PicardConfig {
            max_iter: self.max_iter,
            tol: self.tol,
            ..PicardConfig::new(self.final_time, self.steps)
        }
    }

    pub fn datum(&self) -> Result<ComplexField> {
        let grid = self.grid.grid(self.params.d())?;
        self.datum.build(&grid, self.params.s_f64(), self.seed)
    }
}

/// Outcome of one solver call; failures are measurements, not errors.
#[derive(Debug, Clone)]
pub(crate) enum Outcome<T> {
    Done(T),
    NoConvergence { iterations: usize, last_increment: f64 },
    BlowUp { time: f64 },
}

impl<T> Outcome<T> {
    pub(crate) fn from_result(r: Result<T>) -> Result<Self> {
        match r {
            Ok(v) => Ok(Outcome::Done(v)),
            Err(Error::NoConvergence {
                iterations,
                last_increment,
            }) => Ok(Outcome::NoConvergence {
                iterations,
                last_increment,
            }),
            Err(Error::BlowUp { time }) => Ok(Outcome::BlowUp { time }),
            Err(e) => Err(e),
        }
    }

    pub(crate) fn done(&self) -> Option<&T> {
        match self {
            Outcome::Done(v) => Some(v),
            _ => None,
        }
    }

    pub(crate) fn status(&self) -> serde_json::Value {
        match self {
            Outcome::Done(_) => json!({ "status": "completed" }),
            Outcome::NoConvergence {
                iterations,
                last_increment,
            } => json!({
                "status": "no_convergence",
                "iterations": iterations,
                "last_increment": last_increment,
            }),
            Outcome::BlowUp { time } => json!({ "status": "blow_up", "time": time }),
        }
    }
}

pub(crate) fn masses(traj: &Trajectory) -> Vec<f64> {
    traj.snapshots().iter().map(ComplexField::mass).collect()
}

/// Runs Picard iteration and the split-step integrator on the configured
/// problem and compares them.
pub fn run_solve(cfg: &SolveConfig) -> Result<ExperimentOutput> {
    let p = &cfg.params;
    let u0 = cfg.datum()?;
    let pcfg = cfg.picard_config();
    pcfg.validate()?;
    let mut report = ExperimentReport::new("solve", Some(p.clone()), cfg, cfg.seed);
    report.measure("initial_mass", u0.mass());

    let picard = if cfg.method.picard() {
        Some(Outcome::from_result(picard_solve(&u0, p, &pcfg))?)
    } else {
        None
    };
    let split = if cfg.method.splitstep() {
        Some(Outcome::from_result(splitstep_solve_steps(
            &u0,
            p,
            cfg.final_time,
            cfg.steps,
        ))?)
    } else {
        None
    };

    let mut increments = Table::new("increments", &["iteration", "increment"]);
    let picard_sol: Option<&PicardSolution> = picard.as_ref().and_then(|o| o.done());
    if let Some(o) = &picard {
        report.detail("picard", o.status());
        report.judge("picard_converged", o.done().is_some());
    }
    if let Some(sol) = picard_sol {
        report.measure("picard_iterations", sol.iterations as f64);
        report.measure(
            "picard_final_increment",
            *sol.increments.last().unwrap_or(&0.0),
        );
        let ratios = sol.increment_ratios();
        let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
        report.measure("picard_max_increment_ratio", max_ratio);
        report.judge("picard_geometric", max_ratio <= 0.6);
        let drift = relative_drift(&masses(&sol.trajectory));
        report.measure("picard_mass_drift", drift);
        report.judge("picard_mass", drift < 1e-6);
        for (i, inc) in sol.increments.iter().enumerate() {
            increments.push(vec![(i + 1).to_string(), fmt(*inc)]);
        }
    }
    if let Some(o) = &split {
        report.detail("splitstep", o.status());
    }
    if let Some(traj) = split.as_ref().and_then(|o| o.done()) {
        let drift = relative_drift(&masses(traj));
        report.measure("splitstep_mass_drift", drift);
        report.judge("splitstep_mass", drift < 1e-12);
    }
    if let (Some(sol), Some(traj)) = (picard_sol, split.as_ref().and_then(|o| o.done())) {
        let dist = sol.trajectory.sup_l2_distance(traj)?;
        report.measure("cross_method_distance", dist);
        report.judge("cross_method", dist < 1e-4);
    }

    let mut mass = Table::new("mass", &["step", "time", "picard_mass", "splitstep_mass"]);
    let pm = picard_sol.map(|s| masses(&s.trajectory));
    let sm = split.as_ref().and_then(|o| o.done()).map(masses);
    let dt = cfg.final_time / cfg.steps as f64;
    for k in 0..=cfg.steps {
        let cell = |m: &Option<Vec<f64>>| m.as_ref().map(|v| fmt(v[k])).unwrap_or_default();
        mass.push(vec![k.to_string(), fmt(k as f64 * dt), cell(&pm), cell(&sm)]);
    }

    let trajectory = if cfg.dump {
        match (picard_sol, split.as_ref().and_then(|o| o.done())) {
            (Some(sol), _) => Some(("picard".to_string(), sol.trajectory.clone())),
            (None, Some(traj)) => Some(("splitstep".to_string(), traj.clone())),
            _ => None,
        }
    } else {
        None
    };
    Ok(ExperimentOutput {
        report,
        tables: vec![increments, mass],
        trajectory,
    })
}
