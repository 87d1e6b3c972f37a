use serde::{Deserialize, Serialize};

use super::{fmt, DatumConfig, ExperimentOutput, ExperimentReport, GridConfig, Table};
use crate::error::Result;
use crate::exponents::{int, rat, ProblemParams};
use crate::solver::{lifespan_fit, LifespanConfig, LifespanFamily, LifespanFit, PicardConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifespanExperimentConfig {
    pub seed: u64,
    pub params: ProblemParams,
    pub grid: GridConfig,
    /// Family member `c = 1`.
    pub datum: DatumConfig,
    pub steps: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub scales: Vec<f64>,
    pub family: LifespanFamily,
    /// Also fit the other family, reported without a verdict.
    pub compare: bool,
    pub search: LifespanConfig,
    /// Allowed relative deviation of the fitted slope.
    pub tolerance: f64,
}

impl Default for LifespanExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            params: ProblemParams::l2(3, int(1), rat(1, 3), 1).expect("valid defaults"),
            grid: GridConfig::new(16, 8.0),
            datum: DatumConfig::gaussian(1.0, 1.0),
            steps: 16,
            max_iter: 64,
            tol: 1e-10,
            scales: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            family: LifespanFamily::Scaling,
            compare: true,
            search: LifespanConfig {
                t_min: 1e-3,
                t_max: 1e4,
                bisections: 10,
            },
            tolerance: 0.15,
        }
    }
}

fn family_name(f: LifespanFamily) -> &'static str {
    match f {
        LifespanFamily::Amplitude => "amplitude",
        LifespanFamily::Scaling => "scaling",
    }
}

fn rows(table: &mut Table, fit: &LifespanFit) {
    for (e, n) in fit.estimates.iter().zip(&fit.norms) {
        table.push(vec![
            family_name(fit.family).into(),
            fmt(e.scale),
            fmt(*n),
            fmt(e.t_star),
            fmt(e.bracket.0),
            fmt(e.bracket.1),
            e.censored.to_string(),
        ]);
    }
}

/// Largest Picard horizon across a family of data and the fitted power law
/// against the `L^2` norm.
pub fn run_lifespan(cfg: &LifespanExperimentConfig) -> Result<ExperimentOutput> {
    let p = &cfg.params;
    let grid = cfg.grid.grid(p.d())?;
    let u0 = cfg.datum.build(&grid, p.s_f64(), cfg.seed)?;
    let pcfg = PicardConfig {
        max_iter: cfg.max_iter,
        tol: cfg.tol,
        ..PicardConfig::new(1.0, cfg.steps)
    };
    pcfg.validate()?;
    let mut report = ExperimentReport::new("lifespan", Some(p.clone()), cfg, cfg.seed);
    let fit = lifespan_fit(&cfg.scales, cfg.family, &u0, p, &pcfg, &cfg.search)?;
    report.measure("slope", fit.slope);
    report.measure("predicted", fit.predicted);
    report.measure("relative_error", fit.relative_error());
    for e in &fit.estimates {
        report.measure(format!("t_star.c{}", fmt(e.scale)), e.t_star);
    }
    report.judge("slope", fit.relative_error() < cfg.tolerance);
    report.judge("monotone", fit.monotone());
    report.judge("uncensored", fit.estimates.iter().all(|e| !e.censored && e.bracket.0 > 0.0));
    let mut table = Table::new(
        "lifespan",
        &["family", "scale", "norm", "t_star", "lower", "upper", "censored"],
    );
    rows(&mut table, &fit);
    report.detail("fit", &fit);

    if cfg.compare {
        let other = match cfg.family {
            LifespanFamily::Amplitude => LifespanFamily::Scaling,
            LifespanFamily::Scaling => LifespanFamily::Amplitude,
        };
        let alt = lifespan_fit(&cfg.scales, other, &u0, p, &pcfg, &cfg.search)?;
        report.measure(format!("{}.slope", family_name(other)), alt.slope);
        report.measure(
            format!("{}.relative_error", family_name(other)),
            alt.relative_error(),
        );
        rows(&mut table, &alt);
        report.detail("comparison", &alt);
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
        trajectory: None,
    })
}
