use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{default_params, ExperimentOutput, ExperimentReport, Table};
use crate::error::Result;
use crate::exponents::{
    audit_random_params, audit_triples, compute_thetas, critical_index, derive_dual_hs_first,
    derive_dual_hs_second, derive_dual_l2, format_rational, hypothesis_feasible,
    lifespan_exponent, prop1_conditions, region_sample, theorem_conditions, to_f64, Conditions, DualTriple,
    ExponentTriple, Mode, ProblemParams, Rational, int,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleConfig {
    pub seed: u64,
    pub mode: Mode,
    pub params: ProblemParams,
    /// Triples sampled for `params`.
    pub samples: usize,
    /// Additional random parameter sets audited with one triple each.
    pub random_params: usize,
}

impl Default for AdmissibleConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            mode: Mode::L2,
            params: default_params(),
            samples: 1000,
            random_params: 0,
        }
    }
}

fn dual_cells(d: Option<&DualTriple>) -> [String; 3] {
    match d {
        Some(d) => [
            format_rational(&d.inv_qt),
            format_rational(&d.inv_rt),
            format_rational(&d.gamma_t),
        ],
        None => Default::default(),
    }
}

/// Samples admissible triples, derives and audits their duals, and reports
/// the exponent bookkeeping of the parameter set.
pub fn run_admissible(cfg: &AdmissibleConfig) -> Result<ExperimentOutput> {
    let p = &cfg.params;
    let mode = cfg.mode;
    p.validate(mode)?;
    let mut report = ExperimentReport::new("admissible", Some(p.clone()), cfg, cfg.seed);

    let thetas = compute_thetas(p);
    report.measure("theta0", to_f64(&thetas.theta0));
    report.measure("theta1", to_f64(&thetas.theta1));
    report.measure("theta2", to_f64(&thetas.theta2));
    report.measure("critical_index", to_f64(&critical_index(p)));
    if let Some(e) = lifespan_exponent(p) {
        report.measure("lifespan_exponent", to_f64(&e));
    }
    report.detail("thetas", &thetas);
    report.detail("critical", *p.beta() == p.critical_beta());

    let triples = region_sample(p, mode, cfg.samples, cfg.seed)?;
    let summary = audit_triples(p, mode, &triples);
    report.measure("samples", summary.samples as f64);
    report.measure("dual_failures", summary.dual_failures as f64);
    report.measure("empty_intervals", summary.empty_intervals as f64);

    let mut table = Table::new(
        "triples",
        &[
            "index",
            "inv_q",
            "inv_r",
            "gamma",
            "dual_inv_q",
            "dual_inv_r",
            "dual_gamma",
            "second_inv_q",
            "second_inv_r",
            "second_gamma",
            "passes",
        ],
    );
    for (i, t) in triples.iter().enumerate() {
        let (first, second, passes) = duals_of(p, mode, t);
        let mut row = vec![
            i.to_string(),
            format_rational(&t.inv_q),
            format_rational(&t.inv_r),
            format_rational(&t.gamma),
        ];
        row.extend(dual_cells(first.as_ref()));
        row.extend(dual_cells(second.as_ref()));
        row.push(passes.to_string());
        table.push(row);
    }

    let mut checks = p.hypotheses(mode);
    match triples.first() {
        Some(t) => {
            checks.extend_prefixed("theorem.", &theorem_conditions(p, t, mode));
            checks.extend_prefixed("homogeneous.", &prop1_conditions(t, &effective_s(p, mode), p.d()));
            report.detail("triple", t);
            report.detail("dual", representative_dual(p, mode, t, &mut checks));
        }
        None => {
            report.detail("triple", serde_json::Value::Null);
            report.detail("dual", serde_json::Value::Null);
        }
    }
    report.detail("checks", &checks);
    if mode == Mode::Hs {
        let region = hypothesis_feasible(p.d(), p.s());
        report.detail("hypothesis", region.report(p.alpha()));
    }
    report.detail("audit", &summary);

    report.judge("hypotheses", p.hypotheses(mode).all());
    report.judge("duals", summary.dual_failures == 0);
    if mode == Mode::Hs {
        report.judge("second_intervals", summary.empty_intervals == 0);
    }
    report.judge("representative_checks", checks.all());

    if cfg.random_params > 0 {
        let random = audit_random_params(mode, cfg.random_params, cfg.seed);
        report.measure("random_samples", random.samples as f64);
        report.measure("random_critical_samples", random.critical_samples as f64);
        report.measure(
            "random_failures",
            (random.sampling_failures + random.dual_failures + random.empty_intervals) as f64,
        );
        report.judge("random_audit", random.passed());
        report.detail("random_audit", &random);
    }

    Ok(ExperimentOutput {
        report,
        tables: vec![table],
        trajectory: None,
    })
}

fn effective_s(p: &ProblemParams, mode: Mode) -> Rational {
    match mode {
        Mode::L2 => int(0),
        Mode::Hs => p.s().clone(),
    }
}

fn duals_of(
    p: &ProblemParams,
    mode: Mode,
    t: &ExponentTriple,
) -> (Option<DualTriple>, Option<DualTriple>, bool) {
    match mode {
        Mode::L2 => match derive_dual_l2(p, t) {
            Ok(d) => {
                let ok = d.passes();
                (Some(d.dual), None, ok)
            }
            Err(_) => (None, None, false),
        },
        Mode::Hs => {
            let first = derive_dual_hs_first(p, t).ok();
            let second = derive_dual_hs_second(p, t).ok();
            let ok = first.as_ref().is_some_and(|d| d.passes())
                && second.as_ref().is_some_and(|d| d.derivation.passes());
            (
                first.map(|d| d.dual),
                second.map(|d| d.derivation.dual),
                ok,
            )
        }
    }
}

fn representative_dual(
    p: &ProblemParams,
    mode: Mode,
    t: &ExponentTriple,
    checks: &mut Conditions,
) -> serde_json::Value {
    let error = |e: crate::Error| json!({ "error": e.to_string() });
    match mode {
        Mode::L2 => match derive_dual_l2(p, t) {
            Ok(d) => {
                checks.extend_prefixed("dual.", &d.checks);
                serde_json::to_value(&d).expect("serializable")
            }
            Err(e) => {
                checks.push("dual.derived", false);
                error(e)
            }
        },
        Mode::Hs => {
            let first = match derive_dual_hs_first(p, t) {
                Ok(d) => {
                    checks.extend_prefixed("dual_first.", &d.checks);
                    serde_json::to_value(&d).expect("serializable")
                }
                Err(e) => {
                    checks.push("dual_first.derived", false);
                    error(e)
                }
            };
            let second = match derive_dual_hs_second(p, t) {
                Ok(d) => {
                    checks.extend_prefixed("dual_second.", &d.derivation.checks);
                    serde_json::to_value(&d).expect("serializable")
                }
                Err(e) => {
                    checks.push("dual_second.derived", false);
                    error(e)
                }
            };
            json!({ "first": first, "second": second })
        }
    }
}
