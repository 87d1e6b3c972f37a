use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{fmt, median, ExperimentOutput, ExperimentReport, Table};
use crate::error::{Error, Result};
use crate::exponents::{
    classical_conditions, int, parse_rational, prop1_conditions, to_f64, Conditions,
    ExponentTriple, Rational,
};
use crate::grid::GridSpec;
use crate::random::{gaussian_random_field, RandomFieldSpec};
use crate::weighted::{free_spacetime_norms, WeightedNormSpec};

/// `(1/r, gamma)`; `1/q` follows from the scaling relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub inv_r: String,
    pub gamma: String,
}

impl TripleSpec {
    pub fn new(inv_r: &str, gamma: &str) -> Self {
        Self {
            inv_r: inv_r.into(),
            gamma: gamma.into(),
        }
    }

    fn triple(&self, d: u32, s: &Rational) -> Result<ExponentTriple> {
        Ok(ExponentTriple::from_scaling(
            d,
            s,
            parse_rational(&self.inv_r)?,
            parse_rational(&self.gamma)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrichartzConfig {
    pub seed: u64,
    pub d: u32,
    pub s: String,
    pub half_length: f64,
    /// Refinement levels, increasing.
    pub points: Vec<usize>,
    pub final_time: f64,
    pub steps: usize,
    pub samples: usize,
    /// Spectral decay of the ensemble; `None` means `(d + 2s + 1)/2`.
    pub p: Option<f64>,
    pub triples: Vec<TripleSpec>,
    /// Triple outside the admissible region, for the divergence probe.
    pub probe: Option<TripleSpec>,
    /// Allowed relative spread of the max ratio across refinement levels.
    pub tolerance: f64,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            d: 3,
            s: "0".into(),
            half_length: 8.0,
            points: vec![32, 48, 64],
            final_time: 1.0,
            steps: 32,
            samples: 50,
            p: None,
            triples: vec![
                TripleSpec::new("2/5", "1/4"),
                TripleSpec::new("7/20", "1/2"),
                TripleSpec::new("9/20", "3/4"),
            ],
            probe: Some(TripleSpec::new("3/5", "6/5")),
            tolerance: 0.25,
        }
    }
}

/// Weighted estimate conditions, or the unweighted ones when `gamma = s = 0`.
fn admissibility(t: &ExponentTriple, s: &Rational, d: u32) -> Conditions {
    if t.gamma == int(0) && *s == int(0) {
        classical_conditions(t, d)
    } else {
        prop1_conditions(t, s, d)
    }
}

struct Candidate {
    label: String,
    spec: WeightedNormSpec,
}

/// Ratio of the weighted space-time norm of `e^{it Delta} f` to the `H^s`
/// seminorm of `f` over a random ensemble and several grids.
pub fn run_strichartz(cfg: &StrichartzConfig) -> Result<ExperimentOutput> {
    let s = parse_rational(&cfg.s)?;
    let s_f = to_f64(&s);
    if !(s >= int(0) && s < int(1)) {
        return Err(Error::InvalidConfig("s must lie in [0, 1)".into()));
    }
    if cfg.points.len() < 2 || cfg.points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "need two or more increasing refinement levels".into(),
        ));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let mut report = ExperimentReport::new("strichartz", None, cfg, cfg.seed);

    let mut candidates = Vec::new();
    let mut listed = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |label: String, t: ExponentTriple, checks: Conditions| {
        let entry = json!({
            "label": label,
            "triple": &t,
            "q": t.q(),
            "r": t.r(),
            "checks": &checks,
        });
        match WeightedNormSpec::from_triple(&t).and_then(|w| {
            w.check_integrable(cfg.d as usize)?;
            Ok(w)
        }) {
            Ok(spec) => {
                listed.push(entry);
                candidates.push(Candidate { label, spec });
            }
            Err(e) => skipped.push(json!({ "label": label, "reason": e.to_string() })),
        }
    };
    for (k, ts) in cfg.triples.iter().enumerate() {
        let t = ts.triple(cfg.d, &s)?;
        let checks = admissibility(&t, &s, cfg.d);
        if !checks.all() {
            return Err(Error::InvalidConfig(format!(
                "triple {k} is not admissible: {}",
                checks.failures().join(", ")
            )));
        }
        push(format!("triple{k}"), t, checks);
    }
    if let Some(ps) = &cfg.probe {
        let t = ps.triple(cfg.d, &s)?;
        let checks = admissibility(&t, &s, cfg.d);
        if checks.all() {
            return Err(Error::InvalidConfig("probe triple is admissible".into()));
        }
        push("probe".into(), t, checks);
    }
    report.detail("triples", &listed);
    report.detail("skipped", &skipped);

    let field_spec = RandomFieldSpec { s: s_f, p: cfg.p };
    let specs: Vec<WeightedNormSpec> = candidates.iter().map(|c| c.spec).collect();
    let mut table = Table::new("ratios", &["points", "sample", "label", "ratio"]);
    // maxima[c][level]
    let mut maxima = vec![Vec::new(); candidates.len()];
    for &n in &cfg.points {
        let grid = GridSpec::new(cfg.d as usize, n, cfg.half_length)?;
        let ratios = (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| {
                let f = gaussian_random_field(&grid, &field_spec, cfg.seed, i)?;
                free_spacetime_norms(&f, cfg.final_time, cfg.steps, &specs)
            })
            .collect::<Result<Vec<_>>>()?;
        for (c, cand) in candidates.iter().enumerate() {
            let col: Vec<f64> = ratios.iter().map(|r| r[c]).collect();
            let max = col.iter().cloned().fold(0.0, f64::max);
            report.measure(format!("{}.max.n{n}", cand.label), max);
            report.measure(format!("{}.median.n{n}", cand.label), median(&col));
            maxima[c].push(max);
            for (i, r) in col.iter().enumerate() {
                table.push(vec![n.to_string(), i.to_string(), cand.label.clone(), fmt(*r)]);
            }
        }
    }
    for (cand, m) in candidates.iter().zip(&maxima) {
        let lo = m.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = m.iter().cloned().fold(0.0, f64::max);
        let variation = (hi - lo) / lo;
        report.measure(format!("{}.variation", cand.label), variation);
        if cand.label == "probe" {
            let growth = m.last().unwrap() / m[0];
            report.measure("probe.growth", growth);
            report.judge(
                "probe_increasing",
                m.windows(2).all(|w| w[1] > w[0]),
            );
        } else {
            report.judge(format!("{}_stable", cand.label), variation < cfg.tolerance);
        }
    }
    Ok(ExperimentOutput {
        report,
        tables: vec![table],
        trajectory: None,
    })
}
