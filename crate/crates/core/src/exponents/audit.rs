use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::dual::{derive_dual_hs_first, derive_dual_hs_second, derive_dual_l2};
use super::hypothesis::hypothesis_feasible;
use super::rational::{format_rational, int, rat, Interval};
use super::region::sample_with;
use super::{ExponentTriple, Mode, ProblemParams};

const PARAM_DENOMINATOR_BITS: u32 = 20;
const MAX_RECORDED_FAILURES: usize = 20;

/// A reduction claim that did not hold for one triple.
#[derive(Debug, Clone, Serialize)]
pub struct AuditFailure {
    pub sample: usize,
    pub params: ProblemParams,
    pub triple: Option<ExponentTriple>,
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub mode: Mode,
    pub samples: usize,
    pub critical_samples: usize,
    pub sampling_failures: usize,
    pub dual_failures: usize,
    pub empty_intervals: usize,
    pub failures: Vec<AuditFailure>,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.sampling_failures == 0 && self.dual_failures == 0 && self.empty_intervals == 0
    }

    fn empty(mode: Mode) -> Self {
        Self {
            mode,
            samples: 0,
            critical_samples: 0,
            sampling_failures: 0,
            dual_failures: 0,
            empty_intervals: 0,
            failures: Vec::new(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples += other.samples;
        self.critical_samples += other.critical_samples;
        self.sampling_failures += other.sampling_failures;
        self.dual_failures += other.dual_failures;
        self.empty_intervals += other.empty_intervals;
        self.failures.extend(other.failures);
        self
    }

    fn finish(mut self) -> Self {
        self.failures.sort_by_key(|f| f.sample);
        self.failures.truncate(MAX_RECORDED_FAILURES);
        self
    }
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random parameters valid for `mode`: `d` in {3, 4, 5}; in `L^2` mode
/// `alpha` in (0, 2) and `beta` in (0, (4 - 2 alpha)/d], critical one time in
/// four; in `H^s` mode `s` in {1/20, 1/10, 1/5, 3/10} and `(alpha, beta)`
/// drawn from the hypothesis region.
pub fn sample_params<R: Rng + ?Sized>(mode: Mode, rng: &mut R) -> ProblemParams {
    let d = rng.random_range(3..=5u32);
    let lambda = if rng.random_bool(0.5) { 1 } else { -1 };
    let critical = rng.random_bool(0.25);
    let pick = |iv: &Interval, rng: &mut R| {
        iv.sample_interior(rng, PARAM_DENOMINATOR_BITS)
            .expect("nonempty parameter interval")
    };
    match mode {
        Mode::L2 => {
            let alpha = pick(&Interval::open(int(0), int(2)), rng);
            let crit = (int(4) - int(2) * &alpha) / int(d as i64);
            let beta = if critical {
                crit
            } else {
                pick(&Interval::open(int(0), crit), rng)
            };
            ProblemParams::l2(d, alpha, beta, lambda).expect("sampled inside the L2 range")
        }
        Mode::Hs => {
            let choices = [rat(1, 20), rat(1, 10), rat(1, 5), rat(3, 10)];
            let s = choices[rng.random_range(0..choices.len())].clone();
            let region = hypothesis_feasible(d, &s);
            let alpha = pick(&region.alpha, rng);
            let biv = region.beta_interval(&alpha);
            let beta = if critical {
                biv.hi.value.clone()
            } else {
                pick(&biv, rng)
            };
            ProblemParams::new(d, alpha, beta, s, lambda).expect("sampled inside the Hs range")
        }
    }
}

fn audit_one(
    index: usize,
    p: &ProblemParams,
    mode: Mode,
    t: &ExponentTriple,
    summary: &mut AuditSummary,
) {
    let fail = |stage: &str, detail: String| AuditFailure {
        sample: index,
        params: p.clone(),
        triple: Some(t.clone()),
        stage: stage.to_string(),
        detail,
    };
    match mode {
        Mode::L2 => match derive_dual_l2(p, t) {
            Ok(dd) if dd.passes() => {}
            Ok(dd) => {
                summary.dual_failures += 1;
                let f = fail("l2_dual", dd.checks.failures().join(","));
                summary.failures.push(f);
            }
            Err(e) => {
                summary.dual_failures += 1;
                summary.failures.push(fail("l2_dual", e.to_string()));
            }
        },
        Mode::Hs => {
            match derive_dual_hs_first(p, t) {
                Ok(dd) if dd.passes() => {}
                Ok(dd) => {
                    summary.dual_failures += 1;
                    let f = fail("hs_first_dual", dd.checks.failures().join(","));
                    summary.failures.push(f);
                }
                Err(e) => {
                    summary.dual_failures += 1;
                    summary.failures.push(fail("hs_first_dual", e.to_string()));
                }
            }
            match derive_dual_hs_second(p, t) {
                Ok(dd) if dd.derivation.passes() => {}
                Ok(dd) => {
                    summary.dual_failures += 1;
                    let f = fail("hs_second_dual", dd.derivation.checks.failures().join(","));
                    summary.failures.push(f);
                }
                Err(e @ crate::Error::EmptyFeasibleInterval(_)) => {
                    summary.empty_intervals += 1;
                    summary.failures.push(fail("hs_second_interval", e.to_string()));
                }
                Err(e) => {
                    summary.dual_failures += 1;
                    summary.failures.push(fail("hs_second_dual", e.to_string()));
                }
            }
        }
    }
}

/// Derives and checks the duals of given triples for one parameter set.
pub fn audit_triples(p: &ProblemParams, mode: Mode, triples: &[ExponentTriple]) -> AuditSummary {
    let mut summary = AuditSummary::empty(mode);
    let crit = p.critical_beta();
    for (i, t) in triples.iter().enumerate() {
        summary.samples += 1;
        if *p.beta() == crit {
            summary.critical_samples += 1;
        }
        audit_one(i, p, mode, t, &mut summary);
    }
    summary.finish()
}

/// `n` independent samples, each a fresh random parameter set with one
/// sampled triple, audited in parallel. Sample `i` uses its own stream of the
/// seeded generator, so the result does not depend on scheduling.
pub fn audit_random_params(mode: Mode, n: usize, seed: u64) -> AuditSummary {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let p = sample_params(mode, &mut rng);
            let mut summary = AuditSummary::empty(mode);
            summary.samples = 1;
            if *p.beta() == p.critical_beta() {
                summary.critical_samples = 1;
            }
            match sample_with(&p, mode, 1, &mut rng) {
                Ok(ts) => audit_one(i, &p, mode, &ts[0], &mut summary),
                Err(e) => {
                    summary.sampling_failures += 1;
                    summary.failures.push(AuditFailure {
                        sample: i,
                        params: p.clone(),
                        triple: None,
                        stage: "region_sample".into(),
                        detail: format!("{e} (beta = {})", format_rational(p.beta())),
                    });
                }
            }
            summary
        })
        .reduce(|| AuditSummary::empty(mode), AuditSummary::merge)
        .finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_params_satisfy_hypotheses() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for mode in [Mode::L2, Mode::Hs] {
            for _ in 0..200 {
                let p = sample_params(mode, &mut rng);
                assert!(p.validate(mode).is_ok(), "{p:?}");
            }
        }
    }

    #[test]
    fn small_audits_pass_and_are_deterministic() {
        for mode in [Mode::L2, Mode::Hs] {
            let a = audit_random_params(mode, 300, 9);
            assert!(a.passed(), "{:?}", a.failures);
            assert!(a.critical_samples > 0);
            let b = audit_random_params(mode, 300, 9);
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }
}
