use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::conditions::theorem_conditions;
use super::rational::{int, max_of, min_of, rat, Interval, Rational};
use super::{ExponentTriple, Mode, ProblemParams};
use crate::error::{Error, Result};

/// Sampled rationals have denominators dividing `2^48`.
pub const DEFAULT_DENOMINATOR_BITS: u32 = 48;

const MAX_ATTEMPTS: usize = 1000;

/// Open interval of admissible `gamma` for the theorem of `mode`.
pub fn gamma_window(p: &ProblemParams, mode: Mode) -> Interval {
    let d = int(p.d() as i64);
    let (alpha, beta, s) = (p.alpha(), p.beta(), p.s());
    let b1 = beta + int(1);
    match mode {
        Mode::L2 => Interval::open(
            max_of(&int(0), &((alpha - int(1)) / &b1)),
            min_of(&int(1), &(alpha / &b1)),
        ),
        Mode::Hs => Interval::open(
            max_of(&(int(3) * s), &((alpha + s - int(1)) / &b1)),
            min_of(
                &min_of(&(int(1) + s), &((alpha - s) / &b1)),
                &((&d * beta + int(2) * alpha - int(4) * s) / (int(2) * &b1)),
            ),
        ),
    }
}

/// Admissible `1/r` for a fixed `gamma`, with the `1/q` window translated
/// through the scaling relation.
pub fn inv_r_window(p: &ProblemParams, mode: Mode, gamma: &Rational) -> Interval {
    let d = int(p.d() as i64);
    let (alpha, beta) = (p.alpha(), p.beta());
    let s = match mode {
        Mode::L2 => int(0),
        Mode::Hs => p.s().clone(),
    };
    let b1 = beta + int(1);
    let base = int(1) / (int(2) * &b1);
    let hi = (&d - int(2) * &s - int(2) * (alpha - int(1))) / (int(2) * &d * &b1) + gamma / &d;
    let mut iv = Interval::open(base.clone(), hi);
    if mode == Mode::Hs {
        iv.raise_lower(&base + (int(2) * &s - alpha) / (&d * &b1) + gamma / &d, false);
    }
    // 1/q <= 1/2  <=>  1/r >= 1/2 - (1 - gamma + s)/d
    iv.raise_lower(rat(1, 2) - (int(1) - gamma + &s) / &d, true);
    // 1/q > (gamma - s)/2  <=>  1/r < 1/2
    iv.lower_upper(rat(1, 2), false);
    iv
}

/// `n` exactly admissible triples drawn deterministically from `seed`.
pub fn region_sample(
    p: &ProblemParams,
    mode: Mode,
    n: usize,
    seed: u64,
) -> Result<Vec<ExponentTriple>> {
    p.validate(mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(p, mode, n, &mut rng)
}

pub(crate) fn sample_with(
    p: &ProblemParams,
    mode: Mode,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ExponentTriple>> {
    let s = match mode {
        Mode::L2 => int(0),
        Mode::Hs => p.s().clone(),
    };
    let gw = gamma_window(p, mode);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            let Some(gamma) = gw.sample_interior(rng, DEFAULT_DENOMINATOR_BITS) else {
                break;
            };
            let rw = inv_r_window(p, mode, &gamma);
            let Some(inv_r) = rw.sample_interior(rng, DEFAULT_DENOMINATOR_BITS) else {
                continue;
            };
            let t = ExponentTriple::from_scaling(p.d(), &s, inv_r, gamma);
            if theorem_conditions(p, &t, mode).all() {
                found = Some(t);
                break;
            }
        }
        match found {
            Some(t) => out.push(t),
            None => {
                return Err(Error::RegionEmpty {
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }
    Ok(out)
}
