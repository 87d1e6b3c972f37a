//! Gaussian random fields with a power-law spectrum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::GridSpec;
use crate::spectral::{sobolev_norm, Spectral};

/// Generator words reserved per Fourier mode.
const WORDS_PER_MODE: u128 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFieldSpec {
    /// Regularity of the normalizing `H^s` seminorm.
    pub s: f64,
    /// Spectral decay `|xi|^{-p}`; `None` means `(d + 2s + 1)/2`.
    pub p: Option<f64>,
}

impl RandomFieldSpec {
    pub fn new(s: f64) -> Self {
        Self { s, p: None }
    }

    pub fn decay(&self, dimension: usize) -> f64 {
        self.p
            .unwrap_or((dimension as f64 + 2.0 * self.s + 1.0) / 2.0)
    }
}

/// Position of the integer frequency `k` in the generator stream. Depends on
/// `k` only, so two grids with the same box share their common modes.
fn mode_key(k: &[i64]) -> u128 {
    k.iter().fold(0u128, |acc, &ki| {
        let zigzag = if ki >= 0 { 2 * ki } else { -2 * ki - 1 } as u128;
        (acc << 16) | zigzag
    })
}

/// Sample `index` of the ensemble: i.i.d. complex Gaussian coefficients
/// times `|xi|^{-p}`, zero mean mode, normalized to unit `H^s` seminorm.
pub fn gaussian_random_field(
    grid: &GridSpec,
    spec: &RandomFieldSpec,
    seed: u64,
    index: u64,
) -> Result<ComplexField> {
    let n = grid.points_per_axis();
    if n > 1 << 15 || grid.dimension() > 8 {
        return Err(Error::InvalidGrid("grid too large for mode keys".into()));
    }
    if spec.s < 0.0 {
        return Err(Error::InvalidConfig("random field needs s >= 0".into()));
    }
    let p = spec.decay(grid.dimension());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let spectral = Spectral::new(grid);
    let half = n as i64 / 2;
    let mut idx = vec![0usize; grid.dimension()];
    let mut k = vec![0i64; grid.dimension()];
    let mut coeffs = Vec::with_capacity(grid.len());
    for (flat, &k2) in spectral.frequency_norms_sq().iter().enumerate() {
        if k2 == 0.0 {
            coeffs.push(Complex64::default());
            continue;
        }
        grid.unravel(flat, &mut idx);
        for (ki, &m) in k.iter_mut().zip(&idx) {
            let m = m as i64;
            *ki = if m < half { m } else { m - n as i64 };
        }
        rng.set_word_pos(mode_key(&k) * WORDS_PER_MODE);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        coeffs.push(Complex64::new(re, im) * k2.powf(-p / 2.0));
    }
    spectral.inverse_in_place(&mut coeffs);
    let field = ComplexField::new(grid.clone(), coeffs)?;
    let norm = sobolev_norm(&field, spec.s, true)?;
    Ok(field.scale_real(1.0 / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fourier_transform;

    #[test]
    fn unit_norm_and_deterministic() {
        let g = GridSpec::new(3, 16, 4.0).unwrap();
        let spec = RandomFieldSpec::new(0.1);
        let a = gaussian_random_field(&g, &spec, 3, 5).unwrap();
        let b = gaussian_random_field(&g, &spec, 3, 5).unwrap();
        let c = gaussian_random_field(&g, &spec, 3, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((sobolev_norm(&a, 0.1, true).unwrap() - 1.0).abs() < 1e-12);
        assert!(fourier_transform(&a)[0].norm() < 1e-12);
    }

    #[test]
    fn refinement_keeps_common_modes() {
        let spec = RandomFieldSpec { s: 0.0, p: Some(2.0) };
        let coarse = GridSpec::new(1, 16, 4.0).unwrap();
        let fine = GridSpec::new(1, 32, 4.0).unwrap();
        let a = fourier_transform(&gaussian_random_field(&coarse, &spec, 1, 0).unwrap());
        let b = fourier_transform(&gaussian_random_field(&fine, &spec, 1, 0).unwrap());
        // equal up to the normalization, which differs between the grids
        let ratio = b[3] / a[3];
        for k in 1..8 {
            assert!((b[k] / a[k] - ratio).norm() < 1e-10 * ratio.norm());
            assert!((b[32 - k] / a[16 - k] - ratio).norm() < 1e-10 * ratio.norm());
        }
    }
}
