//! Fourier machinery on the periodic box: tensor-product FFTs, the free
//! Schrödinger propagator, fractional derivatives and Sobolev norms.
//!
//! Continuum normalization: the forward transform carries the Riemann weight
//! `h^d`, so `f_hat(xi_k) ~ int f(x) e^{-i xi_k (x + L)} dx` and the discrete
//! Plancherel identity reads `sum_x |f|^2 h^d = (1/V) sum_k |f_hat_k|^2`
//! with `V = (2L)^d` the box volume.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::GridSpec;

/// Cached FFT plans and dual-grid data for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    freq_sq: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.points_per_axis();
        Self {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            freq_sq: grid.frequency_norms_sq(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `|xi|^2` in DFT order.
    pub fn frequency_norms_sq(&self) -> &[f64] {
        &self.freq_sq
    }

    /// Unnormalized d-dimensional DFT.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse DFT including the `1/N^d` factor.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / self.grid.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points_per_axis();
        let d = self.grid.dimension();
        assert_eq!(data.len(), self.grid.len());
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        // last axis is contiguous: rustfft processes consecutive chunks
        plan.process_with_scratch(data, &mut scratch);
        if d == 1 {
            return;
        }
        let mut lines = vec![Complex64::default(); data.len()];
        for axis in 0..d - 1 {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = n * stride;
            let blocks = data.len() / block;
            for b in 0..blocks {
                for i in 0..stride {
                    let line = (b * stride + i) * n;
                    for j in 0..n {
                        lines[line + j] = data[b * block + i + j * stride];
                    }
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            for b in 0..blocks {
                for i in 0..stride {
                    let line = (b * stride + i) * n;
                    for j in 0..n {
                        data[b * block + i + j * stride] = lines[line + j];
                    }
                }
            }
        }
    }

    /// Applies a diagonal Fourier symbol to raw values.
    pub fn apply_symbol_in_place(&self, data: &mut [Complex64], symbol: impl Fn(f64) -> Complex64) {
        self.forward_in_place(data);
        for (z, &k2) in data.iter_mut().zip(&self.freq_sq) {
            *z *= symbol(k2);
        }
        self.inverse_in_place(data);
    }

    /// In-place `e^{it Delta}`.
    pub fn propagate_in_place(&self, data: &mut [Complex64], t: f64) {
        if t == 0.0 {
            return;
        }
        self.apply_symbol_in_place(data, |k2| Complex64::from_polar(1.0, -t * k2));
    }

    pub fn propagate(&self, f: &ComplexField, t: f64) -> ComplexField {
        let mut v = f.values().to_vec();
        self.propagate_in_place(&mut v, t);
        ComplexField::from_parts(self.grid.clone(), v)
    }
}

/// A diagonal operator on the dual grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierMultiplier {
    grid: GridSpec,
    symbol: Vec<Complex64>,
}

impl FourierMultiplier {
    pub fn new(grid: GridSpec, symbol: Vec<Complex64>) -> Result<Self> {
        if symbol.len() != grid.len() {
            return Err(Error::InvalidGrid("symbol length does not match grid".into()));
        }
        Ok(Self { grid, symbol })
    }

    /// Symbol of `e^{it Delta}`: `exp(-i t |xi|^2)`.
    pub fn free_propagator(grid: &GridSpec, t: f64) -> Self {
        let symbol = grid
            .frequency_norms_sq()
            .into_iter()
            .map(|k2| Complex64::from_polar(1.0, -t * k2))
            .collect();
        Self {
            grid: grid.clone(),
            symbol,
        }
    }

    /// Symbol of `|nabla|^s`; the zero mode is sent to 0 whenever `s != 0`.
    pub fn fractional(grid: &GridSpec, s: f64) -> Self {
        let symbol = grid
            .frequency_norms_sq()
            .into_iter()
            .map(|k2| Complex64::new(frac_symbol(k2, s), 0.0))
            .collect();
        Self {
            grid: grid.clone(),
            symbol,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            symbol: self
                .symbol
                .iter()
                .zip(&other.symbol)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn apply(&self, f: &ComplexField) -> Result<ComplexField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let spectral = Spectral::new(&self.grid);
        let mut v = f.values().to_vec();
        spectral.forward_in_place(&mut v);
        for (z, m) in v.iter_mut().zip(&self.symbol) {
            *z *= m;
        }
        spectral.inverse_in_place(&mut v);
        ComplexField::new(self.grid.clone(), v)
    }
}

fn frac_symbol(k2: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if k2 == 0.0 {
        0.0
    } else {
        k2.powf(0.5 * s)
    }
}

/// Solves `i u_t + Delta u = 0` for time `t` exactly on the grid.
pub fn free_propagate(f: &ComplexField, t: f64) -> ComplexField {
    Spectral::new(f.grid()).propagate(f, t)
}

/// `|nabla|^s f` for `s` in `(-d, d)`.
pub fn fractional_derivative(f: &ComplexField, s: f64) -> Result<ComplexField> {
    let d = f.grid().dimension();
    if !s.is_finite() || s <= -(d as f64) || s >= d as f64 {
        return Err(Error::InvalidOrder {
            order: s,
            dimension: d,
        });
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    let spectral = Spectral::new(f.grid());
    let mut v = f.values().to_vec();
    spectral.apply_symbol_in_place(&mut v, |k2| Complex64::new(frac_symbol(k2, s), 0.0));
    ComplexField::new(f.grid().clone(), v)
}

/// Forward transform with continuum (`h^d`) weight, DFT order.
pub fn fourier_transform(f: &ComplexField) -> Vec<Complex64> {
    let spectral = Spectral::new(f.grid());
    let mut v = f.values().to_vec();
    spectral.forward_in_place(&mut v);
    let w = f.grid().cell_volume();
    for z in v.iter_mut() {
        *z *= w;
    }
    v
}

/// Homogeneous `(1/V sum |xi|^{2s} |f_hat|^2)^{1/2}` or inhomogeneous
/// `(||f||_2^2 + ||f||_{H^s dot}^2)^{1/2}`.
pub fn sobolev_norm(f: &ComplexField, s: f64, homogeneous: bool) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidOrder {
            order: s,
            dimension: f.grid().dimension(),
        });
    }
    let hat = fourier_transform(f);
    let k2 = f.grid().frequency_norms_sq();
    let dot: f64 = hat
        .iter()
        .zip(&k2)
        .map(|(z, &k2)| frac_symbol(k2, 2.0 * s) * z.norm_sqr())
        .sum::<f64>()
        / f.grid().volume();
    if homogeneous {
        Ok(dot.sqrt())
    } else {
        Ok((f.mass() + dot).sqrt())
    }
}

/// `lambda^((2-alpha)/beta) f(lambda x)` by trigonometric interpolation.
///
/// Points with `lambda x` outside the box are set to zero: test data is
/// compactly supported inside `[-L/lambda, L/lambda)^d`.
pub fn rescale_field(f: &ComplexField, lambda: f64, alpha: f64, beta: f64) -> Result<ComplexField> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::InvalidScale(lambda));
    }
    let amp = lambda.powf((2.0 - alpha) / beta);
    if lambda == 1.0 {
        return Ok(f.scale_real(amp));
    }
    let grid = f.grid();
    let n = grid.points_per_axis();
    let d = grid.dimension();
    let matrix = interpolation_matrix(grid, lambda);

    let mut data = f.values().to_vec();
    let mut line = vec![Complex64::default(); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = n * stride;
        for b in 0..data.len() / block {
            for i in 0..stride {
                let base = b * block + i;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[base + j * stride];
                }
                for row in 0..n {
                    let weights = &matrix[row * n..(row + 1) * n];
                    data[base + row * stride] = weights
                        .iter()
                        .zip(&line)
                        .map(|(&w, &z)| z * w)
                        .sum();
                }
            }
        }
    }
    for z in data.iter_mut() {
        *z *= amp;
    }
    ComplexField::new(grid.clone(), data)
}

/// Row `i` holds the weights that evaluate the trigonometric interpolant of
/// the samples at `lambda x_i`. The Nyquist mode enters as a cosine so real
/// data stays real.
fn interpolation_matrix(grid: &GridSpec, lambda: f64) -> Vec<f64> {
    let n = grid.points_per_axis();
    let l = grid.half_length();
    let xs = grid.axis_coords();
    let omega = std::f64::consts::PI / l;
    let kernel = |z: f64| -> f64 {
        let mut acc = 1.0 + (omega * (n / 2) as f64 * z).cos();
        for k in 1..n / 2 {
            acc += 2.0 * (omega * k as f64 * z).cos();
        }
        acc / n as f64
    };
    let mut m = vec![0.0; n * n];
    for (i, &xi) in xs.iter().enumerate() {
        let y = lambda * xi;
        if y < -l || y >= l {
            continue;
        }
        for (j, &xj) in xs.iter().enumerate() {
            m[i * n + j] = kernel(y - xj);
        }
    }
    m
}
