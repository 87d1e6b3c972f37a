//! Periodic box discretization of R^d.
//!
//! The box is `[-L, L)^d` sampled at `x_j = -L + j h`, `h = 2L/N`, so the
//! origin is always the grid point `j = N/2` on every axis. Values are stored
//! row-major with axis 0 slowest.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dimension: usize,
    points_per_axis: usize,
    half_length: f64,
}

impl GridSpec {
    pub fn new(dimension: usize, points_per_axis: usize, half_length: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidGrid("dimension must be >= 1".into()));
        }
        if points_per_axis < 8 || !points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {points_per_axis}"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        let total = (points_per_axis as u128).checked_pow(dimension as u32);
        if total.is_none_or(|t| t > (1u128 << 31)) {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(Self {
            dimension,
            points_per_axis,
            half_length,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_axis as f64
    }

    /// Total number of grid points, `N^d`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dimension as i32)
    }

    /// Same number of points on the box `[-L/factor, L/factor)^d`.
    pub fn contracted(&self, factor: f64) -> Result<Self> {
        Self::new(self.dimension, self.points_per_axis, self.half_length / factor)
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points_per_axis)
            .map(|j| -self.half_length + j as f64 * h)
            .collect()
    }

    /// Dual-grid frequencies `pi k / L` in DFT storage order
    /// (`k = 0, 1, ..., N/2 - 1, -N/2, ..., -1`).
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let n = self.points_per_axis as isize;
        (0..n)
            .map(|m| {
                let k = if m < n / 2 { m } else { m - n };
                PI * k as f64 / self.half_length
            })
            .collect()
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        for axis in (0..self.dimension).rev() {
            out[axis] = flat % n;
            flat /= n;
        }
    }

    /// `|x|` at every grid point.
    pub fn radii(&self) -> Vec<f64> {
        let coords = self.axis_coords();
        self.sum_of_squares(&coords).into_iter().map(f64::sqrt).collect()
    }

    /// `max(|x|, h/2)` at every grid point: the regularized distance used by
    /// every singular weight in the crate.
    pub fn clamped_radii(&self) -> Vec<f64> {
        let floor = 0.5 * self.spacing();
        self.radii().into_iter().map(|r| r.max(floor)).collect()
    }

    /// `|xi|^2` at every dual-grid point, DFT order.
    pub fn frequency_norms_sq(&self) -> Vec<f64> {
        let freqs = self.axis_frequencies();
        self.sum_of_squares(&freqs)
    }

    fn sum_of_squares(&self, axis: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let n = self.points_per_axis;
        let mut stride = 1;
        for _ in 0..self.dimension {
            for (flat, acc) in out.iter_mut().enumerate() {
                let c = axis[(flat / stride) % n];
                *acc += c * c;
            }
            stride *= n;
        }
        out
    }

    /// Coordinates of the point with the given flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dimension];
        self.unravel(flat, &mut idx);
        let h = self.spacing();
        idx.iter()
            .map(|&j| -self.half_length + j as f64 * h)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(3, 6, 1.0).is_err());
        assert!(GridSpec::new(3, 33, 1.0).is_err());
        assert!(GridSpec::new(0, 16, 1.0).is_err());
        assert!(GridSpec::new(1, 16, 0.0).is_err());
        assert!(GridSpec::new(2, 48, 4.0).is_ok());
    }

    #[test]
    fn origin_is_a_grid_point() {
        let g = GridSpec::new(3, 16, 4.0).unwrap();
        let r = g.radii();
        let centre = 8 * 256 + 8 * 16 + 8;
        assert_eq!(r[centre], 0.0);
        assert_eq!(g.clamped_radii()[centre], 0.25);
        assert_eq!(g.point(centre), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn frequencies_follow_dft_order() {
        let g = GridSpec::new(1, 8, std::f64::consts::PI).unwrap();
        assert_eq!(
            g.axis_frequencies(),
            vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]
        );
    }

    #[test]
    fn radii_match_point_coordinates() {
        let g = GridSpec::new(2, 8, 2.0).unwrap();
        let r = g.radii();
        for flat in [0, 5, 17, 63] {
            let p = g.point(flat);
            let expect = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r[flat] - expect).abs() < 1e-15);
        }
    }
}
