use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Complex function sampled on a periodic box grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    /// Wraps values produced by an internal operation that cannot create
    /// non-finite entries from finite input.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self::from_parts(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let coords = grid.axis_coords();
        let d = grid.dimension();
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        let values = (0..grid.len())
            .map(|flat| {
                grid.unravel(flat, &mut idx);
                for (xi, &j) in x.iter_mut().zip(&idx) {
                    *xi = coords[j];
                }
                f(&x)
            })
            .collect();
        Self::new(grid, values)
    }

    /// `amplitude * exp(-|x|^2 / (2 width^2))`.
    pub fn gaussian(grid: GridSpec, amplitude: f64, width: f64) -> Self {
        let values = grid
            .radii()
            .into_iter()
            .map(|r| Complex64::new(amplitude * (-0.5 * (r / width).powi(2)).exp(), 0.0))
            .collect();
        Self::from_parts(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Discrete mass `sum |f|^2 h^d`.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_parts(
            self.grid.clone(),
            self.values.iter().map(|&z| z * c).collect(),
        )
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(
            self.grid.clone(),
            self.values.iter().map(|z| z.conj()).collect(),
        )
    }

    /// `||self - other||_{L^2}`.
    /// `mu^((2-alpha)/beta) f(mu x)` on the grid contracted by `mu`, with the
    /// sample values reused unchanged apart from the amplitude.
    pub fn scaling_image(&self, mu: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidScale(mu));
        }
        let grid = self.grid.contracted(mu)?;
        let amp = mu.powf((2.0 - alpha) / beta);
        Ok(Self::from_parts(
            grid,
            self.values.iter().map(|&z| z * amp).collect(),
        ))
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.cell_volume()).sqrt())
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub(crate) fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Time-indexed sequence of fields on a fixed grid and a uniform time mesh
/// `t_k = k T / n_t`, `k = 0..=n_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    grid: GridSpec,
    final_time: f64,
    snapshots: Vec<ComplexField>,
}

impl Trajectory {
    pub fn new(final_time: f64, snapshots: Vec<ComplexField>) -> Result<Self> {
        if snapshots.len() < 2 {
            return Err(Error::InvalidConfig(
                "a trajectory needs at least two snapshots".into(),
            ));
        }
        if !(final_time.is_finite() && final_time > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "final time must be positive, got {final_time}"
            )));
        }
        let grid = snapshots[0].grid().clone();
        if snapshots.iter().any(|s| s.grid() != &grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            final_time,
            snapshots,
        })
    }

    /// The same field at every time of the mesh.
    pub fn constant(field: ComplexField, final_time: f64, steps: usize) -> Result<Self> {
        Self::new(final_time, vec![field; steps + 1])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    /// Number of time steps `n_t`.
    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.final_time / self.steps() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.snapshots.len()).map(|k| k as f64 * dt).collect()
    }

    pub fn snapshots(&self) -> &[ComplexField] {
        &self.snapshots
    }

    pub fn initial(&self) -> &ComplexField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &ComplexField {
        self.snapshots.last().expect("at least two snapshots")
    }

    /// `sup_k ||u(t_k) - v(t_k)||_{L^2}`.
    pub fn sup_l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_mesh(other)?;
        self.snapshots
            .iter()
            .zip(&other.snapshots)
            .try_fold(0.0f64, |acc, (a, b)| Ok(acc.max(a.l2_distance(b)?)))
    }

    pub fn sup_l2_norm(&self) -> f64 {
        self.snapshots
            .iter()
            .map(ComplexField::l2_norm)
            .fold(0.0, f64::max)
    }

    /// Pointwise difference on a shared mesh.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_mesh(other)?;
        let snapshots = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.final_time, snapshots)
    }

    pub fn map_snapshots(&self, f: impl Fn(&ComplexField) -> ComplexField) -> Result<Self> {
        Self::new(self.final_time, self.snapshots.iter().map(f).collect())
    }

    /// Every second snapshot (requires an even step count).
    pub fn coarsened(&self) -> Option<Self> {
        if !self.steps().is_multiple_of(2) || self.steps() < 2 {
            return None;
        }
        let snaps = self.snapshots.iter().step_by(2).cloned().collect();
        Self::new(self.final_time, snaps).ok()
    }

    /// The INLS scaling image `mu^((2-alpha)/beta) u(mu x, mu^2 t)` realized
    /// exactly on the contracted grid `[-L/mu, L/mu)^d` with the same number of
    /// points: sample `j` of the new grid sits at `x_j / mu`.
    pub fn rescaled(&self, mu: f64, alpha: f64, beta: f64) -> Result<Self> {
        let snaps = self
            .snapshots
            .iter()
            .map(|s| s.scaling_image(mu, alpha, beta))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.final_time / (mu * mu), snaps)
    }

    pub(crate) fn check_mesh(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid
            || self.snapshots.len() != other.snapshots.len()
            || (self.final_time - other.final_time).abs() > 1e-14 * self.final_time
        {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(2, 8, 2.0).unwrap()
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        assert!(ComplexField::new(grid(), vec![Complex64::default(); 10]).is_err());
        let mut v = vec![Complex64::default(); 64];
        v[3].re = f64::NAN;
        assert_eq!(ComplexField::new(grid(), v), Err(Error::NonFinite));
    }

    #[test]
    fn mass_of_constant_is_volume() {
        let f = ComplexField::from_fn(grid(), |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((f.mass() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn trajectory_mesh() {
        let f = ComplexField::gaussian(grid(), 1.0, 1.0);
        let t = Trajectory::constant(f, 2.0, 4).unwrap();
        assert_eq!(t.steps(), 4);
        assert_eq!(t.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(t.coarsened().unwrap().steps(), 2);
        assert!(Trajectory::new(1.0, vec![]).is_err());
    }
}
