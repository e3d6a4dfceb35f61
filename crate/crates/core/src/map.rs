use crate::error::{Error, Result};
use crate::units::SpectralGrid;
use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

/// Selects one axis of a [`ComplexMap2D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapAxis {
    /// Rows: the input (or signal) axis.
    Input,
    /// Columns: the pump, output or idler axis.
    Second,
}

/// Complex amplitude over an (input × second) grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMap2D {
    pub axis_in: SpectralGrid,
    pub axis_second: SpectralGrid,
    values: Vec<Complex<f64>>,
}

impl ComplexMap2D {
    pub fn new(axis_in: SpectralGrid, axis_second: SpectralGrid, values: Vec<Complex<f64>>) -> Result<Self> {
        if values.len() != axis_in.len() * axis_second.len() {
            return Err(Error::invalid(
                "map",
                format!("{} values for a {}x{} grid", values.len(), axis_in.len(), axis_second.len()),
            ));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NumericalFailure("non-finite map entry".into()));
        }
        Ok(Self { axis_in, axis_second, values })
    }

    /// Builds a map by evaluating `f(i, j)` on every pixel, rows in parallel.
    pub fn from_fn<F>(axis_in: SpectralGrid, axis_second: SpectralGrid, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<Complex<f64>> + Sync,
    {
        let cols = axis_second.len();
        let rows: Vec<Vec<Complex<f64>>> = (0..axis_in.len())
            .into_par_iter()
            .map(|i| (0..cols).map(|j| f(i, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Self::new(axis_in, axis_second, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.axis_in.len()
    }

    pub fn cols(&self) -> usize {
        self.axis_second.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<f64> {
        self.values[i * self.cols() + j]
    }

    pub fn intensity(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).norm_sqr()
    }

    pub fn values(&self) -> &[Complex<f64>] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sum of `|value|²` over all pixels.
    pub fn total_intensity(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Intensity summed over the other axis, one entry per point of `axis`.
    pub fn marginal(&self, axis: MapAxis) -> Vec<f64> {
        let (rows, cols) = (self.rows(), self.cols());
        match axis {
            MapAxis::Input => (0..rows)
                .map(|i| (0..cols).map(|j| self.intensity(i, j)).sum())
                .collect(),
            MapAxis::Second => (0..cols)
                .map(|j| (0..rows).map(|i| self.intensity(i, j)).sum())
                .collect(),
        }
    }

    pub fn axis(&self, axis: MapAxis) -> &SpectralGrid {
        match axis {
            MapAxis::Input => &self.axis_in,
            MapAxis::Second => &self.axis_second,
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_row_slice(self.rows(), self.cols(), &self.values)
    }
}
