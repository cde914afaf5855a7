//! Initial data of the reference experiments.
//!
//! Formulas are sampled at cell centers, the sample mean is removed and the
//! result is returned in reduced coordinates.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::operators1d::Grid1D;
use crate::reduction;
use crate::twodim::Grid2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Flat-topped `1/|x - 1/2|` cusp (scheme comparison).
    Cusp1d,
    /// Piecewise cubic with flat pieces around `0` and `1/2` (discontinuity
    /// and symmetry).
    Cubic1d,
    /// `-cos(2πx)` (extinction time, Spohn).
    Cos1d,
    /// `x(x-1)y(y-1) - 1/36` on the unit square.
    Poly2d,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Cusp1d, Preset::Cubic1d, Preset::Cos1d, Preset::Poly2d];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Cusp1d => "cusp1d",
            Preset::Cubic1d => "cubic1d",
            Preset::Cos1d => "cos1d",
            Preset::Poly2d => "poly2d",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Preset::Poly2d => 2,
            _ => 1,
        }
    }

    /// Point value of a 1D preset.
    pub fn eval_1d(self, x: f64) -> Option<f64> {
        match self {
            Preset::Cusp1d => Some(cusp(x)),
            Preset::Cubic1d => Some(piecewise_cubic(x)),
            Preset::Cos1d => Some(-(2.0 * PI * x).cos()),
            Preset::Poly2d => None,
        }
    }

    /// Point value of a 2D preset.
    pub fn eval_2d(self, x: f64, y: f64) -> Option<f64> {
        match self {
            Preset::Poly2d => Some(x * (x - 1.0) * y * (y - 1.0) - 1.0 / 36.0),
            _ => None,
        }
    }

    /// Raw samples at the cell centers `x_n = n h`, `n = 1..=N`.
    pub fn samples_1d(self, grid: &Grid1D) -> Result<Vec<f64>> {
        grid.cell_centers()
            .into_iter()
            .map(|x| self.eval_1d(x).ok_or_else(|| wrong_dimension(self, 1)))
            .collect()
    }

    /// Raw samples at `(x_i, y_j)`, x fastest.
    pub fn samples_2d(self, grid: &Grid2D) -> Result<Vec<f64>> {
        grid.cell_centers()
            .into_iter()
            .map(|(x, y)| self.eval_2d(x, y).ok_or_else(|| wrong_dimension(self, 2)))
            .collect()
    }

    pub fn initial_1d(self, grid: &Grid1D) -> Result<Vec<f64>> {
        Ok(reduction::reduce(&self.samples_1d(grid)?))
    }

    pub fn initial_2d(self, grid: &Grid2D) -> Result<Vec<f64>> {
        Ok(reduction::reduce(&self.samples_2d(grid)?))
    }
}

fn wrong_dimension(preset: Preset, dim: usize) -> Error {
    Error::Incompatible(format!(
        "preset `{}` is {}D, requested on a {}D grid",
        preset.name(),
        preset.dimension(),
        dim
    ))
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Mean-free reduced vector from raw samples of length `expected`.
pub fn from_samples(samples: &[f64], expected: usize) -> Result<Vec<f64>> {
    check_len("initial samples", expected, samples.len())?;
    Ok(reduction::reduce(samples))
}

/// Convenience lookup by name for 1D grids.
pub fn preset_initial(name: &str, grid: &Grid1D) -> Result<Vec<f64>> {
    name.parse::<Preset>()?.initial_1d(grid)
}

fn cusp(x: f64) -> f64 {
    let r = (x - 0.5).abs();
    let ln5 = 5f64.ln();
    if r <= 0.1 {
        10.0 * (4.0 - ln5)
    } else {
        5.0 / r - 10.0 * (1.0 + ln5)
    }
}

const CUBIC_AMPLITUDE: f64 = 450.0;
const CUBIC_HALF_WIDTH: f64 = 1.0 / 15.0;

fn piecewise_cubic(x: f64) -> f64 {
    let a = CUBIC_AMPLITUDE;
    let r = CUBIC_HALF_WIDTH;
    let x = x.rem_euclid(1.0);
    let level = a * (0.25 - r).powi(3);
    if x < r || x > 1.0 - r {
        -level
    } else if x < 0.5 - r {
        a * (x - 0.25).powi(3)
    } else if x <= 0.5 + r {
        level
    } else {
        -a * (x - 0.75).powi(3)
    }
}
