//! Post-processing of grid functions: plateaus, flatness and symmetry defects.

use crate::twodim::Grid2D;

/// Maximal run of nearly equal values on a periodic 1D grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    /// Index of the first cell (may wrap past the end).
    pub start: usize,
    pub len: usize,
    /// Mean value over the run.
    pub level: f64,
}

/// Runs of at least `min_len` consecutive cells whose values stay within a band
/// of width `band`. Runs are grown greedily and may wrap around the period.
pub fn plateaus_1d(values: &[f64], band: f64, min_len: usize) -> Vec<Plateau> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    // start scanning at a cell that begins a band, so no run is split by index 0
    let start = (0..n)
        .find(|&k| {
            let prev = values[(k + n - 1) % n];
            (values[k] - prev).abs() > band
        })
        .unwrap_or(0);

    let mut runs = Vec::new();
    let mut k = 0;
    while k < n {
        let first = (start + k) % n;
        let (mut lo, mut hi) = (values[first], values[first]);
        let mut len = 1;
        while k + len < n {
            let v = values[(start + k + len) % n];
            let (nlo, nhi) = (lo.min(v), hi.max(v));
            if nhi - nlo > band {
                break;
            }
            lo = nlo;
            hi = nhi;
            len += 1;
        }
        if len >= min_len {
            let level = (0..len).map(|m| values[(first + m) % n]).sum::<f64>() / len as f64;
            runs.push(Plateau {
                start: first,
                len,
                level,
            });
        }
        k += len;
    }
    runs
}

/// Fraction of cells whose periodic 5-point neighbourhood spans at most `band`.
pub fn plateau_coverage_2d(grid: &Grid2D, values: &[f64], band: f64) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    let at = |i: usize, j: usize| values[i + j * nx];
    let mut flat = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let nb = [
                at(i, j),
                at((i + 1) % nx, j),
                at((i + nx - 1) % nx, j),
                at(i, (j + 1) % ny),
                at(i, (j + ny - 1) % ny),
            ];
            let lo = nb.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = nb.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= band {
                flat += 1;
            }
        }
    }
    flat as f64 / (nx * ny) as f64
}

/// Index of the cell centred at `1 - x` when cell `k` is centred at `(k+1)h`.
pub fn mirror_index(k: usize, n: usize) -> usize {
    (2 * n - k - 2) % n
}

/// `max |u(x) - u(1 - x)|`.
pub fn reflection_defect_1d(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n)
        .map(|k| (values[k] - values[mirror_index(k, n)]).abs())
        .fold(0.0, f64::max)
}

/// `max |u(x + 1/2) + u(x)|`; needs an even number of cells.
pub fn half_shift_antisymmetry_defect_1d(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n % 2 != 0 {
        return None;
    }
    Some(
        (0..n)
            .map(|k| (values[k] + values[(k + n / 2) % n]).abs())
            .fold(0.0, f64::max),
    )
}

/// Symmetry defects of a 2D grid function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralDefect {
    /// `max |u(x, y) - u(1 - x, y)|`.
    pub reflect_x: f64,
    /// `max |u(x, y) - u(x, 1 - y)|`.
    pub reflect_y: f64,
    /// `max |u(x, y) - u(y, x)|`; `None` on non-square grids.
    pub transpose: Option<f64>,
}

impl DihedralDefect {
    pub fn max(&self) -> f64 {
        self.reflect_x
            .max(self.reflect_y)
            .max(self.transpose.unwrap_or(0.0))
    }
}

pub fn dihedral_defect_2d(grid: &Grid2D, values: &[f64]) -> DihedralDefect {
    let (nx, ny) = (grid.nx(), grid.ny());
    let at = |i: usize, j: usize| values[i + j * nx];
    let mut rx = 0.0f64;
    let mut ry = 0.0f64;
    let mut tr = 0.0f64;
    for j in 0..ny {
        for i in 0..nx {
            let v = at(i, j);
            rx = rx.max((v - at(mirror_index(i, nx), j)).abs());
            ry = ry.max((v - at(i, mirror_index(j, ny))).abs());
            if nx == ny {
                tr = tr.max((v - at(j, i)).abs());
            }
        }
    }
    DihedralDefect {
        reflect_x: rx,
        reflect_y: ry,
        transpose: (nx == ny).then_some(tr),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_found_across_the_wrap() {
        // 0 0 0 | 1 1 1 1 | 0 0 (the zeros wrap into one run of 5)
        let v = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
        let p = plateaus_1d(&v, 1e-3, 2);
        assert_eq!(p.len(), 2);
        let mut lens: Vec<usize> = p.iter().map(|p| p.len).collect();
        lens.sort();
        assert_eq!(lens, vec![4, 5]);
        assert!(p.iter().any(|p| p.start == 7 && p.level == 0.0));
    }

    #[test]
    fn ramp_has_no_plateaus() {
        let v: Vec<f64> = (0..20).map(|k| k as f64 * 0.01).collect();
        assert!(plateaus_1d(&v, 1e-3, 3).is_empty());
        let constant = [2.0; 6];
        assert_eq!(plateaus_1d(&constant, 1e-3, 3).len(), 1);
        assert_eq!(plateaus_1d(&constant, 1e-3, 3)[0].len, 6);
    }

    #[test]
    fn coverage_of_a_step_function() {
        let g = Grid2D::new(6, 4).unwrap();
        // left half 0, right half 1 along x
        let v: Vec<f64> = (0..24).map(|k| if k % 6 < 3 { 0.0 } else { 1.0 }).collect();
        // cells adjacent to either jump (columns 0, 2, 3, 5) are not flat
        let c = plateau_coverage_2d(&g, &v, 1e-3);
        assert!((c - 8.0 / 24.0).abs() < 1e-15);
        assert_eq!(plateau_coverage_2d(&g, &[1.0; 24], 1e-3), 1.0);
    }

    #[test]
    fn symmetry_defects() {
        let n = 8;
        let v: Vec<f64> = (1..=n).map(|k| (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()).collect();
        assert!(reflection_defect_1d(&v) < 1e-15);
        assert!(half_shift_antisymmetry_defect_1d(&v).unwrap() < 1e-15);
        assert!(half_shift_antisymmetry_defect_1d(&v[..7]).is_none());

        let g = Grid2D::square(5).unwrap();
        let f: Vec<f64> = g.cell_centers().iter().map(|(x, y)| x * (x - 1.0) * y * (y - 1.0)).collect();
        assert!(dihedral_defect_2d(&g, &f).max() < 1e-15);
        let skew: Vec<f64> = g.cell_centers().iter().map(|(x, _)| *x).collect();
        let d = dihedral_defect_2d(&g, &skew);
        assert!(d.reflect_x > 0.1 && d.reflect_y == 0.0 && d.transpose.unwrap() > 0.1);
    }
}
