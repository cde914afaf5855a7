//! Periodic 2D grids, their Kronecker-structured operators and the isotropic,
//! anisotropic and Spohn split Bregman flows.
//!
//! Unknowns are ordered x fastest: cell `(i, j)` (0-based) sits at index
//! `i + j N_x`. The jump operators are
//!
//! ```text
//! B_x = (I_{N_y} ⊗ S_{N_x}) R = h_x ∇_xh R,   B_y = (S_{N_y} ⊗ I_{N_x}) R = h_y ∇_yh R
//! ```
//!
//! and the fidelity matrices are `K_x = ∇_xh R A2⁻¹`, `K_y = ∇_yh R A2⁻¹` with
//! `A2 = L (∇_xhᵀ∇_xh + ∇_yhᵀ∇_yh) R` the reduced Laplacian.
//!
//! All solves are dense. Building the operators costs `O(n³)` in the number of
//! unknowns `n = N_x N_y - 1`; each later sweep is `O(n²)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

use crate::error::{check_len, check_positive, Error, Result};
use crate::operators1d::{Grid1D, Scheme};
use crate::reduction;
use crate::shrinkage::{shrink_iso2d, shrink_spohn2d, shrink_tv, SpohnParams};
use crate::solver1d::{Mode, DEFAULT_MAX_SWEEPS, DEFAULT_OSV_TOL};
use crate::trajectory::{self, Diagnostics, FlowMonitor, FlowProblem, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        for n in [nx, ny] {
            if n < 3 {
                return Err(Error::GridTooSmall(n));
            }
        }
        Ok(Self { nx, ny })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn reduced_len(&self) -> usize {
        self.cell_count() - 1
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.nx
    }

    /// `(x_i, y_j) = (i h_x, j h_y)` for `i = 1..=N_x`, `j = 1..=N_y`, x fastest.
    pub fn cell_centers(&self) -> Vec<(f64, f64)> {
        let (hx, hy) = (self.hx(), self.hy());
        (1..=self.ny)
            .flat_map(|j| (1..=self.nx).map(move |i| (i as f64 * hx, j as f64 * hy)))
            .collect()
    }
}

/// `(I ⊗ S_{N_x}) v`: backward difference along x.
pub fn diff_x(grid: &Grid2D, v: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let row = &v[j * nx..(j + 1) * nx];
        let dst = &mut out[j * nx..(j + 1) * nx];
        dst[0] = row[0] - row[nx - 1];
        for i in 1..nx {
            dst[i] = row[i] - row[i - 1];
        }
    }
    out
}

/// `(I ⊗ S_{N_x})ᵀ w`.
pub fn diff_x_transpose(grid: &Grid2D, w: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let row = &w[j * nx..(j + 1) * nx];
        let dst = &mut out[j * nx..(j + 1) * nx];
        for i in 0..nx - 1 {
            dst[i] = row[i] - row[i + 1];
        }
        dst[nx - 1] = row[nx - 1] - row[0];
    }
    out
}

/// `(S_{N_y} ⊗ I) v`: backward difference along y.
pub fn diff_y(grid: &Grid2D, v: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let prev = if j == 0 { ny - 1 } else { j - 1 };
        for i in 0..nx {
            out[i + j * nx] = v[i + j * nx] - v[i + prev * nx];
        }
    }
    out
}

/// `(S_{N_y} ⊗ I)ᵀ w`.
pub fn diff_y_transpose(grid: &Grid2D, w: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let next = (j + 1) % ny;
        for i in 0..nx {
            out[i + j * nx] = w[i + j * nx] - w[i + next * nx];
        }
    }
    out
}

/// Dense `∇_xh = h_x⁻¹ I_{N_y} ⊗ S_{N_x}`.
pub fn gradient_x(grid: &Grid2D) -> DMatrix<f64> {
    let s = difference_matrix(grid.nx);
    DMatrix::<f64>::identity(grid.ny, grid.ny).kronecker(&s) / grid.hx()
}

/// Dense `∇_yh = h_y⁻¹ S_{N_y} ⊗ I_{N_x}`.
pub fn gradient_y(grid: &Grid2D) -> DMatrix<f64> {
    let s = difference_matrix(grid.ny);
    s.kronecker(&DMatrix::<f64>::identity(grid.nx, grid.nx)) / grid.hy()
}

fn difference_matrix(n: usize) -> DMatrix<f64> {
    crate::operators1d::build_s(&Grid1D::new(n).expect("grid checked"))
}

/// Applies a full-vector stencil to every column of `m`.
fn map_columns(m: &DMatrix<f64>, rows: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, m.ncols());
    for (j, col) in m.column_iter().enumerate() {
        out.set_column(j, &DVector::from_vec(f(col.as_slice())));
    }
    out
}

/// Assembled 2D operators with `K_x = J_x`, `K_y = J_y`.
#[derive(Debug, Clone)]
pub struct OperatorSet2D {
    grid: Grid2D,
    a2: DMatrix<f64>,
    a2_lu: LU<f64, Dyn, Dyn>,
    kx: DMatrix<f64>,
    ky: DMatrix<f64>,
    /// `K_xᵀK_x + K_yᵀK_y`.
    gram: DMatrix<f64>,
}

impl OperatorSet2D {
    pub fn new(grid: Grid2D, scheme: Scheme) -> Result<Self> {
        if scheme != Scheme::ApproxJ {
            return Err(Error::UnsupportedScheme);
        }
        let cells = grid.cell_count();
        let (ihx2, ihy2) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
        // (∇_xhᵀ∇_xh + ∇_yhᵀ∇_yh) R, column by column
        let r = reduction::r_matrix(cells);
        let laplacian_r = map_columns(&r, cells, |c| {
            let gx = diff_x_transpose(&grid, &diff_x(&grid, c));
            let gy = diff_y_transpose(&grid, &diff_y(&grid, c));
            gx.iter().zip(&gy).map(|(a, b)| ihx2 * a + ihy2 * b).collect()
        });
        drop(r);
        let a2 = reduction::left_mul_l(&laplacian_r);
        drop(laplacian_r);
        let a2_lu = a2.clone().lu();
        let n = grid.reduced_len();
        let mut w = DMatrix::<f64>::identity(n, n);
        if !a2_lu.solve_mut(&mut w) {
            return Err(Error::Factorization("A2"));
        }

        let (ihx, ihy) = (1.0 / grid.hx(), 1.0 / grid.hy());
        let kx = map_columns(&w, cells, |c| {
            diff_x(&grid, &reduction::expand(c)).into_iter().map(|v| v * ihx).collect()
        });
        let ky = map_columns(&w, cells, |c| {
            diff_y(&grid, &reduction::expand(c)).into_iter().map(|v| v * ihy).collect()
        });

        // Rᵀ(∇ᵀ∇)R A2⁻¹ = RᵀR, so the Gram matrix is A2⁻ᵀ (I + 𝟙𝟙ᵀ).
        let col_sums = w.row_sum();
        let mut gram = w;
        for mut row in gram.row_iter_mut() {
            row += &col_sums;
        }
        gram.transpose_mut();
        let gt = gram.transpose();
        gram = (&gram + gt) * 0.5;

        Ok(Self {
            grid,
            a2,
            a2_lu,
            kx,
            ky,
            gram,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::ApproxJ
    }

    /// Reduced Laplacian `A2`.
    pub fn a2(&self) -> &DMatrix<f64> {
        &self.a2
    }

    pub fn solve_a2(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("right-hand side", self.grid.reduced_len(), b.len())?;
        self.a2_lu.solve(b).ok_or(Error::Factorization("A2"))
    }

    pub fn kx(&self) -> &DMatrix<f64> {
        &self.kx
    }

    pub fn ky(&self) -> &DMatrix<f64> {
        &self.ky
    }

    /// `K_xᵀK_x + K_yᵀK_y`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `B_x u = (I ⊗ S) R u`.
    pub fn apply_bx(&self, u: &[f64]) -> Vec<f64> {
        diff_x(&self.grid, &reduction::expand(u))
    }

    pub fn apply_by(&self, u: &[f64]) -> Vec<f64> {
        diff_y(&self.grid, &reduction::expand(u))
    }

    pub fn apply_bx_transpose(&self, w: &[f64]) -> Vec<f64> {
        reduction::expand_transpose(&diff_x_transpose(&self.grid, w))
    }

    pub fn apply_by_transpose(&self, w: &[f64]) -> Vec<f64> {
        reduction::expand_transpose(&diff_y_transpose(&self.grid, w))
    }

    /// Dense `B_x`, for checks.
    pub fn bx_dense(&self) -> DMatrix<f64> {
        reduction::right_mul_r(&gradient_x(&self.grid)) * self.grid.hx()
    }

    pub fn by_dense(&self) -> DMatrix<f64> {
        reduction::right_mul_r(&gradient_y(&self.grid)) * self.grid.hy()
    }

    /// `h_x h_y (‖K_x v‖² + ‖K_y v‖²)`.
    pub fn hminus1_norm_sq(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        self.grid.cell_area() * v.dot(&(&self.gram * &v))
    }

    pub fn hminus1_norm(&self, v: &[f64]) -> f64 {
        self.hminus1_norm_sq(v).max(0.0).sqrt()
    }

    /// Isotropic total variation `Σ √(b_x² + b_y²)`.
    pub fn tv_energy(&self, u: &[f64]) -> f64 {
        let (bx, by) = (self.apply_bx(u), self.apply_by(u));
        bx.iter().zip(&by).map(|(x, y)| x.hypot(*y)).sum()
    }

    /// Anisotropic total variation `Σ |b_x| + |b_y|`.
    pub fn anisotropic_tv_energy(&self, u: &[f64]) -> f64 {
        let (bx, by) = (self.apply_bx(u), self.apply_by(u));
        bx.iter().chain(&by).map(|x| x.abs()).sum()
    }
}

/// Energy of the 2D flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model2D {
    /// `Σ √(d_x² + d_y²)`.
    Isotropic,
    /// `Σ |d_x| + |d_y|`.
    Anisotropic,
    /// `β Σ |d_xy| + Σ |d_xy|³/3`.
    Spohn(SpohnParams),
}

impl Model2D {
    pub fn name(&self) -> &'static str {
        match self {
            Model2D::Isotropic => "isotropic",
            Model2D::Anisotropic => "anisotropic",
            Model2D::Spohn(_) => "spohn",
        }
    }

    /// Energy of a pair of jump fields.
    pub fn energy(&self, dx: &[f64], dy: &[f64]) -> f64 {
        let pairs = dx.iter().zip(dy);
        match self {
            Model2D::Isotropic => pairs.map(|(x, y)| x.hypot(*y)).sum(),
            Model2D::Anisotropic => pairs.map(|(x, y)| x.abs() + y.abs()).sum(),
            Model2D::Spohn(p) => pairs
                .map(|(x, y)| {
                    let s = x.hypot(*y);
                    p.beta() * s + s * s * s / 3.0
                })
                .sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig2D {
    pub lambda: f64,
    pub mu: f64,
    pub model: Model2D,
    pub mode: Mode,
    pub osv_tol: f64,
    pub max_sweeps: usize,
}

impl SolverConfig2D {
    pub fn new(lambda: f64, mu: f64, model: Model2D, mode: Mode) -> Result<Self> {
        check_positive("lambda", lambda)?;
        check_positive("mu", mu)?;
        Ok(Self {
            lambda,
            mu,
            model,
            mode,
            osv_tol: DEFAULT_OSV_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        })
    }

    /// `λ = c_λ (h_x h_y)⁻²`, `μ = c_μ (h_x h_y)⁻¹`; on square grids these are
    /// `c_λ h⁻⁴` and `c_μ h⁻²`.
    pub fn scaled(grid: &Grid2D, c_lambda: f64, c_mu: f64, model: Model2D, mode: Mode) -> Result<Self> {
        let area = grid.cell_area();
        Self::new(c_lambda / (area * area), c_mu / area, model, mode)
    }

    pub fn tau(&self) -> f64 {
        1.0 / self.lambda
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BregmanState2D {
    pub u: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub alpha_x: Vec<f64>,
    pub alpha_y: Vec<f64>,
    pub sweep: usize,
}

impl BregmanState2D {
    /// `d⁰ = B u⁰`, `α⁰ = 0`.
    pub fn new(ops: &OperatorSet2D, u0: &[f64]) -> Result<Self> {
        check_len("initial data", ops.grid().reduced_len(), u0.len())?;
        let cells = ops.grid().cell_count();
        Ok(Self {
            u: u0.to_vec(),
            dx: ops.apply_bx(u0),
            dy: ops.apply_by(u0),
            alpha_x: vec![0.0; cells],
            alpha_y: vec![0.0; cells],
            sweep: 0,
        })
    }

    pub fn full(&self) -> Vec<f64> {
        reduction::expand(&self.u)
    }
}

/// A configured 2D solver holding the Cholesky factor of
/// `G2 = λh_xh_y (K_xᵀK_x + K_yᵀK_y) + μh_xh_y (B_xᵀB_x + B_yᵀB_y)`.
#[derive(Debug, Clone)]
pub struct Solver2D<'a> {
    ops: &'a OperatorSet2D,
    cfg: SolverConfig2D,
    chol: Cholesky<f64, Dyn>,
    lambda_cell: f64,
    mu_cell: f64,
}

impl<'a> Solver2D<'a> {
    pub fn new(ops: &'a OperatorSet2D, cfg: SolverConfig2D) -> Result<Self> {
        let area = ops.grid().cell_area();
        let lambda_cell = cfg.lambda * area;
        let mu_cell = cfg.mu * area;
        let g = Self::system_matrix(ops, lambda_cell, mu_cell);
        let chol = Cholesky::new(g).ok_or(Error::Factorization("G2"))?;
        Ok(Self {
            ops,
            cfg,
            chol,
            lambda_cell,
            mu_cell,
        })
    }

    fn system_matrix(ops: &OperatorSet2D, lambda_cell: f64, mu_cell: f64) -> DMatrix<f64> {
        let grid = ops.grid();
        let n = grid.reduced_len();
        let mut g = ops.gram() * lambda_cell;
        // Rᵀ(DxᵀDx + DyᵀDy)R column by column
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let bx = ops.apply_bx(&e);
            let by = ops.apply_by(&e);
            let col = ops.apply_bx_transpose(&bx);
            let col_y = ops.apply_by_transpose(&by);
            for i in 0..n {
                g[(i, j)] += mu_cell * (col[i] + col_y[i]);
            }
            e[j] = 0.0;
        }
        let gt = g.transpose();
        (&g + gt) * 0.5
    }

    pub fn ops(&self) -> &OperatorSet2D {
        self.ops
    }

    pub fn config(&self) -> &SolverConfig2D {
        &self.cfg
    }

    /// `μ h_x h_y`.
    pub fn mu_cell(&self) -> f64 {
        self.mu_cell
    }

    /// Dense `G2`, rebuilt on demand.
    pub fn system_matrix_dense(&self) -> DMatrix<f64> {
        Self::system_matrix(self.ops, self.lambda_cell, self.mu_cell)
    }

    fn coupling(&self, state: &BregmanState2D) -> Vec<f64> {
        let sx: Vec<f64> = state.dx.iter().zip(&state.alpha_x).map(|(d, a)| d - a).collect();
        let sy: Vec<f64> = state.dy.iter().zip(&state.alpha_y).map(|(d, a)| d - a).collect();
        let cx = self.ops.apply_bx_transpose(&sx);
        let cy = self.ops.apply_by_transpose(&sy);
        cx.iter().zip(&cy).map(|(a, b)| a + b).collect()
    }

    /// Solves `G2 u = λh_xh_y (K_xᵀK_x + K_yᵀK_y) f + μh_xh_y (B_xᵀ(d_x - α_x) + B_yᵀ(d_y - α_y))`.
    pub fn u_update(&self, state: &BregmanState2D, f: &[f64]) -> Vec<f64> {
        let mut rhs = self.ops.gram() * DVector::from_column_slice(f) * self.lambda_cell;
        for (r, c) in rhs.iter_mut().zip(self.coupling(state)) {
            *r += self.mu_cell * c;
        }
        self.chol.solve(&rhs).data.into()
    }

    /// The same update for `f = u`, written as a correction
    /// `u + μh_xh_y G2⁻¹ Bᵀ(d - α - B u)` that avoids the dense fidelity product.
    pub fn u_update_flow(&self, state: &BregmanState2D) -> Vec<f64> {
        let bx = self.ops.apply_bx(&state.u);
        let by = self.ops.apply_by(&state.u);
        let rx: Vec<f64> = (0..bx.len())
            .map(|i| state.dx[i] - state.alpha_x[i] - bx[i])
            .collect();
        let ry: Vec<f64> = (0..by.len())
            .map(|i| state.dy[i] - state.alpha_y[i] - by[i])
            .collect();
        let cx = self.ops.apply_bx_transpose(&rx);
        let cy = self.ops.apply_by_transpose(&ry);
        let rhs = DVector::from_iterator(
            cx.len(),
            cx.iter().zip(&cy).map(|(a, b)| self.mu_cell * (a + b)),
        );
        let delta = self.chol.solve(&rhs);
        state.u.iter().zip(delta.iter()).map(|(u, d)| u + d).collect()
    }

    /// `d`-update for the configured model from `s = B u_next + α`.
    pub fn d_update(&self, state: &BregmanState2D, u_next: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let bx = self.ops.apply_bx(u_next);
        let by = self.ops.apply_by(u_next);
        self.shrink_pairs(&bx, &by, state)
    }

    fn shrink_pairs(&self, bx: &[f64], by: &[f64], state: &BregmanState2D) -> (Vec<f64>, Vec<f64>) {
        let mu = self.mu_cell;
        let cells = bx.len();
        let mut dx = Vec::with_capacity(cells);
        let mut dy = Vec::with_capacity(cells);
        for n in 0..cells {
            let sx = bx[n] + state.alpha_x[n];
            let sy = by[n] + state.alpha_y[n];
            let (a, b) = match self.cfg.model {
                Model2D::Isotropic => shrink_iso2d(sx, sy, mu),
                Model2D::Anisotropic => (shrink_tv(sx, 1.0 / mu), shrink_tv(sy, 1.0 / mu)),
                Model2D::Spohn(p) => shrink_spohn2d(sx, sy, mu, p.beta()),
            };
            dx.push(a);
            dy.push(b);
        }
        (dx, dy)
    }

    fn finish_sweep(&self, state: &mut BregmanState2D, u: Vec<f64>) {
        let bx = self.ops.apply_bx(&u);
        let by = self.ops.apply_by(&u);
        let (dx, dy) = self.shrink_pairs(&bx, &by, state);
        for n in 0..dx.len() {
            state.alpha_x[n] += bx[n] - dx[n];
            state.alpha_y[n] += by[n] - dy[n];
        }
        state.dx = dx;
        state.dy = dy;
        state.u = u;
        state.sweep += 1;
    }

    /// One `u`, `d`, `α` sweep against data `f`.
    pub fn sweep(&self, state: &mut BregmanState2D, f: &[f64]) {
        let u = self.u_update(state, f);
        self.finish_sweep(state, u);
    }

    /// One backward-Euler step with `f = u^k`.
    pub fn flow_step(&self, state: &mut BregmanState2D) {
        let u = self.u_update_flow(state);
        self.finish_sweep(state, u);
    }

    /// Objective of the `d`-subproblem at fixed `u`, `α`.
    pub fn d_objective(&self, state: &BregmanState2D, u: &[f64], dx: &[f64], dy: &[f64]) -> f64 {
        let bx = self.ops.apply_bx(u);
        let by = self.ops.apply_by(u);
        let penalty: f64 = (0..dx.len())
            .map(|n| {
                let ex = dx[n] - bx[n] - state.alpha_x[n];
                let ey = dy[n] - by[n] - state.alpha_y[n];
                ex * ex + ey * ey
            })
            .sum();
        self.cfg.model.energy(dx, dy) + 0.5 * self.mu_cell * penalty
    }

    /// Unsplit objective `E(B u) + λ/2 ‖u - f‖²_{H⁻¹}`.
    pub fn objective(&self, u: &[f64], f: &[f64]) -> f64 {
        let diff: Vec<f64> = u.iter().zip(f).map(|(a, b)| a - b).collect();
        let energy = self.cfg.model.energy(&self.ops.apply_bx(u), &self.ops.apply_by(u));
        energy + 0.5 * self.cfg.lambda * self.ops.hminus1_norm_sq(&diff)
    }

    /// OSV decomposition from `u⁰ = 0`, same stopping rule as in 1D.
    pub fn solve_osv(&self, f: &[f64]) -> Result<Vec<f64>> {
        if self.cfg.mode != Mode::Osv {
            return Err(Error::Incompatible("solve_osv needs mode = osv".into()));
        }
        check_len("data", self.ops.grid().reduced_len(), f.len())?;
        let mut state = BregmanState2D::new(self.ops, &vec![0.0; f.len()])?;
        let h = self.ops.grid().hx().min(self.ops.grid().hy());
        let mut rel_change = f64::INFINITY;
        while state.sweep < self.cfg.max_sweeps {
            let previous = state.u.clone();
            self.sweep(&mut state, f);
            rel_change = trajectory::distance(&state.u, &previous) / trajectory::norm(&previous).max(h);
            if rel_change <= self.cfg.osv_tol {
                return Ok(state.u);
            }
        }
        Err(Error::NotConverged {
            sweeps: state.sweep,
            rel_change,
        })
    }

    pub fn diagnostics(&self, state: &BregmanState2D) -> Diagnostics {
        let bx = self.ops.apply_bx(&state.u);
        let by = self.ops.apply_by(&state.u);
        let gap = (trajectory::distance(&state.dx, &bx).powi(2)
            + trajectory::distance(&state.dy, &by).powi(2))
        .sqrt();
        let tv = match self.cfg.model {
            Model2D::Anisotropic => Model2D::Anisotropic.energy(&bx, &by),
            _ => Model2D::Isotropic.energy(&bx, &by),
        };
        Diagnostics {
            sup_norm: trajectory::sup_norm(&state.full()),
            tv_energy: tv,
            hminus1_norm: self.ops.hminus1_norm(&state.u),
            constraint_gap: gap,
        }
    }

    pub fn run_flow(&self, u0: &[f64], monitor: &FlowMonitor) -> Result<Trajectory> {
        self.run_flow_with_state(u0, monitor).map(|(traj, _)| traj)
    }

    pub fn run_flow_with_state(
        &self,
        u0: &[f64],
        monitor: &FlowMonitor,
    ) -> Result<(Trajectory, BregmanState2D)> {
        if self.cfg.mode != Mode::Flow {
            return Err(Error::Incompatible("run_flow needs mode = flow".into()));
        }
        let state = BregmanState2D::new(self.ops, u0)?;
        Ok(trajectory::drive(self, state, monitor))
    }
}

impl FlowProblem for Solver2D<'_> {
    type State = BregmanState2D;

    fn tau(&self) -> f64 {
        self.cfg.tau()
    }

    fn advance(&self, state: &mut BregmanState2D) {
        self.flow_step(state);
    }

    fn sup_norm(&self, state: &BregmanState2D) -> f64 {
        trajectory::sup_norm(&state.full())
    }

    fn diagnostics(&self, state: &BregmanState2D) -> Diagnostics {
        Solver2D::diagnostics(self, state)
    }

    fn field(&self, state: &BregmanState2D) -> Vec<f64> {
        state.full()
    }
}
