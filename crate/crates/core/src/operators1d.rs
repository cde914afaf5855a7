//! Discrete operators on the 1D periodic grid.
//!
//! Grid functions in `V_{h0}` are piecewise constant on cells centered at
//! `x_n = n h`, `n = 1..=N`, with zero mean. They are stored in reduced
//! coordinates (first `N - 1` values, see [`crate::reduction`]). Jumps live on
//! the dual cells `[x_{n-1}, x_n)` and are stored as full length-`N` vectors.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{check_len, check_positive, Error, Result};
use crate::reduction;

/// Which matrix stands in for `∇(-Δ_av)⁻¹` in the H⁻¹ fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `J = S R A⁻¹`, discrete gradient of the discrete inverse Laplacian.
    ApproxJ,
    /// `H = T J`, exact H⁻¹ norm of piecewise-constant data through the
    /// quadratic B-spline mass matrix `M = TᵀT`.
    ExactH,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::ApproxJ => "approx-j",
            Scheme::ExactH => "exact-h",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "approx-j" | "approx" | "j" => Ok(Scheme::ApproxJ),
            "exact-h" | "exact" | "h" => Ok(Scheme::ExactH),
            other => Err(format!("unknown scheme `{other}` (expected approx-j or exact-h)")),
        }
    }
}

/// Uniform partition of the unit torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::GridTooSmall(n));
        }
        Ok(Self {
            n,
            h: 1.0 / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of reduced unknowns, `N - 1`.
    pub fn reduced_len(&self) -> usize {
        self.n - 1
    }

    /// Cell centers `x_n = n h` for `n = 1..=N`.
    pub fn cell_centers(&self) -> Vec<f64> {
        (1..=self.n).map(|i| i as f64 / self.n as f64).collect()
    }
}

/// `S_N = h ∇_h`: cyclic backward difference, `(S v)_n = v_n - v_{n-1}`.
pub fn build_s(grid: &Grid1D) -> DMatrix<f64> {
    difference_matrix(grid.n())
}

pub(crate) fn difference_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if j == (i + n - 1) % n {
            -1.0
        } else {
            0.0
        }
    })
}

/// `R_N`, zero-mean reconstruction from reduced coordinates.
pub fn build_r(grid: &Grid1D) -> DMatrix<f64> {
    reduction::r_matrix(grid.n())
}

/// `L_N`, the pseudo-inverse of `R_N`.
pub fn build_l(grid: &Grid1D) -> DMatrix<f64> {
    reduction::l_matrix(grid.n())
}

/// Cyclic lower-bidiagonal factor of the mass matrix, `TᵀT = M_N`.
pub fn build_t(grid: &Grid1D) -> DMatrix<f64> {
    let n = grid.n();
    let sqrt3 = 3f64.sqrt();
    let a = (sqrt3 + 1.0) / (2.0 * sqrt3);
    let b = (sqrt3 - 1.0) / (2.0 * sqrt3);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            a
        } else if j == (i + n - 1) % n {
            b
        } else {
            0.0
        }
    })
}

/// Circulant mass matrix of the hat functions with `h` factored out:
/// `2/3` on the diagonal, `1/6` on the cyclic off-diagonals.
pub fn mass_matrix(grid: &Grid1D) -> DMatrix<f64> {
    let n = grid.n();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 / 3.0
        } else if j == (i + 1) % n || i == (j + 1) % n {
            1.0 / 6.0
        } else {
            0.0
        }
    })
}

/// `A_N = L_N S_Nᵀ S_N R_N` together with its LU factorization.
pub fn assemble_a(
    s: &DMatrix<f64>,
    r: &DMatrix<f64>,
    l: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, LU<f64, Dyn, Dyn>)> {
    let a = l * s.transpose() * s * r;
    let lu = a.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::Factorization("A_N"));
    }
    Ok((a, lu))
}

/// Fidelity matrix `K`: `J = S R A⁻¹` or `H = T J`.
///
/// `J` is obtained from `Aᵀ Jᵀ = (S R)ᵀ`, one solve per row of `S R`.
pub fn build_k(
    sr: &DMatrix<f64>,
    a: &DMatrix<f64>,
    t: &DMatrix<f64>,
    scheme: Scheme,
) -> Result<DMatrix<f64>> {
    let at_lu = a.transpose().lu();
    let jt = at_lu
        .solve(&sr.transpose())
        .ok_or(Error::Factorization("A_Nᵀ"))?;
    let j = jt.transpose();
    Ok(match scheme {
        Scheme::ApproxJ => j,
        Scheme::ExactH => t * j,
    })
}

/// All assembled 1D matrices for one grid and one fidelity scheme.
///
/// Immutable after construction; share it freely between runs.
#[derive(Debug, Clone)]
pub struct OperatorSet1D {
    grid: Grid1D,
    scheme: Scheme,
    s: DMatrix<f64>,
    r: DMatrix<f64>,
    l: DMatrix<f64>,
    sr: DMatrix<f64>,
    a: DMatrix<f64>,
    a_lu: LU<f64, Dyn, Dyn>,
    t: DMatrix<f64>,
    k: DMatrix<f64>,
}

impl OperatorSet1D {
    pub fn new(grid: Grid1D, scheme: Scheme) -> Result<Self> {
        let s = build_s(&grid);
        let r = build_r(&grid);
        let l = build_l(&grid);
        let (a, a_lu) = assemble_a(&s, &r, &l)?;
        let sr = &s * &r;
        let t = build_t(&grid);
        let k = build_k(&sr, &a, &t, scheme)?;
        Ok(Self {
            grid,
            scheme,
            s,
            r,
            l,
            sr,
            a,
            a_lu,
            t,
            k,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// `S R`, the reduced-to-jump map.
    pub fn sr(&self) -> &DMatrix<f64> {
        &self.sr
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// `det A_N` from the stored LU factors.
    pub fn det_a(&self) -> f64 {
        self.a_lu.determinant()
    }

    /// Solve `A x = b` through the stored factorization.
    pub fn solve_a(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("right-hand side", self.grid.reduced_len(), b.len())?;
        self.a_lu.solve(b).ok_or(Error::Factorization("A_N"))
    }

    /// Same operators with the other fidelity matrix.
    pub fn with_scheme(&self, scheme: Scheme) -> Result<Self> {
        if scheme == self.scheme {
            return Ok(self.clone());
        }
        let k = build_k(&self.sr, &self.a, &self.t, scheme)?;
        Ok(Self {
            scheme,
            k,
            ..self.clone()
        })
    }

    /// `S R u` without touching the dense matrices.
    pub fn apply_sr(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.grid.reduced_len());
        cyclic_difference(&reduction::expand(u))
    }

    /// `(S R)ᵀ v` for a length-`N` vector.
    pub fn apply_sr_transpose(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.grid.n());
        reduction::expand_transpose(&cyclic_difference_transpose(v))
    }

    /// `h³ ‖K v‖²`, the discrete squared H⁻¹ norm of a reduced vector.
    pub fn hminus1_norm_sq(&self, v: &[f64]) -> f64 {
        let h = self.grid.h();
        let kv = &self.k * DVector::from_column_slice(v);
        h * h * h * kv.norm_squared()
    }

    pub fn hminus1_norm(&self, v: &[f64]) -> f64 {
        self.hminus1_norm_sq(v).sqrt()
    }

    /// Total variation `‖S R u‖₁`.
    pub fn tv_energy(&self, u: &[f64]) -> f64 {
        self.apply_sr(u).iter().map(|d| d.abs()).sum()
    }

    /// Spohn energy `β ‖d‖₁ + ‖d‖₃³ / 3` with `d = S R u`.
    pub fn spohn_energy(&self, u: &[f64], beta: f64) -> Result<f64> {
        check_positive("beta", beta)?;
        Ok(spohn_energy_of_jumps(&self.apply_sr(u), beta))
    }
}

pub(crate) fn spohn_energy_of_jumps(d: &[f64], beta: f64) -> f64 {
    d.iter()
        .map(|x| {
            let a = x.abs();
            beta * a + a * a * a / 3.0
        })
        .sum()
}

/// `(S v)_n = v_n - v_{n-1}` with cyclic wrap.
pub(crate) fn cyclic_difference(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| v[i] - v[(i + n - 1) % n]).collect()
}

/// `(Sᵀ w)_n = w_n - w_{n+1}` with cyclic wrap.
pub(crate) fn cyclic_difference_transpose(w: &[f64]) -> Vec<f64> {
    let n = w.len();
    (0..n).map(|i| w[i] - w[(i + 1) % n]).collect()
}
