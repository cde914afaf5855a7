//! Alternating split Bregman iteration on the 1D torus.
//!
//! Each sweep performs
//!
//! ```text
//! u ← G⁻¹ (λh³ KᵀK f + μh (SR)ᵀ (d - α)),   G = λh³ KᵀK + μh (SR)ᵀ SR
//! d ← shrink(SR u + α, 1/(μh))
//! α ← α - d + SR u
//! ```
//!
//! In OSV mode `f` is fixed data and sweeps repeat until `u` settles. In flow
//! mode each sweep is one backward-Euler step of size `τ = 1/λ` with `f = u^k`;
//! `d` and `α` carry over between steps.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_len, check_positive, Error, Result};
use crate::operators1d::{spohn_energy_of_jumps, Grid1D, OperatorSet1D, Scheme};
use crate::reduction;
use crate::shrinkage::{shrink_spohn, shrink_tv, SpohnParams};
use crate::trajectory::{self, Diagnostics, FlowMonitor, FlowProblem, Trajectory};

/// Energy whose H⁻¹ gradient flow is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Total variation `‖d‖₁`.
    Tv,
    /// `β‖d‖₁ + ‖d‖₃³/3`.
    Spohn(SpohnParams),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Tv => "tv",
            Model::Spohn(_) => "spohn",
        }
    }

    fn energy_of_jumps(&self, d: &[f64]) -> f64 {
        match self {
            Model::Tv => d.iter().map(|x| x.abs()).sum(),
            Model::Spohn(p) => spohn_energy_of_jumps(d, p.beta()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Fixed data `f`, sweep to convergence.
    Osv,
    /// Backward Euler with `f = u^k`, one sweep per step.
    Flow,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Osv => "osv",
            Mode::Flow => "flow",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "osv" => Ok(Mode::Osv),
            "flow" => Ok(Mode::Flow),
            other => Err(format!("unknown mode `{other}` (expected osv or flow)")),
        }
    }
}

pub const DEFAULT_OSV_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig1D {
    pub lambda: f64,
    pub mu: f64,
    pub model: Model,
    pub scheme: Scheme,
    pub mode: Mode,
    pub osv_tol: f64,
    pub max_sweeps: usize,
}

impl SolverConfig1D {
    pub fn new(lambda: f64, mu: f64, model: Model, scheme: Scheme, mode: Mode) -> Result<Self> {
        check_positive("lambda", lambda)?;
        check_positive("mu", mu)?;
        Ok(Self {
            lambda,
            mu,
            model,
            scheme,
            mode,
            osv_tol: DEFAULT_OSV_TOL,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        })
    }

    /// `λ = c_λ h⁻³`, `μ = c_μ h⁻¹`.
    pub fn scaled(
        grid: &Grid1D,
        c_lambda: f64,
        c_mu: f64,
        model: Model,
        scheme: Scheme,
        mode: Mode,
    ) -> Result<Self> {
        let h = grid.h();
        Self::new(c_lambda / (h * h * h), c_mu / h, model, scheme, mode)
    }

    /// Time step of the backward-Euler flow.
    pub fn tau(&self) -> f64 {
        1.0 / self.lambda
    }
}

/// Cholesky factor of `G = λh³KᵀK + μh(SR)ᵀSR`, reused by every sweep.
#[derive(Debug, Clone)]
pub struct SystemFactor {
    g: DMatrix<f64>,
    fidelity: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    mu_h: f64,
}

impl SystemFactor {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// `λh³ KᵀK`.
    pub fn fidelity(&self) -> &DMatrix<f64> {
        &self.fidelity
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }
}

pub fn factor_system(ops: &OperatorSet1D, cfg: &SolverConfig1D) -> Result<SystemFactor> {
    if ops.scheme() != cfg.scheme {
        return Err(Error::Incompatible(format!(
            "operators built for {} but solver configured for {}",
            ops.scheme(),
            cfg.scheme
        )));
    }
    let h = ops.grid().h();
    let k = ops.k();
    let sr = ops.sr();
    let mu_h = cfg.mu * h;
    let fidelity = k.tr_mul(k) * (cfg.lambda * h * h * h);
    let mut g = &fidelity + sr.tr_mul(sr) * mu_h;
    // exact symmetry for the factorization
    let gt = g.transpose();
    g = (&g + gt) * 0.5;
    let chol = Cholesky::new(g.clone()).ok_or(Error::Factorization("G"))?;
    Ok(SystemFactor {
        g,
        fidelity,
        chol,
        mu_h,
    })
}

/// Iterate `(u, d, α)` of the split Bregman sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct BregmanState1D {
    /// Reduced coordinates, length `N - 1`.
    pub u: Vec<f64>,
    /// Split jump variable, length `N`.
    pub d: Vec<f64>,
    /// Bregman multiplier, length `N`.
    pub alpha: Vec<f64>,
    pub sweep: usize,
}

impl BregmanState1D {
    /// `d⁰ = S R u⁰`, `α⁰ = 0`.
    pub fn new(ops: &OperatorSet1D, u0: &[f64]) -> Result<Self> {
        check_len("initial data", ops.grid().reduced_len(), u0.len())?;
        Ok(Self {
            u: u0.to_vec(),
            d: ops.apply_sr(u0),
            alpha: vec![0.0; ops.grid().n()],
            sweep: 0,
        })
    }

    /// `R u`, the full zero-mean grid function.
    pub fn full(&self) -> Vec<f64> {
        reduction::expand(&self.u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsvSolution {
    pub u: Vec<f64>,
    pub sweeps: usize,
    /// Objective of the unsplit problem after every sweep.
    pub objective_trace: Vec<f64>,
    pub rel_change: f64,
}

impl OsvSolution {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one sweep")
    }
}

/// A configured 1D solver: operators, parameters and the factored system.
#[derive(Debug, Clone)]
pub struct Solver1D<'a> {
    ops: &'a OperatorSet1D,
    cfg: SolverConfig1D,
    factor: SystemFactor,
}

impl<'a> Solver1D<'a> {
    pub fn new(ops: &'a OperatorSet1D, cfg: SolverConfig1D) -> Result<Self> {
        let factor = factor_system(ops, &cfg)?;
        Ok(Self { ops, cfg, factor })
    }

    pub fn ops(&self) -> &OperatorSet1D {
        self.ops
    }

    pub fn config(&self) -> &SolverConfig1D {
        &self.cfg
    }

    pub fn factor(&self) -> &SystemFactor {
        &self.factor
    }

    /// Right-hand side `λh³KᵀK f + μh(SR)ᵀ(d - α)` of the `u`-update.
    pub fn u_rhs(&self, state: &BregmanState1D, f: &[f64]) -> DVector<f64> {
        let shifted: Vec<f64> = state.d.iter().zip(&state.alpha).map(|(d, a)| d - a).collect();
        let coupling = self.ops.apply_sr_transpose(&shifted);
        let mut rhs = self.factor.fidelity() * DVector::from_column_slice(f);
        for (r, c) in rhs.iter_mut().zip(coupling) {
            *r += self.factor.mu_h * c;
        }
        rhs
    }

    /// Minimizer of `λh³/2 ‖K(u - f)‖² + μh/2 ‖d - SRu - α‖²`.
    pub fn u_update(&self, state: &BregmanState1D, f: &[f64]) -> Vec<f64> {
        let rhs = self.u_rhs(state, f);
        self.factor.solve(&rhs).data.into()
    }

    /// Componentwise shrinkage of `ρ = SR u_next + α` with `a = 1/(μh)`.
    pub fn d_update(&self, state: &BregmanState1D, u_next: &[f64]) -> Vec<f64> {
        let a = 1.0 / self.factor.mu_h;
        let sr_u = self.ops.apply_sr(u_next);
        self.shrink_all(&sr_u, &state.alpha, a)
    }

    fn shrink_all(&self, sr_u: &[f64], alpha: &[f64], a: f64) -> Vec<f64> {
        let rho = sr_u.iter().zip(alpha).map(|(g, al)| g + al);
        match self.cfg.model {
            Model::Tv => rho.map(|r| shrink_tv(r, a)).collect(),
            Model::Spohn(p) => rho.map(|r| shrink_spohn(r, a, p.beta())).collect(),
        }
    }

    /// `α - d + SR u`.
    pub fn alpha_update(alpha: &[f64], d_next: &[f64], sr_u_next: &[f64]) -> Vec<f64> {
        alpha
            .iter()
            .zip(d_next)
            .zip(sr_u_next)
            .map(|((a, d), g)| a - d + g)
            .collect()
    }

    /// One `u`, `d`, `α` sweep against data `f`.
    pub fn sweep(&self, state: &mut BregmanState1D, f: &[f64]) {
        let u = self.u_update(state, f);
        self.finish_sweep(state, u);
    }

    fn finish_sweep(&self, state: &mut BregmanState1D, u: Vec<f64>) {
        let sr_u = self.ops.apply_sr(&u);
        let d = self.shrink_all(&sr_u, &state.alpha, 1.0 / self.factor.mu_h);
        state.alpha = Self::alpha_update(&state.alpha, &d, &sr_u);
        state.d = d;
        state.u = u;
        state.sweep += 1;
    }

    /// The `u`-update for `f = u`, written as a correction
    /// `u + μh G⁻¹ (SR)ᵀ(d - α - SR u)` so the solve only sees the increment.
    pub fn u_update_flow(&self, state: &BregmanState1D) -> Vec<f64> {
        let sr_u = self.ops.apply_sr(&state.u);
        let residual: Vec<f64> = (0..sr_u.len())
            .map(|i| state.d[i] - state.alpha[i] - sr_u[i])
            .collect();
        let rhs = DVector::from_vec(self.ops.apply_sr_transpose(&residual)) * self.factor.mu_h;
        let delta = self.factor.solve(&rhs);
        state.u.iter().zip(delta.iter()).map(|(u, d)| u + d).collect()
    }

    /// One backward-Euler step: a sweep with `f = u^k`.
    pub fn flow_step(&self, state: &mut BregmanState1D) {
        let u = self.u_update_flow(state);
        self.finish_sweep(state, u);
    }

    /// Unsplit objective `E(SRu) + λh³/2 ‖K(u - f)‖²`.
    pub fn objective(&self, u: &[f64], f: &[f64]) -> f64 {
        let diff: Vec<f64> = u.iter().zip(f).map(|(a, b)| a - b).collect();
        let energy = self.cfg.model.energy_of_jumps(&self.ops.apply_sr(u));
        energy + 0.5 * self.cfg.lambda * self.ops.hminus1_norm_sq(&diff)
    }

    /// OSV decomposition: sweep with fixed `f` until
    /// `‖u^{k+1} - u^k‖ ≤ tol · max(‖u^k‖, h)`, starting from `u⁰ = 0`.
    pub fn solve_osv(&self, f: &[f64]) -> Result<OsvSolution> {
        self.solve_osv_from(f, &vec![0.0; f.len()])
    }

    pub fn solve_osv_from(&self, f: &[f64], u0: &[f64]) -> Result<OsvSolution> {
        if self.cfg.mode != Mode::Osv {
            return Err(Error::Incompatible("solve_osv needs mode = osv".into()));
        }
        check_len("data", self.ops.grid().reduced_len(), f.len())?;
        let mut state = BregmanState1D::new(self.ops, u0)?;
        let h = self.ops.grid().h();
        let mut trace = Vec::new();
        let mut rel_change = f64::INFINITY;
        while state.sweep < self.cfg.max_sweeps {
            let previous = state.u.clone();
            self.sweep(&mut state, f);
            trace.push(self.objective(&state.u, f));
            let scale = trajectory::norm(&previous).max(h);
            rel_change = trajectory::distance(&state.u, &previous) / scale;
            if rel_change <= self.cfg.osv_tol {
                return Ok(OsvSolution {
                    u: state.u,
                    sweeps: state.sweep,
                    objective_trace: trace,
                    rel_change,
                });
            }
        }
        Err(Error::NotConverged {
            sweeps: state.sweep,
            rel_change,
        })
    }

    pub fn diagnostics(&self, state: &BregmanState1D) -> Diagnostics {
        let sr_u = self.ops.apply_sr(&state.u);
        Diagnostics {
            sup_norm: trajectory::sup_norm(&state.full()),
            tv_energy: sr_u.iter().map(|x| x.abs()).sum(),
            hminus1_norm: self.ops.hminus1_norm(&state.u),
            constraint_gap: trajectory::distance(&state.d, &sr_u),
        }
    }

    /// Gradient flow from `u0` until the monitor's stopping rule fires.
    pub fn run_flow(&self, u0: &[f64], monitor: &FlowMonitor) -> Result<Trajectory> {
        self.run_flow_with_state(u0, monitor).map(|(traj, _)| traj)
    }

    pub fn run_flow_with_state(
        &self,
        u0: &[f64],
        monitor: &FlowMonitor,
    ) -> Result<(Trajectory, BregmanState1D)> {
        if self.cfg.mode != Mode::Flow {
            return Err(Error::Incompatible("run_flow needs mode = flow".into()));
        }
        let state = BregmanState1D::new(self.ops, u0)?;
        Ok(trajectory::drive(self, state, monitor))
    }
}

impl FlowProblem for Solver1D<'_> {
    type State = BregmanState1D;

    fn tau(&self) -> f64 {
        self.cfg.tau()
    }

    fn advance(&self, state: &mut BregmanState1D) {
        self.flow_step(state);
    }

    fn sup_norm(&self, state: &BregmanState1D) -> f64 {
        trajectory::sup_norm(&state.full())
    }

    fn diagnostics(&self, state: &BregmanState1D) -> Diagnostics {
        Solver1D::diagnostics(self, state)
    }

    fn field(&self, state: &BregmanState1D) -> Vec<f64> {
        state.full()
    }
}
