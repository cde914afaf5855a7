//! Reference experiments: extinction-step table, scheme comparison and the
//! preset parameter sets of the 1D and 2D examples.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::operators1d::{Grid1D, OperatorSet1D, Scheme};
use crate::presets::Preset;
use crate::shrinkage::SpohnParams;
use crate::solver1d::{Mode, Model, Solver1D, SolverConfig1D};
use crate::trajectory::{self, FlowMonitor, Termination};
use crate::twodim::{Grid2D, Model2D, OperatorSet2D, Solver2D, SolverConfig2D};

/// Upper bound `1/(4√2π²)` of the extinction time of `-cos(2πx)`.
pub const COS_EXTINCTION_BOUND: f64 = 1.0 / (4.0 * std::f64::consts::SQRT_2 * PI * PI);

/// Sup-norm thresholds reported by the extinction table.
pub const EXTINCTION_THRESHOLDS: [f64; 3] = [1e-4, 1e-6, 1e-8];

/// `μ = 5h⁻¹`, assumed for the extinction table.
pub const TABLE1_C_MU: f64 = 5.0;

/// One row of the published extinction table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub n: usize,
    pub c_lambda: f64,
    pub tau: f64,
    /// Published `T*/τ` column.
    pub bound_steps: usize,
    /// Published first steps below `1e-4`, `1e-6`, `1e-8`.
    pub paper_steps: [usize; 3],
}

pub const TABLE1: [Table1Row; 3] = [
    Table1Row {
        n: 100,
        c_lambda: 1.0,
        tau: 1e-6,
        bound_steps: 17911,
        paper_steps: [4032, 41769, 135755],
    },
    Table1Row {
        n: 100,
        c_lambda: 10.0,
        tau: 1e-7,
        bound_steps: 179112,
        paper_steps: [40311, 60579, 333015],
    },
    Table1Row {
        n: 200,
        c_lambda: 10.0,
        tau: 1.25e-8,
        bound_steps: 1432898,
        paper_steps: [322491, 592634, 1267927],
    },
];

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Result {
    pub row: Table1Row,
    pub scheme: Scheme,
    pub lambda: f64,
    pub mu: f64,
    pub tau: f64,
    /// `T*/τ` for the resolved `τ`.
    pub bound_steps: f64,
    /// First step below each of [`EXTINCTION_THRESHOLDS`].
    pub crossings: [Option<usize>; 3],
    pub max_steps: usize,
    pub termination: Termination,
}

/// Runs one extinction-table row on `-cos(2πx)` until `‖u‖_∞ < 1e-8` or
/// `max_steps`.
pub fn run_table1_row(row: &Table1Row, scheme: Scheme, c_mu: f64, max_steps: usize) -> Result<Table1Result> {
    let grid = Grid1D::new(row.n)?;
    let ops = OperatorSet1D::new(grid, scheme)?;
    let cfg = SolverConfig1D::scaled(&grid, row.c_lambda, c_mu, Model::Tv, scheme, Mode::Flow)?;
    let solver = Solver1D::new(&ops, cfg)?;
    let u0 = Preset::Cos1d.initial_1d(&grid)?;
    let monitor = FlowMonitor {
        crossing_thresholds: EXTINCTION_THRESHOLDS.to_vec(),
        record_every: max_steps.max(1),
        ..FlowMonitor::stop_at(EXTINCTION_THRESHOLDS[2], max_steps)
    };
    let traj = solver.run_flow(&u0, &monitor)?;
    let tau = cfg.tau();
    Ok(Table1Result {
        row: *row,
        scheme,
        lambda: cfg.lambda,
        mu: cfg.mu,
        tau,
        bound_steps: COS_EXTINCTION_BOUND / tau,
        crossings: EXTINCTION_THRESHOLDS.map(|t| traj.crossing(t)),
        max_steps,
        termination: traj.termination,
    })
}

/// Sup-difference between the `J` and `H` flows at matched steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub n: usize,
    pub tau: f64,
    /// `(step, t, ‖u_J - u_H‖_∞)`.
    pub samples: Vec<(usize, f64, f64)>,
}

impl SchemeComparison {
    pub fn final_gap(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.2)
    }
}

/// Runs the same flow with both fidelity schemes for `steps` steps and records
/// the sup-difference of the full grid functions every `every` steps.
pub fn compare_schemes(
    n: usize,
    preset: Preset,
    c_lambda: f64,
    c_mu: f64,
    model: Model,
    steps: usize,
    every: usize,
) -> Result<SchemeComparison> {
    compare_runs(n, preset, c_lambda, c_mu, model, (Scheme::ApproxJ, Scheme::ExactH), steps, every)
}

/// Like [`compare_schemes`] for an arbitrary pair of schemes; equal schemes
/// give a zero difference.
#[allow(clippy::too_many_arguments)]
pub fn compare_runs(
    n: usize,
    preset: Preset,
    c_lambda: f64,
    c_mu: f64,
    model: Model,
    schemes: (Scheme, Scheme),
    steps: usize,
    every: usize,
) -> Result<SchemeComparison> {
    if preset.dimension() != 1 {
        return Err(Error::Incompatible(format!("scheme comparison needs a 1D preset, got {preset}")));
    }
    let grid = Grid1D::new(n)?;
    let u0 = preset.initial_1d(&grid)?;
    let ops_a = OperatorSet1D::new(grid, schemes.0)?;
    let ops_b = OperatorSet1D::new(grid, schemes.1)?;
    let cfg_a = SolverConfig1D::scaled(&grid, c_lambda, c_mu, model, schemes.0, Mode::Flow)?;
    let cfg_b = SolverConfig1D { scheme: schemes.1, ..cfg_a };
    let a = Solver1D::new(&ops_a, cfg_a)?;
    let b = Solver1D::new(&ops_b, cfg_b)?;
    let mut sa = crate::solver1d::BregmanState1D::new(&ops_a, &u0)?;
    let mut sb = crate::solver1d::BregmanState1D::new(&ops_b, &u0)?;
    let every = every.max(1);
    let tau = cfg_a.tau();
    let gap = |x: &crate::solver1d::BregmanState1D, y: &crate::solver1d::BregmanState1D| {
        let (fx, fy) = (x.full(), y.full());
        fx.iter().zip(&fy).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
    };
    let mut samples = vec![(0, 0.0, gap(&sa, &sb))];
    for k in 1..=steps {
        a.flow_step(&mut sa);
        b.flow_step(&mut sb);
        if k % every == 0 || k == steps {
            samples.push((k, k as f64 * tau, gap(&sa, &sb)));
        }
    }
    Ok(SchemeComparison { n, tau, samples })
}

/// Scheme gap at a fixed physical time for each grid size. The step count is
/// `round(t_final / τ)` with `τ = h³/c_λ`.
pub fn scheme_gap_sweep(
    sizes: &[usize],
    preset: Preset,
    c_lambda: f64,
    c_mu: f64,
    t_final: f64,
) -> Result<Vec<SchemeComparison>> {
    sizes
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            let steps = (t_final * c_lambda / (h * h * h)).round() as usize;
            compare_schemes(n, preset, c_lambda, c_mu, Model::Tv, steps, steps.max(1))
        })
        .collect()
}

/// Parameters of one of the paper's flow examples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleSetup {
    pub name: &'static str,
    pub preset: Preset,
    /// Cells per axis.
    pub n: usize,
    pub c_lambda: f64,
    pub c_mu: f64,
    pub scheme: Scheme,
    pub model: ExampleModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExampleModel {
    Tv,
    Spohn { beta: f64 },
    Isotropic,
    Anisotropic,
    Spohn2d { beta: f64 },
}

impl ExampleSetup {
    pub fn model_1d(&self) -> Result<Model> {
        match self.model {
            ExampleModel::Tv => Ok(Model::Tv),
            ExampleModel::Spohn { beta } => Ok(Model::Spohn(SpohnParams::cubic(beta)?)),
            _ => Err(Error::Incompatible(format!("{} is a 2D example", self.name))),
        }
    }

    pub fn model_2d(&self) -> Result<Model2D> {
        match self.model {
            ExampleModel::Isotropic => Ok(Model2D::Isotropic),
            ExampleModel::Anisotropic => Ok(Model2D::Anisotropic),
            ExampleModel::Spohn2d { beta } => Ok(Model2D::Spohn(SpohnParams::cubic(beta)?)),
            _ => Err(Error::Incompatible(format!("{} is a 1D example", self.name))),
        }
    }
}

pub const EXAMPLES: [ExampleSetup; 7] = [
    ExampleSetup {
        name: "example1",
        preset: Preset::Cusp1d,
        n: 40,
        c_lambda: 1.0,
        c_mu: 5.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Tv,
    },
    ExampleSetup {
        name: "example2",
        preset: Preset::Cubic1d,
        n: 200,
        c_lambda: 25.0,
        c_mu: 15.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Tv,
    },
    ExampleSetup {
        name: "example3",
        preset: Preset::Cos1d,
        n: 200,
        c_lambda: 20.0,
        c_mu: 30.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Tv,
    },
    ExampleSetup {
        name: "example4",
        preset: Preset::Cos1d,
        n: 200,
        c_lambda: 50.0,
        c_mu: 30.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Spohn { beta: 0.5 },
    },
    ExampleSetup {
        name: "isotropic2d",
        preset: Preset::Poly2d,
        n: 40,
        c_lambda: 5.0,
        c_mu: 20.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Isotropic,
    },
    ExampleSetup {
        name: "anisotropic2d",
        preset: Preset::Poly2d,
        n: 40,
        c_lambda: 5.0,
        c_mu: 20.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Anisotropic,
    },
    ExampleSetup {
        name: "spohn2d",
        preset: Preset::Poly2d,
        n: 40,
        c_lambda: 1.25,
        c_mu: 5.0,
        scheme: Scheme::ApproxJ,
        model: ExampleModel::Spohn2d { beta: 0.25 },
    },
];

pub fn example(name: &str) -> Option<&'static ExampleSetup> {
    EXAMPLES.iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// Outcome of a 2D example run with the midpoint snapshot kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Example2DRun {
    pub trajectory: crate::trajectory::Trajectory,
    /// Full field at step `⌊K/2⌋`, `K` the last step.
    pub midpoint: Vec<f64>,
    pub midpoint_step: usize,
    pub grid: Grid2D,
}

/// Runs a 2D example to `‖u‖_∞ < stop_supnorm` and keeps the midpoint field.
pub fn run_example_2d(setup: &ExampleSetup, stop_supnorm: f64, max_steps: usize) -> Result<Example2DRun> {
    let grid = Grid2D::square(setup.n)?;
    let ops = OperatorSet2D::new(grid, setup.scheme)?;
    let cfg = SolverConfig2D::scaled(&grid, setup.c_lambda, setup.c_mu, setup.model_2d()?, Mode::Flow)?;
    let solver = Solver2D::new(&ops, cfg)?;
    let u0 = setup.preset.initial_2d(&grid)?;
    let monitor = FlowMonitor {
        snapshot_every: Some(1),
        record_every: 100,
        ..FlowMonitor::stop_at(stop_supnorm, max_steps)
    };
    let mut trajectory = solver.run_flow(&u0, &monitor)?;
    let midpoint_step = trajectory.steps_taken() / 2;
    let midpoint = std::mem::take(&mut trajectory.snapshots)
        .into_iter()
        .find(|s| s.step == midpoint_step)
        .map(|s| s.values)
        .expect("every step is snapshotted");
    Ok(Example2DRun {
        trajectory,
        midpoint,
        midpoint_step,
        grid,
    })
}

/// `true` when every value is finite.
pub fn all_finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

/// `‖u‖_∞` of a full grid function.
pub fn sup_norm(values: &[f64]) -> f64 {
    trajectory::sup_norm(values)
}
