//! Executes one resolved [`RunConfig`] and writes its artifacts:
//!
//! * `trajectory.csv`: `step,t,sup_norm,tv_energy,hminus1_norm,constraint_gap`
//! * `snapshots/step_XXXXXXX.csv` and `final.csv`: `x,u` (1D) or `x,y,u` (2D)
//! * `osv_trace.csv` and `solution.csv` in OSV mode
//! * `summary.toml`: resolved parameters, termination and timing

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use bregflow_core::presets::from_samples;
use bregflow_core::reduction;
use bregflow_core::{
    Grid1D, Grid2D, FlowMonitor, Mode, Model, Model2D, OperatorSet1D, OperatorSet2D, Scheme, Snapshot, Solver1D,
    Solver2D, SolverConfig1D, SolverConfig2D, SpohnParams, Termination, Trajectory,
};
use serde::Serialize;

use crate::config::{InitialData, ModelChoice, RunConfig};

pub const TRAJECTORY_HEADER: [&str; 6] = ["step", "t", "sup_norm", "tv_energy", "hminus1_norm", "constraint_gap"];

#[derive(Debug, Clone, Serialize)]
pub struct Crossing {
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

/// Contents of `summary.toml`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    /// `complete` or `failed`; failed runs may have partial outputs.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub initial: String,
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub scheme: String,
    pub mode: String,
    pub c_lambda: f64,
    pub c_mu: f64,
    pub lambda: f64,
    pub mu: f64,
    pub tau: f64,
    pub stop_supnorm: f64,
    pub max_steps: usize,
    /// `extinct`, `max-steps`, `converged` or `not-converged`.
    pub termination: String,
    /// Flow steps or OSV sweeps.
    pub steps: usize,
    pub final_time: f64,
    pub initial_sup_norm: f64,
    pub final_sup_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    /// Exact-H norms reported next to an approx-J run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hminus1_exact_h_initial: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hminus1_exact_h_final: Option<f64>,
    pub wall_time_s: f64,
    pub crossing: Vec<Crossing>,
}

impl Summary {
    fn new(cfg: &RunConfig, lambda: f64, mu: f64) -> Self {
        Summary {
            status: "failed".into(),
            error: None,
            dim: cfg.dim,
            nx: cfg.nx,
            ny: cfg.ny,
            initial: cfg.initial.describe(),
            model: cfg.model.name().into(),
            beta: if cfg.model == ModelChoice::Spohn { cfg.beta } else { None },
            scheme: cfg.scheme.as_str().into(),
            mode: cfg.mode.as_str().into(),
            c_lambda: cfg.c_lambda,
            c_mu: cfg.c_mu,
            lambda,
            mu,
            tau: 1.0 / lambda,
            stop_supnorm: cfg.stop_supnorm,
            max_steps: cfg.max_steps,
            termination: String::new(),
            steps: 0,
            final_time: 0.0,
            initial_sup_norm: 0.0,
            final_sup_norm: 0.0,
            objective: None,
            hminus1_exact_h_initial: None,
            hminus1_exact_h_final: None,
            wall_time_s: 0.0,
            crossing: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).context("serializing summary")?;
        fs::write(dir.join("summary.toml"), text).context("writing summary.toml")
    }
}

#[derive(Serialize)]
struct Row {
    step: usize,
    t: f64,
    sup_norm: f64,
    tv_energy: f64,
    hminus1_norm: f64,
    constraint_gap: f64,
}

/// Runs the configuration, writing everything below `cfg.out`.
///
/// Solver failures still leave a summary with `status = "failed"` behind.
pub fn run(cfg: &RunConfig) -> Result<Summary> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let start = Instant::now();
    let result = if cfg.dim == 1 { run_1d(cfg) } else { run_2d(cfg) };
    match result {
        Ok(mut summary) => {
            summary.wall_time_s = start.elapsed().as_secs_f64();
            summary.status = "complete".into();
            summary.write(&cfg.out)?;
            Ok(summary)
        }
        Err((summary, err)) => {
            if let Some(mut summary) = summary {
                summary.wall_time_s = start.elapsed().as_secs_f64();
                summary.error = Some(format!("{err:#}"));
                summary.write(&cfg.out)?;
            }
            Err(err)
        }
    }
}

type Partial = (Option<Summary>, anyhow::Error);

fn partial(summary: Option<&Summary>, err: impl Into<anyhow::Error>) -> Partial {
    (summary.cloned(), err.into())
}

fn load_initial(cfg: &RunConfig) -> Result<Vec<f64>> {
    let cells = cfg.nx * cfg.ny;
    match &cfg.initial {
        InitialData::Preset(p) => Ok(if cfg.dim == 1 {
            p.initial_1d(&Grid1D::new(cfg.nx)?)?
        } else {
            p.initial_2d(&Grid2D::new(cfg.nx, cfg.ny)?)?
        }),
        InitialData::File(path) => {
            let samples = read_samples(path)?;
            Ok(from_samples(&samples, cells)?)
        }
    }
}

/// Values from the last column of a CSV file with a header row.
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), line + 2))?;
        let field = record
            .iter()
            .last()
            .with_context(|| format!("{}: empty row {}", path.display(), line + 2))?;
        let v: f64 = field
            .trim()
            .parse()
            .with_context(|| format!("{}: row {}: `{field}` is not a number", path.display(), line + 2))?;
        values.push(v);
    }
    Ok(values)
}

fn monitor(cfg: &RunConfig) -> FlowMonitor {
    FlowMonitor {
        snapshot_every: cfg.snap_every,
        crossing_thresholds: cfg.thresholds.clone(),
        record_every: cfg.record_every,
        ..FlowMonitor::stop_at(cfg.stop_supnorm, cfg.max_steps)
    }
}

fn run_1d(cfg: &RunConfig) -> std::result::Result<Summary, Partial> {
    let setup = || -> Result<_> {
        let grid = Grid1D::new(cfg.nx)?;
        let model = match cfg.model {
            ModelChoice::Spohn => Model::Spohn(SpohnParams::cubic(cfg.beta.unwrap_or_default())?),
            _ => Model::Tv,
        };
        let solver_cfg = SolverConfig1D {
            osv_tol: cfg.osv_tol,
            max_sweeps: cfg.max_sweeps,
            ..SolverConfig1D::scaled(&grid, cfg.c_lambda, cfg.c_mu, model, cfg.scheme, cfg.mode)?
        };
        Ok((grid, solver_cfg, load_initial(cfg)?))
    };
    let (grid, solver_cfg, u0) = setup().map_err(|e| partial(None, e))?;
    let mut summary = Summary::new(cfg, solver_cfg.lambda, solver_cfg.mu);
    let ops = OperatorSet1D::new(grid, cfg.scheme)
        .map_err(|e| partial(Some(&summary), e))?;
    let solver = Solver1D::new(&ops, solver_cfg)
        .map_err(|e| partial(Some(&summary), e))?;
    let x = grid.cell_centers();
    let coords: Vec<Vec<f64>> = x.iter().map(|&x| vec![x]).collect();
    summary.initial_sup_norm = sup(&reduction::expand(&u0));

    match cfg.mode {
        Mode::Flow => {
            let traj = solver.run_flow(&u0, &monitor(cfg)).map_err(|e| partial(Some(&summary), e))?;
            record_flow(&mut summary, &traj);
            if cfg.scheme == Scheme::ApproxJ {
                let exact = ops
                    .with_scheme(Scheme::ExactH)
                    .map_err(|e| partial(Some(&summary), e))?;
                summary.hminus1_exact_h_initial = Some(exact.hminus1_norm(&u0));
                summary.hminus1_exact_h_final = Some(exact.hminus1_norm(&reduction::reduce(&traj.final_field)));
            }
            write_flow(&cfg.out, &traj, &coords, &["x"]).map_err(|e| partial(Some(&summary), e))?;
        }
        Mode::Osv => {
            let sol = match solver.solve_osv(&u0) {
                Ok(sol) => sol,
                Err(e) => {
                    summary.termination = "not-converged".into();
                    return Err(partial(Some(&summary), e));
                }
            };
            summary.termination = "converged".into();
            summary.steps = sol.sweeps;
            summary.objective = Some(sol.objective());
            let full = reduction::expand(&sol.u);
            summary.final_sup_norm = sup(&full);
            let write = || -> Result<()> {
                let mut w = csv::Writer::from_path(cfg.out.join("osv_trace.csv"))?;
                w.write_record(["sweep", "objective"])?;
                for (k, obj) in sol.objective_trace.iter().enumerate() {
                    w.write_record([(k + 1).to_string(), obj.to_string()])?;
                }
                w.flush()?;
                write_field(&cfg.out.join("solution.csv"), &coords, &["x"], &full)
            };
            write().map_err(|e| partial(Some(&summary), e))?;
        }
    }
    Ok(summary)
}

fn run_2d(cfg: &RunConfig) -> std::result::Result<Summary, Partial> {
    let setup = || -> Result<_> {
        let grid = Grid2D::new(cfg.nx, cfg.ny)?;
        let model = match cfg.model {
            ModelChoice::Spohn => Model2D::Spohn(SpohnParams::cubic(cfg.beta.unwrap_or_default())?),
            ModelChoice::Anisotropic => Model2D::Anisotropic,
            _ => Model2D::Isotropic,
        };
        let solver_cfg = SolverConfig2D {
            osv_tol: cfg.osv_tol,
            max_sweeps: cfg.max_sweeps,
            ..SolverConfig2D::scaled(&grid, cfg.c_lambda, cfg.c_mu, model, cfg.mode)?
        };
        Ok((grid, solver_cfg, load_initial(cfg)?))
    };
    let (grid, solver_cfg, u0) = setup().map_err(|e| partial(None, e))?;
    let mut summary = Summary::new(cfg, solver_cfg.lambda, solver_cfg.mu);
    let ops = OperatorSet2D::new(grid, cfg.scheme)
        .map_err(|e| partial(Some(&summary), e))?;
    let solver = Solver2D::new(&ops, solver_cfg)
        .map_err(|e| partial(Some(&summary), e))?;
    let coords: Vec<Vec<f64>> = grid.cell_centers().iter().map(|&(x, y)| vec![x, y]).collect();
    summary.initial_sup_norm = sup(&reduction::expand(&u0));

    match cfg.mode {
        Mode::Flow => {
            let traj = solver.run_flow(&u0, &monitor(cfg)).map_err(|e| partial(Some(&summary), e))?;
            record_flow(&mut summary, &traj);
            write_flow(&cfg.out, &traj, &coords, &["x", "y"]).map_err(|e| partial(Some(&summary), e))?;
        }
        Mode::Osv => {
            let u = match solver.solve_osv(&u0) {
                Ok(u) => u,
                Err(e) => {
                    summary.termination = "not-converged".into();
                    return Err(partial(Some(&summary), e));
                }
            };
            summary.termination = "converged".into();
            summary.objective = Some(solver.objective(&u, &u0));
            let full = reduction::expand(&u);
            summary.final_sup_norm = sup(&full);
            write_field(&cfg.out.join("solution.csv"), &coords, &["x", "y"], &full)
                .map_err(|e| partial(Some(&summary), e))?;
        }
    }
    Ok(summary)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn record_flow(summary: &mut Summary, traj: &Trajectory) {
    let last = traj.last();
    summary.termination = match traj.termination {
        Termination::Extinct { .. } => "extinct".into(),
        Termination::MaxSteps => "max-steps".into(),
    };
    summary.steps = last.step;
    summary.final_time = last.t;
    summary.final_sup_norm = last.diagnostics.sup_norm;
    summary.crossing = traj
        .crossings
        .iter()
        .map(|&(threshold, step)| Crossing { threshold, step })
        .collect();
}

/// Writes the trajectory table, the requested snapshots and the final field.
pub fn write_flow(dir: &Path, traj: &Trajectory, coords: &[Vec<f64>], axes: &[&str]) -> Result<()> {
    write_trajectory(&dir.join("trajectory.csv"), traj)?;
    if !traj.snapshots.is_empty() {
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        for Snapshot { step, values, .. } in &traj.snapshots {
            write_field(&snapshot_path(&snap_dir, *step), coords, axes, values)?;
        }
    }
    write_field(&dir.join("final.csv"), coords, axes, &traj.final_field)
}

pub fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("step_{step:07}.csv"))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in &traj.records {
        let d = r.diagnostics;
        w.serialize(Row {
            step: r.step,
            t: r.t,
            sup_norm: d.sup_norm,
            tv_energy: d.tv_energy,
            hminus1_norm: d.hminus1_norm,
            constraint_gap: d.constraint_gap,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field(path: &Path, coords: &[Vec<f64>], axes: &[&str], values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<&str> = axes.to_vec();
    header.push("u");
    w.write_record(&header)?;
    for (c, v) in coords.iter().zip(values) {
        let mut row: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        row.push(v.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
