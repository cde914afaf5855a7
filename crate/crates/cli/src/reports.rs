//! Reproduction reports and batch helpers built on top of single runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use bregflow_core::experiments::{compare_runs, run_table1_row, SchemeComparison, Table1Result, TABLE1};
use bregflow_core::{Grid1D, Grid2D, Model, OperatorSet1D, OperatorSet2D, Scheme, SpohnParams};

use crate::config::{InitialData, ModelChoice, RawConfig, RunConfig};
use crate::runner;

/// Everything but the scheme must agree for a scheme comparison.
pub fn check_comparable(a: &RunConfig, b: &RunConfig) -> Result<()> {
    ensure!(a.dim == 1 && b.dim == 1, "scheme comparison needs 1D runs");
    ensure!(a.nx == b.nx, "grids differ: N = {} vs N = {}", a.nx, b.nx);
    ensure!(a.initial == b.initial, "initial data differ: {} vs {}", a.initial.describe(), b.initial.describe());
    ensure!(
        a.c_lambda == b.c_lambda && a.c_mu == b.c_mu,
        "scalings differ: (c_λ, c_μ) = ({}, {}) vs ({}, {})",
        a.c_lambda,
        a.c_mu,
        b.c_lambda,
        b.c_mu
    );
    ensure!(a.model == b.model && a.beta == b.beta, "models differ");
    Ok(())
}

fn model_1d(cfg: &RunConfig) -> Result<Model> {
    Ok(match cfg.model {
        ModelChoice::Spohn => Model::Spohn(SpohnParams::cubic(cfg.beta.unwrap_or_default())?),
        _ => Model::Tv,
    })
}

/// Sup-difference of the two runs for each grid size at `t_final`.
pub fn compare_schemes(a: &RunConfig, b: &RunConfig, sizes: &[usize], t_final: f64, every: usize) -> Result<Vec<SchemeComparison>> {
    check_comparable(a, b)?;
    let preset = match &a.initial {
        InitialData::Preset(p) => *p,
        InitialData::File(_) => bail!("scheme comparison across grid sizes needs a preset"),
    };
    let model = model_1d(a)?;
    sizes
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            let steps = (t_final * a.c_lambda / (h * h * h)).round() as usize;
            let every = if every == 0 { steps.max(1) } else { every };
            Ok(compare_runs(n, preset, a.c_lambda, a.c_mu, model, (a.scheme, b.scheme), steps, every)?)
        })
        .collect()
}

pub fn write_comparison(path: &Path, runs: &[SchemeComparison]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "step", "t", "sup_gap"])?;
    for run in runs {
        for &(step, t, gap) in &run.samples {
            w.write_record([run.n.to_string(), step.to_string(), t.to_string(), gap.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Human-readable lines for a comparison.
pub fn describe_comparison(runs: &[SchemeComparison]) -> Vec<String> {
    let mut lines: Vec<String> = runs
        .iter()
        .map(|r| format!("N = {:4}: sup |u_a - u_b| = {:.4e} at t = {:.4e}", r.n, r.final_gap(), r.samples.last().map_or(0.0, |s| s.1)))
        .collect();
    let gaps: Vec<f64> = runs.iter().map(|r| r.final_gap()).collect();
    if gaps.len() > 1 {
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        lines.push(format!("trend over N: {}", if decreasing { "decreasing" } else { "not decreasing" }));
    }
    lines
}

/// Runs the selected extinction-table rows (1-based).
pub fn table1(rows: &[usize], scheme: Scheme, c_mu: f64, step_factor: f64) -> Result<Vec<Table1Result>> {
    rows.iter()
        .map(|&r| {
            let row = TABLE1.get(r.wrapping_sub(1)).with_context(|| format!("no table row {r} (rows are 1..=3)"))?;
            let max_steps = (row.paper_steps[2] as f64 * step_factor).ceil() as usize;
            Ok(run_table1_row(row, scheme, c_mu, max_steps)?)
        })
        .collect()
}

pub fn write_table1(path: &Path, results: &[Table1Result]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "n", "c_lambda", "scheme", "lambda", "mu", "tau", "bound_steps", "k_1e-4", "k_1e-6", "k_1e-8", "paper_1e-4",
        "paper_1e-6", "paper_1e-8", "max_steps",
    ])?;
    let opt = |k: Option<usize>| k.map_or(String::new(), |k| k.to_string());
    for r in results {
        w.write_record([
            r.row.n.to_string(),
            r.row.c_lambda.to_string(),
            r.scheme.as_str().to_string(),
            r.lambda.to_string(),
            r.mu.to_string(),
            r.tau.to_string(),
            format!("{:.1}", r.bound_steps),
            opt(r.crossings[0]),
            opt(r.crossings[1]),
            opt(r.crossings[2]),
            r.row.paper_steps[0].to_string(),
            r.row.paper_steps[1].to_string(),
            r.row.paper_steps[2].to_string(),
            r.max_steps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn describe_table1(results: &[Table1Result], c_mu: f64) -> Vec<String> {
    let mut lines = vec![
        format!("μ = {c_mu} h⁻¹ is assumed; the published table does not state μ, so every column is parameter-sensitive."),
        format!("{:>5} {:>8} {:>10} {:>10} {:>22} {:>22} {:>22}", "N", "λh³", "τ", "T*/τ", "k(1e-4) ours/paper", "k(1e-6) ours/paper", "k(1e-8) ours/paper"),
    ];
    for r in results {
        let cell = |i: usize| {
            format!(
                "{}/{}",
                r.crossings[i].map_or("-".to_string(), |k| k.to_string()),
                r.row.paper_steps[i]
            )
        };
        lines.push(format!(
            "{:>5} {:>8} {:>10.3e} {:>10.1} {:>22} {:>22} {:>22}",
            r.row.n,
            r.row.c_lambda,
            r.tau,
            r.bound_steps,
            cell(0),
            cell(1),
            cell(2)
        ));
    }
    lines
}

/// Runs several config files one after another, or on `jobs` threads. Each
/// run writes to `out/<file stem>`.
pub fn sweep(configs: &[PathBuf], overrides: &RawConfig, out: &Path, jobs: usize) -> Vec<(PathBuf, Result<runner::Summary>)> {
    let prepare = |path: &PathBuf| -> Result<RunConfig> {
        let raw = RawConfig::from_file(path)?.merged(overrides.clone());
        let mut cfg = RunConfig::resolve(raw)?;
        let stem = path.file_stem().context("config path has no file name")?;
        cfg.out = out.join(stem);
        Ok(cfg)
    };
    let one = |path: &PathBuf| prepare(path).and_then(|cfg| runner::run(&cfg));
    if jobs <= 1 || configs.len() <= 1 {
        return configs.iter().map(|p| (p.clone(), one(p))).collect();
    }
    let per_thread = configs.len().div_ceil(jobs);
    let mut results: Vec<Option<Result<runner::Summary>>> = configs.iter().map(|_| None).collect();
    std::thread::scope(|scope| {
        for (c, slots) in results.chunks_mut(per_thread).enumerate() {
            let start = c * per_thread;
            let one = &one;
            scope.spawn(move || {
                for (i, slot) in slots.iter_mut().enumerate() {
                    *slot = Some(one(&configs[start + i]));
                }
            });
        }
    });
    configs
        .iter()
        .cloned()
        .zip(results.into_iter().map(|r| r.expect("every slot is filled")))
        .collect()
}

fn write_matrix(path: &Path, rows: usize, cols: usize, at: impl Fn(usize, usize) -> f64) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..rows {
        w.write_record((0..cols).map(|j| at(i, j).to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the assembled operators as header-less CSV matrices. Returns the
/// names written.
pub fn dump_ops(dim: usize, nx: usize, ny: usize, scheme: Scheme, out: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(out)?;
    let mut names = Vec::new();
    macro_rules! dump {
        ($name:expr, $m:expr) => {{
            let m = $m;
            write_matrix(&out.join(format!("{}.csv", $name)), m.nrows(), m.ncols(), |i, j| m[(i, j)])?;
            names.push($name.to_string());
        }};
    }
    if dim == 1 {
        let ops = OperatorSet1D::new(Grid1D::new(nx)?, scheme)?;
        dump!("S", ops.s());
        dump!("R", ops.r());
        dump!("L", ops.l());
        dump!("SR", ops.sr());
        dump!("A", ops.a());
        dump!("T", ops.t());
        dump!("K", ops.k());
    } else {
        let ops = OperatorSet2D::new(Grid2D::new(nx, ny)?, scheme)?;
        dump!("A2", ops.a2());
        dump!("Kx", ops.kx());
        dump!("Ky", ops.ky());
        dump!("Bx", &ops.bx_dense());
        dump!("By", &ops.by_dense());
    }
    Ok(names)
}
