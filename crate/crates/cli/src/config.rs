//! Run configuration: a flat TOML file, optionally a named example, and
//! command-line overrides, resolved into one fully specified [`RunConfig`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bregflow_core::experiments::{example, ExampleModel};
use bregflow_core::{Mode, Preset, Scheme};
use clap::Args;
use serde::{Deserialize, Serialize};

/// Every key a config file may set. Unset keys fall back to the example
/// (if any) and then to the defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Named setup (example1..example4, isotropic2d, anisotropic2d, spohn2d)
    #[arg(long)]
    pub example: Option<String>,
    /// Initial-data preset: cusp1d, cubic1d, cos1d, poly2d
    #[arg(long)]
    pub preset: Option<String>,
    /// CSV file with initial samples (last column is the value)
    #[arg(long)]
    pub initial: Option<PathBuf>,
    /// Spatial dimension, 1 or 2
    #[arg(long)]
    pub dim: Option<usize>,
    /// Cells (1D) or cells per axis (2D)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// tv or spohn in 1D; isotropic, anisotropic or spohn in 2D
    #[arg(long)]
    pub model: Option<String>,
    /// approx-j or exact-h
    #[arg(long)]
    pub scheme: Option<String>,
    /// λ = c_λ h⁻³ (1D) or c_λ (h_x h_y)⁻² (2D)
    #[arg(long = "clambda")]
    #[serde(alias = "clambda")]
    pub c_lambda: Option<f64>,
    /// μ = c_μ h⁻¹ (1D) or c_μ (h_x h_y)⁻¹ (2D)
    #[arg(long = "cmu")]
    #[serde(alias = "cmu")]
    pub c_mu: Option<f64>,
    /// Facet coefficient of the Spohn energy
    #[arg(long)]
    pub beta: Option<f64>,
    /// flow or osv
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long = "stop-supnorm")]
    #[serde(alias = "stop-supnorm")]
    pub stop_supnorm: Option<f64>,
    #[arg(long = "max-steps")]
    #[serde(alias = "max-steps")]
    pub max_steps: Option<usize>,
    /// Write a snapshot every this many steps
    #[arg(long = "snap-every")]
    #[serde(alias = "snap-every")]
    pub snap_every: Option<usize>,
    /// Keep one trajectory row every this many steps
    #[arg(long = "record-every")]
    #[serde(alias = "record-every")]
    pub record_every: Option<usize>,
    /// Sup-norm levels whose first crossing is reported
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    #[arg(long = "osv-tol")]
    #[serde(alias = "osv-tol")]
    pub osv_tol: Option<f64>,
    #[arg(long = "max-sweeps")]
    #[serde(alias = "max-sweeps")]
    pub max_sweeps: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid run configuration")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Fields set in `over` win.
    pub fn merged(self, over: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            example, preset, initial, dim, n, nx, ny, model, scheme, c_lambda, c_mu, beta, mode, stop_supnorm,
            max_steps, snap_every, record_every, thresholds, osv_tol, max_sweeps, out
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    Tv,
    Spohn,
    Isotropic,
    Anisotropic,
}

impl ModelChoice {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "tv" => ModelChoice::Tv,
            "spohn" => ModelChoice::Spohn,
            "isotropic" | "iso" => ModelChoice::Isotropic,
            "anisotropic" | "aniso" => ModelChoice::Anisotropic,
            other => bail!("unknown model `{other}` (expected tv, spohn, isotropic or anisotropic)"),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Tv => "tv",
            ModelChoice::Spohn => "spohn",
            ModelChoice::Isotropic => "isotropic",
            ModelChoice::Anisotropic => "anisotropic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Preset(Preset),
    File(PathBuf),
}

impl InitialData {
    pub fn describe(&self) -> String {
        match self {
            InitialData::Preset(p) => p.name().to_string(),
            InitialData::File(p) => p.display().to_string(),
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub nx: usize,
    /// Equal to 1 in 1D.
    pub ny: usize,
    pub initial: InitialData,
    pub model: ModelChoice,
    pub beta: Option<f64>,
    pub scheme: Scheme,
    pub c_lambda: f64,
    pub c_mu: f64,
    pub mode: Mode,
    pub stop_supnorm: f64,
    pub max_steps: usize,
    pub snap_every: Option<usize>,
    pub record_every: usize,
    pub thresholds: Vec<f64>,
    pub osv_tol: f64,
    pub max_sweeps: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(raw: RawConfig) -> Result<Self> {
        let ex = match &raw.example {
            Some(name) => Some(example(name).with_context(|| format!("unknown example `{name}`"))?),
            None => None,
        };

        let initial = match (&raw.initial, &raw.preset) {
            (Some(_), Some(_)) => bail!("set either `preset` or `initial`, not both"),
            (Some(path), None) => InitialData::File(path.clone()),
            (None, Some(name)) => InitialData::Preset(name.parse::<Preset>()?),
            (None, None) => InitialData::Preset(ex.map_or(Preset::Cos1d, |e| e.preset)),
        };
        let dim = match (raw.dim, &initial) {
            (Some(d @ (1 | 2)), _) => d,
            (Some(d), _) => bail!("dim must be 1 or 2, got {d}"),
            (None, InitialData::Preset(p)) => p.dimension(),
            (None, InitialData::File(_)) => {
                if raw.ny.is_some() { 2 } else { 1 }
            }
        };
        if let InitialData::Preset(p) = &initial {
            if p.dimension() != dim {
                bail!("preset `{p}` is {}D but dim = {dim}", p.dimension());
            }
        }
        if let Some(e) = ex {
            if e.preset.dimension() != dim {
                bail!("example `{}` is {}D but dim = {dim}", e.name, e.preset.dimension());
            }
        }

        let default_n = ex.map_or(if dim == 1 { 100 } else { 40 }, |e| e.n);
        let n = raw.n.unwrap_or(default_n);
        let (nx, ny) = if dim == 1 {
            if raw.ny.is_some() {
                bail!("ny is only meaningful with dim = 2");
            }
            (raw.nx.unwrap_or(n), 1)
        } else {
            (raw.nx.unwrap_or(n), raw.ny.unwrap_or(n))
        };

        let (ex_model, ex_beta) = match ex.map(|e| e.model) {
            Some(ExampleModel::Tv) => (Some(ModelChoice::Tv), None),
            Some(ExampleModel::Spohn { beta }) | Some(ExampleModel::Spohn2d { beta }) => {
                (Some(ModelChoice::Spohn), Some(beta))
            }
            Some(ExampleModel::Isotropic) => (Some(ModelChoice::Isotropic), None),
            Some(ExampleModel::Anisotropic) => (Some(ModelChoice::Anisotropic), None),
            None => (None, None),
        };
        let model = match &raw.model {
            Some(m) => ModelChoice::parse(m)?,
            None => ex_model.unwrap_or(if dim == 1 { ModelChoice::Tv } else { ModelChoice::Isotropic }),
        };
        match (dim, model) {
            (1, ModelChoice::Isotropic | ModelChoice::Anisotropic) => {
                bail!("model `{}` needs dim = 2", model.name())
            }
            (2, ModelChoice::Tv) => bail!("in 2D choose isotropic or anisotropic instead of tv"),
            _ => {}
        }
        let beta = raw.beta.or(ex_beta);
        if model == ModelChoice::Spohn && beta.is_none() {
            bail!("the spohn model needs `beta`");
        }

        let scheme = match &raw.scheme {
            Some(s) => s.parse::<Scheme>().map_err(anyhow::Error::msg)?,
            None => ex.map_or(Scheme::ApproxJ, |e| e.scheme),
        };
        if dim == 2 && scheme == Scheme::ExactH {
            bail!("the exact-h scheme is only available in 1D");
        }
        let mode = match &raw.mode {
            Some(m) => m.parse::<Mode>().map_err(anyhow::Error::msg)?,
            None => Mode::Flow,
        };
        let (def_cl, def_cm) = if dim == 1 { (1.0, 5.0) } else { (5.0, 20.0) };

        let cfg = RunConfig {
            dim,
            nx,
            ny,
            initial,
            model,
            beta,
            scheme,
            c_lambda: raw.c_lambda.or(ex.map(|e| e.c_lambda)).unwrap_or(def_cl),
            c_mu: raw.c_mu.or(ex.map(|e| e.c_mu)).unwrap_or(def_cm),
            mode,
            stop_supnorm: raw.stop_supnorm.unwrap_or(1e-4),
            max_steps: raw.max_steps.unwrap_or(100_000),
            snap_every: raw.snap_every.filter(|&k| k > 0),
            record_every: raw.record_every.unwrap_or(1).max(1),
            thresholds: raw.thresholds.unwrap_or_else(|| vec![1e-4, 1e-6, 1e-8]),
            osv_tol: raw.osv_tol.unwrap_or(bregflow_core::solver1d::DEFAULT_OSV_TOL),
            max_sweeps: raw.max_sweeps.unwrap_or(bregflow_core::solver1d::DEFAULT_MAX_SWEEPS),
            out: raw.out.unwrap_or_else(|| PathBuf::from("out")),
        };
        for (name, v) in [("c_lambda", cfg.c_lambda), ("c_mu", cfg.c_mu), ("stop_supnorm", cfg.stop_supnorm)] {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be positive, got {v}");
            }
        }
        Ok(cfg)
    }

    /// Spacing per axis.
    pub fn h(&self) -> (f64, f64) {
        (1.0 / self.nx as f64, 1.0 / self.ny as f64)
    }
}
