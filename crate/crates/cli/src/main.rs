use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bregflow_cli::config::{RawConfig, RunConfig};
use bregflow_cli::{reports, runner};
use bregflow_core::Scheme;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bregflow", version, about = "Split Bregman solvers for fourth-order TV flow, OSV and Spohn's model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML run configuration; flags override its keys
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RawConfig,
}

impl Source {
    fn raw(&self) -> Result<RawConfig> {
        let base = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        Ok(base.merged(self.flags.clone()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one flow or OSV problem and write CSV output and a summary
    Run(Source),
    /// Sup-difference between two fidelity schemes at a fixed time over several grid sizes
    CompareSchemes {
        #[command(flatten)]
        source: Source,
        /// Second configuration; defaults to the first with the other scheme
        #[arg(long = "config-b")]
        config_b: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "40,80,160")]
        sizes: Vec<usize>,
        #[arg(long = "t-final", default_value_t = 1.5625e-3)]
        t_final: f64,
        /// Record the gap every this many steps (0: only at the end)
        #[arg(long, default_value_t = 0)]
        every: usize,
    },
    /// Extinction steps of -cos(2πx) for the published table rows
    Table1 {
        /// Rows to run, 1-based
        #[arg(long, value_delimiter = ',', default_value = "1")]
        rows: Vec<usize>,
        #[arg(long, default_value = "approx-j")]
        scheme: Scheme,
        #[arg(long = "cmu", default_value_t = 5.0)]
        c_mu: f64,
        /// Step budget as a multiple of the published 1e-8 step
        #[arg(long = "step-factor", default_value_t = 2.0)]
        step_factor: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run several configuration files, each into its own directory
    Sweep {
        configs: Vec<PathBuf>,
        /// Number of runs in flight at once
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Write the assembled operator matrices as CSV
    DumpOps {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        #[arg(long, default_value = "approx-j")]
        scheme: Scheme,
        #[arg(long, default_value = "ops")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(source) => {
            let cfg = RunConfig::resolve(source.raw()?)?;
            let s = runner::run(&cfg)?;
            println!(
                "{} {}D N = {}x{}: λ = {:e}, μ = {:e}, τ = {:e}",
                s.initial, s.dim, s.nx, s.ny, s.lambda, s.mu, s.tau
            );
            println!(
                "{} after {} steps (t = {:e}), sup-norm {:e}, {:.2} s",
                s.termination, s.steps, s.final_time, s.final_sup_norm, s.wall_time_s
            );
            println!("wrote {}", cfg.out.display());
        }
        Command::CompareSchemes {
            source,
            config_b,
            sizes,
            t_final,
            every,
        } => {
            let mut raw = source.raw()?;
            if raw.example.is_none() && raw.preset.is_none() && raw.initial.is_none() {
                raw.example = Some("example1".into());
            }
            let a = RunConfig::resolve(raw.clone())?;
            let b = match config_b {
                Some(path) => RunConfig::resolve(RawConfig::from_file(&path)?.merged(source.flags.clone()))?,
                None => {
                    let other = match a.scheme {
                        Scheme::ApproxJ => Scheme::ExactH,
                        Scheme::ExactH => Scheme::ApproxJ,
                    };
                    RunConfig { scheme: other, ..a.clone() }
                }
            };
            let runs = reports::compare_schemes(&a, &b, &sizes, t_final, every)?;
            std::fs::create_dir_all(&a.out)?;
            let path = a.out.join("compare.csv");
            reports::write_comparison(&path, &runs)?;
            println!("{} vs {} on {}", a.scheme, b.scheme, a.initial.describe());
            for line in reports::describe_comparison(&runs) {
                println!("{line}");
            }
            println!("wrote {}", path.display());
        }
        Command::Table1 {
            rows,
            scheme,
            c_mu,
            step_factor,
            out,
        } => {
            let results = reports::table1(&rows, scheme, c_mu, step_factor)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("table1.csv");
            reports::write_table1(&path, &results)?;
            for line in reports::describe_table1(&results, c_mu) {
                println!("{line}");
            }
            println!("wrote {}", path.display());
        }
        Command::Sweep { configs, jobs, out } => {
            let results = reports::sweep(&configs, &RawConfig::default(), &out, jobs);
            let mut failed = false;
            for (path, res) in results {
                match res {
                    Ok(s) => println!("{}: {} after {} steps", path.display(), s.termination, s.steps),
                    Err(e) => {
                        failed = true;
                        println!("{}: failed: {e:#}", path.display());
                    }
                }
            }
            if failed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::DumpOps {
            dim,
            n,
            nx,
            ny,
            scheme,
            out,
        } => {
            anyhow::ensure!(dim == 1 || dim == 2, "dim must be 1 or 2");
            let (nx, ny) = (nx.unwrap_or(n), if dim == 1 { 1 } else { ny.unwrap_or(n) });
            let names = reports::dump_ops(dim, nx, ny, scheme, &out).context("dumping operators")?;
            println!("wrote {} to {}", names.join(", "), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
