//! Split Bregman schemes for fourth-order total variation flow, the
//! Osher–Solé–Vese decomposition model and Spohn's crystalline relaxation
//! model on periodic 1D and 2D grids.
//!
//! The H⁻¹ fidelity `‖u - f‖²_{H⁻¹}` is reduced to a Euclidean norm
//! `h³‖K(u - f)‖²` on zero-mean piecewise-constant functions, which makes every
//! `u`-update a fixed symmetric positive definite solve and every `d`-update a
//! closed-form shrinkage.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod operators1d;
pub mod presets;
pub mod reduction;
pub mod shrinkage;
pub mod solver1d;
pub mod trajectory;
pub mod twodim;

pub use error::{Error, Result};
pub use operators1d::{Grid1D, OperatorSet1D, Scheme};
pub use shrinkage::{shrink_iso2d, shrink_spohn, shrink_spohn2d, shrink_tv, SpohnParams};
pub use solver1d::{BregmanState1D, Mode, Model, OsvSolution, Solver1D, SolverConfig1D, SystemFactor};
pub use trajectory::{Diagnostics, FlowMonitor, Snapshot, Termination, Trajectory, TrajectoryRecord};
pub use presets::Preset;
pub use twodim::{BregmanState2D, Grid2D, Model2D, OperatorSet2D, Solver2D, SolverConfig2D};
