//! Time-stepping driver and the diagnostics it records.

/// Scalar diagnostics of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `‖ũ‖_∞` of the full (zero-mean) grid function.
    pub sup_norm: f64,
    pub tv_energy: f64,
    /// Discrete H⁻¹ norm with the solver's fidelity matrix.
    pub hminus1_norm: f64,
    /// `‖d - ∇u‖₂` summed over all split variables.
    pub constraint_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub t: f64,
    pub diagnostics: Diagnostics,
}

/// Full grid function at one step (1D: length `N`; 2D: `N_x N_y`, x fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The sup-norm dropped below the stopping threshold at this step.
    Extinct { step: usize },
    /// The step budget ran out first.
    MaxSteps,
}

/// What to record and when to stop.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMonitor {
    pub stop_supnorm: f64,
    pub max_steps: usize,
    /// Snapshot every this many steps (step 0 included).
    pub snapshot_every: Option<usize>,
    /// Additional explicit snapshot steps.
    pub snapshot_steps: Vec<usize>,
    /// Record first step with `sup_norm < threshold` for each entry.
    pub crossing_thresholds: Vec<f64>,
    /// Keep one record every this many steps; the first and last are always kept.
    pub record_every: usize,
}

impl Default for FlowMonitor {
    fn default() -> Self {
        Self {
            stop_supnorm: 1e-4,
            max_steps: 100_000,
            snapshot_every: None,
            snapshot_steps: Vec::new(),
            crossing_thresholds: Vec::new(),
            record_every: 1,
        }
    }
}

impl FlowMonitor {
    pub fn stop_at(stop_supnorm: f64, max_steps: usize) -> Self {
        Self {
            stop_supnorm,
            max_steps,
            ..Self::default()
        }
    }

    fn wants_snapshot(&self, step: usize) -> bool {
        self.snapshot_every.is_some_and(|every| every > 0 && step % every == 0)
            || self.snapshot_steps.contains(&step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tau: f64,
    pub records: Vec<TrajectoryRecord>,
    pub snapshots: Vec<Snapshot>,
    /// `(threshold, first step below it)`, in the monitor's order.
    pub crossings: Vec<(f64, Option<usize>)>,
    pub termination: Termination,
    /// Full grid function at the last step.
    pub final_field: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryRecord {
        self.records.last().expect("trajectory always holds the initial record")
    }

    pub fn steps_taken(&self) -> usize {
        self.last().step
    }

    pub fn crossing(&self, threshold: f64) -> Option<usize> {
        self.crossings
            .iter()
            .find(|(t, _)| *t == threshold)
            .and_then(|(_, k)| *k)
    }
}

/// One backward-Euler problem the generic driver can advance.
pub(crate) trait FlowProblem {
    type State;

    fn tau(&self) -> f64;
    fn advance(&self, state: &mut Self::State);
    /// Cheap stopping quantity, evaluated every step.
    fn sup_norm(&self, state: &Self::State) -> f64;
    /// Full diagnostics, evaluated only on recorded steps.
    fn diagnostics(&self, state: &Self::State) -> Diagnostics;
    fn field(&self, state: &Self::State) -> Vec<f64>;
}

pub(crate) fn drive<P: FlowProblem>(
    problem: &P,
    mut state: P::State,
    monitor: &FlowMonitor,
) -> (Trajectory, P::State) {
    let tau = problem.tau();
    let record_every = monitor.record_every.max(1);
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut crossings: Vec<(f64, Option<usize>)> = monitor
        .crossing_thresholds
        .iter()
        .map(|&t| (t, None))
        .collect();

    let mut step = 0usize;
    let termination = loop {
        let sup = problem.sup_norm(&state);
        let t = step as f64 * tau;
        for (threshold, first) in crossings.iter_mut() {
            if first.is_none() && sup < *threshold {
                *first = Some(step);
            }
        }
        let extinct = sup < monitor.stop_supnorm;
        let out_of_steps = step >= monitor.max_steps;
        if step % record_every == 0 || extinct || out_of_steps {
            records.push(TrajectoryRecord {
                step,
                t,
                diagnostics: problem.diagnostics(&state),
            });
        }
        if monitor.wants_snapshot(step) {
            snapshots.push(Snapshot {
                step,
                t,
                values: problem.field(&state),
            });
        }
        if extinct {
            break Termination::Extinct { step };
        }
        if out_of_steps {
            break Termination::MaxSteps;
        }
        problem.advance(&mut state);
        step += 1;
    };

    let final_field = problem.field(&state);
    (
        Trajectory {
            tau,
            records,
            snapshots,
            crossings,
            termination,
            final_field,
        },
        state,
    )
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Halves a scalar every step.
    struct Halving;

    impl FlowProblem for Halving {
        type State = f64;

        fn tau(&self) -> f64 {
            0.5
        }

        fn advance(&self, state: &mut f64) {
            *state *= 0.5;
        }

        fn sup_norm(&self, state: &f64) -> f64 {
            state.abs()
        }

        fn diagnostics(&self, state: &f64) -> Diagnostics {
            Diagnostics {
                sup_norm: state.abs(),
                tv_energy: 0.0,
                hminus1_norm: 0.0,
                constraint_gap: 0.0,
            }
        }

        fn field(&self, state: &f64) -> Vec<f64> {
            vec![*state]
        }
    }

    #[test]
    fn stops_at_first_step_below_threshold() {
        let monitor = FlowMonitor {
            crossing_thresholds: vec![0.3, 0.01],
            snapshot_every: Some(2),
            ..FlowMonitor::stop_at(0.1, 100)
        };
        let (traj, state) = drive(&Halving, 1.0, &monitor);
        // 1, .5, .25, .125, .0625
        assert_eq!(traj.termination, Termination::Extinct { step: 4 });
        assert_eq!(state, 0.0625);
        assert_eq!(traj.records.len(), 5);
        assert_eq!(traj.last().t, 2.0);
        assert_eq!(traj.crossing(0.3), Some(2));
        assert_eq!(traj.crossing(0.01), None);
        let snap_steps: Vec<usize> = traj.snapshots.iter().map(|s| s.step).collect();
        assert_eq!(snap_steps, vec![0, 2, 4]);
    }

    #[test]
    fn step_budget_and_thinned_records() {
        let monitor = FlowMonitor {
            record_every: 3,
            ..FlowMonitor::stop_at(0.0, 7)
        };
        let (traj, _) = drive(&Halving, 1.0, &monitor);
        assert_eq!(traj.termination, Termination::MaxSteps);
        let steps: Vec<usize> = traj.records.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 3, 6, 7]);
    }

    #[test]
    fn already_extinct_initial_state() {
        let (traj, _) = drive(&Halving, 0.0, &FlowMonitor::default());
        assert_eq!(traj.records.len(), 1);
        assert_eq!(traj.termination, Termination::Extinct { step: 0 });
    }
}
