//! The adsorption dynamics in three execution modes.
//!
//! * [`run_direct`]: the process on an explicit graph, visiting vertices in a
//!   given order (the oracle).
//! * [`run_explore_counts`]: the counts-only Markov chain, drawing the number
//!   of connections to each class as independent binomials.
//! * [`run_explore_coupled`]: the exploration algorithm revealing edges
//!   through the same per-pair keys the graph was sampled with, so its labels
//!   must coincide with the direct run.

mod direct;
mod explore;
pub mod structure;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::{AdsorptionRule, Label, ModelSpec, Placement};

pub use direct::{run_direct, run_direct_observed};
pub use explore::{
    explore_step, run_explore_counts, run_explore_counts_observed, run_explore_coupled,
    run_explore_coupled_with,
};

/// Class counts of the chain. `classes` is laid out as described by the
/// rule's `class_slots`; `blocked` is only used by the threshold model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateCounts {
    pub classes: Vec<u64>,
    pub blocked: u64,
    pub unexplored: u64,
}

impl StateCounts {
    pub fn initial(spec: &ModelSpec) -> Self {
        Self {
            classes: vec![0; spec.class_slots()],
            blocked: 0,
            unexplored: spec.n as u64,
        }
    }

    pub fn total(&self) -> u64 {
        self.classes.iter().sum::<u64>() + self.blocked + self.unexplored
    }

    pub fn active(&self, spec: &ModelSpec) -> u64 {
        self.classes[spec.active_classes()].iter().sum()
    }

    /// Applies one exploration step.
    pub fn apply(&mut self, rule: &dyn AdsorptionRule, outcome: &StepOutcome) {
        debug_assert!(self.unexplored > 0);
        self.unexplored -= 1;
        match outcome.accepted_class {
            Some(class) => {
                let slots = self.classes.len();
                for (j, &moved) in outcome
                    .promotions
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0)
                {
                    debug_assert!(j + 1 < slots && self.classes[j] >= moved);
                    self.classes[j] -= moved;
                }
                for (j, &moved) in outcome
                    .promotions
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0)
                {
                    self.classes[j + 1] += moved;
                }
                self.classes[class] += 1;
            }
            None => match rule.blocked_slot() {
                Some(slot) => self.classes[slot] += 1,
                None => self.blocked += 1,
            },
        }
    }
}

/// What happened at one step: connection counts per class, the class the
/// new vertex joined (if any), and how many vertices moved from class `j`
/// to `j + 1` (threshold model only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub xi: Vec<u64>,
    pub accepted_class: Option<usize>,
    pub promotions: Vec<u64>,
}

/// Builds the step record for a placement already decided.
pub(crate) fn outcome_for(
    rule: &dyn AdsorptionRule,
    k: usize,
    xi: Vec<u64>,
    placement: Placement,
) -> StepOutcome {
    let slots = xi.len();
    let mut promotions = vec![0; slots];
    let accepted_class = match placement {
        Placement::Join(class) => {
            if rule.promotes_neighbors() {
                // the new vertex is a fresh active neighbor for each of them
                for j in rule.active_classes(k) {
                    promotions[j] = xi[j];
                }
            }
            Some(class)
        }
        Placement::Block => None,
    };
    StepOutcome {
        xi,
        accepted_class,
        promotions,
    }
}

/// Scaled class counts `A_k(⌊n t_j⌋) / n` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub spec: ModelSpec,
    pub grid: TimeGrid,
    /// `alpha[j][k]` for grid time `j` and class slot `k`.
    pub alpha: Vec<Vec<f64>>,
    /// Scaled blocked count (threshold model; zero otherwise).
    pub blocked: Vec<f64>,
}

impl Trajectory {
    fn new(spec: ModelSpec, grid: TimeGrid) -> Self {
        Self {
            spec,
            grid,
            alpha: Vec::with_capacity(grid.len()),
            blocked: Vec::with_capacity(grid.len()),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.alpha.len() == self.grid.len()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()[..self.alpha.len()].to_vec()
    }

    /// Active fraction at every recorded time.
    pub fn total_active(&self) -> Vec<f64> {
        let active = self.spec.active_classes();
        self.alpha
            .iter()
            .map(|row| row[active.clone()].iter().sum())
            .collect()
    }
}

/// Final class fractions and active fraction of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct JammingSummary {
    pub per_class_final: Vec<f64>,
    pub total_active: f64,
}

pub fn jamming_summary(traj: &Trajectory) -> Result<JammingSummary> {
    if !traj.is_complete() {
        return Err(Error::State(format!(
            "trajectory has {} of {} grid points",
            traj.alpha.len(),
            traj.grid.len()
        )));
    }
    let last = traj.alpha.last().expect("grid has at least two points");
    let total_active = last[traj.spec.active_classes()].iter().sum();
    Ok(JammingSummary {
        per_class_final: last.clone(),
        total_active,
    })
}

/// Per-vertex labels of an oracle or coupled run, with its trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRun {
    pub labels: Vec<Label>,
    pub trajectory: Trajectory,
}

impl LabeledRun {
    /// Writes `vertex label` lines, vertices 1-based; threshold actives are
    /// written `active_k`.
    pub fn write_labels<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let threshold = self.trajectory.spec.kind == crate::model::ModelKind::Threshold;
        for (v, label) in self.labels.iter().enumerate() {
            match (label, threshold) {
                (Label::Class(k), true) => writeln!(out, "{} active_{k}", v + 1)?,
                _ => writeln!(out, "{} {label}", v + 1)?,
            }
        }
        Ok(())
    }
}

/// Samples the state whenever the step counter reaches a grid step.
struct Recorder {
    traj: Trajectory,
    n: usize,
    next: usize,
}

impl Recorder {
    fn new(spec: ModelSpec, grid: TimeGrid) -> Self {
        Self {
            traj: Trajectory::new(spec, grid),
            n: spec.n,
            next: 0,
        }
    }

    fn observe(&mut self, step: usize, state: &StateCounts) {
        let grid = self.traj.grid;
        let scale = 1.0 / self.n as f64;
        while self.next < grid.len() && grid.step(self.n, self.next) == step {
            self.traj
                .alpha
                .push(state.classes.iter().map(|&a| a as f64 * scale).collect());
            self.traj.blocked.push(state.blocked as f64 * scale);
            self.next += 1;
        }
    }

    fn finish(self) -> Trajectory {
        debug_assert!(self.traj.is_complete());
        self.traj
    }
}
