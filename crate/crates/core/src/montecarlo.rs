//! Independent replications and their comparison with the fluid limit.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fluid::FluidSolution;
use crate::graph::{sample_er_graph, sample_permutation};
use crate::grid::TimeGrid;
use crate::model::ModelSpec;
use crate::processes::{run_direct, run_explore_counts, Trajectory};
use crate::randomness::SeedBasis;

/// How each replication is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimulationMode {
    /// Counts-only exploration chain.
    #[default]
    Counts,
    /// Sample the graph and a vertex order, then run the direct process.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub spec: ModelSpec,
    pub reps: usize,
    pub grid: TimeGrid,
    /// `mean_alpha[j][k]` over replications, per grid time and class slot.
    pub mean_alpha: Vec<Vec<f64>>,
    pub stderr_alpha: Vec<Vec<f64>>,
    /// Mean and standard error of the active fraction at each grid time.
    pub mean_total: Vec<f64>,
    pub stderr_total: Vec<f64>,
    pub mean_total_active: f64,
    pub stderr_total_active: f64,
}

impl EnsembleResult {
    /// Wraps a fluid solution as a one-replication ensemble. Only the active
    /// slots are filled.
    pub fn from_fluid(fl: &FluidSolution, n: usize) -> Result<Self> {
        let spec = ModelSpec::new(fl.kind, fl.k, fl.c, n)?;
        let slots = spec.class_slots();
        let offset = spec.active_classes().start;
        let mean_alpha: Vec<Vec<f64>> = fl
            .alpha
            .iter()
            .map(|row| {
                let mut full = vec![0.0; slots];
                full[offset..offset + row.len()].copy_from_slice(row);
                full
            })
            .collect();
        let zeros = vec![vec![0.0; slots]; mean_alpha.len()];
        let mean_total = fl.total_active();
        let last = *mean_total.last().expect("non-empty grid");
        Ok(Self {
            spec,
            reps: 1,
            grid: fl.grid,
            stderr_alpha: zeros,
            stderr_total: vec![0.0; mean_total.len()],
            mean_alpha,
            mean_total,
            mean_total_active: last,
            stderr_total_active: 0.0,
        })
    }
}

/// Mean and standard error (unbiased sample variance; zero for one sample).
fn mean_stderr(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_one(
    spec: &ModelSpec,
    seed: SeedBasis,
    grid: TimeGrid,
    mode: SimulationMode,
) -> Result<Trajectory> {
    match mode {
        SimulationMode::Counts => Ok(run_explore_counts(spec, seed, grid)),
        SimulationMode::Direct => {
            if grid != TimeGrid::default() {
                return Err(Error::param("direct runs record on the default grid"));
            }
            let graph = sample_er_graph(spec.n, spec.c, seed)?;
            let order = sample_permutation(spec.n, seed)?;
            Ok(run_direct(&graph, &order, spec)?.trajectory)
        }
    }
}

/// Runs `reps` counts-chain replications; replication `r` uses seed basis
/// `(base_seed, r)`.
pub fn run_ensemble(
    spec: &ModelSpec,
    reps: usize,
    base_seed: u64,
    grid: TimeGrid,
) -> Result<EnsembleResult> {
    run_ensemble_mode(spec, reps, base_seed, grid, SimulationMode::Counts)
}

/// Replications run on the current rayon pool; results are aggregated in
/// replication order, so the output does not depend on the schedule.
pub fn run_ensemble_mode(
    spec: &ModelSpec,
    reps: usize,
    base_seed: u64,
    grid: TimeGrid,
    mode: SimulationMode,
) -> Result<EnsembleResult> {
    if reps == 0 {
        return Err(Error::param("reps must be ≥ 1"));
    }
    let runs: Vec<Trajectory> = (0..reps)
        .into_par_iter()
        .map(|r| run_one(spec, SeedBasis::new(base_seed, r as u64), grid, mode))
        .collect::<Result<_>>()?;
    Ok(aggregate(spec, grid, &runs))
}

fn aggregate(spec: &ModelSpec, grid: TimeGrid, runs: &[Trajectory]) -> EnsembleResult {
    let slots = spec.class_slots();
    let points = grid.len();
    let mut mean_alpha = vec![vec![0.0; slots]; points];
    let mut stderr_alpha = vec![vec![0.0; slots]; points];
    for j in 0..points {
        for k in 0..slots {
            let (m, s) = mean_stderr(runs.iter().map(|r| r.alpha[j][k]));
            mean_alpha[j][k] = m;
            stderr_alpha[j][k] = s;
        }
    }
    let totals: Vec<Vec<f64>> = runs.iter().map(Trajectory::total_active).collect();
    let (mean_total, stderr_total): (Vec<f64>, Vec<f64>) = (0..points)
        .map(|j| mean_stderr(totals.iter().map(|t| t[j])))
        .unzip();
    EnsembleResult {
        spec: *spec,
        reps: runs.len(),
        grid,
        mean_alpha,
        stderr_alpha,
        mean_total_active: mean_total[points - 1],
        stderr_total_active: stderr_total[points - 1],
        mean_total,
        stderr_total,
    }
}

/// `sup_{j, k} |mean α_k(t_j) - α_k(t_j)|` over the fluid coordinates.
pub fn deviation_from_fluid(ens: &EnsembleResult, fl: &FluidSolution) -> Result<f64> {
    if ens.spec.kind != fl.kind || ens.spec.k != fl.k || ens.spec.c != fl.c {
        return Err(Error::param(format!(
            "spec mismatch: ensemble ({}, K={}, c={}) vs fluid ({}, K={}, c={})",
            ens.spec.kind, ens.spec.k, ens.spec.c, fl.kind, fl.k, fl.c
        )));
    }
    if ens.grid != fl.grid {
        return Err(Error::param(format!(
            "grid mismatch: {} vs {} points",
            ens.grid.len(),
            fl.grid.len()
        )));
    }
    let offset = ens.spec.active_classes().start;
    let mut worst = 0.0f64;
    for (sim, lim) in ens.mean_alpha.iter().zip(&fl.alpha) {
        for (i, a) in lim.iter().enumerate() {
            worst = worst.max((sim[offset + i] - a).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluid::{integrate, DEFAULT_STEP};
    use crate::model::ModelKind;
    use crate::processes::jamming_summary;

    #[test]
    fn single_replication_has_zero_stderr() {
        let spec = ModelSpec::new(ModelKind::Tetris, 2, 2.0, 500).unwrap();
        let ens = run_ensemble(&spec, 1, 3, TimeGrid::default()).unwrap();
        let traj = run_explore_counts(&spec, SeedBasis::new(3, 0), TimeGrid::default());
        assert_eq!(ens.mean_alpha, traj.alpha);
        assert!(ens.stderr_alpha.iter().flatten().all(|&s| s == 0.0));
        assert_eq!(ens.stderr_total_active, 0.0);
        assert_eq!(
            ens.mean_total_active,
            jamming_summary(&traj).unwrap().total_active
        );
    }

    #[test]
    fn zero_reps_rejected() {
        let spec = ModelSpec::new(ModelKind::Sfap, 1, 1.0, 10).unwrap();
        assert!(run_ensemble(&spec, 0, 0, TimeGrid::default()).is_err());
    }

    #[test]
    fn deterministic_and_schedule_independent() {
        let spec = ModelSpec::new(ModelKind::Threshold, 2, 3.0, 2000).unwrap();
        let a = run_ensemble(&spec, 8, 99, TimeGrid::default()).unwrap();
        let b = run_ensemble(&spec, 8, 99, TimeGrid::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool
            .install(|| run_ensemble(&spec, 8, 99, TimeGrid::default()))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn fluid_against_itself() {
        let fl = integrate(ModelKind::Tetris, 3, 2.0, 1e-3).unwrap();
        let ens = EnsembleResult::from_fluid(&fl, 1000).unwrap();
        assert_eq!(deviation_from_fluid(&ens, &fl).unwrap(), 0.0);
    }

    #[test]
    fn mismatch_rejected() {
        let fl = integrate(ModelKind::Tetris, 3, 2.0, 1e-3).unwrap();
        let other = integrate(ModelKind::Sfap, 3, 2.0, 1e-3).unwrap();
        let ens = EnsembleResult::from_fluid(&fl, 1000).unwrap();
        assert!(deviation_from_fluid(&ens, &other).is_err());
        let coarse = crate::fluid::integrate_on(
            ModelKind::Tetris,
            3,
            2.0,
            1e-3,
            TimeGrid::uniform(11).unwrap(),
        )
        .unwrap();
        assert!(deviation_from_fluid(&ens, &coarse).is_err());
    }

    #[test]
    fn hard_core_ensemble_mean() {
        let spec = ModelSpec::new(ModelKind::Threshold, 1, 1.0, 10_000).unwrap();
        let ens = run_ensemble(&spec, 20, 0, TimeGrid::default()).unwrap();
        assert!((ens.mean_total_active - 2f64.ln()).abs() < 0.01);
        let fl = integrate(ModelKind::Threshold, 1, 1.0, DEFAULT_STEP).unwrap();
        assert!(deviation_from_fluid(&ens, &fl).unwrap() < 0.01);
    }
}
