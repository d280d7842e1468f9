use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{outcome_for, LabeledRun, Recorder, StateCounts, StepOutcome, Trajectory};
use crate::error::{Error, Result};
use crate::graph::{edge_probability, GraphInstance, VertexOrder};
use crate::grid::TimeGrid;
use crate::model::{AdsorptionRule, Label, ModelSpec, Placement};
use crate::randomness::{bernoulli, stream_rng, SeedBasis, StreamKey, StreamPurpose};

/// Decides one step of the exploration chain from the connection counts.
pub fn explore_step(rule: &dyn AdsorptionRule, k: usize, xi: Vec<u64>) -> StepOutcome {
    let placement = rule.place(&xi, k);
    outcome_for(rule, k, xi, placement)
}

fn draw_binomial<R: Rng>(rng: &mut R, trials: u64, p: f64) -> u64 {
    if trials == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        trials
    } else {
        Binomial::new(trials, p)
            .expect("p checked to lie in (0, 1)")
            .sample(rng)
    }
}

/// Counts-only exploration chain.
pub fn run_explore_counts(spec: &ModelSpec, seed: SeedBasis, grid: TimeGrid) -> Trajectory {
    run_explore_counts_observed(spec, seed, grid, |_, _| {})
}

/// As [`run_explore_counts`], calling `on_step` with the state after every step.
pub fn run_explore_counts_observed<F>(
    spec: &ModelSpec,
    seed: SeedBasis,
    grid: TimeGrid,
    mut on_step: F,
) -> Trajectory
where
    F: FnMut(&StateCounts, &StepOutcome),
{
    let rule = spec.rule();
    let p = edge_probability(spec.n, spec.c);
    let paired = rule.paired_classes(spec.k);
    let mut rng = stream_rng(&StreamKey::new(seed, StreamPurpose::BinomialDraw, 0, 0));
    let mut state = StateCounts::initial(spec);
    let mut recorder = Recorder::new(*spec, grid);
    recorder.observe(0, &state);
    for t in 1..=spec.n {
        let mut xi = vec![0u64; state.classes.len()];
        for j in paired.clone() {
            xi[j] = draw_binomial(&mut rng, state.classes[j], p);
        }
        let outcome = explore_step(rule, spec.k, xi);
        state.apply(rule, &outcome);
        on_step(&state, &outcome);
        recorder.observe(t, &state);
    }
    recorder.finish()
}

/// Exploration that reveals edges through the graph's own pair keys.
pub fn run_explore_coupled(
    graph: &GraphInstance,
    order: &VertexOrder,
    spec: &ModelSpec,
) -> Result<LabeledRun> {
    run_explore_coupled_with(graph, order, spec, graph.seed())
}

/// Coupled exploration reading edge keys from `edge_seed`. The revealed
/// graph is checked against `graph` at the end; any difference is a
/// [`Error::CouplingViolation`] naming the lowest offending vertex.
pub fn run_explore_coupled_with(
    graph: &GraphInstance,
    order: &VertexOrder,
    spec: &ModelSpec,
    edge_seed: SeedBasis,
) -> Result<LabeledRun> {
    super::direct::check_sizes(graph, order, spec)?;
    let rule = spec.rule();
    let n = spec.n;
    let p = edge_probability(n, spec.c);
    let paired = rule.paired_classes(spec.k);

    let mut labels = vec![Label::Unexplored; n];
    let mut revealed: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut selected: Vec<usize> = Vec::with_capacity(n);
    let mut state = StateCounts::initial(spec);
    let mut recorder = Recorder::new(*spec, TimeGrid::default());
    recorder.observe(0, &state);

    let mut partners = Vec::new();
    for (t, v) in order.iter().enumerate() {
        let mut xi = vec![0u64; state.classes.len()];
        partners.clear();
        // pair v with every previously selected vertex (A and B)
        for &u in &selected {
            if !bernoulli(&StreamKey::edge(edge_seed, u, v), p)? {
                continue;
            }
            revealed[u].push(v as u32);
            revealed[v].push(u as u32);
            if let Label::Class(j) = labels[u] {
                let j = j as usize;
                if paired.contains(&j) {
                    xi[j] += 1;
                    partners.push(u);
                }
            }
        }
        let outcome = explore_step(rule, spec.k, xi);
        if outcome.accepted_class.is_some() && rule.promotes_neighbors() {
            let active = rule.active_classes(spec.k);
            for &u in &partners {
                if let Label::Class(j) = labels[u] {
                    if active.contains(&(j as usize)) {
                        labels[u] = Label::Class(j + 1);
                    }
                }
            }
        }
        labels[v] = match outcome.accepted_class {
            Some(class) => Label::Class(class as u32),
            None => rule.label_for(Placement::Block),
        };
        state.apply(rule, &outcome);
        selected.push(v);
        recorder.observe(t + 1, &state);
    }

    for (v, list) in revealed.iter_mut().enumerate() {
        list.sort_unstable();
        if list.as_slice() != graph.neighbors(v) {
            return Err(Error::CouplingViolation {
                vertex: v,
                detail: format!(
                    "revealed degree {} but graph degree {}",
                    list.len(),
                    graph.degree(v)
                ),
            });
        }
    }
    Ok(LabeledRun {
        labels,
        trajectory: recorder.finish(),
    })
}
