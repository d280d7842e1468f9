use super::{outcome_for, LabeledRun, Recorder, StateCounts, StepOutcome};
use crate::error::{Error, Result};
use crate::graph::{GraphInstance, VertexOrder};
use crate::grid::TimeGrid;
use crate::model::{Label, ModelSpec, Placement};

pub(super) fn check_sizes(
    graph: &GraphInstance,
    order: &VertexOrder,
    spec: &ModelSpec,
) -> Result<()> {
    if graph.n() != spec.n || order.len() != spec.n {
        return Err(Error::param(format!(
            "size mismatch: spec n = {}, graph n = {}, order length = {}",
            spec.n,
            graph.n(),
            order.len()
        )));
    }
    if graph.c() != spec.c {
        return Err(Error::param(format!(
            "mean degree mismatch: spec c = {}, graph c = {}",
            spec.c,
            graph.c()
        )));
    }
    Ok(())
}

/// Runs the model on `graph`, selecting vertices in `order`.
pub fn run_direct(
    graph: &GraphInstance,
    order: &VertexOrder,
    spec: &ModelSpec,
) -> Result<LabeledRun> {
    run_direct_observed(graph, order, spec, |_, _| {})
}

pub fn run_direct_observed<F>(
    graph: &GraphInstance,
    order: &VertexOrder,
    spec: &ModelSpec,
    mut on_step: F,
) -> Result<LabeledRun>
where
    F: FnMut(&StateCounts, &StepOutcome),
{
    check_sizes(graph, order, spec)?;
    let rule = spec.rule();
    let mut labels = vec![Label::Unexplored; spec.n];
    let mut state = StateCounts::initial(spec);
    let mut recorder = Recorder::new(*spec, TimeGrid::default());
    recorder.observe(0, &state);

    for (t, v) in order.iter().enumerate() {
        let placement = rule.place_direct(v, graph, &labels, spec.k);
        let mut xi = vec![0u64; state.classes.len()];
        for &u in graph.neighbors(v) {
            if let Label::Class(j) = labels[u as usize] {
                xi[j as usize] += 1;
            }
        }
        if let Placement::Join(_) = placement {
            if rule.promotes_neighbors() {
                for &u in graph.neighbors(v) {
                    if let Label::Class(j) = labels[u as usize] {
                        labels[u as usize] = Label::Class(j + 1);
                    }
                }
            }
        }
        labels[v] = rule.label_for(placement);
        let outcome = outcome_for(rule, spec.k, xi, placement);
        state.apply(rule, &outcome);
        on_step(&state, &outcome);
        recorder.observe(t + 1, &state);
    }
    Ok(LabeledRun {
        labels,
        trajectory: recorder.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelKind;
    use crate::processes::jamming_summary;

    #[test]
    fn empty_graph_everyone_active() {
        for kind in ModelKind::ALL {
            let g = GraphInstance::from_edges(6, 0.0, &[]).unwrap();
            let spec = ModelSpec::new(kind, 2, 0.0, 6).unwrap();
            let run = run_direct(&g, &VertexOrder::identity(6), &spec).unwrap();
            let want = if kind == ModelKind::Threshold { 0 } else { 1 };
            assert!(
                run.labels.iter().all(|&l| l == Label::Class(want)),
                "{kind}"
            );
            assert_eq!(jamming_summary(&run.trajectory).unwrap().total_active, 1.0);
        }
    }

    #[test]
    fn hard_core_on_a_path() {
        // a - b - c, explored (b, a, c)
        let g = GraphInstance::from_edges(3, 1.0, &[(0, 1), (1, 2)]).unwrap();
        let spec = ModelSpec::new(ModelKind::Threshold, 1, 1.0, 3).unwrap();
        let order = VertexOrder::from_vec(vec![1, 0, 2]).unwrap();
        let run = run_direct(&g, &order, &spec).unwrap();
        assert_eq!(
            run.labels,
            vec![Label::Blocked, Label::Class(0), Label::Blocked]
        );
        let s = jamming_summary(&run.trajectory).unwrap();
        assert!((s.total_active - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sfap_triangle() {
        let g = GraphInstance::from_edges(3, 1.0, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let spec = ModelSpec::new(ModelKind::Sfap, 2, 1.0, 3).unwrap();
        let run = run_direct(&g, &VertexOrder::identity(3), &spec).unwrap();
        assert_eq!(
            run.labels,
            vec![Label::Class(1), Label::Class(2), Label::Class(0)]
        );
    }

    #[test]
    fn tetris_triangle_with_k2() {
        let g = GraphInstance::from_edges(3, 1.0, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let spec = ModelSpec::new(ModelKind::Tetris, 2, 1.0, 3).unwrap();
        let run = run_direct(&g, &VertexOrder::identity(3), &spec).unwrap();
        assert_eq!(
            run.labels,
            vec![Label::Class(1), Label::Class(2), Label::Class(0)]
        );
    }

    #[test]
    fn threshold_star_with_k2() {
        // centre 0 with leaves 1..=3, centre first: it accepts one leaf only.
        let g = GraphInstance::from_edges(4, 1.0, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let spec = ModelSpec::new(ModelKind::Threshold, 2, 1.0, 4).unwrap();
        let run = run_direct(&g, &VertexOrder::identity(4), &spec).unwrap();
        assert_eq!(
            run.labels,
            vec![
                Label::Class(1),
                Label::Class(1),
                Label::Blocked,
                Label::Blocked
            ]
        );
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = GraphInstance::from_edges(3, 1.0, &[]).unwrap();
        let spec = ModelSpec::new(ModelKind::Sfap, 1, 1.0, 4).unwrap();
        assert!(matches!(
            run_direct(&g, &VertexOrder::identity(4), &spec),
            Err(Error::Parameter(_))
        ));
        let spec = ModelSpec::new(ModelKind::Sfap, 1, 2.0, 3).unwrap();
        assert!(run_direct(&g, &VertexOrder::identity(3), &spec).is_err());
    }
}
