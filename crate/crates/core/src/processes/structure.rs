//! Structural checks of final configurations produced on explicit graphs.

use std::fmt;

use crate::graph::{GraphInstance, VertexOrder};
use crate::model::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub vertex: usize,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex {}: {}", self.vertex, self.reason)
    }
}

fn violation(vertex: usize, reason: impl Into<String>) -> Violation {
    Violation {
        vertex,
        reason: reason.into(),
    }
}

/// The active set is a maximal `K`-independent set: every active vertex has
/// fewer than `K` active neighbors, and activating any other vertex would
/// give it or one of its active neighbors `K` active neighbors. Also checks
/// that each active label equals the vertex's active degree.
pub fn check_threshold_maximal(
    graph: &GraphInstance,
    labels: &[Label],
    k: usize,
) -> Result<(), Violation> {
    let active: Vec<bool> = labels
        .iter()
        .map(|l| matches!(l, Label::Class(_)))
        .collect();
    let active_degree: Vec<usize> = (0..graph.n())
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .filter(|&&u| active[u as usize])
                .count()
        })
        .collect();
    for v in 0..graph.n() {
        match labels[v] {
            Label::Class(d) => {
                if active_degree[v] >= k {
                    return Err(violation(
                        v,
                        format!("{} active neighbors with K = {k}", active_degree[v]),
                    ));
                }
                if d as usize != active_degree[v] {
                    return Err(violation(
                        v,
                        format!("label {d} but {} active neighbors", active_degree[v]),
                    ));
                }
            }
            Label::Blocked => {
                let saturated_neighbor = graph
                    .neighbors(v)
                    .iter()
                    .any(|&u| active[u as usize] && active_degree[u as usize] + 1 >= k);
                if active_degree[v] < k && !saturated_neighbor {
                    return Err(violation(v, "blocked vertex could be activated"));
                }
            }
            Label::Unexplored => return Err(violation(v, "unexplored at the end of the run")),
        }
    }
    Ok(())
}

/// No two adjacent vertices share a frequency, and each frozen vertex sees
/// all `K` frequencies among its neighbors.
pub fn check_sfap_assignment(
    graph: &GraphInstance,
    labels: &[Label],
    k: usize,
) -> Result<(), Violation> {
    for v in 0..graph.n() {
        let Label::Class(f) = labels[v] else {
            return Err(violation(v, format!("unexpected label {}", labels[v])));
        };
        if f as usize > k {
            return Err(violation(v, format!("frequency {f} above K = {k}")));
        }
        let mut seen = vec![false; k + 1];
        for &u in graph.neighbors(v) {
            if let Label::Class(g) = labels[u as usize] {
                if f > 0 && g == f {
                    return Err(violation(v, format!("shares frequency {f} with {u}")));
                }
                seen[g as usize] = true;
            }
        }
        if f == 0 && !seen[1..].iter().all(|&s| s) {
            return Err(violation(v, "frozen with a free frequency"));
        }
    }
    Ok(())
}

/// Replays the selection order: a vertex selected when its highest
/// previously selected neighbor sat at height `m` must have height `m + 1`
/// if `m < K` and be frozen otherwise.
pub fn check_tetris_replay(
    graph: &GraphInstance,
    order: &VertexOrder,
    labels: &[Label],
    k: usize,
) -> Result<(), Violation> {
    let position = order.positions();
    for v in 0..graph.n() {
        let Label::Class(h) = labels[v] else {
            return Err(violation(v, format!("unexpected label {}", labels[v])));
        };
        let top = graph
            .neighbors(v)
            .iter()
            .map(|&u| u as usize)
            .filter(|&u| position[u] < position[v])
            .map(|u| match labels[u] {
                Label::Class(g) => g as usize,
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        let expected = if top < k { top + 1 } else { 0 };
        if h as usize != expected {
            return Err(violation(v, format!("height {h}, replay gives {expected}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> GraphInstance {
        GraphInstance::from_edges(3, 1.0, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn threshold_detects_non_maximal() {
        let g = path3();
        let labels = [Label::Class(0), Label::Blocked, Label::Blocked];
        assert_eq!(
            check_threshold_maximal(&g, &labels, 1).unwrap_err().vertex,
            2
        );
        let labels = [Label::Class(0), Label::Blocked, Label::Class(0)];
        assert!(check_threshold_maximal(&g, &labels, 1).is_ok());
    }

    #[test]
    fn threshold_detects_overfull() {
        let g = path3();
        let labels = [Label::Class(1), Label::Class(2), Label::Class(1)];
        assert!(check_threshold_maximal(&g, &labels, 2).is_err());
        assert!(check_threshold_maximal(&g, &labels, 3).is_ok());
    }

    #[test]
    fn sfap_detects_conflict_and_lazy_freeze() {
        let g = path3();
        assert!(
            check_sfap_assignment(&g, &[Label::Class(1), Label::Class(1), Label::Class(2)], 2)
                .is_err()
        );
        assert!(
            check_sfap_assignment(&g, &[Label::Class(1), Label::Class(0), Label::Class(2)], 3)
                .is_err()
        );
        assert!(
            check_sfap_assignment(&g, &[Label::Class(1), Label::Class(0), Label::Class(1)], 1)
                .is_ok()
        );
        assert!(
            check_sfap_assignment(&g, &[Label::Class(1), Label::Class(2), Label::Class(1)], 2)
                .is_ok()
        );
    }

    #[test]
    fn tetris_replay() {
        let g = path3();
        let order = VertexOrder::identity(3);
        assert!(check_tetris_replay(
            &g,
            &order,
            &[Label::Class(1), Label::Class(2), Label::Class(0)],
            2
        )
        .is_ok());
        assert!(check_tetris_replay(
            &g,
            &order,
            &[Label::Class(1), Label::Class(2), Label::Class(3)],
            3
        )
        .is_ok());
        assert!(check_tetris_replay(
            &g,
            &order,
            &[Label::Class(1), Label::Class(1), Label::Class(2)],
            2
        )
        .is_err());
    }
}
