use std::ops::Range;

use super::{AdsorptionRule, Label, ModelKind, Placement};
use crate::fluid::drift_threshold;
use crate::graph::GraphInstance;

/// Greedy maximal `K`-independent set. Slots `0..K` hold active vertices by
/// their number of active neighbors; blocked vertices are counted apart.
#[derive(Debug, Clone, Copy, Default)]
pub struct Threshold;

fn is_active(label: Label) -> bool {
    matches!(label, Label::Class(_))
}

impl AdsorptionRule for Threshold {
    fn kind(&self) -> ModelKind {
        ModelKind::Threshold
    }

    fn name(&self) -> &'static str {
        "threshold"
    }

    fn class_slots(&self, k: usize) -> usize {
        k
    }

    fn active_classes(&self, k: usize) -> Range<usize> {
        0..k
    }

    fn paired_classes(&self, k: usize) -> Range<usize> {
        0..k
    }

    fn blocked_slot(&self) -> Option<usize> {
        None
    }

    fn promotes_neighbors(&self) -> bool {
        true
    }

    fn place(&self, xi: &[u64], k: usize) -> Placement {
        let r: u64 = xi[..k].iter().sum();
        if r < k as u64 && xi[k - 1] == 0 {
            Placement::Join(r as usize)
        } else {
            Placement::Block
        }
    }

    fn place_direct(
        &self,
        v: usize,
        graph: &GraphInstance,
        labels: &[Label],
        k: usize,
    ) -> Placement {
        // d_max of the active set plus v must stay below K.
        let active_degree = |u: usize| {
            graph
                .neighbors(u)
                .iter()
                .filter(|&&w| is_active(labels[w as usize]))
                .count()
        };
        let mut r = 0;
        for &u in graph.neighbors(v) {
            let u = u as usize;
            if !is_active(labels[u]) {
                continue;
            }
            r += 1;
            if active_degree(u) + 1 >= k {
                return Placement::Block;
            }
        }
        if r < k {
            Placement::Join(r)
        } else {
            Placement::Block
        }
    }

    fn drift(&self, alpha: &[f64], c: f64, out: &mut [f64]) {
        drift_threshold(alpha, c, out);
    }
}
