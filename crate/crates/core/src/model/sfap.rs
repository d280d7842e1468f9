use std::ops::Range;

use super::{AdsorptionRule, Label, ModelKind, Placement};
use crate::fluid::drift_sfap;
use crate::graph::GraphInstance;

/// Frequencies `1..=K` in slots `1..=K`; slot 0 holds frozen vertices.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sfap;

impl AdsorptionRule for Sfap {
    fn kind(&self) -> ModelKind {
        ModelKind::Sfap
    }

    fn name(&self) -> &'static str {
        "sfap"
    }

    fn class_slots(&self, k: usize) -> usize {
        k + 1
    }

    fn active_classes(&self, k: usize) -> Range<usize> {
        1..k + 1
    }

    fn paired_classes(&self, k: usize) -> Range<usize> {
        0..k + 1
    }

    fn blocked_slot(&self) -> Option<usize> {
        Some(0)
    }

    fn place(&self, xi: &[u64], k: usize) -> Placement {
        match (1..=k).find(|&f| xi[f] == 0) {
            Some(f) => Placement::Join(f),
            None => Placement::Block,
        }
    }

    fn place_direct(
        &self,
        v: usize,
        graph: &GraphInstance,
        labels: &[Label],
        k: usize,
    ) -> Placement {
        let mut used = vec![false; k + 1];
        for &u in graph.neighbors(v) {
            if let Label::Class(f) = labels[u as usize] {
                used[f as usize] = true;
            }
        }
        match (1..=k).find(|&f| !used[f]) {
            Some(f) => Placement::Join(f),
            None => Placement::Block,
        }
    }

    fn drift(&self, alpha: &[f64], c: f64, out: &mut [f64]) {
        drift_sfap(alpha, c, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exploration_rule() {
        assert_eq!(Sfap.place(&[5, 0, 0], 2), Placement::Join(1));
        assert_eq!(Sfap.place(&[0, 1, 0], 2), Placement::Join(2));
        // the lowest free frequency, even when a higher one is taken
        assert_eq!(Sfap.place(&[0, 0, 3], 2), Placement::Join(1));
        assert_eq!(Sfap.place(&[0, 1, 1], 2), Placement::Block);
    }
}
