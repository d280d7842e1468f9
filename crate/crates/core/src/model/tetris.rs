use std::ops::Range;

use super::{AdsorptionRule, Label, ModelKind, Placement};
use crate::fluid::drift_tetris;
use crate::graph::GraphInstance;

/// Heights `1..=K` in slots `1..=K`; slot 0 holds frozen vertices.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tetris;

impl AdsorptionRule for Tetris {
    fn kind(&self) -> ModelKind {
        ModelKind::Tetris
    }

    fn name(&self) -> &'static str {
        "tetris"
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
        let top = (0..=k).rev().find(|&h| xi[h] > 0).unwrap_or(0);
        if top < k {
            Placement::Join(top + 1)
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
        let top = graph
            .neighbors(v)
            .iter()
            .map(|&u| match labels[u as usize] {
                Label::Class(h) => h as usize,
                _ => 0,
            })
            .max()
            .unwrap_or(0);
        if top < k {
            Placement::Join(top + 1)
        } else {
            Placement::Block
        }
    }

    fn drift(&self, alpha: &[f64], c: f64, out: &mut [f64]) {
        drift_tetris(alpha, c, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exploration_rule() {
        assert_eq!(Tetris.place(&[0, 0, 0], 2), Placement::Join(1));
        // frozen neighbors do not raise the height
        assert_eq!(Tetris.place(&[4, 0, 0], 2), Placement::Join(1));
        assert_eq!(Tetris.place(&[0, 2, 0], 2), Placement::Join(2));
        assert_eq!(Tetris.place(&[0, 2, 1], 2), Placement::Block);
    }
}
