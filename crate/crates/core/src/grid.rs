use crate::error::{Error, Result};

/// Default number of sample times on `[0, 1]`.
pub const DEFAULT_GRID_POINTS: usize = 101;

/// Equally spaced sample times `t_j = j / (m - 1)`, `j = 0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            points: DEFAULT_GRID_POINTS,
        }
    }
}

impl TimeGrid {
    pub fn uniform(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::param(format!(
                "grid needs at least 2 points, got {points}"
            )));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intervals(&self) -> usize {
        self.points - 1
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 / self.intervals() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.time(j)).collect()
    }

    /// `⌊n t_j⌋`, computed in integers.
    pub fn step(&self, n: usize, j: usize) -> usize {
        ((n as u128 * j as u128) / self.intervals() as u128) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_steps_are_exact() {
        let g = TimeGrid::uniform(101).unwrap();
        assert_eq!(g.step(1000, 100), 1000);
        assert_eq!(g.step(1000, 7), 70);
        assert_eq!(g.step(3, 50), 1);
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(100), 1.0);
    }

    #[test]
    fn rejects_single_point() {
        assert!(TimeGrid::uniform(1).is_err());
    }
}
