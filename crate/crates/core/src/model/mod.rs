//! Adsorption rules and the by-name registry that selects them.
//!
//! A rule describes one model in three forms: how an arriving vertex is
//! placed given its per-class connection counts (the exploration chain), how
//! it is placed against an explicit graph (the direct process), and the drift
//! of the limiting ODE.

mod sfap;
mod tetris;
mod threshold;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::GraphInstance;

pub use sfap::Sfap;
pub use tetris::Tetris;
pub use threshold::Threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Threshold,
    Tetris,
    Sfap,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Threshold, ModelKind::Tetris, ModelKind::Sfap];

    pub fn name(self) -> &'static str {
        self.rule().name()
    }

    pub fn rule(self) -> &'static dyn AdsorptionRule {
        match self {
            ModelKind::Threshold => &Threshold,
            ModelKind::Tetris => &Tetris,
            ModelKind::Sfap => &Sfap,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelRegistry::builtin()
            .get(s)
            .map(|rule| rule.kind())
            .ok_or_else(|| Error::param(format!("unknown model '{s}'")))
    }
}

/// Label of a vertex after (or during) a run.
///
/// Threshold: `Class(k)` is an active vertex with `k` active neighbors.
/// Tetris/SFAP: `Class(h)` is the height or frequency, `Class(0)` frozen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Unexplored,
    Class(u32),
    Blocked,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unexplored => f.write_str("unexplored"),
            Label::Class(k) => write!(f, "{k}"),
            Label::Blocked => f.write_str("blocked"),
        }
    }
}

/// Where an arriving vertex goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Join(usize),
    Block,
}

/// One adsorption model. Implementations are stateless; `k` is the model
/// parameter `K` and class indices are slots of
/// [`StateCounts::classes`](crate::processes::StateCounts).
pub trait AdsorptionRule: Send + Sync + fmt::Debug {
    fn kind(&self) -> ModelKind;

    fn name(&self) -> &'static str;

    /// Number of class slots tracked in the state.
    fn class_slots(&self, k: usize) -> usize;

    /// Slots counted as active. These are also the coordinates of the fluid
    /// limit, in order.
    fn active_classes(&self, k: usize) -> Range<usize>;

    /// Slots an arriving vertex is paired with in the counts chain.
    fn paired_classes(&self, k: usize) -> Range<usize>;

    /// Slot that receives a blocked vertex, or `None` if blocked vertices are
    /// kept in a separate counter.
    fn blocked_slot(&self) -> Option<usize>;

    /// Whether vertices connected to an accepted arrival move up one class.
    fn promotes_neighbors(&self) -> bool {
        false
    }

    /// Exploration rule: placement from per-slot connection counts `xi`
    /// (length `class_slots(k)`).
    fn place(&self, xi: &[u64], k: usize) -> Placement;

    /// Direct rule: placement of `v` on the full graph given the current labels.
    fn place_direct(
        &self,
        v: usize,
        graph: &GraphInstance,
        labels: &[Label],
        k: usize,
    ) -> Placement;

    /// Fluid drift `δ(α)`; `alpha` and `out` have length `k`.
    fn drift(&self, alpha: &[f64], c: f64, out: &mut [f64]);

    fn label_for(&self, placement: Placement) -> Label {
        match (placement, self.blocked_slot()) {
            (Placement::Join(class), _) => Label::Class(class as u32),
            (Placement::Block, Some(slot)) => Label::Class(slot as u32),
            (Placement::Block, None) => Label::Blocked,
        }
    }
}

/// Name → rule lookup.
#[derive(Debug)]
pub struct ModelRegistry {
    rules: BTreeMap<&'static str, &'static dyn AdsorptionRule>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self {
            rules: BTreeMap::new(),
        }
    }

    /// Registry holding `threshold`, `tetris` and `sfap`.
    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        for kind in ModelKind::ALL {
            registry.register(kind.rule());
        }
        registry
    }

    pub fn register(&mut self, rule: &'static dyn AdsorptionRule) {
        self.rules.insert(rule.name(), rule);
    }

    /// Case-insensitive lookup.
    pub fn get(&self, name: &str) -> Option<&'static dyn AdsorptionRule> {
        let name = name.to_ascii_lowercase();
        self.rules.get(name.as_str()).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.rules.keys().copied()
    }
}

/// Model, parameter `K`, mean degree `c` and size `n` of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub k: usize,
    pub c: f64,
    pub n: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, k: usize, c: f64, n: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("K must be ≥ 1"));
        }
        if n == 0 {
            return Err(Error::param("n must be ≥ 1"));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::param(format!("c must be finite and ≥ 0, got {c}")));
        }
        Ok(Self { kind, k, c, n })
    }

    pub fn rule(&self) -> &'static dyn AdsorptionRule {
        self.kind.rule()
    }

    pub fn class_slots(&self) -> usize {
        self.rule().class_slots(self.k)
    }

    pub fn active_classes(&self) -> Range<usize> {
        self.rule().active_classes(self.k)
    }
}
