//! Generalized random sequential adsorption (RSA) on Erdős–Rényi graphs.
//!
//! Three greedy adsorption rules are provided behind the [`model::AdsorptionRule`]
//! trait and selected by name through [`model::ModelRegistry`]:
//!
//! * `threshold`: a vertex activates iff it and each of its active neighbors keep
//!   fewer than `K` active neighbors (greedy maximal `K`-independent set);
//! * `tetris`: a vertex sticks one unit above its highest neighbor, frozen when
//!   that neighbor already sits at height `K`;
//! * `sfap`: a vertex takes the lowest of `K` frequencies not used by a neighbor.
//!
//! Each rule runs in three modes (direct on a sampled graph, counts-only
//! exploration, and coupled exploration sharing edge randomness with the
//! direct run) and has a deterministic fluid limit integrated in [`fluid`].

pub mod binomial;
pub mod error;
pub mod fluid;
pub mod graph;
pub mod grid;
pub mod model;
pub mod montecarlo;
pub mod processes;
pub mod randomness;
pub mod validation;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use model::{AdsorptionRule, ModelKind, ModelRegistry, ModelSpec};
pub use randomness::SeedBasis;
