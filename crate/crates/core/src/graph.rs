//! Erdős–Rényi graphs `G(n, c/n)` and uniform vertex orders.
//!
//! Vertices are `0..n` internally; the edge-list dump is 1-based.

use std::io::{self, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::randomness::{bernoulli, stream_rng, uniform01, SeedBasis, StreamKey, StreamPurpose};

/// Largest `n` for which graphs are built by scanning every vertex pair.
pub const DEFAULT_PAIR_SCAN_CAP: usize = 10_000;

/// `min(c / n, 1)`.
pub fn edge_probability(n: usize, c: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (c / n as f64).min(1.0)
}

/// How the edge set of a [`GraphInstance`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every pair `{i, j}` is tested against its own edge key. Coupled
    /// explorations can reproduce these graphs exactly.
    PairScan,
    /// Geometric skips over the linear pair index. Same law, but the edges are
    /// not tied to per-pair keys.
    GeometricSkip,
}

#[derive(Debug, Clone)]
pub struct GraphInstance {
    n: usize,
    c: f64,
    adjacency: Vec<Vec<u32>>,
    seed: SeedBasis,
    sampling: Sampling,
}

impl GraphInstance {
    /// Builds a graph from an explicit edge list (0-based). Used for hand-made
    /// test graphs; the seed basis is recorded but not consulted.
    pub fn from_edges(n: usize, c: f64, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("graph must have at least one vertex"));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at {u}")));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            n,
            c,
            adjacency,
            seed: SeedBasis::default(),
            sampling: Sampling::PairScan,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn seed(&self) -> SeedBasis {
        self.seed
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    pub fn edge_probability(&self) -> f64 {
        edge_probability(self.n, self.c)
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Writes one `i j` line per edge, 1-based, `i < j`, sorted.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, j) in self.edges() {
            writeln!(out, "{} {}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

/// Samples `G(n, min(c/n, 1))` by scanning all pairs when `n` is at most
/// [`DEFAULT_PAIR_SCAN_CAP`], with geometric skipping above it.
pub fn sample_er_graph(n: usize, c: f64, seed: SeedBasis) -> Result<GraphInstance> {
    sample_er_graph_with_cap(n, c, seed, DEFAULT_PAIR_SCAN_CAP)
}

pub fn sample_er_graph_with_cap(
    n: usize,
    c: f64,
    seed: SeedBasis,
    pair_scan_cap: usize,
) -> Result<GraphInstance> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if !c.is_finite() || c < 0.0 {
        return Err(Error::param(format!(
            "c must be finite and non-negative, got {c}"
        )));
    }
    if c >= n as f64 && n > 1 {
        log::warn!("c = {c} is not below n = {n}; edge probability clamped to 1");
    }
    let p = edge_probability(n, c);
    let (adjacency, sampling) = if n <= pair_scan_cap {
        (pair_scan(n, p, seed)?, Sampling::PairScan)
    } else {
        (geometric_skip(n, p, seed), Sampling::GeometricSkip)
    };
    Ok(GraphInstance {
        n,
        c,
        adjacency,
        seed,
        sampling,
    })
}

fn pair_scan(n: usize, p: f64, seed: SeedBasis) -> Result<Vec<Vec<u32>>> {
    let mut adjacency = vec![Vec::new(); n];
    if p == 0.0 {
        return Ok(adjacency);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if bernoulli(&StreamKey::edge(seed, i, j), p)? {
                adjacency[i].push(j as u32);
                adjacency[j].push(i as u32);
            }
        }
    }
    // Rows were filled in increasing order of the partner index.
    Ok(adjacency)
}

fn geometric_skip(n: usize, p: f64, seed: SeedBasis) -> Vec<Vec<u32>> {
    let mut adjacency = vec![Vec::new(); n];
    if p == 0.0 {
        return adjacency;
    }
    // Not a valid pair key (index_a < index_b fails), so it cannot collide
    // with any per-pair stream.
    let mut rng = stream_rng(&StreamKey::new(
        seed,
        StreamPurpose::EdgePair,
        u64::MAX,
        u64::MAX,
    ));
    let log_q = (-p).ln_1p();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let skip = if p >= 1.0 {
            0
        } else {
            let u: f64 = 1.0 - rng.random::<f64>();
            (u.ln() / log_q).floor() as usize
        };
        // advance j (candidate partner of i) by skip + 1 through the upper triangle
        j += skip + 1;
        while j >= n {
            let overflow = j - n;
            i += 1;
            if i + 1 >= n {
                return adjacency;
            }
            j = i + 1 + overflow;
        }
        adjacency[i].push(j as u32);
        adjacency[j].push(i as u32);
    }
}

/// A permutation of `0..n`: `order()[t]` is the vertex selected at step `t + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrder {
    order: Vec<u32>,
}

impl VertexOrder {
    pub fn from_vec(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(Error::param("order is not a permutation"));
            }
            seen[v] = true;
        }
        Ok(Self {
            order: order.into_iter().map(|v| v as u32).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&v| v as usize)
    }

    pub fn get(&self, t: usize) -> usize {
        self.order[t] as usize
    }

    /// `positions()[v]` is the step (0-based) at which `v` is selected.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (t, &v) in self.order.iter().enumerate() {
            pos[v as usize] = t;
        }
        pos
    }
}

/// Uniform permutation via Fisher–Yates, draw `i` read from the
/// `Permutation` stream at index `i`.
pub fn sample_permutation(n: usize, seed: SeedBasis) -> Result<VertexOrder> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        let u = uniform01(&StreamKey::permutation(seed, i));
        let j = ((u * (i + 1) as f64) as usize).min(i);
        order.swap(i, j);
    }
    Ok(VertexOrder { order })
}
