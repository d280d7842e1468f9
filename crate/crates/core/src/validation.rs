//! Self-checks: coupled exploration against the direct process, and the
//! conditional binomial mean against exhaustive enumeration.

use rand::Rng;
use rayon::prelude::*;

use crate::binomial::{
    conditional_binomial_mean, conditional_second_factorial_bound, BinomialFamily,
};
use crate::error::{Error, Result};
use crate::graph::{sample_er_graph, sample_permutation};
use crate::model::{ModelKind, ModelSpec};
use crate::processes::{run_direct, run_explore_coupled_with};
use crate::randomness::{stream_rng, SeedBasis, StreamKey, StreamPurpose};

pub const MAX_TRIAL_N: usize = 200;
pub const MAX_TRIAL_C: f64 = 8.0;
pub const MAX_TRIAL_K: usize = 4;

/// One coupling trial: a model instance and the seed its graph and order
/// are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTrial {
    pub spec: ModelSpec,
    pub seed: SeedBasis,
}

/// Trial `index` for `kind`, derived from `base_seed`: `n ≤ 200`, `c ≤ 8`, `K ≤ 4`.
pub fn coupling_trial(kind: ModelKind, base_seed: u64, index: u64) -> CouplingTrial {
    let seed = SeedBasis::new(base_seed, index);
    let tag = ModelKind::ALL.iter().position(|&m| m == kind).unwrap_or(0) as u64;
    let mut rng = stream_rng(&StreamKey::new(
        seed,
        StreamPurpose::BinomialDraw,
        u64::MAX,
        tag,
    ));
    let n = rng.random_range(1..=MAX_TRIAL_N);
    let c = rng.random_range(0.0..=MAX_TRIAL_C);
    let k = rng.random_range(1..=MAX_TRIAL_K);
    let spec = ModelSpec::new(kind, k, c, n).expect("trial parameters are in range");
    CouplingTrial { spec, seed }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingOutcome {
    Match,
    /// Lowest vertex whose label or revealed neighborhood differs.
    Mismatch {
        vertex: usize,
        detail: String,
    },
}

/// Runs the direct process and the coupled exploration on the same graph
/// and order. With `corrupt_edge_keys` the exploration reads its edges from
/// a different replication, which must be caught.
pub fn check_coupling(trial: &CouplingTrial, corrupt_edge_keys: bool) -> Result<CouplingOutcome> {
    let spec = &trial.spec;
    let graph = sample_er_graph(spec.n, spec.c, trial.seed)?;
    let order = sample_permutation(spec.n, trial.seed)?;
    let direct = run_direct(&graph, &order, spec)?;
    let mut edge_seed = trial.seed;
    if corrupt_edge_keys {
        edge_seed.replication ^= 1 << 63;
    }
    let coupled = match run_explore_coupled_with(&graph, &order, spec, edge_seed) {
        Ok(run) => run,
        Err(Error::CouplingViolation { vertex, detail }) => {
            return Ok(CouplingOutcome::Mismatch { vertex, detail })
        }
        Err(e) => return Err(e),
    };
    let first = direct
        .labels
        .iter()
        .zip(&coupled.labels)
        .position(|(a, b)| a != b);
    Ok(match first {
        None => CouplingOutcome::Match,
        Some(v) => CouplingOutcome::Mismatch {
            vertex: v,
            detail: format!(
                "direct {} vs coupled {}",
                direct.labels[v], coupled.labels[v]
            ),
        },
    })
}

/// Summary of a coupling sweep over one model.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub kind: ModelKind,
    pub trials: u64,
    pub mismatches: u64,
    /// First failing trial and vertex.
    pub first_failure: Option<(CouplingTrial, usize, String)>,
}

impl CouplingReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Trials run on the current rayon pool; the report is assembled in trial
/// order.
pub fn coupling_sweep(
    kind: ModelKind,
    trials: u64,
    base_seed: u64,
    corrupt_edge_keys: bool,
) -> Result<CouplingReport> {
    let outcomes: Vec<(CouplingTrial, CouplingOutcome)> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial = coupling_trial(kind, base_seed, index);
            check_coupling(&trial, corrupt_edge_keys).map(|o| (trial, o))
        })
        .collect::<Result<_>>()?;
    let mut report = CouplingReport {
        kind,
        trials,
        mismatches: 0,
        first_failure: None,
    };
    for (trial, outcome) in outcomes {
        if let CouplingOutcome::Mismatch { vertex, detail } = outcome {
            report.mismatches += 1;
            if report.first_failure.is_none() {
                report.first_failure = Some((trial, vertex, detail));
            }
        }
    }
    Ok(report)
}

pub const ENUMERATION_PROBABILITIES: [f64; 3] = [0.1, 0.5, 0.9];
pub const MAX_ENUMERATION_TOTAL: u64 = 12;
pub const MAX_ENUMERATION_PARTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnumerationReport {
    pub cases: u64,
    /// Largest `|formula - enumeration|` of the conditional mean.
    pub max_mean_error: f64,
    /// Cases where the enumerated second factorial moment exceeds the bound.
    pub bound_failures: u64,
}

impl EnumerationReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_mean_error <= tol && self.bound_failures == 0
    }
}

fn choose(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// All size vectors of length `1..=parts` with positive entries and total
/// at most `max_total`.
fn size_vectors(max_total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, left: u64, parts: usize, out: &mut Vec<Vec<u64>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == parts {
            return;
        }
        for s in 1..=left {
            prefix.push(s);
            extend(prefix, left - s, parts, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max_total, parts, &mut out);
    out
}

/// `(P(sum ≤ bound), E[X_i 1{..}], E[X_i(X_i-1) 1{..}])` by summing over
/// every joint outcome.
fn enumerate(sizes: &[u64], p: f64, bound: u64, i: usize) -> (f64, f64, f64) {
    let mut x = vec![0u64; sizes.len()];
    let (mut mass, mut first, mut second) = (0.0, 0.0, 0.0);
    loop {
        let sum: u64 = x.iter().sum();
        if sum <= bound {
            let prob: f64 = sizes
                .iter()
                .zip(&x)
                .map(|(&n, &k)| choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
                .product();
            let xi = x[i] as f64;
            mass += prob;
            first += xi * prob;
            second += xi * (xi - 1.0) * prob;
        }
        // odometer over 0..=sizes[j]
        let mut j = 0;
        loop {
            if j == x.len() {
                return (mass, first, second);
            }
            if x[j] < sizes[j] {
                x[j] += 1;
                break;
            }
            x[j] = 0;
            j += 1;
        }
    }
}

/// Checks the conditional mean and the second factorial moment bound for
/// every size vector with total ≤ 12 and at most 3 parts, every
/// `p ∈ {0.1, 0.5, 0.9}`, every bound `1..=N` and every index.
pub fn conditional_mean_enumeration() -> Result<EnumerationReport> {
    let mut report = EnumerationReport::default();
    for sizes in size_vectors(MAX_ENUMERATION_TOTAL, MAX_ENUMERATION_PARTS) {
        let total: u64 = sizes.iter().sum();
        for p in ENUMERATION_PROBABILITIES {
            let fam = BinomialFamily::new(sizes.clone(), p)?;
            for bound in 1..=total {
                for i in 0..sizes.len() {
                    let (mass, first, second) = enumerate(&sizes, p, bound, i);
                    let mean = conditional_binomial_mean(&fam, bound, i)?;
                    let cap = conditional_second_factorial_bound(&fam, bound, i)?;
                    report.cases += 1;
                    report.max_mean_error = report.max_mean_error.max((mean - first / mass).abs());
                    if second / mass > cap * (1.0 + 1e-12) + 1e-15 {
                        report.bound_failures += 1;
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_stay_in_range_and_are_reproducible() {
        for kind in ModelKind::ALL {
            for i in 0..200 {
                let t = coupling_trial(kind, 5, i);
                assert!(t.spec.n >= 1 && t.spec.n <= MAX_TRIAL_N);
                assert!(t.spec.c >= 0.0 && t.spec.c <= MAX_TRIAL_C);
                assert!(t.spec.k >= 1 && t.spec.k <= MAX_TRIAL_K);
                assert_eq!(t, coupling_trial(kind, 5, i));
            }
        }
    }

    #[test]
    fn short_sweep_matches() {
        for kind in ModelKind::ALL {
            let r = coupling_sweep(kind, 40, 1, false).unwrap();
            assert!(r.passed(), "{kind}: {:?}", r.first_failure);
        }
    }

    #[test]
    fn corrupted_keys_are_caught() {
        let r = coupling_sweep(ModelKind::Threshold, 40, 1, true).unwrap();
        assert!(r.mismatches > 30);
        assert!(r.first_failure.is_some());
    }

    #[test]
    fn size_vectors_count() {
        // compositions of totals ≤ 3 into at most 2 parts: 1, 2, 11, 3, 12, 21
        assert_eq!(size_vectors(3, 2).len(), 6);
    }

    #[test]
    fn enumeration_helper_sanity() {
        let (mass, first, _) = enumerate(&[2, 1], 0.5, 1, 0);
        assert!((mass - 0.5).abs() < 1e-15);
        assert!((first / mass - 0.5).abs() < 1e-15);
    }
}
