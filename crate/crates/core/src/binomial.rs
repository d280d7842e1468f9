//! Binomial probabilities, conditional binomial moments, and the exact
//! one-step drift of the threshold chain at finite `n`.

use crate::error::{Error, Result};
use crate::graph::edge_probability;
use crate::model::{ModelKind, ModelSpec};
use crate::processes::StateCounts;
use crate::randomness::check_probability;

/// Terms `P(Bin(n, p) = j)` for `j = 0..=last`, by the ratio recurrence
/// carried in log space.
fn pmf_terms(n: u64, p: f64, last: u64) -> impl Iterator<Item = f64> {
    let log_p = p.ln();
    let log_q = (-p).ln_1p();
    let mut log_choose = 0.0f64;
    (0..=last.min(n)).map(move |j| {
        if j > 0 {
            log_choose += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        let jf = j as f64;
        let log_term = log_choose
            + if j == 0 { 0.0 } else { jf * log_p }
            + if j == n { 0.0 } else { (n - j) as f64 * log_q };
        log_term.exp()
    })
}

/// `P(Bin(n, p) = k)`.
pub fn binom_pmf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_probability(p)?;
    if k < 0 || k as u64 > n {
        return Ok(0.0);
    }
    let k = k as u64;
    Ok(if p == 0.0 {
        if k == 0 {
            1.0
        } else {
            0.0
        }
    } else if p == 1.0 {
        if k == n {
            1.0
        } else {
            0.0
        }
    } else {
        pmf_terms(n, p, k).last().unwrap_or(0.0)
    })
}

/// `P(Bin(n, p) ≤ k)`; `0` for `k < 0` and `1` for `k ≥ n`.
pub fn binom_cdf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_probability(p)?;
    if k < 0 {
        return Ok(0.0);
    }
    let k = k as u64;
    if k >= n {
        return Ok(1.0);
    }
    Ok(if p == 0.0 {
        1.0
    } else if p == 1.0 {
        0.0
    } else {
        pmf_terms(n, p, k).sum::<f64>().min(1.0)
    })
}

/// Independent `X_i ~ Bin(sizes[i], p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialFamily {
    sizes: Vec<u64>,
    p: f64,
}

impl BinomialFamily {
    pub fn new(sizes: Vec<u64>, p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { sizes, p })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }

    fn check(&self, bound: u64, i: usize) -> Result<f64> {
        let total = self.total();
        if bound < 1 || bound > total {
            return Err(Error::param(format!("R = {bound} outside 1..={total}")));
        }
        if i >= self.sizes.len() {
            return Err(Error::param(format!("index {i} out of range")));
        }
        let event = binom_cdf(total, self.p, bound as i64)?;
        if event <= 0.0 {
            return Err(Error::Domain(format!("P(sum ≤ {bound}) is zero")));
        }
        Ok(event)
    }
}

/// `E[X_i | X_1 + ... + X_r ≤ R] = n_i p P(Z_1 ≤ R - 1) / P(Z_2 ≤ R)` with
/// `Z_1 ~ Bin(N - 1, p)`, `Z_2 ~ Bin(N, p)`, `N = Σ n_j`.
pub fn conditional_binomial_mean(fam: &BinomialFamily, bound: u64, i: usize) -> Result<f64> {
    let event = fam.check(bound, i)?;
    let total = fam.total();
    let shifted = binom_cdf(total - 1, fam.p, bound as i64 - 1)?;
    Ok(fam.sizes[i] as f64 * fam.p * shifted / event)
}

/// Upper bound `n_i (n_i - 1) p² / P(Z_2 ≤ R)` on
/// `E[X_i (X_i - 1) | X_1 + ... + X_r ≤ R]`.
pub fn conditional_second_factorial_bound(
    fam: &BinomialFamily,
    bound: u64,
    i: usize,
) -> Result<f64> {
    let event = fam.check(bound, i)?;
    let ni = fam.sizes[i] as f64;
    Ok(ni * (ni - 1.0) * fam.p * fam.p / event)
}

/// Expected one-step change `E[A_k(t+1) - A_k(t) | A(t)]` of the threshold
/// chain, for `k = 0..K`.
pub fn finite_n_drift_threshold(counts: &StateCounts, spec: &ModelSpec) -> Result<Vec<f64>> {
    if spec.kind != ModelKind::Threshold {
        return Err(Error::param(format!(
            "drift is for the threshold model, got {}",
            spec.kind
        )));
    }
    let k = spec.k;
    if counts.classes.len() != k {
        return Err(Error::param(format!(
            "expected {k} class counts, got {}",
            counts.classes.len()
        )));
    }
    let a = &counts.classes;
    let p = edge_probability(spec.n, spec.c);
    // vertices that may still receive a neighbor: classes 0..=K-2
    let lower: u64 = a[..k - 1].iter().sum();
    let clear_top = (1.0 - p).powf(a[k - 1] as f64);
    let accept_edge = if k >= 2 && lower >= 1 {
        p * clear_top * binom_cdf(lower - 1, p, k as i64 - 2)?
    } else {
        0.0
    };
    let mut drift = Vec::with_capacity(k);
    for class in 0..k {
        let gained = if class == 0 { 0 } else { a[class - 1] };
        // vertices in the top class are never promoted out on acceptance
        let lost = if class + 1 < k { a[class] } else { 0 };
        let moved = (gained as f64 - lost as f64) * accept_edge;
        let joined = binom_pmf(lower, p, class as i64)? * clear_top;
        drift.push(moved + joined);
    }
    Ok(drift)
}
