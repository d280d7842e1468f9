//! Fluid limits: drift functions, a fixed-step RK4 integrator on `[0, 1]`,
//! closed forms, jamming constants and the tetris height-crossing finder.
//!
//! Fluid coordinates follow each rule's active classes: threshold `α_0..α_{K-1}`
//! (active vertices by number of active neighbors), tetris and SFAP
//! `α_1..α_K` (heights / frequencies) stored at indices `0..K`.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::model::ModelKind;

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 5e-5;
/// Largest step `integrate` accepts.
pub const MAX_STEP: f64 = 0.01;

/// Threshold drift. With `s = α_0 + ... + α_{K-1}`, `l = α_0 + ... + α_{K-2}`,
/// `E = e^{-cs}` and `P = Σ_{r=0}^{K-2} (cl)^r / r!`:
///
/// ```text
/// δ_0     = -c α_0 E P + E
/// δ_k     = c (α_{k-1} - α_k) E P + E (cl)^k / k!     1 ≤ k ≤ K-2
/// δ_{K-1} = c α_{K-2} E P + E (cl)^{K-1} / (K-1)!
/// ```
///
/// For `K = 1` only the first line applies and `P = 0`, so `δ_0 = e^{-cα_0}`.
pub fn drift_threshold(alpha: &[f64], c: f64, out: &mut [f64]) {
    let k = alpha.len();
    debug_assert_eq!(out.len(), k);
    let total: f64 = alpha.iter().sum();
    let lower: f64 = alpha[..k - 1].iter().sum();
    let clear = (-c * total).exp();
    let x = c * lower;
    // poisson weights x^r / r!, r = 0..K-1
    let mut weights = Vec::with_capacity(k);
    let mut w = 1.0;
    for r in 0..k {
        if r > 0 {
            w *= x / r as f64;
        }
        weights.push(w);
    }
    let accept = clear * weights[..k - 1].iter().sum::<f64>();
    if k == 1 {
        out[0] = clear;
        return;
    }
    out[0] = -c * alpha[0] * accept + clear;
    for j in 1..k - 1 {
        out[j] = c * (alpha[j - 1] - alpha[j]) * accept + clear * weights[j];
    }
    out[k - 1] = c * alpha[k - 2] * accept + clear * weights[k - 1];
}

/// Tetris drift: `δ_1 = e^{-c(α_1+...+α_K)}`,
/// `δ_k = (1 - e^{-cα_{k-1}}) e^{-c(α_k+...+α_K)}` for `k ≥ 2`.
pub fn drift_tetris(alpha: &[f64], c: f64, out: &mut [f64]) {
    let k = alpha.len();
    let mut tail = 0.0;
    for j in (0..k).rev() {
        tail += alpha[j];
        let reach = if j == 0 {
            1.0
        } else {
            -(-c * alpha[j - 1]).exp_m1()
        };
        out[j] = reach * (-c * tail).exp();
    }
}

/// SFAP drift: `δ_k = e^{-cα_k} Π_{r<k} (1 - e^{-cα_r})`.
pub fn drift_sfap(alpha: &[f64], c: f64, out: &mut [f64]) {
    let mut blocked_below = 1.0;
    for (j, &a) in alpha.iter().enumerate() {
        out[j] = (-c * a).exp() * blocked_below;
        blocked_below *= -(-c * a).exp_m1();
    }
}

/// Solution `α(t)` of the fluid limit sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidSolution {
    pub kind: ModelKind,
    pub k: usize,
    pub c: f64,
    pub grid: TimeGrid,
    /// `alpha[j][i]`: coordinate `i` at grid time `j`.
    pub alpha: Vec<Vec<f64>>,
    /// Largest RK4 step actually taken.
    pub step: f64,
}

impl FluidSolution {
    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    pub fn final_alpha(&self) -> &[f64] {
        self.alpha.last().expect("grid has at least two points")
    }

    pub fn total_active(&self) -> Vec<f64> {
        self.alpha.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn jamming_constant(&self) -> f64 {
        self.final_alpha().iter().sum()
    }
}

fn rk4_step<F: Fn(&[f64], &mut [f64])>(f: &F, y: &mut [f64], h: f64, scratch: &mut [Vec<f64>; 5]) {
    let [k1, k2, k3, k4, tmp] = scratch;
    let n = y.len();
    f(y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(tmp, k4);
    for i in 0..n {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn check_inputs(k: usize, c: f64, step: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::param("K must be ≥ 1"));
    }
    if !c.is_finite() || c < 0.0 {
        return Err(Error::param(format!("c must be finite and ≥ 0, got {c}")));
    }
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(Error::param(format!(
            "step must lie in (0, {MAX_STEP}], got {step}"
        )));
    }
    Ok(())
}

/// Integrates `α' = δ(α)`, `α(0) = 0` on the default 101-point grid.
pub fn integrate(kind: ModelKind, k: usize, c: f64, step: f64) -> Result<FluidSolution> {
    integrate_on(kind, k, c, step, TimeGrid::default())
}

/// Fixed-step RK4 on each grid interval, with the number of substeps chosen
/// so that no step exceeds `step`.
pub fn integrate_on(
    kind: ModelKind,
    k: usize,
    c: f64,
    step: f64,
    grid: TimeGrid,
) -> Result<FluidSolution> {
    check_inputs(k, c, step)?;
    let rule = kind.rule();
    let drift = |a: &[f64], out: &mut [f64]| rule.drift(a, c, out);
    let spacing = 1.0 / grid.intervals() as f64;
    let substeps = (spacing / step - 1e-9).ceil().max(1.0) as usize;
    let h = spacing / substeps as f64;

    let mut y = vec![0.0; k];
    let mut scratch: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; k]);
    let mut alpha = Vec::with_capacity(grid.len());
    alpha.push(y.clone());
    for _ in 0..grid.intervals() {
        for _ in 0..substeps {
            rk4_step(&drift, &mut y, h, &mut scratch);
        }
        alpha.push(y.clone());
    }
    Ok(FluidSolution {
        kind,
        k,
        c,
        grid,
        alpha,
        step: h,
    })
}

/// Jamming constant: sum of the active coordinates at `t = 1`.
pub fn jamming_constant(kind: ModelKind, k: usize, c: f64, step: f64) -> Result<f64> {
    Ok(final_alpha(kind, k, c, step)?.iter().sum())
}

/// `α(1)` only.
pub fn final_alpha(kind: ModelKind, k: usize, c: f64, step: f64) -> Result<Vec<f64>> {
    let sol = integrate_on(kind, k, c, step, TimeGrid::uniform(2)?)?;
    Ok(sol.final_alpha().to_vec())
}

/// Closed-form SFAP solution: `α_1(t) = log(1 + ct)/c` and
/// `α_i(t) = log(e^{cα_{i-1}} - cα_{i-1})/c`. At `c = 0` the limit
/// `α_1 = t`, `α_i = 0` is returned.
pub fn sfap_closed_form(c: f64, k: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    if c == 0.0 {
        out.push(t);
        out.resize(k, 0.0);
        out.truncate(k);
        return out;
    }
    let mut prev = (c * t).ln_1p() / c;
    for i in 0..k {
        if i > 0 {
            let x = c * prev;
            // e^x - x = 1 + (expm1(x) - x)
            prev = (x.exp_m1() - x).ln_1p() / c;
        }
        out.push(prev);
    }
    out
}

/// `log(1 + c)/c`, equal to 1 at `c = 0`.
pub fn threshold_k1_jamming(c: f64) -> f64 {
    if c == 0.0 {
        1.0
    } else {
        c.ln_1p() / c
    }
}

/// Finds the `c` at which heights `low` and `high` of the tetris model have
/// equal jamming densities, by bisection on
/// `g(c) = α_low(1; c) - α_high(1; c)` until the bracket is narrower than `tol`.
pub fn tetris_crossing(
    k: usize,
    low: usize,
    high: usize,
    bracket: (f64, f64),
    tol: f64,
    step: f64,
) -> Result<f64> {
    if low == high || low == 0 || high == 0 || low > k || high > k {
        return Err(Error::param(format!(
            "classes must be two distinct heights in 1..={k}, got {low} and {high}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tolerance must be positive"));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::param(format!("invalid bracket [{lo}, {hi}]")));
    }
    let g = |c: f64| -> Result<f64> {
        let a = final_alpha(ModelKind::Tetris, k, c, step)?;
        Ok(a[low - 1] - a[high - 1])
    };
    let mut g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if lo == hi || g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket(format!(
            "α_{low} - α_{high} does not change sign on [{lo}, {hi}] ({g_lo:.3e}, {g_hi:.3e})"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drift(kind: ModelKind, alpha: &[f64], c: f64) -> Vec<f64> {
        let mut out = vec![0.0; alpha.len()];
        kind.rule().drift(alpha, c, &mut out);
        out
    }

    #[test]
    fn zero_state_drift_is_unit_vector() {
        for kind in ModelKind::ALL {
            for k in 1..=5 {
                let d = drift(kind, &vec![0.0; k], 3.0);
                let mut want = vec![0.0; k];
                want[0] = 1.0;
                assert_eq!(d, want, "{kind} K={k}");
            }
        }
    }

    #[test]
    fn threshold_k1_drift() {
        let d = drift(ModelKind::Threshold, &[0.3], 2.0);
        assert!((d[0] - (-0.6f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn threshold_drift_sum_identity() {
        let alpha = [0.2, 0.1, 0.05];
        let d = drift(ModelKind::Threshold, &alpha, 2.0);
        let x: f64 = 2.0 * 0.3;
        let want = (-2.0f64 * 0.35).exp() * (1.0 + x + x * x / 2.0);
        assert!((d.iter().sum::<f64>() - want).abs() < 1e-12);
    }

    #[test]
    fn threshold_k2_has_no_middle_branch() {
        let (a0, a1, c) = (0.3f64, 0.2f64, 1.5f64);
        let d = drift(ModelKind::Threshold, &[a0, a1], c);
        let e = (-c * (a0 + a1)).exp();
        assert!((d[0] - (-c * a0 * e + e)).abs() < 1e-15);
        assert!((d[1] - (c * a0 * e + e * c * a0)).abs() < 1e-15);
    }

    #[test]
    fn tetris_drift_values() {
        let d = drift(ModelKind::Tetris, &[0.3, 0.2], 1.0);
        assert!((d[0] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((d[1] - (1.0 - (-0.3f64).exp()) * (-0.2f64).exp()).abs() < 1e-15);
        assert_eq!(
            drift(ModelKind::Tetris, &[0.4, 0.1, 0.2], 0.0),
            vec![1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn sfap_drift_values() {
        let d = drift(ModelKind::Sfap, &[0.4, 0.2, 0.1], 2.0);
        assert!((d[1] - (-0.4f64).exp() * (1.0 - (-0.8f64).exp())).abs() < 1e-15);
        let one = drift(ModelKind::Sfap, &[0.37], 2.5);
        let thr = drift(ModelKind::Threshold, &[0.37], 2.5);
        assert_eq!(one, thr);
    }

    #[test]
    fn step_out_of_range() {
        for step in [0.0, -1e-3, 0.5, f64::NAN] {
            assert!(matches!(
                integrate(ModelKind::Sfap, 2, 1.0, step),
                Err(Error::Parameter(_))
            ));
        }
    }

    #[test]
    fn hard_core_jamming_constant() {
        let sol = integrate(ModelKind::Threshold, 1, 1.0, DEFAULT_STEP).unwrap();
        assert!((sol.final_alpha()[0] - 2f64.ln()).abs() < 1e-8);
        let five = jamming_constant(ModelKind::Threshold, 1, 5.0, DEFAULT_STEP).unwrap();
        assert!((five - 6f64.ln() / 5.0).abs() < 1e-8);
    }

    #[test]
    fn no_edges_fill_linearly() {
        for kind in ModelKind::ALL {
            let sol = integrate(kind, 3, 0.0, 0.01).unwrap();
            for (t, total) in sol.times().iter().zip(sol.total_active()) {
                assert!((total - t).abs() < 1e-14);
            }
            assert!((sol.jamming_constant() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_values() {
        let a = sfap_closed_form(1.0, 2, 1.0);
        assert!((a[0] - 2f64.ln()).abs() < 1e-15);
        assert!((a[1] - (2.0 - 2f64.ln()).ln()).abs() < 1e-15);
        assert!((a[0] - std::f64::consts::LN_2).abs() < 1e-6);
        assert!((a[1] - 0.267622).abs() < 1e-6);
        assert_eq!(sfap_closed_form(3.0, 4, 0.0), vec![0.0; 4]);
        assert_eq!(sfap_closed_form(0.0, 3, 0.4), vec![0.4, 0.0, 0.0]);
    }

    #[test]
    fn sfap_integration_matches_closed_form() {
        let sol = integrate(ModelKind::Sfap, 4, 3.0, DEFAULT_STEP).unwrap();
        for (t, row) in sol.times().iter().zip(&sol.alpha) {
            let want = sfap_closed_form(3.0, 4, *t);
            for (a, b) in row.iter().zip(&want) {
                assert!((a - b).abs() < 1e-8, "t = {t}");
            }
        }
    }

    #[test]
    fn hard_core_formula() {
        assert!((threshold_k1_jamming(1.0) - std::f64::consts::LN_2).abs() < 1e-6);
        assert_eq!(threshold_k1_jamming(0.0), 1.0);
        let c = std::f64::consts::E - 1.0;
        assert!((threshold_k1_jamming(c) - 1.0 / c).abs() < 1e-15);
        assert!((threshold_k1_jamming(c) - 0.581977).abs() < 1e-6);
    }

    #[test]
    fn tetris_k2_beats_hard_core() {
        let tetris = jamming_constant(ModelKind::Tetris, 2, 5.0, DEFAULT_STEP).unwrap();
        assert!(tetris > threshold_k1_jamming(5.0));
    }

    #[test]
    fn crossing_of_heights() {
        let c = tetris_crossing(2, 1, 2, (1.0, 10.0), 1e-4, DEFAULT_STEP).unwrap();
        assert!((4.45..=4.49).contains(&c), "{c}");
    }

    #[test]
    fn crossing_bracket_errors() {
        assert!(matches!(
            tetris_crossing(2, 1, 2, (0.1, 0.2), 1e-4, DEFAULT_STEP),
            Err(Error::Bracket(_))
        ));
        assert!(matches!(
            tetris_crossing(2, 1, 2, (3.0, 3.0), 1e-4, DEFAULT_STEP),
            Err(Error::Bracket(_))
        ));
        assert!(matches!(
            tetris_crossing(2, 2, 2, (1.0, 10.0), 1e-4, DEFAULT_STEP),
            Err(Error::Parameter(_))
        ));
    }
}
