//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rsajam::fluid::{
    drift_sfap, drift_tetris, drift_threshold, final_alpha, integrate, jamming_constant,
    sfap_closed_form, DEFAULT_STEP,
};
use rsajam::graph::{sample_er_graph, sample_permutation};
use rsajam::montecarlo::{deviation_from_fluid, run_ensemble};
use rsajam::processes::run_direct;
use rsajam::processes::structure::{
    check_sfap_assignment, check_tetris_replay, check_threshold_maximal,
};
use rsajam::randomness::{uniform01, StreamKey, StreamPurpose};
use rsajam::validation::{conditional_mean_enumeration, coupling_sweep};
use rsajam::{ModelKind, ModelSpec, SeedBasis, TimeGrid};
use rsajam_cli::run_with;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn closed_form_single_class() -> Outcome {
    let mut worst = 0.0f64;
    for c in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let j = jamming_constant(ModelKind::Threshold, 1, c, DEFAULT_STEP)
            .map_err(|e| e.to_string())?;
        worst = worst.max((j - (1.0 + c).ln() / c).abs());
    }
    let msg = format!("max |J - log(1+c)/c| = {worst:.2e} (tol 1e-6)");
    if worst < 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sfap_closed_form_agreement() -> Outcome {
    let mut worst = 0.0f64;
    for c in [0.5, 1.0, 2.0, 5.0, 10.0] {
        for k in 1..=6 {
            let sol = integrate(ModelKind::Sfap, k, c, DEFAULT_STEP).map_err(|e| e.to_string())?;
            for (t, row) in sol.times().iter().zip(&sol.alpha) {
                for (a, b) in row.iter().zip(sfap_closed_form(c, k, *t)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    let msg = format!("sup-norm gap {worst:.2e} over c in {{0.5,1,2,5,10}}, K <= 6 (tol 1e-8)");
    if worst < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn tetris_crossing_window() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        [
            "rsajam",
            "crossing",
            "--K",
            "2",
            "--classes",
            "1,2",
            "--bracket",
            "1:10",
        ],
        &mut out,
        &mut err,
    );
    let text = String::from_utf8_lossy(&out).trim().to_string();
    if code != 0 {
        return Err(format!(
            "exit {code}: {}",
            String::from_utf8_lossy(&err).trim()
        ));
    }
    let c: f64 = text
        .parse()
        .map_err(|_| format!("unparsable output {text:?}"))?;
    let msg = format!("c* = {text} (window [4.45, 4.49])");
    if (4.45..=4.49).contains(&c) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn convergence_to_fluid() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for kind in ModelKind::ALL {
        for k in 1..=3 {
            for c in [1.0, 5.0] {
                let spec = ModelSpec::new(kind, k, c, 100_000).map_err(|e| e.to_string())?;
                let ens =
                    run_ensemble(&spec, 10, 0, TimeGrid::default()).map_err(|e| e.to_string())?;
                let fl = integrate(kind, k, c, DEFAULT_STEP).map_err(|e| e.to_string())?;
                let dev = deviation_from_fluid(&ens, &fl).map_err(|e| e.to_string())?;
                if dev > worst.0 {
                    worst = (dev, format!("{kind} K={k} c={c}"));
                }
            }
        }
    }
    let msg = format!(
        "largest deviation {:.4} at {} (n=1e5, reps=10, tol 0.01)",
        worst.0, worst.1
    );
    if worst.0 < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn coupling_oracle() -> Outcome {
    let mut parts = Vec::new();
    let mut failed = false;
    for kind in ModelKind::ALL {
        let report = coupling_sweep(kind, 1000, 0, false).map_err(|e| e.to_string())?;
        parts.push(format!("{kind} {}/{}", report.mismatches, report.trials));
        failed |= !report.passed();
    }
    let msg = format!("mismatches: {}", parts.join(", "));
    if failed {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn conditional_mean_oracle() -> Outcome {
    let report = conditional_mean_enumeration().map_err(|e| e.to_string())?;
    let msg = format!(
        "{} cases, max mean error {:.2e} (tol 1e-10), {} bound violations",
        report.cases, report.max_mean_error, report.bound_failures
    );
    if report.passed(1e-10) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn drift_identities() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=5usize {
        let seed = SeedBasis::new(7, k as u64);
        for i in 0..1000u64 {
            let u = |j: u64| uniform01(&StreamKey::new(seed, StreamPurpose::BinomialDraw, i, j));
            let c = 10.0 * u(99);
            let budget = u(98);
            let raw: Vec<f64> = (0..k as u64).map(u).collect();
            let s: f64 = raw.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            let alpha: Vec<f64> = raw.iter().map(|x| x / s * budget).collect();
            let mut d = vec![0.0; k];
            drift_threshold(&alpha, c, &mut d);
            let total: f64 = alpha.iter().sum();
            let x = c * alpha[..k - 1].iter().sum::<f64>();
            let mut w = 1.0;
            let mut poisson = 0.0;
            for r in 0..k {
                if r > 0 {
                    w *= x / r as f64;
                }
                poisson += w;
            }
            worst = worst.max((d.iter().sum::<f64>() - (-c * total).exp() * poisson).abs());
        }
    }
    let mut zero_ok = true;
    for k in 1..=5 {
        let mut want = vec![0.0; k];
        want[0] = 1.0;
        for drift in [
            drift_threshold as fn(&[f64], f64, &mut [f64]),
            drift_tetris,
            drift_sfap,
        ] {
            let mut d = vec![0.0; k];
            drift(&vec![0.0; k], 3.0, &mut d);
            zero_ok &= d == want;
        }
    }
    let msg = format!(
        "sum identity gap {worst:.2e} (tol 1e-12) on 5000 points; zero state gives (1,0,...): {zero_ok}"
    );
    if worst < 1e-12 && zero_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn structural_maximality() -> Outcome {
    let mut runs = 0;
    for rep in 0..200u64 {
        let seed = SeedBasis::new(314, rep);
        let n = 20 + (rep as usize * 97) % 481;
        let c = 0.25 + (rep % 32) as f64 * 0.25;
        let k = 1 + (rep as usize % 4);
        let graph = sample_er_graph(n, c, seed).map_err(|e| e.to_string())?;
        let order = sample_permutation(n, seed).map_err(|e| e.to_string())?;
        for kind in ModelKind::ALL {
            let spec = ModelSpec::new(kind, k, c, n).map_err(|e| e.to_string())?;
            let run = run_direct(&graph, &order, &spec).map_err(|e| e.to_string())?;
            let verdict = match kind {
                ModelKind::Threshold => check_threshold_maximal(&graph, &run.labels, k),
                ModelKind::Sfap => check_sfap_assignment(&graph, &run.labels, k),
                ModelKind::Tetris => check_tetris_replay(&graph, &order, &run.labels, k),
            };
            if let Err(v) = verdict {
                return Err(format!(
                    "{kind} replication {rep} (n={n}, c={c}, K={k}): {v}"
                ));
            }
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} oracle runs (200 per model, n <= 500) structurally sound"
    ))
}

fn monotonicity_and_ordering() -> Outcome {
    for kind in [ModelKind::Threshold, ModelKind::Tetris] {
        for c in 1..=10 {
            let mut prev = 0.0;
            for k in 1..=5 {
                let j =
                    jamming_constant(kind, k, c as f64, DEFAULT_STEP).map_err(|e| e.to_string())?;
                if j < prev {
                    return Err(format!(
                        "{kind} c={c}: J(K={k}) = {j} < J(K={}) = {prev}",
                        k - 1
                    ));
                }
                prev = j;
            }
        }
    }
    for i in 1..=40 {
        let c = 0.5 * i as f64;
        for k in 1..=5 {
            let a = final_alpha(ModelKind::Sfap, k, c, DEFAULT_STEP).map_err(|e| e.to_string())?;
            if let Some(w) = a.windows(2).position(|w| w[0] < w[1]) {
                return Err(format!(
                    "sfap c={c} K={k}: alpha_{} < alpha_{}",
                    w + 1,
                    w + 2
                ));
            }
        }
    }
    Ok("jamming non-decreasing in K (threshold, tetris; c = 1..10, K <= 5); sfap densities ordered (c in (0, 20], K <= 5)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("closed form at K=1", closed_form_single_class),
        ("sfap closed form", sfap_closed_form_agreement),
        ("tetris crossing", tetris_crossing_window),
        ("convergence to the fluid limit", convergence_to_fluid),
        ("coupling oracle", coupling_oracle),
        ("conditional binomial mean", conditional_mean_oracle),
        ("drift identities", drift_identities),
        ("structural maximality", structural_maximality),
        ("monotonicity and ordering", monotonicity_and_ordering),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
