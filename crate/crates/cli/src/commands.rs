use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use rsajam::fluid::{integrate_on, tetris_crossing};
use rsajam::graph::{sample_er_graph, sample_permutation};
use rsajam::montecarlo::{deviation_from_fluid, run_ensemble_mode, SimulationMode};
use rsajam::processes::{jamming_summary, run_direct, run_explore_coupled};
use rsajam::validation::{conditional_mean_enumeration, coupling_sweep};
use rsajam::{ModelKind, ModelSpec, SeedBasis, TimeGrid};

use crate::error::{CliError, CliResult};
use crate::svg::{render, series_from_table};
use crate::table::{
    fluid_rows, fluid_table, read_table, sig9, sim_rows, sim_table, table_deviation, write_fluid,
    write_sim, Table, FLUID_HEADER, SIM_HEADER,
};
use crate::{
    CompareArgs, CrossingArgs, FluidArgs, OutputArgs, OutputFormat, RunMode, SampleArgs, SimMode,
    SimulateArgs, ValidateArgs,
};

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| {
        CliError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| {
        CliError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn grid(points: usize) -> CliResult<TimeGrid> {
    Ok(TimeGrid::uniform(points)?)
}

/// Writes the CSV (or the SVG when `--format svg`) to `--out` or `out`, and
/// the SVG to `--svg` if given.
fn emit(
    output: &OutputArgs,
    out: &mut dyn Write,
    table: &Table,
    y_label: &str,
    write_csv: &dyn Fn(&mut dyn Write) -> CliResult<()>,
) -> CliResult<()> {
    let plot = || {
        let (series, x_label) = series_from_table(table);
        render(&series, x_label, y_label)
    };
    let write_main = |w: &mut dyn Write| -> CliResult<()> {
        match output.format {
            OutputFormat::Csv => write_csv(w),
            OutputFormat::Svg => Ok(w.write_all(plot().as_bytes())?),
        }
    };
    match &output.out {
        Some(path) => {
            let mut f = create(path)?;
            write_main(&mut f)?;
            f.flush()?;
        }
        None => write_main(out)?,
    }
    if let Some(path) = &output.svg {
        let mut f = create(path)?;
        f.write_all(plot().as_bytes())?;
        f.flush()?;
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let grid = grid(args.grid)?;
    let mode = match args.mode {
        SimMode::Counts => SimulationMode::Counts,
        SimMode::Direct => SimulationMode::Direct,
    };
    let mut rows = Vec::new();
    for c in args.degree.values() {
        let spec = ModelSpec::new(args.model, args.k, c, args.n)?;
        log::info!(
            "simulating {} K={} c={} n={} reps={}",
            args.model,
            args.k,
            c,
            args.n,
            args.reps
        );
        let ens = run_ensemble_mode(&spec, args.reps, args.seed, grid, mode)?;
        rows.extend(sim_rows(&ens));
    }
    let table = sim_table(&rows);
    emit(&args.output, out, &table, "alpha", &|w| write_sim(&rows, w))
}

fn fluid_solutions(
    kind: ModelKind,
    k: usize,
    cs: &[f64],
    step: f64,
    grid: TimeGrid,
) -> CliResult<Vec<rsajam::fluid::FluidSolution>> {
    Ok(cs
        .par_iter()
        .map(|&c| integrate_on(kind, k, c, step, grid))
        .collect::<Result<Vec<_>, _>>()?)
}

pub fn fluid(args: &FluidArgs, out: &mut dyn Write) -> CliResult<()> {
    let grid = grid(args.grid)?;
    let sols = fluid_solutions(args.model, args.k, &args.degree.values(), args.step, grid)?;
    let rows: Vec<_> = sols.iter().flat_map(fluid_rows).collect();
    let table = fluid_table(&rows);
    emit(&args.output, out, &table, "alpha", &|w| {
        write_fluid(&rows, w)
    })
}

/// Model, K and c from the flags; all three are needed when nothing is read
/// from a file.
fn compare_spec(args: &CompareArgs) -> CliResult<(ModelKind, usize, f64)> {
    match (args.model, args.k, args.c) {
        (Some(m), Some(k), Some(c)) => Ok((m, k, c)),
        _ => Err(CliError::Usage(
            "--model, --K and --c are required unless both --sim-csv and --fluid-csv are given"
                .into(),
        )),
    }
}

/// Checks that the series in a table read from a file agree with any model
/// flags given on the command line.
fn check_flags(args: &CompareArgs, table: &Table, source: &Path) -> CliResult<()> {
    for key in table.keys() {
        let model_ok = args.model.is_none_or(|m| m.name() == key.model);
        let k_ok = args.k.is_none_or(|k| k.to_string() == key.k);
        let c_ok = args.c.is_none_or(|c| sig9(c) == key.c);
        if !(model_ok && k_ok && c_ok) {
            return Err(CliError::Usage(format!(
                "{} holds {} K={} c={}, which does not match the model flags",
                source.display(),
                key.model,
                key.k,
                key.c
            )));
        }
    }
    Ok(())
}

pub fn compare(args: &CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(CliError::Usage("--tol must be ≥ 0".into()));
    }
    let grid = grid(args.grid)?;
    let deviation = match (&args.sim_csv, &args.fluid_csv) {
        (None, None) => {
            let (kind, k, c) = compare_spec(args)?;
            let spec = ModelSpec::new(kind, k, c, args.n)?;
            let ens = run_ensemble_mode(&spec, args.reps, args.seed, grid, SimulationMode::Counts)?;
            let fl = integrate_on(kind, k, c, args.step, grid)?;
            deviation_from_fluid(&ens, &fl)?
        }
        (sim_path, fluid_path) => {
            let sim = match sim_path {
                Some(p) => {
                    let t = read_table(open(p)?, &SIM_HEADER, "alpha_mean")?;
                    check_flags(args, &t, p)?;
                    t
                }
                None => {
                    let (kind, k, c) = compare_spec(args)?;
                    let spec = ModelSpec::new(kind, k, c, args.n)?;
                    let ens = run_ensemble_mode(
                        &spec,
                        args.reps,
                        args.seed,
                        grid,
                        SimulationMode::Counts,
                    )?;
                    sim_table(&sim_rows(&ens))
                }
            };
            let fluid = match fluid_path {
                Some(p) => {
                    let t = read_table(open(p)?, &FLUID_HEADER, "alpha")?;
                    check_flags(args, &t, p)?;
                    t
                }
                None => {
                    // integrate every series the simulation file holds
                    let mut rows = Vec::new();
                    for key in sim.keys() {
                        let kind: ModelKind = key.model.parse()?;
                        let k: usize = key
                            .k
                            .parse()
                            .map_err(|_| CliError::Usage(format!("bad K {:?}", key.k)))?;
                        let c: f64 = key
                            .c
                            .parse()
                            .map_err(|_| CliError::Usage(format!("bad c {:?}", key.c)))?;
                        let points = sim[key]
                            .keys()
                            .map(|(t, _)| t.clone())
                            .collect::<std::collections::BTreeSet<_>>()
                            .len();
                        let fl = integrate_on(kind, k, c, args.step, TimeGrid::uniform(points)?)?;
                        rows.extend(fluid_rows(&fl));
                    }
                    fluid_table(&rows)
                }
            };
            table_deviation(&sim, &fluid)?
        }
    };
    writeln!(out, "sup-norm deviation: {}", sig9(deviation))?;
    if deviation > args.tol {
        return Err(CliError::Tolerance(format!(
            "deviation {} exceeds tolerance {}",
            sig9(deviation),
            sig9(args.tol)
        )));
    }
    Ok(())
}

pub fn crossing(args: &CrossingArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = tetris_crossing(
        args.k,
        args.classes.0,
        args.classes.1,
        (args.bracket.0, args.bracket.1),
        args.tol,
        args.step,
    )?;
    writeln!(out, "{c:.4}")?;
    Ok(())
}

pub fn validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be ≥ 1".into()));
    }
    writeln!(
        out,
        "{:<24} {:>8} {:>9}  result",
        "check", "cases", "failures"
    )?;
    let mut first_failure = None;
    // small trial graphs routinely have c ≥ n; the clamp warning is noise here
    let level = log::max_level();
    log::set_max_level(level.min(log::LevelFilter::Error));
    let reports: Result<Vec<_>, _> = ModelKind::ALL
        .iter()
        .map(|&kind| coupling_sweep(kind, args.trials, args.seed, args.corrupt_edge_keys))
        .collect();
    log::set_max_level(level);
    for report in reports? {
        let kind = report.kind;
        writeln!(
            out,
            "{:<24} {:>8} {:>9}  {}",
            format!("coupling {kind}"),
            report.trials,
            report.mismatches,
            if report.passed() { "pass" } else { "FAIL" }
        )?;
        if first_failure.is_none() {
            first_failure = report.first_failure.map(|f| (kind, f));
        }
    }
    let tol = 1e-10;
    let enumeration = conditional_mean_enumeration()?;
    writeln!(
        out,
        "{:<24} {:>8} {:>9}  {} (max error {})",
        "conditional mean",
        enumeration.cases,
        enumeration.bound_failures,
        if enumeration.passed(tol) {
            "pass"
        } else {
            "FAIL"
        },
        sig9(enumeration.max_mean_error)
    )?;
    if let Some((kind, (trial, vertex, detail))) = first_failure {
        let spec = trial.spec;
        writeln!(
            err,
            "first mismatch: {kind} trial {} (n={}, c={}, K={}) at vertex {}: {detail}",
            trial.seed.replication,
            spec.n,
            sig9(spec.c),
            spec.k,
            vertex + 1
        )?;
        return Err(CliError::Validation("coupling check failed".into()));
    }
    if !enumeration.passed(tol) {
        return Err(CliError::Validation("conditional mean check failed".into()));
    }
    Ok(())
}

pub fn sample(args: &SampleArgs, out: &mut dyn Write) -> CliResult<()> {
    let spec = ModelSpec::new(args.model, args.k, args.c, args.n)?;
    let seed = SeedBasis::new(args.seed, args.rep);
    let graph = sample_er_graph(args.n, args.c, seed)?;
    let order = sample_permutation(args.n, seed)?;
    let run = match args.mode {
        RunMode::Direct => run_direct(&graph, &order, &spec)?,
        RunMode::Coupled => run_explore_coupled(&graph, &order, &spec)?,
    };
    if let Some(path) = &args.edges {
        let mut f = create(path)?;
        graph.write_edge_list(&mut f)?;
        f.flush()?;
    }
    if let Some(path) = &args.labels {
        let mut f = create(path)?;
        run.write_labels(&mut f)?;
        f.flush()?;
    }
    let summary = jamming_summary(&run.trajectory)?;
    writeln!(out, "edges: {}", graph.edge_count())?;
    writeln!(out, "active fraction: {}", sig9(summary.total_active))?;
    Ok(())
}
