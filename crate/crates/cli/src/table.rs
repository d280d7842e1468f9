//! The simulation and fluid CSV tables.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rsajam::fluid::FluidSolution;
use rsajam::montecarlo::EnsembleResult;

use crate::error::{CliError, CliResult};

pub const SIM_HEADER: [&str; 9] = [
    "model",
    "K",
    "c",
    "n",
    "rep_count",
    "t",
    "class",
    "alpha_mean",
    "alpha_stderr",
];
pub const FLUID_HEADER: [&str; 6] = ["model", "K", "c", "t", "class", "alpha"];

/// Decimal rendering with 9 significant digits, trailing zeros dropped.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

/// Identifies one curve family: model, K and c as written.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub model: String,
    pub k: String,
    pub c: String,
}

/// One `(t, class) -> value` row set per series; `t` and `class` are kept as
/// written, so tables produced on the same grid line up exactly.
pub type Table = BTreeMap<SeriesKey, BTreeMap<(String, String), f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub model: String,
    pub k: usize,
    pub c: f64,
    pub n: usize,
    pub reps: usize,
    pub t: f64,
    pub class: String,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluidRow {
    pub model: String,
    pub k: usize,
    pub c: f64,
    pub t: f64,
    pub class: String,
    pub alpha: f64,
}

pub fn sim_rows(ens: &EnsembleResult) -> Vec<SimRow> {
    let spec = &ens.spec;
    let mut rows = Vec::new();
    for (j, t) in ens.grid.times().into_iter().enumerate() {
        let row = |class: String, mean: f64, stderr: f64| SimRow {
            model: spec.kind.name().to_string(),
            k: spec.k,
            c: spec.c,
            n: spec.n,
            reps: ens.reps,
            t,
            class,
            mean,
            stderr,
        };
        for slot in spec.active_classes() {
            rows.push(row(
                slot.to_string(),
                ens.mean_alpha[j][slot],
                ens.stderr_alpha[j][slot],
            ));
        }
        rows.push(row("total".into(), ens.mean_total[j], ens.stderr_total[j]));
    }
    rows
}

pub fn fluid_rows(sol: &FluidSolution) -> Vec<FluidRow> {
    let first = sol.kind.rule().active_classes(sol.k).start;
    let totals = sol.total_active();
    let mut rows = Vec::new();
    for (j, t) in sol.times().into_iter().enumerate() {
        let row = |class: String, alpha: f64| FluidRow {
            model: sol.kind.name().to_string(),
            k: sol.k,
            c: sol.c,
            t,
            class,
            alpha,
        };
        for (i, &a) in sol.alpha[j].iter().enumerate() {
            rows.push(row((first + i).to_string(), a));
        }
        rows.push(row("total".into(), totals[j]));
    }
    rows
}

pub fn write_sim<W: Write>(rows: &[SimRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIM_HEADER)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.k.to_string(),
            sig9(r.c),
            r.n.to_string(),
            r.reps.to_string(),
            sig9(r.t),
            r.class.clone(),
            sig9(r.mean),
            sig9(r.stderr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fluid<W: Write>(rows: &[FluidRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FLUID_HEADER)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.k.to_string(),
            sig9(r.c),
            sig9(r.t),
            r.class.clone(),
            sig9(r.alpha),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sim_table(rows: &[SimRow]) -> Table {
    let mut table = Table::new();
    for r in rows {
        let key = SeriesKey {
            model: r.model.clone(),
            k: r.k.to_string(),
            c: sig9(r.c),
        };
        table
            .entry(key)
            .or_default()
            .insert((sig9(r.t), r.class.clone()), r.mean);
    }
    table
}

pub fn fluid_table(rows: &[FluidRow]) -> Table {
    let mut table = Table::new();
    for r in rows {
        let key = SeriesKey {
            model: r.model.clone(),
            k: r.k.to_string(),
            c: sig9(r.c),
        };
        table
            .entry(key)
            .or_default()
            .insert((sig9(r.t), r.class.clone()), r.alpha);
    }
    table
}

/// Reads a CSV with the given header into a table, taking the value from
/// `value_column`.
pub fn read_table<R: Read>(input: R, header: &[&str], value_column: &str) -> CliResult<Table> {
    let mut reader = csv::Reader::from_reader(input);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(CliError::Usage(format!(
            "unexpected CSV header {:?}, expected {:?}",
            found.join(","),
            header.join(",")
        )));
    }
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .expect("known column")
    };
    let (model, k, c, t, class, value) = (
        col("model"),
        col("K"),
        col("c"),
        col("t"),
        col("class"),
        col(value_column),
    );
    let mut table = Table::new();
    for record in reader.records() {
        let record = record?;
        let parse = |i: usize| -> CliResult<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("not a number: {:?}", &record[i])))
        };
        let key = SeriesKey {
            model: record[model].to_string(),
            k: record[k].to_string(),
            c: sig9(parse(c)?),
        };
        table
            .entry(key)
            .or_default()
            .insert((sig9(parse(t)?), record[class].to_string()), parse(value)?);
    }
    Ok(table)
}

/// Largest absolute difference over the class rows of two tables; the
/// tables must cover the same series, times and classes.
pub fn table_deviation(sim: &Table, fluid: &Table) -> CliResult<f64> {
    if sim.keys().ne(fluid.keys()) {
        let names = |t: &Table| {
            t.keys()
                .map(|k| format!("{} K={} c={}", k.model, k.k, k.c))
                .collect::<Vec<_>>()
                .join("; ")
        };
        return Err(CliError::Usage(format!(
            "simulation and fluid inputs describe different runs: [{}] vs [{}]",
            names(sim),
            names(fluid)
        )));
    }
    let mut worst = 0.0f64;
    for (key, rows) in sim {
        let other = &fluid[key];
        if rows.len() != other.len() {
            return Err(CliError::Usage(format!(
                "{} K={} c={}: {} rows vs {} rows",
                key.model,
                key.k,
                key.c,
                rows.len(),
                other.len()
            )));
        }
        for ((t, class), value) in rows {
            let Some(limit) = other.get(&(t.clone(), class.clone())) else {
                return Err(CliError::Usage(format!(
                    "no fluid value at t={t}, class {class}"
                )));
            };
            if class != "total" {
                worst = worst.max((value - limit).abs());
            }
        }
    }
    Ok(worst)
}
