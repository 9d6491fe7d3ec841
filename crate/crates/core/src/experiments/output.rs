//! CSV and JSON writers. CSV files are UTF-8 with a header row and `.`
//! decimals; floats use Rust's shortest round-trip formatting, so identical
//! inputs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::wavenumber_dof::DofPrediction;

use super::config::ScenarioConfig;
use super::sweeps::{EigenCapacityResult, SingleRun, SweepResult};
use super::Experiment;

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    experiment: Experiment,
    config: &'a ScenarioConfig,
    result: &'a T,
}

fn paths(dir: &Path, experiment: Experiment, suffix: &str) -> (PathBuf, PathBuf) {
    let stem = format!("{}{suffix}", experiment.name());
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

/// Writes `<verb>.csv` and `<verb>.json`; returns the files written.
pub fn write_sweep(dir: &Path, cfg: &ScenarioConfig, result: &SweepResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let (csv_path, json_path) = paths(dir, result.experiment, "");
    write_csv(&csv_path, &result.rows)?;
    write_json(&json_path, &Document { experiment: result.experiment, config: cfg, result })?;
    Ok(vec![csv_path, json_path])
}

/// Summary plus `-eigen`, `-capacity` and `-spread` tables.
pub fn write_eigen_capacity(dir: &Path, cfg: &ScenarioConfig, result: &EigenCapacityResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let e = Experiment::EigenCapacity;
    let (csv_path, json_path) = paths(dir, e, "");
    write_csv(&csv_path, &result.summary.rows)?;
    let mut out = vec![csv_path];
    let p = paths(dir, e, "-eigen").0;
    write_csv(&p, &result.eigen)?;
    out.push(p);
    let p = paths(dir, e, "-capacity").0;
    write_csv(&p, &result.capacity)?;
    out.push(p);
    let p = paths(dir, e, "-spread").0;
    write_csv(&p, &result.spread)?;
    out.push(p);
    write_json(&json_path, &Document { experiment: e, config: cfg, result })?;
    out.push(json_path);
    Ok(out)
}

#[derive(Serialize)]
struct TraceRow {
    step: usize,
    zeta: f64,
    f: f64,
    converged: bool,
}

/// Bisection trace as CSV, full record as JSON.
pub fn write_single(dir: &Path, cfg: &ScenarioConfig, run: &SingleRun) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let e = Experiment::Optimize;
    let (csv_path, json_path) = paths(dir, e, "");
    let rows: Vec<TraceRow> = run
        .record
        .run
        .iterations
        .iter()
        .enumerate()
        .map(|(i, s)| TraceRow { step: i + 1, zeta: s.zeta, f: s.f, converged: s.converged })
        .collect();
    write_csv(&csv_path, &rows)?;
    write_json(&json_path, &Document { experiment: e, config: cfg, result: run })?;
    Ok(vec![csv_path, json_path])
}

#[derive(Serialize)]
struct PredictionRow {
    k: usize,
    m: usize,
    n: usize,
    ellipse_t_c1: f64,
    ellipse_t_c2: f64,
    ellipse_r_c1: f64,
    ellipse_r_c2: f64,
    d_t: f64,
    d_r: f64,
    lemma1_dof: f64,
    theorem1_dof: usize,
    lattice_d_t: usize,
    lattice_d_r: usize,
    lattice_dof: usize,
}

pub fn write_prediction(dir: &Path, cfg: &ScenarioConfig, p: &DofPrediction) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let e = Experiment::Predict;
    let (csv_path, json_path) = paths(dir, e, "");
    let row = PredictionRow {
        k: p.k,
        m: p.m,
        n: p.n,
        ellipse_t_c1: p.ellipse_t.c1,
        ellipse_t_c2: p.ellipse_t.c2,
        ellipse_r_c1: p.ellipse_r.c1,
        ellipse_r_c2: p.ellipse_r.c2,
        d_t: p.d_t,
        d_r: p.d_r,
        lemma1_dof: p.lemma1_dof,
        theorem1_dof: p.theorem1_dof,
        lattice_d_t: p.lattice_d_t,
        lattice_d_r: p.lattice_d_r,
        lattice_dof: p.lattice_dof,
    };
    write_csv(&csv_path, &[row])?;
    write_json(&json_path, &Document { experiment: e, config: cfg, result: p })?;
    Ok(vec![csv_path, json_path])
}
