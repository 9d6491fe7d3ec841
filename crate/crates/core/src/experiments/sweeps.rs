use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array_geometry::{element_positions, ArrayConfig, ElementLayout};
use crate::cluster_channel::{generate_channel, ClusterSet};
use crate::edof_optimizer::{
    build_sdr_problem, candidates, recover_phases, relax, DinkelbachRun, OptimizationRecord, OptimizerOptions,
    RandomizationResult,
};
use crate::error::{Error, Result};
use crate::metrics::{
    capacity_edof_approx, capacity_from_values, db_to_linear, spectrum, spectrum_from_values, SpectrumReport,
};
use crate::rng::trial_seed;
use crate::spacetime_channel::{composite_matrix, PhaseSchedule, ScheduleDims, TxPhases};
use crate::wavenumber_dof::{predict, DofPrediction};

use super::config::ScenarioConfig;
use super::Experiment;

/// One link geometry with its cluster set and agility.
#[derive(Debug, Clone)]
pub struct Instance {
    pub tx: ArrayConfig,
    pub rx: ArrayConfig,
    pub clusters: ClusterSet,
    pub k: usize,
}

impl Instance {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        Ok(Self { tx: cfg.tx_config()?, rx: cfg.rx_config()?, clusters: cfg.cluster_set()?, k: cfg.k })
    }

    pub fn dims(&self) -> Result<ScheduleDims> {
        ScheduleDims::new(
            self.k,
            self.tx.darisa_count,
            self.rx.darisa_count,
            self.tx.elements_per_darisa(),
            self.rx.elements_per_darisa(),
        )
    }

    pub fn predict(&self) -> Result<DofPrediction> {
        predict(&self.tx, &self.rx, &self.clusters, self.k)
    }

    fn layouts(&self) -> Result<(ElementLayout, ElementLayout)> {
        Ok((element_positions(&self.tx)?, element_positions(&self.rx)?))
    }
}

/// Mean and sample standard deviation, summed in input order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// One aggregated `(curve, axis)` point. Columns that do not apply to an
/// experiment stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub curve: f64,
    pub axis: f64,
    pub trials: usize,
    /// Trials whose optimizer aborted; they are left out of the optimized columns.
    pub failures: usize,
    pub lemma1_dof: f64,
    pub theorem1_dof: Option<usize>,
    pub lattice_dof: usize,
    pub rank_mean: f64,
    pub rank_std: f64,
    pub edof_random_mean: Option<f64>,
    pub edof_random_std: Option<f64>,
    pub rank_opt_mean: Option<f64>,
    pub edof_opt_mean: Option<f64>,
    pub edof_opt_std: Option<f64>,
    pub edof_relaxed_mean: Option<f64>,
    pub capacity_exact_random: Option<f64>,
    pub capacity_approx_random: Option<f64>,
    pub capacity_exact_opt: Option<f64>,
    pub capacity_approx_opt: Option<f64>,
}

/// Outcome of one phase schedule on one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    pub rank: usize,
    pub edof: f64,
    pub capacity_exact: f64,
    pub capacity_approx: f64,
    pub singular_values: Vec<f64>,
}

impl ScheduleOutcome {
    fn evaluate(h_w: &crate::linalg::CMatrix, schedule: &PhaseSchedule, threshold: f64, snr: f64) -> Result<Self> {
        let hc = composite_matrix(h_w, schedule)?;
        let rep = spectrum(&hc, threshold)?;
        Ok(Self::from_report(rep, hc.ncols(), snr))
    }

    fn from_report(rep: SpectrumReport, cols: usize, snr: f64) -> Self {
        Self {
            rank: rep.numerical_rank,
            edof: rep.edof,
            capacity_exact: capacity_from_values(&rep.singular_values, cols, snr),
            capacity_approx: capacity_edof_approx(rep.edof, snr),
            singular_values: rep.singular_values,
        }
    }
}

/// Optimized result at one phase resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizedOutcome {
    /// `None` means continuous phases.
    pub bits: Option<u32>,
    pub randomization: RandomizationResult,
    pub outcome: ScheduleOutcome,
}

/// Per-trial record kept in the JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub curve: f64,
    pub axis: f64,
    pub trial: usize,
    pub seed: u64,
    pub random: ScheduleOutcome,
    pub error: Option<String>,
    pub run: Option<DinkelbachRun>,
    pub optimized: Vec<OptimizedOutcome>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub experiment: Experiment,
    pub axis_name: String,
    pub curve_name: String,
    pub rows: Vec<SweepRow>,
    pub trials: Vec<TrialRecord>,
}

impl SweepResult {
    /// Rows of one curve, in axis order.
    pub fn curve(&self, curve: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.curve == curve).collect()
    }
}

/// Random-phase baseline followed by the full optimizer at each phase
/// resolution, sharing one relaxation across resolutions. Transmit phases are one random static draw shared by both
/// schemes; only receive phases are optimized.
pub fn run_edof_trial(
    inst: &Instance,
    layouts: &(ElementLayout, ElementLayout),
    seed: u64,
    opts: &OptimizerOptions,
    bits: &[Option<u32>],
    threshold: f64,
    snr: f64,
) -> Result<(ScheduleOutcome, std::result::Result<(DinkelbachRun, Vec<OptimizedOutcome>), Error>)> {
    let ch = generate_channel(&inst.clusters, &layouts.0, &layouts.1, inst.tx.array_aperture(), inst.rx.array_aperture(), seed)?;
    let schedule = PhaseSchedule::random(inst.dims()?, TxPhases::Static, seed);
    let random = ScheduleOutcome::evaluate(&ch.h_w, &schedule, threshold, snr)?;
    let bound = inst.predict()?.lattice_dof.max(1);
    let optimized = (|| {
        let prob = build_sdr_problem(&ch.h_w, &schedule)?;
        let (run, refined) = relax(&prob, bound, opts)?;
        let cands = candidates(&run, refined.as_ref());
        let mut outs = Vec::with_capacity(bits.len());
        for &b in bits {
            let randomization = recover_phases(&prob, &cands, opts.num_draws, seed, b)?;
            let sched = schedule.with_rx_phases(randomization.rx_phases.clone())?;
            let outcome = ScheduleOutcome::evaluate(&ch.h_w, &sched, threshold, snr)?;
            outs.push(OptimizedOutcome { bits: b, randomization, outcome });
        }
        Ok((run, outs))
    })();
    Ok((random, optimized))
}

fn bits_value(b: Option<u32>) -> f64 {
    b.map_or(0.0, f64::from)
}

fn bits_from_value(v: f64) -> Result<Option<u32>> {
    if v == 0.0 {
        Ok(None)
    } else if v >= 1.0 && v.fract() == 0.0 && v <= f64::from(crate::edof_optimizer::quantize::MAX_BITS) {
        Ok(Some(v as u32))
    } else {
        Err(Error::Config(format!("bit counts must be whole numbers in 1..=48 (0 for continuous), got {v}")))
    }
}

struct Point {
    curve: f64,
    axis: f64,
    instance: Instance,
}

/// Runs every point for `cfg.trials` trials. With several bit levels each
/// trial optimizes once and `label` maps `(point, bit index)` to the row's
/// `(curve, axis)`.
fn run_edof_points(
    cfg: &ScenarioConfig,
    points: Vec<Point>,
    bits: &[Option<u32>],
    label: impl Fn(&Point, usize) -> (f64, f64),
) -> Result<(Vec<SweepRow>, Vec<TrialRecord>)> {
    let opts = cfg.optimizer_options();
    let snr = db_to_linear(cfg.reference_snr_db);
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for p in &points {
        let layouts = p.instance.layouts()?;
        let pred = p.instance.predict()?;
        let outcomes: Vec<_> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, t);
                run_edof_trial(&p.instance, &layouts, seed, &opts, bits, cfg.rank_threshold, snr).map(|o| (t, seed, o))
            })
            .collect::<Result<Vec<_>>>()?;

        let ranks: Vec<f64> = outcomes.iter().map(|(_, _, (r, _))| r.rank as f64).collect();
        let (rank_mean, rank_std) = mean_std(&ranks);
        let random_edof: Vec<f64> = outcomes.iter().map(|(_, _, (r, _))| r.edof).collect();
        let (er_mean, er_std) = mean_std(&random_edof);
        let cap_r = mean_std(&outcomes.iter().map(|(_, _, (r, _))| r.capacity_exact).collect::<Vec<_>>()).0;
        let cap_ra = mean_std(&outcomes.iter().map(|(_, _, (r, _))| r.capacity_approx).collect::<Vec<_>>()).0;
        let ok: Vec<&(DinkelbachRun, Vec<OptimizedOutcome>)> =
            outcomes.iter().filter_map(|(_, _, (_, o))| o.as_ref().ok()).collect();
        let relaxed = mean_std(&ok.iter().map(|(run, _)| run.relaxed_edof()).collect::<Vec<_>>()).0;
        let some = |v: f64| (!ok.is_empty()).then_some(v);

        for bi in 0..bits.len() {
            let (curve, axis) = label(p, bi);
            let pick = |f: &dyn Fn(&ScheduleOutcome) -> f64| ok.iter().map(|(_, outs)| f(&outs[bi].outcome)).collect::<Vec<_>>();
            let (eo_mean, eo_std) = mean_std(&pick(&|o| o.edof));
            rows.push(SweepRow {
                curve,
                axis,
                trials: cfg.trials,
                failures: cfg.trials - ok.len(),
                lemma1_dof: pred.lemma1_dof,
                theorem1_dof: Some(pred.theorem1_dof),
                lattice_dof: pred.lattice_dof,
                rank_mean,
                rank_std,
                edof_random_mean: Some(er_mean),
                edof_random_std: Some(er_std),
                rank_opt_mean: some(mean_std(&pick(&|o| o.rank as f64)).0),
                edof_opt_mean: some(eo_mean),
                edof_opt_std: some(eo_std),
                edof_relaxed_mean: some(relaxed),
                capacity_exact_random: Some(cap_r),
                capacity_approx_random: Some(cap_ra),
                capacity_exact_opt: some(mean_std(&pick(&|o| o.capacity_exact)).0),
                capacity_approx_opt: some(mean_std(&pick(&|o| o.capacity_approx)).0),
            });
        }
        for (trial, seed, (random, opt)) in outcomes {
            let (curve, axis) = if bits.len() == 1 { label(p, 0) } else { (p.curve, p.axis) };
            let (run, optimized, error) = match opt {
                Ok((run, outs)) => (Some(run), outs, None),
                Err(e) => (None, Vec::new(), Some(e.to_string())),
            };
            records.push(TrialRecord { curve, axis, trial, seed, random, error, run, optimized });
        }
    }
    Ok((rows, records))
}

fn axis_or_default(values: &[f64], fallback: f64) -> Vec<f64> {
    if values.is_empty() {
        vec![fallback]
    } else {
        values.to_vec()
    }
}

/// EDoF sweeps behind the spacing, agility, element-count and bit-depth figures.
///
/// | experiment | axis | curves |
/// |---|---|---|
/// | `EdofSpacing` | element spacing (λ), DARISA size fixed | azimuth spread (deg) |
/// | `EdofAgility` | K | M |
/// | `EdofElements` | receive elements per DARISA row, DARISA size fixed | phase bits (0 = continuous) |
/// | `EdofBits` | phase bits (0 = continuous) | none |
pub fn run_edof_experiments(cfg: &ScenarioConfig, experiment: Experiment) -> Result<SweepResult> {
    cfg.validate()?;
    let base = Instance::from_config(cfg)?;
    let values = &cfg.sweep.values;
    let (axis_name, curve_name, rows, trials) = match experiment {
        Experiment::EdofSpacing => {
            let mut points = Vec::new();
            for &spread in &axis_or_default(&cfg.sweep.curves, f64::NAN) {
                let clusters = if spread.is_nan() { base.clusters.clone() } else { cfg.clusters_with_spread(spread)? };
                for &spacing in &axis_or_default(values, cfg.rx.spacing) {
                    let instance = Instance {
                        tx: cfg.tx.with_spacing(spacing).to_config(crate::array_geometry::Side::Transmit)?,
                        rx: cfg.rx.with_spacing(spacing).to_config(crate::array_geometry::Side::Receive)?,
                        clusters: clusters.clone(),
                        k: cfg.k,
                    };
                    points.push(Point { curve: spread, axis: spacing, instance });
                }
            }
            let (rows, trials) = run_edof_points(cfg, points, &[cfg.quantization_bits], |p, _| (p.curve, p.axis))?;
            ("spacing_wavelengths", "azimuth_spread_deg", rows, trials)
        }
        Experiment::EdofAgility => {
            let mut points = Vec::new();
            for &m in &axis_or_default(&cfg.sweep.curves, cfg.tx.count as f64) {
                for &k in &axis_or_default(values, cfg.k as f64) {
                    let (m_u, k_u) = (whole(m, "M")?, whole(k, "K")?);
                    let mut tx = base.tx.clone();
                    tx.darisa_count = m_u;
                    let instance = Instance { tx, rx: base.rx.clone(), clusters: base.clusters.clone(), k: k_u };
                    points.push(Point { curve: m, axis: k, instance });
                }
            }
            let (rows, trials) = run_edof_points(cfg, points, &[cfg.quantization_bits], |p, _| (p.curve, p.axis))?;
            ("k", "m", rows, trials)
        }
        Experiment::EdofElements => {
            let bits = axis_or_default(&cfg.sweep.curves, bits_value(cfg.quantization_bits))
                .into_iter()
                .map(bits_from_value)
                .collect::<Result<Vec<_>>>()?;
            let mut points = Vec::new();
            for &n in &axis_or_default(values, cfg.rx.n_x as f64) {
                let rx = cfg.rx.with_elements(whole(n, "element count")?).to_config(crate::array_geometry::Side::Receive)?;
                points.push(Point { curve: f64::NAN, axis: n, instance: Instance { rx, ..base.clone() } });
            }
            let (rows, trials) =
                run_edof_points(cfg, points, &bits, |p, bi| (bits_value(bits[bi]), p.axis))?;
            ("rx_elements_per_row", "bits", group_by_curve(rows, &bits.iter().map(|b| bits_value(*b)).collect::<Vec<_>>()), trials)
        }
        Experiment::EdofBits => {
            let bits = axis_or_default(values, bits_value(cfg.quantization_bits))
                .into_iter()
                .map(bits_from_value)
                .collect::<Result<Vec<_>>>()?;
            let points = vec![Point { curve: cfg.rx.n_x as f64, axis: f64::NAN, instance: base.clone() }];
            let (rows, trials) = run_edof_points(cfg, points, &bits, |p, bi| (p.curve, bits_value(bits[bi])))?;
            ("bits", "rx_elements_per_row", rows, trials)
        }
        other => return Err(Error::InvalidParameter(format!("{other:?} is not an EDoF sweep"))),
    };
    Ok(SweepResult { experiment, axis_name: axis_name.into(), curve_name: curve_name.into(), rows, trials })
}

/// Reorders rows so each curve's rows are contiguous, curves in `order`.
fn group_by_curve(rows: Vec<SweepRow>, order: &[f64]) -> Vec<SweepRow> {
    order.iter().flat_map(|c| rows.iter().filter(|r| r.curve == *c).cloned().collect::<Vec<_>>()).collect()
}

fn whole(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!("{what} must be a positive whole number, got {v}")))
    }
}

/// Mean numerical rank of `H_w` against the DoF predictions.
///
/// With `sweep.axis = "aperture"` (default) the axis is the DARISA edge length
/// in wavelengths at the configured spacing and the curves are azimuth
/// spreads. With `"spread"` the roles swap.
pub fn run_dof_sweep(cfg: &ScenarioConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let by_spread = match cfg.sweep.axis.as_deref() {
        None | Some("aperture") => false,
        Some("spread") => true,
        Some(other) => return Err(Error::Config(format!("unknown DoF sweep axis {other:?}"))),
    };
    let sides = axis_or_default(if by_spread { &cfg.sweep.curves } else { &cfg.sweep.values }, cfg.rx.side_length());
    let spreads = axis_or_default(if by_spread { &cfg.sweep.values } else { &cfg.sweep.curves }, f64::NAN);
    let mut rows = Vec::new();
    let outer = if by_spread { &sides } else { &spreads };
    let inner = if by_spread { &spreads } else { &sides };
    for &c in outer {
        for &a in inner {
            let (side, spread) = if by_spread { (c, a) } else { (a, c) };
            let clusters = if spread.is_nan() { cfg.cluster_set()? } else { cfg.clusters_with_spread(spread)? };
            let tx = cfg.tx.with_side(side).to_config(crate::array_geometry::Side::Transmit)?;
            let rx = cfg.rx.with_side(side).to_config(crate::array_geometry::Side::Receive)?;
            let inst = Instance { tx, rx, clusters, k: 1 };
            let layouts = inst.layouts()?;
            let pred = inst.predict()?;
            let ranks = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let ch = generate_channel(
                        &inst.clusters,
                        &layouts.0,
                        &layouts.1,
                        inst.tx.array_aperture(),
                        inst.rx.array_aperture(),
                        trial_seed(cfg.seed, t),
                    )?;
                    Ok(spectrum_from_values(ch.singular_values(), cfg.rank_threshold).numerical_rank as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            let (rank_mean, rank_std) = mean_std(&ranks);
            rows.push(SweepRow {
                curve: c,
                axis: a,
                trials: cfg.trials,
                failures: 0,
                lemma1_dof: pred.lemma1_dof,
                theorem1_dof: None,
                lattice_dof: pred.spatial_lattice_dof(),
                rank_mean,
                rank_std,
                edof_random_mean: None,
                edof_random_std: None,
                rank_opt_mean: None,
                edof_opt_mean: None,
                edof_opt_std: None,
                edof_relaxed_mean: None,
                capacity_exact_random: None,
                capacity_approx_random: None,
                capacity_exact_opt: None,
                capacity_approx_opt: None,
            });
        }
    }
    let (axis_name, curve_name) =
        if by_spread { ("azimuth_spread_deg", "darisa_side_wavelengths") } else { ("darisa_side_wavelengths", "azimuth_spread_deg") };
    Ok(SweepResult {
        experiment: Experiment::DofSweep,
        axis_name: axis_name.into(),
        curve_name: curve_name.into(),
        rows,
        trials: Vec::new(),
    })
}

/// Mean sorted singular value of `H_C` at one index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub curve: f64,
    pub scheme: String,
    pub index: usize,
    pub singular_value_mean: f64,
    /// Mean of `σ_i / σ_1`.
    pub normalized_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub curve: f64,
    pub scheme: String,
    pub snr_db: f64,
    pub capacity_exact: f64,
    pub capacity_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadRow {
    pub curve: f64,
    pub scheme: String,
    /// `σ_max / σ_min` over the top `theorem1_dof` values, averaged.
    pub singular_value_spread: f64,
    pub edof_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenCapacityResult {
    pub summary: SweepResult,
    pub eigen: Vec<EigenRow>,
    pub capacity: Vec<CapacityRow>,
    pub spread: Vec<SpreadRow>,
}

/// Singular values and capacity curves for random versus optimized phases,
/// one curve per azimuth spread.
pub fn run_eigen_capacity(cfg: &ScenarioConfig) -> Result<EigenCapacityResult> {
    cfg.validate()?;
    let base = Instance::from_config(cfg)?;
    let mut points = Vec::new();
    for &spread in &axis_or_default(&cfg.sweep.curves, f64::NAN) {
        let clusters = if spread.is_nan() { base.clusters.clone() } else { cfg.clusters_with_spread(spread)? };
        points.push(Point { curve: spread, axis: 0.0, instance: Instance { clusters, ..base.clone() } });
    }
    let top: Vec<usize> = points.iter().map(|p| p.instance.predict().map(|d| d.lattice_dof.max(1))).collect::<Result<_>>()?;
    let (rows, trials) = run_edof_points(cfg, points, &[cfg.quantization_bits], |p, _| (p.curve, p.axis))?;

    let mut eigen = Vec::new();
    let mut capacity = Vec::new();
    let mut spread = Vec::new();
    for (ci, row) in rows.iter().enumerate() {
        let recs: Vec<&TrialRecord> = trials.iter().filter(|t| t.curve.to_bits() == row.curve.to_bits()).collect();
        let schemes: [(&str, Vec<&ScheduleOutcome>); 2] = [
            ("random", recs.iter().map(|t| &t.random).collect()),
            ("optimized", recs.iter().filter_map(|t| t.optimized.first().map(|o| &o.outcome)).collect()),
        ];
        for (scheme, outs) in schemes {
            if outs.is_empty() {
                continue;
            }
            let len = outs[0].singular_values.len();
            for i in 0..len {
                let sv: Vec<f64> = outs.iter().map(|o| o.singular_values[i]).collect();
                let norm: Vec<f64> = outs.iter().map(|o| o.singular_values[i] / o.singular_values[0].max(f64::MIN_POSITIVE)).collect();
                eigen.push(EigenRow {
                    curve: row.curve,
                    scheme: scheme.into(),
                    index: i + 1,
                    singular_value_mean: mean_std(&sv).0,
                    normalized_mean: mean_std(&norm).0,
                });
            }
            for &db in &cfg.snr_grid {
                let snr = db_to_linear(db);
                let exact: Vec<f64> = outs.iter().map(|o| capacity_from_values(&o.singular_values, base.tx.darisa_count, snr)).collect();
                let approx: Vec<f64> = outs.iter().map(|o| capacity_edof_approx(o.edof, snr)).collect();
                capacity.push(CapacityRow {
                    curve: row.curve,
                    scheme: scheme.into(),
                    snr_db: db,
                    capacity_exact: mean_std(&exact).0,
                    capacity_approx: mean_std(&approx).0,
                });
            }
            let t = top[ci].min(len);
            let ratios: Vec<f64> = outs
                .iter()
                .map(|o| o.singular_values[0] / o.singular_values[t - 1].max(f64::MIN_POSITIVE))
                .collect();
            spread.push(SpreadRow {
                curve: row.curve,
                scheme: scheme.into(),
                singular_value_spread: mean_std(&ratios).0,
                edof_mean: mean_std(&outs.iter().map(|o| o.edof).collect::<Vec<_>>()).0,
            });
        }
    }
    Ok(EigenCapacityResult {
        summary: SweepResult {
            experiment: Experiment::EigenCapacity,
            axis_name: "none".into(),
            curve_name: "azimuth_spread_deg".into(),
            rows,
            trials,
        },
        eigen,
        capacity,
        spread,
    })
}

/// Full record of one optimization, for the `optimize` verb.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingleRun {
    pub seed: u64,
    pub prediction: DofPrediction,
    pub random: ScheduleOutcome,
    pub record: OptimizationRecord,
    pub optimized: ScheduleOutcome,
}

/// Optimizes the configured instance once, at `cfg.seed`.
pub fn run_single_optimization(cfg: &ScenarioConfig) -> Result<SingleRun> {
    cfg.validate()?;
    let inst = Instance::from_config(cfg)?;
    let (lt, lr) = inst.layouts()?;
    let prediction = inst.predict()?;
    let seed = cfg.seed;
    let snr = db_to_linear(cfg.reference_snr_db);
    let ch = generate_channel(&inst.clusters, &lt, &lr, inst.tx.array_aperture(), inst.rx.array_aperture(), seed)?;
    let schedule = PhaseSchedule::random(inst.dims()?, TxPhases::Static, seed);
    let random = ScheduleOutcome::evaluate(&ch.h_w, &schedule, cfg.rank_threshold, snr)?;
    let prob = build_sdr_problem(&ch.h_w, &schedule)?;
    let record = crate::edof_optimizer::optimize(&prob, prediction.lattice_dof.max(1), &cfg.optimizer_options(), seed)?;
    let optimized = ScheduleOutcome::evaluate(
        &ch.h_w,
        &schedule.with_rx_phases(record.recovered_phases.clone())?,
        cfg.rank_threshold,
        snr,
    )?;
    Ok(SingleRun { seed, prediction, random, record, optimized })
}
