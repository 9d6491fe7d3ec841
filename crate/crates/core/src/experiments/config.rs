//! Scenario files.
//!
//! A scenario is a TOML document. Every key has a default, so an empty file is
//! a valid (isotropic, single-DARISA) scenario:
//!
//! ```toml
//! seed = 7
//! trials = 20
//! k = 4
//! rank_threshold = 1e-3
//! snr_grid = [-10.0, 0.0, 10.0, 20.0, 30.0]   # dB
//! reference_snr_db = 10.0
//! quantization_bits = 2                       # omit for continuous phases
//!
//! [tx]
//! n_x = 16        # elements per DARISA row
//! n_y = 16
//! spacing = 0.125 # wavelengths
//! count = 8       # M
//!
//! [rx]
//! n_x = 16
//! n_y = 16
//! spacing = 0.125
//! count = 2       # N
//!
//! [[clusters]]
//! departure = { azimuth_center_deg = 180.0, azimuth_spread_deg = 180.0 }
//! # arrival defaults to departure
//!
//! [optimizer]
//! epsilon = 1e-3
//! num_draws = 100
//!
//! [sweep]
//! values = [1.0, 2.0, 4.0]
//! curves = [30.0, 90.0, 180.0]
//! ```
//!
//! Spreads are half-widths in degrees. What `sweep.values` and `sweep.curves`
//! mean depends on the experiment, see [`super::Experiment`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::array_geometry::{ArrayConfig, Side};
use crate::cluster_channel::{AngularSupport, Cluster, ClusterSet};
use crate::edof_optimizer::{DinkelbachOptions, OptimizerOptions, SolverMethod, SolverOptions, Surrogate};
use crate::error::{Error, Result};

use super::Experiment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySpec {
    pub n_x: usize,
    pub n_y: usize,
    pub spacing: f64,
    pub count: usize,
}

impl ArraySpec {
    pub fn to_config(self, side: Side) -> Result<ArrayConfig> {
        ArrayConfig::new(side, self.n_x, self.n_y, self.spacing, self.count)
    }

    /// DARISA edge length in wavelengths along x.
    pub fn side_length(&self) -> f64 {
        self.n_x as f64 * self.spacing
    }

    /// Same DARISA size resampled at `spacing`.
    pub fn with_spacing(self, spacing: f64) -> Self {
        let n_x = (self.n_x as f64 * self.spacing / spacing).round().max(1.0) as usize;
        let n_y = (self.n_y as f64 * self.spacing / spacing).round().max(1.0) as usize;
        Self { n_x, n_y, spacing, count: self.count }
    }

    /// Same DARISA size sampled with `n` elements per row and column.
    pub fn with_elements(self, n: usize) -> Self {
        let spacing = self.side_length() / n as f64;
        Self { n_x: n, n_y: n, spacing, count: self.count }
    }

    /// Square DARISA of `side` wavelengths at the current spacing.
    pub fn with_side(self, side: f64) -> Self {
        let n = (side / self.spacing).round().max(1.0) as usize;
        Self { n_x: n, n_y: n, spacing: self.spacing, count: self.count }
    }
}

impl Default for ArraySpec {
    fn default() -> Self {
        Self { n_x: 4, n_y: 4, spacing: 0.25, count: 1 }
    }
}

/// Angular support in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupportSpec {
    pub azimuth_center_deg: f64,
    pub azimuth_spread_deg: f64,
    pub zenith_center_deg: f64,
    pub zenith_spread_deg: f64,
}

impl Default for SupportSpec {
    fn default() -> Self {
        Self { azimuth_center_deg: 180.0, azimuth_spread_deg: 180.0, zenith_center_deg: 90.0, zenith_spread_deg: 90.0 }
    }
}

impl SupportSpec {
    pub fn to_support(self) -> AngularSupport {
        AngularSupport::new(
            self.azimuth_center_deg.to_radians(),
            self.azimuth_spread_deg.to_radians(),
            self.zenith_center_deg.to_radians(),
            self.zenith_spread_deg.to_radians(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    #[serde(default)]
    pub departure: SupportSpec,
    pub arrival: Option<SupportSpec>,
}

impl ClusterSpec {
    pub fn to_cluster(self) -> Cluster {
        Cluster::new(self.departure.to_support(), self.arrival.unwrap_or(self.departure).to_support())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSpec {
    pub epsilon: f64,
    pub f_tol_rel: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub num_draws: usize,
    pub method: SolverMethod,
    pub surrogate: Surrogate,
    pub rank_one_refinement: bool,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        let d = DinkelbachOptions::default();
        Self {
            epsilon: d.epsilon,
            f_tol_rel: d.f_tol_rel,
            tol: d.solver.tol,
            max_iters: d.solver.max_iters,
            num_draws: OptimizerOptions::default().num_draws,
            method: d.solver.method,
            surrogate: d.solver.surrogate,
            rank_one_refinement: OptimizerOptions::default().rank_one_refinement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// `"aperture"` or `"spread"`; only the DoF sweep reads it.
    pub axis: Option<String>,
    pub values: Vec<f64>,
    pub curves: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub trials: usize,
    pub k: usize,
    pub rank_threshold: f64,
    /// Capacity curve SNRs in dB.
    pub snr_grid: Vec<f64>,
    /// SNR for the capacity columns of sweep tables, in dB.
    pub reference_snr_db: f64,
    pub quantization_bits: Option<u32>,
    pub tx: ArraySpec,
    pub rx: ArraySpec,
    pub clusters: Vec<ClusterSpec>,
    pub optimizer: OptimizerSpec,
    pub sweep: SweepSpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 100,
            k: 1,
            rank_threshold: crate::metrics::DEFAULT_RANK_THRESHOLD,
            snr_grid: (-2..=6).map(|i| f64::from(i) * 5.0).collect(),
            reference_snr_db: 10.0,
            quantization_bits: None,
            tx: ArraySpec::default(),
            rx: ArraySpec::default(),
            clusters: vec![ClusterSpec::default()],
            optimizer: OptimizerSpec::default(),
            sweep: SweepSpec::default(),
        }
    }
}

fn single_spread(spread_deg: f64) -> Vec<ClusterSpec> {
    vec![ClusterSpec { departure: SupportSpec { azimuth_spread_deg: spread_deg, ..SupportSpec::default() }, arrival: None }]
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.rank_threshold > 0.0 && self.rank_threshold < 1.0) {
            return Err(Error::Config(format!("rank_threshold must lie in (0, 1), got {}", self.rank_threshold)));
        }
        if let Some(bad) = self.snr_grid.iter().chain([&self.reference_snr_db]).find(|s| !s.is_finite()) {
            return Err(Error::Config(format!("SNR values must be finite, got {bad}")));
        }
        if self.clusters.is_empty() {
            return Err(Error::Config("at least one cluster is required".into()));
        }
        if self.sweep.values.iter().chain(&self.sweep.curves).any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep values must be finite".into()));
        }
        let o = &self.optimizer;
        if !(o.epsilon > 0.0 && o.tol > 0.0 && o.f_tol_rel > 0.0) || o.max_iters == 0 || o.num_draws == 0 {
            return Err(Error::Config("optimizer knobs must be positive".into()));
        }
        self.tx_config()?;
        self.rx_config()?;
        self.cluster_set()?;
        Ok(())
    }

    pub fn tx_config(&self) -> Result<ArrayConfig> {
        self.tx.to_config(Side::Transmit)
    }

    pub fn rx_config(&self) -> Result<ArrayConfig> {
        self.rx.to_config(Side::Receive)
    }

    pub fn cluster_set(&self) -> Result<ClusterSet> {
        ClusterSet::new(self.clusters.iter().map(|c| c.to_cluster()).collect())
    }

    /// Clusters with every azimuth spread replaced by `spread_deg`.
    pub fn clusters_with_spread(&self, spread_deg: f64) -> Result<ClusterSet> {
        let set = |s: SupportSpec| SupportSpec { azimuth_spread_deg: spread_deg, ..s };
        ClusterSet::new(
            self.clusters
                .iter()
                .map(|c| ClusterSpec { departure: set(c.departure), arrival: c.arrival.map(set) }.to_cluster())
                .collect(),
        )
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        let o = &self.optimizer;
        OptimizerOptions {
            dinkelbach: DinkelbachOptions {
                epsilon: o.epsilon,
                f_tol_rel: o.f_tol_rel,
                solver: SolverOptions {
                    tol: o.tol,
                    max_iters: o.max_iters,
                    method: o.method,
                    surrogate: o.surrogate,
                    ..SolverOptions::default()
                },
            },
            num_draws: o.num_draws,
            quantization_bits: self.quantization_bits,
            rank_one_refinement: o.rank_one_refinement,
        }
    }

    /// Built-in scenario mirroring the published setup of each experiment.
    pub fn preset(experiment: Experiment) -> Self {
        let base = Self::default();
        match experiment {
            Experiment::DofSweep => Self {
                tx: ArraySpec { n_x: 16, n_y: 16, spacing: 0.25, count: 1 },
                rx: ArraySpec { n_x: 16, n_y: 16, spacing: 0.25, count: 1 },
                sweep: SweepSpec {
                    axis: Some("aperture".into()),
                    values: (1..=8).map(f64::from).collect(),
                    curves: vec![30.0, 90.0, 180.0],
                },
                ..base
            },
            Experiment::EigenCapacity | Experiment::Optimize | Experiment::Predict => Self {
                k: 4,
                tx: ArraySpec { n_x: 16, n_y: 16, spacing: 0.125, count: 8 },
                rx: ArraySpec { n_x: 16, n_y: 16, spacing: 0.125, count: 2 },
                sweep: SweepSpec {
                    curves: if experiment == Experiment::EigenCapacity { vec![30.0, 90.0, 180.0] } else { vec![] },
                    ..SweepSpec::default()
                },
                ..base
            },
            Experiment::EdofSpacing => Self {
                k: 2,
                tx: ArraySpec { n_x: 4, n_y: 4, spacing: 0.25, count: 4 },
                rx: ArraySpec { n_x: 4, n_y: 4, spacing: 0.25, count: 2 },
                sweep: SweepSpec {
                    axis: None,
                    values: vec![0.5, 0.25, 0.2, 1.0 / 6.0, 0.125],
                    curves: vec![30.0, 90.0, 180.0],
                },
                ..base
            },
            Experiment::EdofAgility => Self {
                tx: ArraySpec { n_x: 4, n_y: 4, spacing: 0.25, count: 4 },
                rx: ArraySpec { n_x: 4, n_y: 4, spacing: 0.25, count: 2 },
                sweep: SweepSpec { axis: None, values: (1..=6).map(f64::from).collect(), curves: vec![2.0, 4.0, 8.0] },
                ..base
            },
            Experiment::EdofElements | Experiment::EdofBits => Self {
                k: 3,
                tx: ArraySpec { n_x: 8, n_y: 8, spacing: 0.25, count: 6 },
                rx: ArraySpec { n_x: 8, n_y: 8, spacing: 0.25, count: 2 },
                sweep: if experiment == Experiment::EdofElements {
                    SweepSpec { axis: None, values: vec![4.0, 6.0, 8.0, 10.0, 12.0], curves: vec![1.0, 2.0, 3.0, 0.0] }
                } else {
                    SweepSpec { axis: None, values: vec![1.0, 2.0, 3.0, 0.0], curves: vec![] }
                },
                ..base
            },
        }
    }

    /// Single-cluster scenario with a symmetric azimuth spread, handy for tests.
    pub fn with_single_spread(mut self, spread_deg: f64) -> Self {
        self.clusters = single_spread(spread_deg);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(ScenarioConfig::from_toml_str("").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn arrival_defaults_to_departure() {
        let cfg = ScenarioConfig::from_toml_str(
            "[[clusters]]\ndeparture = { azimuth_center_deg = 90.0, azimuth_spread_deg = 15.0 }\n",
        )
        .unwrap();
        let c = cfg.cluster_set().unwrap().clusters[0];
        assert_eq!(c.departure, c.arrival);
        assert!((c.departure.azimuth_spread - 15f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml_str("trails = 3\n").is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(matches!(ScenarioConfig::from_toml_str("trials = 0\n"), Err(Error::Config(_))));
    }

    #[test]
    fn presets_round_trip_through_toml() {
        for e in Experiment::ALL {
            let cfg = ScenarioConfig::preset(e);
            cfg.validate().unwrap();
            let back = ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
            assert_eq!(back, cfg, "{e:?}");
        }
    }

    #[test]
    fn resampling_keeps_the_darisa_size() {
        let a = ArraySpec { n_x: 4, n_y: 4, spacing: 0.25, count: 2 };
        let b = a.with_spacing(0.125);
        assert_eq!((b.n_x, b.n_y), (8, 8));
        let c = a.with_elements(5);
        assert!((c.side_length() - 1.0).abs() < 1e-12);
        assert_eq!(a.with_side(3.0).n_x, 12);
    }
}
