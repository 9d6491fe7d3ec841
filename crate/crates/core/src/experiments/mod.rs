//! Seeded Monte Carlo experiments and their CSV/JSON outputs.
//!
//! Each trial `t` derives its seed as `seed ^ t`, trials fan out over the
//! current rayon pool and are collected in trial order, so results do not
//! depend on the thread count.

pub mod config;
pub mod output;
pub mod sweeps;

use serde::{Deserialize, Serialize};

pub use config::ScenarioConfig;
pub use sweeps::{
    run_dof_sweep, run_edof_experiments, run_eigen_capacity, run_single_optimization, EigenCapacityResult, Instance,
    SingleRun, SweepResult, SweepRow, TrialRecord,
};

/// The experiments behind the CLI verbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DofSweep,
    EigenCapacity,
    EdofSpacing,
    EdofAgility,
    EdofElements,
    EdofBits,
    Optimize,
    Predict,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::DofSweep,
        Experiment::EigenCapacity,
        Experiment::EdofSpacing,
        Experiment::EdofAgility,
        Experiment::EdofElements,
        Experiment::EdofBits,
        Experiment::Optimize,
        Experiment::Predict,
    ];

    /// CLI verb, also the stem of output file names.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::DofSweep => "dof-sweep",
            Experiment::EigenCapacity => "eigen-capacity",
            Experiment::EdofSpacing => "edof-spacing",
            Experiment::EdofAgility => "edof-agility",
            Experiment::EdofElements => "edof-elements",
            Experiment::EdofBits => "edof-bits",
            Experiment::Optimize => "optimize",
            Experiment::Predict => "predict",
        }
    }
}
