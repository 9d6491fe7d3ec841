//! Runs an EDoF sweep from a scenario file and writes CSV/JSON next to it.
//!
//! ```sh
//! cargo run --release --example scenario_file -- crates/core/scenarios/quick-agility.toml out/
//! ```

use std::path::PathBuf;

use darisa::experiments::{output, run_edof_experiments, Experiment, ScenarioConfig};

fn main() -> darisa::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/quick-agility.toml")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let cfg = ScenarioConfig::load(&path)?;
    let res = run_edof_experiments(&cfg, Experiment::EdofAgility)?;
    for r in &res.rows {
        println!("M={} K={}: EDoF {:.3} (theory {})", r.curve, r.axis, r.edof_opt_mean.unwrap_or(f64::NAN), r.theorem1_dof.unwrap_or(0));
    }
    for f in output::write_sweep(&out, &cfg, &res)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
