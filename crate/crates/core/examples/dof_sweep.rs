//! Mean rank of the array-scattering channel as the aperture grows, next to
//! the area-law prediction.
//!
//! ```sh
//! cargo run --release --example dof_sweep
//! ```

use darisa::experiments::{run_dof_sweep, Experiment, ScenarioConfig};

fn main() -> darisa::Result<()> {
    let mut cfg = ScenarioConfig::preset(Experiment::DofSweep);
    cfg.trials = 5;
    cfg.sweep.values = vec![1.0, 2.0, 3.0, 4.0];
    cfg.sweep.curves = vec![30.0, 180.0];
    let res = run_dof_sweep(&cfg)?;
    println!("{:>8} {:>8} {:>10} {:>8} {:>8}", "spread", "side λ", "mean rank", "lemma1", "lattice");
    for r in &res.rows {
        println!("{:>8} {:>8} {:>10.2} {:>8.2} {:>8}", r.curve, r.axis, r.rank_mean, r.lemma1_dof, r.lattice_dof);
    }
    Ok(())
}
