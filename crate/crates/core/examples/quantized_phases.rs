//! Recovers phases from one relaxed solution at several bit depths.
//!
//! ```sh
//! cargo run --release --example quantized_phases
//! ```

use darisa::array_geometry::{element_positions, ArrayConfig, Side};
use darisa::cluster_channel::{generate_channel, Cluster, ClusterSet};
use darisa::edof_optimizer::{build_sdr_problem, dinkelbach_bisect, gaussian_randomize, quantize_phase, DinkelbachOptions};
use darisa::spacetime_channel::{PhaseSchedule, ScheduleDims, TxPhases};
use darisa::wavenumber_dof::predict;

fn main() -> darisa::Result<()> {
    println!("1.3 rad on a 2-bit grid -> {:.4}", quantize_phase(1.3, 2)?);

    let tx = ArrayConfig::new(Side::Transmit, 8, 8, 0.25, 6)?;
    let rx = ArrayConfig::new(Side::Receive, 8, 8, 0.25, 2)?;
    let clusters = ClusterSet::single(Cluster::isotropic());
    let (k, seed) = (3, 1);
    let ch = generate_channel(&clusters, &element_positions(&tx)?, &element_positions(&rx)?, tx.array_aperture(), rx.array_aperture(), seed)?;
    let schedule = PhaseSchedule::random(ScheduleDims::new(k, 6, 2, 64, 64)?, TxPhases::Static, seed);
    let prob = build_sdr_problem(&ch.h_w, &schedule)?;
    let run = dinkelbach_bisect(&prob, predict(&tx, &rx, &clusters, k)?.lattice_dof, &DinkelbachOptions::default())?;
    println!("relaxed EDoF {:.3}", run.relaxed_edof());
    for bits in [Some(1), Some(2), Some(3), None] {
        let r = gaussian_randomize(&run.e_opt, &prob, 100, seed, bits)?;
        let label = bits.map_or("continuous".to_string(), |b| format!("{b} bit"));
        println!("{label:>10}: EDoF {:.3} (best of {} draws at draw {})", r.edof, r.num_draws, r.best_draw);
    }
    Ok(())
}
