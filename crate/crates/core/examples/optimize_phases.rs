//! Maximizes the EDoF of one composite channel and prints the bisection trace.
//!
//! ```sh
//! cargo run --release --example optimize_phases
//! ```

use darisa::array_geometry::{element_positions, ArrayConfig, Side};
use darisa::cluster_channel::{generate_channel, Cluster, ClusterSet};
use darisa::edof_optimizer::{build_sdr_problem, optimize, OptimizerOptions};
use darisa::metrics::{spectrum, DEFAULT_RANK_THRESHOLD};
use darisa::spacetime_channel::{composite_matrix, PhaseSchedule, ScheduleDims, TxPhases};
use darisa::wavenumber_dof::predict;

fn main() -> darisa::Result<()> {
    let tx = ArrayConfig::new(Side::Transmit, 4, 4, 0.25, 4)?;
    let rx = ArrayConfig::new(Side::Receive, 4, 4, 0.25, 2)?;
    let clusters = ClusterSet::single(Cluster::isotropic());
    let k = 3;
    let seed = 7;
    let ch = generate_channel(&clusters, &element_positions(&tx)?, &element_positions(&rx)?, tx.array_aperture(), rx.array_aperture(), seed)?;
    let schedule = PhaseSchedule::random(ScheduleDims::new(k, 4, 2, 16, 16)?, TxPhases::Static, seed);
    let before = spectrum(&composite_matrix(&ch.h_w, &schedule)?, DEFAULT_RANK_THRESHOLD)?;

    let bound = predict(&tx, &rx, &clusters, k)?.lattice_dof;
    let prob = build_sdr_problem(&ch.h_w, &schedule)?;
    let rec = optimize(&prob, bound, &OptimizerOptions::default(), seed)?;
    for (i, s) in rec.run.iterations.iter().enumerate() {
        println!("step {:>2}: ζ = {:.5}  F = {:+.3e}", i + 1, s.zeta, s.f);
    }
    let after = spectrum(&composite_matrix(&ch.h_w, &schedule.with_rx_phases(rec.recovered_phases.clone())?)?, DEFAULT_RANK_THRESHOLD)?;
    println!("DoF bound {bound}, relaxed EDoF {:.3}", rec.run.relaxed_edof());
    println!("EDoF {:.3} with random phases, {:.3} optimized", before.edof, after.edof);
    Ok(())
}
