//! Builds a clustered channel, stacks `K` agile receive slots into the
//! composite channel and sends one noisy symbol through it.
//!
//! ```sh
//! cargo run --example composite_channel
//! ```

use darisa::array_geometry::{element_positions, ArrayConfig, Side};
use darisa::cluster_channel::{generate_channel, AngularSupport, Cluster, ClusterSet};
use darisa::metrics::{spectrum, DEFAULT_RANK_THRESHOLD};
use darisa::rng::{stream_rng, Stream};
use darisa::spacetime_channel::{assemble_composite, random_symbol, simulate_received, PhaseSchedule, ScheduleDims, TxPhases};

fn main() -> darisa::Result<()> {
    let tx = ArrayConfig::new(Side::Transmit, 4, 4, 0.25, 4)?;
    let rx = ArrayConfig::new(Side::Receive, 4, 4, 0.25, 2)?;
    let clusters = ClusterSet::new(vec![
        Cluster::symmetric(AngularSupport::new(1.0, 0.6, 1.2, 0.4)),
        Cluster::new(AngularSupport::new(3.5, 0.3, 1.6, 0.3), AngularSupport::new(5.0, 0.8, 1.4, 0.5)),
    ])?;
    let seed = 42;
    let ch = generate_channel(
        &clusters,
        &element_positions(&tx)?,
        &element_positions(&rx)?,
        tx.array_aperture(),
        rx.array_aperture(),
        seed,
    )?;
    let (n_t, n_r) = ch.distinct_direction_counts();
    println!("H_w is {}x{} with {n_t} departure and {n_r} arrival directions", ch.h_w.nrows(), ch.h_w.ncols());

    for k in 1..=4 {
        let dims = ScheduleDims::new(k, tx.darisa_count, rx.darisa_count, 16, 16)?;
        let schedule = PhaseSchedule::random(dims, TxPhases::Static, seed);
        let composite = assemble_composite(&ch.h_w, &schedule)?;
        let rep = spectrum(&composite.h_c, DEFAULT_RANK_THRESHOLD)?;
        println!("K={k}: H_C is {}x{}, rank {}, EDoF {:.3}", composite.h_c.nrows(), composite.h_c.ncols(), rep.numerical_rank, rep.edof);
        if k == 4 {
            let x = random_symbol(tx.darisa_count, &mut stream_rng(seed, Stream::Noise));
            let y = simulate_received(&composite, &x, 100.0, seed)?;
            println!("received {} samples, |y| = {:.3e}", y.len(), y.norm());
        }
    }
    Ok(())
}
