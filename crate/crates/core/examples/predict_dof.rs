//! Closed-form DoF predictions for a few link geometries.
//!
//! ```sh
//! cargo run --example predict_dof
//! ```

use darisa::array_geometry::{ArrayConfig, Side};
use darisa::cluster_channel::{AngularSupport, Cluster, ClusterSet};
use darisa::wavenumber_dof::predict;

fn main() -> darisa::Result<()> {
    let tx = ArrayConfig::square(Side::Transmit, 2.0, 0.125, 8)?;
    let rx = ArrayConfig::square(Side::Receive, 2.0, 0.125, 2)?;
    println!("{:>8} {:>3} {:>10} {:>10} {:>10} {:>9} {:>8}", "spread", "K", "d_t", "d_r", "lemma1", "theorem1", "lattice");
    for spread_deg in [15.0f64, 45.0, 90.0, 180.0] {
        let support = AngularSupport::new(std::f64::consts::PI, spread_deg.to_radians(), std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        let clusters = ClusterSet::single(Cluster::symmetric(support));
        for k in [1, 4] {
            let p = predict(&tx, &rx, &clusters, k)?;
            println!(
                "{spread_deg:>8.0} {k:>3} {:>10.2} {:>10.2} {:>10.2} {:>9} {:>8}",
                p.d_t, p.d_r, p.lemma1_dof, p.theorem1_dof, p.lattice_dof
            );
        }
    }
    Ok(())
}
