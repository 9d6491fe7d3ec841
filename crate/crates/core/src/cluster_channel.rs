//! Clustered scattering environments and the array-scattering matrix `H_w`.
//!
//! Each cluster restricts departure and arrival rays to an angular rectangle
//! `[center - spread, center + spread]` in azimuth and zenith. Directions are
//! sampled on the wavenumber lattice `(p_x / D_x, p_y / D_y)`, `p ∈ Z²`, of the
//! full array aperture, keeping the lattice points that fall inside the unit
//! disk and inside the cluster's projected support. The channel is then
//!
//! ```text
//! H_w = (1/√L) Σ_l A_r^{l H} H_a^l A_t^l
//! ```
//!
//! with unit-modulus response matrices `A` and i.i.d. CN(0, 1) scattering
//! coefficients `H_a`.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::array_geometry::{Aperture, ElementLayout, Side};
use crate::error::{Error, Result};
use crate::linalg::{singular_values, unit_phasor, CMatrix, C64, ZERO};
use crate::rng::{complex_gaussian, stream_rng, Stream};

const ANGLE_EPS: f64 = 1e-12;

/// Angular rectangle of one side of a cluster, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularSupport {
    pub azimuth_center: f64,
    pub azimuth_spread: f64,
    pub zenith_center: f64,
    pub zenith_spread: f64,
}

impl AngularSupport {
    pub fn new(azimuth_center: f64, azimuth_spread: f64, zenith_center: f64, zenith_spread: f64) -> Self {
        Self { azimuth_center, azimuth_spread, zenith_center, zenith_spread }
    }

    /// Every azimuth, zenith in `[0, π]`.
    pub fn isotropic() -> Self {
        Self::new(PI, PI, FRAC_PI_2, FRAC_PI_2)
    }

    /// A single direction.
    pub fn point(azimuth: f64, zenith: f64) -> Self {
        Self::new(azimuth, 0.0, zenith, 0.0)
    }

    fn validate(&self) -> Result<()> {
        let vals = [self.azimuth_center, self.azimuth_spread, self.zenith_center, self.zenith_spread];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCluster("angles must be finite".into()));
        }
        if self.azimuth_spread < 0.0 || self.zenith_spread < 0.0 {
            return Err(Error::InvalidCluster("angular spreads must be non-negative".into()));
        }
        Ok(())
    }

    pub fn full_azimuth(&self) -> bool {
        self.azimuth_spread >= PI
    }

    /// Zenith range clamped to `[0, π]`.
    pub fn zenith_range(&self) -> (f64, f64) {
        (
            (self.zenith_center - self.zenith_spread).clamp(0.0, PI),
            (self.zenith_center + self.zenith_spread).clamp(0.0, PI),
        )
    }

    /// Azimuth range as `(start, end)` with `end - start ≤ 2π`.
    pub fn azimuth_range(&self) -> (f64, f64) {
        if self.full_azimuth() {
            (0.0, TAU)
        } else {
            (self.azimuth_center - self.azimuth_spread, self.azimuth_center + self.azimuth_spread)
        }
    }

    pub fn has_zero_spread(&self) -> bool {
        self.azimuth_spread == 0.0 || self.zenith_spread == 0.0
    }

    pub fn contains_azimuth(&self, azimuth: f64) -> bool {
        self.full_azimuth() || circular_distance(azimuth, self.azimuth_center) <= self.azimuth_spread + ANGLE_EPS
    }

    pub fn contains_zenith(&self, zenith: f64) -> bool {
        let (lo, hi) = self.zenith_range();
        zenith >= lo - ANGLE_EPS && zenith <= hi + ANGLE_EPS
    }

    /// Membership of a normalized wavenumber point, inverted on the front
    /// hemisphere (`θ ∈ [0, π/2]`).
    pub fn contains_wavenumber(&self, k: [f64; 2]) -> bool {
        let r = k[0].hypot(k[1]);
        if r > 1.0 + ANGLE_EPS {
            return false;
        }
        let zenith = r.min(1.0).asin();
        if !self.contains_zenith(zenith) {
            return false;
        }
        // The pole belongs to every azimuth.
        r < ANGLE_EPS || self.contains_azimuth(wrap_angle(k[1].atan2(k[0])))
    }

    /// Deterministic grid over the rectangle, endpoints included.
    pub(crate) fn grid(&self, n_azimuth: usize, n_zenith: usize) -> Vec<(f64, f64)> {
        let (a0, a1) = self.azimuth_range();
        let (z0, z1) = self.zenith_range();
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if hi <= lo || n < 2 {
                vec![lo]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        let az = axis(a0, a1, n_azimuth);
        let ze = axis(z0, z1, n_zenith);
        let mut out = Vec::with_capacity(az.len() * ze.len());
        for &z in &ze {
            for &a in &az {
                out.push((a, z));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub departure: AngularSupport,
    pub arrival: AngularSupport,
}

impl Cluster {
    pub fn new(departure: AngularSupport, arrival: AngularSupport) -> Self {
        Self { departure, arrival }
    }

    /// Same support on both sides.
    pub fn symmetric(support: AngularSupport) -> Self {
        Self::new(support, support)
    }

    pub fn isotropic() -> Self {
        Self::symmetric(AngularSupport::isotropic())
    }

    pub fn support(&self, side: Side) -> &AngularSupport {
        match side {
            Side::Transmit => &self.departure,
            Side::Receive => &self.arrival,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
}

impl ClusterSet {
    pub fn new(clusters: Vec<Cluster>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::InvalidCluster("a cluster set needs at least one cluster".into()));
        }
        for c in &clusters {
            c.departure.validate()?;
            c.arrival.validate()?;
        }
        Ok(Self { clusters })
    }

    pub fn single(cluster: Cluster) -> Self {
        Self { clusters: vec![cluster] }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// The `1/√L` factor applied to the cluster sum.
    pub fn power_normalization(&self) -> f64 {
        1.0 / (self.clusters.len() as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    pub azimuth: f64,
    pub zenith: f64,
    /// `(sinθ cosφ, sinθ sinφ)`.
    pub wavenumber: [f64; 2],
    /// Integer lattice coordinates `(p_x, p_y)`.
    pub lattice: [i64; 2],
}

/// `(sinθ cosφ, sinθ sinφ)`: the wavenumber projection normalized by `2π/λ`.
pub fn angle_to_wavenumber(azimuth: f64, zenith: f64) -> [f64; 2] {
    let s = zenith.sin();
    [s * azimuth.cos(), s * azimuth.sin()]
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU { 0.0 } else { w }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn lattice_sample(p: [i64; 2], aperture: Aperture) -> DirectionSample {
    let k = [p[0] as f64 / aperture.x, p[1] as f64 / aperture.y];
    let r = k[0].hypot(k[1]).min(1.0);
    let azimuth = if r < ANGLE_EPS { 0.0 } else { wrap_angle(k[1].atan2(k[0])) };
    DirectionSample { azimuth, zenith: r.asin(), wavenumber: k, lattice: p }
}

/// Every lattice point `(p_x / D_x, p_y / D_y)` inside the closed unit disk.
pub fn lattice_points(aperture: Aperture) -> Vec<[i64; 2]> {
    let px_max = (aperture.x + ANGLE_EPS).floor() as i64;
    let py_max = (aperture.y + ANGLE_EPS).floor() as i64;
    let mut out = Vec::new();
    for py in -py_max..=py_max {
        for px in -px_max..=px_max {
            let kx = px as f64 / aperture.x;
            let ky = py as f64 / aperture.y;
            if kx * kx + ky * ky <= 1.0 + ANGLE_EPS {
                out.push([px, py]);
            }
        }
    }
    out
}

/// Number of lattice points in the unit disk, `|E_g|`.
pub fn lattice_cardinality(aperture: Aperture) -> usize {
    lattice_points(aperture).len()
}

/// Lattice directions inside one angular support.
///
/// Supports with a zero spread that contain no lattice point exactly snap to
/// the single lattice point nearest to their projection. Otherwise an empty
/// result means the support is too narrow for this aperture.
pub fn sample_support_directions(support: &AngularSupport, aperture: Aperture) -> Result<Vec<DirectionSample>> {
    if !(aperture.x > 0.0 && aperture.y > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "aperture dimensions must be positive, got {} x {}",
            aperture.x, aperture.y
        )));
    }
    support.validate()?;
    let lattice = lattice_points(aperture);
    let samples: Vec<DirectionSample> = lattice
        .iter()
        .map(|&p| lattice_sample(p, aperture))
        .filter(|s| support.contains_wavenumber(s.wavenumber))
        .collect();
    if !samples.is_empty() || !support.has_zero_spread() {
        return Ok(samples);
    }
    let curve: Vec<[f64; 2]> = support
        .grid(721, 361)
        .into_iter()
        .map(|(a, z)| angle_to_wavenumber(a, z))
        .collect();
    let nearest = lattice
        .iter()
        .map(|&p| {
            let s = lattice_sample(p, aperture);
            let d = curve
                .iter()
                .map(|c| (c[0] - s.wavenumber[0]).hypot(c[1] - s.wavenumber[1]))
                .fold(f64::INFINITY, f64::min);
            (d, s)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, s)| s);
    Ok(nearest.into_iter().collect())
}

pub fn sample_cluster_directions(cluster: &Cluster, aperture: Aperture, side: Side) -> Result<Vec<DirectionSample>> {
    sample_support_directions(cluster.support(side), aperture)
}

/// `d × n` response matrix with entries `exp(-j2π (x κ_x + y κ_y + z κ_z))`.
pub fn response_matrix(samples: &[DirectionSample], layout: &ElementLayout) -> CMatrix {
    CMatrix::from_fn(samples.len(), layout.len(), |s, e| {
        let d = &samples[s];
        let p = layout.positions[e];
        let kz = d.zenith.cos();
        unit_phasor(-TAU * (p[0] * d.wavenumber[0] + p[1] * d.wavenumber[1] + p[2] * kz))
    })
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Per cluster, `d_t^l × M N_t`.
    pub a_t: Vec<CMatrix>,
    /// Per cluster, `d_r^l × N N_r`.
    pub a_r: Vec<CMatrix>,
    /// Per cluster, `d_r^l × d_t^l`.
    pub h_a: Vec<CMatrix>,
    /// `N N_r × M N_t`.
    pub h_w: CMatrix,
    pub seed: u64,
    pub tx_directions: Vec<Vec<DirectionSample>>,
    pub rx_directions: Vec<Vec<DirectionSample>>,
}

impl ChannelRealization {
    pub fn cluster_count(&self) -> usize {
        self.h_a.len()
    }

    fn scale(&self) -> f64 {
        1.0 / (self.cluster_count() as f64).sqrt()
    }

    /// `(1/√L) Σ A_r^H H_a A_t` from the stored factors.
    pub fn reassemble(&self) -> CMatrix {
        assemble(&self.a_t, &self.a_r, &self.h_a)
    }

    /// Per-cluster sample counts `(d_t^l, d_r^l)`.
    pub fn direction_counts(&self) -> Vec<(usize, usize)> {
        self.a_t.iter().zip(&self.a_r).map(|(t, r)| (t.nrows(), r.nrows())).collect()
    }

    /// Distinct lattice directions over all clusters, `(d_t, d_r)`.
    pub fn distinct_direction_counts(&self) -> (usize, usize) {
        (distinct_lattice(&self.tx_directions), distinct_lattice(&self.rx_directions))
    }

    /// Singular values of `H_w` computed from the factored form.
    ///
    /// With `[A_r^1H .. A_r^LH] = Q_r R_r` and `[A_t^1H .. A_t^LH] = Q_t R_t`,
    /// `H_w = Q_r (R_r B R_t^H) Q_t^H` for the block-diagonal `B` of scaled
    /// `H_a`, so the spectrum is that of the small core `R_r B R_t^H`.
    pub fn singular_values(&self) -> Vec<f64> {
        let dr: usize = self.a_r.iter().map(|a| a.nrows()).sum();
        let dt: usize = self.a_t.iter().map(|a| a.nrows()).sum();
        let nr = self.h_w.nrows();
        let nt = self.h_w.ncols();
        let mut ar_h = CMatrix::zeros(nr, dr);
        let mut at_h = CMatrix::zeros(nt, dt);
        let mut blk = CMatrix::zeros(dr, dt);
        let (mut r0, mut t0) = (0, 0);
        let s = C64::new(self.scale(), 0.0);
        for ((a_r, a_t), h_a) in self.a_r.iter().zip(&self.a_t).zip(&self.h_a) {
            ar_h.view_mut((0, r0), (nr, a_r.nrows())).copy_from(&a_r.adjoint());
            at_h.view_mut((0, t0), (nt, a_t.nrows())).copy_from(&a_t.adjoint());
            blk.view_mut((r0, t0), (a_r.nrows(), a_t.nrows())).copy_from(&(h_a * s));
            r0 += a_r.nrows();
            t0 += a_t.nrows();
        }
        let r_r = ar_h.qr().r();
        let r_t = at_h.qr().r();
        singular_values(&(r_r * blk * r_t.adjoint()))
    }
}

fn distinct_lattice(per_cluster: &[Vec<DirectionSample>]) -> usize {
    per_cluster
        .iter()
        .flatten()
        .map(|s| s.lattice)
        .collect::<BTreeSet<_>>()
        .len()
}

fn assemble(a_t: &[CMatrix], a_r: &[CMatrix], h_a: &[CMatrix]) -> CMatrix {
    let nr = a_r.first().map_or(0, |a| a.ncols());
    let nt = a_t.first().map_or(0, |a| a.ncols());
    let mut h_w = CMatrix::zeros(nr, nt);
    for ((a_t, a_r), h) in a_t.iter().zip(a_r).zip(h_a) {
        let tmp = h * a_t;
        h_w.gemm_ad(C64::new(1.0, 0.0), a_r, &tmp, C64::new(1.0, 0.0));
    }
    let scale = 1.0 / (h_a.len().max(1) as f64).sqrt();
    h_w.scale_mut(scale);
    h_w
}

/// Draws one channel realization; a pure function of its inputs and `seed`.
pub fn generate_channel(
    clusters: &ClusterSet,
    tx: &ElementLayout,
    rx: &ElementLayout,
    tx_aperture: Aperture,
    rx_aperture: Aperture,
    seed: u64,
) -> Result<ChannelRealization> {
    if tx.is_empty() || rx.is_empty() {
        return Err(Error::InvalidParameter("element layouts must be non-empty".into()));
    }
    if clusters.is_empty() {
        return Err(Error::InvalidCluster("no clusters".into()));
    }
    let mut rng = stream_rng(seed, Stream::Channel);
    let mut out = ChannelRealization {
        a_t: Vec::with_capacity(clusters.len()),
        a_r: Vec::with_capacity(clusters.len()),
        h_a: Vec::with_capacity(clusters.len()),
        h_w: CMatrix::zeros(0, 0),
        seed,
        tx_directions: Vec::with_capacity(clusters.len()),
        rx_directions: Vec::with_capacity(clusters.len()),
    };
    for (l, cluster) in clusters.clusters.iter().enumerate() {
        let dep = sample_cluster_directions(cluster, tx_aperture, Side::Transmit)?;
        if dep.is_empty() {
            return Err(Error::DegenerateCluster { cluster: l, side: "departure" });
        }
        let arr = sample_cluster_directions(cluster, rx_aperture, Side::Receive)?;
        if arr.is_empty() {
            return Err(Error::DegenerateCluster { cluster: l, side: "arrival" });
        }
        let mut h_a = DMatrix::from_element(arr.len(), dep.len(), ZERO);
        for i in 0..arr.len() {
            for j in 0..dep.len() {
                h_a[(i, j)] = complex_gaussian(&mut rng);
            }
        }
        out.a_t.push(response_matrix(&dep, tx));
        out.a_r.push(response_matrix(&arr, rx));
        out.h_a.push(h_a);
        out.tx_directions.push(dep);
        out.rx_directions.push(arr);
    }
    out.h_w = assemble(&out.a_t, &out.a_r, &out.h_a);
    Ok(out)
}
