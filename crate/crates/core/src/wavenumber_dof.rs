//! Closed-form DoF predictions.
//!
//! Two flavours of the per-side scattering DoF `d` are reported. The ellipse
//! approximation `c1 c2 π D_x D_y` is the continuous estimate; the lattice count
//! is the number of distinct wavenumber samples the channel generator actually
//! draws, which is the exact ray count behind `H_w`.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::array_geometry::{Aperture, ArrayConfig, Side};
use crate::cluster_channel::{angle_to_wavenumber, sample_cluster_directions, AngularSupport, ClusterSet};
use crate::error::{Error, Result};

/// Grid resolution used for the support extents unless overridden.
pub const DEFAULT_ELLIPSE_GRID: (usize, usize) = (721, 361);

/// Normalized semi-axes of the axis-aligned ellipse around a projected support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportEllipse {
    pub c1: f64,
    pub c2: f64,
}

impl SupportEllipse {
    pub const FULL: SupportEllipse = SupportEllipse { c1: 1.0, c2: 1.0 };

    /// Area fraction of the unit disk.
    pub fn fill(&self) -> f64 {
        self.c1 * self.c2
    }
}

fn extents_of(support: &AngularSupport, grid: (usize, usize), c1: &mut f64, c2: &mut f64) {
    let mut visit = |az: f64, ze: f64| {
        let k = angle_to_wavenumber(az, ze);
        *c1 = c1.max(k[0].abs());
        *c2 = c2.max(k[1].abs());
    };
    for (az, ze) in support.grid(grid.0, grid.1) {
        visit(az, ze);
    }
    // |sinθ cosφ| and |sinθ sinφ| separate, so their maxima sit at range ends
    // or at the stationary points φ = qπ/2, θ = π/2.
    let (a0, a1) = support.azimuth_range();
    let (z0, z1) = support.zenith_range();
    let mut azimuths = vec![a0, a1];
    for q in -4..=8 {
        let a = q as f64 * FRAC_PI_2;
        if a >= a0 && a <= a1 {
            azimuths.push(a);
        }
    }
    let mut zeniths = vec![z0, z1];
    if z0 <= FRAC_PI_2 && FRAC_PI_2 <= z1 {
        zeniths.push(FRAC_PI_2);
    }
    for &az in &azimuths {
        for &ze in &zeniths {
            visit(az, ze);
        }
    }
}

/// Extents `(max |κ_x|, max |κ_y|)` over every cluster's support on `side`.
pub fn support_ellipse(clusters: &ClusterSet, side: Side) -> SupportEllipse {
    support_ellipse_with_grid(clusters, side, DEFAULT_ELLIPSE_GRID)
}

pub fn support_ellipse_with_grid(clusters: &ClusterSet, side: Side, grid: (usize, usize)) -> SupportEllipse {
    let (mut c1, mut c2) = (0.0f64, 0.0f64);
    for c in &clusters.clusters {
        extents_of(c.support(side), grid, &mut c1, &mut c2);
    }
    SupportEllipse { c1: c1.clamp(0.0, 1.0), c2: c2.clamp(0.0, 1.0) }
}

/// Ellipse estimate of the spatial DoF on each side and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaDof {
    pub d_t: f64,
    pub d_r: f64,
    pub dof: f64,
}

pub fn lemma1_dof(
    aperture_t: Aperture,
    aperture_r: Aperture,
    ellipse_t: SupportEllipse,
    ellipse_r: SupportEllipse,
) -> LemmaDof {
    let d_t = ellipse_t.fill() * PI * aperture_t.area();
    let d_r = ellipse_r.fill() * PI * aperture_r.area();
    LemmaDof { d_t, d_r, dof: d_t.min(d_r) }
}

/// `min(K N, M, ⌊d_t⌋, ⌊d_r⌋)`.
pub fn theorem1_dof(k: usize, n: usize, m: usize, d_t: f64, d_r: f64) -> usize {
    let floor = |d: f64| if d.is_finite() && d > 0.0 { d.floor() as usize } else { 0 };
    (k * n).min(m).min(floor(d_t)).min(floor(d_r))
}

/// Distinct lattice directions drawn for the whole cluster set on one side.
pub fn lattice_direction_count(clusters: &ClusterSet, aperture: Aperture, side: Side) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for c in &clusters.clusters {
        for s in sample_cluster_directions(c, aperture, side)? {
            seen.insert(s.lattice);
        }
    }
    Ok(seen.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofPrediction {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub ellipse_t: SupportEllipse,
    pub ellipse_r: SupportEllipse,
    /// Ellipse estimate `c1 c2 π D̃_x D̃_y` per side.
    pub d_t: f64,
    pub d_r: f64,
    pub lemma1_dof: f64,
    /// Composite-channel DoF from the ellipse estimates.
    pub theorem1_dof: usize,
    /// Exact per-side ray counts on the wavenumber lattice.
    pub lattice_d_t: usize,
    pub lattice_d_r: usize,
    /// Composite-channel DoF from the lattice counts; this is the rank a
    /// generic phase schedule attains on generated channels.
    pub lattice_dof: usize,
}

impl DofPrediction {
    /// Numerical rank of `H_w` implied by the sampled rays.
    pub fn spatial_lattice_dof(&self) -> usize {
        self.lattice_d_t.min(self.lattice_d_r)
    }
}

/// Full prediction for a link with `k` agile slots.
pub fn predict(tx: &ArrayConfig, rx: &ArrayConfig, clusters: &ClusterSet, k: usize) -> Result<DofPrediction> {
    if k == 0 {
        return Err(Error::InvalidParameter("agility K must be at least 1".into()));
    }
    tx.validate()?;
    rx.validate()?;
    let (ap_t, ap_r) = (tx.array_aperture(), rx.array_aperture());
    let ellipse_t = support_ellipse(clusters, Side::Transmit);
    let ellipse_r = support_ellipse(clusters, Side::Receive);
    let lemma = lemma1_dof(ap_t, ap_r, ellipse_t, ellipse_r);
    let (m, n) = (tx.darisa_count, rx.darisa_count);
    let lattice_d_t = lattice_direction_count(clusters, ap_t, Side::Transmit)?;
    let lattice_d_r = lattice_direction_count(clusters, ap_r, Side::Receive)?;
    Ok(DofPrediction {
        k,
        n,
        m,
        ellipse_t,
        ellipse_r,
        d_t: lemma.d_t,
        d_r: lemma.d_r,
        lemma1_dof: lemma.dof,
        theorem1_dof: theorem1_dof(k, n, m, lemma.d_t, lemma.d_r),
        lattice_d_t,
        lattice_d_r,
        lattice_dof: theorem1_dof(k, n, m, lattice_d_t as f64, lattice_d_r as f64),
    })
}
