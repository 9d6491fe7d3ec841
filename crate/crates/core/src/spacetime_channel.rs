//! Agile phase schedules and the composite spatial-temporal channel.
//!
//! Slot `k` observes `Q̃_r(t_k)^H H_w Q̃_t(t_k)`, an `N × M` block. Stacking the
//! `K` slots gives `H_C = Q̄_r^H H̄_w Q̄_t` of size `KN × M`, where `Q̄_t` stacks
//! the per-slot transmit blocks vertically, `Q̄_r` is block diagonal over
//! slots and `H̄_w` repeats `H_w` on its diagonal.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unit_phasor, CMatrix, CVector, C64, ZERO};
use crate::rng::{complex_gaussian, stream_rng, uniform_phase, Stream};

/// Sizes shared by a schedule and the channel it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDims {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub n_t: usize,
    pub n_r: usize,
}

impl ScheduleDims {
    pub fn new(k: usize, m: usize, n: usize, n_t: usize, n_r: usize) -> Result<Self> {
        let d = Self { k, m, n, n_t, n_r };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.k, self.m, self.n, self.n_t, self.n_r].contains(&0) {
            return Err(Error::InvalidParameter(format!("schedule dimensions must be positive: {self:?}")));
        }
        Ok(())
    }

    pub fn tx_elements(&self) -> usize {
        self.m * self.n_t
    }

    pub fn rx_elements(&self) -> usize {
        self.n * self.n_r
    }

    /// Receive blocks `K N`, one per (slot, receive DARISA).
    pub fn rx_blocks(&self) -> usize {
        self.k * self.n
    }

    pub fn tx_phase_count(&self) -> usize {
        self.k * self.m * self.n_t
    }

    pub fn rx_phase_count(&self) -> usize {
        self.k * self.n * self.n_r
    }
}

/// How transmit phases are drawn for a random schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxPhases {
    /// All zero; the default, since receive-side agility alone reaches the optimum.
    Zero,
    /// One random draw held fixed across slots.
    Static,
    /// A fresh draw in every slot.
    Agile,
}

/// Phases `[K][M][N_t]` and `[K][N][N_r]`, stored flat in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    pub dims: ScheduleDims,
    pub tx_phases: Vec<f64>,
    pub rx_phases: Vec<f64>,
}

impl PhaseSchedule {
    pub fn new(dims: ScheduleDims, tx_phases: Vec<f64>, rx_phases: Vec<f64>) -> Result<Self> {
        dims.validate()?;
        if tx_phases.len() != dims.tx_phase_count() || rx_phases.len() != dims.rx_phase_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} tx and {} rx phases, got {} and {}",
                dims.tx_phase_count(),
                dims.rx_phase_count(),
                tx_phases.len(),
                rx_phases.len()
            )));
        }
        if tx_phases.iter().chain(&rx_phases).any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("phases must be finite".into()));
        }
        Ok(Self { dims, tx_phases, rx_phases })
    }

    pub fn zeros(dims: ScheduleDims) -> Self {
        Self { dims, tx_phases: vec![0.0; dims.tx_phase_count()], rx_phases: vec![0.0; dims.rx_phase_count()] }
    }

    /// Receive phases uniform on `(0, 2π]`, independent across slots.
    pub fn random(dims: ScheduleDims, tx: TxPhases, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Phases);
        let per_slot = dims.tx_elements();
        // Transmit first, so a static draw does not depend on K.
        let tx_phases = match tx {
            TxPhases::Zero => vec![0.0; dims.tx_phase_count()],
            TxPhases::Static => {
                let slot: Vec<f64> = (0..per_slot).map(|_| uniform_phase(&mut rng)).collect();
                slot.iter().copied().cycle().take(dims.tx_phase_count()).collect()
            }
            TxPhases::Agile => (0..dims.tx_phase_count()).map(|_| uniform_phase(&mut rng)).collect(),
        };
        let rx_phases = (0..dims.rx_phase_count()).map(|_| uniform_phase(&mut rng)).collect();
        Self { dims, tx_phases, rx_phases }
    }

    /// Replaces the receive phases, keeping the transmit side.
    pub fn with_rx_phases(&self, rx_phases: Vec<f64>) -> Result<Self> {
        Self::new(self.dims, self.tx_phases.clone(), rx_phases)
    }

    /// `φ_t^{m,j}(t_k)`, all indices 0-based.
    pub fn tx_phase(&self, k: usize, m: usize, j: usize) -> f64 {
        let d = &self.dims;
        self.tx_phases[(k * d.m + m) * d.n_t + j]
    }

    /// `φ_r^{n,i}(t_k)`, all indices 0-based.
    pub fn rx_phase(&self, k: usize, n: usize, i: usize) -> f64 {
        let d = &self.dims;
        self.rx_phases[(k * d.n + n) * d.n_r + i]
    }

    /// Receive phases of block `b = k N + n`.
    pub fn rx_block(&self, b: usize) -> &[f64] {
        let nr = self.dims.n_r;
        &self.rx_phases[b * nr..(b + 1) * nr]
    }

    /// `Q̃_t(t_k)`: `M N_t × M`, column `m` carrying DARISA `m`'s phasors.
    pub fn q_t_slot(&self, k: usize) -> CMatrix {
        let d = &self.dims;
        let mut q = CMatrix::zeros(d.tx_elements(), d.m);
        for m in 0..d.m {
            for j in 0..d.n_t {
                q[(m * d.n_t + j, m)] = unit_phasor(self.tx_phase(k, m, j));
            }
        }
        q
    }

    /// `Q̃_r(t_k)`: `N N_r × N`.
    pub fn q_r_slot(&self, k: usize) -> CMatrix {
        let d = &self.dims;
        let mut q = CMatrix::zeros(d.rx_elements(), d.n);
        for n in 0..d.n {
            for i in 0..d.n_r {
                q[(n * d.n_r + i, n)] = unit_phasor(self.rx_phase(k, n, i));
            }
        }
        q
    }

    /// `Q̄_t`: the `K` slot matrices stacked vertically, `K M N_t × M`.
    pub fn q_bar_t(&self) -> CMatrix {
        let d = &self.dims;
        let rows = d.tx_elements();
        let mut q = CMatrix::zeros(d.k * rows, d.m);
        for k in 0..d.k {
            q.view_mut((k * rows, 0), (rows, d.m)).copy_from(&self.q_t_slot(k));
        }
        q
    }

    /// `Q̄_r`: block diagonal over slots, `K N N_r × K N`.
    pub fn q_bar_r(&self) -> CMatrix {
        let d = &self.dims;
        let rows = d.rx_elements();
        let mut q = CMatrix::zeros(d.k * rows, d.k * d.n);
        for k in 0..d.k {
            q.view_mut((k * rows, k * d.n), (rows, d.n)).copy_from(&self.q_r_slot(k));
        }
        q
    }

    /// `H_w Q̃_t(t_k)` without forming `Q̃_t`: column `m` sums DARISA `m`'s
    /// columns of `H_w` weighted by its phasors.
    pub fn tx_combined(&self, h_w: &CMatrix, k: usize) -> CMatrix {
        let d = &self.dims;
        let mut out = CMatrix::zeros(h_w.nrows(), d.m);
        for m in 0..d.m {
            let mut col = out.column_mut(m);
            for j in 0..d.n_t {
                let w = unit_phasor(self.tx_phase(k, m, j));
                col.axpy(w, &h_w.column(m * d.n_t + j), C64::new(1.0, 0.0));
            }
        }
        out
    }
}

/// `K` copies of one block on the diagonal, stored once.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedBlockDiag {
    pub block: CMatrix,
    pub copies: usize,
}

impl RepeatedBlockDiag {
    pub fn shape(&self) -> (usize, usize) {
        (self.block.nrows() * self.copies, self.block.ncols() * self.copies)
    }

    pub fn to_dense(&self) -> CMatrix {
        let (r, c) = self.block.shape();
        let mut out = CMatrix::zeros(r * self.copies, c * self.copies);
        for k in 0..self.copies {
            out.view_mut((k * r, k * c), (r, c)).copy_from(&self.block);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CompositeChannel {
    /// `K N × M`.
    pub h_c: CMatrix,
    pub q_bar_t: CMatrix,
    pub q_bar_r: CMatrix,
    pub h_w_bar: RepeatedBlockDiag,
    pub dims: ScheduleDims,
}

impl CompositeChannel {
    /// Rows `k N .. (k+1) N`: the slot-`k` observation.
    pub fn slot_block(&self, k: usize) -> CMatrix {
        let n = self.dims.n;
        self.h_c.rows(k * n, n).into_owned()
    }
}

fn check_dims(h_w: &CMatrix, dims: &ScheduleDims) -> Result<()> {
    if h_w.nrows() != dims.rx_elements() || h_w.ncols() != dims.tx_elements() {
        return Err(Error::DimensionMismatch(format!(
            "H_w is {}x{} but the schedule expects {}x{}",
            h_w.nrows(),
            h_w.ncols(),
            dims.rx_elements(),
            dims.tx_elements()
        )));
    }
    Ok(())
}

/// `H_C` alone, slot by slot.
pub fn composite_matrix(h_w: &CMatrix, schedule: &PhaseSchedule) -> Result<CMatrix> {
    let d = schedule.dims;
    check_dims(h_w, &d)?;
    let mut h_c = CMatrix::zeros(d.k * d.n, d.m);
    for k in 0..d.k {
        let ht = schedule.tx_combined(h_w, k);
        for n in 0..d.n {
            for i in 0..d.n_r {
                // Row n of Q̃_r^H picks conj(q) on DARISA n's rows.
                let w = unit_phasor(-schedule.rx_phase(k, n, i));
                let src = n * d.n_r + i;
                for m in 0..d.m {
                    h_c[(k * d.n + n, m)] += w * ht[(src, m)];
                }
            }
        }
    }
    Ok(h_c)
}

pub fn assemble_composite(h_w: &CMatrix, schedule: &PhaseSchedule) -> Result<CompositeChannel> {
    let h_c = composite_matrix(h_w, schedule)?;
    Ok(CompositeChannel {
        h_c,
        q_bar_t: schedule.q_bar_t(),
        q_bar_r: schedule.q_bar_r(),
        h_w_bar: RepeatedBlockDiag { block: h_w.clone(), copies: schedule.dims.k },
        dims: schedule.dims,
    })
}

/// `H_C x + w̄` with `δ² = ‖x‖² / (K M snr)`; infinite `snr` is noiseless.
pub fn simulate_received(channel: &CompositeChannel, symbol: &CVector, snr: f64, seed: u64) -> Result<CVector> {
    let power = symbol.norm_squared();
    simulate_received_with_power(channel, symbol, power, snr, seed)
}

/// As [`simulate_received`] with the transmit power `P` given explicitly, so
/// that the noise level stays defined for a zero symbol.
pub fn simulate_received_with_power(
    channel: &CompositeChannel,
    symbol: &CVector,
    power: f64,
    snr: f64,
    seed: u64,
) -> Result<CVector> {
    if symbol.len() != channel.h_c.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "symbol has {} entries, channel has {} columns",
            symbol.len(),
            channel.h_c.ncols()
        )));
    }
    if !(snr > 0.0) {
        return Err(Error::InvalidParameter(format!("snr must be positive, got {snr}")));
    }
    if !(power >= 0.0 && power.is_finite()) {
        return Err(Error::InvalidParameter(format!("power must be finite and non-negative, got {power}")));
    }
    let mut y = &channel.h_c * symbol;
    if snr.is_infinite() {
        return Ok(y);
    }
    let d = channel.dims;
    let sigma = (power / ((d.k * d.m) as f64 * snr)).sqrt();
    let mut rng = stream_rng(seed, Stream::Noise);
    for v in y.iter_mut() {
        *v += complex_gaussian(&mut rng) * sigma;
    }
    Ok(y)
}

/// A random complex symbol with i.i.d. CN(0, 1) entries.
pub fn random_symbol<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CVector {
    CVector::from_fn(m, |_, _| complex_gaussian(rng))
}

/// Count of entries different from zero.
pub fn nonzero_count(m: &CMatrix) -> usize {
    m.iter().filter(|z| **z != ZERO).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_geometry::{element_positions, ArrayConfig, Side};
    use crate::cluster_channel::{generate_channel, Cluster, ClusterSet};
    use crate::linalg::{frobenius_norm, numerical_rank};
    use crate::rng::SimRng;
    use rand::SeedableRng;

    fn random_hw(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = SimRng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng))
    }

    #[test]
    fn scalar_blocks_give_h_w() {
        let dims = ScheduleDims::new(1, 3, 2, 1, 1).unwrap();
        let h = random_hw(2, 3, 1);
        let c = assemble_composite(&h, &PhaseSchedule::zeros(dims)).unwrap();
        assert_eq!(c.h_c, h);
    }

    #[test]
    fn matches_dense_triple_product() {
        let dims = ScheduleDims::new(3, 2, 2, 3, 4).unwrap();
        let h = random_hw(dims.rx_elements(), dims.tx_elements(), 2);
        let s = PhaseSchedule::random(dims, TxPhases::Agile, 9);
        let c = assemble_composite(&h, &s).unwrap();
        let dense = c.q_bar_r.adjoint() * c.h_w_bar.to_dense() * &c.q_bar_t;
        assert!(frobenius_norm(&(dense - &c.h_c)) < 1e-12 * frobenius_norm(&c.h_c));
        for k in 0..dims.k {
            let slot = s.q_r_slot(k).adjoint() * &h * s.q_t_slot(k);
            assert!(frobenius_norm(&(slot - c.slot_block(k))) < 1e-12);
        }
    }

    #[test]
    fn zero_pattern_and_unit_modulus() {
        let dims = ScheduleDims::new(4, 3, 2, 5, 6).unwrap();
        let s = PhaseSchedule::random(dims, TxPhases::Agile, 4);
        let qt = s.q_bar_t();
        let qr = s.q_bar_r();
        assert_eq!(qt.shape(), (4 * 3 * 5, 3));
        assert_eq!(qr.shape(), (4 * 2 * 6, 4 * 2));
        assert_eq!(nonzero_count(&qt), dims.tx_phase_count());
        assert_eq!(nonzero_count(&qr), dims.rx_phase_count());
        for z in qt.iter().chain(qr.iter()).filter(|z| **z != ZERO) {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        for (r, row) in qr.row_iter().enumerate() {
            let b = r / dims.n_r;
            for (c, z) in row.iter().enumerate() {
                if c != b {
                    assert_eq!(*z, ZERO);
                }
            }
        }
    }

    #[test]
    fn random_phases_in_range() {
        let dims = ScheduleDims::new(2, 2, 2, 8, 8).unwrap();
        let s = PhaseSchedule::random(dims, TxPhases::Static, 3);
        assert!(s.rx_phases.iter().chain(&s.tx_phases).all(|p| *p > 0.0 && *p <= std::f64::consts::TAU));
        assert_eq!(s.q_t_slot(0), s.q_t_slot(1));
    }

    #[test]
    fn repeated_slot_adds_no_rank() {
        let d1 = ScheduleDims::new(1, 4, 2, 3, 3).unwrap();
        let d2 = ScheduleDims::new(2, 4, 2, 3, 3).unwrap();
        let h = random_hw(6, 12, 5);
        let s1 = PhaseSchedule::random(d1, TxPhases::Static, 7);
        let s2 = PhaseSchedule::new(
            d2,
            [s1.tx_phases.clone(), s1.tx_phases.clone()].concat(),
            [s1.rx_phases.clone(), s1.rx_phases.clone()].concat(),
        )
        .unwrap();
        let c1 = composite_matrix(&h, &s1).unwrap();
        let c2 = composite_matrix(&h, &s2).unwrap();
        assert_eq!(c2.rows(0, 2), c2.rows(2, 2));
        assert_eq!(numerical_rank(&c1, 1e-9), numerical_rank(&c2, 1e-9));
    }

    #[test]
    fn gram_ranks_agree() {
        let dims = ScheduleDims::new(2, 4, 2, 4, 4).unwrap();
        let h = random_hw(8, 16, 8);
        let c = composite_matrix(&h, &PhaseSchedule::random(dims, TxPhases::Agile, 1)).unwrap();
        let r = numerical_rank(&c, 1e-9);
        assert_eq!(numerical_rank(&(&c * c.adjoint()), 1e-9), r);
        assert_eq!(numerical_rank(&(c.adjoint() * &c), 1e-9), r);
    }

    #[test]
    fn composite_rank_meets_prediction_on_darisa_link() {
        // K=4, N=2, M=8, isotropic 2λ×2λ DARISAs of 16×16 elements.
        let tx = ArrayConfig::new(Side::Transmit, 16, 16, 0.125, 8).unwrap();
        let rx = ArrayConfig::new(Side::Receive, 16, 16, 0.125, 2).unwrap();
        let (lt, lr) = (element_positions(&tx).unwrap(), element_positions(&rx).unwrap());
        let ch = generate_channel(
            &ClusterSet::single(Cluster::isotropic()),
            &lt,
            &lr,
            tx.array_aperture(),
            rx.array_aperture(),
            21,
        )
        .unwrap();
        let dims = ScheduleDims::new(4, 8, 2, 256, 256).unwrap();
        let c = composite_matrix(&ch.h_w, &PhaseSchedule::random(dims, TxPhases::Zero, 21)).unwrap();
        assert_eq!(numerical_rank(&c, 1e-3), 8);
    }

    #[test]
    fn received_signal_contract() {
        let dims = ScheduleDims::new(2, 3, 2, 2, 2).unwrap();
        let h = random_hw(4, 6, 3);
        let c = assemble_composite(&h, &PhaseSchedule::random(dims, TxPhases::Zero, 2)).unwrap();
        let mut rng = SimRng::seed_from_u64(10);
        let x = random_symbol(3, &mut rng);
        let clean = simulate_received(&c, &x, f64::INFINITY, 1).unwrap();
        assert_eq!(clean, &c.h_c * &x);
        let a = simulate_received(&c, &x, 10.0, 5).unwrap();
        let b = simulate_received(&c, &x, 10.0, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, clean);
        assert!(simulate_received(&c, &x, 0.0, 5).is_err());
    }

    #[test]
    fn zero_symbol_noise_variance() {
        let dims = ScheduleDims::new(4, 2, 8, 1, 1).unwrap();
        let h = random_hw(8, 2, 3);
        let c = assemble_composite(&h, &PhaseSchedule::zeros(dims)).unwrap();
        let x = CVector::zeros(2);
        let (power, snr) = (3.0, 0.5);
        let expected = power / ((dims.k * dims.m) as f64 * snr);
        let mut acc = 0.0;
        let trials = 4000;
        for t in 0..trials {
            let y = simulate_received_with_power(&c, &x, power, snr, t).unwrap();
            acc += y.norm_squared();
        }
        let est = acc / (trials as f64 * (dims.k * dims.n) as f64);
        assert!((est - expected).abs() < 0.05 * expected, "{est} vs {expected}");
        let silent = simulate_received(&c, &x, snr, 1).unwrap();
        assert_eq!(silent.norm(), 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let dims = ScheduleDims::new(1, 2, 2, 2, 2).unwrap();
        assert!(assemble_composite(&random_hw(3, 4, 1), &PhaseSchedule::zeros(dims)).is_err());
        assert!(PhaseSchedule::new(dims, vec![0.0; 3], vec![0.0; 4]).is_err());
        assert!(ScheduleDims::new(0, 1, 1, 1, 1).is_err());
    }
}
