//! The relaxed problem data `C = G G^H` with `G = H̄_w Q̄_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hermitian_defect, hermitian_eigh, numerical_rank, psd_factor, unit_phasor, CMatrix};
use crate::spacetime_channel::PhaseSchedule;

/// `C` is kept in factored form: for the largest configurations `K N N_r`
/// runs into the thousands while `G` has only `M` columns.
#[derive(Debug, Clone)]
pub struct SdrProblem {
    g: CMatrix,
    gram: CMatrix,
    block_size: usize,
    num_blocks: usize,
    norm_c: f64,
    trace_c: f64,
}

impl SdrProblem {
    /// Problem with `C = G G^H`, split into diagonal blocks of `block_size` rows.
    pub fn from_factor(g: CMatrix, block_size: usize) -> Result<Self> {
        if block_size == 0 || g.nrows() == 0 || g.nrows() % block_size != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} rows do not split into blocks of {}",
                g.nrows(),
                block_size
            )));
        }
        if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite entries in the channel factor".into()));
        }
        let gram = g.adjoint() * &g;
        let norm_c = frobenius_norm(&gram);
        let trace_c = (0..gram.nrows()).map(|i| gram[(i, i)].re).sum();
        let num_blocks = g.nrows() / block_size;
        Ok(Self { g, gram, block_size, num_blocks, norm_c, trace_c })
    }

    /// Problem from an explicit Hermitian PSD `C`.
    pub fn from_matrix(c: &CMatrix, block_size: usize) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(Error::DimensionMismatch(format!("C is {}x{}", c.nrows(), c.ncols())));
        }
        let scale = c.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        if hermitian_defect(c) > 1e-10 * scale {
            return Err(Error::InvalidParameter("C is not Hermitian".into()));
        }
        let (vals, _) = hermitian_eigh(c);
        let top = vals.last().copied().unwrap_or(0.0);
        if vals.first().copied().unwrap_or(0.0) < -1e-8 * top.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidParameter("C is not positive semidefinite".into()));
        }
        Self::from_factor(psd_factor(c, 1e-15), block_size)
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    /// `G`, `n × M`.
    pub fn factor(&self) -> &CMatrix {
        &self.g
    }

    /// `S = G^H G`.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn block_factor(&self, b: usize) -> CMatrix {
        self.g.rows(b * self.block_size, self.block_size).into_owned()
    }

    pub fn c_dense(&self) -> CMatrix {
        &self.g * self.g.adjoint()
    }

    pub fn norm_c(&self) -> f64 {
        self.norm_c
    }

    pub fn trace_c(&self) -> f64 {
        self.trace_c
    }

    /// `rank C = rank G`.
    pub fn rank_c(&self, rel: f64) -> usize {
        numerical_rank(&self.g, rel)
    }

    /// Composite channel `Q̄_r^H G` for receive phases in block order.
    pub fn composite_for_phases(&self, rx_phases: &[f64]) -> Result<CMatrix> {
        if rx_phases.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} phases for a problem of dimension {}",
                rx_phases.len(),
                self.dim()
            )));
        }
        let mut h = CMatrix::zeros(self.num_blocks, self.g.ncols());
        for (i, &p) in rx_phases.iter().enumerate() {
            let b = i / self.block_size;
            let w = unit_phasor(-p);
            for j in 0..self.g.ncols() {
                h[(b, j)] += w * self.g[(i, j)];
            }
        }
        Ok(h)
    }

    /// EDoF of the composite channel for the given receive phases.
    pub fn edof_for_phases(&self, rx_phases: &[f64]) -> Result<f64> {
        let h = self.composite_for_phases(rx_phases)?;
        Ok(edof_from_gram(&(h.adjoint() * &h)))
    }
}

/// `Tr(X)² / ‖X‖_F²` for a Hermitian Gram matrix `X`.
pub fn edof_from_gram(x: &CMatrix) -> f64 {
    let tr: f64 = (0..x.nrows()).map(|i| x[(i, i)].re).sum();
    let fro2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if fro2 == 0.0 {
        0.0
    } else {
        tr * tr / fro2
    }
}

/// Builds `C` for the fixed transmit side of `schedule`.
pub fn build_sdr_problem(h_w: &CMatrix, schedule: &PhaseSchedule) -> Result<SdrProblem> {
    let d = schedule.dims;
    if h_w.nrows() != d.rx_elements() || h_w.ncols() != d.tx_elements() {
        return Err(Error::DimensionMismatch(format!(
            "H_w is {}x{} but the schedule expects {}x{}",
            h_w.nrows(),
            h_w.ncols(),
            d.rx_elements(),
            d.tx_elements()
        )));
    }
    let rows = d.rx_elements();
    let mut g = CMatrix::zeros(d.k * rows, d.m);
    for k in 0..d.k {
        g.view_mut((k * rows, 0), (rows, d.m)).copy_from(&schedule.tx_combined(h_w, k));
    }
    SdrProblem::from_factor(g, d.n_r)
}

/// Norm in the denominator of the relaxed ratio.
///
/// Both agree with `‖H_C H_C^H‖_F` at `E = I`. Only `Composite` agrees on every
/// rank-one schedule, where `G^H E G = H_C^H H_C`; `Product` is never smaller,
/// so its ratio under-reports the EDoF of a phase schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surrogate {
    /// `‖G^H E G‖_F`.
    #[default]
    Composite,
    /// `‖CE‖_F`.
    Product,
}

/// How a relaxed solution was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Factored ascent; scales to large blocks.
    #[default]
    Auto,
    /// Dense projected gradient ascent.
    Projected,
    Factored,
}

/// A feasible point of the relaxation, block by block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelaxedSolution {
    /// Diagonal blocks `E_b`, `N_r × N_r`.
    #[serde(skip)]
    pub blocks: Vec<CMatrix>,
    /// `V_b` with `V_b V_b^H = E_b`.
    #[serde(skip)]
    pub factors: Vec<CMatrix>,
    pub zeta: f64,
    pub surrogate: Surrogate,
    /// `Tr(CE) - ζ ‖·‖_F` for the chosen surrogate norm.
    pub objective: f64,
    pub trace_term: f64,
    pub norm_term: f64,
    pub feasibility_residual: f64,
    pub stationarity_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: SolverMethod,
}

impl RelaxedSolution {
    /// `Tr(CE)` over the surrogate norm.
    pub fn ratio(&self) -> f64 {
        if self.norm_term == 0.0 {
            0.0
        } else {
            self.trace_term / self.norm_term
        }
    }

    /// The full block-diagonal `E`.
    pub fn to_dense(&self) -> CMatrix {
        let nr = self.blocks.first().map_or(0, |b| b.nrows());
        let n = nr * self.blocks.len();
        let mut e = CMatrix::zeros(n, n);
        for (b, blk) in self.blocks.iter().enumerate() {
            e.view_mut((b * nr, b * nr), (nr, nr)).copy_from(blk);
        }
        e
    }
}

/// `Tr(CE)` and the surrogate norm for block-diagonal `E`. With
/// `U_b = G_b^H E_b`: `Tr(CE) = Σ Tr(U_b G_b)`, `G^H E G = Σ U_b G_b` and
/// `‖CE‖_F² = Σ Tr(S U_b U_b^H)`.
pub fn objective_terms(prob: &SdrProblem, blocks: &[CMatrix], surrogate: Surrogate) -> (f64, f64) {
    let m = prob.factor().ncols();
    let mut w = CMatrix::zeros(m, m);
    let mut q = 0.0;
    for (b, e) in blocks.iter().enumerate() {
        let gb = prob.block_factor(b);
        let u = gb.adjoint() * e;
        w += &u * &gb;
        if surrogate == Surrogate::Product {
            q += (prob.gram() * &u * u.adjoint()).trace().re;
        }
    }
    let tr = w.trace().re;
    let norm = match surrogate {
        Surrogate::Composite => frobenius_norm(&w),
        Surrogate::Product => q.max(0.0).sqrt(),
    };
    (tr, norm)
}

/// Worst violation of unit diagonal and per-block PSD.
pub fn feasibility_residual(blocks: &[CMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for e in blocks {
        for i in 0..e.nrows() {
            worst = worst.max((e[(i, i)].re - 1.0).abs()).max(e[(i, i)].im.abs());
        }
        let (vals, _) = hermitian_eigh(e);
        if let Some(&lo) = vals.first() {
            worst = worst.max(-lo / e.nrows() as f64);
        }
    }
    worst
}
