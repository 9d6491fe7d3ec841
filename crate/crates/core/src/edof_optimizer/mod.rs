//! EDoF maximization over receive phase schedules.
//!
//! With the transmit side fixed, the EDoF of `H_C` equals
//! `(Tr(CE) / ‖CE‖_F)²` for `E = Q̄_r Q̄_r^H`, whose diagonal blocks are rank one
//! with unit diagonal. Dropping the rank constraint gives a concave problem in
//! `E`; Dinkelbach bisection finds the optimal ratio, Gaussian randomization
//! recovers phases and, optionally, phases snap to a `b`-bit grid.

pub mod dinkelbach;
pub mod factored;
pub mod projected;
pub mod quantize;
pub mod randomize;
pub mod sdr;

use serde::{Deserialize, Serialize};

pub use dinkelbach::{dinkelbach_bisect, evaluate_f, BisectionStep, DinkelbachOptions, DinkelbachRun};
pub use quantize::{quantize_phase, quantize_phases};
pub use randomize::{gaussian_randomize, RandomizationResult, RecoverySource};
pub use sdr::{build_sdr_problem, RelaxedSolution, SdrProblem, SolverMethod, Surrogate};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigh, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative first-order stationarity target.
    pub tol: f64,
    pub max_iters: usize,
    pub method: SolverMethod,
    pub surrogate: Surrogate,
    /// Factor width for the factored method; `None` picks `min(N_r + 1, 2M + 1)`.
    pub rank: Option<usize>,
    /// Seed for random factored starts.
    pub seed: u64,
    /// Return as soon as the objective exceeds this value. Iterates are
    /// feasible, so that already certifies `F(ζ)` above it.
    #[serde(default)]
    pub stop_above: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, max_iters: 5000, method: SolverMethod::Auto, surrogate: Surrogate::Composite, rank: None, seed: 0, stop_above: None }
    }
}

/// Maximizes `Tr(CE) − ζ‖·‖_F` over unit-diagonal PSD blocks.
pub fn solve_subproblem(prob: &SdrProblem, zeta: f64, opts: &SolverOptions) -> Result<RelaxedSolution> {
    solve_subproblem_from(prob, zeta, opts, None)
}

/// As [`solve_subproblem`], warm-started from block factors `V_b`.
pub fn solve_subproblem_from(
    prob: &SdrProblem,
    zeta: f64,
    opts: &SolverOptions,
    init: Option<&[CMatrix]>,
) -> Result<RelaxedSolution> {
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidParameter(format!("zeta must be finite and non-negative, got {zeta}")));
    }
    if prob.block_size() == 1 {
        return Ok(identity_solution(prob, zeta, opts));
    }
    Ok(match opts.method {
        SolverMethod::Projected => {
            let blocks: Option<Vec<CMatrix>> = init.map(|f| f.iter().map(|v| v * v.adjoint()).collect());
            projected::solve_projected(prob, zeta, opts, blocks.as_deref())
        }
        SolverMethod::Auto | SolverMethod::Factored => factored::solve_factored(prob, zeta, opts, init),
    })
}

/// Scalar blocks leave `E = I` as the only feasible point.
fn identity_solution(prob: &SdrProblem, zeta: f64, opts: &SolverOptions) -> RelaxedSolution {
    let one = CMatrix::identity(1, 1);
    let n = prob.num_blocks();
    let (tr, nrm) = (prob.trace_c(), prob.norm_c());
    RelaxedSolution {
        blocks: vec![one.clone(); n],
        factors: vec![one; n],
        zeta,
        surrogate: opts.surrogate,
        objective: tr - zeta * nrm,
        trace_term: tr,
        norm_term: nrm,
        feasibility_residual: 0.0,
        stationarity_residual: 0.0,
        iterations: 0,
        converged: true,
        method: opts.method,
    }
}

/// Leading eigenvector of each block, rescaled entrywise to unit modulus.
fn principal_phasors(sol: &RelaxedSolution) -> Vec<CMatrix> {
    sol.factors
        .iter()
        .map(|v| {
            let (_, vecs) = hermitian_eigh(&(v.adjoint() * v));
            let lead = v * vecs.column(vecs.ncols() - 1);
            CMatrix::from_fn(v.nrows(), 1, |i, _| {
                let n = lead[i].norm();
                if n > 0.0 {
                    lead[i] / n
                } else {
                    C64::new(1.0, 0.0)
                }
            })
        })
        .collect()
}

/// Rank-one ascent at `zeta` started from the principal phasors of `sol`.
///
/// When the relaxation is loose its optimal face is large and Gaussian draws
/// from a high-rank point lose much of the ratio; a rank-one local maximizer
/// nearby often keeps most of it.
pub fn rank_one_refinement(prob: &SdrProblem, sol: &RelaxedSolution, zeta: f64, solver: &SolverOptions) -> Result<RelaxedSolution> {
    let opts = SolverOptions { rank: Some(1), method: SolverMethod::Factored, stop_above: None, ..*solver };
    solve_subproblem_from(prob, zeta, &opts, Some(&principal_phasors(sol)))
}

/// Randomizes every candidate with the same draws and keeps the best EDoF.
/// Ties go to the earlier candidate.
pub fn recover_phases(
    prob: &SdrProblem,
    candidates: &[(RecoverySource, &RelaxedSolution)],
    num_draws: usize,
    seed: u64,
    bits: Option<u32>,
) -> Result<RandomizationResult> {
    let mut best: Option<RandomizationResult> = None;
    for &(source, sol) in candidates {
        let mut r = gaussian_randomize(sol, prob, num_draws, seed, bits)?;
        r.source = source;
        if best.as_ref().map_or(true, |b| r.edof > b.edof) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no candidate solutions to recover phases from".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub dinkelbach: DinkelbachOptions,
    pub num_draws: usize,
    /// Phase resolution of the final schedule; `None` keeps continuous phases.
    pub quantization_bits: Option<u32>,
    /// Also randomize around a rank-one refinement of the relaxed solution.
    pub rank_one_refinement: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { dinkelbach: DinkelbachOptions::default(), num_draws: 100, quantization_bits: None, rank_one_refinement: true }
    }
}

/// Everything one optimization produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationRecord {
    pub run: DinkelbachRun,
    /// Squared ratio of the rank-one refinement, when it ran.
    pub refined_edof: Option<f64>,
    pub continuous: RandomizationResult,
    pub quantized: Option<RandomizationResult>,
    /// Phases of the reported schedule, `[K][N][N_r]`.
    pub recovered_phases: Vec<f64>,
    pub achieved_edof: f64,
}

/// Dinkelbach bisection followed by the optional rank-one refinement at `ζ_l`.
pub fn relax(prob: &SdrProblem, dof_bound: usize, opts: &OptimizerOptions) -> Result<(DinkelbachRun, Option<RelaxedSolution>)> {
    let run = dinkelbach_bisect(prob, dof_bound, &opts.dinkelbach)?;
    let refined = if opts.rank_one_refinement && prob.block_size() > 1 {
        Some(rank_one_refinement(prob, &run.e_opt, run.zeta_low, &opts.dinkelbach.solver)?)
    } else {
        None
    };
    Ok((run, refined))
}

/// Candidates for [`recover_phases`] from the output of [`relax`].
pub fn candidates<'a>(run: &'a DinkelbachRun, refined: Option<&'a RelaxedSolution>) -> Vec<(RecoverySource, &'a RelaxedSolution)> {
    let mut out = vec![(RecoverySource::Relaxed, &run.e_opt)];
    out.extend(refined.map(|r| (RecoverySource::RankOne, r)));
    out
}

/// Bisection, randomization and optional quantization in one pass.
pub fn optimize(prob: &SdrProblem, dof_bound: usize, opts: &OptimizerOptions, seed: u64) -> Result<OptimizationRecord> {
    let (run, refined) = relax(prob, dof_bound, opts)?;
    let cands = candidates(&run, refined.as_ref());
    let continuous = recover_phases(prob, &cands, opts.num_draws, seed, None)?;
    let quantized = match opts.quantization_bits {
        Some(b) => Some(recover_phases(prob, &cands, opts.num_draws, seed, Some(b))?),
        None => None,
    };
    let chosen = quantized.as_ref().unwrap_or(&continuous);
    Ok(OptimizationRecord {
        recovered_phases: chosen.rx_phases.clone(),
        achieved_edof: chosen.edof,
        refined_edof: refined.as_ref().map(|r| r.ratio().powi(2)),
        run,
        quantized,
        continuous,
    })
}

#[cfg(test)]
mod tests;
