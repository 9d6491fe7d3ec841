//! Gaussian randomization: rank-one receive phases from a relaxed `E`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::quantize::quantize_phase;
use super::sdr::{RelaxedSolution, SdrProblem};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::rng::{complex_gaussian, stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizationResult {
    /// Receive phases in block order `[K][N][N_r]`.
    pub rx_phases: Vec<f64>,
    /// EDoF of the composite channel under `rx_phases`.
    pub edof: f64,
    /// Index of the winning draw.
    pub best_draw: usize,
    pub num_draws: usize,
    pub bits: Option<u32>,
    /// Which relaxed solution the winning draw came from.
    #[serde(default)]
    pub source: RecoverySource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoverySource {
    /// The bisection's retained solution.
    #[default]
    Relaxed,
    /// Its rank-one refinement.
    RankOne,
}

/// `(0, 2π]` representative of `arg z`.
fn phase_of(re: f64, im: f64) -> f64 {
    let a = im.atan2(re);
    if a <= 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Draws `ξ_b ~ CN(0, E_b)` for all blocks jointly, maps each to phases
/// (quantized to `bits` when given) and keeps the draw with the largest EDoF.
pub fn gaussian_randomize(
    solution: &RelaxedSolution,
    prob: &SdrProblem,
    num_draws: usize,
    seed: u64,
    bits: Option<u32>,
) -> Result<RandomizationResult> {
    if num_draws == 0 {
        return Err(Error::InvalidParameter("num_draws must be at least 1".into()));
    }
    if solution.factors.len() != prob.num_blocks() {
        return Err(Error::DimensionMismatch(format!(
            "solution has {} blocks, problem has {}",
            solution.factors.len(),
            prob.num_blocks()
        )));
    }
    let mut rng = stream_rng(seed, Stream::Randomization);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut phases = vec![0.0; prob.dim()];
    for draw in 0..num_draws {
        for (b, v) in solution.factors.iter().enumerate() {
            let z = CVector::from_fn(v.ncols(), |_, _| complex_gaussian(&mut rng));
            let xi = v * z;
            for (i, x) in xi.iter().enumerate() {
                let p = phase_of(x.re, x.im);
                phases[b * prob.block_size() + i] = match bits {
                    Some(b) => quantize_phase(p, b)?,
                    None => p,
                };
            }
        }
        let edof = prob.edof_for_phases(&phases)?;
        if best.as_ref().map_or(true, |(e, _, _)| edof > *e) {
            best = Some((edof, draw, phases.clone()));
        }
    }
    let (edof, best_draw, rx_phases) = best.expect("at least one draw");
    Ok(RandomizationResult { rx_phases, edof, best_draw, num_draws, bits, source: RecoverySource::Relaxed })
}
