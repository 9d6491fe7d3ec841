//! Dense projected gradient ascent over block-diagonal `E`.
//!
//! Over Hermitian `E` the ascent direction of `Tr(CE) − ζ‖G^H E G‖_F` is
//! `C − ζ CEC / ‖G^H E G‖_F`, and that of `Tr(CE) − ζ‖CE‖_F` is
//! `C − ζ (C²E + EC²) / (2‖CE‖_F)`; both are masked to the diagonal blocks. Each step is
//! projected back onto unit-diagonal PSD blocks with Dykstra's alternating
//! projections. Intended for desk-scale problems; cost is cubic in `K N N_r`.

use super::sdr::{objective_terms, RelaxedSolution, SdrProblem, SolverMethod, Surrogate};
use super::SolverOptions;
use crate::linalg::{hermitize, hermitian_eigh, project_psd, spectral_norm, CMatrix, C64};

const DYKSTRA_TOL: f64 = 1e-9;
const DYKSTRA_MAX_ITERS: usize = 10_000;

fn set_unit_diagonal(m: &mut CMatrix) {
    for i in 0..m.nrows() {
        m[(i, i)] = C64::new(1.0, 0.0);
    }
}

/// Nearest unit-diagonal PSD matrix to a Hermitian `x` (Frobenius norm).
pub fn project_block(x: &CMatrix) -> CMatrix {
    let mut y = x.clone();
    hermitize(&mut y);
    let mut correction = CMatrix::zeros(x.nrows(), x.ncols());
    for _ in 0..DYKSTRA_MAX_ITERS {
        let r = &y - &correction;
        let psd = project_psd(&r);
        correction = &psd - r;
        let mut next = psd.clone();
        set_unit_diagonal(&mut next);
        let moved = (&next - &y).norm();
        let gap = (&next - &psd).norm();
        y = next;
        if moved <= DYKSTRA_TOL && gap <= DYKSTRA_TOL {
            break;
        }
    }
    y
}

fn masked_gradient(
    prob: &SdrProblem,
    c: &CMatrix,
    c2: &CMatrix,
    blocks: &[CMatrix],
    zeta: f64,
    norm: f64,
    surrogate: Surrogate,
) -> Vec<CMatrix> {
    let nr = prob.block_size();
    let coef = if norm > 0.0 { zeta / norm } else { 0.0 };
    // (CEC)_bb = G_b (G^H E G) G_b^H.
    let w = match surrogate {
        Surrogate::Composite => {
            let m = prob.factor().ncols();
            let mut w = CMatrix::zeros(m, m);
            for (b, e) in blocks.iter().enumerate() {
                let gb = prob.block_factor(b);
                w += gb.adjoint() * e * gb;
            }
            Some(w)
        }
        Surrogate::Product => None,
    };
    blocks
        .iter()
        .enumerate()
        .map(|(b, e)| {
            let o = b * nr;
            let cb = c.view((o, o), (nr, nr)).into_owned();
            let penalty = match &w {
                Some(w) => {
                    let gb = prob.block_factor(b);
                    &gb * w * gb.adjoint()
                }
                // (C²E)_bb = (C²)_bb E_b for block-diagonal E.
                None => {
                    let c2b = c2.view((o, o), (nr, nr));
                    (&c2b * e + e * &c2b) * C64::new(0.5, 0.0)
                }
            };
            let mut g = cb - penalty * C64::new(coef, 0.0);
            hermitize(&mut g);
            g
        })
        .collect()
}

fn block_psd_floor(blocks: &[CMatrix]) -> f64 {
    blocks
        .iter()
        .map(|e| {
            let (vals, _) = hermitian_eigh(e);
            let lo = vals.first().copied().unwrap_or(0.0);
            (-lo / e.nrows() as f64).max(0.0)
        })
        .fold(0.0, f64::max)
}

pub fn solve_projected(prob: &SdrProblem, zeta: f64, opts: &SolverOptions, init: Option<&[CMatrix]>) -> RelaxedSolution {
    let nr = prob.block_size();
    let c = prob.c_dense();
    let sur = opts.surrogate;
    let c2 = if sur == Surrogate::Product { &c * &c } else { CMatrix::zeros(0, 0) };
    let mut blocks: Vec<CMatrix> = match init {
        Some(b) if b.len() == prob.num_blocks() && b.iter().all(|m| m.nrows() == nr) => {
            b.iter().map(project_block).collect()
        }
        _ => vec![CMatrix::identity(nr, nr); prob.num_blocks()],
    };
    let lipschitz = spectral_norm(&c).max(f64::MIN_POSITIVE);
    let mut step = 1.0 / lipschitz;
    let (mut tr, mut nrm) = objective_terms(prob, &blocks, sur);
    let mut f = tr - zeta * nrm;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let grad = masked_gradient(prob, &c, &c2, &blocks, zeta, nrm, sur);
        let gnorm = grad.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            residual = 0.0;
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<CMatrix> =
                blocks.iter().zip(&grad).map(|(e, g)| project_block(&(e + g * C64::new(step, 0.0)))).collect();
            let moved2: f64 = trial.iter().zip(&blocks).map(|(a, b)| (a - b).norm_squared()).sum();
            let (ttr, tn) = objective_terms(prob, &trial, sur);
            let tf = ttr - zeta * tn;
            if tf >= f + 1e-4 * moved2 / step {
                accepted = Some((trial, ttr, tn, tf, moved2.sqrt()));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ttr, tn, tf, moved)) = accepted else { break };
        residual = moved / (step * gnorm);
        blocks = trial;
        tr = ttr;
        nrm = tn;
        f = tf;
        if residual <= opts.tol {
            converged = true;
            break;
        }
        if opts.stop_above.is_some_and(|t| f > t) {
            break;
        }
        step *= 1.5;
    }

    let mut feas: f64 = 0.0;
    for e in &blocks {
        for i in 0..nr {
            feas = feas.max((e[(i, i)].re - 1.0).abs());
        }
    }
    let feasibility = feas.max(block_psd_floor(&blocks));
    RelaxedSolution {
        factors: blocks.iter().map(|e| crate::linalg::psd_factor(e, 1e-12)).collect(),
        blocks,
        zeta,
        surrogate: sur,
        objective: f,
        trace_term: tr,
        norm_term: nrm,
        feasibility_residual: feasibility,
        stationarity_residual: residual,
        iterations,
        converged,
        method: SolverMethod::Projected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_of_feasible_point_is_identity_map() {
        let e = CMatrix::from_fn(2, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else if i < j { C64::new(0.3, 0.4) } else { C64::new(0.3, -0.4) });
        let p = project_block(&e);
        assert!((p - e).norm() < 1e-12);
    }

    #[test]
    fn projection_is_feasible() {
        let x = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64 - 4.0, if i == j { 0.0 } else { 0.5 }));
        let mut h = x.clone() + x.adjoint();
        hermitize(&mut h);
        let p = project_block(&h);
        for i in 0..3 {
            assert!((p[(i, i)].re - 1.0).abs() < 1e-12);
        }
        let (vals, _) = hermitian_eigh(&p);
        assert!(vals[0] > -1e-8);
    }

    #[test]
    fn two_by_two_projection_clips_correlation() {
        // Off-diagonal magnitude above one clips onto the unit circle.
        let x = CMatrix::from_fn(2, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else if i < j { C64::new(0.0, 2.0) } else { C64::new(0.0, -2.0) });
        let p = project_block(&x);
        assert!((p[(0, 1)] - C64::new(0.0, 1.0)).norm() < 1e-8);
    }
}
