//! Low-rank ascent on `E_b = V_b V_b^H` with unit-norm rows.
//!
//! Unit rows make every `E_b` feasible by construction, so the iteration is a
//! Riemannian gradient ascent on a product of complex spheres. With
//! `P_b = G_b^H V_b`, `R_b = V_b^H V_b`, `S = G^H G` and `W = Σ P_b P_b^H`:
//!
//! ```text
//! Tr(CE)      = Tr W
//! ‖G^H E G‖_F = ‖W‖_F,        ∇_{V_b} = 2 G_b (P_b − ζ W P_b / ‖W‖_F)
//! ‖CE‖_F²     = Σ Tr(S P_b R_b P_b^H),
//!                              ∇_{V_b} = 2 G_b P_b − (ζ / ‖CE‖_F)(G_b S P_b R_b + V_b P_b^H S P_b)
//! ```
//!
//! An optimal block has rank at most `2M`, and a rank-deficient local maximum
//! of the factored problem is a global maximum of the concave relaxation, so
//! `r = min(N_r + 1, 2M + 1)` columns suffice.

use rand::SeedableRng;

use super::sdr::{RelaxedSolution, SdrProblem, SolverMethod, Surrogate};
use super::SolverOptions;
use crate::linalg::{CMatrix, C64};
use crate::rng::{complex_gaussian, SimRng};

const ARMIJO: f64 = 1e-4;

struct Eval {
    trace: f64,
    norm: f64,
    objective: f64,
    p: Vec<CMatrix>,
    /// `R_b`, kept only for the product surrogate.
    r: Vec<CMatrix>,
    /// `W = Σ P_b P_b^H`.
    w: CMatrix,
}

fn evaluate(prob: &SdrProblem, g_blocks: &[CMatrix], v: &[CMatrix], zeta: f64, surrogate: Surrogate) -> Eval {
    let s = prob.gram();
    let m = s.nrows();
    let mut w = CMatrix::zeros(m, m);
    let mut q = 0.0;
    let mut ps = Vec::with_capacity(v.len());
    let mut rs = Vec::new();
    for (gb, vb) in g_blocks.iter().zip(v) {
        let p = gb.adjoint() * vb;
        w.gemm(C64::new(1.0, 0.0), &p, &p.adjoint(), C64::new(1.0, 0.0));
        if surrogate == Surrogate::Product {
            let r = vb.adjoint() * vb;
            q += (s * &p * &r * p.adjoint()).trace().re;
            rs.push(r);
        }
        ps.push(p);
    }
    let trace = w.trace().re;
    let norm = match surrogate {
        Surrogate::Composite => w.norm(),
        Surrogate::Product => q.max(0.0).sqrt(),
    };
    Eval { trace, norm, objective: trace - zeta * norm, p: ps, r: rs, w }
}

fn euclidean_gradient(
    prob: &SdrProblem,
    g_blocks: &[CMatrix],
    v: &[CMatrix],
    ev: &Eval,
    zeta: f64,
    surrogate: Surrogate,
) -> Vec<CMatrix> {
    let s = prob.gram();
    let coef = if ev.norm > 0.0 { zeta / ev.norm } else { 0.0 };
    let two = C64::new(2.0, 0.0);
    (0..g_blocks.len())
        .map(|b| {
            let (gb, vb, p) = (&g_blocks[b], &v[b], &ev.p[b]);
            match surrogate {
                Surrogate::Composite => {
                    let inner = p - &ev.w * p * C64::new(coef, 0.0);
                    gb * inner * two
                }
                Surrogate::Product => {
                    let sp = s * p;
                    let mut grad = gb * p * two;
                    if coef != 0.0 {
                        let penalty = gb * &sp * &ev.r[b] + vb * (p.adjoint() * &sp);
                        grad -= penalty * C64::new(coef, 0.0);
                    }
                    grad
                }
            }
        })
        .collect()
}

/// Removes the radial component of each row.
fn tangent(v: &[CMatrix], grad: &[CMatrix]) -> Vec<CMatrix> {
    v.iter()
        .zip(grad)
        .map(|(vb, gb)| {
            let mut out = gb.clone();
            for i in 0..vb.nrows() {
                let radial: f64 = (0..vb.ncols()).map(|j| (gb[(i, j)] * vb[(i, j)].conj()).re).sum();
                for j in 0..vb.ncols() {
                    out[(i, j)] -= vb[(i, j)] * radial;
                }
            }
            out
        })
        .collect()
}

fn normalize_rows(m: &mut CMatrix) {
    for i in 0..m.nrows() {
        let n = m.row(i).norm();
        if n > 0.0 {
            m.row_mut(i).unscale_mut(n);
        } else {
            m[(i, 0)] = C64::new(1.0, 0.0);
        }
    }
}

fn sq_norm(blocks: &[CMatrix]) -> f64 {
    blocks.iter().map(|b| b.norm_squared()).sum()
}

/// Column count used for blocks of `block_size` rows and a rank-`m` `C`.
pub fn factor_rank(block_size: usize, m: usize) -> usize {
    (block_size + 1).min(2 * m + 1).max(1)
}

/// Starting factors: `E = I` when the rank allows it, otherwise random unit rows.
pub fn initial_factors(prob: &SdrProblem, rank: usize, seed: u64) -> Vec<CMatrix> {
    let nr = prob.block_size();
    let mut rng = SimRng::seed_from_u64(seed);
    (0..prob.num_blocks())
        .map(|_| {
            if rank >= nr {
                CMatrix::from_fn(nr, rank, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            } else {
                let mut v = CMatrix::from_fn(nr, rank, |_, _| complex_gaussian(&mut rng));
                normalize_rows(&mut v);
                v
            }
        })
        .collect()
}

/// Maximizes `Tr(CE) − ζ‖·‖_F` from the given factors (or a default start).
pub fn solve_factored(prob: &SdrProblem, zeta: f64, opts: &SolverOptions, init: Option<&[CMatrix]>) -> RelaxedSolution {
    let g_blocks: Vec<CMatrix> = (0..prob.num_blocks()).map(|b| prob.block_factor(b)).collect();
    let rank = opts.rank.unwrap_or_else(|| factor_rank(prob.block_size(), prob.factor().ncols()));
    let mut v: Vec<CMatrix> = match init {
        Some(f) if f.len() == prob.num_blocks() && f.iter().all(|b| b.nrows() == prob.block_size()) => f.to_vec(),
        _ => initial_factors(prob, rank, opts.seed),
    };
    for b in v.iter_mut() {
        normalize_rows(b);
    }

    let scale = prob.norm_c().max(f64::MIN_POSITIVE);
    let mut step = 1.0 / scale;
    let sur = opts.surrogate;
    let mut ev = evaluate(prob, &g_blocks, &v, zeta, sur);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut stalled = 0;

    let mut prev: Option<(Vec<CMatrix>, Vec<CMatrix>)> = None;
    while iterations < opts.max_iters {
        let egrad = euclidean_gradient(prob, &g_blocks, &v, &ev, zeta, sur);
        let rgrad = tangent(&v, &egrad);
        let rg2 = sq_norm(&rgrad);
        if let Some((pv, pg)) = prev.take() {
            // Barzilai-Borwein trial step, alternating the two quotients. For
            // ascent the gradient shrinks along the move, so `<s, y>` is negative.
            let (mut ss, mut sy, mut yy) = (0.0, 0.0, 0.0);
            for b in 0..v.len() {
                let sb = &v[b] - &pv[b];
                let yb = &rgrad[b] - &pg[b];
                ss += sb.norm_squared();
                yy += yb.norm_squared();
                sy += sb.dotc(&yb).re;
            }
            if sy < 0.0 {
                let bb = if iterations % 2 == 0 { ss / -sy } else { -sy / yy };
                if bb.is_finite() && bb > 0.0 {
                    step = bb;
                }
            }
        }
        let eg = sq_norm(&egrad).sqrt();
        residual = if eg > 0.0 { rg2.sqrt() / eg } else { 0.0 };
        if residual <= opts.tol {
            converged = true;
            break;
        }
        if opts.stop_above.is_some_and(|t| ev.objective > t) {
            break;
        }
        iterations += 1;

        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<CMatrix> = v
                .iter()
                .zip(&rgrad)
                .map(|(vb, gb)| {
                    let mut t = vb + gb * C64::new(step, 0.0);
                    normalize_rows(&mut t);
                    t
                })
                .collect();
            let tev = evaluate(prob, &g_blocks, &trial, zeta, sur);
            if tev.objective >= ev.objective + ARMIJO * step * rg2 {
                accepted = Some((trial, tev));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((nv, nev)) => {
                let gain = nev.objective - ev.objective;
                prev = Some((std::mem::replace(&mut v, nv), rgrad));
                ev = nev;
                step *= 2.0;
                // Gains at the rounding level of the objective mean no further
                // progress is measurable.
                if gain <= 1e-15 * scale {
                    stalled += 1;
                    if stalled >= 20 {
                        break;
                    }
                } else {
                    stalled = 0;
                }
            }
            None => break,
        }
    }

    let blocks: Vec<CMatrix> = v.iter().map(|vb| vb * vb.adjoint()).collect();
    let feasibility = blocks
        .iter()
        .flat_map(|e| (0..e.nrows()).map(move |i| (e[(i, i)] - C64::new(1.0, 0.0)).norm()))
        .fold(0.0f64, f64::max);
    RelaxedSolution {
        blocks,
        factors: v,
        zeta,
        surrogate: sur,
        objective: ev.objective,
        trace_term: ev.trace,
        norm_term: ev.norm,
        feasibility_residual: feasibility,
        stationarity_residual: residual,
        iterations,
        converged,
        method: SolverMethod::Factored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use crate::rng::complex_gaussian;

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = SimRng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng))
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for sur in [Surrogate::Composite, Surrogate::Product] {
            check_gradient(sur);
        }
    }

    fn check_gradient(sur: Surrogate) {
        let prob = SdrProblem::from_factor(random(6, 2, 1), 3).unwrap();
        let g_blocks: Vec<CMatrix> = (0..2).map(|b| prob.block_factor(b)).collect();
        let v = vec![random(3, 4, 2), random(3, 4, 3)];
        let zeta = 1.3;
        let ev = evaluate(&prob, &g_blocks, &v, zeta, sur);
        let grad = euclidean_gradient(&prob, &g_blocks, &v, &ev, zeta, sur);
        let h = 1e-6;
        for b in 0..2 {
            for (i, j) in [(0, 0), (1, 2), (2, 3)] {
                for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                    let mut vp = v.clone();
                    let mut vm = v.clone();
                    vp[b][(i, j)] += dir * h;
                    vm[b][(i, j)] -= dir * h;
                    let fd = (evaluate(&prob, &g_blocks, &vp, zeta, sur).objective
                        - evaluate(&prob, &g_blocks, &vm, zeta, sur).objective)
                        / (2.0 * h);
                    let an = (grad[b][(i, j)] * dir.conj()).re;
                    assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "{sur:?}: {fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn solution_is_feasible() {
        let prob = SdrProblem::from_factor(random(8, 3, 4), 4).unwrap();
        let sol = solve_factored(&prob, 1.2, &SolverOptions::default(), None);
        assert!(sol.feasibility_residual < 1e-12);
        for (e, v) in sol.blocks.iter().zip(&sol.factors) {
            assert!(frobenius_norm(&(e - v * v.adjoint())) < 1e-12);
        }
        assert!(sol.converged, "residual {}", sol.stationarity_residual);
    }
}
