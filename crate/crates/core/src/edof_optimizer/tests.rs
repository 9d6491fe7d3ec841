use std::f64::consts::TAU;

use rand::SeedableRng;

use super::*;
use crate::linalg::{frobenius_norm, unit_phasor, C64};
use crate::rng::{complex_gaussian, SimRng};

fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = SimRng::seed_from_u64(seed);
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng))
}

fn opts(method: SolverMethod) -> SolverOptions {
    SolverOptions { method, tol: 1e-9, max_iters: 20_000, ..SolverOptions::default() }
}

fn opts_with(method: SolverMethod, surrogate: Surrogate) -> SolverOptions {
    SolverOptions { surrogate, ..opts(method) }
}

/// `f(E)` for one 2×2 block `[[1, e], [ē, 1]]` evaluated densely.
fn f_two_by_two(c: &CMatrix, zeta: f64, e: C64, sur: Surrogate) -> f64 {
    let em = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), e, e.conj(), C64::new(1.0, 0.0)]);
    let ce = c * em;
    let norm = match sur {
        Surrogate::Product => frobenius_norm(&ce),
        // ‖G^H E G‖_F² = Tr(CECE).
        Surrogate::Composite => (&ce * &ce).trace().re.max(0.0).sqrt(),
    };
    ce.trace().re - zeta * norm
}

/// Exhaustive search over `|e| ≤ 1`, refined by successively finer grids.
fn grid_oracle(c: &CMatrix, zeta: f64, sur: Surrogate) -> f64 {
    let (mut r0, mut r1, mut a0, mut a1) = (0.0f64, 1.0f64, 0.0f64, TAU);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for _ in 0..8 {
        let n = 200;
        for i in 0..=n {
            let r = r0 + (r1 - r0) * i as f64 / n as f64;
            for j in 0..=n {
                let a = a0 + (a1 - a0) * j as f64 / n as f64;
                let v = f_two_by_two(c, zeta, unit_phasor(a) * r, sur);
                if v > best.0 {
                    best = (v, r, a);
                }
            }
        }
        let (dr, da) = ((r1 - r0) / 20.0, (a1 - a0) / 20.0);
        r0 = (best.1 - dr).max(0.0);
        r1 = (best.1 + dr).min(1.0);
        a0 = best.2 - da;
        a1 = best.2 + da;
    }
    best.0
}

#[test]
fn scalar_blocks_force_identity() {
    let g = random(5, 2, 1);
    let prob = SdrProblem::from_factor(g, 1).unwrap();
    let c = prob.c_dense();
    let sol = solve_subproblem(&prob, 0.7, &SolverOptions::default()).unwrap();
    let want = c.trace().re - 0.7 * frobenius_norm(&c);
    assert!((sol.objective - want).abs() < 1e-12 * want.abs().max(1.0));
    assert!(frobenius_norm(&(sol.to_dense() - CMatrix::identity(5, 5))) == 0.0);
}

#[test]
fn negative_zeta_rejected() {
    let prob = SdrProblem::from_factor(random(4, 2, 1), 2).unwrap();
    assert!(solve_subproblem(&prob, -0.1, &SolverOptions::default()).is_err());
}

#[test]
fn identity_c_returns_identity() {
    let n = 6;
    let prob = SdrProblem::from_matrix(&CMatrix::identity(n, n), 3).unwrap();
    for method in [SolverMethod::Factored, SolverMethod::Projected] {
        for zeta in [0.5, 1.0, 2.0] {
            let sol = solve_subproblem(&prob, zeta, &opts(method)).unwrap();
            let err = frobenius_norm(&(sol.to_dense() - CMatrix::identity(n, n)));
            assert!(err < 1e-6, "{method:?} ζ={zeta}: ‖E − I‖ = {err}");
            let want = n as f64 - zeta * (n as f64).sqrt();
            assert!((sol.objective - want).abs() < 1e-9);
        }
    }
}

#[test]
fn single_two_by_two_block_matches_grid_search() {
    for seed in 0..4 {
        let g = random(2, 2, 10 + seed);
        let prob = SdrProblem::from_factor(g, 2).unwrap();
        let c = prob.c_dense();
        for sur in [Surrogate::Composite, Surrogate::Product] {
            for zeta in [0.6, 1.0, 1.3] {
                let oracle = grid_oracle(&c, zeta, sur);
                for method in [SolverMethod::Factored, SolverMethod::Projected] {
                    let sol = solve_subproblem(&prob, zeta, &opts_with(method, sur)).unwrap();
                    let rel = (sol.objective - oracle).abs() / oracle.abs().max(1e-12);
                    assert!(rel < 1e-4, "seed {seed} ζ={zeta} {sur:?} {method:?}: {} vs {oracle}", sol.objective);
                    assert!(sol.feasibility_residual < 1e-8);
                }
            }
        }
    }
}

#[test]
fn projected_and_factored_agree() {
    let g = random(6, 2, 5);
    let prob = SdrProblem::from_factor(g, 3).unwrap();
    for sur in [Surrogate::Composite, Surrogate::Product] {
        for zeta in [1.0, 1.2, 1.4] {
            let a = solve_subproblem(&prob, zeta, &opts_with(SolverMethod::Factored, sur)).unwrap();
            let b = solve_subproblem(&prob, zeta, &opts_with(SolverMethod::Projected, sur)).unwrap();
            let scale = prob.norm_c();
            assert!((a.objective - b.objective).abs() < 1e-6 * scale, "{sur:?} ζ={zeta}: {} vs {}", a.objective, b.objective);
        }
    }
}

#[test]
fn projected_solution_is_feasible() {
    let prob = SdrProblem::from_factor(random(8, 3, 6), 4).unwrap();
    let sol = solve_subproblem(&prob, 1.1, &opts(SolverMethod::Projected)).unwrap();
    assert!(sol.feasibility_residual < 1e-8);
    let e = sol.to_dense();
    for r in 0..8 {
        for c in 0..8 {
            if r / 4 != c / 4 {
                assert_eq!(e[(r, c)], C64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn f_is_strictly_decreasing_with_bracket_signs() {
    let prob = SdrProblem::from_factor(random(8, 3, 7), 2).unwrap();
    let tol = 1e-4 * prob.norm_c();
    let bound = 3usize;
    let top = (bound as f64).sqrt();
    let mut prev = f64::INFINITY;
    for i in 0..10 {
        let z = 1.0 + (top - 1.0) * i as f64 / 9.0;
        let f = evaluate_f(&prob, z, &SolverOptions::default()).unwrap().objective;
        assert!(f < prev - 1e-9 * prob.norm_c(), "F not decreasing at ζ={z}");
        if i == 0 {
            assert!(f >= -tol);
        }
        if i == 9 {
            assert!(f <= tol);
        }
        prev = f;
    }
}

#[test]
fn scalar_blocks_bisect_to_closed_form_ratio() {
    let prob = SdrProblem::from_factor(random(4, 3, 8), 1).unwrap();
    let c = prob.c_dense();
    let want = c.trace().re / frobenius_norm(&c);
    let run = dinkelbach_bisect(&prob, 3, &DinkelbachOptions::default()).unwrap();
    assert!((run.zeta_opt - want).abs() <= 1e-3, "{} vs {want}", run.zeta_opt);
    assert!(run.zeta_high - run.zeta_low <= 1e-3);
}

#[test]
fn rank_one_channel_bisects_to_one() {
    let u = random(6, 1, 9);
    let v = random(1, 2, 10);
    let prob = SdrProblem::from_factor(u * v, 3).unwrap();
    let run = dinkelbach_bisect(&prob, 1, &DinkelbachOptions::default()).unwrap();
    assert!((run.zeta_opt - 1.0).abs() <= 1e-3);
}

#[test]
fn flat_spectrum_reaches_full_ratio() {
    // Orthonormal columns: C is a rank-3 projector and E = I already attains √3.
    let q = random(8, 3, 11).qr().q();
    let prob = SdrProblem::from_factor(q, 2).unwrap();
    let run = dinkelbach_bisect(&prob, 3, &DinkelbachOptions::default()).unwrap();
    assert!((run.zeta_opt - 3f64.sqrt()).abs() <= 1e-3, "{}", run.zeta_opt);
    assert!(run.subproblem_solves <= 15);
}

#[test]
fn bracket_grows_when_relaxation_beats_agile_dof() {
    // K N = 1 block but rank C = 3: relaxed E can exceed ratio 1.
    let prob = SdrProblem::from_factor(random(4, 3, 12), 4).unwrap();
    let run = dinkelbach_bisect(&prob, 1, &DinkelbachOptions::default()).unwrap();
    assert!(run.bracket_extended);
    assert!(run.zeta_opt > 1.0 && run.zeta_opt <= 3f64.sqrt() + 1e-3);
}

fn grid_best(prob: &SdrProblem, bits: u32) -> f64 {
    let levels = 1usize << bits;
    let n = prob.dim();
    let mut best: f64 = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let phases: Vec<f64> = idx.iter().map(|&i| i as f64 * TAU / levels as f64).collect();
        best = best.max(prob.edof_for_phases(&phases).unwrap());
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < levels {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[test]
fn end_to_end_against_exhaustive_phases() {
    // Two receive blocks of two elements, M = 2: a 256-point 2-bit grid.
    for seed in 0..3 {
        let prob = SdrProblem::from_factor(random(4, 2, 20 + seed), 2).unwrap();
        let best = grid_best(&prob, 2);
        let o = OptimizerOptions { quantization_bits: Some(2), ..OptimizerOptions::default() };
        let rec = optimize(&prob, 2, &o, seed).unwrap();
        assert!(rec.run.relaxed_edof() + 2.0 * 2f64.sqrt() * 1e-3 >= best, "seed {seed}");
        assert!(rec.achieved_edof >= 0.9 * best, "seed {seed}: {} vs {best}", rec.achieved_edof);
        assert!(rec.continuous.edof <= rec.run.relaxed_edof() + 1e-2);
    }
}

#[test]
fn fine_quantization_converges_to_continuous() {
    let prob = SdrProblem::from_factor(random(6, 3, 30), 3).unwrap();
    let run = dinkelbach_bisect(&prob, 2, &DinkelbachOptions::default()).unwrap();
    let cont = gaussian_randomize(&run.e_opt, &prob, 20, 4, None).unwrap();
    let mut prev_gap = f64::INFINITY;
    for bits in [8, 16, 32] {
        let fine = quantize_phases(&cont.rx_phases, bits).unwrap();
        let gap = (prob.edof_for_phases(&fine).unwrap() - cont.edof).abs();
        assert!(gap <= prev_gap + 1e-12);
        prev_gap = gap;
    }
    assert!(prev_gap < 1e-6);
}

#[test]
fn rank_one_refinement_is_a_phase_vector() {
    let prob = SdrProblem::from_factor(random(8, 4, 40), 4).unwrap();
    let run = dinkelbach_bisect(&prob, 2, &DinkelbachOptions::default()).unwrap();
    let refined = rank_one_refinement(&prob, &run.e_opt, run.zeta_low, &SolverOptions::default()).unwrap();
    for (v, e) in refined.factors.iter().zip(&refined.blocks) {
        assert_eq!(v.ncols(), 1);
        assert!(v.iter().all(|x| (x.norm() - 1.0).abs() < 1e-9));
        assert!((e - v * v.adjoint()).iter().all(|x| x.norm() < 1e-9));
    }
}

#[test]
fn recovery_never_loses_to_the_relaxed_candidate() {
    for seed in 0..3 {
        let prob = SdrProblem::from_factor(random(12, 4, 50 + seed), 6).unwrap();
        let o = OptimizerOptions::default();
        let (run, refined) = relax(&prob, 4, &o).unwrap();
        let plain = gaussian_randomize(&run.e_opt, &prob, 30, seed, None).unwrap();
        let alone = recover_phases(&prob, &candidates(&run, None), 30, seed, None).unwrap();
        assert_eq!(alone.edof, plain.edof);
        assert_eq!(alone.source, RecoverySource::Relaxed);
        let both = recover_phases(&prob, &candidates(&run, refined.as_ref()), 30, seed, None).unwrap();
        assert!(both.edof >= plain.edof, "seed {seed}");
        assert!(both.edof <= run.relaxed_edof() + 1e-2);
    }
}

#[test]
fn recovery_needs_a_candidate() {
    let prob = SdrProblem::from_factor(random(4, 2, 60), 2).unwrap();
    assert!(recover_phases(&prob, &[], 10, 0, None).is_err());
}
