//! Bisection on the sign of `F(ζ) = max_E Tr(CE) − ζ‖CE‖_F`.
//!
//! `F` is strictly decreasing with a single root at the optimal ratio, so the
//! bracket `[1, √rank]` halves until it is narrower than `ε`.

use serde::{Deserialize, Serialize};

use super::sdr::{RelaxedSolution, SdrProblem};
use super::{solve_subproblem_from, SolverOptions};
use crate::error::{Error, Result};

/// Relative rank threshold used when the bracket must grow to `√rank C`.
const RANK_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DinkelbachOptions {
    /// Bracket width at which bisection stops.
    pub epsilon: f64,
    /// Sign tolerance on `F`, relative to `‖C‖_F`.
    pub f_tol_rel: f64,
    pub solver: SolverOptions,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self { epsilon: 1e-3, f_tol_rel: 1e-4, solver: SolverOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub zeta: f64,
    pub f: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DinkelbachRun {
    /// Bracket at the start of bisection.
    pub initial_low: f64,
    pub initial_high: f64,
    /// Set when `√dof` did not bracket the root and the upper end moved to `√rank C`.
    pub bracket_extended: bool,
    pub zeta_low: f64,
    pub zeta_high: f64,
    pub zeta_opt: f64,
    /// Every evaluation of `F`, bracket checks included.
    pub iterations: Vec<BisectionStep>,
    pub subproblem_solves: usize,
    /// Solution from the last evaluation with `F ≥ 0`, whose ratio is at least `zeta_low`.
    pub e_opt: RelaxedSolution,
}

impl DinkelbachRun {
    /// `ζ_opt²`, the relaxation's upper bound on the EDoF.
    pub fn relaxed_edof(&self) -> f64 {
        self.zeta_opt * self.zeta_opt
    }
}

/// `F(ζ)` with its maximizer.
pub fn evaluate_f(prob: &SdrProblem, zeta: f64, opts: &SolverOptions) -> Result<RelaxedSolution> {
    solve_subproblem_from(prob, zeta, opts, None)
}

pub fn dinkelbach_bisect(prob: &SdrProblem, dof_bound: usize, opts: &DinkelbachOptions) -> Result<DinkelbachRun> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    if dof_bound == 0 {
        return Err(Error::InvalidParameter("the DoF bound for the bracket must be at least 1".into()));
    }
    if prob.norm_c() == 0.0 {
        return Err(Error::InvalidParameter("C is zero; the EDoF is undefined".into()));
    }
    let tol = opts.f_tol_rel * prob.norm_c();
    let mut trace = Vec::new();
    let mut solves = 0;
    // Only the sign of F matters during bisection.
    let sign_opts = SolverOptions { stop_above: Some(tol), ..opts.solver };
    let mut solve = |zeta: f64, init: Option<&RelaxedSolution>, trace: &mut Vec<BisectionStep>| -> Result<RelaxedSolution> {
        let sol = solve_subproblem_from(prob, zeta, &sign_opts, init.map(|s| s.factors.as_slice()))?;
        solves += 1;
        trace.push(BisectionStep { zeta, f: sol.objective, converged: sol.converged });
        Ok(sol)
    };

    let mut lo = 1.0;
    let low_sol = solve(lo, None, &mut trace)?;
    if low_sol.objective < -tol {
        return Err(Error::BracketViolation(format!("F(1) = {:.3e} < -{tol:.3e}", low_sol.objective)));
    }
    let mut hi = (dof_bound as f64).sqrt();
    let mut extended = false;
    let hi_sol = if hi > lo { solve(hi, Some(&low_sol), &mut trace)? } else { low_sol.clone() };
    let mut best = if hi > lo && hi_sol.objective >= 0.0 { hi_sol.clone() } else { low_sol };
    if hi_sol.objective > tol {
        // Relaxed blocks need not be rank one, so the ratio can exceed the
        // agile DoF, up to √rank C.
        let grown = (prob.rank_c(RANK_REL).max(1) as f64).sqrt();
        if grown <= hi {
            return Err(Error::BracketViolation(format!("F({hi:.6}) = {:.3e} > {tol:.3e}", hi_sol.objective)));
        }
        let ext_sol = solve(grown, Some(&hi_sol), &mut trace)?;
        if ext_sol.objective > tol {
            return Err(Error::BracketViolation(format!(
                "F({grown:.6}) = {:.3e} > {tol:.3e} at √rank C",
                ext_sol.objective
            )));
        }
        extended = true;
        best = hi_sol;
        lo = hi;
        hi = grown;
    }
    let initial_low = 1.0;
    let initial_high = hi;

    let mut last = best.clone();
    while hi - lo > opts.epsilon {
        let mid = 0.5 * (lo + hi);
        let sol = solve(mid, Some(&last), &mut trace)?;
        if sol.objective >= 0.0 {
            lo = mid;
            best = sol.clone();
        } else {
            hi = mid;
        }
        last = sol;
    }
    if !best.converged {
        // The bracket only needed a sign; polish the retained solution.
        let polished = solve_subproblem_from(prob, best.zeta, &opts.solver, Some(&best.factors))?;
        solves += 1;
        trace.push(BisectionStep { zeta: polished.zeta, f: polished.objective, converged: polished.converged });
        if polished.objective >= best.objective {
            best = polished;
        }
    }
    Ok(DinkelbachRun {
        initial_low,
        initial_high,
        bracket_extended: extended,
        zeta_low: lo,
        zeta_high: hi,
        zeta_opt: 0.5 * (lo + hi),
        iterations: trace,
        subproblem_solves: solves,
        e_opt: best,
    })
}
