//! Derivative-free search for witness matrices minimizing `g_p`.
//!
//! The objective is scale invariant and not smooth (it is a max of smooth
//! pieces), so the search combines a particle swarm for global exploration
//! with repeated Nelder-Mead runs to polish the swarm's best point.

mod config;
pub mod nelder_mead;
pub mod swarm;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::OptimizerConfig;

use crate::bounds::{BoundResult, Method};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gauge::{decompose, objective_from, SquareMatrix};

/// Value assigned to singular (or malformed) points; above any feasible `g_p`.
pub const SINGULAR_PENALTY: f64 = 1e6;

/// Upper bound on Nelder-Mead restarts inside one polish.
const MAX_POLISH_ROUNDS: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_matrix: SquareMatrix,
    pub best_value: f64,
    pub evaluations: usize,
    /// `(iteration, best-so-far)`, non-increasing in the value.
    pub trace: Vec<(usize, f64)>,
    pub seed_used: u64,
}

/// `g_p` of the `n×n` matrix stored row-major in `flat`, or
/// [`SINGULAR_PENALTY`] when the matrix is singular or malformed.
pub fn penalized_objective(flat: &[f64], p: Exponent) -> f64 {
    match SquareMatrix::from_flat(flat) {
        Ok(a) => objective_from(&decompose(&a), p).unwrap_or(SINGULAR_PENALTY),
        Err(_) => SINGULAR_PENALTY,
    }
}

fn to_matrix(flat: &[f64]) -> SquareMatrix {
    SquareMatrix::from_flat(flat).expect("search keeps n² finite coordinates")
}

fn append_trace(trace: &mut Vec<(usize, f64)>, offset: usize, part: &[(usize, f64)]) {
    for &(it, v) in part {
        if trace.last().is_none_or(|&(_, last)| v < last) {
            trace.push((offset + it, v));
        }
    }
}

/// One Nelder-Mead run from `start`.
pub fn nelder_mead(p: Exponent, start: &SquareMatrix, cfg: &OptimizerConfig) -> SearchResult {
    let out = nelder_mead::minimize(|x| penalized_objective(x, p), start.entries(), cfg);
    SearchResult {
        best_matrix: to_matrix(&out.x),
        best_value: out.value,
        evaluations: out.evaluations,
        trace: out.trace,
        seed_used: cfg.seed,
    }
}

/// Repeats Nelder-Mead from the current best point until a run no longer
/// improves it. Each run starts from the point rescaled to unit max-entry,
/// which leaves `g_p` unchanged but resets the simplex size.
pub fn polish(p: Exponent, start: &SquareMatrix, cfg: &OptimizerConfig) -> SearchResult {
    let mut best_x = start.entries().to_vec();
    let mut best_value = penalized_objective(&best_x, p);
    let mut evaluations = 1;
    let mut trace = vec![(0, best_value)];
    let mut offset = 0;
    for _ in 0..MAX_POLISH_ROUNDS {
        let scale = best_x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let from: Vec<f64> = best_x.iter().map(|v| v / scale).collect();
        let out = nelder_mead::minimize(|x| penalized_objective(x, p), &from, cfg);
        evaluations += out.evaluations;
        append_trace(&mut trace, offset, &out.trace);
        offset += out.iterations + 1;
        let gain = best_value - out.value;
        if out.value < best_value {
            best_value = out.value;
            best_x = out.x;
        }
        if !(gain > 1e-12 * best_value) {
            break;
        }
    }
    SearchResult {
        best_matrix: to_matrix(&best_x),
        best_value,
        evaluations,
        trace,
        seed_used: cfg.seed,
    }
}

/// Particle swarm over `n×n` matrices with the identity as one particle.
pub fn particle_swarm(p: Exponent, cfg: &OptimizerConfig) -> SearchResult {
    let n = cfg.dimension;
    let identity = SquareMatrix::identity(n).entries().to_vec();
    let out = swarm::minimize(
        |x| penalized_objective(x, p),
        n * n,
        &[identity],
        cfg,
        cfg.seed,
    );
    SearchResult {
        best_matrix: to_matrix(&out.x),
        best_value: out.value,
        evaluations: out.evaluations,
        trace: out.trace,
        seed_used: cfg.seed,
    }
}

/// Swarm followed by polish, for one seed.
pub fn hybrid(p: Exponent, cfg: &OptimizerConfig) -> SearchResult {
    let global = particle_swarm(p, cfg);
    let local = polish(p, &global.best_matrix, cfg);
    let mut trace = global.trace.clone();
    let offset = trace.last().map_or(0, |&(it, _)| it + 1);
    append_trace(&mut trace, offset, &local.trace);
    let (best_matrix, best_value) = if local.best_value <= global.best_value {
        (local.best_matrix, local.best_value)
    } else {
        (global.best_matrix, global.best_value)
    };
    SearchResult {
        best_matrix,
        best_value,
        evaluations: global.evaluations + local.evaluations,
        trace,
        seed_used: cfg.seed,
    }
}

/// Runs [`hybrid`] for seeds `seed, seed+1, …` (one per restart) and keeps
/// the best result at or below the feasibility threshold.
pub fn search(p: Exponent, cfg: &OptimizerConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let runs: Vec<SearchResult> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let run_cfg = OptimizerConfig {
                seed: cfg.seed.wrapping_add(r),
                ..cfg.clone()
            };
            hybrid(p, &run_cfg)
        })
        .collect();
    let overall = runs
        .iter()
        .map(|r| r.best_value)
        .fold(f64::INFINITY, f64::min);
    let mut best: Option<SearchResult> = None;
    for run in runs {
        if run.best_value > cfg.feasibility_threshold {
            continue;
        }
        if best.as_ref().is_none_or(|b| run.best_value < b.best_value) {
            best = Some(run);
        }
    }
    best.ok_or(Error::InfeasibleSearch {
        best: overall,
        threshold: cfg.feasibility_threshold,
    })
}

/// Optimizer-backed upper bound on `d(p)`; the witness is embedded.
pub fn estimate_distance(p: Exponent, cfg: &OptimizerConfig) -> Result<BoundResult> {
    let best = search(p, cfg)?;
    Ok(BoundResult {
        p,
        n: cfg.dimension,
        value: best.best_value,
        method: Method::Optimizer,
        witness: Some(best.best_matrix),
        certified: false,
    })
}
