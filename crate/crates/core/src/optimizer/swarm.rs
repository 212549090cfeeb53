//! Global-best particle swarm with constriction-style coefficients.
//!
//! All random draws come from one ChaCha stream consumed in particle order,
//! and objective values are reduced in index order, so a run is a pure
//! function of its seed even though evaluations are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::OptimizerConfig;

#[derive(Clone, Debug)]
pub struct SwarmOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// `(iteration, global best)` after initialization and every iteration.
    pub trace: Vec<(usize, f64)>,
}

/// Runs the swarm on `f` over `dim` coordinates.
///
/// Particles start uniformly in `[−b, b]^dim` (`b = search_box`); `seeds`
/// replace the first particles' positions. Velocities are clamped to `±b`;
/// positions are left free.
pub fn minimize<F>(
    f: F,
    dim: usize,
    seeds: &[Vec<f64>],
    cfg: &OptimizerConfig,
    seed: u64,
) -> SwarmOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = cfg.search_box;
    let vmax = b;
    let swarm = cfg.pso_swarm.max(seeds.len());

    let mut positions: Vec<Vec<f64>> = (0..swarm)
        .map(|_| (0..dim).map(|_| rng.gen_range(-b..=b)).collect())
        .collect();
    for (slot, s) in positions.iter_mut().zip(seeds) {
        assert_eq!(s.len(), dim, "seed particle has wrong dimension");
        slot.clone_from(s);
    }
    let mut velocities: Vec<Vec<f64>> = (0..swarm)
        .map(|_| (0..dim).map(|_| rng.gen_range(-vmax..=vmax)).collect())
        .collect();

    let evaluate = |xs: &[Vec<f64>]| -> Vec<f64> { xs.par_iter().map(|x| f(x)).collect() };
    let mut values = evaluate(&positions);
    let mut evaluations = swarm;
    let mut personal = positions.clone();
    let mut personal_values = values.clone();
    let mut leader = argmin(&values);
    let mut leader_x = positions[leader].clone();
    let mut leader_value = values[leader];
    let mut trace = vec![(0, leader_value)];

    for iter in 1..=cfg.pso_iters {
        for i in 0..swarm {
            let (x, v) = (&mut positions[i], &mut velocities[i]);
            for d in 0..dim {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let nv = cfg.pso_inertia * v[d]
                    + cfg.pso_cognitive * r1 * (personal[i][d] - x[d])
                    + cfg.pso_social * r2 * (leader_x[d] - x[d]);
                v[d] = nv.clamp(-vmax, vmax);
                x[d] += v[d];
            }
        }
        values = evaluate(&positions);
        evaluations += swarm;
        for i in 0..swarm {
            if values[i] < personal_values[i] {
                personal_values[i] = values[i];
                personal[i].clone_from(&positions[i]);
            }
        }
        leader = argmin(&personal_values);
        if personal_values[leader] < leader_value {
            leader_value = personal_values[leader];
            leader_x.clone_from(&personal[leader]);
        }
        trace.push((iter, leader_value));
    }

    SwarmOutcome {
        x: leader_x,
        value: leader_value,
        evaluations,
        trace,
    }
}

/// First index of the smallest value.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}
