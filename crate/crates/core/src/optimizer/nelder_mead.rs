//! Downhill simplex with the standard reflection / expansion / contraction /
//! shrink steps.

use super::OptimizerConfig;

/// Result of one simplex run on a plain objective.
#[derive(Clone, Debug)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// `(iteration, best-so-far)` recorded whenever the best value improves.
    pub trace: Vec<(usize, f64)>,
}

/// Initial simplex: the start plus one vertex per coordinate, moved by
/// `max(0.05·|x_k|, 0.00025)`.
fn initial_simplex(start: &[f64]) -> Vec<Vec<f64>> {
    let mut simplex = Vec::with_capacity(start.len() + 1);
    simplex.push(start.to_vec());
    for k in 0..start.len() {
        let mut v = start.to_vec();
        v[k] += (0.05 * start[k].abs()).max(0.00025);
        simplex.push(v);
    }
    simplex
}

fn along(c: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    // c + t (toward − c)
    c.iter().zip(toward).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `f` from `start`.
///
/// Stops after `nm_max_iters` iterations, or once both the simplex diameter
/// (max-norm distance of every vertex to the best one) and the spread of
/// vertex values fall to `nm_tol` or below.
pub fn minimize<F>(f: F, start: &[f64], cfg: &OptimizerConfig) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let (rho, chi, gamma, sigma) = (
        cfg.nm_reflection,
        cfg.nm_expansion,
        cfg.nm_contraction,
        cfg.nm_shrink,
    );
    let mut points = initial_simplex(start);
    let mut values: Vec<f64> = points.iter().map(|x| f(x)).collect();
    let mut evaluations = points.len();
    let mut order: Vec<usize> = (0..=dim).collect();
    let mut trace = Vec::new();
    let mut iterations = 0;

    let sort = |order: &mut Vec<usize>, values: &[f64]| {
        // stable, so earlier vertices win ties
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    };
    sort(&mut order, &values);
    trace.push((0, values[order[0]]));

    while iterations < cfg.nm_max_iters {
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];
        let spread = values[worst] - values[best];
        let diameter = points
            .iter()
            .map(|x| {
                x.iter()
                    .zip(&points[best])
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0_f64, f64::max);
        if diameter <= cfg.nm_tol && spread <= cfg.nm_tol {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for &i in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&points[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= dim as f64);

        let reflected = along(&centroid, &points[worst], -rho);
        let fr = f(&reflected);
        evaluations += 1;

        let mut replacement = None;
        if fr < values[best] {
            let expanded = along(&centroid, &points[worst], -rho * chi);
            let fe = f(&expanded);
            evaluations += 1;
            replacement = Some(if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            });
        } else if fr < values[second_worst] {
            replacement = Some((reflected, fr));
        } else if fr < values[worst] {
            let outside = along(&centroid, &reflected, gamma);
            let fc = f(&outside);
            evaluations += 1;
            if fc <= fr {
                replacement = Some((outside, fc));
            }
        } else {
            let inside = along(&centroid, &points[worst], gamma);
            let fcc = f(&inside);
            evaluations += 1;
            if fcc < values[worst] {
                replacement = Some((inside, fcc));
            }
        }

        match replacement {
            Some((x, fx)) => {
                points[worst] = x;
                values[worst] = fx;
            }
            None => {
                let anchor = points[best].clone();
                for &i in &order[1..] {
                    points[i] = along(&anchor, &points[i], sigma);
                    values[i] = f(&points[i]);
                    evaluations += 1;
                }
            }
        }

        let previous_best = values[order[0]];
        sort(&mut order, &values);
        if values[order[0]] < previous_best {
            trace.push((iterations, values[order[0]]));
        }
    }

    let best = order[0];
    SimplexOutcome {
        x: points[best].clone(),
        value: values[best],
        evaluations,
        iterations,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_convex_quadratic() {
        let target = [1.5, -2.0, 0.25, 3.0];
        let f = |x: &[f64]| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum();
        let cfg = OptimizerConfig {
            nm_tol: 1e-12,
            ..Default::default()
        };
        let out = minimize(f, &[0.0; 4], &cfg);
        for (a, b) in out.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-6, "{:?}", out.x);
        }
        assert!(out.iterations < cfg.nm_max_iters);
    }

    #[test]
    fn rosenbrock_reaches_minimum() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = minimize(f, &[-1.2, 1.0], &OptimizerConfig::default());
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn trace_is_monotone_and_ends_at_best() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>() + (x[0] - x[1]).abs();
        let out = minimize(f, &[2.0, -1.0, 0.5], &OptimizerConfig::default());
        assert!(out
            .trace
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 && w[1].0 > w[0].0));
        assert_eq!(out.trace.last().unwrap().1, out.value);
        assert!(out.value <= f(&[2.0, -1.0, 0.5]));
    }

    #[test]
    fn respects_iteration_cap() {
        let cfg = OptimizerConfig {
            nm_max_iters: 5,
            ..Default::default()
        };
        let out = minimize(|x: &[f64]| x[0] * x[0] + x[1] * x[1], &[3.0, 4.0], &cfg);
        assert_eq!(out.iterations, 5);
    }
}
