//! The closed-form bound on `(1, 2]` and a numerical confirmation of its
//! monotonicity argument.
//!
//! With `f(p) = ln(2 + 4^p) + (p − 1) ln(2·3^{p/(p−1)} + 1)` the bound is
//! `e^{r(p)}/10` where `r = f/p`. Since `r' = w/p²` with `w = p f' − f` and
//! `w' = p f'' > 0`, `r` falls then rises, so `r ≤ lim_{p→1⁺} r = ln 18` on
//! `(1, 1.7]` once `r(1.7) < ln 18` is checked.
//!
//! All three functions are written in terms of `t = 3^{−p/(p−1)}`, which
//! underflows harmlessly to zero as `p → 1⁺` instead of overflowing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right end of the range where the closed form alone gives `9/5`.
pub const ANALYTIC_LIMIT: f64 = 1.7;

const LN3: f64 = 1.098_612_288_668_109_8;
const LN4: f64 = 2.0 * std::f64::consts::LN_2;

#[inline]
fn t_of(p: f64) -> f64 {
    (-(p / (p - 1.0)) * LN3).exp()
}

pub fn f(p: f64) -> f64 {
    let t = t_of(p);
    (2.0 + 4f64.powf(p)).ln()
        + p * LN3
        + (p - 1.0) * std::f64::consts::LN_2
        + (p - 1.0) * (0.5 * t).ln_1p()
}

pub fn f_prime(p: f64) -> f64 {
    let t = t_of(p);
    let four = 4f64.powf(p);
    four / (2.0 + four) * LN4 + (2.0 + t).ln() + LN3 + LN3 * t / ((p - 1.0) * (2.0 + t))
}

pub fn f_second(p: f64) -> f64 {
    let t = t_of(p);
    let four = 4f64.powf(p);
    2.0 * LN4 * LN4 * four / ((2.0 + four) * (2.0 + four))
        + 2.0 * LN3 * LN3 / (p - 1.0).powi(3) * t / ((2.0 + t) * (2.0 + t))
}

pub fn r(p: f64) -> f64 {
    f(p) / p
}

pub fn w(p: f64) -> f64 {
    p * f_prime(p) - f(p)
}

/// `lim_{p→1⁺} w(p) = (2/3) ln 4 − ln 3`.
pub fn w_limit_at_one() -> f64 {
    2.0 / 3.0 * LN4 - LN3
}

/// `w(2)` in closed form: `(16/9) ln 4 + 2 ln 19 − (36/19) ln 3 − ln(18·19)`.
pub fn w_at_two_closed_form() -> f64 {
    16.0 / 9.0 * LN4 + 2.0 * 19f64.ln() - 36.0 / 19.0 * LN3 - (18.0f64 * 19.0).ln()
}

/// `lim_{p→1⁺} r(p) = ln 18`.
pub fn r_limit_at_one() -> f64 {
    18f64.ln()
}

/// The closed-form upper bound on `d(p)`, `p ∈ [1, 2]`; exactly `9/5` at `p = 1`.
pub fn analytic_lp_bound(p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::OutOfRange(format!(
            "closed-form bound needs p in [1, 2], got {p}"
        )));
    }
    if p == 1.0 {
        // ‖(1,4,1)‖₁ ‖(3,1,3)‖_∞ / 10
        return Ok(1.8);
    }
    Ok(r(p).exp() / 10.0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma31Report {
    pub grid_step: f64,
    pub grid: Vec<f64>,
    pub r_values: Vec<f64>,
    pub w_values: Vec<f64>,
    pub w_limit_at_one: f64,
    pub w_at_two: f64,
    pub w_strictly_increasing: bool,
    pub sign_changes: usize,
    /// Grid cell `[a, b]` in which `w` changes sign.
    pub w_sign_change: Option<(f64, f64)>,
    /// The cell narrowed by bisection.
    pub root_bracket: Option<(f64, f64)>,
    pub r_at_limit: f64,
    pub r_at_analytic_limit: f64,
    pub r_max_on_range: f64,
    pub verdict: bool,
}

/// Evaluates `r` and `w` on the grid `1 + k·step`, `k = 1, …`, up to `2`,
/// and checks the claims behind the closed-form bound.
pub fn lemma31_report(grid_step: f64) -> Result<Lemma31Report> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::OutOfRange(format!(
            "grid step must lie in (0, 0.01], got {grid_step}"
        )));
    }
    let steps = (1.0 / grid_step).round() as usize;
    let grid: Vec<f64> = (1..=steps)
        .map(|k| {
            if k == steps {
                2.0
            } else {
                1.0 + k as f64 * grid_step
            }
        })
        .collect();
    let r_values: Vec<f64> = grid.iter().map(|&p| r(p)).collect();
    let w_values: Vec<f64> = grid.iter().map(|&p| w(p)).collect();

    let w_strictly_increasing = w_values.windows(2).all(|pair| pair[1] > pair[0]);
    let mut sign_changes = 0;
    let mut w_sign_change = None;
    for (i, pair) in w_values.windows(2).enumerate() {
        if (pair[0] < 0.0) != (pair[1] < 0.0) {
            sign_changes += 1;
            w_sign_change.get_or_insert((grid[i], grid[i + 1]));
        }
    }
    let root_bracket = w_sign_change.map(|(a, b)| bisect(w, a, b, 50));

    let r_max_on_range = grid
        .iter()
        .zip(&r_values)
        .filter(|(&p, _)| p <= ANALYTIC_LIMIT + 1e-12)
        .map(|(_, &rv)| rv)
        .fold(f64::NEG_INFINITY, f64::max);
    let r_at_limit = r_limit_at_one();
    let r_at_analytic_limit = r(ANALYTIC_LIMIT);
    let w_limit = w_limit_at_one();
    let w_at_two = w(2.0);

    let verdict = w_strictly_increasing
        && sign_changes == 1
        && w_limit < 0.0
        && w_values[0] < 0.0
        && w_at_two > 0.0
        && r_at_analytic_limit < r_at_limit
        && r_max_on_range <= r_at_limit;

    Ok(Lemma31Report {
        grid_step,
        grid,
        r_values,
        w_values,
        w_limit_at_one: w_limit,
        w_at_two,
        w_strictly_increasing,
        sign_changes,
        w_sign_change,
        root_bracket,
        r_at_limit,
        r_at_analytic_limit,
        r_max_on_range,
        verdict,
    })
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let lo_neg = g(lo) < 0.0;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The displayed inequality, evaluated literally.
    fn dp_direct(p: f64) -> f64 {
        (4f64.powf(p) + 2.0).powf(1.0 / p)
            * (2.0 * 3f64.powf(p / (p - 1.0)) + 1.0).powf((p - 1.0) / p)
            / 10.0
    }

    /// f in its original form, valid away from p = 1.
    fn f_direct(p: f64) -> f64 {
        (2.0 + 4f64.powf(p)).ln() + (p - 1.0) * (2.0 * 3f64.powf(p / (p - 1.0)) + 1.0).ln()
    }

    #[test]
    fn ln3_constant() {
        assert!((LN3 - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn stable_f_matches_direct_form() {
        for p in [1.2, 1.5, 1.7, 1.9, 2.0] {
            assert!((f(p) - f_direct(p)).abs() < 1e-12, "p={p}");
            assert!((analytic_lp_bound(p).unwrap() - dp_direct(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for p in [1.05, 1.3, 1.5, 1.7, 1.95] {
            let fd1 = (f_direct(p + h) - f_direct(p - h)) / (2.0 * h);
            let fd2 = (f_prime(p + h) - f_prime(p - h)) / (2.0 * h);
            assert!((f_prime(p) - fd1).abs() < 1e-7, "f' at {p}");
            assert!((f_second(p) - fd2).abs() < 1e-6, "f'' at {p}");
        }
    }

    #[test]
    fn limits_at_one() {
        assert!((f(1.0 + 1e-9) - 18f64.ln()).abs() < 1e-8);
        assert!((f_prime(1.0 + 1e-6) - (2.0 / 3.0 * LN4 + 6f64.ln())).abs() < 1e-5);
        assert!((w_limit_at_one() + 0.1744).abs() < 1e-4);
        assert!((w(1.0001) - w_limit_at_one()).abs() < 1e-3);
    }

    #[test]
    fn w_at_two_matches_closed_form() {
        assert!((w(2.0) - w_at_two_closed_form()).abs() < 1e-13);
        assert!((w(2.0) - 0.437).abs() < 1e-3);
    }

    #[test]
    fn bound_endpoints() {
        assert_eq!(analytic_lp_bound(1.0).unwrap(), 1.8);
        let at_two = (18.0f64 * 19.0).sqrt() / 10.0;
        assert!((analytic_lp_bound(2.0).unwrap() - at_two).abs() < 1e-14);
        assert!((analytic_lp_bound(1.0001).unwrap() - 1.8).abs() < 1e-3);
        assert!((analytic_lp_bound(4.0 / 3.0).unwrap() - dp_direct(4.0 / 3.0)).abs() < 1e-12);
        assert!(analytic_lp_bound(0.5).is_err());
        assert!(analytic_lp_bound(2.5).is_err());
    }

    #[test]
    fn report_passes_at_default_step() {
        let rep = lemma31_report(1e-3).unwrap();
        assert_eq!(rep.grid.len(), 1000);
        assert_eq!(*rep.grid.last().unwrap(), 2.0);
        assert!(rep.verdict);
        assert_eq!(rep.sign_changes, 1);
        let (lo, hi) = rep.root_bracket.unwrap();
        assert!(hi - lo < 1e-15 && w(lo) < 0.0 && w(hi) >= 0.0);
        assert!((rep.r_at_analytic_limit - 2.8864).abs() < 2e-4);
        assert!((rep.r_at_limit - 2.8904).abs() < 2e-4);
    }

    #[test]
    fn report_rejects_bad_step() {
        assert!(lemma31_report(0.0).is_err());
        assert!(lemma31_report(0.05).is_err());
    }
}
