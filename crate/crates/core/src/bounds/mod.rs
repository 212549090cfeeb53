//! Analytic upper bounds on `d(p) = d_BM(ℓ_p^3, ℓ_∞^3)` and their combination.

mod lemma;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use lemma::{
    analytic_lp_bound, f, f_prime, f_second, lemma31_report, r, r_limit_at_one, w,
    w_at_two_closed_form, w_limit_at_one, Lemma31Report, ANALYTIC_LIMIT,
};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::gauge::SquareMatrix;

/// Dimension of the main problem.
pub const DIM: usize = 3;

/// Certified anchors `(p₀, b₀)` with `d(p₀) ≤ b₀`: the two integer
/// witnesses (certified by interval evaluation) and the exact value at 2.
pub fn known_anchors() -> Vec<(Exponent, f64)> {
    vec![
        (Exponent::new(1.7).unwrap(), 1.6967),
        (Exponent::new(1.8).unwrap(), 1.7033),
        (Exponent::TWO, 3f64.sqrt()),
    ]
}

/// How a bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    AnalyticLp,
    Witness,
    Optimizer,
    Chained,
    Taschuk,
    Youssef,
    XueL1,
    SqrtPow2,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::AnalyticLp => "analytic-lp",
            Method::Witness => "witness",
            Method::Optimizer => "optimizer",
            Method::Chained => "chained",
            Method::Taschuk => "taschuk",
            Method::Youssef => "youssef",
            Method::XueL1 => "xue-l1",
            Method::SqrtPow2 => "sqrt-pow2",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An upper bound on `d_BM(ℓ_p^n, ℓ_∞^n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub p: Exponent,
    pub n: usize,
    pub value: f64,
    pub method: Method,
    pub witness: Option<SquareMatrix>,
    /// Set only for exact formulas and interval-certified values.
    pub certified: bool,
}

impl BoundResult {
    fn formula(p: Exponent, n: usize, value: f64, method: Method, certified: bool) -> Self {
        Self {
            p,
            n,
            value,
            method,
            witness: None,
            certified,
        }
    }
}

fn same_side_of_two(p: Exponent, q: Exponent) -> bool {
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    hi <= Exponent::TWO || lo >= Exponent::TWO
}

/// `d_BM(ℓ_p^n, ℓ_q^n) = n^{|1/p − 1/q|}` when `p` and `q` lie on the same
/// side of 2.
pub fn exact_distance(p: Exponent, q: Exponent, n: usize) -> Result<f64> {
    if !same_side_of_two(p, q) {
        return Err(Error::SidesStraddleTwo {
            p: p.to_string(),
            q: q.to_string(),
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange("dimension must be positive".into()));
    }
    if p == q {
        return Ok(1.0);
    }
    Ok((n as f64).powf((p.recip() - q.recip()).abs()))
}

/// `d_BM(ℓ_p^2, ℓ_∞^2) = 2^{1 − 1/p}` for `p ∈ [1, 2)`.
pub fn exact_distance_2d(p: Exponent) -> Result<f64> {
    if p >= Exponent::TWO {
        return Err(Error::OutOfRange(format!(
            "planar formula needs p < 2, got {p}; use exact_distance"
        )));
    }
    Ok(2f64.powf(1.0 - p.recip()))
}

/// Published bounds from the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// Bound on the maximal distance to `ℓ_∞^n` over all `n`-dimensional spaces, `n ≥ 3`.
    Taschuk,
    /// `(2n)^{5/6}`, same quantity.
    Youssef,
    /// `(√2 + 1)√n`, for `p = 1` only.
    XueL1,
    /// `√n` for all `p` when `n` is a power of two.
    SqrtPow2,
}

impl ReferenceKind {
    pub fn method(self) -> Method {
        match self {
            ReferenceKind::Taschuk => Method::Taschuk,
            ReferenceKind::Youssef => Method::Youssef,
            ReferenceKind::XueL1 => Method::XueL1,
            ReferenceKind::SqrtPow2 => Method::SqrtPow2,
        }
    }
}

pub fn reference_bound(n: usize, kind: ReferenceKind) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "reference bounds need n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    match kind {
        ReferenceKind::Taschuk => {
            if n < 3 {
                return Err(Error::OutOfRange("Taschuk's bound needs n >= 3".into()));
            }
            Ok((nf * nf - 2.0 * nf + 2.0 + 2.0 / ((nf + 2.0).sqrt() - 1.0)).sqrt())
        }
        ReferenceKind::Youssef => Ok((2.0 * nf).powf(5.0 / 6.0)),
        ReferenceKind::XueL1 => Ok((2f64.sqrt() + 1.0) * nf.sqrt()),
        ReferenceKind::SqrtPow2 => {
            if !n.is_power_of_two() {
                return Err(Error::OutOfRange(format!("{n} is not a power of two")));
            }
            Ok(nf.sqrt())
        }
    }
}

/// The default feasibility cutoff for `n = 3`: `√(2(√5 + 11))/2 ≈ 2.572553`.
pub fn taschuk_threshold_3d() -> f64 {
    (2.0 * (5f64.sqrt() + 11.0)).sqrt() / 2.0
}

/// Spreads anchor bounds by multiplicativity:
/// `d(p) ≤ b₀ · 3^{|1/p₀ − 1/p|}`, minimized over anchors.
pub fn chain_bound(p: Exponent, anchors: &[(Exponent, f64)]) -> Result<BoundResult> {
    if anchors.is_empty() {
        return Err(Error::EmptyAnchors);
    }
    let mut best = f64::INFINITY;
    for &(p0, b0) in anchors {
        let hop = exact_distance(p0, p, DIM)?;
        best = best.min(b0 * hop);
    }
    Ok(BoundResult::formula(p, DIM, best, Method::Chained, false))
}

/// The best available upper bound on `d(p)` from the analytic routes.
///
/// Every applicable route is evaluated and the smallest value wins; ties go
/// to the exact formula.
pub fn best_upper_bound(p: Exponent) -> BoundResult {
    let mut candidates = Vec::with_capacity(3);
    if p >= Exponent::TWO {
        let v = exact_distance(p, Exponent::INFINITY, DIM).expect("p >= 2");
        candidates.push(BoundResult::formula(p, DIM, v, Method::Exact, true));
    }
    if p <= Exponent::TWO {
        let v = analytic_lp_bound(p.value()).expect("p in [1, 2]");
        candidates.push(BoundResult::formula(p, DIM, v, Method::AnalyticLp, false));
        candidates.push(chain_bound(p, &known_anchors()).expect("anchors on [1, 2]"));
    }
    candidates
        .into_iter()
        .reduce(|best, c| if c.value < best.value { c } else { best })
        .expect("at least one route applies")
}

/// Guaranteed piece diameter when a diameter-1 subset of `ℓ_p^3` is split
/// into 8 pieces: half of the distance bound.
pub fn borsuk_bound(p: Exponent) -> f64 {
    best_upper_bound(p).value / 2.0
}
