//! Gauges of the parallelepiped `A(B_∞)` relative to the `ℓ_p` ball.
//!
//! For a nonsingular `A` with columns `x_i` and cofactor columns `y_j`,
//! `A(B_∞)` is the polytope with vertices `Σ σ_i x_i` and facets
//! `±{x : y_jᵀx = det A}`. The smallest `γ₁` with `A(B_∞) ⊆ γ₁B_p` is the
//! largest vertex norm; the largest `γ₂` with `γ₂B_p ⊆ A(B_∞)` is the
//! smallest facet distance `|det A| / ‖y_j‖_q`. Their ratio bounds the
//! Banach-Mazur distance from above, with equality at the optimum over `A`.

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundResult, Method};
use crate::error::{Error, Result};
use crate::exponent::{dual_norm, p_norm, Exponent};

/// Relative singularity cutoff: `|det A| ≤ SINGULAR_RTOL · (max|a_ij|)^n`.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// A dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    /// Wraps `entries` (row-major, length `n²`). Requires `n ≥ 1` and finite entries.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite entry {bad}")));
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from a flat vector whose length is a perfect square.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let n = (flat.len() as f64).sqrt().round() as usize;
        Self::new(n, flat.to_vec())
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            n: N,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| c * x).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j);
            }
        }
        Self { n, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Self { n, entries }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Determinant, columns, and cofactor columns of a matrix.
#[derive(Clone, Debug)]
pub struct GaugeData {
    pub det: f64,
    /// Columns `x_i` of `A`.
    pub columns: Vec<Vec<f64>>,
    /// `y_j = (A_{1j}, …, A_{nj})`, the cofactors of column `j`.
    pub cofactor_columns: Vec<Vec<f64>>,
    max_abs: f64,
}

impl GaugeData {
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// True when `|det A| ≤ SINGULAR_RTOL · (max|a_ij|)^n`.
    pub fn is_singular(&self) -> bool {
        let n = self.n() as i32;
        self.det == 0.0 || self.det.abs() <= SINGULAR_RTOL * self.max_abs.powi(n)
    }

    /// Applies `A⁻¹` through the cofactor columns: `(A⁻¹z)_j = y_jᵀz / det A`.
    pub fn apply_inverse(&self, z: &[f64]) -> Vec<f64> {
        self.cofactor_columns
            .iter()
            .map(|y| dot(y, z) / self.det)
            .collect()
    }

    /// The vertex `Σ σ_i x_i` of `A(B_∞)`.
    pub fn vertex(&self, pattern: &SignPattern) -> Vec<f64> {
        let n = self.n();
        let mut v = vec![0.0; n];
        for (x, &s) in self.columns.iter().zip(&pattern.signs) {
            for k in 0..n {
                v[k] += f64::from(s) * x[k];
            }
        }
        v
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A choice of signs `σ ∈ {−1, 1}ⁿ` with `σ₁ = +1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern {
    pub signs: Vec<i8>,
}

/// Enumerates the `2^{n−1}` sign patterns with the first sign fixed to `+1`.
///
/// Fixing `σ₁` is lossless because `‖v‖ = ‖−v‖`.
pub fn sign_patterns(n: usize) -> impl Iterator<Item = SignPattern> {
    assert!((1..64).contains(&n), "sign patterns need 1 <= n < 64");
    (0..1u64 << (n - 1)).map(move |mask| SignPattern {
        signs: (0..n)
            .map(|i| {
                if i > 0 && mask & (1 << (i - 1)) != 0 {
                    -1
                } else {
                    1
                }
            })
            .collect(),
    })
}

/// Outer and inner radii of the sandwich `γ₂B_p ⊆ A(B_∞) ⊆ γ₁B_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugePair {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl GaugePair {
    pub fn ratio(&self) -> f64 {
        self.gamma1 / self.gamma2
    }
}

/// Computes determinant and cofactor columns.
///
/// `n = 3` uses the closed-form expansion; other sizes use an LU
/// factorization with partial pivoting and one transposed solve per column.
pub fn decompose(a: &SquareMatrix) -> GaugeData {
    let n = a.n();
    let columns: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let (det, cofactors) = match n {
        1 => (a.get(0, 0), vec![vec![1.0]]),
        3 => cofactors_3x3(a),
        _ => cofactors_lu(a),
    };
    GaugeData {
        det,
        columns,
        cofactor_columns: cofactors,
        max_abs: a.max_abs(),
    }
}

fn cofactors_3x3(a: &SquareMatrix) -> (f64, Vec<Vec<f64>>) {
    let m = |i, j| a.get(i, j);
    // c[i][j] = (-1)^{i+j} · minor(i, j)
    let c = [
        [
            m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1),
            m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2),
            m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0),
        ],
        [
            m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2),
            m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0),
            m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1),
        ],
        [
            m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1),
            m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2),
            m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
        ],
    ];
    let det = m(0, 0) * c[0][0] + m(0, 1) * c[0][1] + m(0, 2) * c[0][2];
    let cols = (0..3).map(|j| vec![c[0][j], c[1][j], c[2][j]]).collect();
    (det, cols)
}

/// LU factors of a row-major matrix with the row permutation and its sign.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    det: f64,
}

impl Lu {
    fn factor(a: &SquareMatrix) -> Lu {
        let n = a.n();
        let mut lu = a.entries().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = 1.0;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| lu[i * n + k].abs().total_cmp(&lu[j * n + k].abs()))
                .unwrap();
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
                det = -det;
            }
            let d = lu[k * n + k];
            det *= d;
            if d == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Lu { n, lu, perm, det }
    }

    /// Solves `Aᵀz = b` using `PA = LU`, i.e. `Uᵀ Lᵀ P z = b`.
    fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let lu = &self.lu;
        // Uᵀ w = b (forward).
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for k in 0..i {
                s -= lu[k * n + i] * w[k];
            }
            w[i] = s / lu[i * n + i];
        }
        // Lᵀ u = w (backward, unit diagonal).
        for i in (0..n).rev() {
            let mut s = w[i];
            for k in i + 1..n {
                s -= lu[k * n + i] * w[k];
            }
            w[i] = s;
        }
        // z = Pᵀ u.
        let mut z = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            z[p] = w[i];
        }
        z
    }
}

fn cofactors_lu(a: &SquareMatrix) -> (f64, Vec<Vec<f64>>) {
    let n = a.n();
    let lu = Lu::factor(a);
    let det = lu.det;
    if det == 0.0 || !det.is_finite() {
        return (0.0, vec![vec![0.0; n]; n]);
    }
    // The cofactor matrix is det · A⁻ᵀ, so column j of it is det · A⁻ᵀ e_j,
    // which is det times the solution of Aᵀ z = e_j.
    let cols = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            lu.solve_transposed(&e)
                .into_iter()
                .map(|z| det * z)
                .collect()
        })
        .collect();
    (det, cols)
}

/// `γ₁`: the largest `ℓ_p` norm over the vertices of `A(B_∞)`.
pub fn gamma1(g: &GaugeData, p: Exponent) -> f64 {
    let n = g.n();
    let mut best = 0.0_f64;
    let mut v = vec![0.0; n];
    for mask in 0..1u64 << (n - 1) {
        v.copy_from_slice(&g.columns[0]);
        for (i, x) in g.columns.iter().enumerate().skip(1) {
            let s = if mask & (1 << (i - 1)) != 0 {
                -1.0
            } else {
                1.0
            };
            for k in 0..n {
                v[k] += s * x[k];
            }
        }
        best = best.max(p_norm(&v, p));
    }
    best
}

/// `γ₂`: the smallest facet distance `|det A| / ‖y_i‖_q`.
pub fn gamma2(g: &GaugeData, p: Exponent) -> Result<f64> {
    if g.is_singular() {
        return Err(Error::SingularMatrix);
    }
    Ok(g.det.abs() / max_dual_norm(g, p))
}

fn max_dual_norm(g: &GaugeData, p: Exponent) -> f64 {
    g.cofactor_columns
        .iter()
        .map(|y| dual_norm(y, p))
        .fold(0.0, f64::max)
}

pub fn gauge_pair(a: &SquareMatrix, p: Exponent) -> Result<GaugePair> {
    let g = decompose(a);
    let gamma2 = gamma2(&g, p)?;
    Ok(GaugePair {
        gamma1: gamma1(&g, p),
        gamma2,
    })
}

/// The objective `g_p(A) = max_{i,σ} ‖y_i‖_q ‖Σσ_j x_j‖_p / |det A|`.
pub fn objective(a: &SquareMatrix, p: Exponent) -> Result<f64> {
    let g = decompose(a);
    objective_from(&g, p)
}

pub fn objective_from(g: &GaugeData, p: Exponent) -> Result<f64> {
    if g.is_singular() {
        return Err(Error::SingularMatrix);
    }
    // max of products of nonnegative factors = product of maxima
    Ok(max_dual_norm(g, p) * gamma1(g, p) / g.det.abs())
}

/// The upper bound on `d(p)` witnessed by `A`.
pub fn distance_upper_from_witness(a: &SquareMatrix, p: Exponent) -> Result<BoundResult> {
    let value = objective(a, p)?;
    Ok(BoundResult {
        p,
        n: a.n(),
        value,
        method: Method::Witness,
        witness: Some(a.clone()),
        certified: false,
    })
}
