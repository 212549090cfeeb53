//! Exact rational inputs for the certifier.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::matrix_io::MatrixText;

/// Parses a decimal literal such as `-12.5`, `3`, `.25` or `1.7e-3` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a decimal literal: {s:?}"));
    let t = s.trim();
    let (mantissa, exp10) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp10 - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        BigRational::from_integer(all * ten.pow(scale as u32))
    } else {
        BigRational::new(all, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// An exponent `p ∈ [1, ∞]` held exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactExponent {
    Finite(BigRational),
    Infinity,
}

impl ExactExponent {
    pub fn new(p: BigRational) -> Result<Self> {
        if p < BigRational::one() {
            return Err(Error::InvalidExponent(p.to_string()));
        }
        Ok(Self::Finite(p))
    }

    pub fn one() -> Self {
        Self::Finite(BigRational::one())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Self::Finite(p) if p.is_one())
    }

    /// `q = p/(p − 1)`, with `1 ↔ ∞`.
    pub fn conjugate(&self) -> Self {
        match self {
            Self::Infinity => Self::one(),
            Self::Finite(p) if p.is_one() => Self::Infinity,
            Self::Finite(p) => Self::Finite(p / (p - BigRational::one())),
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(&self) -> BigRational {
        match self {
            Self::Infinity => BigRational::zero(),
            Self::Finite(p) => p.recip(),
        }
    }
}

impl From<Exponent> for ExactExponent {
    /// The exact binary value of the float (so `1.7_f64` is not `17/10`).
    fn from(p: Exponent) -> Self {
        if p.is_infinite() {
            Self::Infinity
        } else {
            Self::Finite(BigRational::from_float(p.value()).expect("finite exponent"))
        }
    }
}

impl FromStr for ExactExponent {
    type Err = Error;

    /// Decimal literal read exactly, or `inf` / `oo`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "oo" | "infinity" | "∞" => Ok(Self::Infinity),
            t => Self::new(parse_decimal(t)?),
        }
    }
}

impl fmt::Display for ExactExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Infinity => f.write_str("inf"),
            Self::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// A square matrix with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    pub n: usize,
    pub entries: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn from_integers<const N: usize>(rows: [[i64; N]; N]) -> Self {
        Self {
            n: N,
            entries: rows
                .iter()
                .flatten()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect(),
        }
    }

    pub fn from_text(t: &MatrixText) -> Result<Self> {
        let entries = t
            .entries
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: t.n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        Self { n, entries }
    }

    /// The matrix multiplied by the least common denominator of its entries.
    /// `g_p` is scale invariant, so this loses nothing.
    pub fn integer_scaled(&self) -> Vec<BigInt> {
        let lcd = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        self.entries
            .iter()
            .map(|e| (e * BigRational::from_integer(lcd.clone())).to_integer())
            .collect()
    }
}

/// Determinant by fraction-free (Bareiss) elimination; exact.
pub fn det_bareiss(n: usize, m: &[BigInt]) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(i) => {
                    for j in 0..n {
                        a.swap(k * n + j, i * n + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[(n - 1) * n + (n - 1)]
}

/// Exact determinant and cofactor columns `y_j = (C_{1j}, …, C_{nj})`.
pub fn exact_cofactors(n: usize, m: &[BigInt]) -> (BigInt, Vec<Vec<BigInt>>) {
    let det = det_bareiss(n, m);
    let mut cols = vec![vec![BigInt::zero(); n]; n];
    if n == 1 {
        cols[0][0] = BigInt::one();
        return (det, cols);
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<BigInt> = (0..n)
                .filter(|&r| r != i)
                .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c)))
                .map(|(r, c)| m[r * n + c].clone())
                .collect();
            let d = det_bareiss(n - 1, &minor);
            cols[j][i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    (det, cols)
}

pub(crate) fn abs_all(v: &[BigInt]) -> Vec<BigInt> {
    v.iter().map(Signed::abs).collect()
}
