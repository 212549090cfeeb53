//! Exponents `p ∈ [1, ∞]` and the `ℓ_p` norms they index.
//!
//! `p = ∞` is a distinguished value rather than a large float, so the
//! endpoint cases (`1 ↔ ∞` conjugation, the max-norm) are exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
enum Repr {
    Finite(f64),
    Infinity,
}

/// An exponent `p` in the extended interval `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(Repr);

impl Exponent {
    pub const ONE: Exponent = Exponent(Repr::Finite(1.0));
    pub const TWO: Exponent = Exponent(Repr::Finite(2.0));
    pub const INFINITY: Exponent = Exponent(Repr::Infinity);

    /// Builds an exponent from a float. `f64::INFINITY` maps to the exact
    /// infinite exponent; NaN and values below 1 are rejected.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::InvalidExponent(value.to_string()));
        }
        if value.is_infinite() {
            Ok(Self::INFINITY)
        } else {
            Ok(Exponent(Repr::Finite(value)))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    /// The exponent as a float; `f64::INFINITY` for `p = ∞`.
    pub fn value(self) -> f64 {
        match self.0 {
            Repr::Finite(v) => v,
            Repr::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, with `1/∞ = 0` exactly.
    pub fn recip(self) -> f64 {
        match self.0 {
            Repr::Finite(v) => 1.0 / v,
            Repr::Infinity => 0.0,
        }
    }

    /// The conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        match self.0 {
            Repr::Infinity => Self::ONE,
            Repr::Finite(v) if v == 1.0 => Self::INFINITY,
            Repr::Finite(v) if v == 2.0 => Self::TWO,
            Repr::Finite(v) => {
                // v > 1 here, so v / (v - 1) is finite and > 1.
                Exponent(Repr::Finite(v / (v - 1.0)))
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Repr::Finite(v) => write!(f, "{v}"),
            Repr::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "oo" | "infinity" | "∞" => Ok(Self::INFINITY),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidExponent(t.to_string()))?;
                Exponent::new(v)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Repr::Finite(v) => serializer.serialize_f64(v),
            Repr::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Exponent::new(v).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `|t|^p` as `exp(p ln|t|)`, with `0^p = 0`.
#[inline]
fn abs_pow(t: f64, p: f64) -> f64 {
    let a = t.abs();
    if a == 0.0 {
        0.0
    } else {
        (p * a.ln()).exp()
    }
}

/// The `ℓ_p` norm of `v`.
///
/// Entries are divided by the largest magnitude before exponentiation so
/// that large coordinates cannot overflow `|α|^p`.
pub fn p_norm(v: &[f64], p: Exponent) -> f64 {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    match p.0 {
        Repr::Infinity => scale,
        Repr::Finite(e) if e == 1.0 => v.iter().map(|x| x.abs()).sum(),
        Repr::Finite(e) => {
            let sum: f64 = v.iter().map(|x| abs_pow(x / scale, e)).sum();
            scale * abs_pow(sum, 1.0 / e)
        }
    }
}

/// The norm of the functional `x ↦ vᵀx` on `ℓ_p`, i.e. the `ℓ_q` norm of `v`.
pub fn dual_norm(v: &[f64], p: Exponent) -> f64 {
    p_norm(v, p.conjugate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn conjugate_endpoints_are_exact() {
        assert_eq!(Exponent::ONE.conjugate(), Exponent::INFINITY);
        assert_eq!(Exponent::INFINITY.conjugate(), Exponent::ONE);
        assert_eq!(Exponent::TWO.conjugate(), Exponent::TWO);
    }

    #[test]
    fn conjugate_of_one_point_seven() {
        let q = e(1.7).conjugate().value();
        assert!((q - 17.0 / 7.0).abs() < 1e-12, "{q}");
        let back = e(1.7).conjugate().conjugate().value();
        assert!((back - 1.7).abs() <= f64::EPSILON * 1.7);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(Exponent::new(0.99).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert!(Exponent::new(f64::NEG_INFINITY).is_err());
        assert!("0.5".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn parses_infinity_spellings() {
        for s in ["inf", "oo", "Inf", "infinity"] {
            assert_eq!(s.parse::<Exponent>().unwrap(), Exponent::INFINITY);
        }
        assert_eq!(" 1.5 ".parse::<Exponent>().unwrap(), e(1.5));
        assert_eq!(Exponent::new(f64::INFINITY).unwrap(), Exponent::INFINITY);
    }

    #[test]
    fn recip_of_infinity_is_zero() {
        assert_eq!(Exponent::INFINITY.recip(), 0.0);
        assert_eq!(e(4.0).recip(), 0.25);
    }

    #[test]
    fn norms_from_lemma_example() {
        assert_eq!(p_norm(&[1.0, 4.0, 1.0], Exponent::ONE), 6.0);
        assert_eq!(p_norm(&[3.0, 1.0, 3.0], Exponent::INFINITY), 3.0);
    }

    #[test]
    fn all_ones_vector() {
        for p in [1.0, 1.3, 2.0, 3.0, 7.5] {
            let got = p_norm(&[1.0, 1.0, 1.0], e(p));
            let want = 3f64.powf(1.0 / p);
            assert!((got - want).abs() < 1e-14 * want, "p={p}");
        }
        assert_eq!(p_norm(&[1.0, 1.0, 1.0], Exponent::INFINITY), 1.0);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        for p in [Exponent::ONE, e(1.5), Exponent::TWO, Exponent::INFINITY] {
            assert_eq!(p_norm(&[0.0, 0.0, 0.0], p), 0.0);
            assert!(p_norm(&[0.0, 1e-300, 0.0], p) > 0.0);
        }
    }

    #[test]
    fn dual_norm_examples() {
        assert_eq!(dual_norm(&[1.0, 0.0, 0.0], Exponent::ONE), 1.0);
        assert_eq!(dual_norm(&[1.0, 1.0, 1.0], Exponent::ONE), 1.0);
        // Euclidean oracle.
        let euclid = (1.0f64 + 1.0 + 1.0).sqrt();
        assert!((dual_norm(&[1.0, 1.0, 1.0], Exponent::TWO) - euclid).abs() < 1e-15);
    }

    #[test]
    fn large_entries_do_not_overflow() {
        let v = [1e200, -3e200, 2e200];
        let got = p_norm(&v, e(3.0));
        let want = 1e200 * (1.0f64 + 27.0 + 8.0).powf(1.0 / 3.0);
        assert!(got.is_finite());
        assert!((got - want).abs() < 1e-13 * want);
    }

    #[test]
    fn serde_roundtrip_uses_inf_string() {
        let json = serde_json::to_string(&Exponent::INFINITY).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: Exponent = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Exponent::INFINITY);
        let back: Exponent = serde_json::from_str("1.7").unwrap();
        assert_eq!(back, e(1.7));
        assert!(serde_json::from_str::<Exponent>("0.3").is_err());
    }
}
