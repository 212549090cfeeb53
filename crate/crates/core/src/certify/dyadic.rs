//! Binary floating-point numbers `m · 2^e` with arbitrary-size mantissa and
//! explicitly directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// The number `mant · 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

/// `m / 2^s` rounded in direction `dir`.
fn shr_round(m: &BigInt, s: u64, dir: Round) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let mag: &BigUint = m.magnitude();
    let q = mag >> s;
    let exact = (&q << s) == *mag;
    let away_from_zero = !exact
        && matches!(
            (dir, m.sign()),
            (Round::Up, Sign::Plus) | (Round::Down, Sign::Minus)
        );
    let q = if away_from_zero { q + 1u32 } else { q };
    BigInt::from_biguint(m.sign(), q)
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self {
            mant: v.into(),
            exp: 0,
        }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Self { mant, exp }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Exponent of the leading bit: `2^e ≤ |x| < 2^{e+1}`. Undefined for zero.
    pub fn leading_exponent(&self) -> i64 {
        self.mant.bits() as i64 - 1 + self.exp
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        Self {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Rounds to at most `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= u64::from(prec) {
            return self.clone();
        }
        let s = bits - u64::from(prec);
        Self {
            mant: shr_round(&self.mant, s, dir),
            exp: self.exp + s as i64,
        }
    }

    /// Mantissas of `self` and `other` over a common exponent.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => (self.mant.clone(), other.mant.clone(), self.exp),
            Ordering::Greater => {
                let d = (self.exp - other.exp) as usize;
                (&self.mant << d, other.mant.clone(), other.exp)
            }
            Ordering::Less => {
                let d = (other.exp - self.exp) as usize;
                (self.mant.clone(), &other.mant << d, self.exp)
            }
        }
    }

    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(other);
        Self {
            mant: a + b,
            exp: e,
        }
    }

    pub fn sub_exact(&self, other: &Self) -> Self {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        Self {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    pub fn add(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.add_exact(other).round(prec, dir)
    }

    pub fn sub(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.sub_exact(other).round(prec, dir)
    }

    pub fn mul(&self, other: &Self, prec: u32, dir: Round) -> Self {
        self.mul_exact(other).round(prec, dir)
    }

    /// `self / other` rounded to `prec` bits. Panics on division by zero.
    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let shift =
            (i64::from(prec) + other.mant.bits() as i64 - self.mant.bits() as i64 + 2).max(0);
        let num = &self.mant << shift as usize;
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => -((-num).div_floor(&other.mant)),
        };
        Self {
            mant: q,
            exp: self.exp - other.exp - shift,
        }
        .round(prec, dir)
    }

    pub fn from_rational(r: &BigRational, prec: u32, dir: Round) -> Self {
        Self::from_int(r.numer().clone()).div(&Self::from_int(r.denom().clone()), prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest-ish `f64` (not directed); for diagnostics and heuristics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let drop = (bits - 60).max(0);
        let top = shr_round(&self.mant, drop as u64, Round::Down)
            .to_f64()
            .expect("60-bit mantissa fits");
        let e = self.exp + drop;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0;
        }
        // two steps so that neither power over- or underflows on its own
        let half = e / 2;
        top * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Decimal rendering with `digits` fractional digits, rounded in `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        let scaled = &self.mant * BigInt::from(10u32).pow(digits);
        let n = if self.exp >= 0 {
            scaled << self.exp as usize
        } else {
            shr_round(&scaled, (-self.exp) as u64, dir)
        };
        let neg = n.is_negative();
        let s = n.abs().to_string();
        let d = digits as usize;
        let s = if s.len() <= d {
            format!("{}{}", "0".repeat(d + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - d);
        let sign = if neg { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20, Round::Down))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn directed_division_brackets_one_third() {
        let third_lo = Dyadic::from_rational(&q(1, 3), 64, Round::Down);
        let third_hi = Dyadic::from_rational(&q(1, 3), 64, Round::Up);
        assert!(third_lo.to_rational() < q(1, 3));
        assert!(third_hi.to_rational() > q(1, 3));
        let gap = third_hi.sub_exact(&third_lo).to_rational();
        assert!(gap <= q(1, 1) / BigRational::from_integer(BigInt::one() << 64usize));
        let neg_lo = Dyadic::from_rational(&q(-1, 3), 64, Round::Down);
        assert_eq!(neg_lo, third_hi.neg());
    }

    #[test]
    fn exact_values_survive_rounding() {
        let x = Dyadic::from_rational(&q(3, 8), 10, Round::Up);
        assert_eq!(x.to_rational(), q(3, 8));
        assert_eq!(x.to_f64(), 0.375);
        assert_eq!(
            Dyadic::from_int(12345).round(3, Round::Down).to_f64(),
            12288.0
        );
        assert_eq!(
            Dyadic::from_int(12345).round(3, Round::Up).to_f64(),
            14336.0
        );
        assert_eq!(
            Dyadic::from_int(-12345).round(3, Round::Down).to_f64(),
            -14336.0
        );
    }

    #[test]
    fn ordering_across_exponents() {
        let a = Dyadic::new(BigInt::from(3), -1); // 1.5
        let b = Dyadic::new(BigInt::from(12), -3); // 1.5
        let c = Dyadic::new(BigInt::from(1), 1); // 2
        assert_eq!(a, b);
        assert!(a < c && c > b);
        assert!(Dyadic::from_int(-1) < Dyadic::zero());
    }

    #[test]
    fn decimal_rendering() {
        let third_lo = Dyadic::from_rational(&q(1, 3), 128, Round::Down);
        assert_eq!(third_lo.to_decimal(6, Round::Down), "0.333333");
        assert_eq!(third_lo.to_decimal(6, Round::Up), "0.333334");
        assert_eq!(Dyadic::from_int(-5).to_decimal(2, Round::Up), "-5.00");
        assert_eq!(
            Dyadic::new(BigInt::from(-3), -2).to_decimal(1, Round::Down),
            "-0.8"
        );
        assert_eq!(Dyadic::from_int(7).to_decimal(0, Round::Down), "7");
    }

    #[test]
    fn big_exponents_to_f64() {
        let x = Dyadic::new(BigInt::from(1), 1500);
        assert!(x.to_f64().is_infinite() || x.to_f64() > 1e300);
        assert_eq!(Dyadic::new(BigInt::from(1), -3000).to_f64(), 0.0);
    }
}
