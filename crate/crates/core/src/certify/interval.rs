//! Closed intervals with dyadic endpoints and outward rounding.
//!
//! Every operation returns an interval containing all exact results for
//! arguments drawn from its inputs. `exp` and `ln` are enclosed with
//! truncated series plus an explicit bound on the remainder.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::dyadic::{Dyadic, Round};

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

/// Guard bits carried inside the transcendental routines.
const GUARD: u32 = 32;
/// `exp` halves its reduced argument this many times, then squares back.
const EXP_HALVINGS: i64 = 8;

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Self { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self::point(Dyadic::from_int(v))
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Self {
            lo: Dyadic::from_rational(r, prec, Round::Down),
            hi: Dyadic::from_rational(r, prec, Round::Up),
        }
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub_exact(&self.lo)
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Self {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        Self {
            lo: self.lo.add(&o.lo, prec, Round::Down),
            hi: self.hi.add(&o.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.mul(b, prec, Round::Down))
            .min()
            .unwrap();
        let hi = pairs
            .iter()
            .map(|(a, b)| a.mul(b, prec, Round::Up))
            .max()
            .unwrap();
        Self { lo, hi }
    }

    /// Panics if `o` contains zero.
    pub fn div(&self, o: &Self, prec: u32) -> Self {
        assert!(
            o.lo.is_positive() || o.hi.is_negative(),
            "interval division by an interval containing zero"
        );
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div(b, prec, Round::Down))
            .min()
            .unwrap();
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div(b, prec, Round::Up))
            .max()
            .unwrap();
        Self { lo, hi }
    }

    /// Hull of `{max(a, b) : a ∈ self, b ∈ o}`.
    pub fn max(&self, o: &Self) -> Self {
        Self {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    fn round_out(&self, prec: u32) -> Self {
        Self {
            lo: self.lo.round(prec, Round::Down),
            hi: self.hi.round(prec, Round::Up),
        }
    }

    /// Widens by `[-r, r]`.
    fn pad(&self, r: &Dyadic) -> Self {
        Self {
            lo: self.lo.sub_exact(r),
            hi: self.hi.add_exact(r),
        }
    }

    pub fn exp(&self, prec: u32) -> Self {
        Self {
            lo: exp_point(&self.lo, prec).lo,
            hi: exp_point(&self.hi, prec).hi,
        }
    }

    /// Natural log; panics unless the interval is strictly positive.
    pub fn ln(&self, prec: u32) -> Self {
        assert!(self.is_positive(), "ln of a non-positive interval");
        Self {
            lo: ln_point(&self.lo, prec).lo,
            hi: ln_point(&self.hi, prec).hi,
        }
    }

    /// `x^e` for `x ≥ 0` and `e > 0`, as `exp(e · ln x)` with `0^e = 0`.
    pub fn pow(&self, e: &Interval, prec: u32) -> Self {
        assert!(!self.lo.is_negative(), "pow of a negative base");
        assert!(e.is_positive(), "pow needs a positive exponent");
        if self.hi.is_zero() {
            return Self::zero();
        }
        let hi = self.hi_pow(e, prec);
        if self.lo.is_zero() {
            return Self {
                lo: Dyadic::zero(),
                hi,
            };
        }
        let lo_base = Self::point(self.lo.clone());
        let lo_ln = lo_base.ln(prec + GUARD);
        // smallest value of e·ln(lo) over e ∈ [e.lo, e.hi]
        let lo = lo_ln.mul(e, prec + GUARD).exp(prec).lo;
        Self { lo, hi }
    }

    fn hi_pow(&self, e: &Interval, prec: u32) -> Dyadic {
        let hi_ln = Self::point(self.hi.clone()).ln(prec + GUARD);
        hi_ln.mul(e, prec + GUARD).exp(prec).hi
    }
}

thread_local! {
    static LN2_CACHE: RefCell<HashMap<u32, Interval>> = RefCell::new(HashMap::new());
}

/// Enclosure of `ln 2 = 2 Σ_{k≥0} (1/3)^{2k+1}/(2k+1)`.
pub fn ln2(prec: u32) -> Interval {
    if let Some(hit) = LN2_CACHE.with(|c| c.borrow().get(&prec).cloned()) {
        return hit;
    }
    let wp = prec + GUARD;
    let third = Interval::from_rational(&BigRational::new(1.into(), 3.into()), wp);
    let v = atanh_series(&third, &BigRational::new(1.into(), 3.into()), wp)
        .mul_pow2(1)
        .round_out(prec);
    LN2_CACHE.with(|c| c.borrow_mut().insert(prec, v.clone()));
    v
}

/// `Σ_{k<K} t^{2k+1}/(2k+1)` plus a bound on the tail, for `|t| ≤ t_max < 1`.
fn atanh_series(t: &Interval, t_max: &BigRational, wp: u32) -> Interval {
    let t2 = t.mul(t, wp);
    let mut power = t.clone();
    let mut sum = Interval::zero();
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (wp as usize + 4));
    let t_max2 = t_max * t_max;
    let mut tmax_pow = t_max.clone();
    let mut k: u32 = 0;
    loop {
        let term = power.div(&Interval::from_int(2 * k + 1), wp);
        sum = sum.add(&term, wp);
        power = power.mul(&t2, wp);
        tmax_pow = &tmax_pow * &t_max2;
        k += 1;
        // tail ≤ t^{2k+1}/(2k+1) · 1/(1 − t²)
        let tail = &tmax_pow
            / BigRational::from_integer((2 * k + 1).into())
            / (BigRational::one() - &t_max2);
        if tail < tol || k > 10 * wp {
            let r = Dyadic::from_rational(&tail, wp, Round::Up);
            return sum.pad(&r);
        }
    }
}

/// Enclosure of `e^x` for a single dyadic `x`.
fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::one();
    }
    let wp = prec + GUARD + EXP_HALVINGS as u32;
    let l2 = ln2(wp);
    // x = k ln 2 + r, |r| ≲ 0.35
    let xf = x.to_f64();
    assert!(
        xf.is_finite() && xf.abs() < 1e15,
        "exp argument out of range: {xf}"
    );
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let r = Interval::point(x.clone())
        .sub(&l2.mul(&Interval::from_int(k), wp), wp)
        .mul_pow2(-EXP_HALVINGS);
    // Taylor series of e^r for |r| ≤ 2^-8 · 0.36 < 1/2
    let r_abs = r.lo.abs().max(r.hi.abs());
    let mut term = Interval::one();
    let mut sum = Interval::one();
    let mut bound = Dyadic::from_int(1); // |r|^j / j!
    let tol = Dyadic::new(BigInt::one(), -(i64::from(wp) + 4));
    let mut j: u32 = 1;
    loop {
        term = term.mul(&r, wp).div(&Interval::from_int(j), wp);
        sum = sum.add(&term, wp);
        // bound ≥ |r|^j / j!
        bound = bound
            .mul(&r_abs, wp, Round::Up)
            .div(&Dyadic::from_int(j), wp, Round::Up);
        j += 1;
        // tail Σ_{i≥j} |r|^i/i! ≤ 2|r|^j/j! ≤ bound, using |r| ≤ 1/2
        if bound < tol || j > 4 * wp {
            sum = sum.pad(&bound);
            break;
        }
    }
    for _ in 0..EXP_HALVINGS {
        sum = sum.mul(&sum, wp);
    }
    sum.mul_pow2(k).round_out(prec)
}

/// Enclosure of `ln x` for a single positive dyadic `x`.
fn ln_point(x: &Dyadic, prec: u32) -> Interval {
    assert!(x.is_positive(), "ln of non-positive value");
    let wp = prec + GUARD;
    // x = m · 2^e with m ∈ [0.75, 1.5)
    let mut e = x.leading_exponent();
    let mut m = x.mul_pow2(-e);
    if m > Dyadic::new(BigInt::from(3), -1) {
        e += 1;
        m = m.mul_pow2(-1);
    }
    if m == Dyadic::from_int(1) {
        return ln2(prec).mul(&Interval::from_int(e), prec);
    }
    let m = Interval::point(m);
    let one = Interval::one();
    let t = m.sub(&one, wp).div(&m.add(&one, wp), wp);
    // |t| ≤ (1.5 − 1)/(1.5 + 1) = 1/5
    let t_max = BigRational::new(1.into(), 5.into());
    let ln_m = atanh_series(&t, &t_max, wp).mul_pow2(1);
    ln2(wp)
        .mul(&Interval::from_int(e), wp)
        .add(&ln_m, wp)
        .round_out(prec)
}
