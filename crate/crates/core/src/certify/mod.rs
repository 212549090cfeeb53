//! Rigorous evaluation of `g_p(A)` for matrices with exact entries.
//!
//! The matrix is scaled to integers, so the determinant, the cofactors and
//! the `ℓ_1`/`ℓ_∞` norms are exact. Fractional powers are enclosed in
//! outward-rounded dyadic intervals at a chosen working precision. The upper
//! endpoint of the final interval is a guaranteed upper bound on `g_p(A)`,
//! and therefore on the distance.

pub mod dyadic;
mod exact;
pub mod interval;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use dyadic::{Dyadic, Round};
pub use exact::{det_bareiss, exact_cofactors, parse_decimal, ExactExponent, ExactMatrix};
pub use interval::Interval;

use crate::error::{Error, Result};
use crate::gauge::sign_patterns;

pub const DEFAULT_PRECISION: u32 = 128;
/// Enclosures wider than this are reported as [`Error::PrecisionExhausted`].
pub const MAX_ENCLOSURE_WIDTH: f64 = 1e-4;
/// Fractional digits used when endpoints are rendered as decimal strings.
pub const REPORT_DIGITS: u32 = 30;

/// A certified enclosure `lo ≤ value ≤ hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedValue {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub precision: u32,
    /// The exact value, when it is rational (`p ∈ {1, ∞}`).
    pub exact: Option<BigRational>,
}

impl CertifiedValue {
    fn from_interval(iv: Interval, precision: u32, exact: Option<BigRational>) -> Self {
        Self {
            lo: iv.lo,
            hi: iv.hi,
            precision,
            exact,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    /// Smallest `f64` not below the upper endpoint.
    pub fn upper(&self) -> f64 {
        let hi = self.hi.to_rational();
        let mut f = self.hi.to_f64();
        while BigRational::from_float(f).is_some_and(|r| r < hi) {
            f = f.next_up();
        }
        f
    }

    /// Largest `f64` not above the lower endpoint.
    pub fn lower(&self) -> f64 {
        let lo = self.lo.to_rational();
        let mut f = self.lo.to_f64();
        while BigRational::from_float(f).is_some_and(|r| r > lo) {
            f = f.next_down();
        }
        f
    }

    pub fn width(&self) -> f64 {
        self.hi.sub_exact(&self.lo).to_f64()
    }

    pub fn at_most(&self, threshold: &BigRational) -> bool {
        self.hi.to_rational() <= *threshold
    }
}

fn sum_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(Signed::abs).sum()
}

fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(Signed::abs).max().unwrap_or_default()
}

/// `ℓ_p` norm of an integer vector: exact for `p ∈ {1, ∞}`, enclosed otherwise.
fn norm_enclosure(v: &[BigInt], p: &ExactExponent, prec: u32) -> (Interval, Option<BigRational>) {
    match p {
        ExactExponent::Infinity => {
            let m = max_abs(v);
            (
                Interval::from_int(m.clone()),
                Some(BigRational::from_integer(m)),
            )
        }
        ExactExponent::Finite(e) if *e == BigRational::from_integer(1.into()) => {
            let s = sum_abs(v);
            (
                Interval::from_int(s.clone()),
                Some(BigRational::from_integer(s)),
            )
        }
        ExactExponent::Finite(e) => {
            let wp = prec + 16;
            let e_iv = Interval::from_rational(e, wp);
            let inv_iv = Interval::from_rational(&e.recip(), wp);
            let sum = exact::abs_all(v)
                .into_iter()
                .map(|a| Interval::from_int(a).pow(&e_iv, wp))
                .fold(Interval::zero(), |acc, t| acc.add(&t, wp));
            (sum.pow(&inv_iv, wp), None)
        }
    }
}

/// Certified enclosure of `g_p(A)`; the upper endpoint is the bound `U`.
pub fn certified_objective(
    a: &ExactMatrix,
    p: &ExactExponent,
    precision: u32,
) -> Result<CertifiedValue> {
    if precision < 8 {
        return Err(Error::OutOfRange(format!(
            "precision must be at least 8 bits, got {precision}"
        )));
    }
    let n = a.n;
    if n == 0 || a.entries.len() != n * n {
        return Err(Error::InvalidMatrix(
            "entry count does not match dimension".into(),
        ));
    }
    let m = a.integer_scaled();
    let (det, cofactor_columns) = exact_cofactors(n, &m);
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let q = p.conjugate();
    let columns: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| m[i * n + j].clone()).collect())
        .collect();
    let vertices: Vec<Vec<BigInt>> = sign_patterns(n)
        .map(|pat| {
            (0..n)
                .map(|k| {
                    columns
                        .iter()
                        .zip(&pat.signs)
                        .map(|(x, &s)| if s > 0 { x[k].clone() } else { -&x[k] })
                        .sum()
                })
                .collect()
        })
        .collect();

    let wp = precision + 8;
    let fold_max = |items: Vec<(Interval, Option<BigRational>)>| {
        let exact = items
            .iter()
            .map(|(_, e)| e.clone())
            .collect::<Option<Vec<_>>>()
            .and_then(|v| v.into_iter().max());
        let iv = items
            .into_iter()
            .map(|(iv, _)| iv)
            .reduce(|a, b| a.max(&b))
            .expect("n >= 1");
        (iv, exact)
    };
    let (y_max, y_exact) = fold_max(
        cofactor_columns
            .iter()
            .map(|y| norm_enclosure(y, &q, wp))
            .collect(),
    );
    let (v_max, v_exact) = fold_max(vertices.iter().map(|v| norm_enclosure(v, p, wp)).collect());
    let abs_det = det.abs();

    if let (Some(ye), Some(ve)) = (y_exact, v_exact) {
        let exact = ye * ve / BigRational::from_integer(abs_det);
        let iv = Interval::from_rational(&exact, precision);
        return Ok(CertifiedValue::from_interval(iv, precision, Some(exact)));
    }
    let g = y_max.mul(&v_max, wp).div(&Interval::from_int(abs_det), wp);
    let g = Interval::new(
        g.lo.round(precision, Round::Down),
        g.hi.round(precision, Round::Up),
    );
    let width = g.width().to_f64();
    if width > MAX_ENCLOSURE_WIDTH {
        return Err(Error::PrecisionExhausted {
            width,
            bits: precision,
        });
    }
    Ok(CertifiedValue::from_interval(g, precision, None))
}

/// The guaranteed upper bound `U ≥ g_p(A)` as an `f64` rounded upward.
pub fn certified_objective_upper(
    a: &ExactMatrix,
    p: &ExactExponent,
    precision: u32,
) -> Result<f64> {
    certified_objective(a, p, precision).map(|c| c.upper())
}

/// Enclosure of `base^e` for a positive integer base and rational `e`.
pub fn power_enclosure(base: u32, e: &BigRational, precision: u32) -> Interval {
    assert!(base > 0, "base must be positive");
    if e.is_zero() {
        return Interval::one();
    }
    let wp = precision + 16;
    let b = Interval::from_int(base);
    let ln_b = b.ln(wp);
    let arg = ln_b.mul(&Interval::from_rational(e, wp), wp);
    let v = arg.exp(wp);
    Interval::new(
        v.lo.round(precision, Round::Down),
        v.hi.round(precision, Round::Up),
    )
}

/// One checked inequality of the certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub name: String,
    pub claim: String,
    /// Decimal lower endpoint, rounded down.
    pub lower: String,
    /// Decimal upper endpoint, rounded up; `pass` is decided on this string.
    pub upper: String,
    pub threshold: String,
    /// `upper < threshold` when set, else `upper ≤ threshold`.
    pub strict: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Link {
    fn from_enclosure(
        name: &str,
        claim: String,
        iv: &Interval,
        threshold: &str,
        strict: bool,
    ) -> Self {
        let mut link = Self {
            name: name.to_string(),
            claim,
            lower: iv.lo.to_decimal(REPORT_DIGITS, Round::Down),
            upper: iv.hi.to_decimal(REPORT_DIGITS, Round::Up),
            threshold: threshold.to_string(),
            strict,
            pass: false,
            note: None,
        };
        link.pass = link.recheck();
        link
    }

    fn failed(name: &str, claim: String, threshold: &str, strict: bool, note: String) -> Self {
        Self {
            name: name.to_string(),
            claim,
            lower: String::new(),
            upper: String::new(),
            threshold: threshold.to_string(),
            strict,
            pass: false,
            note: Some(note),
        }
    }

    /// Re-decides the inequality from the stored decimal strings alone.
    pub fn recheck(&self) -> bool {
        let (Ok(u), Ok(t)) = (parse_decimal(&self.upper), parse_decimal(&self.threshold)) else {
            return false;
        };
        if self.strict {
            u < t
        } else {
            u <= t
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub precision: u32,
    pub links: Vec<Link>,
    pub all_pass: bool,
}

impl CertificationReport {
    /// True when every link still passes when re-decided from its strings.
    pub fn recheck(&self) -> bool {
        self.links.iter().all(Link::recheck) == self.all_pass
            && self.links.iter().all(|l| l.pass == l.recheck())
    }
}

pub fn witness_a1() -> ExactMatrix {
    ExactMatrix::from_integers([[13, -24, 24], [-24, 13, 24], [24, 24, 13]])
}

pub fn witness_a2() -> ExactMatrix {
    ExactMatrix::from_integers([[9, -17, 17], [-17, 9, 17], [17, 17, 9]])
}

/// Certifies `d(p) ≤ 9/5` on `[1.7, 2]` at 128 bits with the two integer
/// witnesses.
pub fn certify_paper_theorem() -> CertificationReport {
    certify_theorem_with(&witness_a1(), &witness_a2(), DEFAULT_PRECISION)
}

/// The certificate for `[1.7, 2]` with caller-supplied witnesses at
/// `p = 1.7` and `p = 1.8`.
///
/// Links: the two witness bounds, the three multiplicative hops
/// `3^{|1/p₀ − 1/p₁|}`, and the three chained products against `9/5`.
pub fn certify_theorem_with(
    a1: &ExactMatrix,
    a2: &ExactMatrix,
    precision: u32,
) -> CertificationReport {
    let dec = |s: &str| parse_decimal(s).expect("literal");
    let nine_fifths = "1.8";
    let mut links = Vec::new();

    let mut witness = |name: &str, a: &ExactMatrix, p: &str, threshold: &str| -> Option<Interval> {
        let claim = format!("g_{p}(A) <= {threshold}");
        let pe: ExactExponent = p.parse().expect("literal exponent");
        match certified_objective(a, &pe, precision) {
            Ok(c) => {
                let iv = c.interval();
                links.push(Link::from_enclosure(name, claim, &iv, threshold, false));
                Some(iv)
            }
            Err(e) => {
                links.push(Link::failed(name, claim, threshold, false, e.to_string()));
                None
            }
        }
    };
    let w1 = witness("witness-1.7", a1, "1.7", "1.6967");
    let w2 = witness("witness-1.8", a2, "1.8", "1.7033");

    let hops = [
        ("hop-1.7-1.8", "1.7", "1.8", "1.0366"),
        ("hop-1.8-1.9", "1.8", "1.9", "1.0327"),
        ("hop-1.9-2", "1.9", "2", "1.0294"),
    ];
    let mut hop_ivs = Vec::new();
    for (name, from, to, threshold) in hops {
        let e = (dec(from).recip() - dec(to).recip()).abs();
        let iv = power_enclosure(3, &e, precision);
        links.push(Link::from_enclosure(
            name,
            format!("3^(1/{from} - 1/{to}) <= {threshold}"),
            &iv,
            threshold,
            false,
        ));
        hop_ivs.push(iv);
    }

    let sqrt3 = power_enclosure(3, &dec("0.5"), precision);
    let anchors = [
        ("chain-1.7-1.8", "g_1.7(A1)", w1),
        ("chain-1.8-1.9", "g_1.8(A2)", w2),
        ("chain-1.9-2", "3^(1/2)", Some(sqrt3)),
    ];
    for ((name, what, anchor), hop) in anchors.into_iter().zip(&hop_ivs) {
        let claim = format!("{what} * hop < {nine_fifths}");
        match anchor {
            Some(a) => {
                let prod = a.mul(hop, precision);
                links.push(Link::from_enclosure(name, claim, &prod, nine_fifths, true));
            }
            None => links.push(Link::failed(
                name,
                claim,
                nine_fifths,
                true,
                "anchor was not certified".into(),
            )),
        }
    }

    let all_pass = links.iter().all(|l| l.pass);
    CertificationReport {
        precision,
        links,
        all_pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_p2_is_sqrt3() {
        let c = certified_objective(&ExactMatrix::identity(3), &"2".parse().unwrap(), 128).unwrap();
        let s3 = 3f64.sqrt();
        assert!(c.lower() <= s3 + 1e-16 && c.upper() >= s3 - 1e-16);
        assert!(c.upper() <= s3 + 1e-10);
        assert!(c.width() < 1e-30);
    }

    #[test]
    fn witnesses_certify() {
        let u1 = certified_objective_upper(&witness_a1(), &"1.7".parse().unwrap(), 128).unwrap();
        assert!(u1 <= 1.6967, "{u1}");
        let u2 = certified_objective_upper(&witness_a2(), &"1.8".parse().unwrap(), 128).unwrap();
        assert!(u2 <= 1.7033, "{u2}");
    }

    #[test]
    fn p_one_is_exact_rational() {
        let c = certified_objective(&witness_a1(), &ExactExponent::one(), 128).unwrap();
        // largest vertex ℓ_1 norm is 105; largest cofactor ℓ_∞ norm is 888
        let exact = c.exact.clone().unwrap();
        assert!(c.interval().contains_rational(&exact));
        assert_eq!(exact, BigRational::new((105 * 888).into(), 47915.into()));
        let inf = certified_objective(&witness_a1(), &ExactExponent::Infinity, 128).unwrap();
        assert!(inf.exact.is_some());
    }

    #[test]
    fn singular_is_reported() {
        let z = ExactMatrix::from_integers([[1, 2], [2, 4]]);
        assert_eq!(
            certified_objective(&z, &"1.5".parse().unwrap(), 64),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn report_passes_and_rechecks() {
        let rep = certify_paper_theorem();
        assert!(rep.all_pass, "{rep:#?}");
        assert_eq!(rep.links.len(), 8);
        assert!(rep.recheck());
    }

    #[test]
    fn identity_as_second_witness_fails() {
        let rep = certify_theorem_with(&witness_a1(), &ExactMatrix::identity(3), 128);
        assert!(!rep.all_pass);
        let by_name = |n: &str| rep.links.iter().find(|l| l.name == n).unwrap().pass;
        assert!(!by_name("witness-1.8"));
        assert!(!by_name("chain-1.8-1.9"));
        assert!(by_name("witness-1.7") && by_name("hop-1.8-1.9"));
    }

    #[test]
    fn tampered_report_fails_recheck() {
        let mut rep = certify_paper_theorem();
        rep.links[0].upper = "1.7".into();
        assert!(!rep.recheck());
    }
}
