use bmdist::SquareMatrix;
use sha2::{Digest, Sha256};

/// `v` rounded to ten significant digits, in plain decimal notation.
pub fn sig10(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&magnitude) {
        return format!("{v:.9e}");
    }
    let decimals = (9 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Short digest of a witness; stable across runs for identical entries.
pub fn witness_digest(m: &SquareMatrix) -> String {
    let text = m
        .entries()
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",");
    sha256_hex(format!("{}:{text}", m.n()).as_bytes())[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig10(3f64.sqrt()), "1.732050808");
        assert_eq!(sig10(1.8), "1.800000000");
        assert_eq!(sig10(-47915.0), "-47915.00000");
        assert_eq!(sig10(0.0), "0");
        assert_eq!(sig10(0.9), "0.9000000000");
    }

    #[test]
    fn digest_depends_on_entries() {
        let a = SquareMatrix::identity(3);
        let b = a.scaled(2.0);
        assert_eq!(witness_digest(&a), witness_digest(&a.clone()));
        assert_ne!(witness_digest(&a), witness_digest(&b));
        assert_eq!(witness_digest(&a).len(), 16);
    }
}
