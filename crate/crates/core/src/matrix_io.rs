//! Plain-text matrix files: the dimension `n` on the first line, then `n`
//! rows of `n` decimal literals separated by whitespace or commas.
//! Blank lines and `#` comments are ignored.
//!
//! The literal strings are kept so that the certifier can read the entries
//! exactly instead of going through `f64`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::SquareMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixText {
    pub n: usize,
    /// Row-major decimal literals, exactly as written.
    pub entries: Vec<String>,
}

impl MatrixText {
    pub fn to_matrix(&self) -> Result<SquareMatrix> {
        let values = self
            .entries
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SquareMatrix::new(self.n, values)
    }

    /// Renders a float matrix using shortest round-trip decimal literals.
    pub fn from_matrix(m: &SquareMatrix) -> Self {
        Self {
            n: m.n(),
            entries: m.entries().iter().map(|x| format!("{x:?}")).collect(),
        }
    }
}

impl FromStr for MatrixText {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension line {header:?}")))?;
        if n == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        let mut row_count = 0;
        for line in lines {
            let row: Vec<String> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect();
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {n}",
                    row_count + 1,
                    row.len()
                )));
            }
            for t in &row {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad matrix entry {t:?}")))?;
                if !v.is_finite() {
                    return Err(Error::Parse(format!("non-finite entry {t:?}")));
                }
            }
            entries.extend(row);
            row_count += 1;
        }
        if row_count != n {
            return Err(Error::Parse(format!("expected {n} rows, got {row_count}")));
        }
        Ok(Self { n, entries })
    }
}

impl fmt::Display for MatrixText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.entries.chunks(self.n) {
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_keeps_literals() {
        let t: MatrixText = "# A1\n3\n13 -24 24\n-24, 13, 24\n\n24 24 13.000\n"
            .parse()
            .unwrap();
        assert_eq!(t.n, 3);
        assert_eq!(t.entries[8], "13.000");
        let m = t.to_matrix().unwrap();
        assert_eq!(m.get(1, 0), -24.0);
        let again: MatrixText = t.to_string().parse().unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!("".parse::<MatrixText>().is_err());
        assert!("x\n".parse::<MatrixText>().is_err());
        assert!("2\n1 2\n".parse::<MatrixText>().is_err());
        assert!("2\n1 2 3\n4 5 6\n".parse::<MatrixText>().is_err());
        assert!("2\n1 a\n4 5\n".parse::<MatrixText>().is_err());
        assert!("2\n1 inf\n4 5\n".parse::<MatrixText>().is_err());
        assert!("0\n".parse::<MatrixText>().is_err());
    }

    #[test]
    fn float_matrix_round_trips() {
        let m = SquareMatrix::from_rows([[0.1, -2.5e-7], [3.0, 1.0 / 3.0]]);
        let back = MatrixText::from_matrix(&m).to_matrix().unwrap();
        assert_eq!(back, m);
    }
}
