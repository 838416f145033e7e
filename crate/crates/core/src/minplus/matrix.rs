use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::minplus::weight::Weight;

/// Row-major rectangular matrix of [`Weight`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Weight>,
}

impl WeightMatrix {
    pub fn filled(rows: usize, cols: usize, value: Weight) -> Self {
        WeightMatrix {
            rows,
            cols,
            entries: vec![value; rows * cols],
        }
    }

    pub fn infinite(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, Weight::INF)
    }

    /// The min-plus identity: `0` on the diagonal, `∞` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::infinite(n, n);
        for i in 0..n {
            m.set(i, i, Weight::ZERO);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Weight>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(WeightMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from signed integers, rejecting negative entries.
    /// `i64::MAX` stands for `∞`.
    pub fn from_signed(rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(values.len());
        for (idx, &v) in values.iter().enumerate() {
            if v < 0 {
                return Err(Error::NegativeWeight {
                    row: idx / cols.max(1),
                    col: idx % cols.max(1),
                    value: v,
                });
            }
            entries.push(if v == i64::MAX {
                Weight::INF
            } else {
                Weight::new(v as u64)?
            });
        }
        Self::from_vec(rows, cols, entries)
    }

    /// Builds a matrix from nested rows; `None` stands for `∞`.
    pub fn from_rows(rows: &[Vec<Option<u64>>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for v in row {
                entries.push(match v {
                    Some(x) => Weight::new(*x)?,
                    None => Weight::INF,
                });
            }
        }
        Self::from_vec(r, c, entries)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, w: Weight) {
        self.entries[i * self.cols + j] = w;
    }

    pub fn row(&self, i: usize) -> &[Weight] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Weight] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::infinite(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Largest finite entry, if any.
    pub fn max_finite(&self) -> Option<u64> {
        self.entries.iter().filter_map(|w| w.value()).max()
    }

    /// Entrywise minimum.
    pub fn entrywise_min(&self, other: &WeightMatrix) -> Result<WeightMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("entrywise min of different shapes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a).min(*b))
            .collect();
        Ok(WeightMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Columns `range` of the matrix (used for block decomposition).
    pub fn column_block(&self, start: usize, width: usize) -> WeightMatrix {
        let mut out = Self::infinite(self.rows, width);
        for i in 0..self.rows {
            for k in 0..width {
                if start + k < self.cols {
                    out.set(i, k, self.get(i, start + k));
                }
            }
        }
        out
    }

    /// Rows `start..start+height`, padding with `∞` past the end.
    pub fn row_block(&self, start: usize, height: usize) -> WeightMatrix {
        let mut out = Self::infinite(height, self.cols);
        for k in 0..height {
            if start + k < self.rows {
                for j in 0..self.cols {
                    out.set(k, j, self.get(start + k, j));
                }
            }
        }
        out
    }

    /// Parses the text format: a `rows cols` header followed by `rows` lines of
    /// whitespace-separated tokens, `INF` for `∞`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: hline + 1,
                msg: "header must be `rows cols`".into(),
            });
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: hline + 1,
                msg: format!("bad dimension {s:?}"),
            })
        };
        let rows = parse_dim(dims[0])?;
        let cols = parse_dim(dims[1])?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {rows} rows"),
            })?;
            let before = entries.len();
            for tok in line.split_whitespace() {
                let w = tok.parse::<Weight>().map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse { line: ln + 1, msg },
                    other => other,
                })?;
                entries.push(w);
            }
            if entries.len() - before != cols {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected {cols} tokens"),
                });
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse {
                line: ln + 1,
                msg: "trailing data".into(),
            });
        }
        Self::from_vec(rows, cols, entries)
    }
}

impl fmt::Display for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let mut first = true;
            for w in self.row(i) {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for WeightMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Per-cell argmin indices of a min-plus product. Indices are 0-based;
/// `None` marks cells whose value is `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Option<usize>>,
}

impl WitnessMatrix {
    pub fn empty(rows: usize, cols: usize) -> Self {
        WitnessMatrix {
            rows,
            cols,
            entries: vec![None; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: Option<usize>) {
        self.entries[i * self.cols + j] = k;
    }
}

/// Next-hop table: `next(s, t)` is the node after `s` on a shortest `s → t` path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessorMatrix {
    n: usize,
    next: Vec<Option<usize>>,
}

impl SuccessorMatrix {
    pub fn empty(n: usize) -> Self {
        SuccessorMatrix {
            n,
            next: vec![None; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn next(&self, s: usize, t: usize) -> Option<usize> {
        self.next[s * self.n + t]
    }

    #[inline]
    pub fn set(&mut self, s: usize, t: usize, v: Option<usize>) {
        self.next[s * self.n + t] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let text = "2 3\n0 INF 4\n1 2 3\n";
        let m = WeightMatrix::parse(text).unwrap();
        assert_eq!(m.get(0, 1), Weight::INF);
        assert_eq!(m.to_string(), text);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(WeightMatrix::parse("2 2\n0 1\n").is_err());
        assert!(WeightMatrix::parse("1 2\n0\n").is_err());
        assert!(WeightMatrix::parse("1 1\n-4\n").is_err());
        assert!(WeightMatrix::parse("1 1\n0\n5 5\n").is_err());
    }
}
