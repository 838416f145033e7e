use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A multilinear monomial: a set of row variables times a set of column
/// variables. Both index lists are sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.rows.len() + self.cols.len()
    }

    fn canonical(mut self) -> Self {
        self.rows.sort_unstable();
        self.rows.dedup();
        self.cols.sort_unstable();
        self.cols.dedup();
        self
    }
}

/// Canonical multilinear polynomial over F2 in separated row and column
/// variables. The constant term is kept apart from `monomials`, which never
/// contains the empty monomial or a duplicate and is sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseF2Polynomial {
    monomials: Vec<Monomial>,
    constant: bool,
}

impl SparseF2Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        SparseF2Polynomial {
            monomials: Vec::new(),
            constant: true,
        }
    }

    /// Canonicalizes: `x² = x` inside each monomial, equal monomials cancel in
    /// pairs, and an empty monomial toggles the constant.
    pub fn from_monomials(monomials: Vec<Monomial>, constant: bool) -> Self {
        let mut set: HashSet<Monomial> = HashSet::new();
        let mut constant = constant;
        for m in monomials {
            let m = m.canonical();
            if m.degree() == 0 {
                constant = !constant;
            } else if !set.remove(&m) {
                set.insert(m);
            }
        }
        let mut monomials: Vec<Monomial> = set.into_iter().collect();
        monomials.sort_unstable();
        SparseF2Polynomial {
            monomials,
            constant,
        }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    /// Number of terms, counting a nonzero constant as one.
    pub fn num_terms(&self) -> usize {
        self.monomials.len() + self.constant as usize
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty() && !self.constant
    }

    pub fn max_degree(&self) -> usize {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn evaluate(&self, row: impl Fn(u32) -> bool, col: impl Fn(u32) -> bool) -> bool {
        self.monomials.iter().fold(self.constant, |acc, m| {
            acc ^ (m.rows.iter().all(|&v| row(v)) && m.cols.iter().all(|&v| col(v)))
        })
    }

    pub fn xor(&self, other: &SparseF2Polynomial) -> SparseF2Polynomial {
        let all = self.monomials.iter().chain(&other.monomials).cloned().collect();
        Self::from_monomials(all, self.constant ^ other.constant)
    }

    pub fn mul(&self, other: &SparseF2Polynomial) -> SparseF2Polynomial {
        let a = self.terms();
        let b = other.terms();
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in &a {
            for y in &b {
                let mut rows = x.rows.clone();
                rows.extend_from_slice(&y.rows);
                let mut cols = x.cols.clone();
                cols.extend_from_slice(&y.cols);
                out.push(Monomial { rows, cols });
            }
        }
        Self::from_monomials(out, false)
    }

    fn terms(&self) -> Vec<Monomial> {
        let mut t = self.monomials.clone();
        if self.constant {
            t.push(Monomial {
                rows: Vec::new(),
                cols: Vec::new(),
            });
        }
        t
    }

    /// Text form: `# header` then one `R{..};C{..}` line per term. The
    /// constant term is written as `R{};C{}` first.
    pub fn to_text(&self, header: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {header}");
        let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        if self.constant {
            s.push_str("R{};C{}\n");
        }
        for m in &self.monomials {
            let _ = writeln!(s, "R{{{}}};C{{{}}}", list(&m.rows), list(&m.cols));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut monomials = Vec::new();
        let mut constant = false;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            let (r, c) = line.split_once(';').ok_or_else(|| bad("missing `;`"))?;
            let set = |part: &str, tag: char| -> Result<Vec<u32>> {
                let inner = part
                    .strip_prefix(tag)
                    .and_then(|p| p.strip_prefix('{'))
                    .and_then(|p| p.strip_suffix('}'))
                    .ok_or_else(|| bad("expected X{...}"))?;
                if inner.is_empty() {
                    return Ok(Vec::new());
                }
                inner
                    .split(',')
                    .map(|x| x.trim().parse::<u32>().map_err(|_| bad("bad variable index")))
                    .collect()
            };
            let m = Monomial {
                rows: set(r, 'R')?,
                cols: set(c, 'C')?,
            };
            if m.degree() == 0 {
                constant = !constant;
            } else {
                monomials.push(m);
            }
        }
        Ok(Self::from_monomials(monomials, constant))
    }
}

/// Accumulator used while expanding: monomials over a single id space where
/// row variable `v` is `2v` and column variable `v` is `2v+1`. The empty
/// vector is the constant monomial.
#[derive(Clone, Debug, Default)]
pub(crate) struct Expander {
    pub(crate) terms: HashSet<Vec<u32>>,
}

impl Expander {
    pub(crate) fn one() -> Self {
        let mut terms = HashSet::new();
        terms.insert(Vec::new());
        Expander { terms }
    }

    pub(crate) fn toggle(&mut self, m: Vec<u32>) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub(crate) fn xor_in(&mut self, other: &Expander) {
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }

    pub(crate) fn mul(&self, other: &Expander) -> Expander {
        let mut out = Expander::default();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(union_sorted(a, b));
            }
        }
        out
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn finish(self) -> SparseF2Polynomial {
        let mut constant = false;
        let mut monomials = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            if t.is_empty() {
                constant = true;
                continue;
            }
            let mut m = Monomial {
                rows: Vec::new(),
                cols: Vec::new(),
            };
            for id in t {
                if id & 1 == 0 {
                    m.rows.push(id >> 1);
                } else {
                    m.cols.push(id >> 1);
                }
            }
            monomials.push(m);
        }
        monomials.sort_unstable();
        SparseF2Polynomial {
            monomials,
            constant,
        }
    }
}

fn union_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
