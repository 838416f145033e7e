//! Bit-packed matrices over F2 and all-pairs evaluation of separable
//! polynomials through one rectangular product.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rs_poly::SparseF2Polynomial;

/// Dense 0/1 matrix, row-major, 64 entries per word. Bits past `cols` in the
/// last word of each row are always zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BitMatrix {
            rows,
            cols,
            wpr,
            data: vec![0; rows * wpr],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.data.iter_mut().for_each(|w| *w = !0);
        m.clear_padding();
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Packs nested rows of booleans.
    pub fn pack(bits: &[Vec<bool>]) -> Result<Self> {
        let cols = bits.first().map_or(0, Vec::len);
        if bits.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self::from_fn(bits.len(), cols, |i, j| bits[i][j]))
    }

    pub fn unpack(&self) -> Vec<Vec<bool>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
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
    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.wpr + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.wpr + j / 64];
        let bit = 1u64 << (j % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.wpr..(i + 1) * self.wpr]
    }

    #[inline]
    pub fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.wpr..(i + 1) * self.wpr]
    }

    fn clear_padding(&mut self) {
        let rem = self.cols % 64;
        if rem == 0 || self.wpr == 0 {
            return;
        }
        let mask = (1u64 << rem) - 1;
        for i in 0..self.rows {
            self.data[i * self.wpr + self.wpr - 1] &= mask;
        }
    }

    /// True when every padding bit is zero.
    pub fn padding_is_clean(&self) -> bool {
        let rem = self.cols % 64;
        if rem == 0 || self.wpr == 0 {
            return true;
        }
        let mask = !((1u64 << rem) - 1);
        (0..self.rows).all(|i| self.data[i * self.wpr + self.wpr - 1] & mask == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise XOR.
    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("xor of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a ^ b).collect();
        Ok(BitMatrix {
            data,
            ..self.clone()
        })
    }

    /// Complements every entry (XOR with the all-ones matrix).
    pub fn complement(&mut self) {
        self.data.iter_mut().for_each(|w| *w = !*w);
        self.clear_padding();
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// `Z = X·Y` over F2.
pub fn f2_multiply(x: &BitMatrix, y: &BitMatrix) -> Result<BitMatrix> {
    f2_multiply_counted(x, y).map(|(z, _)| z)
}

/// `f2_multiply` that also reports the number of 64-bit word XORs, exactly
/// `x.rows · x.cols · ⌈y.cols/64⌉`.
pub fn f2_multiply_counted(x: &BitMatrix, y: &BitMatrix) -> Result<(BitMatrix, u64)> {
    if x.cols != y.rows {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            x.rows, x.cols, y.rows, y.cols
        )));
    }
    let mut z = BitMatrix::zeros(x.rows, y.cols);
    let wpr = z.wpr;
    if wpr > 0 {
        z.data
            .par_chunks_mut(wpr)
            .enumerate()
            .for_each(|(i, out)| {
                for k in 0..x.cols {
                    // all-ones when X[i,k] = 1
                    let mask = 0u64.wrapping_sub(x.get(i, k) as u64);
                    for (o, &yw) in out.iter_mut().zip(y.row_words(k)) {
                        *o ^= yw & mask;
                    }
                }
            });
    }
    let ops = (x.rows * x.cols * wpr) as u64;
    debug_assert!(z.padding_is_clean());
    Ok((z, ops))
}

/// `M1` (`rows × m`) and `M2` (`m × cols`) with `M1[i,q]` the product of the
/// row variables of monomial `q` at row `i` and `M2[q,j]` likewise for columns.
/// Monomials keep the polynomial's canonical order.
pub fn build_evaluation_matrices(
    p: &SparseF2Polynomial,
    row_vars: &BitMatrix,
    col_vars: &BitMatrix,
) -> Result<(BitMatrix, BitMatrix)> {
    let m = p.monomials().len();
    for mono in p.monomials() {
        if let Some(&v) = mono.rows.iter().find(|&&v| v as usize >= row_vars.cols()) {
            return Err(Error::OutOfRange {
                index: v as usize,
                size: row_vars.cols(),
            });
        }
        if let Some(&v) = mono.cols.iter().find(|&&v| v as usize >= col_vars.cols()) {
            return Err(Error::OutOfRange {
                index: v as usize,
                size: col_vars.cols(),
            });
        }
    }
    let m1 = BitMatrix::from_fn(row_vars.rows(), m, |i, q| {
        p.monomials()[q]
            .rows
            .iter()
            .all(|&v| row_vars.get(i, v as usize))
    });
    let m2 = BitMatrix::from_fn(m, col_vars.rows(), |q, j| {
        p.monomials()[q]
            .cols
            .iter()
            .all(|&v| col_vars.get(j, v as usize))
    });
    Ok((m1, m2))
}

/// `p` evaluated at every (row, column) pair: `M1·M2` with the constant folded in.
pub fn evaluate_all_pairs(
    p: &SparseF2Polynomial,
    row_vars: &BitMatrix,
    col_vars: &BitMatrix,
) -> Result<BitMatrix> {
    evaluate_all_pairs_counted(p, row_vars, col_vars).map(|(z, _)| z)
}

pub fn evaluate_all_pairs_counted(
    p: &SparseF2Polynomial,
    row_vars: &BitMatrix,
    col_vars: &BitMatrix,
) -> Result<(BitMatrix, u64)> {
    let (m1, m2) = build_evaluation_matrices(p, row_vars, col_vars)?;
    let (mut z, ops) = f2_multiply_counted(&m1, &m2)?;
    if p.constant() {
        z.complement();
    }
    Ok((z, ops))
}
