//! Structured matrices and the recursive five-product multiplication.
//!
//! `A` is `2^M × 3^M` and may be nonzero only where every level's
//! (row bit, column trit) is in [`A_PATTERN`]; `B` is `3^M × 2^M` with
//! [`B_PATTERN`]. Such matrices are stored compactly: entry index is the
//! base-5 (resp. base-4) string of pattern slots, top level first.
//!
//! During the recursion each scalar is a polynomial in `x`. Arrays keep, per
//! entry, `stride` coefficients of `width` field elements each, so the same
//! code runs on scalars and on blocks.

use super::field::{reduce, trunc_mul_into, FieldMatrix, Fp};
use super::identity::{ALPHA, A_PATTERN, BETA, B_PATTERN, GAMMA};
use crate::error::{Error, Result};

/// Multiplication counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Products of two recursion leaves.
    pub leaf_products: u64,
    /// Scalar field multiplications of every kind.
    pub field_mults: u64,
}

impl OpCounts {
    pub fn merge(&mut self, o: OpCounts) {
        self.leaf_products += o.leaf_products;
        self.field_mults += o.field_mults;
    }
}

pub fn pow_usize(b: usize, e: usize) -> usize {
    b.pow(e as u32)
}

/// Digits of `x` in base `b`, `m` of them, most significant first.
pub(crate) fn digits(mut x: usize, b: usize, m: usize) -> Vec<usize> {
    let mut d = vec![0; m];
    for slot in d.iter_mut().rev() {
        *slot = x % b;
        x /= b;
    }
    d
}

fn undigits(d: impl IntoIterator<Item = usize>, b: usize) -> usize {
    d.into_iter().fold(0, |acc, x| acc * b + x)
}

/// Compact index of `A[i][k]`, or `None` off the pattern.
pub fn a_index(i: usize, k: usize, m: usize) -> Option<usize> {
    let ib = digits(i, 2, m);
    let kt = digits(k, 3, m);
    let mut idx = 0;
    for l in 0..m {
        let slot = A_PATTERN.iter().position(|&p| p == (ib[l], kt[l]))?;
        idx = idx * 5 + slot;
    }
    Some(idx)
}

/// Position `(i, k)` of compact A entry `idx`.
pub fn a_position(idx: usize, m: usize) -> (usize, usize) {
    let d = digits(idx, 5, m);
    let i = undigits(d.iter().map(|&s| A_PATTERN[s].0), 2);
    let k = undigits(d.iter().map(|&s| A_PATTERN[s].1), 3);
    (i, k)
}

/// Compact index of `B[k][j]`, or `None` off the pattern.
pub fn b_index(k: usize, j: usize, m: usize) -> Option<usize> {
    let kt = digits(k, 3, m);
    let jb = digits(j, 2, m);
    let mut idx = 0;
    for l in 0..m {
        let slot = B_PATTERN.iter().position(|&p| p == (kt[l], jb[l]))?;
        idx = idx * 4 + slot;
    }
    Some(idx)
}

pub fn b_position(idx: usize, m: usize) -> (usize, usize) {
    let d = digits(idx, 4, m);
    let k = undigits(d.iter().map(|&s| B_PATTERN[s].0), 3);
    let j = undigits(d.iter().map(|&s| B_PATTERN[s].1), 2);
    (k, j)
}

/// Index into a full `2^M × 2^M` array whose level digit is `2·hi + lo`.
pub(crate) fn interleave(hi: usize, lo: usize, m: usize) -> usize {
    (0..m).fold(0, |acc, t| {
        let b = m - 1 - t;
        acc * 4 + 2 * ((hi >> b) & 1) + ((lo >> b) & 1)
    })
}

/// Which side of the product a structured matrix sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Compact structured matrix over `Fp<P>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredFieldMatrix<const P: u64> {
    pub m: usize,
    pub side: Side,
    pub entries: Vec<Fp<P>>,
}

impl<const P: u64> StructuredFieldMatrix<P> {
    pub fn zeros(side: Side, m: usize) -> Self {
        let n = match side {
            Side::A => pow_usize(5, m),
            Side::B => pow_usize(4, m),
        };
        StructuredFieldMatrix {
            m,
            side,
            entries: vec![Fp::ZERO; n],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        let (two, three) = (pow_usize(2, self.m), pow_usize(3, self.m));
        match self.side {
            Side::A => (two, three),
            Side::B => (three, two),
        }
    }

    /// Reads a dense matrix, refusing any nonzero off the pattern.
    pub fn from_dense(d: &FieldMatrix<P>, side: Side, m: usize) -> Result<Self> {
        let mut s = Self::zeros(side, m);
        if (d.rows(), d.cols()) != s.shape() {
            return Err(Error::Dimension(format!(
                "{}x{} is not {:?}",
                d.rows(),
                d.cols(),
                s.shape()
            )));
        }
        for r in 0..d.rows() {
            for c in 0..d.cols() {
                let idx = match side {
                    Side::A => a_index(r, c, m),
                    Side::B => b_index(r, c, m),
                };
                match idx {
                    Some(x) => s.entries[x] = d.get(r, c),
                    None if !d.get(r, c).is_zero() => {
                        return Err(Error::PatternViolation { row: r, col: c })
                    }
                    None => {}
                }
            }
        }
        Ok(s)
    }

    pub fn to_dense(&self) -> FieldMatrix<P> {
        let (r, c) = self.shape();
        let mut d = FieldMatrix::zeros(r, c);
        for (idx, &v) in self.entries.iter().enumerate() {
            let (x, y) = match self.side {
                Side::A => a_position(idx, self.m),
                Side::B => b_position(idx, self.m),
            };
            d.set(x, y, v);
        }
        d
    }
}

/// Borrowed polynomial array.
#[derive(Clone, Copy)]
pub(crate) struct View<'a, const P: u64> {
    pub n: usize,
    pub stride: usize,
    pub width: usize,
    pub data: &'a [Fp<P>],
}

impl<'a, const P: u64> View<'a, P> {
    /// `p`-th of `parts` equal consecutive blocks.
    fn block(&self, p: usize, parts: usize) -> View<'a, P> {
        let n = self.n / parts;
        let len = n * self.stride * self.width;
        View {
            n,
            data: &self.data[p * len..(p + 1) * len],
            ..*self
        }
    }

    #[inline]
    fn elem(&self, e: usize) -> &'a [Fp<P>] {
        let len = self.stride * self.width;
        &self.data[e * len..(e + 1) * len]
    }
}

/// Owned polynomial array.
pub(crate) struct PolyArray<const P: u64> {
    pub n: usize,
    pub stride: usize,
    pub width: usize,
    /// Coefficients at or past `live` are zero in every entry.
    pub live: usize,
    pub data: Vec<Fp<P>>,
}

impl<const P: u64> PolyArray<P> {
    pub fn zeros(n: usize, stride: usize, width: usize) -> Self {
        PolyArray {
            n,
            stride,
            width,
            live: 0,
            data: vec![Fp::ZERO; n * stride * width],
        }
    }

    pub fn view(&self) -> View<'_, P> {
        View {
            n: self.n,
            stride: self.stride,
            width: self.width,
            data: &self.data,
        }
    }

    /// Adds `± x^shift · src` into blocks `p` of `parts`, truncating. Only
    /// the first `src_live` coefficients of `src` are read.
    fn accumulate(&mut self, p: usize, parts: usize, src: View<'_, P>, src_live: usize, shift: usize, negate: bool) {
        let n = self.n / parts;
        let (os, w) = (self.stride, self.width);
        debug_assert_eq!(src.n, n);
        debug_assert_eq!(src.width, w);
        let base = p * n;
        let upto = src_live.min(src.stride).min(os.saturating_sub(shift));
        if upto == 0 {
            return;
        }
        self.live = self.live.max(shift + upto);
        for e in 0..n {
            let s = src.elem(e);
            let o = &mut self.data[(base + e) * os * w..(base + e + 1) * os * w];
            let dst = &mut o[shift * w..(shift + upto) * w];
            let s = &s[..upto * w];
            if negate {
                dst.iter_mut().zip(s).for_each(|(d, &v)| *d -= v);
            } else {
                dst.iter_mut().zip(s).for_each(|(d, &v)| *d += v);
            }
        }
    }

    /// Coefficient `c` of every entry, `width` values each.
    pub fn coefficient(&self, c: usize) -> Vec<Fp<P>> {
        let w = self.width;
        let mut out = Vec::with_capacity(self.n * w);
        for e in 0..self.n {
            let base = (e * self.stride + c) * w;
            if c < self.stride {
                out.extend_from_slice(&self.data[base..base + w]);
            } else {
                out.extend(std::iter::repeat(Fp::ZERO).take(w));
            }
        }
        out
    }
}

/// A linear form over sub-blocks, returned borrowed when it is a single
/// unshifted positive term.
enum Form<'a, const P: u64> {
    Borrowed(View<'a, P>),
    Owned(PolyArray<P>),
}

impl<'a, const P: u64> Form<'a, P> {
    fn view(&self) -> View<'_, P> {
        match self {
            Form::Borrowed(v) => *v,
            Form::Owned(a) => a.view(),
        }
    }
}

fn build_form<'a, const P: u64>(
    src: View<'a, P>,
    parts: usize,
    terms: &[(usize, usize, i64)],
    bound: usize,
) -> Form<'a, P> {
    if let [(p, 0, 1)] = terms {
        return Form::Borrowed(src.block(*p, parts));
    }
    let stride = terms
        .iter()
        .map(|&(_, e, _)| src.stride + e)
        .max()
        .unwrap_or(src.stride)
        .min(bound);
    let mut out = PolyArray::zeros(src.n / parts, stride, src.width);
    for &(p, e, s) in terms {
        out.accumulate(0, 1, src.block(p, parts), src.stride, e, s < 0);
    }
    Form::Owned(out)
}

/// Leaf multiplication: `(a, a_stride, b, b_stride, out)` with `out` holding
/// `bound` coefficients. Returns field multiplications performed.
pub(crate) trait Leaf<const P: u64> {
    fn mul(&mut self, a: &[Fp<P>], sa: usize, b: &[Fp<P>], sb: usize, out: &mut [Fp<P>]) -> u64;
    fn out_width(&self) -> usize;
    /// Independent products performed by one call.
    fn lanes(&self) -> u64 {
        1
    }
}

/// Scalar leaves.
pub(crate) struct ScalarLeaf;

impl<const P: u64> Leaf<P> for ScalarLeaf {
    #[inline]
    fn mul(&mut self, a: &[Fp<P>], sa: usize, b: &[Fp<P>], sb: usize, out: &mut [Fp<P>]) -> u64 {
        let keep = (sa + sb - 1).min(out.len());
        trunc_mul_into(a, b, &mut out[..keep])
    }

    fn out_width(&self) -> usize {
        1
    }
}

/// `w` independent scalar products side by side: lane `t` of the output is
/// lane `t` of `a` times lane `t` of `b`.
pub(crate) struct PointwiseLeaf {
    pub width: usize,
}

impl<const P: u64> Leaf<P> for PointwiseLeaf {
    fn mul(&mut self, a: &[Fp<P>], sa: usize, b: &[Fp<P>], sb: usize, out: &mut [Fp<P>]) -> u64 {
        let w = self.width;
        let keep = (sa + sb - 1).min(out.len() / w);
        let mut acc = vec![0u64; w];
        let mut mults = 0;
        for c in 0..keep {
            acc.iter_mut().for_each(|x| *x = 0);
            let lo = c.saturating_sub(sb - 1);
            for i in lo..=c.min(sa - 1) {
                let (x, y) = (&a[i * w..(i + 1) * w], &b[(c - i) * w..(c - i + 1) * w]);
                for t in 0..w {
                    acc[t] += reduce::<P>(x[t].value() * y[t].value()) as u64;
                }
                mults += w as u64;
            }
            for t in 0..w {
                out[c * w + t] = Fp::new(acc[t]);
            }
        }
        mults
    }

    fn out_width(&self) -> usize {
        self.width
    }

    fn lanes(&self) -> u64 {
        self.width as u64
    }
}

/// `Σ α_l(A) β_l(B)` combined into the four output blocks: returns the
/// `2^L × 2^L` product array (digit `2·i + j`) with `bound` coefficients.
pub(crate) fn forward<const P: u64, L: Leaf<P>>(
    a: View<'_, P>,
    b: View<'_, P>,
    level: usize,
    bound: usize,
    leaf: &mut L,
    counts: &mut OpCounts,
) -> PolyArray<P> {
    let mut out = PolyArray::zeros(b.n, bound, leaf.out_width());
    if level == 0 {
        counts.leaf_products += leaf.lanes();
        counts.field_mults += leaf.mul(a.data, a.stride, b.data, b.stride, &mut out.data);
        out.live = (a.stride + b.stride - 1).min(bound);
        return out;
    }
    let mut scratch = PolyArray::zeros(1, bound, leaf.out_width());
    for l in 0..5 {
        let fa = build_form(a, 5, ALPHA[l], bound);
        let fb = build_form(b, 4, BETA[l], bound);
        let m = if level == 1 {
            let (fa, fb) = (fa.view(), fb.view());
            counts.leaf_products += leaf.lanes();
            scratch.data.iter_mut().for_each(|v| *v = Fp::ZERO);
            counts.field_mults += leaf.mul(fa.data, fa.stride, fb.data, fb.stride, &mut scratch.data);
            scratch.live = (fa.stride + fb.stride - 1).min(bound);
            None
        } else {
            Some(forward(fa.view(), fb.view(), level - 1, bound, leaf, counts))
        };
        let (mv, live) = m.as_ref().map_or((scratch.view(), scratch.live), |x| (x.view(), x.live));
        // the coefficient of c_{ji} in γ_l feeds output block (i, j)
        for &(c, e, s) in GAMMA[l] {
            let (j, i) = (c >> 1, c & 1);
            out.accumulate(2 * i + j, 4, mv, live, e, s < 0);
        }
    }
    out
}

/// Adjoint with respect to `A`: for `tr(A·B·C)` returns the `A`-pattern array
/// of partial derivatives, i.e. `(B·C)ᵀ` on the pattern, with `bound`
/// coefficients. `c` is full with level digit `2·j + i`.
pub(crate) fn adjoint<const P: u64, L: Leaf<P>>(
    b: View<'_, P>,
    c: View<'_, P>,
    level: usize,
    bound: usize,
    leaf: &mut L,
    counts: &mut OpCounts,
) -> PolyArray<P> {
    let n = pow_usize(5, level);
    let mut out = PolyArray::zeros(n, bound, leaf.out_width());
    if level == 0 {
        counts.leaf_products += leaf.lanes();
        counts.field_mults += leaf.mul(b.data, b.stride, c.data, c.stride, &mut out.data);
        out.live = (b.stride + c.stride - 1).min(bound);
        return out;
    }
    let mut scratch = PolyArray::zeros(1, bound, leaf.out_width());
    for l in 0..5 {
        let fb = build_form(b, 4, BETA[l], bound);
        let fc = build_form(c, 4, GAMMA[l], bound);
        let y = if level == 1 {
            let (fb, fc) = (fb.view(), fc.view());
            counts.leaf_products += leaf.lanes();
            scratch.data.iter_mut().for_each(|v| *v = Fp::ZERO);
            counts.field_mults += leaf.mul(fb.data, fb.stride, fc.data, fc.stride, &mut scratch.data);
            scratch.live = (fb.stride + fc.stride - 1).min(bound);
            None
        } else {
            Some(adjoint(fb.view(), fc.view(), level - 1, bound, leaf, counts))
        };
        let (yv, live) = y.as_ref().map_or((scratch.view(), scratch.live), |x| (x.view(), x.live));
        for &(a, e, s) in ALPHA[l] {
            out.accumulate(a, 5, yv, live, e, s < 0);
        }
    }
    out
}

/// Truncation bound used for depth `m`: `3m + 1` coefficients.
pub fn truncation_bound(m: usize) -> usize {
    3 * m + 1
}

/// Degree of `x` holding the product after `m` levels.
pub fn extraction_degree(m: usize) -> usize {
    2 * m
}

/// `A·B` for structured operands, as a dense `2^M × 2^M` matrix.
pub fn structured_multiply<const P: u64>(
    a: &StructuredFieldMatrix<P>,
    b: &StructuredFieldMatrix<P>,
    counts: &mut OpCounts,
) -> Result<FieldMatrix<P>> {
    if a.side != Side::A || b.side != Side::B || a.m != b.m {
        return Err(Error::Dimension("expected an A-side and a B-side of equal depth".into()));
    }
    let m = a.m;
    let av = View {
        n: a.entries.len(),
        stride: 1,
        width: 1,
        data: &a.entries,
    };
    let bv = View {
        n: b.entries.len(),
        stride: 1,
        width: 1,
        data: &b.entries,
    };
    let bound = truncation_bound(m);
    let z = forward(av, bv, m, bound, &mut ScalarLeaf, counts);
    Ok(dense_from_interleaved(&z.coefficient(extraction_degree(m)), m))
}

/// `2^M × 2^M` matrix from an interleaved array with level digit `2·row + col`.
pub(crate) fn dense_from_interleaved<const P: u64>(v: &[Fp<P>], m: usize) -> FieldMatrix<P> {
    let n = pow_usize(2, m);
    FieldMatrix::from_fn(n, n, |i, j| v[interleave(i, j, m)])
}
