//! Rectangular products reduced to the structured product.
//!
//! With `M` divisible by 5, `s_A = 2^{4M/5}`, `s_B = 2^{M/5}` and
//! `N = C(M, 4M/5)·2^{4M/5}`:
//!
//! * [`Coppersmith::algorithm1`]: `(s_A × N)·(N × s_B)`.
//! * [`Coppersmith::algorithm2`]: `(N × s_B)·(s_B × s_A)`, by the adjoint recursion.
//! * [`Coppersmith::algorithm3`]: `(s_A × s_B)·(s_B × N)`, the transpose of algorithm 2.
//! * [`Coppersmith::tensored_multiply`]: `(N·s_A × s_B²)·(s_B² × s_A·N)`, algorithm 2
//!   over blocks whose products are algorithm 3 calls.
//!
//! The `N` mapped columns of `A` are the trit strings with exactly `4M/5`
//! nonzero trits, in increasing order. Column `q` of `A` is supported on
//! `2^{4M/5}` rows and is filled so that `A'·A` reproduces the input column,
//! where `A'` is the `s_A × 2^M` Vandermonde matrix `[α_j^i]`.

use std::collections::HashMap;

use super::field::{reduce, FieldMatrix, Fp};
use super::structured::{
    a_index, adjoint, b_index, digits, forward, interleave, pow_usize, truncation_bound,
    extraction_degree, Leaf, OpCounts, PointwiseLeaf, ScalarLeaf, View,
};
use super::vandermonde::{lagrange_matrix, point, power_cols, power_rows};
use crate::error::{Error, Result};

/// Precomputed data for one depth `M`.
pub struct Coppersmith<const P: u64> {
    m: usize,
    s_a: usize,
    s_b: usize,
    side: usize,
    mapped: Vec<usize>,
    /// Per mapped column: compact A indices of its support rows, ascending.
    a_slots: Vec<Vec<usize>>,
    /// Per mapped row: compact B indices of its support columns, ascending.
    b_slots: Vec<Vec<usize>>,
    a_key: Vec<usize>,
    b_key: Vec<usize>,
    lag_a: HashMap<usize, Vec<Fp<P>>>,
    lag_b: HashMap<usize, Vec<Fp<P>>>,
    a_prime: FieldMatrix<P>,
    b_prime: FieldMatrix<P>,
    setup_mults: u64,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `x[r] += s·y[r]` over a width.
#[inline]
fn axpy<const P: u64>(dst: &mut [Fp<P>], s: Fp<P>, src: &[Fp<P>]) {
    for (d, &v) in dst.iter_mut().zip(src) {
        *d += s * v;
    }
}

/// Dot product of a coefficient row against strided vectors.
fn lincomb<const P: u64>(coeffs: impl Iterator<Item = Fp<P>>, vecs: impl Iterator<Item = usize>, data: &[Fp<P>], w: usize, out: &mut [Fp<P>]) {
    if w == 1 {
        let acc: u64 = coeffs
            .zip(vecs)
            .map(|(c, off)| reduce::<P>(c.value() * data[off].value()) as u64)
            .sum();
        out[0] = Fp::new(acc);
        return;
    }
    let mut acc = vec![0u64; w];
    for (c, off) in coeffs.zip(vecs) {
        let c = c.value();
        for (a, v) in acc.iter_mut().zip(&data[off..off + w]) {
            *a += reduce::<P>(c * v.value()) as u64;
        }
    }
    for (o, a) in out.iter_mut().zip(acc) {
        *o = Fp::new(a);
    }
}

impl<const P: u64> Coppersmith<P> {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m % 5 != 0 {
            return Err(Error::InvalidParameter(format!("depth {m} must be a positive multiple of 5")));
        }
        if m > 15 {
            return Err(Error::InvalidParameter(format!("depth {m} too large")));
        }
        if P >= 1 << 32 || P <= (1u64 << m) + 1 {
            return Err(Error::InvalidParameter(format!(
                "modulus {P} must lie in (2^{m} + 1, 2^32)"
            )));
        }
        let (m1, m2) = (4 * m / 5, m / 5);
        let side = pow_usize(2, m);
        let mapped: Vec<usize> = (0..pow_usize(3, m))
            .filter(|&k| digits(k, 3, m).iter().filter(|&&t| t != 0).count() == m1)
            .collect();
        debug_assert_eq!(mapped.len(), binomial(m, m1) << m1);

        let mut a_slots = Vec::with_capacity(mapped.len());
        let mut b_slots = Vec::with_capacity(mapped.len());
        let mut a_key = Vec::with_capacity(mapped.len());
        let mut b_key = Vec::with_capacity(mapped.len());
        let mut lag_a = HashMap::new();
        let mut lag_b = HashMap::new();
        let mut setup_mults = 0;
        for &k in &mapped {
            let t = digits(k, 3, m);
            // bit position of level l inside a row or column index
            let nz: usize = (0..m).filter(|&l| t[l] != 0).map(|l| 1 << (m - 1 - l)).sum();
            let z = (side - 1) & !nz;
            let rows = submasks(nz);
            let cols = submasks(z);
            a_slots.push(rows.iter().map(|&i| a_index(i, k, m).expect("support row")).collect());
            b_slots.push(cols.iter().map(|&j| b_index(k, j, m).expect("support column")).collect());
            a_key.push(nz);
            b_key.push(z);
            for (map, key, pts) in [(&mut lag_a, nz, &rows), (&mut lag_b, z, &cols)] {
                map.entry(key).or_insert_with(|| {
                    let xs: Vec<Fp<P>> = pts.iter().map(|&r| point::<P>(r)).collect();
                    let (l, c) = lagrange_matrix(&xs);
                    setup_mults += c;
                    l
                });
            }
        }
        let s_a = pow_usize(2, m1);
        let s_b = pow_usize(2, m2);
        Ok(Coppersmith {
            m,
            s_a,
            s_b,
            side,
            mapped,
            a_slots,
            b_slots,
            a_key,
            b_key,
            lag_a,
            lag_b,
            a_prime: power_rows(s_a, side),
            b_prime: power_cols(side, s_b),
            setup_mults,
        })
    }

    pub fn depth(&self) -> usize {
        self.m
    }

    /// `2^{4M/5}`.
    pub fn s_a(&self) -> usize {
        self.s_a
    }

    /// `2^{M/5}`.
    pub fn s_b(&self) -> usize {
        self.s_b
    }

    /// `C(M, 4M/5)·2^{4M/5}`.
    pub fn n_cols(&self) -> usize {
        self.mapped.len()
    }

    /// Mapped trit strings, in order.
    pub fn mapped(&self) -> &[usize] {
        &self.mapped
    }

    /// Multiplications spent building the Lagrange tables.
    pub fn setup_mults(&self) -> u64 {
        self.setup_mults
    }

    pub fn a_prime(&self) -> &FieldMatrix<P> {
        &self.a_prime
    }

    pub fn b_prime(&self) -> &FieldMatrix<P> {
        &self.b_prime
    }

    fn check(&self, m: &FieldMatrix<P>, rows: usize, cols: usize, what: &str) -> Result<()> {
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::Dimension(format!(
                "{what}: expected {rows}x{cols}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// Structured `A` (compact, `5^M` entries) with `A'·A` equal to `ain` on
    /// the mapped columns and zero elsewhere.
    pub fn decompose_a(&self, ain: &FieldMatrix<P>, counts: &mut OpCounts) -> Result<Vec<Fp<P>>> {
        self.check(ain, self.s_a, self.n_cols(), "A-side input")?;
        let s = self.s_a;
        let n = self.n_cols();
        let mut out = vec![Fp::ZERO; pow_usize(5, self.m)];
        for c in 0..n {
            let l = &self.lag_a[&self.a_key[c]];
            for (j, &slot) in self.a_slots[c].iter().enumerate() {
                let mut v = [Fp::ZERO];
                lincomb(l[j * s..(j + 1) * s].iter().copied(), (0..s).map(|i| i * n + c), ain.data(), 1, &mut v);
                out[slot] = v[0];
            }
        }
        counts.field_mults += (n * s * s) as u64;
        Ok(out)
    }

    /// Structured `B` (compact, `4^M` entries of `w` values) with `B·B'`
    /// equal to `bin` on the mapped rows. `bin` is `N × s_B` elements of width `w`.
    fn decompose_b_flat(&self, bin: &[Fp<P>], w: usize, counts: &mut OpCounts) -> Vec<Fp<P>> {
        let s = self.s_b;
        let mut out = vec![Fp::ZERO; pow_usize(4, self.m) * w];
        for c in 0..self.n_cols() {
            let l = &self.lag_b[&self.b_key[c]];
            for (j, &slot) in self.b_slots[c].iter().enumerate() {
                lincomb(
                    l[j * s..(j + 1) * s].iter().copied(),
                    (0..s).map(|i| (c * s + i) * w),
                    bin,
                    w,
                    &mut out[slot * w..(slot + 1) * w],
                );
            }
        }
        counts.field_mults += (self.n_cols() * s * s * w) as u64;
        out
    }

    pub fn decompose_b(&self, bin: &FieldMatrix<P>, counts: &mut OpCounts) -> Result<Vec<Fp<P>>> {
        self.check(bin, self.n_cols(), self.s_b, "B-side input")?;
        Ok(self.decompose_b_flat(bin.data(), 1, counts))
    }

    /// `ain·bin` for `ain: s_A × N`, `bin: N × s_B`.
    pub fn algorithm1(&self, ain: &FieldMatrix<P>, bin: &FieldMatrix<P>, counts: &mut OpCounts) -> Result<FieldMatrix<P>> {
        let a = self.decompose_a(ain, counts)?;
        let b = self.decompose_b(bin, counts)?;
        let bound = truncation_bound(self.m);
        let z = forward(
            View { n: a.len(), stride: 1, width: 1, data: &a },
            View { n: b.len(), stride: 1, width: 1, data: &b },
            self.m,
            bound,
            &mut ScalarLeaf,
            counts,
        );
        let z = z.coefficient(extraction_degree(self.m));
        let z = super::structured::dense_from_interleaved(&z, self.m);
        let zb = z.mul_naive(&self.b_prime)?;
        counts.field_mults += (self.side * self.side * self.s_b) as u64;
        let out = self.a_prime.mul_naive(&zb)?;
        counts.field_mults += (self.s_a * self.side * self.s_b) as u64;
        Ok(out)
    }

    /// Generic algorithm 2 over element widths: `bin` is `N × s_B` elements of
    /// width `wb`, `cin` is `s_B × s_A` of width `wc`; the leaf multiplies
    /// one of each into width `leaf.out_width()`. Returns `N × s_A` elements.
    pub(crate) fn algorithm2_flat<L: Leaf<P>>(
        &self,
        bin: &[Fp<P>],
        wb: usize,
        cin: &[Fp<P>],
        wc: usize,
        leaf: &mut L,
        counts: &mut OpCounts,
    ) -> Vec<Fp<P>> {
        let (sa, sb, side, n) = (self.s_a, self.s_b, self.side, self.n_cols());
        let b = self.decompose_b_flat(bin, wb, counts);

        // C̃ = B'·C·A', stored with level digit 2·j + i
        let mut t = vec![Fp::ZERO; sb * side * wc];
        for u in 0..sb {
            for col in 0..side {
                lincomb(
                    (0..sa).map(|r| self.a_prime.get(r, col)),
                    (0..sa).map(|r| (u * sa + r) * wc),
                    cin,
                    wc,
                    &mut t[(u * side + col) * wc..(u * side + col + 1) * wc],
                );
            }
        }
        let mut ct = vec![Fp::ZERO; side * side * wc];
        for j in 0..side {
            for i in 0..side {
                let at = interleave(j, i, self.m) * wc;
                lincomb(
                    (0..sb).map(|u| self.b_prime.get(j, u)),
                    (0..sb).map(|u| (u * side + i) * wc),
                    &t,
                    wc,
                    &mut ct[at..at + wc],
                );
            }
        }
        counts.field_mults += ((sb * side * sa + side * side * sb) * wc) as u64;

        let bound = truncation_bound(self.m);
        let y = adjoint(
            View { n: pow_usize(4, self.m), stride: 1, width: wb, data: &b },
            View { n: side * side, stride: 1, width: wc, data: &ct },
            self.m,
            bound,
            leaf,
            counts,
        );
        let wo = y.width;
        let y = y.coefficient(extraction_degree(self.m));

        // X[c, :] = Y[c, R_c] · (A'_c)^{-1}
        let mut x = vec![Fp::ZERO; n * sa * wo];
        for c in 0..n {
            let l = &self.lag_a[&self.a_key[c]];
            let slots = &self.a_slots[c];
            for i in 0..sa {
                let at = (c * sa + i) * wo;
                lincomb(
                    (0..sa).map(|j| l[j * sa + i]),
                    slots.iter().map(|&s| s * wo),
                    &y,
                    wo,
                    &mut x[at..at + wo],
                );
            }
        }
        counts.field_mults += (n * sa * sa * wo) as u64;
        x
    }

    /// `bin·cin` for `bin: N × s_B`, `cin: s_B × s_A`.
    pub fn algorithm2(&self, bin: &FieldMatrix<P>, cin: &FieldMatrix<P>, counts: &mut OpCounts) -> Result<FieldMatrix<P>> {
        self.check(bin, self.n_cols(), self.s_b, "algorithm 2 left")?;
        self.check(cin, self.s_b, self.s_a, "algorithm 2 right")?;
        let x = self.algorithm2_flat(bin.data(), 1, cin.data(), 1, &mut ScalarLeaf, counts);
        FieldMatrix::from_vec(self.n_cols(), self.s_a, x)
    }

    /// `x·y` for `x: s_A × s_B`, `y: s_B × N`, as the transpose of algorithm 2.
    pub fn algorithm3(&self, x: &FieldMatrix<P>, y: &FieldMatrix<P>, counts: &mut OpCounts) -> Result<FieldMatrix<P>> {
        self.check(x, self.s_a, self.s_b, "algorithm 3 left")?;
        self.check(y, self.s_b, self.n_cols(), "algorithm 3 right")?;
        Ok(self.algorithm2(&y.transpose(), &x.transpose(), counts)?.transpose())
    }

    /// [`Self::algorithm3`] on several pairs at once, sharing one pass of the
    /// recursion with one lane per pair.
    pub fn algorithm3_batch(&self, xs: &[FieldMatrix<P>], ys: &[FieldMatrix<P>], counts: &mut OpCounts) -> Result<Vec<FieldMatrix<P>>> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Dimension("batch sizes differ or are empty".into()));
        }
        let (sa, sb, n, w) = (self.s_a, self.s_b, self.n_cols(), xs.len());
        for (x, y) in xs.iter().zip(ys) {
            self.check(x, sa, sb, "algorithm 3 left")?;
            self.check(y, sb, n, "algorithm 3 right")?;
        }
        // algorithm 2 on (yᵀ, xᵀ): yᵀ is N × s_B, xᵀ is s_B × s_A
        let mut bin = vec![Fp::ZERO; n * sb * w];
        let mut cin = vec![Fp::ZERO; sb * sa * w];
        for t in 0..w {
            for c in 0..n {
                for u in 0..sb {
                    bin[(c * sb + u) * w + t] = ys[t].get(u, c);
                }
            }
            for u in 0..sb {
                for r in 0..sa {
                    cin[(u * sa + r) * w + t] = xs[t].get(r, u);
                }
            }
        }
        let out = self.algorithm2_flat(&bin, w, &cin, w, &mut PointwiseLeaf { width: w }, counts);
        Ok((0..w)
            .map(|t| FieldMatrix::from_fn(sa, n, |r, c| out[(c * sa + r) * w + t]))
            .collect())
    }

    /// `p·q` for `p: N·s_A × s_B²` and `q: s_B² × s_A·N`.
    pub fn tensored_multiply(&self, p: &FieldMatrix<P>, q: &FieldMatrix<P>) -> Result<TensoredOutcome<P>> {
        let (sa, sb, n) = (self.s_a, self.s_b, self.n_cols());
        self.check(p, n * sa, sb * sb, "tensored left")?;
        self.check(q, sb * sb, sa * n, "tensored right")?;
        // outer left: N × s_B blocks of s_A × s_B
        let wb = sa * sb;
        let mut bin = vec![Fp::ZERO; n * sb * wb];
        for c in 0..n {
            for u in 0..sb {
                for r in 0..sa {
                    for s in 0..sb {
                        bin[(c * sb + u) * wb + r * sb + s] = p.get(c * sa + r, u * sb + s);
                    }
                }
            }
        }
        // outer right: s_B × s_A blocks of s_B × N
        let wc = sb * n;
        let mut cin = vec![Fp::ZERO; sb * sa * wc];
        for u in 0..sb {
            for r in 0..sa {
                for s in 0..sb {
                    for t in 0..n {
                        cin[(u * sa + r) * wc + s * n + t] = q.get(u * sb + s, r * n + t);
                    }
                }
            }
        }
        let mut leaf = BlockLeaf {
            inner: self,
            lagrange: Vec::new(),
            counts: OpCounts::default(),
            calls: 0,
        };
        let mut outer = OpCounts::default();
        let x = self.algorithm2_flat(&bin, wb, &cin, wc, &mut leaf, &mut outer);
        let wo = sa * n;
        let mut out = FieldMatrix::zeros(n * sa, sa * n);
        for c in 0..n {
            for r in 0..sa {
                let blk = &x[(c * sa + r) * wo..(c * sa + r + 1) * wo];
                for i in 0..sa {
                    for j in 0..n {
                        out.set(c * sa + i, r * n + j, blk[i * n + j]);
                    }
                }
            }
        }
        Ok(TensoredOutcome {
            product: out,
            outer,
            inner: leaf.counts,
            algorithm3_calls: leaf.calls,
        })
    }
}

/// Result of [`Coppersmith::tensored_multiply`].
#[derive(Clone, Debug)]
pub struct TensoredOutcome<const P: u64> {
    pub product: FieldMatrix<P>,
    /// Counts of the outer recursion over blocks.
    pub outer: OpCounts,
    /// Counts summed over every inner algorithm 3 call.
    pub inner: OpCounts,
    pub algorithm3_calls: u64,
}

/// Block leaf: a polynomial of `s_A × s_B` blocks times a polynomial of
/// `s_B × N` blocks. Evaluates both at enough points, multiplies each pair by
/// algorithm 3 and interpolates the coefficients back.
struct BlockLeaf<'a, const P: u64> {
    inner: &'a Coppersmith<P>,
    lagrange: Vec<Option<Vec<Fp<P>>>>,
    counts: OpCounts,
    calls: u64,
}

fn horner<const P: u64>(poly: &[Fp<P>], terms: usize, w: usize, x: Fp<P>) -> Vec<Fp<P>> {
    let mut acc = vec![Fp::ZERO; w];
    for c in (0..terms).rev() {
        for (a, &v) in acc.iter_mut().zip(&poly[c * w..(c + 1) * w]) {
            *a = *a * x + v;
        }
    }
    acc
}

impl<const P: u64> Leaf<P> for BlockLeaf<'_, P> {
    fn mul(&mut self, a: &[Fp<P>], sa: usize, b: &[Fp<P>], sb: usize, out: &mut [Fp<P>]) -> u64 {
        let cs = self.inner;
        let (ra, rb, n) = (cs.s_a, cs.s_b, cs.n_cols());
        let (wa, wb, wo) = (ra * rb, rb * n, ra * n);
        let pts = sa + sb - 1;
        if self.lagrange.len() <= pts {
            self.lagrange.resize(pts + 1, None);
        }
        let l = self.lagrange[pts]
            .get_or_insert_with(|| {
                let xs: Vec<Fp<P>> = (0..pts).map(|t| Fp::new(t as u64)).collect();
                lagrange_matrix(&xs).0
            })
            .clone();
        let bound = out.len() / wo;
        let keep = pts.min(bound);
        let mut us = Vec::with_capacity(pts);
        let mut vs = Vec::with_capacity(pts);
        for t in 0..pts {
            let xi = Fp::new(t as u64);
            us.push(FieldMatrix::from_vec(ra, rb, horner(a, sa, wa, xi)).expect("block shape"));
            vs.push(FieldMatrix::from_vec(rb, n, horner(b, sb, wb, xi)).expect("block shape"));
            self.counts.field_mults += (sa * wa + sb * wb) as u64;
        }
        let values = cs.algorithm3_batch(&us, &vs, &mut self.counts).expect("block shape");
        self.calls += pts as u64;
        for i in 0..keep {
            let dst = &mut out[i * wo..(i + 1) * wo];
            for (t, r) in values.iter().enumerate() {
                axpy(dst, l[t * pts + i], r.data());
            }
        }
        self.counts.field_mults += (keep * pts * wo) as u64;
        0
    }

    fn out_width(&self) -> usize {
        self.inner.s_a * self.inner.n_cols()
    }
}

/// Submasks of `mask`, ascending.
fn submasks(mask: usize) -> Vec<usize> {
    let bits: Vec<usize> = (0..usize::BITS as usize).filter(|&b| mask >> b & 1 == 1).collect();
    (0..1usize << bits.len())
        .map(|t| bits.iter().enumerate().filter(|(i, _)| t >> i & 1 == 1).map(|(_, &b)| 1 << b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coppersmith::field::MERSENNE31;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Cs = Coppersmith<MERSENNE31>;

    #[test]
    fn shapes_at_depth_five() {
        let cs = Cs::new(5).unwrap();
        assert_eq!((cs.s_a(), cs.s_b(), cs.n_cols()), (16, 2, 80));
        assert!(Cs::new(4).is_err());
        assert!(Coppersmith::<65537>::new(20).is_err());
        assert_eq!(submasks(0b101), vec![0, 1, 4, 5]);
    }

    #[test]
    fn decomposition_reproduces_inputs() {
        let cs = Cs::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ain = FieldMatrix::random(&mut rng, 16, 80);
        let mut counts = OpCounts::default();
        let a = cs.decompose_a(&ain, &mut counts).unwrap();
        let a = super::super::structured::StructuredFieldMatrix { m: 5, side: super::super::structured::Side::A, entries: a };
        let ap = cs.a_prime().mul_naive(&a.to_dense()).unwrap();
        for (c, &k) in cs.mapped().iter().enumerate() {
            for i in 0..16 {
                assert_eq!(ap.get(i, k), ain.get(i, c));
            }
        }
        let bin = FieldMatrix::random(&mut rng, 80, 2);
        let b = cs.decompose_b(&bin, &mut counts).unwrap();
        let b = super::super::structured::StructuredFieldMatrix { m: 5, side: super::super::structured::Side::B, entries: b };
        let bb = b.to_dense().mul_naive(cs.b_prime()).unwrap();
        for (c, &k) in cs.mapped().iter().enumerate() {
            for j in 0..2 {
                assert_eq!(bb.get(k, j), bin.get(c, j));
            }
        }
    }

    #[test]
    fn three_algorithms_match_naive() {
        let cs = Cs::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ain = FieldMatrix::random(&mut rng, 16, 80);
        let bin = FieldMatrix::random(&mut rng, 80, 2);
        let mut counts = OpCounts::default();
        assert_eq!(cs.algorithm1(&ain, &bin, &mut counts).unwrap(), ain.mul_naive(&bin).unwrap());
        assert_eq!(counts.leaf_products, 3125);

        let cin = FieldMatrix::random(&mut rng, 2, 16);
        let mut counts = OpCounts::default();
        assert_eq!(cs.algorithm2(&bin, &cin, &mut counts).unwrap(), bin.mul_naive(&cin).unwrap());
        assert_eq!(counts.leaf_products, 3125);

        let x = FieldMatrix::random(&mut rng, 16, 2);
        let y = FieldMatrix::random(&mut rng, 2, 80);
        let mut counts = OpCounts::default();
        assert_eq!(cs.algorithm3(&x, &y, &mut counts).unwrap(), x.mul_naive(&y).unwrap());
    }

    #[test]
    fn batched_algorithm3_matches_single_calls() {
        let cs = Cs::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<_> = (0..3).map(|_| FieldMatrix::random(&mut rng, 16, 2)).collect();
        let ys: Vec<_> = (0..3).map(|_| FieldMatrix::random(&mut rng, 2, 80)).collect();
        let mut counts = OpCounts::default();
        let got = cs.algorithm3_batch(&xs, &ys, &mut counts).unwrap();
        assert_eq!(counts.leaf_products, 3 * 3125);
        for t in 0..3 {
            assert_eq!(got[t], xs[t].mul_naive(&ys[t]).unwrap());
        }
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let cs = Cs::new(5).unwrap();
        let mut counts = OpCounts::default();
        let a = FieldMatrix::zeros(16, 79);
        let b = FieldMatrix::zeros(79, 2);
        assert!(matches!(cs.algorithm1(&a, &b, &mut counts), Err(Error::Dimension(_))));
    }
}
