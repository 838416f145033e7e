//! Uniqueness perturbation, difference matrices and rank replacement.
//!
//! For an `r×d` matrix `A` and a `d×c` matrix `B` the pipeline produces
//! `A''` (`r×d²`) and `B''` (`d²×c`) with entries in `1..=r+c` such that
//! `A''[i,(k,k')] ≤ B''[(k,k'),j]` exactly when candidate `k` is at least as
//! good as `k'` for the output cell `(i,j)`. Slots `(k,k')` are numbered
//! `k·d + k'` with 0-based `k, k'`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minplus::{Weight, WeightMatrix, MAX_INPUT};

/// `A` and `B` after the `∞` surrogate and the `·scale + k` perturbation.
#[derive(Clone, Debug)]
pub struct PerturbedPair {
    /// `Ap[i,k] = Â[i,k]·scale + (k+1)`, all finite.
    pub ap: WeightMatrix,
    /// `Bp[k,j] = B̂[k,j]·scale`, all finite.
    pub bp: WeightMatrix,
    pub scale: u64,
    /// Value substituted for `∞` before scaling.
    pub surrogate: u64,
    a_inf: Vec<bool>,
    b_inf: Vec<bool>,
}

impl PerturbedPair {
    pub fn rows(&self) -> usize {
        self.ap.rows()
    }

    pub fn inner(&self) -> usize {
        self.ap.cols()
    }

    pub fn cols(&self) -> usize {
        self.bp.cols()
    }

    #[inline]
    fn sum(&self, i: usize, k: usize, j: usize) -> u64 {
        // both operands < 2^60
        self.ap.get(i, k).value().unwrap() + self.bp.get(k, j).value().unwrap()
    }

    /// The unique minimizer of `Ap[i,k] + Bp[k,j]` (0-based), by direct scan.
    pub fn argmin(&self, i: usize, j: usize) -> usize {
        (0..self.inner())
            .min_by_key(|&k| self.sum(i, k, j))
            .expect("inner dimension is positive")
    }

    /// Whether the term `A[i,k] + B[k,j]` involves an `∞` entry.
    pub fn uses_surrogate(&self, i: usize, k: usize, j: usize) -> bool {
        self.a_inf[i * self.inner() + k] || self.b_inf[k * self.cols() + j]
    }

    /// The original sum `A[i,k] + B[k,j]` recovered from perturbed values.
    pub fn original_value(&self, i: usize, k: usize, j: usize) -> Weight {
        if self.uses_surrogate(i, k, j) {
            Weight::INF
        } else {
            Weight::finite(self.sum(i, k, j) / self.scale)
        }
    }
}

/// Applies the `∞` surrogate `2·max+1` and the perturbation. The scale is
/// `max(r, c, d) + 1`, which is `n+1` for square inputs.
pub fn perturb(a: &WeightMatrix, b: &WeightMatrix) -> Result<PerturbedPair> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (r, d, c) = (a.rows(), a.cols(), b.cols());
    if d == 0 {
        return Err(Error::Dimension("empty inner dimension".into()));
    }
    let scale = r.max(c).max(d) as u64 + 1;
    let max = a.max_finite().unwrap_or(0).max(b.max_finite().unwrap_or(0));
    let surrogate = 2 * max + 1;
    let top = (surrogate as u128) * (scale as u128) + d as u128;
    if top > MAX_INPUT as u128 {
        return Err(Error::Overflow(format!(
            "perturbed entries reach {top}, above 2^60"
        )));
    }
    let lift = |w: Weight| w.value().unwrap_or(surrogate);
    let mut ap = WeightMatrix::infinite(r, d);
    let mut a_inf = vec![false; r * d];
    for i in 0..r {
        for k in 0..d {
            let w = a.get(i, k);
            a_inf[i * d + k] = w.is_inf();
            ap.set(i, k, Weight::finite(lift(w) * scale + k as u64 + 1));
        }
    }
    let mut bp = WeightMatrix::infinite(d, c);
    let mut b_inf = vec![false; d * c];
    for k in 0..d {
        for j in 0..c {
            let w = b.get(k, j);
            b_inf[k * c + j] = w.is_inf();
            bp.set(k, j, Weight::finite(lift(w) * scale));
        }
    }
    Ok(PerturbedPair {
        ap,
        bp,
        scale,
        surrogate,
        a_inf,
        b_inf,
    })
}

/// Signed difference matrices `A'` (`r×d²`) and `B'` (`d²×c`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceMatrices {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
    /// Row-major `rows × d²`.
    pub apr: Vec<i64>,
    /// Row-major `d² × cols`.
    pub bpr: Vec<i64>,
}

impl DifferenceMatrices {
    pub fn slots(&self) -> usize {
        self.d * self.d
    }

    pub fn a(&self, i: usize, slot: usize) -> i64 {
        self.apr[i * self.slots() + slot]
    }

    pub fn b(&self, slot: usize, j: usize) -> i64 {
        self.bpr[slot * self.cols + j]
    }
}

/// `A'[i,(k,k')] = Ap[i,k] − Ap[i,k']`, `B'[(k,k'),j] = Bp[k',j] − Bp[k,j]`.
pub fn difference_matrices(p: &PerturbedPair) -> DifferenceMatrices {
    let (r, d, c) = (p.rows(), p.inner(), p.cols());
    let av = |i: usize, k: usize| p.ap.get(i, k).value().unwrap() as i64;
    let bv = |k: usize, j: usize| p.bp.get(k, j).value().unwrap() as i64;
    let mut apr = Vec::with_capacity(r * d * d);
    for i in 0..r {
        for k in 0..d {
            for kp in 0..d {
                apr.push(av(i, k) - av(i, kp));
            }
        }
    }
    let mut bpr = Vec::with_capacity(d * d * c);
    for k in 0..d {
        for kp in 0..d {
            for j in 0..c {
                bpr.push(bv(kp, j) - bv(k, j));
            }
        }
    }
    DifferenceMatrices {
        rows: r,
        cols: c,
        d,
        apr,
        bpr,
    }
}

/// Rank matrices `A''`, `B''` with entries in `1..=rows+cols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedPairMatrices {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
    /// Row-major `rows × d²`.
    pub app: Vec<u32>,
    /// Row-major `d² × cols`.
    pub bpp: Vec<u32>,
}

impl RankedPairMatrices {
    pub fn slots(&self) -> usize {
        self.d * self.d
    }

    /// Largest possible rank.
    pub fn max_rank(&self) -> usize {
        self.rows + self.cols
    }

    /// Bits needed to store `rank − 1`.
    pub fn rank_bits(&self) -> usize {
        ceil_log2(self.max_rank()).max(1)
    }

    #[inline]
    pub fn a(&self, i: usize, slot: usize) -> u32 {
        self.app[i * self.slots() + slot]
    }

    #[inline]
    pub fn b(&self, slot: usize, j: usize) -> u32 {
        self.bpp[slot * self.cols + j]
    }

    /// The unique `k` (0-based) with `A''[i,(k,k')] ≤ B''[(k,k'),j]` for all
    /// `k'`, found by brute force. `None` only if the input was malformed.
    pub fn dominating(&self, i: usize, j: usize) -> Option<usize> {
        let d = self.d;
        (0..d).find(|&k| (0..d).all(|kp| self.a(i, k * d + kp) <= self.b(k * d + kp, j)))
    }
}

/// Per-slot ranking. Ties go to `A` entries first, then to the smaller index.
pub fn rank_replace(diff: &DifferenceMatrices) -> RankedPairMatrices {
    let (r, c, d) = (diff.rows, diff.cols, diff.d);
    let slots = d * d;
    let per_slot: Vec<(Vec<u32>, Vec<u32>)> = (0..slots)
        .into_par_iter()
        .map(|s| {
            // (value, is_b, index)
            let mut keys: Vec<(i64, bool, usize)> = Vec::with_capacity(r + c);
            keys.extend((0..r).map(|i| (diff.a(i, s), false, i)));
            keys.extend((0..c).map(|j| (diff.b(s, j), true, j)));
            keys.sort_unstable();
            let mut ra = vec![0u32; r];
            let mut rb = vec![0u32; c];
            for (pos, &(_, is_b, idx)) in keys.iter().enumerate() {
                let rank = pos as u32 + 1;
                if is_b {
                    rb[idx] = rank;
                } else {
                    ra[idx] = rank;
                }
            }
            (ra, rb)
        })
        .collect();
    let mut app = vec![0u32; r * slots];
    let mut bpp = vec![0u32; slots * c];
    for (s, (ra, rb)) in per_slot.into_iter().enumerate() {
        for (i, v) in ra.into_iter().enumerate() {
            app[i * slots + s] = v;
        }
        bpp[s * c..(s + 1) * c].copy_from_slice(&rb);
    }
    RankedPairMatrices {
        rows: r,
        cols: c,
        d,
        app,
        bpp,
    }
}

/// `perturb`, `difference_matrices` and `rank_replace` in sequence.
pub fn prepare(a: &WeightMatrix, b: &WeightMatrix) -> Result<(PerturbedPair, RankedPairMatrices)> {
    let p = perturb(a, b)?;
    let ranked = rank_replace(&difference_matrices(&p));
    Ok((p, ranked))
}

/// `⌈log2 x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minplus::minplus_product_naive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize, max: u64, p_inf: f64) -> WeightMatrix {
        let e = (0..r * c)
            .map(|_| {
                if rng.gen_bool(p_inf) {
                    Weight::INF
                } else {
                    Weight::finite(rng.gen_range(0..=max))
                }
            })
            .collect();
        WeightMatrix::from_vec(r, c, e).unwrap()
    }

    #[test]
    fn scale_two_formula() {
        let a = WeightMatrix::filled(1, 1, Weight::ZERO);
        let b = WeightMatrix::filled(1, 1, Weight::finite(5));
        let p = perturb(&a, &b).unwrap();
        assert_eq!(p.scale, 2);
        assert_eq!(p.ap.get(0, 0), Weight::finite(1));
        assert_eq!(p.bp.get(0, 0), Weight::finite(10));
    }

    #[test]
    fn ties_go_to_first_candidate() {
        let a = WeightMatrix::filled(2, 2, Weight::finite(1));
        let b = WeightMatrix::filled(2, 2, Weight::finite(1));
        let p = perturb(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(p.argmin(i, j), 0);
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let a = WeightMatrix::filled(2, 2, Weight::finite(MAX_INPUT));
        assert!(matches!(perturb(&a, &a), Err(Error::Overflow(_))));
    }

    #[test]
    fn perturbed_argmin_is_smallest_original_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random(&mut rng, 4, 3, 5, 0.2);
            let b = random(&mut rng, 3, 4, 5, 0.2);
            let p = perturb(&a, &b).unwrap();
            let (c, w) = minplus_product_naive(&a, &b).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let k = p.argmin(i, j);
                    match w.get(i, j) {
                        Some(kw) => {
                            assert_eq!(k, kw);
                            assert_eq!(p.original_value(i, k, j), c.get(i, j));
                            let best = p.sum(i, k, j);
                            assert_eq!(best / p.scale, c.get(i, j).value().unwrap());
                        }
                        None => assert_eq!(p.original_value(i, k, j), Weight::INF),
                    }
                }
            }
        }
    }

    #[test]
    fn difference_examples() {
        let a = WeightMatrix::from_rows(&[vec![Some(1), Some(2)]]).unwrap();
        let b = WeightMatrix::filled(2, 1, Weight::ZERO);
        let p = perturb(&a, &b).unwrap();
        // scale 3: Ap = [4, 8]
        let diff = difference_matrices(&p);
        assert_eq!(diff.a(0, 0), 0);
        assert_eq!(diff.a(0, 3), 0);
        assert_eq!(diff.a(0, 1), -4);
        assert_eq!(diff.a(0, 2), 4);
        assert!(diff.bpr.iter().all(|&x| x == 0));
    }

    #[test]
    fn rank_examples() {
        let one = |x: i64, y: i64| DifferenceMatrices {
            rows: 1,
            cols: 1,
            d: 1,
            apr: vec![x],
            bpr: vec![y],
        };
        let r = rank_replace(&one(5, 5));
        assert_eq!((r.app[0], r.bpp[0]), (1, 2));
        let r = rank_replace(&one(10, 3));
        assert_eq!((r.app[0], r.bpp[0]), (2, 1));
    }

    #[test]
    fn ranks_preserve_comparisons_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=8 {
            for d in 1..=4 {
                let a = random(&mut rng, n, d, 6, 0.15);
                let b = random(&mut rng, d, n, 6, 0.15);
                let p = perturb(&a, &b).unwrap();
                let diff = difference_matrices(&p);
                let ranked = rank_replace(&diff);
                assert!(ranked.app.iter().chain(&ranked.bpp).all(|&v| v >= 1 && v as usize <= 2 * n));
                for s in 0..d * d {
                    let mut seen = vec![false; 2 * n + 1];
                    for i in 0..n {
                        seen[ranked.a(i, s) as usize] = true;
                    }
                    for j in 0..n {
                        seen[ranked.b(s, j) as usize] = true;
                    }
                    assert!(seen[1..].iter().all(|&x| x));
                }
                for i in 0..n {
                    for j in 0..n {
                        let mut dominating = 0;
                        for k in 0..d {
                            let mut all = true;
                            for kp in 0..d {
                                let s = k * d + kp;
                                let by_sum = p.sum(i, k, j) <= p.sum(i, kp, j);
                                assert_eq!(diff.a(i, s) <= diff.b(s, j), by_sum);
                                assert_eq!(ranked.a(i, s) <= ranked.b(s, j), by_sum);
                                all &= by_sum;
                            }
                            if all {
                                dominating += 1;
                                assert_eq!(k, p.argmin(i, j));
                            }
                        }
                        assert_eq!(dominating, 1);
                        assert_eq!(ranked.dominating(i, j), Some(p.argmin(i, j)));
                    }
                }
            }
        }
    }
}
