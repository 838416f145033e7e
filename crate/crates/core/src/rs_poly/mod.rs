//! Randomized F2 polynomials for the "which candidate wins" bits.
//!
//! A rank value `v ∈ 1..=2^t` is stored as the `t`-bit string of `v − 1`,
//! most significant bit first. The exact comparator is an XOR of `t + 1`
//! ANDs:
//!
//! * `AND_0 = ∧_{j<t} (1 ⊕ a_j ⊕ b_j)` (equality),
//! * `AND_{i+1} = (1 ⊕ a_i) ∧ b_i ∧ ∧_{j<i} (1 ⊕ a_j ⊕ b_j)`.
//!
//! Each AND is replaced by an AND of `ep` random parity checks. After
//! grouping, every check is `c ⊕ X ⊕ Y` with `X` a parity of `a` bits and
//! `Y` a parity of `b` bits; `X` and `Y` become the preprocessed variables.
//! The outer AND over the `d` comparisons of one candidate is approximated
//! the same way with `e` checks.

mod poly;

pub use poly::{Monomial, SparseF2Polynomial};
pub(crate) use poly::Expander;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2::BitMatrix;
use crate::fredman::{ceil_log2, RankedPairMatrices};

/// Largest supported inner dimension (outer masks are single words).
pub const MAX_D: usize = 64;
/// Largest supported rank width (AND_t has `t + 1` terms in one word).
pub const MAX_T: usize = 63;
/// Default refusal threshold for the expansion bound.
pub const DEFAULT_MONOMIAL_CAP: u128 = 1 << 24;

/// Shape and approximator widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RsParameters {
    pub rows: usize,
    pub cols: usize,
    pub d: usize,
    /// Bits per rank value, `⌈log2(rows + cols)⌉`.
    pub t: usize,
    /// Outer approximator width.
    pub e: usize,
    /// Inner (comparator) approximator width.
    pub ep: usize,
    pub seed: u64,
}

impl RsParameters {
    /// Default widths `e = 2 + ⌈log2 d⌉` and `ep = 3 + 2⌈log2 d⌉ + ⌈log2 t⌉`.
    pub fn new(rows: usize, cols: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 || d > MAX_D {
            return Err(Error::InvalidParameter(format!("d = {d} outside 1..={MAX_D}")));
        }
        let t = ceil_log2(rows + cols).max(1);
        if t > MAX_T {
            return Err(Error::InvalidParameter(format!("t = {t} above {MAX_T}")));
        }
        let ld = ceil_log2(d);
        Ok(RsParameters {
            rows,
            cols,
            d,
            t,
            e: 2 + ld,
            ep: 3 + 2 * ld + ceil_log2(t),
            seed,
        })
    }

    pub fn square(n: usize, d: usize, seed: u64) -> Result<Self> {
        Self::new(n, n, d, seed)
    }

    pub fn with_e(mut self, e: usize) -> Self {
        self.e = e;
        self
    }

    pub fn with_ep(mut self, ep: usize) -> Self {
        self.ep = ep;
        self
    }

    /// Overrides the rank width; must still cover `rows + cols`.
    pub fn with_t(mut self, t: usize) -> Result<Self> {
        if t > MAX_T || (1usize << t) < self.rows + self.cols {
            return Err(Error::InvalidParameter(format!("t = {t} cannot hold the ranks")));
        }
        self.t = t;
        Ok(self)
    }

    /// Bits used to encode a candidate `k ∈ 1..=d`.
    pub fn index_bits(&self) -> usize {
        ceil_log2(self.d + 1)
    }

    pub fn slots(&self) -> usize {
        self.d * self.d
    }

    /// Number of terms of `AND_and`.
    pub fn and_terms(&self, and: usize) -> usize {
        if and == 0 {
            self.t
        } else {
            and + 1
        }
    }

    /// Preprocessed variables per slot, `(t + 1)·ep`.
    pub fn slot_vars(&self) -> usize {
        (self.t + 1) * self.ep
    }

    pub fn num_vars(&self) -> usize {
        self.slots() * self.slot_vars()
    }

    /// Index of the variable for check `r` of `AND_and` in `slot`.
    #[inline]
    pub fn var_index(&self, slot: usize, and: usize, r: usize) -> usize {
        (slot * (self.t + 1) + and) * self.ep + r
    }

    /// `d·((d+1)·(t+1)·3^ep)^e`, the pre-cancellation monomial count for the
    /// chosen widths, saturating at `u128::MAX`.
    pub fn expansion_bound(&self) -> u128 {
        let m = (self.t as u128 + 1).saturating_mul(3u128.saturating_pow(self.ep as u32));
        let inner = (self.d as u128 + 1).saturating_mul(m);
        (self.d as u128).saturating_mul(inner.saturating_pow(self.e as u32))
    }

    /// Comparator monomial bound `(t+1)·3^ep`.
    pub fn leq_bound(&self) -> u128 {
        (self.t as u128 + 1).saturating_mul(3u128.saturating_pow(self.ep as u32))
    }
}

/// `log2` of the closed-form monomial budget with ceiling logs,
/// `(1+⌈log d⌉)(⌈log(d+1)⌉ + ⌈log(t+1)⌉ + log2(3)·(3 + 2⌈log d⌉ + ⌈log t⌉))`.
pub fn monomial_budget_log2(d: usize, t: usize) -> f64 {
    let ld = ceil_log2(d) as f64;
    let a = ceil_log2(d + 1) as f64;
    let b = ceil_log2(t + 1) as f64;
    let c = 3.0 + 2.0 * ld + ceil_log2(t) as f64;
    (1.0 + ld) * (a + b + 3f64.log2() * c)
}

/// The budget as an integer, `⌈2^log2⌉`, saturating.
pub fn monomial_budget(d: usize, t: usize) -> u128 {
    let l = monomial_budget_log2(d, t);
    if l >= 127.0 {
        u128::MAX
    } else {
        l.exp2().ceil() as u128
    }
}

/// Same budget for a real `log2 d` (so `d` need not be an integer), with
/// `t = 1 + log2 n`.
pub fn monomial_budget_log2_real(log2_d: f64, log2_n: f64) -> f64 {
    let t = 1.0 + log2_n;
    let ld = log2_d.ceil();
    let a = (log2_d.exp2() + 1.0).log2().ceil();
    let b = (t + 1.0).log2().ceil();
    let c = 3.0 + 2.0 * ld + t.log2().ceil();
    (1.0 + ld) * (a + b + 3f64.log2() * c)
}

/// Smallest integer `L = log2 n` such that the budget with
/// `d = 2^{δ√L}` satisfies `log2(budget) ≤ 0.1·L` for every `L' ≥ L` up to
/// `limit`. `None` if it does not hold at `limit`.
pub fn feasibility_threshold_log2n(delta: f64, limit: u32) -> Option<u32> {
    let holds = |l: u32| {
        let lf = l as f64;
        monomial_budget_log2_real(delta * lf.sqrt(), lf) <= 0.1 * lf
    };
    if !holds(limit) {
        return None;
    }
    let mut first = limit;
    while first > 1 && holds(first - 1) {
        first -= 1;
    }
    Some(first)
}

/// `(1 ⊕ selected parities)` check expressed as `c ⊕ <a, a_mask> ⊕ <b, b_mask>`
/// over the value bits (bit `t−1−i` holds `a_i`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    pub a_mask: u64,
    pub b_mask: u64,
    pub constant: bool,
}

impl LinearForm {
    #[inline]
    pub fn eval(&self, a: u64, b: u64) -> bool {
        self.constant ^ parity(a & self.a_mask) ^ parity(b & self.b_mask)
    }
}

#[inline]
pub fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Identifies one independent draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitsKey {
    pub seed: u64,
    pub block: u64,
    pub rep: u64,
    pub ell: u64,
}

/// Random choices for one `(seed, block, rep, ℓ)`.
///
/// `inner[and·ep + r]` selects terms of `AND_and` for check `r`; it is shared
/// by every slot. `outer[k·e + r]` selects comparisons `k'` of candidate `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomBits {
    pub params: RsParameters,
    pub key: BitsKey,
    pub inner: Vec<u64>,
    pub outer: Vec<u64>,
    forms: Vec<LinearForm>,
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        !0
    } else {
        (1u64 << bits) - 1
    }
}

impl RandomBits {
    /// Counter-based derivation: the key alone determines the stream, so
    /// any schedule regenerates the same bits.
    pub fn derive(params: &RsParameters, block: u64, rep: u64, ell: u64) -> Self {
        let key = BitsKey {
            seed: params.seed,
            block,
            rep,
            ell,
        };
        let mut seed = [0u8; 32];
        for (chunk, v) in seed.chunks_mut(8).zip([key.seed, key.block, key.rep, key.ell]) {
            chunk.copy_from_slice(&v.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        let mut inner = Vec::with_capacity((params.t + 1) * params.ep);
        for and in 0..=params.t {
            let m = low_mask(params.and_terms(and));
            for _ in 0..params.ep {
                inner.push(rng.next_u64() & m);
            }
        }
        let dm = low_mask(params.d);
        let outer = (0..params.d * params.e).map(|_| rng.next_u64() & dm).collect();
        Self::from_masks(params, key, inner, outer)
    }

    /// Explicit masks, mainly for tests.
    pub fn from_masks(params: &RsParameters, key: BitsKey, inner: Vec<u64>, outer: Vec<u64>) -> Self {
        assert_eq!(inner.len(), (params.t + 1) * params.ep);
        assert_eq!(outer.len(), params.d * params.e);
        let t = params.t;
        let bit = |i: usize| 1u64 << (t - 1 - i);
        let mut forms = Vec::with_capacity(inner.len());
        for and in 0..=t {
            for r in 0..params.ep {
                let sel = inner[and * params.ep + r];
                let mut f = LinearForm {
                    a_mask: 0,
                    b_mask: 0,
                    constant: true,
                };
                for term in 0..params.and_terms(and) {
                    if (sel >> term) & 1 == 0 {
                        continue;
                    }
                    match (and, term) {
                        (0, j) => {
                            f.a_mask ^= bit(j);
                            f.b_mask ^= bit(j);
                        }
                        (_, 0) => f.a_mask ^= bit(and - 1),
                        (_, 1) => {
                            f.b_mask ^= bit(and - 1);
                            f.constant ^= true;
                        }
                        (_, j) => {
                            f.a_mask ^= bit(j - 2);
                            f.b_mask ^= bit(j - 2);
                        }
                    }
                }
                forms.push(f);
            }
        }
        RandomBits {
            params: *params,
            key,
            inner,
            outer,
            forms,
        }
    }

    pub fn zeros(params: &RsParameters) -> Self {
        let key = BitsKey {
            seed: params.seed,
            block: 0,
            rep: 0,
            ell: 0,
        };
        Self::from_masks(
            params,
            key,
            vec![0; (params.t + 1) * params.ep],
            vec![0; params.d * params.e],
        )
    }

    #[inline]
    pub fn form(&self, and: usize, r: usize) -> LinearForm {
        self.forms[and * self.params.ep + r]
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    #[inline]
    pub fn outer_mask(&self, k: usize, r: usize) -> u64 {
        self.outer[k * self.params.e + r]
    }
}

/// Razborov–Smolensky AND approximator
/// `E(y) = ∧_i (1 ⊕ ⊕_j r_{i,j}(y_j ⊕ 1))`.
pub fn approximate_and(y: &[bool], r: &[Vec<bool>]) -> Result<bool> {
    let mut out = true;
    for row in r {
        if row.len() != y.len() {
            return Err(Error::Dimension(format!(
                "mask row of length {} for {} inputs",
                row.len(),
                y.len()
            )));
        }
        let odd = row
            .iter()
            .zip(y)
            .fold(false, |acc, (&rj, &yj)| acc ^ (rj & !yj));
        out &= !odd;
    }
    Ok(out)
}

/// Word version: bit `j` of `y` is input `j`, each mask selects inputs.
#[inline]
pub fn approximate_and_masks(y: u64, masks: &[u64]) -> bool {
    masks.iter().all(|&m| !parity(m & !y))
}

/// Exact comparator `a ≤ b` for `a, b ∈ 1..=2^t`, evaluated from the XOR of
/// `t + 1` ANDs.
pub fn leq_reference(a: u64, b: u64, t: usize) -> bool {
    let (x, y) = (a - 1, b - 1);
    let xb = |i: usize| (x >> (t - 1 - i)) & 1 == 1;
    let yb = |i: usize| (y >> (t - 1 - i)) & 1 == 1;
    let eq = |j: usize| !(xb(j) ^ yb(j));
    let mut out = (0..t).all(eq);
    for i in 0..t {
        out ^= !xb(i) && yb(i) && (0..i).all(eq);
    }
    out
}

/// The randomized comparator on raw rank values, computed term by term from
/// the selection masks without the grouped linear forms.
pub fn leq_prime_direct(bits: &RandomBits, a: u64, b: u64) -> bool {
    let p = &bits.params;
    let t = p.t;
    let (x, y) = (a - 1, b - 1);
    let xb = |i: usize| (x >> (t - 1 - i)) & 1 == 1;
    let yb = |i: usize| (y >> (t - 1 - i)) & 1 == 1;
    let eq = |j: usize| !(xb(j) ^ yb(j));
    let mut out = false;
    for and in 0..=t {
        let terms: Vec<bool> = if and == 0 {
            (0..t).map(eq).collect()
        } else {
            let i = and - 1;
            let mut v = vec![!xb(i), yb(i)];
            v.extend((0..i).map(eq));
            v
        };
        let mut conj = true;
        for r in 0..p.ep {
            let sel = bits.inner[and * p.ep + r];
            let mut f = true;
            for (j, &tv) in terms.iter().enumerate() {
                if (sel >> j) & 1 == 1 {
                    f ^= !tv;
                }
            }
            conj &= f;
        }
        out ^= conj;
    }
    out
}

/// The randomized comparator through the grouped linear forms.
#[inline]
pub fn leq_prime_forms(bits: &RandomBits, a: u64, b: u64) -> bool {
    let p = &bits.params;
    let (x, y) = (a - 1, b - 1);
    let mut out = false;
    for and in 0..=p.t {
        out ^= (0..p.ep).all(|r| bits.form(and, r).eval(x, y));
    }
    out
}

/// Whether candidate `k` (0-based) contributes to output bit `ell`.
#[inline]
pub fn candidate_has_bit(k: usize, ell: usize) -> bool {
    ((k + 1) >> ell) & 1 == 1
}

/// Direct evaluation of the randomized output bit for `(i, j)` from raw
/// ranks: XOR over candidates with bit `ell` of `E` over their comparisons.
pub fn output_bit_direct(ranked: &RankedPairMatrices, bits: &RandomBits, i: usize, j: usize) -> bool {
    let p = &bits.params;
    let d = p.d;
    let ell = bits.key.ell as usize;
    let mut out = false;
    for k in (0..d).filter(|&k| candidate_has_bit(k, ell)) {
        let mut y = 0u64;
        for kp in 0..d {
            let s = k * d + kp;
            if leq_prime_direct(bits, ranked.a(i, s) as u64, ranked.b(s, j) as u64) {
                y |= 1 << kp;
            }
        }
        let masks: Vec<u64> = (0..p.e).map(|r| bits.outer_mask(k, r)).collect();
        out ^= approximate_and_masks(y, &masks);
    }
    out
}

/// Values of the preprocessed variables: `row_vars[i][var(s, and, r)]` is the
/// parity of the selected bits of `A''[i, s] − 1`, likewise for columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreprocessedVariables {
    pub row_vars: BitMatrix,
    pub col_vars: BitMatrix,
}

pub fn preprocess_xors(ranked: &RankedPairMatrices, bits: &RandomBits) -> Result<PreprocessedVariables> {
    let p = &bits.params;
    if ranked.d != p.d || ranked.rows != p.rows || ranked.cols != p.cols {
        return Err(Error::Dimension("ranked matrices do not match parameters".into()));
    }
    if ranked.max_rank() > 1usize << p.t {
        return Err(Error::InvalidParameter(format!(
            "ranks up to {} do not fit in t = {} bits",
            ranked.max_rank(),
            p.t
        )));
    }
    let nv = p.num_vars();
    let mut row_vars = BitMatrix::zeros(p.rows, nv);
    let mut col_vars = BitMatrix::zeros(p.cols, nv);
    for s in 0..p.slots() {
        for and in 0..=p.t {
            for r in 0..p.ep {
                let f = bits.form(and, r);
                let v = p.var_index(s, and, r);
                for i in 0..p.rows {
                    if parity((ranked.a(i, s) as u64 - 1) & f.a_mask) {
                        row_vars.set(i, v, true);
                    }
                }
                for j in 0..p.cols {
                    if parity((ranked.b(s, j) as u64 - 1) & f.b_mask) {
                        col_vars.set(j, v, true);
                    }
                }
            }
        }
    }
    Ok(PreprocessedVariables { row_vars, col_vars })
}

/// Comparator polynomial of one slot over the preprocessed variables.
fn leq_prime_expander(bits: &RandomBits, slot: usize) -> Expander {
    let p = &bits.params;
    let mut out = Expander::default();
    for and in 0..=p.t {
        let mut conj = Expander::one();
        for r in 0..p.ep {
            let f = bits.form(and, r);
            let v = p.var_index(slot, and, r) as u32;
            let mut factor = Expander::default();
            if f.constant {
                factor.toggle(Vec::new());
            }
            // a zero mask makes the variable identically 0
            if f.a_mask != 0 {
                factor.toggle(vec![2 * v]);
            }
            if f.b_mask != 0 {
                factor.toggle(vec![2 * v + 1]);
            }
            conj = conj.mul(&factor);
        }
        out.xor_in(&conj);
    }
    out
}

/// The comparator polynomial of slot 0 over the preprocessed variables
/// `var_index(0, and, r)`.
pub fn build_leq_prime(bits: &RandomBits) -> SparseF2Polynomial {
    leq_prime_expander(bits, 0).finish()
}

/// Fully expanded output-bit polynomial for `bits.key.ell`, identical for
/// every `(i, j)`. Refuses when the expansion bound exceeds `cap`.
pub fn build_output_bit_polynomial(bits: &RandomBits, cap: u128) -> Result<SparseF2Polynomial> {
    let p = &bits.params;
    let bound = p.expansion_bound();
    if bound > cap {
        return Err(Error::BudgetExceeded {
            bound,
            log2_budget: monomial_budget_log2(p.d, p.t),
            cap,
        });
    }
    let d = p.d;
    let ell = bits.key.ell as usize;
    let leq: Vec<Expander> = (0..p.slots()).map(|s| leq_prime_expander(bits, s)).collect();
    let mut total = Expander::default();
    for k in (0..d).filter(|&k| candidate_has_bit(k, ell)) {
        let mut e_k = Expander::one();
        for r in 0..p.e {
            let sel = bits.outer_mask(k, r);
            let mut factor = Expander::default();
            // 1 ⊕ ⊕_{k'∈sel}(Q ⊕ 1) = (1 ⊕ |sel| mod 2) ⊕ ⊕_{k'∈sel} Q
            if sel.count_ones() % 2 == 0 {
                factor.toggle(Vec::new());
            }
            for kp in 0..d {
                if (sel >> kp) & 1 == 1 {
                    factor.xor_in(&leq[k * d + kp]);
                }
            }
            e_k = e_k.mul(&factor);
        }
        total.xor_in(&e_k);
    }
    debug_assert!(total.len() as u128 <= bound.max(1));
    Ok(total.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredman::prepare;
    use crate::minplus::{Weight, WeightMatrix};
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn ranked_instance(r: &mut ChaCha8Rng, n: usize, d: usize) -> RankedPairMatrices {
        let gen = |r: &mut ChaCha8Rng, rows, cols| {
            let e = (0..rows * cols).map(|_| Weight::finite(r.gen_range(0..20))).collect();
            WeightMatrix::from_vec(rows, cols, e).unwrap()
        };
        let a = gen(r, n, d);
        let b = gen(r, d, n);
        prepare(&a, &b).unwrap().1
    }

    #[test]
    fn defaults() {
        let p = RsParameters::square(64, 4, 0).unwrap();
        assert_eq!((p.t, p.e, p.ep), (7, 4, 10));
        let p = RsParameters::square(32, 2, 0).unwrap();
        assert_eq!((p.t, p.e, p.ep), (6, 3, 8));
        assert_eq!(p.index_bits(), 2);
        assert!(RsParameters::square(8, 65, 0).is_err());
    }

    #[test]
    fn and_approximator_basics() {
        let mut r = rng(1);
        for _ in 0..100 {
            let masks: Vec<Vec<bool>> = (0..5).map(|_| (0..6).map(|_| r.gen()).collect()).collect();
            assert!(approximate_and(&[true; 6], &masks).unwrap());
            let y: Vec<bool> = (0..6).map(|_| r.gen()).collect();
            assert!(approximate_and(&y, &vec![vec![false; 6]; 5]).unwrap());
        }
        assert!(approximate_and(&[true], &[vec![true, false]]).is_err());
    }

    #[test]
    fn and_error_rate_exhaustive() {
        // d = 2, e = 8, y = (1, 0): E errs iff every row selects y_2
        let y = [true, false];
        let mut agree = 0u32;
        for r in 0u32..1 << 16 {
            let masks: Vec<Vec<bool>> = (0..8)
                .map(|i| vec![(r >> (2 * i)) & 1 == 1, (r >> (2 * i + 1)) & 1 == 1])
                .collect();
            if !approximate_and(&y, &masks).unwrap() {
                agree += 1;
            }
        }
        assert_eq!(agree, (1 << 16) - (1 << 8));
    }

    #[test]
    fn leq_reference_exhaustive() {
        for t in 1..=6 {
            for a in 1..=1u64 << t {
                for b in 1..=1u64 << t {
                    assert_eq!(leq_reference(a, b, t), a <= b, "t={t} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn forms_agree_with_direct_comparator() {
        for seed in 0..20 {
            let p = RsParameters::square(4, 2, seed).unwrap().with_ep(4);
            let bits = RandomBits::derive(&p, 0, seed, 0);
            for a in 1..=8 {
                for b in 1..=8 {
                    assert_eq!(leq_prime_direct(&bits, a, b), leq_prime_forms(&bits, a, b));
                }
            }
        }
    }

    #[test]
    fn leq_prime_expansion_is_exact() {
        let p = RsParameters::square(4, 1, 9).unwrap().with_ep(4);
        assert_eq!(p.t, 3);
        let mut r = rng(2);
        for rep in 0..10 {
            let bits = RandomBits::derive(&p, 0, rep, 0);
            let poly = build_leq_prime(&bits);
            assert!(poly.num_terms() as u128 <= p.leq_bound());
            assert!(p.leq_bound() <= 324);
            for _ in 0..20 {
                let a = r.gen_range(1..=8u64);
                let b = r.gen_range(1..=8u64);
                // slot 0 variables line up with the form index
                let row = |v: u32| parity((a - 1) & bits.forms()[v as usize].a_mask);
                let col = |v: u32| parity((b - 1) & bits.forms()[v as usize].b_mask);
                assert_eq!(poly.evaluate(row, col), leq_prime_direct(&bits, a, b));
            }
        }
    }

    #[test]
    fn zero_width_comparator_is_parity_of_and_count() {
        let p = RsParameters::square(4, 1, 0).unwrap().with_ep(0);
        let bits = RandomBits::derive(&p, 0, 0, 0);
        let poly = build_leq_prime(&bits);
        // t + 1 = 4 empty conjunctions
        assert!(poly.is_zero());
        let p = p.with_t(4).unwrap();
        let bits = RandomBits::derive(&p, 0, 0, 0);
        assert_eq!(build_leq_prime(&bits), SparseF2Polynomial::one());
    }

    #[test]
    fn preprocessing_matches_recomputation() {
        let mut r = rng(3);
        let ranked = ranked_instance(&mut r, 6, 3);
        let p = RsParameters::square(6, 3, 5).unwrap().with_ep(3);
        let zero = preprocess_xors(&ranked, &RandomBits::zeros(&p)).unwrap();
        assert_eq!(zero.row_vars.count_ones() + zero.col_vars.count_ones(), 0);
        let bits = RandomBits::derive(&p, 1, 2, 1);
        let pv = preprocess_xors(&ranked, &bits).unwrap();
        for s in 0..9 {
            for and in 0..=p.t {
                for rr in 0..p.ep {
                    let v = p.var_index(s, and, rr);
                    let f = bits.form(and, rr);
                    for i in 0..6 {
                        let x = ranked.a(i, s) as u64 - 1;
                        let want = (0..p.t).filter(|&q| (f.a_mask >> q) & 1 == 1).fold(false, |acc, q| acc ^ ((x >> q) & 1 == 1));
                        assert_eq!(pv.row_vars.get(i, v), want);
                        let y = ranked.b(s, i) as u64 - 1;
                        let want = (0..p.t).filter(|&q| (f.b_mask >> q) & 1 == 1).fold(false, |acc, q| acc ^ ((y >> q) & 1 == 1));
                        assert_eq!(pv.col_vars.get(i, v), want);
                    }
                }
            }
        }
    }

    #[test]
    fn singleton_mask_selects_one_bit() {
        // AND_1 term 0 is (1 ⊕ a_0); selecting only it gives X = a_0
        let p = RsParameters::square(4, 1, 0).unwrap().with_ep(1).with_e(1);
        let mut inner = vec![0; p.t + 1];
        inner[1] = 1;
        let key = BitsKey { seed: 0, block: 0, rep: 0, ell: 0 };
        let bits = RandomBits::from_masks(&p, key, inner, vec![0]);
        let f = bits.form(1, 0);
        assert_eq!(f.a_mask, 1 << (p.t - 1));
        assert_eq!(f.b_mask, 0);
    }

    #[test]
    fn output_polynomial_matches_direct_evaluation() {
        let mut r = rng(4);
        let n = 4;
        let ranked = ranked_instance(&mut r, n, 2);
        let p = RsParameters::square(n, 2, 77).unwrap().with_e(2).with_ep(2);
        assert_eq!(p.t, 3);
        for ell in 0..p.index_bits() as u64 {
            for rep in 0..3 {
                let bits = RandomBits::derive(&p, 0, rep, ell);
                let poly = build_output_bit_polynomial(&bits, DEFAULT_MONOMIAL_CAP).unwrap();
                assert!(poly.num_terms() as u128 <= p.expansion_bound());
                let pv = preprocess_xors(&ranked, &bits).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let via_poly = poly.evaluate(
                            |v| pv.row_vars.get(i, v as usize),
                            |v| pv.col_vars.get(j, v as usize),
                        );
                        assert_eq!(via_poly, output_bit_direct(&ranked, &bits, i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn single_candidate() {
        let mut r = rng(5);
        let ranked = ranked_instance(&mut r, 3, 1);
        let p = RsParameters::square(3, 1, 1).unwrap().with_ep(3);
        let bits = RandomBits::derive(&p, 0, 0, 0);
        let poly = build_output_bit_polynomial(&bits, DEFAULT_MONOMIAL_CAP).unwrap();
        let pv = preprocess_xors(&ranked, &bits).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = poly.evaluate(|x| pv.row_vars.get(i, x as usize), |x| pv.col_vars.get(j, x as usize));
                assert_eq!(v, output_bit_direct(&ranked, &bits, i, j));
            }
        }
    }

    #[test]
    fn budget_refusal() {
        let p = RsParameters::square(64, 4, 0).unwrap();
        let bits = RandomBits::derive(&p, 0, 0, 0);
        assert!(matches!(
            build_output_bit_polynomial(&bits, DEFAULT_MONOMIAL_CAP),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn budget_formula() {
        for t in 1..20 {
            let want = 1.0 + ceil_log2(t + 1) as f64 + 3f64.log2() * (3.0 + ceil_log2(t) as f64);
            assert!((monomial_budget_log2(1, t) - want).abs() < 1e-12);
        }
        for d in 1..40 {
            for t in 1..40 {
                assert!(monomial_budget_log2(d + 1, t) >= monomial_budget_log2(d, t));
                assert!(monomial_budget_log2(d, t + 1) >= monomial_budget_log2(d, t));
            }
        }
    }

    #[test]
    fn derivation_is_reproducible() {
        let p = RsParameters::square(16, 4, 42).unwrap();
        assert_eq!(RandomBits::derive(&p, 3, 1, 2), RandomBits::derive(&p, 3, 1, 2));
        assert_ne!(RandomBits::derive(&p, 3, 1, 2).inner, RandomBits::derive(&p, 3, 2, 2).inner);
    }
}
