//! The randomized min-plus product: ranks, randomized output bits, majority
//! vote, blocking, and a verify-and-fallback pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2::{evaluate_all_pairs_counted, BitMatrix};
use crate::fredman::{ceil_log2, prepare, PerturbedPair, RankedPairMatrices};
use crate::minplus::{MinPlusProduct, Product, ProductStats, Weight, WeightMatrix, WitnessMatrix};
use crate::rs_poly::{
    build_output_bit_polynomial, candidate_has_bit, parity, preprocess_xors, RandomBits,
    RsParameters, DEFAULT_MONOMIAL_CAP,
};

/// How each randomized output-bit matrix is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Per-pair evaluation of the unexpanded expression, 64 columns per word.
    Direct,
    /// Expanded polynomial evaluated on all pairs by one F2 product.
    Expanded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastProductConfig {
    /// Inner block width.
    pub d: usize,
    /// Repetitions per output bit; `None` means `18⌈log2 n⌉`.
    pub reps: Option<usize>,
    /// Outer approximator width override.
    pub e: Option<usize>,
    /// Comparator approximator width override.
    pub ep: Option<usize>,
    pub seed: u64,
    pub mode: EvalMode,
    /// Check every decoded witness by direct scan and repair mismatches.
    pub verify: bool,
    /// Refusal threshold for expanded mode.
    pub monomial_cap: u128,
}

impl FastProductConfig {
    pub fn new(d: usize, seed: u64) -> Self {
        FastProductConfig {
            d,
            reps: None,
            e: None,
            ep: None,
            seed,
            mode: EvalMode::Direct,
            verify: false,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = Some(reps);
        self
    }

    pub fn with_widths(mut self, e: usize, ep: usize) -> Self {
        self.e = Some(e);
        self.ep = Some(ep);
        self
    }

    pub fn with_mode(mut self, mode: EvalMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }

    /// Parameters for an `rows × d` by `d × cols` block.
    pub fn params_for(&self, rows: usize, cols: usize) -> Result<RsParameters> {
        let mut p = RsParameters::new(rows, cols, self.d, self.seed)?;
        if let Some(e) = self.e {
            p = p.with_e(e);
        }
        if let Some(ep) = self.ep {
            p = p.with_ep(ep);
        }
        Ok(p)
    }

    /// `18⌈log2 n⌉` unless overridden; at least 1.
    pub fn reps_for(&self, n: usize) -> usize {
        self.reps.unwrap_or(18 * ceil_log2(n).max(1)).max(1)
    }
}

/// Counts of 1-votes per `(ℓ, i, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVoteTally {
    pub reps: usize,
    pub bits: usize,
    pub rows: usize,
    pub cols: usize,
    counts: Vec<u32>,
}

impl BitVoteTally {
    pub fn new(reps: usize, bits: usize, rows: usize, cols: usize) -> Self {
        BitVoteTally {
            reps,
            bits,
            rows,
            cols,
            counts: vec![0; bits * rows * cols],
        }
    }

    #[inline]
    fn idx(&self, ell: usize, i: usize, j: usize) -> usize {
        (ell * self.rows + i) * self.cols + j
    }

    pub fn count(&self, ell: usize, i: usize, j: usize) -> u32 {
        self.counts[self.idx(ell, i, j)]
    }

    pub fn add_votes(&mut self, ell: usize, votes: &BitMatrix) {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if votes.get(i, j) {
                    let x = self.idx(ell, i, j);
                    self.counts[x] += 1;
                }
            }
        }
    }

    /// Strict majority of 1-votes.
    pub fn majority(&self, ell: usize, i: usize, j: usize) -> bool {
        2 * self.count(ell, i, j) as usize > self.reps
    }

    /// Fewest vote flips that change the majority bit.
    pub fn flips_to_change(&self, ell: usize, i: usize, j: usize) -> usize {
        let c = self.count(ell, i, j) as usize;
        let half = self.reps / 2;
        if self.majority(ell, i, j) {
            c - half
        } else {
            half + 1 - c
        }
    }

    /// Majority with the given votes moved: `delta` added to the 1-count.
    pub fn majority_after(&self, ell: usize, i: usize, j: usize, delta: i64) -> bool {
        2 * (self.count(ell, i, j) as i64 + delta) > self.reps as i64
    }
}

/// Result of a fast product together with its counters.
#[derive(Clone, Debug)]
pub struct FastOutcome {
    pub values: WeightMatrix,
    pub witness: WitnessMatrix,
    pub stats: ProductStats,
    /// Entries whose voted index was outside `1..=d`.
    pub invalid_decodes: u64,
}

/// Output-bit matrix of one repetition, evaluated directly.
pub fn output_bits_direct(ranked: &RankedPairMatrices, bits: &RandomBits) -> (BitMatrix, u64) {
    let p = &bits.params;
    let (rows, cols, d) = (ranked.rows, ranked.cols, p.d);
    let ell = bits.key.ell as usize;
    let words = cols.div_ceil(64);
    let forms = bits.forms();
    let nf = forms.len();
    let cands: Vec<usize> = (0..d).filter(|&k| candidate_has_bit(k, ell)).collect();
    // column-side parities, one word per (candidate, k', form, column word)
    let mut y = vec![0u64; cands.len() * d * nf * words];
    for (ci, &k) in cands.iter().enumerate() {
        for kp in 0..d {
            let s = k * d + kp;
            let base = (ci * d + kp) * nf;
            for j in 0..cols {
                let b = ranked.b(s, j) as u64 - 1;
                for (f, form) in forms.iter().enumerate() {
                    if parity(b & form.b_mask) {
                        y[(base + f) * words + j / 64] |= 1 << (j % 64);
                    }
                }
            }
        }
    }
    let mut out = BitMatrix::zeros(rows, cols);
    let mut ops = 0u64;
    let mut q = vec![0u64; d];
    for i in 0..rows {
        for w in 0..words {
            let mut acc = 0u64;
            for (ci, &k) in cands.iter().enumerate() {
                for (kp, qk) in q.iter_mut().enumerate() {
                    let a = ranked.a(i, k * d + kp) as u64 - 1;
                    let base = (ci * d + kp) * nf;
                    let mut leq = 0u64;
                    for and in 0..=p.t {
                        let mut conj = !0u64;
                        for r in 0..p.ep {
                            let fi = and * p.ep + r;
                            let f = forms[fi];
                            let x = f.constant ^ parity(a & f.a_mask);
                            conj &= y[(base + fi) * words + w] ^ 0u64.wrapping_sub(x as u64);
                        }
                        leq ^= conj;
                    }
                    *qk = leq;
                }
                let mut e_k = !0u64;
                for r in 0..p.e {
                    let sel = bits.outer_mask(k, r);
                    let mut f = if sel.count_ones() % 2 == 0 { !0u64 } else { 0 };
                    for (kp, &qk) in q.iter().enumerate() {
                        if (sel >> kp) & 1 == 1 {
                            f ^= qk;
                        }
                    }
                    e_k &= f;
                }
                acc ^= e_k;
                ops += (d * (p.t + 1) * p.ep + p.e * d) as u64;
            }
            let valid = (cols - w * 64).min(64);
            if valid < 64 {
                acc &= (1u64 << valid) - 1;
            }
            out.row_words_mut(i)[w] = acc;
        }
    }
    (out, ops)
}

/// Output-bit matrix of one repetition through the expanded polynomial.
pub fn output_bits_expanded(
    ranked: &RankedPairMatrices,
    bits: &RandomBits,
    cap: u128,
) -> Result<(BitMatrix, u64)> {
    let poly = build_output_bit_polynomial(bits, cap)?;
    let pv = preprocess_xors(ranked, bits)?;
    evaluate_all_pairs_counted(&poly, &pv.row_vars, &pv.col_vars)
}

fn output_bits(
    ranked: &RankedPairMatrices,
    bits: &RandomBits,
    cfg: &FastProductConfig,
) -> Result<(BitMatrix, u64)> {
    match cfg.mode {
        EvalMode::Direct => Ok(output_bits_direct(ranked, bits)),
        EvalMode::Expanded => output_bits_expanded(ranked, bits, cfg.monomial_cap),
    }
}

/// Votes of all repetitions for all index bits of one block.
pub fn vote(
    ranked: &RankedPairMatrices,
    params: &RsParameters,
    cfg: &FastProductConfig,
    block: u64,
    reps: usize,
) -> Result<(BitVoteTally, u64)> {
    let bits_n = params.index_bits();
    if cfg.mode == EvalMode::Expanded && params.expansion_bound() > cfg.monomial_cap {
        return Err(Error::BudgetExceeded {
            bound: params.expansion_bound(),
            log2_budget: crate::rs_poly::monomial_budget_log2(params.d, params.t),
            cap: cfg.monomial_cap,
        });
    }
    let jobs: Vec<(usize, usize)> = (0..bits_n)
        .flat_map(|ell| (0..reps).map(move |rep| (ell, rep)))
        .collect();
    let results: Vec<Result<(usize, BitMatrix, u64)>> = jobs
        .par_iter()
        .map(|&(ell, rep)| {
            let bits = RandomBits::derive(params, block, rep as u64, ell as u64);
            output_bits(ranked, &bits, cfg).map(|(m, ops)| (ell, m, ops))
        })
        .collect();
    let mut tally = BitVoteTally::new(reps, bits_n, ranked.rows, ranked.cols);
    let mut ops = 0;
    for r in results {
        let (ell, m, o) = r?;
        tally.add_votes(ell, &m);
        ops += o;
    }
    Ok((tally, ops))
}

/// Voted candidate (1-based) for `(i, j)`.
pub fn decode(tally: &BitVoteTally, i: usize, j: usize) -> usize {
    (0..tally.bits)
        .filter(|&ell| tally.majority(ell, i, j))
        .map(|ell| 1usize << ell)
        .sum()
}

struct BlockResult {
    values: WeightMatrix,
    witness: WitnessMatrix,
    stats: ProductStats,
    invalid: u64,
}

fn rect_block(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cfg: &FastProductConfig,
    block: u64,
    reps: usize,
) -> Result<(BlockResult, Option<BitVoteTally>)> {
    let (r, d, c) = (a.rows(), a.cols(), b.cols());
    let mut values = WeightMatrix::infinite(r, c);
    let mut witness = WitnessMatrix::empty(r, c);
    let mut stats = ProductStats {
        entries: (r * c) as u64,
        ..Default::default()
    };
    let mut invalid = 0;
    if d == 1 {
        for i in 0..r {
            for j in 0..c {
                let v = a.get(i, 0).checked_add(b.get(0, j))?;
                values.set(i, j, v);
                witness.set(i, j, v.is_finite().then_some(0));
            }
        }
        return Ok((
            BlockResult {
                values,
                witness,
                stats,
                invalid,
            },
            None,
        ));
    }
    let (pp, ranked): (PerturbedPair, RankedPairMatrices) = prepare(a, b)?;
    let params = cfg.params_for(r, c)?;
    let (tally, ops) = vote(&ranked, &params, cfg, block, reps)?;
    stats.word_ops = ops;
    for i in 0..r {
        for j in 0..c {
            let voted = decode(&tally, i, j);
            let mut k = if (1..=d).contains(&voted) {
                voted - 1
            } else {
                invalid += 1;
                stats.fallbacks += 1;
                pp.argmin(i, j)
            };
            if cfg.verify {
                let truth = pp.argmin(i, j);
                if truth != k {
                    stats.fallbacks += 1;
                    stats.mismatches += 1;
                    k = truth;
                }
            }
            let v = pp.original_value(i, k, j);
            values.set(i, j, v);
            witness.set(i, j, v.is_finite().then_some(k));
        }
    }
    Ok((
        BlockResult {
            values,
            witness,
            stats,
            invalid,
        },
        Some(tally),
    ))
}

/// `rows × d` by `d × cols` product. Also returns the vote tally (absent
/// for `d = 1`, where no vote is needed).
pub fn rect_minplus_fast(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cfg: &FastProductConfig,
) -> Result<(FastOutcome, Option<BitVoteTally>)> {
    if a.cols() != b.rows() || a.cols() != cfg.d {
        return Err(Error::Dimension(format!(
            "expected {}x{d} times {d}x{}, got {}x{} times {}x{}",
            a.rows(),
            b.cols(),
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            d = cfg.d
        )));
    }
    let reps = cfg.reps_for(a.rows().max(b.cols()));
    let (res, tally) = rect_block(a, b, cfg, 0, reps)?;
    Ok((
        FastOutcome {
            values: res.values,
            witness: res.witness,
            stats: res.stats,
            invalid_decodes: res.invalid,
        },
        tally,
    ))
}

/// General product: inner dimension split into width-`d` blocks (the last
/// padded with `∞`), entrywise minimum across blocks, smallest global
/// witness on ties.
pub fn minplus_product_fast(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cfg: &FastProductConfig,
) -> Result<FastOutcome> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if cfg.d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    let (n, m, c) = (a.rows(), a.cols(), b.cols());
    let reps = cfg.reps_for(n.max(c));
    let nblocks = m.div_ceil(cfg.d);
    let blocks: Vec<Result<BlockResult>> = (0..nblocks)
        .into_par_iter()
        .map(|s| {
            let ab = a.column_block(s * cfg.d, cfg.d);
            let bb = b.row_block(s * cfg.d, cfg.d);
            rect_block(&ab, &bb, cfg, s as u64, reps).map(|(r, _)| r)
        })
        .collect();
    let mut values = WeightMatrix::infinite(n, c);
    let mut witness = WitnessMatrix::empty(n, c);
    let mut stats = ProductStats::default();
    let mut invalid = 0;
    for (s, res) in blocks.into_iter().enumerate() {
        let res = res?;
        let mut bs = res.stats;
        bs.entries = 0;
        stats.merge(&bs);
        invalid += res.invalid;
        for i in 0..n {
            for j in 0..c {
                let v = res.values.get(i, j);
                if v < values.get(i, j) {
                    values.set(i, j, v);
                    witness.set(i, j, res.witness.get(i, j).map(|k| s * cfg.d + k));
                }
            }
        }
    }
    stats.entries = (n * c) as u64;
    Ok(FastOutcome {
        values,
        witness,
        stats,
        invalid_decodes: invalid,
    })
}

/// The randomized product as a [`MinPlusProduct`] strategy.
#[derive(Clone, Copy, Debug)]
pub struct FastProduct {
    pub cfg: FastProductConfig,
}

impl MinPlusProduct for FastProduct {
    fn product(&self, a: &WeightMatrix, b: &WeightMatrix) -> Result<Product> {
        let out = minplus_product_fast(a, b, &self.cfg)?;
        Ok(Product {
            values: out.values,
            witness: out.witness,
            stats: out.stats,
        })
    }

    fn name(&self) -> &'static str {
        match self.cfg.mode {
            EvalMode::Direct => "fast-direct",
            EvalMode::Expanded => "fast-expanded",
        }
    }
}

/// Per-entry, per-repetition agreement of randomized output bits with the
/// true bits of the winning index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccuracyReport {
    pub samples: usize,
    pub agree: usize,
    pub rate: f64,
    /// Binomial standard deviation of `rate`.
    pub sigma: f64,
    pub reps_evaluated: usize,
}

/// Samples `(i, j, ℓ, rep)` uniformly from the bit matrices of `reps`
/// repetitions (direct mode) of the single-block product `A ⋆ B`.
pub fn measure_per_entry_accuracy(
    a: &WeightMatrix,
    b: &WeightMatrix,
    cfg: &FastProductConfig,
    reps: usize,
    samples: usize,
    sample_seed: u64,
) -> Result<AccuracyReport> {
    if a.cols() != b.rows() || a.cols() != cfg.d || reps == 0 {
        return Err(Error::Dimension("accuracy needs one n×d by d×n block".into()));
    }
    let (pp, ranked) = prepare(a, b)?;
    let params = cfg.params_for(a.rows(), b.cols())?;
    let nbits = params.index_bits();
    let mats: Vec<BitMatrix> = (0..nbits * reps)
        .into_par_iter()
        .map(|x| {
            let (ell, rep) = (x / reps, x % reps);
            let bits = RandomBits::derive(&params, 0, rep as u64, ell as u64);
            output_bits_direct(&ranked, &bits).0
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let mut agree = 0;
    for _ in 0..samples {
        let i = rng.gen_range(0..a.rows());
        let j = rng.gen_range(0..b.cols());
        let ell = rng.gen_range(0..nbits);
        let rep = rng.gen_range(0..reps);
        let truth = ((pp.argmin(i, j) + 1) >> ell) & 1 == 1;
        if mats[ell * reps + rep].get(i, j) == truth {
            agree += 1;
        }
    }
    let rate = agree as f64 / samples.max(1) as f64;
    Ok(AccuracyReport {
        samples,
        agree,
        rate,
        sigma: (rate * (1.0 - rate) / samples.max(1) as f64).sqrt(),
        reps_evaluated: reps,
    })
}

/// Uniform random matrix with entries in `0..=max`, each `∞` with
/// probability `p_inf`.
pub fn random_weight_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, max: u64, p_inf: f64) -> WeightMatrix {
    let e = (0..rows * cols)
        .map(|_| {
            if p_inf > 0.0 && rng.gen_bool(p_inf) {
                Weight::INF
            } else {
                Weight::finite(rng.gen_range(0..=max))
            }
        })
        .collect();
    WeightMatrix::from_vec(rows, cols, e).expect("shape")
}
