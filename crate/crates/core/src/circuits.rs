//! Unbounded fan-in Boolean circuits for min-plus inner products.
//!
//! Numbers are `t`-bit strings, most significant bit first. A weight bound
//! `M` uses `t = 3 + ⌈log2 M⌉` bits so finite sums never overflow, and the
//! all-ones string stands for ∞.
//!
//! Every builder here emits only AND, OR and NOT gates (plus inputs and
//! constants); `1 + a + b` is written `(¬a ∨ b) ∧ (a ∨ ¬b)`. Structurally
//! equal gates are shared.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minplus::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Input,
    Const(bool),
    Not,
    And,
    Or,
    Xor,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<usize>,
}

/// Gates in topological order; inputs are the first `num_inputs` gates.
#[derive(Clone, Debug)]
pub struct CircuitDag {
    gates: Vec<Gate>,
    num_inputs: usize,
    outputs: Vec<usize>,
    depth: usize,
}

/// Size and depth summary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitStats {
    pub inputs: usize,
    pub outputs: usize,
    /// Gates other than inputs and constants.
    pub size: usize,
    pub depth: usize,
    pub and: usize,
    pub or: usize,
    pub not: usize,
    pub xor: usize,
    /// Total wires into non-input gates.
    pub wires: usize,
}

impl CircuitDag {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    /// Longest path from a source to an output, counting every gate on it
    /// except inputs and constants.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Recomputes gate depths from scratch.
    pub fn gate_depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            depth[g] = match gate.kind {
                GateKind::Input | GateKind::Const(_) => 0,
                _ => 1 + gate.inputs.iter().map(|&i| depth[i]).max().unwrap_or(0),
            };
        }
        depth
    }

    pub fn is_and_or_not(&self) -> bool {
        self.gates.iter().all(|g| g.kind != GateKind::Xor)
    }

    pub fn stats(&self) -> CircuitStats {
        let count = |k: GateKind| self.gates.iter().filter(|g| g.kind == k).count();
        let size = self
            .gates
            .iter()
            .filter(|g| !matches!(g.kind, GateKind::Input | GateKind::Const(_)))
            .count();
        CircuitStats {
            inputs: self.num_inputs,
            outputs: self.outputs.len(),
            size,
            depth: self.depth,
            and: count(GateKind::And),
            or: count(GateKind::Or),
            not: count(GateKind::Not),
            xor: count(GateKind::Xor),
            wires: self.gates.iter().map(|g| g.inputs.len()).sum(),
        }
    }

    /// Evaluates on one input vector.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>> {
        let words: Vec<u64> = inputs.iter().map(|&b| b as u64).collect();
        Ok(self.evaluate_words(&words)?.into_iter().map(|w| w & 1 == 1).collect())
    }

    /// Evaluates 64 input vectors at once: bit `r` of `inputs[i]` is input
    /// `i` of vector `r`, and likewise for the outputs.
    pub fn evaluate_words(&self, inputs: &[u64]) -> Result<Vec<u64>> {
        if inputs.len() != self.num_inputs {
            return Err(Error::Dimension(format!(
                "{} inputs for a circuit with {}",
                inputs.len(),
                self.num_inputs
            )));
        }
        let mut val = vec![0u64; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            let ins = gate.inputs.iter().map(|&i| val[i]);
            val[g] = match gate.kind {
                GateKind::Input => inputs[g],
                GateKind::Const(c) => 0u64.wrapping_sub(c as u64),
                GateKind::Not => !val[gate.inputs[0]],
                GateKind::And => ins.fold(!0, |a, b| a & b),
                GateKind::Or => ins.fold(0, |a, b| a | b),
                GateKind::Xor => ins.fold(0, |a, b| a ^ b),
            };
        }
        Ok(self.outputs.iter().map(|&o| val[o]).collect())
    }

    /// Evaluates many input vectors, in parallel over chunks of 64.
    pub fn evaluate_batch(&self, batch: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
        if let Some(bad) = batch.iter().find(|v| v.len() != self.num_inputs) {
            return Err(Error::Dimension(format!(
                "{} inputs for a circuit with {}",
                bad.len(),
                self.num_inputs
            )));
        }
        let chunks: Vec<Vec<Vec<bool>>> = batch
            .par_chunks(64)
            .map(|chunk| {
                let mut words = vec![0u64; self.num_inputs];
                for (r, v) in chunk.iter().enumerate() {
                    for (w, &b) in words.iter_mut().zip(v) {
                        *w |= (b as u64) << r;
                    }
                }
                let out = self.evaluate_words(&words).expect("checked length");
                (0..chunk.len())
                    .map(|r| out.iter().map(|w| (w >> r) & 1 == 1).collect())
                    .collect()
            })
            .collect();
        Ok(chunks.into_iter().flatten().collect())
    }
}

/// Incremental builder with structural sharing.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    num_inputs: usize,
    memo: HashMap<Gate, usize>,
}

impl CircuitBuilder {
    pub fn new(num_inputs: usize) -> Self {
        let mut b = CircuitBuilder::default();
        for _ in 0..num_inputs {
            b.gates.push(Gate {
                kind: GateKind::Input,
                inputs: Vec::new(),
            });
        }
        b.num_inputs = num_inputs;
        b
    }

    pub fn input(&self, i: usize) -> usize {
        assert!(i < self.num_inputs, "input {i} out of range");
        i
    }

    fn push(&mut self, kind: GateKind, mut inputs: Vec<usize>) -> usize {
        if matches!(kind, GateKind::And | GateKind::Or | GateKind::Xor) {
            inputs.sort_unstable();
            if kind != GateKind::Xor {
                inputs.dedup();
            }
        }
        let gate = Gate { kind, inputs };
        if let Some(&g) = self.memo.get(&gate) {
            return g;
        }
        let g = self.gates.len();
        self.gates.push(gate.clone());
        self.memo.insert(gate, g);
        g
    }

    pub fn constant(&mut self, v: bool) -> usize {
        self.push(GateKind::Const(v), Vec::new())
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(GateKind::Not, vec![a])
    }

    /// AND of any fan-in; none is constant 1. A single input still gets its
    /// own gate so that depth does not depend on the sizes involved.
    pub fn and(&mut self, ins: Vec<usize>) -> usize {
        match ins.len() {
            0 => self.constant(true),
            _ => self.push(GateKind::And, ins),
        }
    }

    pub fn or(&mut self, ins: Vec<usize>) -> usize {
        match ins.len() {
            0 => self.constant(false),
            _ => self.push(GateKind::Or, ins),
        }
    }

    /// Primitive XOR gate.
    pub fn xor_gate(&mut self, ins: Vec<usize>) -> usize {
        match ins.len() {
            0 => self.constant(false),
            1 => ins[0],
            _ => self.push(GateKind::Xor, ins),
        }
    }

    /// `1 + a + b` as `(¬a ∨ b) ∧ (a ∨ ¬b)`.
    pub fn xnor(&mut self, a: usize, b: usize) -> usize {
        let na = self.not(a);
        let nb = self.not(b);
        let l = self.or(vec![na, b]);
        let r = self.or(vec![a, nb]);
        self.and(vec![l, r])
    }

    /// `a + b` as `(a ∨ b) ∧ ¬(a ∧ b)`.
    pub fn xor2(&mut self, a: usize, b: usize) -> usize {
        let o = self.or(vec![a, b]);
        let both = self.and(vec![a, b]);
        let nb = self.not(both);
        self.and(vec![o, nb])
    }

    pub fn finish(self, outputs: Vec<usize>) -> CircuitDag {
        let mut dag = CircuitDag {
            gates: self.gates,
            num_inputs: self.num_inputs,
            outputs,
            depth: 0,
        };
        let d = dag.gate_depths();
        dag.depth = dag.outputs.iter().map(|&o| d[o]).max().unwrap_or(0);
        dag
    }

    /// Carry-lookahead sum of two MSB-first words with ∞ absorbing.
    pub fn add(&mut self, x: &[usize], y: &[usize]) -> Vec<usize> {
        let t = x.len();
        assert_eq!(t, y.len());
        // position p counts from the least significant bit
        let at = |w: &[usize], p: usize| w[t - 1 - p];
        let gen: Vec<usize> = (0..t).map(|p| self.and(vec![at(x, p), at(y, p)])).collect();
        let prop: Vec<usize> = (0..t).map(|p| self.xor2(at(x, p), at(y, p))).collect();
        let inf_x = self.and(x.to_vec());
        let inf_y = self.and(y.to_vec());
        let inf = self.or(vec![inf_x, inf_y]);
        let mut out = vec![0; t];
        for p in 0..t {
            // carry into p: some lower q generates and every position between propagates
            let terms: Vec<usize> = (0..p)
                .map(|q| {
                    let mut ins = vec![gen[q]];
                    ins.extend((q + 1..p).map(|r| prop[r]));
                    self.and(ins)
                })
                .collect();
            let carry = self.or(terms);
            let s = self.xor2(prop[p], carry);
            out[t - 1 - p] = self.or(vec![s, inf]);
        }
        out
    }

    /// `[x ≤ y]` for MSB-first words.
    pub fn leq(&mut self, x: &[usize], y: &[usize]) -> usize {
        let t = x.len();
        assert_eq!(t, y.len());
        let eq: Vec<usize> = (0..t).map(|i| self.xnor(x[i], y[i])).collect();
        let all_eq = self.and(eq.clone());
        let mut terms = vec![all_eq];
        for i in 0..t {
            let nx = self.not(x[i]);
            let prefix = self.and(eq[..i].to_vec());
            terms.push(self.and(vec![nx, y[i], prefix]));
        }
        self.or(terms)
    }

    /// `MIN(x_i) = ⋀_j LEQ(x_i, x_j)` for every `i`.
    pub fn is_min(&mut self, xs: &[Vec<usize>]) -> Vec<usize> {
        let n = xs.len();
        (0..n)
            .map(|i| {
                let cmp: Vec<usize> = (0..n).filter(|&j| j != i).map(|j| self.leq(&xs[i], &xs[j])).collect();
                self.and(cmp)
            })
            .collect()
    }

    /// Bits of the minimum value, correct when the minimum is unique:
    /// bit `b` is `⋁_i (MIN(x_i) ∧ x_i[b])`.
    pub fn min_unique(&mut self, xs: &[Vec<usize>]) -> Vec<usize> {
        let mins = self.is_min(xs);
        let t = xs[0].len();
        (0..t)
            .map(|b| {
                let terms: Vec<usize> = (0..xs.len()).map(|i| self.and(vec![mins[i], xs[i][b]])).collect();
                self.or(terms)
            })
            .collect()
    }

    /// `d`-bit MSB-first encoding of the smallest 1-based index attaining the
    /// minimum: each `x_i` is mapped to `f(x_i)` (its index when minimal, all
    /// ones otherwise) and the unique minimum of those is taken.
    pub fn argmin_general(&mut self, xs: &[Vec<usize>]) -> Vec<usize> {
        let d = xs.len();
        let mins = self.is_min(xs);
        let f: Vec<Vec<usize>> = (0..d)
            .map(|i| {
                let not_min = self.not(mins[i]);
                (0..d)
                    .map(|b| {
                        if index_bit(i + 1, b, d) {
                            // (MIN ∧ 1) ∨ ¬MIN
                            self.or(vec![mins[i], not_min])
                        } else {
                            not_min
                        }
                    })
                    .collect()
            })
            .collect();
        self.min_unique(&f)
    }
}

/// Bit `b` (MSB first) of `i` written with `w` bits.
fn index_bit(i: usize, b: usize, w: usize) -> bool {
    let shift = w - 1 - b;
    shift < usize::BITS as usize && (i >> shift) & 1 == 1
}

fn words(d: usize, t: usize, offset: usize) -> Vec<Vec<usize>> {
    (0..d).map(|i| (0..t).map(|b| offset + i * t + b).collect()).collect()
}

/// Bits per number for weight bound `m`: `3 + ⌈log2 m⌉`.
pub fn bits_for_bound(m: u64) -> usize {
    3 + crate::fredman::ceil_log2(m.max(1) as usize)
}

/// `t`-bit MSB-first encoding; ∞ is all ones.
pub fn encode(w: Weight, t: usize) -> Vec<bool> {
    match w.value() {
        None => vec![true; t],
        Some(v) => (0..t).map(|b| index_bit(v as usize, b, t)).collect(),
    }
}

/// Inverse of [`encode`]; all ones decodes to ∞.
pub fn decode(bits: &[bool]) -> Weight {
    if bits.iter().all(|&b| b) {
        return Weight::INF;
    }
    Weight::new(bits.iter().fold(0u64, |acc, &b| acc * 2 + b as u64)).expect("small value")
}

/// `x + y` on `t`-bit words: `2t` inputs (`x` then `y`), `t` outputs.
pub fn build_adder(t: usize) -> Result<CircuitDag> {
    check_positive(t, "t")?;
    let mut b = CircuitBuilder::new(2 * t);
    let w = words(2, t, 0);
    let out = b.add(&w[0], &w[1]);
    Ok(b.finish(out))
}

/// `[x ≤ y]`: `2t` inputs, one output.
pub fn build_leq(t: usize) -> Result<CircuitDag> {
    check_positive(t, "t")?;
    let mut b = CircuitBuilder::new(2 * t);
    let w = words(2, t, 0);
    let out = b.leq(&w[0], &w[1]);
    Ok(b.finish(vec![out]))
}

/// Minimum of `d` words when it is unique: `d·t` inputs, `t` outputs.
pub fn build_min_unique(d: usize, t: usize) -> Result<CircuitDag> {
    check_positive(d, "d")?;
    check_positive(t, "t")?;
    let mut b = CircuitBuilder::new(d * t);
    let xs = words(d, t, 0);
    let out = b.min_unique(&xs);
    Ok(b.finish(out))
}

/// Smallest 1-based index of a minimum among `d` words, as `d` bits.
pub fn build_min_general(d: usize, t: usize) -> Result<CircuitDag> {
    check_positive(d, "d")?;
    check_positive(t, "t")?;
    let mut b = CircuitBuilder::new(d * t);
    let xs = words(d, t, 0);
    let out = b.argmin_general(&xs);
    Ok(b.finish(out))
}

/// `(u ⋆ v) = min_k u_k + v_k` for `u, v` of length `d` with entries in
/// `[0, m] ∪ {∞}`. Inputs: `u` then `v`, `t = bits_for_bound(m)` bits each.
/// Output: `t` bits of the minimum sum, all ones for ∞.
pub fn build_minplus_inner(d: usize, m: u64) -> Result<CircuitDag> {
    check_positive(d, "d")?;
    let t = bits_for_bound(m);
    let mut b = CircuitBuilder::new(2 * d * t);
    let u = words(d, t, 0);
    let v = words(d, t, d * t);
    let sums: Vec<Vec<usize>> = (0..d).map(|k| b.add(&u[k], &v[k])).collect();
    let idx = b.argmin_general(&sums);
    // select the sum whose 1-based index equals idx
    let sel: Vec<usize> = (0..d)
        .map(|k| {
            let lits: Vec<usize> = (0..d)
                .map(|bit| if index_bit(k + 1, bit, d) { idx[bit] } else { b.not(idx[bit]) })
                .collect();
            b.and(lits)
        })
        .collect();
    let out: Vec<usize> = (0..t)
        .map(|bit| {
            let terms: Vec<usize> = (0..d).map(|k| b.and(vec![sel[k], sums[k][bit]])).collect();
            b.or(terms)
        })
        .collect();
    Ok(b.finish(out))
}

fn check_positive(v: usize, name: &str) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidParameter(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

/// Evaluates `c` on every assignment of its inputs (at most 2^24 of them) and
/// hands each (input index, outputs as integer MSB-first) to `f`.
pub fn for_all_assignments(c: &CircuitDag, mut f: impl FnMut(u64, u64)) -> Result<()> {
    let n = c.num_inputs();
    if n > 24 {
        return Err(Error::InvalidParameter(format!("{n} inputs is too many to enumerate")));
    }
    let total = 1u64 << n;
    let mut base = 0u64;
    while base < total {
        let lanes = (total - base).min(64);
        // input i is bit (n-1-i) of the assignment index, so inputs read MSB first
        let words: Vec<u64> = (0..n)
            .map(|i| {
                let mut w = 0u64;
                for r in 0..lanes {
                    w |= (((base + r) >> (n - 1 - i)) & 1) << r;
                }
                w
            })
            .collect();
        let out = c.evaluate_words(&words)?;
        for r in 0..lanes {
            let v = out.iter().fold(0u64, |acc, w| acc * 2 + ((w >> r) & 1));
            f(base + r, v);
        }
        base += lanes;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constants_and_not() {
        let mut b = CircuitBuilder::new(1);
        let one = b.constant(true);
        let zero = b.constant(false);
        let n = b.not(0);
        let c = b.finish(vec![one, zero, n]);
        assert_eq!(c.evaluate(&[false]).unwrap(), vec![true, false, true]);
        assert_eq!(c.evaluate(&[true]).unwrap(), vec![true, false, false]);
        assert!(c.evaluate(&[]).is_err());
        assert_eq!(c.depth(), 1);
    }

    #[test]
    fn xor_gate_and_expansions_agree() {
        let mut b = CircuitBuilder::new(2);
        let g = b.xor_gate(vec![0, 1]);
        let e = b.xor2(0, 1);
        let x = b.xnor(0, 1);
        let c = b.finish(vec![g, e, x]);
        for v in 0..4u8 {
            let (p, q) = (v & 1 == 1, v & 2 == 2);
            assert_eq!(c.evaluate(&[p, q]).unwrap(), vec![p ^ q, p ^ q, !(p ^ q)]);
        }
        assert!(!c.is_and_or_not());
    }

    #[test]
    fn sharing_reuses_gates() {
        let mut b = CircuitBuilder::new(3);
        let a = b.and(vec![0, 1, 2]);
        let a2 = b.and(vec![2, 0, 1]);
        assert_eq!(a, a2);
    }

    #[test]
    fn adder_exhaustive_t6() {
        let t = 6;
        let c = build_adder(t).unwrap();
        assert!(c.is_and_or_not());
        let all = (1u64 << t) - 1;
        for_all_assignments(&c, |idx, out| {
            let (x, y) = (idx >> t, idx & all);
            if x == all || y == all {
                assert_eq!(out, all);
            } else if x + y < all {
                assert_eq!(out, x + y, "{x} + {y}");
            }
        })
        .unwrap();
    }

    #[test]
    fn leq_exhaustive_t6() {
        let t = 6;
        let c = build_leq(t).unwrap();
        for_all_assignments(&c, |idx, out| {
            let (x, y) = (idx >> t, idx & ((1 << t) - 1));
            assert_eq!(out == 1, x <= y);
        })
        .unwrap();
        assert_eq!(c.evaluate(&[true; 6].iter().chain(&[false; 6]).copied().collect::<Vec<_>>()).unwrap(), vec![false]);
    }

    #[test]
    fn depth_does_not_grow() {
        assert_eq!(build_adder(4).unwrap().depth(), build_adder(12).unwrap().depth());
        assert_eq!(build_leq(4).unwrap().depth(), build_leq(12).unwrap().depth());
        assert_eq!(build_min_general(2, 4).unwrap().depth(), build_min_general(8, 8).unwrap().depth());
        assert_eq!(build_minplus_inner(2, 3).unwrap().depth(), build_minplus_inner(4, 100).unwrap().depth());
    }

    #[test]
    fn min_unique_small() {
        let c = build_min_unique(3, 3).unwrap();
        let bits: Vec<bool> = [5u64, 2, 7].iter().flat_map(|&v| encode(Weight::new(v).unwrap(), 3)).collect();
        assert_eq!(decode(&c.evaluate(&bits).unwrap()), Weight::new(2).unwrap());
        let id = build_min_unique(1, 4).unwrap();
        for_all_assignments(&id, |idx, out| assert_eq!(idx, out)).unwrap();
        // exhaustive d = 2, t ≤ 4 where the minimum is unique
        for t in 1..=4 {
            let c = build_min_unique(2, t).unwrap();
            for_all_assignments(&c, |idx, out| {
                let (x, y) = (idx >> t, idx & ((1 << t) - 1));
                if x != y {
                    assert_eq!(out, x.min(y));
                }
            })
            .unwrap();
        }
    }

    #[test]
    fn min_unique_random_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (d, t) = (5, 6);
        let c = build_min_unique(d, t).unwrap();
        let mut batch = Vec::new();
        let mut want = Vec::new();
        while batch.len() < 10_000 {
            let xs: Vec<u64> = (0..d).map(|_| rng.gen_range(0..64)).collect();
            let mut s = xs.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != d {
                continue;
            }
            batch.push(xs.iter().flat_map(|&v| encode(Weight::new(v).unwrap(), t)).collect());
            want.push(s[0]);
        }
        let got = c.evaluate_batch(&batch).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(decode(g).value(), Some(*w));
        }
    }

    #[test]
    fn min_general_exhaustive_d2_t3() {
        let (d, t) = (2, 3);
        let c = build_min_general(d, t).unwrap();
        for_all_assignments(&c, |idx, out| {
            let xs = [idx >> t, idx & 7];
            let best = xs.iter().min().unwrap();
            let i = xs.iter().position(|x| x == best).unwrap() + 1;
            assert_eq!(out, i as u64);
        })
        .unwrap();
    }

    #[test]
    fn min_general_ties_and_order() {
        let (d, t) = (4, 3);
        let c = build_min_general(d, t).unwrap();
        let enc = |xs: &[u64]| -> Vec<bool> { xs.iter().flat_map(|&v| encode(Weight::new(v).unwrap(), t)).collect() };
        let idx = |bits: Vec<bool>| bits.iter().fold(0, |a, &b| a * 2 + b as usize);
        assert_eq!(idx(c.evaluate(&enc(&[3, 3, 3, 3])).unwrap()), 1);
        assert_eq!(idx(c.evaluate(&enc(&[7, 5, 3, 1])).unwrap()), 4);
        assert_eq!(idx(c.evaluate(&enc(&[4, 2, 6, 2])).unwrap()), 2);
        let one = build_min_general(1, 3).unwrap();
        assert_eq!(one.evaluate(&enc(&[5])[..3]).unwrap(), vec![true]);
    }

    fn inner_oracle(u: &[Weight], v: &[Weight]) -> Weight {
        u.iter().zip(v).map(|(a, b)| a.checked_add(*b).unwrap()).min().unwrap()
    }

    fn check_inner_exhaustive(d: usize, m: u64) {
        let c = build_minplus_inner(d, m).unwrap();
        let t = bits_for_bound(m);
        let vals: Vec<Weight> = (0..=m).map(|v| Weight::new(v).unwrap()).chain([Weight::INF]).collect();
        let k = vals.len();
        let total = k.pow(2 * d as u32);
        let mut batch = Vec::with_capacity(total);
        let mut want = Vec::with_capacity(total);
        for mut code in 0..total {
            let mut w = Vec::with_capacity(2 * d);
            for _ in 0..2 * d {
                w.push(vals[code % k]);
                code /= k;
            }
            want.push(inner_oracle(&w[..d], &w[d..]));
            batch.push(w.iter().flat_map(|&x| encode(x, t)).collect::<Vec<bool>>());
        }
        let got = c.evaluate_batch(&batch).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(decode(g), *w);
        }
    }

    #[test]
    fn minplus_inner_exhaustive() {
        check_inner_exhaustive(1, 7);
        check_inner_exhaustive(2, 3);
        check_inner_exhaustive(3, 3);
    }

    #[test]
    fn infinity_propagates() {
        let c = build_minplus_inner(2, 3).unwrap();
        let t = bits_for_bound(3);
        let inf = Weight::INF;
        let one = Weight::new(1).unwrap();
        let two = Weight::new(2).unwrap();
        let bits: Vec<bool> = [one, inf, inf, two].iter().flat_map(|&x| encode(x, t)).collect();
        assert_eq!(c.evaluate(&bits).unwrap(), vec![true; t]);
    }

    #[test]
    fn size_grows_polynomially() {
        // gate count against (d·t)^3 over a small grid
        for (d, m) in [(1, 1), (2, 3), (4, 15), (8, 255)] {
            let c = build_minplus_inner(d, m).unwrap();
            let t = bits_for_bound(m);
            let bound = 4 * (d * t).pow(3);
            assert!(c.stats().size <= bound, "d={d} m={m}: {} > {bound}", c.stats().size);
        }
    }
}
