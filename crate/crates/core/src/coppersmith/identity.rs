//! The 2×3×2 base identity with five products.
//!
//! Variables: `a11 a12 a13 a22 a23`, `b11 b12 b21 b31`, `c11 c12 c21 c22`.
//! With `α`, `β`, `γ` the forms below,
//! `Σ_l α_l β_l γ_l = x²·(a11b11c11 + a11b12c21 + a12b21c11 + a13b31c11 + a22b21c12 + a23b31c12) + x³·P`.

use std::collections::BTreeMap;

use rand::Rng;

use super::field::Fp;

/// A-pattern slots, in storage order: (row bit, column trit).
pub const A_PATTERN: [(usize, usize); 5] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)];
/// B-pattern slots, in storage order: (row trit, column bit).
pub const B_PATTERN: [(usize, usize); 4] = [(0, 0), (0, 1), (1, 0), (2, 0)];

pub(crate) const A11: usize = 0;
pub(crate) const A12: usize = 1;
pub(crate) const A13: usize = 2;
pub(crate) const A22: usize = 3;
pub(crate) const A23: usize = 4;
pub(crate) const B11: usize = 0;
pub(crate) const B12: usize = 1;
pub(crate) const B21: usize = 2;
pub(crate) const B31: usize = 3;
/// `C` digits are `2·j + i` for the variable `c_{ji}` (1-based names).
pub(crate) const C11: usize = 0;
pub(crate) const C12: usize = 1;
pub(crate) const C21: usize = 2;

/// One term of a linear form: (variable, power of x, sign).
pub type FormTerm = (usize, usize, i64);

pub const ALPHA: [&[FormTerm]; 5] = [
    &[(A11, 0, 1), (A12, 2, 1)],
    &[(A11, 0, 1), (A13, 2, 1)],
    &[(A11, 0, 1), (A22, 2, 1)],
    &[(A11, 0, 1), (A23, 2, 1)],
    &[(A11, 0, 1)],
];

pub const BETA: [&[FormTerm]; 5] = [
    &[(B21, 0, 1), (B11, 2, 1)],
    &[(B31, 0, 1)],
    &[(B21, 0, 1), (B12, 1, -1)],
    &[(B31, 0, 1), (B12, 1, 1)],
    &[(B21, 0, 1), (B31, 0, 1)],
];

pub const GAMMA: [&[FormTerm]; 5] = [
    &[(C11, 0, 1)],
    &[(C11, 0, 1), (C21, 1, -1)],
    &[(C12, 0, 1)],
    &[(C12, 0, 1), (C21, 1, 1)],
    &[(C11, 0, -1), (C12, 0, -1)],
];

/// The six trilinear terms `a·b·c` of the 2×3×2 product with this pattern.
pub const TARGET: [(usize, usize, usize); 6] = [
    (A11, B11, C11),
    (A11, B12, C21),
    (A12, B21, C11),
    (A13, B31, C11),
    (A22, B21, C12),
    (A23, B31, C12),
];

/// Symbolic expansion: coefficient of `a·b·c·x^e` keyed by `(a, b, c, e)`.
pub fn expand_identity() -> BTreeMap<(usize, usize, usize, usize), i64> {
    let mut out: BTreeMap<(usize, usize, usize, usize), i64> = BTreeMap::new();
    for l in 0..5 {
        for &(a, ea, sa) in ALPHA[l] {
            for &(b, eb, sb) in BETA[l] {
                for &(c, ec, sc) in GAMMA[l] {
                    *out.entry((a, b, c, ea + eb + ec)).or_default() += sa * sb * sc;
                }
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Outcome of checking the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    /// Every `x⁰` and `x¹` coefficient vanishes.
    pub low_terms_cancel: bool,
    /// The `x²` coefficient is exactly the six target terms.
    pub x2_is_target: bool,
    /// Lowest power of `x` among the remaining terms.
    pub junk_min_degree: usize,
    /// Random evaluations that agreed.
    pub random_agree: usize,
    pub random_trials: usize,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.low_terms_cancel
            && self.x2_is_target
            && self.junk_min_degree >= 3
            && self.random_agree == self.random_trials
    }
}

/// Checks the identity symbolically and at `trials` random points: for random
/// `a`, `b`, `c` the polynomial `Σ α β γ − x²·target` must have zero
/// coefficients at `x⁰, x¹, x²`, found by interpolating through six values of `x`.
pub fn check_base_identity<const P: u64, R: Rng + ?Sized>(rng: &mut R, trials: usize) -> IdentityReport {
    let sym = expand_identity();
    let low_terms_cancel = sym.keys().all(|&(_, _, _, e)| e >= 2);
    let x2: Vec<(usize, usize, usize)> = sym
        .iter()
        .filter(|(&(_, _, _, e), _)| e == 2)
        .map(|(&(a, b, c, _), &v)| {
            debug_assert_eq!(v, 1);
            (a, b, c)
        })
        .collect();
    let x2_is_target = {
        let mut t = TARGET.to_vec();
        t.sort();
        x2 == t && sym.iter().filter(|(k, _)| k.3 == 2).all(|(_, &v)| v == 1)
    };
    let junk_min_degree = sym.keys().map(|k| k.3).filter(|&e| e != 2).min().unwrap_or(usize::MAX);

    let mut random_agree = 0;
    for _ in 0..trials {
        let a: Vec<Fp<P>> = (0..5).map(|_| Fp::random(rng)).collect();
        let b: Vec<Fp<P>> = (0..4).map(|_| Fp::random(rng)).collect();
        let c: Vec<Fp<P>> = (0..4).map(|_| Fp::random(rng)).collect();
        let target = TARGET
            .iter()
            .fold(Fp::ZERO, |acc, &(i, j, k)| acc + a[i] * b[j] * c[k]);
        let form = |terms: &[FormTerm], v: &[Fp<P>], x: Fp<P>| {
            terms.iter().fold(Fp::<P>::ZERO, |acc, &(i, e, s)| {
                let t = v[i] * x.pow(e as u64);
                if s > 0 {
                    acc + t
                } else {
                    acc - t
                }
            })
        };
        // total degree is at most 5: six samples determine it
        let xs: Vec<Fp<P>> = (0..6).map(|i| Fp::new(i as u64 + 1)).collect();
        let ys: Vec<Fp<P>> = xs
            .iter()
            .map(|&x| {
                let lhs = (0..5).fold(Fp::ZERO, |acc, l| {
                    acc + form(ALPHA[l], &a, x) * form(BETA[l], &b, x) * form(GAMMA[l], &c, x)
                });
                lhs - x * x * target
            })
            .collect();
        let coeffs = super::vandermonde::interpolate(&xs, &ys);
        if coeffs[..3].iter().all(|v| v.is_zero()) {
            random_agree += 1;
        }
    }
    IdentityReport {
        low_terms_cancel,
        x2_is_target,
        junk_min_degree,
        random_agree,
        random_trials: trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coppersmith::field::MERSENNE31;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = check_base_identity::<MERSENNE31, _>(&mut rng, 100);
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.junk_min_degree, 3);
    }

    #[test]
    fn patterns_have_five_and_four_slots() {
        assert_eq!(A_PATTERN.len(), 5);
        assert_eq!(B_PATTERN.len(), 4);
        // every target term pairs A(i,k) with B(k,j) and c_{ji}
        for &(a, b, c) in &TARGET {
            let (i, k) = A_PATTERN[a];
            let (k2, j) = B_PATTERN[b];
            assert_eq!(k, k2);
            assert_eq!(c, 2 * j + i);
        }
    }

    #[test]
    fn corrupted_form_is_caught() {
        // flipping the sign of x·b12 in the third form breaks the cancellation
        let mut sym: BTreeMap<(usize, usize, usize, usize), i64> = BTreeMap::new();
        let beta3: &[FormTerm] = &[(B21, 0, 1), (B12, 1, 1)];
        for l in 0..5 {
            let beta = if l == 2 { beta3 } else { BETA[l] };
            for &(a, ea, sa) in ALPHA[l] {
                for &(b, eb, sb) in beta {
                    for &(c, ec, sc) in GAMMA[l] {
                        *sym.entry((a, b, c, ea + eb + ec)).or_default() += sa * sb * sc;
                    }
                }
            }
        }
        sym.retain(|_, v| *v != 0);
        assert!(sym.keys().any(|k| k.3 < 2));
    }
}
