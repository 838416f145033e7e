use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minplus::matrix::{WeightMatrix, WitnessMatrix};
use crate::minplus::weight::Weight;

/// Counters reported by a product strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProductStats {
    /// Entries recomputed by direct scan after the fast path failed on them.
    pub fallbacks: u64,
    /// Of those, entries whose decoded witness was valid but lost the
    /// verification scan.
    pub mismatches: u64,
    /// 64-bit word operations spent in F2 arithmetic.
    pub word_ops: u64,
    /// Output entries produced.
    pub entries: u64,
}

impl ProductStats {
    pub fn merge(&mut self, other: &ProductStats) {
        self.fallbacks += other.fallbacks;
        self.mismatches += other.mismatches;
        self.word_ops += other.word_ops;
        self.entries += other.entries;
    }
}

/// Result of a min-plus product: values, witnesses and counters.
#[derive(Clone, Debug)]
pub struct Product {
    pub values: WeightMatrix,
    pub witness: WitnessMatrix,
    pub stats: ProductStats,
}

/// A min-plus product strategy, `C[i,j] = min_k A[i,k] + B[k,j]` together
/// with a witness `k` per finite cell.
pub trait MinPlusProduct: Sync {
    fn product(&self, a: &WeightMatrix, b: &WeightMatrix) -> Result<Product>;

    fn name(&self) -> &'static str;
}

/// The cubic reference product.
#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveProduct;

impl MinPlusProduct for NaiveProduct {
    fn product(&self, a: &WeightMatrix, b: &WeightMatrix) -> Result<Product> {
        let (values, witness) = minplus_product_naive(a, b)?;
        let entries = (values.rows() * values.cols()) as u64;
        Ok(Product {
            values,
            witness,
            stats: ProductStats {
                entries,
                ..Default::default()
            },
        })
    }

    fn name(&self) -> &'static str {
        "naive"
    }
}

/// Triple-loop min-plus product. The witness is the smallest minimizing `k`.
pub fn minplus_product_naive(
    a: &WeightMatrix,
    b: &WeightMatrix,
) -> Result<(WeightMatrix, WitnessMatrix)> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (n, m) = (a.rows(), b.cols());
    let rows: Vec<Result<Vec<(Weight, Option<usize>)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let arow = a.row(i);
            let mut out = vec![(Weight::INF, None); m];
            for (k, &aik) in arow.iter().enumerate() {
                if aik.is_inf() {
                    continue;
                }
                for (j, &bkj) in b.row(k).iter().enumerate() {
                    let s = aik.checked_add(bkj)?;
                    if s.is_finite() && s < out[j].0 {
                        out[j] = (s, Some(k));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut values = WeightMatrix::infinite(n, m);
    let mut witness = WitnessMatrix::empty(n, m);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, (w, k)) in row?.into_iter().enumerate() {
            values.set(i, j, w);
            witness.set(i, j, k);
        }
    }
    Ok((values, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[Vec<Option<u64>>]) -> WeightMatrix {
        WeightMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn one_by_one_zero() {
        let a = m(&[vec![Some(0)]]);
        let (c, w) = minplus_product_naive(&a, &a).unwrap();
        assert_eq!(c.get(0, 0), Weight::ZERO);
        assert_eq!(w.get(0, 0), Some(0));
    }

    #[test]
    fn infinity_is_absorbed() {
        let a = m(&[vec![Some(5), None]]);
        let b = m(&[vec![None], vec![Some(7)]]);
        let (c, w) = minplus_product_naive(&a, &b).unwrap();
        // 5 + INF and INF + 7: every term is infinite
        assert_eq!(c.get(0, 0), Weight::INF);
        assert_eq!(w.get(0, 0), None);

        let a = m(&[vec![Some(5), Some(5)]]);
        let (c, w) = minplus_product_naive(&a, &b).unwrap();
        assert_eq!(c.get(0, 0), Weight::finite(12));
        assert_eq!(w.get(0, 0), Some(1));
    }

    #[test]
    fn dimension_mismatch() {
        let a = WeightMatrix::infinite(2, 3);
        assert!(matches!(
            minplus_product_naive(&a, &a),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn overflow_detected() {
        let big = Weight::new(1 << 60).unwrap();
        let a = WeightMatrix::filled(1, 1, big);
        let b = WeightMatrix::filled(1, 1, big);
        // 2^61 is fine
        assert!(minplus_product_naive(&a, &b).is_ok());
        let c = minplus_product_naive(&a, &b).unwrap().0;
        let d = minplus_product_naive(&c, &c);
        assert!(matches!(d, Err(Error::Overflow(_))));
    }

    #[test]
    fn random_4x4_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let gen = |rng: &mut ChaCha8Rng| {
                let e: Vec<Weight> = (0..16).map(|_| Weight::finite(rng.gen_range(0..10))).collect();
                WeightMatrix::from_vec(4, 4, e).unwrap()
            };
            let a = gen(&mut rng);
            let b = gen(&mut rng);
            let (c, w) = minplus_product_naive(&a, &b).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let mut best = u64::MAX;
                    let mut arg = 0;
                    for k in 0..4 {
                        let s = a.get(i, k).value().unwrap() + b.get(k, j).value().unwrap();
                        if s < best {
                            best = s;
                            arg = k;
                        }
                    }
                    assert_eq!(c.get(i, j).value(), Some(best));
                    assert_eq!(w.get(i, j), Some(arg));
                }
            }
        }
    }
}
