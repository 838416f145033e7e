use crate::error::{Error, Result};
use crate::minplus::matrix::{SuccessorMatrix, WeightMatrix};
use crate::minplus::product::{MinPlusProduct, ProductStats};
use crate::minplus::weight::Weight;

/// Distances, next hops and the counters accumulated by the product strategy.
#[derive(Clone, Debug)]
pub struct ApspResult {
    pub distances: WeightMatrix,
    pub successors: SuccessorMatrix,
    pub stats: ProductStats,
    /// Number of `D ← min(D, D⋆D)` rounds performed (0 for Floyd–Warshall).
    pub squarings: usize,
}

/// Checks squareness and returns a copy with the diagonal forced to `0`.
/// Self-loops never shorten a path under non-negative weights.
pub fn validate_graph_matrix(w: &WeightMatrix) -> Result<WeightMatrix> {
    if !w.is_square() {
        return Err(Error::Dimension(format!(
            "graph matrix must be square, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let mut d = w.clone();
    for i in 0..d.rows() {
        d.set(i, i, Weight::ZERO);
    }
    Ok(d)
}

fn initial_successors(d: &WeightMatrix) -> SuccessorMatrix {
    let n = d.rows();
    let mut next = SuccessorMatrix::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i == j || d.get(i, j).is_finite() {
                next.set(i, j, Some(j));
            }
        }
    }
    next
}

pub fn floyd_warshall(w: &WeightMatrix) -> Result<ApspResult> {
    let mut d = validate_graph_matrix(w)?;
    let n = d.rows();
    let mut next = initial_successors(&d);
    for k in 0..n {
        for i in 0..n {
            let dik = d.get(i, k);
            if dik.is_inf() {
                continue;
            }
            for j in 0..n {
                let via = dik.checked_add(d.get(k, j))?;
                if via < d.get(i, j) {
                    d.set(i, j, via);
                    next.set(i, j, next.next(i, k));
                }
            }
        }
    }
    Ok(ApspResult {
        distances: d,
        successors: next,
        stats: ProductStats::default(),
        squarings: 0,
    })
}

/// `⌈log2 n⌉` rounds of `D ← min(D, D⋆D)` using `product`.
///
/// On a strict improvement through witness `k`, the first hop toward `j`
/// becomes the first hop toward `k` as recorded before the round.
pub fn apsp_by_squaring(w: &WeightMatrix, product: &dyn MinPlusProduct) -> Result<ApspResult> {
    let mut d = validate_graph_matrix(w)?;
    let n = d.rows();
    let mut next = initial_successors(&d);
    let rounds = if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    };
    let mut stats = ProductStats::default();
    for _ in 0..rounds {
        let p = product.product(&d, &d)?;
        stats.merge(&p.stats);
        let before = next.clone();
        for i in 0..n {
            for j in 0..n {
                let v = p.values.get(i, j);
                if v < d.get(i, j) {
                    let k = p.witness.get(i, j).ok_or_else(|| {
                        Error::InvalidParameter(format!("finite cell ({i},{j}) without witness"))
                    })?;
                    d.set(i, j, v);
                    next.set(i, j, before.next(i, k));
                }
            }
        }
    }
    Ok(ApspResult {
        distances: d,
        successors: next,
        stats,
        squarings: rounds,
    })
}

/// Node sequence `s … t` following the successor table; empty when `t` is
/// unreachable from `s`.
pub fn reconstruct_path(next: &SuccessorMatrix, s: usize, t: usize) -> Result<Vec<usize>> {
    let n = next.n();
    for v in [s, t] {
        if v >= n {
            return Err(Error::OutOfRange { index: v, size: n });
        }
    }
    if s == t {
        return Ok(vec![s]);
    }
    let mut path = vec![s];
    let mut cur = s;
    while cur != t {
        match next.next(cur, t) {
            None => return Ok(Vec::new()),
            Some(v) => {
                cur = v;
                path.push(v);
            }
        }
        if path.len() > n {
            return Err(Error::InvalidParameter(format!(
                "successor table cycles on the way from {s} to {t}"
            )));
        }
    }
    Ok(path)
}

/// Sum of edge weights along `path` in `w`; `∞` if an edge is missing.
pub fn path_weight(w: &WeightMatrix, path: &[usize]) -> Result<Weight> {
    let mut total = Weight::ZERO;
    for pair in path.windows(2) {
        let e = if pair[0] == pair[1] {
            Weight::ZERO
        } else {
            w.get(pair[0], pair[1])
        };
        total = total.checked_add(e)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minplus::NaiveProduct;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> WeightMatrix {
        let mut w = WeightMatrix::infinite(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(p) {
                    w.set(i, j, Weight::finite(rng.gen_range(0..=max_w)));
                }
            }
        }
        w
    }

    fn bellman_ford(w: &WeightMatrix, s: usize) -> Vec<Option<u64>> {
        let n = w.rows();
        let mut dist = vec![None; n];
        dist[s] = Some(0u64);
        for _ in 0..n {
            for u in 0..n {
                let Some(du) = dist[u] else { continue };
                for v in 0..n {
                    if let Some(e) = w.get(u, v).value() {
                        if dist[v].map_or(true, |dv| du + e < dv) {
                            dist[v] = Some(du + e);
                        }
                    }
                }
            }
        }
        dist
    }

    #[test]
    fn single_edge() {
        let w = WeightMatrix::from_rows(&[vec![Some(0), Some(3)], vec![None, Some(0)]]).unwrap();
        let r = floyd_warshall(&w).unwrap();
        assert_eq!(r.distances.get(0, 1), Weight::finite(3));
        assert_eq!(r.distances.get(1, 0), Weight::INF);
        assert_eq!(reconstruct_path(&r.successors, 0, 1).unwrap(), vec![0, 1]);
        assert!(reconstruct_path(&r.successors, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn three_cycle() {
        let mut w = WeightMatrix::identity(3);
        for i in 0..3 {
            w.set(i, (i + 1) % 3, Weight::finite(1));
        }
        let r = floyd_warshall(&w).unwrap();
        for i in 0..3 {
            assert_eq!(r.distances.get(i, (i + 1) % 3), Weight::finite(1));
            assert_eq!(r.distances.get(i, (i + 2) % 3), Weight::finite(2));
        }
    }

    #[test]
    fn path_graph_one_squaring() {
        let w = WeightMatrix::from_rows(&[
            vec![Some(0), Some(1), None],
            vec![None, Some(0), Some(1)],
            vec![None, None, Some(0)],
        ])
        .unwrap();
        let mut d = w.clone();
        let p = NaiveProduct.product(&d, &d).unwrap();
        d = d.entrywise_min(&p.values).unwrap();
        assert_eq!(d.get(0, 2), Weight::finite(2));
        let r = apsp_by_squaring(&w, &NaiveProduct).unwrap();
        assert_eq!(r.squarings, 2);
        assert_eq!(reconstruct_path(&r.successors, 0, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn single_node() {
        let w = WeightMatrix::filled(1, 1, Weight::ZERO);
        let r = apsp_by_squaring(&w, &NaiveProduct).unwrap();
        assert_eq!(r.distances, w);
        assert_eq!(r.squarings, 0);
        assert_eq!(reconstruct_path(&r.successors, 0, 0).unwrap(), vec![0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            floyd_warshall(&WeightMatrix::infinite(2, 3)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            WeightMatrix::from_signed(2, 2, &[0, -1, 0, 0]),
            Err(Error::NegativeWeight { row: 0, col: 1, value: -1 })
        ));
        let r = floyd_warshall(&WeightMatrix::identity(2)).unwrap();
        assert!(matches!(
            reconstruct_path(&r.successors, 0, 5),
            Err(Error::OutOfRange { index: 5, size: 2 })
        ));
    }

    #[test]
    fn agrees_with_bellman_ford() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..40 {
            // zero weights included on purpose: they stress next-hop cycles
            let w = random_graph(&mut rng, 16, 0.15 + 0.02 * (trial % 10) as f64, 9);
            let fw = floyd_warshall(&w).unwrap();
            let sq = apsp_by_squaring(&w, &NaiveProduct).unwrap();
            assert_eq!(fw.distances, sq.distances);
            for s in 0..16 {
                let bf = bellman_ford(&w, s);
                for t in 0..16 {
                    assert_eq!(fw.distances.get(s, t).value(), bf[t]);
                    for r in [&fw, &sq] {
                        let path = reconstruct_path(&r.successors, s, t).unwrap();
                        match bf[t] {
                            None => assert!(path.is_empty()),
                            Some(d) => {
                                assert_eq!(path.first(), Some(&s));
                                assert_eq!(path.last(), Some(&t));
                                assert_eq!(path_weight(&w, &path).unwrap(), Weight::finite(d));
                            }
                        }
                    }
                }
            }
        }
    }
}
