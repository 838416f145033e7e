use minplus::apps::{
    min_triangle_brute, min_triangle_dense, min_triangle_sparse, minplus_convolution, ConvolutionMode, EdgeListGraph,
};
use minplus::circuits::{bits_for_bound, build_adder, build_leq, build_minplus_inner, decode, encode};
use minplus::coppersmith::{structured_multiply, Fp, OpCounts, Side, StructuredFieldMatrix, TruncatedPoly, F31, MERSENNE31};
use minplus::f2::{evaluate_all_pairs, f2_multiply, BitMatrix};
use minplus::fredman::{difference_matrices, perturb, prepare, rank_replace};
use minplus::minplus::{minplus_product_naive, NaiveProduct, Weight, WeightMatrix};
use minplus::rs_poly::{leq_reference, Monomial, SparseF2Polynomial};
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = Option<u64>> {
    prop_oneof![1 => Just(None), 5 => (0u64..60).prop_map(Some)]
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = WeightMatrix> {
    prop::collection::vec(weight(), rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<Option<u64>>> = v.chunks(cols).map(|c| c.to_vec()).collect();
        WeightMatrix::from_rows(&rows).unwrap()
    })
}

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..7, 1usize..7, 1usize..7)
}

fn bits(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(any::<bool>(), rows * cols)
        .prop_map(move |v| BitMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

fn poly(vars: u32) -> impl Strategy<Value = SparseF2Polynomial> {
    let mono = (
        prop::collection::vec(0..vars, 0..3),
        prop::collection::vec(0..vars, 0..3),
    )
        .prop_map(|(rows, cols)| Monomial { rows, cols });
    (prop::collection::vec(mono, 0..12), any::<bool>()).prop_map(|(m, c)| SparseF2Polynomial::from_monomials(m, c))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Weight>> {
    prop::collection::vec(weight(), n).prop_map(|v| v.into_iter().map(|x| x.map_or(Weight::INF, Weight::finite)).collect())
}

fn graph(n: usize, directed: bool) -> impl Strategy<Value = EdgeListGraph> {
    prop::collection::vec((0..n, 0..n, 0u64..30), 0..n * 3).prop_map(move |e| {
        let edges = e
            .into_iter()
            .filter(|(u, v, _)| u != v)
            .map(|(u, v, w)| (u, v, Weight::finite(w)))
            .collect();
        EdgeListGraph::new(n, edges, directed).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in matrix(5, 5), b in matrix(5, 5), c in matrix(5, 5)) {
        let (ab, _) = minplus_product_naive(&a, &b).unwrap();
        let (bc, _) = minplus_product_naive(&b, &c).unwrap();
        prop_assert_eq!(minplus_product_naive(&ab, &c).unwrap().0, minplus_product_naive(&a, &bc).unwrap().0);
    }

    #[test]
    fn identity_is_two_sided((r, c, _) in dims(), seed in any::<u64>()) {
        let a = {
            use rand::SeedableRng;
            minplus::fast::random_weight_matrix(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed), r, c, 40, 0.2)
        };
        prop_assert_eq!(&minplus_product_naive(&WeightMatrix::identity(r), &a).unwrap().0, &a);
        prop_assert_eq!(&minplus_product_naive(&a, &WeightMatrix::identity(c)).unwrap().0, &a);
    }

    #[test]
    fn witnesses_attain_the_minimum(a in matrix(4, 6), b in matrix(6, 5)) {
        let (c, w) = minplus_product_naive(&a, &b).unwrap();
        for i in 0..4 {
            for j in 0..5 {
                let v = c.get(i, j);
                match w.get(i, j) {
                    Some(k) => {
                        prop_assert_eq!(a.get(i, k).checked_add(b.get(k, j)).unwrap(), v);
                        for kk in 0..6 {
                            let s = a.get(i, kk).checked_add(b.get(kk, j)).unwrap();
                            prop_assert!(v <= s);
                            // smallest k on ties
                            if kk < k { prop_assert!(s > v); }
                        }
                    }
                    None => prop_assert!(v.is_inf()),
                }
            }
        }
    }

    #[test]
    fn fredman_round_trip_and_properties(a in matrix(6, 4), b in matrix(4, 7)) {
        let (pp, ranked) = prepare(&a, &b).unwrap();
        let (c, _) = minplus_product_naive(&a, &b).unwrap();
        let n = ranked.max_rank() as u32;
        prop_assert!(ranked.app.iter().chain(&ranked.bpp).all(|&x| (1..=n).contains(&x)));
        for i in 0..6 {
            for j in 0..7 {
                let k = pp.argmin(i, j);
                prop_assert_eq!(pp.original_value(i, k, j), c.get(i, j));
                let dominating: Vec<usize> = (0..4)
                    .filter(|&k| (0..4).all(|kp| ranked.a(i, k * 4 + kp) <= ranked.b(k * 4 + kp, j)))
                    .collect();
                prop_assert_eq!(dominating, vec![k]);
            }
        }
        // ranks preserve the sign of every difference comparison
        let diff = difference_matrices(&perturb(&a, &b).unwrap());
        let again = rank_replace(&diff);
        prop_assert_eq!(&again, &ranked);
        for s in 0..16 {
            for i in 0..6 {
                for j in 0..7 {
                    prop_assert_eq!(diff.a(i, s) <= diff.b(s, j), ranked.a(i, s) <= ranked.b(s, j));
                }
            }
        }
    }

    #[test]
    fn f2_is_associative_and_distributive(x in bits(7, 9), y in bits(9, 5), y2 in bits(9, 5), z in bits(5, 6)) {
        let xy = f2_multiply(&x, &y).unwrap();
        prop_assert_eq!(f2_multiply(&xy, &z).unwrap(), f2_multiply(&x, &f2_multiply(&y, &z).unwrap()).unwrap());
        let lhs = f2_multiply(&x, &y.xor(&y2).unwrap()).unwrap();
        prop_assert_eq!(lhs, xy.xor(&f2_multiply(&x, &y2).unwrap()).unwrap());
    }

    #[test]
    fn pack_round_trip(v in prop::collection::vec(prop::collection::vec(any::<bool>(), 70), 1..5)) {
        let m = BitMatrix::pack(&v).unwrap();
        prop_assert!(m.padding_is_clean());
        prop_assert_eq!(m.unpack(), v);
    }

    #[test]
    fn all_pairs_evaluation_is_linear(p in poly(6), q in poly(6), rv in bits(5, 6), cv in bits(4, 6)) {
        let lhs = evaluate_all_pairs(&p.xor(&q), &rv, &cv).unwrap();
        let rhs = evaluate_all_pairs(&p, &rv, &cv).unwrap().xor(&evaluate_all_pairs(&q, &rv, &cv).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        for i in 0..5 {
            for j in 0..4 {
                prop_assert_eq!(lhs.get(i, j), p.xor(&q).evaluate(|v| rv.get(i, v as usize), |v| cv.get(j, v as usize)));
            }
        }
    }

    #[test]
    fn polynomials_are_canonical(p in poly(5)) {
        let m = p.monomials();
        prop_assert!(m.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(m.iter().all(|x| x.degree() > 0));
        prop_assert!(p.xor(&p).is_zero());
        // x² = x
        prop_assert_eq!(p.mul(&p), p.clone());
    }

    #[test]
    fn leq_reference_is_integer_order(t in 1usize..20, a in any::<u64>(), b in any::<u64>()) {
        // ranks are 1-based and fit in t bits after the shift
        let (a, b) = (a % (1 << t) + 1, b % (1 << t) + 1);
        prop_assert_eq!(leq_reference(a, b, t), a <= b);
    }

    #[test]
    fn field_inverse_and_truncated_products(a in 1u64..MERSENNE31, cs in prop::collection::vec(0u64..MERSENNE31, 1..8), ds in prop::collection::vec(0u64..MERSENNE31, 1..8), x in any::<u64>()) {
        let f = F31::new(a);
        prop_assert_eq!(f * f.inv().unwrap(), F31::ONE);
        let bound = 6;
        let p = TruncatedPoly::<MERSENNE31>::from_coeffs(cs.iter().map(|&c| Fp::new(c)).collect(), bound);
        let q = TruncatedPoly::<MERSENNE31>::from_coeffs(ds.iter().map(|&c| Fp::new(c)).collect(), bound);
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        // the untruncated product agrees below the bound
        let full = TruncatedPoly::<MERSENNE31>::from_coeffs(cs.iter().map(|&c| Fp::new(c)).collect(), 20)
            .mul(&TruncatedPoly::from_coeffs(ds.iter().map(|&c| Fp::new(c)).collect(), 20));
        for i in 0..bound {
            prop_assert_eq!(p.mul(&q).coeff(i).unwrap(), full.coeff(i).unwrap());
        }
        let xv = F31::new(x);
        let wide = |v: &[u64]| TruncatedPoly::<MERSENNE31>::from_coeffs(v.iter().map(|&c| Fp::new(c)).collect(), 20);
        prop_assert_eq!(full.eval(xv), wide(&cs).eval(xv) * wide(&ds).eval(xv));
    }

    #[test]
    fn structured_product_is_exact(m in 1usize..3, a in prop::collection::vec(0u64..MERSENNE31, 25), b in prop::collection::vec(0u64..MERSENNE31, 16)) {
        let mut sa = StructuredFieldMatrix::<MERSENNE31>::zeros(Side::A, m);
        let mut sb = StructuredFieldMatrix::<MERSENNE31>::zeros(Side::B, m);
        let na = sa.entries.len();
        let nb = sb.entries.len();
        for (e, &v) in sa.entries.iter_mut().zip(&a[..na]) { *e = Fp::new(v); }
        for (e, &v) in sb.entries.iter_mut().zip(&b[..nb]) { *e = Fp::new(v); }
        let mut counts = OpCounts::default();
        let got = structured_multiply(&sa, &sb, &mut counts).unwrap();
        prop_assert_eq!(got, sa.to_dense().mul_naive(&sb.to_dense()).unwrap());
        prop_assert_eq!(counts.leaf_products, 5u64.pow(m as u32));
    }

    #[test]
    fn adder_and_leq_on_wide_words(t in 7usize..16, x in any::<u64>(), y in any::<u64>()) {
        let mask = (1u64 << t) - 1;
        let (x, y) = (x & mask >> 1, y & mask >> 1);
        let enc = |v: u64| encode(Weight::finite(v), t);
        let input: Vec<bool> = enc(x).into_iter().chain(enc(y)).collect();
        let sum = decode(&build_adder(t).unwrap().evaluate(&input).unwrap());
        prop_assert_eq!(sum, Weight::finite(x + y));
        prop_assert_eq!(build_leq(t).unwrap().evaluate(&input).unwrap(), vec![x <= y]);
    }

    #[test]
    fn inner_product_circuit(d in 1usize..6, m in 1u64..40, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = build_minplus_inner(d, m).unwrap();
        let t = bits_for_bound(m);
        let mut draw = || if rng.gen_bool(0.2) { Weight::INF } else { Weight::finite(rng.gen_range(0..=m)) };
        let u: Vec<Weight> = (0..d).map(|_| draw()).collect();
        let v: Vec<Weight> = (0..d).map(|_| draw()).collect();
        let want = u.iter().zip(&v).map(|(a, b)| a.checked_add(*b).unwrap()).min().unwrap();
        let input: Vec<bool> = u.iter().chain(&v).flat_map(|&w| encode(w, t)).collect();
        prop_assert_eq!(decode(&c.evaluate(&input).unwrap()), want);
    }

    #[test]
    fn convolution_commutes_and_associates(x in vector(9), y in vector(9), z in vector(9)) {
        let p = &NaiveProduct;
        let conv = |a: &[Weight], b: &[Weight]| minplus_convolution(a, b, ConvolutionMode::Naive, p).unwrap();
        prop_assert_eq!(conv(&x, &y), conv(&y, &x));
        prop_assert_eq!(conv(&x, &y), minplus_convolution(&x, &y, ConvolutionMode::Blocked, p).unwrap());
        // pad to equal lengths for the second convolution
        let pad = |v: Vec<Weight>, n: usize| { let mut v = v; v.resize(n, Weight::INF); v };
        let n = 2 * 9 - 1;
        let left = conv(&conv(&x, &y), &pad(z.clone(), n));
        let right = conv(&pad(x.clone(), n), &conv(&y, &z));
        prop_assert_eq!(&left[..3 * 9 - 2], &right[..3 * 9 - 2]);
    }

    #[test]
    fn triangle_is_delta_invariant(g in graph(14, false), dg in graph(12, true)) {
        for g in [g, dg] {
            let want = min_triangle_brute(&g);
            prop_assert_eq!(min_triangle_dense(&g, &NaiveProduct).unwrap().map(|t| t.weight), want);
            for delta in [1, 2, 3, 5, 8, 100] {
                prop_assert_eq!(min_triangle_sparse(&g, delta, &NaiveProduct).unwrap().map(|t| t.weight), want);
            }
        }
    }
}
