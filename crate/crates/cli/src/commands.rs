use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use minplus::apps::{
    default_delta, is_metric, min_triangle_dense, min_triangle_sparse, minplus_convolution, ConvolutionMode,
    EdgeListGraph, MetricViolation, Triangle,
};
use minplus::circuits::{
    bits_for_bound, build_adder, build_leq, build_min_general, build_min_unique, build_minplus_inner,
};
use minplus::coppersmith::{structured_multiply, Coppersmith, FieldMatrix, OpCounts, Side, StructuredFieldMatrix, F31, MERSENNE31};
use minplus::f2::{f2_multiply_counted, BitMatrix};
use minplus::fast::{measure_per_entry_accuracy, random_weight_matrix, EvalMode, FastProduct, FastProductConfig};
use minplus::minplus::{
    apsp_by_squaring, floyd_warshall, ApspResult, MinPlusProduct, NaiveProduct, ProductStats, Weight, WeightMatrix,
    MAX_INPUT,
};
use minplus::rs_poly::{build_output_bit_polynomial, RandomBits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{RunReport, Verification};
use crate::{
    ApspAlgo, BenchSuite, CircuitKind, CliError, Command, ConvolveMode, DemoAlgo, FastArgs, GenKind, Mode, Outcome,
    ProductAlgo, TableFormat, TriangleMode,
};

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Gen { kind } => gen(kind),
        Command::Apsp {
            input,
            algo,
            fast,
            verify,
        } => apsp(input, *algo, fast, *verify),
        Command::Product {
            a,
            b,
            algo,
            fast,
            verify,
            dump_poly,
        } => product(a, b, *algo, fast, *verify, dump_poly.as_deref()),
        Command::Triangle {
            input,
            mode,
            delta,
            algo,
            fast,
        } => triangle(input, *mode, *delta, *algo, fast),
        Command::Convolve { x, y, mode, algo, fast } => convolve(x, y, *mode, *algo, fast),
        Command::Metric { input, algo, fast } => metric(input, *algo, fast),
        Command::CircuitStats { kind, d, t, m } => circuit_stats(*kind, *d, *t, *m),
        Command::CoppersmithDemo { m, seed, algo } => coppersmith_demo(*m, *seed, algo),
        Command::Bench {
            suite,
            sizes,
            seed,
            d,
            timing,
            format,
        } => bench(*suite, sizes, *seed, *d, *timing, *format),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> CliResult<WeightMatrix> {
    WeightMatrix::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> CliResult<EdgeListGraph> {
    EdgeListGraph::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A matrix file (`rows cols` header) or an edge list (`n m directed`).
fn read_graph_matrix(path: &Path) -> CliResult<WeightMatrix> {
    let text = read(path)?;
    let header = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if header.split_whitespace().count() == 3 {
        Ok(EdgeListGraph::parse(&text)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?
            .adjacency())
    } else {
        WeightMatrix::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn read_vector(path: &Path) -> CliResult<Vec<Weight>> {
    let m = read_matrix(path)?;
    if m.rows() != 1 {
        return Err(usage(format!("{}: a vector is a 1×n matrix", path.display())));
    }
    Ok(m.row(0).to_vec())
}

fn fast_config(f: &FastArgs, verify: bool) -> FastProductConfig {
    let mut cfg = FastProductConfig::new(f.d, f.seed).with_verify(verify).with_mode(match f.eval {
        Mode::Direct => EvalMode::Direct,
        Mode::Expanded => EvalMode::Expanded,
    });
    cfg.reps = f.reps;
    cfg.e = f.e;
    cfg.ep = f.ep;
    cfg
}

fn strategy(algo: ProductAlgo, f: &FastArgs, verify: bool) -> CliResult<Box<dyn MinPlusProduct>> {
    if f.d == 0 {
        return Err(usage("--d must be positive"));
    }
    Ok(match algo {
        ProductAlgo::Naive => Box::new(NaiveProduct),
        ProductAlgo::Fast => Box::new(FastProduct {
            cfg: fast_config(f, verify),
        }),
    })
}

fn fast_params(r: &mut RunReport, algo: &str, f: &FastArgs) {
    r.param("algo", algo);
    if algo.contains("fast") {
        r.param("d", f.d)
            .param("reps", f.reps)
            .param("e", f.e)
            .param("ep", f.ep)
            .param("eval", format!("{:?}", f.eval).to_lowercase());
        r.seed = Some(f.seed);
    }
}

fn add_stats(r: &mut RunReport, s: &ProductStats) {
    r.count("fallbacks", s.fallbacks)
        .count("mismatches", s.mismatches)
        .count("word_ops", s.word_ops)
        .count("entries", s.entries);
}

fn first_difference(a: &WeightMatrix, b: &WeightMatrix) -> Option<(usize, usize)> {
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| a.get(i, j) != b.get(i, j))
}

fn check_probability(name: &str, p: f64) -> CliResult<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(usage(format!("{name} must lie in [0, 1]")))
    }
}

fn gen(kind: &GenKind) -> CliResult<Outcome> {
    let mut r = RunReport::new("gen");
    let output = match *kind {
        GenKind::Graph {
            n,
            density,
            max,
            undirected,
            seed,
        } => {
            check_probability("--density", density)?;
            if max > MAX_INPUT {
                return Err(usage("--max is above 2^60"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u == v || (undirected && v < u) {
                        continue;
                    }
                    if rng.gen_bool(density) {
                        edges.push((u, v, Weight::finite(rng.gen_range(0..=max))));
                    }
                }
            }
            r.param("kind", "graph")
                .param("n", n)
                .param("density", density)
                .param("max", max)
                .param("directed", !undirected)
                .count("edges", edges.len() as u64);
            r.seed = Some(seed);
            EdgeListGraph::new(n, edges, !undirected)?.to_string()
        }
        GenKind::Matrix {
            rows,
            cols,
            max,
            p_inf,
            seed,
        } => {
            check_probability("--p-inf", p_inf)?;
            if max > MAX_INPUT {
                return Err(usage("--max is above 2^60"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            r.param("kind", "matrix")
                .param("rows", rows)
                .param("cols", cols)
                .param("max", max)
                .param("p_inf", p_inf);
            r.seed = Some(seed);
            random_weight_matrix(&mut rng, rows, cols, max, p_inf).to_string()
        }
        GenKind::Vector { n, max, p_inf, seed } => {
            check_probability("--p-inf", p_inf)?;
            if max > MAX_INPUT {
                return Err(usage("--max is above 2^60"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            r.param("kind", "vector").param("n", n).param("max", max).param("p_inf", p_inf);
            r.seed = Some(seed);
            random_weight_matrix(&mut rng, 1, n, max, p_inf).to_string()
        }
    };
    Ok(Outcome {
        output,
        report: r,
        mismatch: None,
    })
}

fn run_apsp(w: &WeightMatrix, algo: ApspAlgo, f: &FastArgs, verify: bool) -> CliResult<ApspResult> {
    Ok(match algo {
        ApspAlgo::Fw => floyd_warshall(w)?,
        ApspAlgo::SquaringNaive => apsp_by_squaring(w, &NaiveProduct)?,
        ApspAlgo::SquaringFast => {
            if f.d == 0 {
                return Err(usage("--d must be positive"));
            }
            apsp_by_squaring(
                w,
                &FastProduct {
                    cfg: fast_config(f, verify),
                },
            )?
        }
    })
}

fn apsp(input: &Path, algo: ApspAlgo, f: &FastArgs, verify: bool) -> CliResult<Outcome> {
    let w = read_graph_matrix(input)?;
    let name = match algo {
        ApspAlgo::Fw => "fw",
        ApspAlgo::SquaringNaive => "squaring-naive",
        ApspAlgo::SquaringFast => "squaring-fast",
    };
    let mut r = RunReport::new("apsp");
    fast_params(&mut r, name, f);
    r.param("n", w.rows()).param("verify", verify);
    let res = run_apsp(&w, algo, f, verify)?;
    add_stats(&mut r, &res.stats);
    r.count("squarings", res.squarings as u64);
    let mut mismatch = None;
    if verify {
        // an independent route: squaring for Floyd–Warshall, Floyd–Warshall otherwise
        let reference = match algo {
            ApspAlgo::Fw => apsp_by_squaring(&w, &NaiveProduct)?,
            _ => floyd_warshall(&w)?,
        };
        match first_difference(&res.distances, &reference.distances) {
            Some((i, j)) => {
                mismatch = Some(format!(
                    "cell ({i}, {j}): got {}, expected {}",
                    res.distances.get(i, j),
                    reference.distances.get(i, j)
                ))
            }
            None => r.verification = Verification::Verified,
        }
    }
    Ok(Outcome {
        output: res.distances.to_string(),
        report: r,
        mismatch,
    })
}

fn product(
    a: &Path,
    b: &Path,
    algo: ProductAlgo,
    f: &FastArgs,
    verify: bool,
    dump_poly: Option<&Path>,
) -> CliResult<Outcome> {
    let a = read_matrix(a)?;
    let b = read_matrix(b)?;
    let mut r = RunReport::new("product");
    fast_params(
        &mut r,
        match algo {
            ProductAlgo::Naive => "naive",
            ProductAlgo::Fast => "fast",
        },
        f,
    );
    r.param("shape", [a.rows(), a.cols(), b.cols()]).param("verify", verify);
    if let Some(path) = dump_poly {
        let cfg = fast_config(f, false);
        let params = cfg.params_for(a.rows().max(1), b.cols().max(1))?;
        let bits = RandomBits::derive(&params, 0, 0, 0);
        let poly = build_output_bit_polynomial(&bits, cfg.monomial_cap)?;
        let header = format!(
            "d={} t={} e={} ep={} seed={} block=0 rep=0 bit=0 terms={}",
            params.d,
            params.t,
            params.e,
            params.ep,
            params.seed,
            poly.num_terms()
        );
        std::fs::write(path, poly.to_text(&header))?;
        r.count("poly_terms", poly.num_terms() as u64);
    }
    let p = strategy(algo, f, false)?.product(&a, &b)?;
    add_stats(&mut r, &p.stats);
    let mut mismatch = None;
    if verify {
        let (want, _) = minplus::minplus::minplus_product_naive(&a, &b)?;
        match first_difference(&p.values, &want) {
            Some((i, j)) => {
                mismatch = Some(format!(
                    "cell ({i}, {j}): got {}, expected {}",
                    p.values.get(i, j),
                    want.get(i, j)
                ))
            }
            None => r.verification = Verification::Verified,
        }
    }
    Ok(Outcome {
        output: p.values.to_string(),
        report: r,
        mismatch,
    })
}

fn triangle_line(t: Option<Triangle>) -> String {
    match t {
        Some(t) => format!("triangle {} {} {} weight {}\n", t.u, t.v, t.w, t.weight),
        None => "none\n".to_string(),
    }
}

fn triangle(
    input: &Path,
    mode: TriangleMode,
    delta: Option<usize>,
    algo: ProductAlgo,
    f: &FastArgs,
) -> CliResult<Outcome> {
    let g = read_graph(input)?;
    let p = strategy(algo, f, false)?;
    let delta = delta.unwrap_or_else(|| default_delta(g.edges.len()));
    let mut r = RunReport::new("triangle");
    fast_params(&mut r, p.name(), f);
    r.param("mode", format!("{mode:?}").to_lowercase())
        .param("n", g.n)
        .param("m", g.edges.len());
    let mut output = String::new();
    let mut mismatch = None;
    let dense = if mode != TriangleMode::Sparse {
        let t = min_triangle_dense(&g, p.as_ref())?;
        output.push_str(&triangle_line(t));
        Some(t)
    } else {
        None
    };
    if mode != TriangleMode::Dense {
        r.param("delta", delta);
        let t = min_triangle_sparse(&g, delta, p.as_ref())?;
        if let Some(d) = dense {
            if d.map(|x| x.weight) != t.map(|x| x.weight) {
                mismatch = Some(format!(
                    "dense weight {:?} but sparse weight {:?}",
                    d.map(|x| x.weight.to_string()),
                    t.map(|x| x.weight.to_string())
                ));
            } else {
                r.verification = Verification::Verified;
            }
        } else {
            output.push_str(&triangle_line(t));
        }
    }
    Ok(Outcome {
        output,
        report: r,
        mismatch,
    })
}

fn vector_text(v: &[Weight]) -> String {
    WeightMatrix::from_vec(1, v.len(), v.to_vec()).expect("shape").to_string()
}

fn convolve(x: &Path, y: &Path, mode: ConvolveMode, algo: ProductAlgo, f: &FastArgs) -> CliResult<Outcome> {
    let x = read_vector(x)?;
    let y = read_vector(y)?;
    let p = strategy(algo, f, false)?;
    let mut r = RunReport::new("convolve");
    fast_params(&mut r, p.name(), f);
    r.param("mode", format!("{mode:?}").to_lowercase()).param("n", x.len());
    let primary = match mode {
        ConvolveMode::Naive | ConvolveMode::Both => ConvolutionMode::Naive,
        ConvolveMode::Blocked => ConvolutionMode::Blocked,
    };
    let out = minplus_convolution(&x, &y, primary, p.as_ref())?;
    let mut mismatch = None;
    if mode == ConvolveMode::Both {
        let blocked = minplus_convolution(&x, &y, ConvolutionMode::Blocked, p.as_ref())?;
        match out.iter().zip(&blocked).position(|(a, b)| a != b) {
            Some(i) => mismatch = Some(format!("index {i}: naive {}, blocked {}", out[i], blocked[i])),
            None => r.verification = Verification::Verified,
        }
    }
    Ok(Outcome {
        output: vector_text(&out),
        report: r,
        mismatch,
    })
}

fn metric(input: &Path, algo: ProductAlgo, f: &FastArgs) -> CliResult<Outcome> {
    let d = read_matrix(input)?;
    let p = strategy(algo, f, false)?;
    let mut r = RunReport::new("metric");
    fast_params(&mut r, p.name(), f);
    r.param("n", d.rows());
    let output = match is_metric(&d, p.as_ref())? {
        None => "yes\n".to_string(),
        Some(v) => {
            let at = match v {
                MetricViolation::NonzeroDiagonal(i) => format!("{i}"),
                MetricViolation::NotPositive(i, j)
                | MetricViolation::Infinite(i, j)
                | MetricViolation::Asymmetric(i, j) => format!("{i} {j}"),
                MetricViolation::Triangle(i, k, j) => format!("{i} {k} {j}"),
            };
            format!("no {} {at}\n", v.property())
        }
    };
    Ok(Outcome {
        output,
        report: r,
        mismatch: None,
    })
}

fn circuit_stats(kind: CircuitKind, d: usize, t: usize, m: u64) -> CliResult<Outcome> {
    let c = match kind {
        CircuitKind::Adder => build_adder(t)?,
        CircuitKind::Leq => build_leq(t)?,
        CircuitKind::MinUnique => build_min_unique(d, t)?,
        CircuitKind::MinGeneral => build_min_general(d, t)?,
        CircuitKind::Inner => build_minplus_inner(d, m)?,
    };
    let name = format!("{kind:?}").to_lowercase();
    let mut r = RunReport::new("circuit-stats");
    r.param("kind", &name);
    let t = if kind == CircuitKind::Inner { bits_for_bound(m) } else { t };
    match kind {
        CircuitKind::Adder | CircuitKind::Leq => {
            r.param("t", t);
        }
        CircuitKind::MinUnique | CircuitKind::MinGeneral => {
            r.param("d", d).param("t", t);
        }
        CircuitKind::Inner => {
            r.param("d", d).param("m", m).param("t", t);
        }
    }
    let s = c.stats();
    let mut out = String::new();
    for (k, v) in [
        ("inputs", s.inputs),
        ("outputs", s.outputs),
        ("size", s.size),
        ("depth", s.depth),
        ("and", s.and),
        ("or", s.or),
        ("not", s.not),
        ("xor", s.xor),
        ("wires", s.wires),
    ] {
        let _ = writeln!(out, "{k} {v}");
        r.count(k, v as u64);
    }
    Ok(Outcome {
        output: out,
        report: r,
        mismatch: None,
    })
}

fn field_text(m: &FieldMatrix<MERSENNE31>) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).value().to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn random_structured(rng: &mut ChaCha8Rng, side: Side, m: usize) -> StructuredFieldMatrix<MERSENNE31> {
    let mut s = StructuredFieldMatrix::zeros(side, m);
    for e in &mut s.entries {
        *e = F31::random(rng);
    }
    s
}

fn coppersmith_demo(m: usize, seed: u64, algos: &[DemoAlgo]) -> CliResult<Outcome> {
    if m == 0 || m > 10 {
        return Err(usage("--m must lie in 1..=10"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = RunReport::new("coppersmith-demo");
    r.param("m", m)
        .param("algo", algos.iter().map(|a| format!("{a:?}").to_lowercase()).collect::<Vec<_>>());
    r.seed = Some(seed);
    let mut out = String::new();
    let mut failures = Vec::new();
    let needs_ctx = algos.iter().any(|a| *a != DemoAlgo::Structured);
    let ctx = if needs_ctx {
        Some(Coppersmith::<MERSENNE31>::new(m)?)
    } else {
        None
    };
    for &algo in algos {
        let name = format!("{algo:?}").to_lowercase();
        let mut counts = OpCounts::default();
        let (got, want, extra) = match algo {
            DemoAlgo::Structured => {
                let a = random_structured(&mut rng, Side::A, m);
                let b = random_structured(&mut rng, Side::B, m);
                let got = structured_multiply(&a, &b, &mut counts)?;
                let want = a.to_dense().mul_naive(&b.to_dense())?;
                (got, want, 0)
            }
            DemoAlgo::Algorithm1 => {
                let c = ctx.as_ref().expect("context");
                let a = FieldMatrix::random(&mut rng, c.s_a(), c.n_cols());
                let b = FieldMatrix::random(&mut rng, c.n_cols(), c.s_b());
                (c.algorithm1(&a, &b, &mut counts)?, a.mul_naive(&b)?, c.setup_mults())
            }
            DemoAlgo::Algorithm2 => {
                let c = ctx.as_ref().expect("context");
                let b = FieldMatrix::random(&mut rng, c.n_cols(), c.s_b());
                let cc = FieldMatrix::random(&mut rng, c.s_b(), c.s_a());
                (c.algorithm2(&b, &cc, &mut counts)?, b.mul_naive(&cc)?, c.setup_mults())
            }
            DemoAlgo::Algorithm3 => {
                let c = ctx.as_ref().expect("context");
                let x = FieldMatrix::random(&mut rng, c.s_a(), c.s_b());
                let y = FieldMatrix::random(&mut rng, c.s_b(), c.n_cols());
                (c.algorithm3(&x, &y, &mut counts)?, x.mul_naive(&y)?, c.setup_mults())
            }
            DemoAlgo::Tensored => {
                let c = ctx.as_ref().expect("context");
                let (sa, sb, n) = (c.s_a(), c.s_b(), c.n_cols());
                let p = FieldMatrix::random(&mut rng, n * sa, sb * sb);
                let q = FieldMatrix::random(&mut rng, sb * sb, sa * n);
                let res = c.tensored_multiply(&p, &q)?;
                counts.merge(res.outer);
                counts.merge(res.inner);
                (res.product, p.mul_naive(&q)?, c.setup_mults())
            }
        };
        let ok = got == want;
        if !ok {
            failures.push(name.clone());
        }
        let _ = writeln!(
            out,
            "{name} {}x{} match={ok} leaf_products={} field_mults={} setup_mults={extra} checksum={}",
            got.rows(),
            got.cols(),
            counts.leaf_products,
            counts.field_mults,
            &crate::report::checksum(field_text(&got).as_bytes())[..16],
        );
        r.count(&format!("{name}_leaf_products"), counts.leaf_products)
            .count(&format!("{name}_field_mults"), counts.field_mults + extra);
    }
    let mismatch = if failures.is_empty() {
        r.verification = Verification::Verified;
        None
    } else {
        Some(format!("differs from the naive product: {}", failures.join(", ")))
    };
    Ok(Outcome {
        output: out,
        report: r,
        mismatch,
    })
}

/// Table with a fixed column list; rows are JSON objects.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Value>,
}

impl Table {
    fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Json => {
                let mut s = serde_json::to_string_pretty(&json!({"schema": 1, "columns": self.columns, "rows": self.rows}))
                    .expect("table serializes");
                s.push('\n');
                s
            }
            TableFormat::Text => {
                let mut s = self.columns.join("\t");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = self
                        .columns
                        .iter()
                        .map(|c| match &row[*c] {
                            Value::String(v) => v.clone(),
                            Value::Number(n) if n.is_f64() => format!("{:.4}", n.as_f64().unwrap()),
                            Value::Null => "-".to_string(),
                            v => v.to_string(),
                        })
                        .collect();
                    s.push_str(&cells.join("\t"));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn timed<T>(timing: bool, row: &mut Value, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    if timing {
        row["ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    out
}

fn bench(suite: BenchSuite, sizes: &[usize], seed: u64, d: usize, timing: bool, format: TableFormat) -> CliResult<Outcome> {
    let mut r = RunReport::new("bench");
    r.param("suite", format!("{suite:?}").to_lowercase());
    r.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = match suite {
        BenchSuite::F2 => {
            let sizes = if sizes.is_empty() { vec![64, 128, 256] } else { sizes.to_vec() };
            let mut rows = Vec::new();
            for &n in &sizes {
                let x = BitMatrix::from_fn(n, n, |_, _| rng.gen());
                let y = BitMatrix::from_fn(n, n, |_, _| rng.gen());
                let mut row = json!({"n": n, "m": n});
                let (_, ops) = timed(timing, &mut row, || f2_multiply_counted(&x, &y))?;
                let expected = (n * n.div_ceil(64) * n) as u64;
                row["word_ops"] = json!(ops);
                row["expected"] = json!(expected);
                row["ratio"] = json!(ops as f64 / expected.max(1) as f64);
                rows.push(row);
            }
            Table {
                columns: vec!["n", "m", "word_ops", "expected", "ratio"],
                rows,
            }
        }
        BenchSuite::Coppersmith => {
            let sizes = if sizes.is_empty() { vec![1, 2, 3, 5] } else { sizes.to_vec() };
            let mut rows = Vec::new();
            for &m in &sizes {
                if m == 0 || m > 10 {
                    return Err(usage("coppersmith sizes must lie in 1..=10"));
                }
                let a = random_structured(&mut rng, Side::A, m);
                let b = random_structured(&mut rng, Side::B, m);
                let mut counts = OpCounts::default();
                let mut row = json!({"m": m});
                timed(timing, &mut row, || structured_multiply(&a, &b, &mut counts))?;
                let five = 5u64.pow(m as u32);
                row["leaf_products"] = json!(counts.leaf_products);
                row["five_pow_m"] = json!(five);
                row["structured_mults"] = json!(counts.field_mults);
                row["alg1_mults"] = Value::Null;
                row["c"] = Value::Null;
                if m % 5 == 0 {
                    let ctx = Coppersmith::<MERSENNE31>::new(m)?;
                    let ain = FieldMatrix::random(&mut rng, ctx.s_a(), ctx.n_cols());
                    let bin = FieldMatrix::random(&mut rng, ctx.n_cols(), ctx.s_b());
                    let mut c1 = OpCounts::default();
                    ctx.algorithm1(&ain, &bin, &mut c1)?;
                    let total = c1.field_mults + ctx.setup_mults();
                    row["alg1_mults"] = json!(total);
                    row["c"] = json!(total as f64 / (five as f64 * (m * m) as f64));
                }
                rows.push(row);
            }
            Table {
                columns: vec!["m", "leaf_products", "five_pow_m", "structured_mults", "alg1_mults", "c"],
                rows,
            }
        }
        BenchSuite::Accuracy => {
            let sizes = if sizes.is_empty() { vec![64] } else { sizes.to_vec() };
            let mut rows = Vec::new();
            for &n in &sizes {
                let a = random_weight_matrix(&mut rng, n, d, 1000, 0.0);
                let b = random_weight_matrix(&mut rng, d, n, 1000, 0.0);
                let cfg = FastProductConfig::new(d, seed);
                let p = cfg.params_for(n, n)?;
                let mut row = json!({"n": n, "d": d, "e": p.e, "ep": p.ep});
                let rep = timed(timing, &mut row, || measure_per_entry_accuracy(&a, &b, &cfg, 4, 10_000, seed))?;
                let threshold = 0.75 - 3.0 * rep.sigma;
                row["samples"] = json!(rep.samples);
                row["rate"] = json!(rep.rate);
                row["sigma"] = json!(rep.sigma);
                row["threshold"] = json!(threshold);
                row["pass"] = json!(rep.rate >= threshold);
                rows.push(row);
            }
            Table {
                columns: vec!["n", "d", "e", "ep", "samples", "rate", "sigma", "threshold", "pass"],
                rows,
            }
        }
        BenchSuite::Apsp => {
            let sizes = if sizes.is_empty() { vec![16, 32] } else { sizes.to_vec() };
            let fast = FastArgs {
                d,
                reps: None,
                e: None,
                ep: None,
                eval: Mode::Direct,
                seed,
            };
            let mut rows = Vec::new();
            for &n in &sizes {
                let w = random_weight_matrix(&mut rng, n, n, 100, 0.5);
                let reference = floyd_warshall(&w)?;
                for (name, algo) in [
                    ("fw", ApspAlgo::Fw),
                    ("squaring-naive", ApspAlgo::SquaringNaive),
                    ("squaring-fast", ApspAlgo::SquaringFast),
                ] {
                    let mut row = json!({"n": n, "algo": name});
                    let res = timed(timing, &mut row, || run_apsp(&w, algo, &fast, true))?;
                    row["squarings"] = json!(res.squarings);
                    row["word_ops"] = json!(res.stats.word_ops);
                    row["fallbacks"] = json!(res.stats.fallbacks);
                    row["agrees"] = json!(res.distances == reference.distances);
                    rows.push(row);
                }
            }
            Table {
                columns: vec!["n", "algo", "squarings", "word_ops", "fallbacks", "agrees"],
                rows,
            }
        }
    };
    if timing {
        table.columns.push("ms");
    }
    r.param("sizes", sizes).param("d", d).param("timing", timing);
    Ok(Outcome {
        output: table.render(format),
        report: r,
        mismatch: None,
    })
}
