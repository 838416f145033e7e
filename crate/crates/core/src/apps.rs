//! Consumers of the min-plus product: metricity, minimum-weight triangles
//! and min-plus convolution.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minplus::{MinPlusProduct, Weight, WeightMatrix};

/// Weighted graph as an edge list. Undirected edges are stored once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeListGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, Weight)>,
    pub directed: bool,
}

impl EdgeListGraph {
    /// Checks node ranges and weight finiteness.
    pub fn new(n: usize, edges: Vec<(usize, usize, Weight)>, directed: bool) -> Result<Self> {
        for &(u, v, w) in &edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::OutOfRange { index: x, size: n });
                }
            }
            if w.is_inf() {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) has infinite weight")));
            }
        }
        Ok(EdgeListGraph { n, edges, directed })
    }

    pub fn has_self_loops(&self) -> bool {
        self.edges.iter().any(|&(u, v, _)| u == v)
    }

    /// Adjacency matrix with `∞` for absent edges, including the diagonal.
    /// Parallel edges keep the lightest weight.
    pub fn adjacency(&self) -> WeightMatrix {
        let mut m = WeightMatrix::infinite(self.n, self.n);
        for &(u, v, w) in &self.edges {
            if w < m.get(u, v) {
                m.set(u, v, w);
            }
            if !self.directed && w < m.get(v, u) {
                m.set(v, u, w);
            }
        }
        m
    }

    /// Parses `n m directed` (directed is `0`/`1`/`true`/`false`) followed by
    /// `m` lines `u v w`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(perr(hl, "header must be `n m directed`".into()));
        }
        let n: usize = h[0].parse().map_err(|_| perr(hl, format!("bad node count {:?}", h[0])))?;
        let m: usize = h[1].parse().map_err(|_| perr(hl, format!("bad edge count {:?}", h[1])))?;
        let directed = match h[2] {
            "1" | "true" | "directed" => true,
            "0" | "false" | "undirected" => false,
            other => return Err(perr(hl, format!("bad directed flag {other:?}"))),
        };
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {m} edges"),
            })?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(perr(ln, "edge must be `u v w`".into()));
            }
            let node = |s: &str| s.parse::<usize>().map_err(|_| perr(ln, format!("bad node {s:?}")));
            let (u, v) = (node(t[0])?, node(t[1])?);
            let w: Weight = t[2].parse().map_err(|_| perr(ln, format!("bad weight {:?}", t[2])))?;
            if w.is_inf() {
                return Err(perr(ln, "INF is not allowed as an edge weight".into()));
            }
            if u >= n || v >= n {
                return Err(perr(ln, format!("node out of range for n = {n}")));
            }
            edges.push((u, v, w));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing data".into()));
        }
        Self::new(n, edges, directed)
    }
}

impl fmt::Display for EdgeListGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.n, self.edges.len(), self.directed as u8)?;
        for (u, v, w) in &self.edges {
            writeln!(f, "{u} {v} {w}")?;
        }
        Ok(())
    }
}

/// Why a matrix fails to be a metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricViolation {
    NonzeroDiagonal(usize),
    /// Off-diagonal zero.
    NotPositive(usize, usize),
    Infinite(usize, usize),
    Asymmetric(usize, usize),
    /// `D[i][j] > D[i][k] + D[k][j]`, reported as `(i, k, j)`.
    Triangle(usize, usize, usize),
}

impl MetricViolation {
    pub fn property(&self) -> &'static str {
        match self {
            MetricViolation::NonzeroDiagonal(_) => "zero-diagonal",
            MetricViolation::NotPositive(..) => "positivity",
            MetricViolation::Infinite(..) => "finiteness",
            MetricViolation::Asymmetric(..) => "symmetry",
            MetricViolation::Triangle(..) => "triangle-inequality",
        }
    }
}

/// `Ok(None)` when `d` is a metric, otherwise the first violation found.
/// Properties are checked in the order of [`MetricViolation`]; cells are
/// scanned row-major and the triangle check reports the smallest `k`.
pub fn is_metric(d: &WeightMatrix, product: &dyn MinPlusProduct) -> Result<Option<MetricViolation>> {
    if !d.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", d.rows(), d.cols())));
    }
    let n = d.rows();
    if let Some(i) = (0..n).find(|&i| d.get(i, i) != Weight::ZERO) {
        return Ok(Some(MetricViolation::NonzeroDiagonal(i)));
    }
    let cells = || (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j);
    if let Some((i, j)) = cells().find(|&(i, j)| d.get(i, j) == Weight::ZERO) {
        return Ok(Some(MetricViolation::NotPositive(i, j)));
    }
    if let Some((i, j)) = cells().find(|&(i, j)| d.get(i, j).is_inf()) {
        return Ok(Some(MetricViolation::Infinite(i, j)));
    }
    if let Some((i, j)) = cells().find(|&(i, j)| d.get(i, j) != d.get(j, i)) {
        return Ok(Some(MetricViolation::Asymmetric(i, j)));
    }
    let sq = product.product(d, d)?;
    for (i, j) in cells() {
        if sq.values.get(i, j) < d.get(i, j) {
            if let Some(k) = sq.witness.get(i, j) {
                if d.get(i, k).checked_add(d.get(k, j))? < d.get(i, j) {
                    return Ok(Some(MetricViolation::Triangle(i, k, j)));
                }
            }
            // the reported witness does not confirm; find one directly
            if let Some(k) = (0..n).find(|&k| d.get(i, k).checked_add(d.get(k, j)).is_ok_and(|s| s < d.get(i, j))) {
                return Ok(Some(MetricViolation::Triangle(i, k, j)));
            }
        }
    }
    Ok(None)
}

/// A triangle `u → v → w → u` (any orientation when undirected).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub u: usize,
    pub v: usize,
    pub w: usize,
    pub weight: Weight,
}

fn reject_self_loops(g: &EdgeListGraph) -> Result<()> {
    if let Some(&(u, _, _)) = g.edges.iter().find(|&&(u, v, _)| u == v) {
        return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
    }
    Ok(())
}

/// Minimum-weight triangle in the subgraph induced by `nodes`, through one
/// product `W ⋆ W` of the adjacency matrix and a scan for the closing edge.
fn dense_on(adj: &WeightMatrix, nodes: &[usize], product: &dyn MinPlusProduct) -> Result<Option<Triangle>> {
    let k = nodes.len();
    if k < 3 {
        return Ok(None);
    }
    let mut w = WeightMatrix::infinite(k, k);
    for (a, &x) in nodes.iter().enumerate() {
        for (b, &y) in nodes.iter().enumerate() {
            w.set(a, b, adj.get(x, y));
        }
    }
    let two = product.product(&w, &w)?;
    let mut best: Option<Triangle> = None;
    for i in 0..k {
        for j in 0..k {
            let close = w.get(j, i);
            let path = two.values.get(i, j);
            if i == j || close.is_inf() || path.is_inf() {
                continue;
            }
            let total = path.checked_add(close)?;
            if best.is_some_and(|b| total >= b.weight) {
                continue;
            }
            // confirm the middle node against the actual edges
            let Some(m) = two.witness.get(i, j) else { continue };
            if m == i || m == j || w.get(i, m).checked_add(w.get(m, j))? != path {
                continue;
            }
            best = Some(Triangle {
                u: nodes[i],
                v: nodes[m],
                w: nodes[j],
                weight: total,
            });
        }
    }
    Ok(best)
}

/// Minimum-weight triangle via one min-plus product over all nodes.
pub fn min_triangle_dense(g: &EdgeListGraph, product: &dyn MinPlusProduct) -> Result<Option<Triangle>> {
    reject_self_loops(g)?;
    let nodes: Vec<usize> = (0..g.n).collect();
    dense_on(&g.adjacency(), &nodes, product)
}

/// Default degree threshold `⌈√m⌉`.
pub fn default_delta(m: usize) -> usize {
    ((m as f64).sqrt().ceil() as usize).max(1)
}

/// Minimum-weight triangle by the degree split: triangles through a node of
/// degree at most `delta` are found by scanning its neighbour pairs, the
/// rest by a dense search on the high-degree nodes.
pub fn min_triangle_sparse(
    g: &EdgeListGraph,
    delta: usize,
    product: &dyn MinPlusProduct,
) -> Result<Option<Triangle>> {
    if delta == 0 {
        return Err(Error::InvalidParameter("delta must be at least 1".into()));
    }
    reject_self_loops(g)?;
    let adj = g.adjacency();
    let n = g.n;
    // out[v]: (x, w) with v → x; inn[v]: (x, w) with x → v
    let mut out: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); n];
    let mut inn: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in 0..n {
            let w = adj.get(u, v);
            if w.is_finite() {
                out[u].push((v, w));
                inn[v].push((u, w));
            }
        }
    }
    let degree = |v: usize| {
        if g.directed {
            out[v].len() + inn[v].len()
        } else {
            out[v].len()
        }
    };
    let low: Vec<usize> = (0..n).filter(|&v| degree(v) <= delta).collect();
    let high: Vec<usize> = (0..n).filter(|&v| degree(v) > delta).collect();

    let case1 = low
        .par_iter()
        .map(|&v| -> Result<Option<Triangle>> {
            let mut best: Option<Triangle> = None;
            for &(a, wa) in &inn[v] {
                for &(b, wb) in &out[v] {
                    let close = adj.get(b, a);
                    if a == b || close.is_inf() {
                        continue;
                    }
                    let total = wa.checked_add(wb)?.checked_add(close)?;
                    if best.map_or(true, |t| total < t.weight) {
                        best = Some(Triangle { u: a, v, w: b, weight: total });
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = case1.into_iter().flatten().min_by_key(|t| t.weight);
    if let Some(t) = dense_on(&adj, &high, product)? {
        if best.map_or(true, |b| t.weight < b.weight) {
            best = Some(t);
        }
    }
    Ok(best)
}

/// All-triples minimum, for checking.
pub fn min_triangle_brute(g: &EdgeListGraph) -> Option<Weight> {
    let adj = g.adjacency();
    let n = g.n;
    let mut best: Option<Weight> = None;
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                if u == v || v == w || u == w {
                    continue;
                }
                let s = [adj.get(u, v), adj.get(v, w), adj.get(w, u)];
                if s.iter().any(|x| x.is_inf()) {
                    continue;
                }
                let t = Weight::finite(s.iter().map(|x| x.value().unwrap()).sum());
                best = Some(best.map_or(t, |b| b.min(t)));
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionMode {
    Naive,
    Blocked,
}

/// `(x ⊙ y)[i] = min_{k + j = i} x[k] + y[j]` for `i` in `0..2n−1`.
pub fn minplus_convolution(
    x: &[Weight],
    y: &[Weight],
    mode: ConvolutionMode,
    product: &dyn MinPlusProduct,
) -> Result<Vec<Weight>> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!("lengths {} and {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Ok(Vec::new());
    }
    match mode {
        ConvolutionMode::Naive => convolve_naive(x, y),
        ConvolutionMode::Blocked => convolve_blocked(x, y, product),
    }
}

fn convolve_naive(x: &[Weight], y: &[Weight]) -> Result<Vec<Weight>> {
    let n = x.len();
    let mut out = vec![Weight::INF; 2 * n - 1];
    for (k, &a) in x.iter().enumerate() {
        if a.is_inf() {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            let s = a.checked_add(b)?;
            if s < out[k + j] {
                out[k + j] = s;
            }
        }
    }
    Ok(out)
}

/// Splits both vectors into blocks of `b = ⌈√n⌉`. With `X[p][s] = x[pb + s]`
/// and the Toeplitz matrix `T_q[s][o] = y[qb + o − s]`, the product
/// `X ⋆ T_q` holds at `(p, o)` the contribution of block pair `(p, q)` to
/// output index `(p + q)b + o`.
fn convolve_blocked(x: &[Weight], y: &[Weight], product: &dyn MinPlusProduct) -> Result<Vec<Weight>> {
    let n = x.len();
    let b = (n as f64).sqrt().ceil() as usize;
    let nb = n.div_ceil(b);
    let at = |v: &[Weight], i: usize| v.get(i).copied().unwrap_or(Weight::INF);
    let xm = WeightMatrix::from_vec(nb, b, (0..nb * b).map(|i| at(x, i)).collect())?;
    let mut out = vec![Weight::INF; 2 * nb * b];
    for q in 0..nb {
        let t = WeightMatrix::from_vec(
            b,
            2 * b - 1,
            (0..b)
                .flat_map(|s| (0..2 * b - 1).map(move |o| (s, o)))
                .map(|(s, o)| if o >= s && o - s < b { at(y, q * b + o - s) } else { Weight::INF })
                .collect(),
        )?;
        let prod = product.product(&xm, &t)?;
        for p in 0..nb {
            for o in 0..2 * b - 1 {
                let v = prod.values.get(p, o);
                let idx = (p + q) * b + o;
                if v < out[idx] {
                    out[idx] = v;
                }
            }
        }
    }
    out.truncate(2 * n - 1);
    Ok(out)
}
