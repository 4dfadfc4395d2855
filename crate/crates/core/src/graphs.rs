//! Directed graphs of exchange matrices, weighted diagrams, classification of
//! mutation classes, and exploration of exchange graphs.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poly::LaurentPoly;
use crate::seeds::{ExchangeMatrix, Matrix, Seed, SeedError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("no skew-symmetrizable matrix realizes the diagram")]
    UnrealizableDiagram,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error(transparent)]
    Seed(#[from] SeedError),
}

/// Directed graph with an edge `i -> j` whenever `b_ij > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SignGraph {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph gamma {\n");
        for v in 0..self.n {
            s.push_str(&format!("  {};\n", v + 1));
        }
        for &(i, j) in &self.edges {
            s.push_str(&format!("  {} -> {};\n", i + 1, j + 1));
        }
        s.push_str("}\n");
        s
    }
}

pub fn gamma(b: &ExchangeMatrix) -> SignGraph {
    let n = b.n();
    let edges = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| b.entry(i, j).is_positive())
        .collect();
    SignGraph { n, edges }
}

/// Order of the vertices listing sinks first, if the graph has no oriented cycle.
fn sink_first_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut out_degree = vec![0usize; n];
    let mut preds = vec![Vec::new(); n];
    for &(i, j) in edges {
        out_degree[i] += 1;
        preds[j].push(i);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| out_degree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &p in &preds[v] {
            out_degree[p] -= 1;
            if out_degree[p] == 0 {
                queue.push_back(p);
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub fn is_acyclic(b: &ExchangeMatrix) -> bool {
    acyclic_order(b).is_some()
}

/// A permutation `sigma` (new index `i` is old `sigma[i]`) with
/// `b_{sigma(i), sigma(j)} >= 0` for `i > j`, if one exists.
pub fn acyclic_order(b: &ExchangeMatrix) -> Option<Vec<usize>> {
    let g = gamma(b);
    sink_first_order(g.n, &g.edges)
}

/// Directed graph of an exchange matrix with edge weights `|b_ij b_ji|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Diagram {
    n: usize,
    /// `weights[i][j] > 0` iff there is an edge `i -> j`.
    weights: Vec<Vec<u64>>,
}

impl Diagram {
    /// Builds a diagram from weighted directed edges on 0-based vertices.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self, GraphError> {
        let mut weights = vec![vec![0; n]; n];
        for &(i, j, w) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if i == j || w == 0 || weights[j][i] > 0 {
                return Err(GraphError::UnrealizableDiagram);
            }
            weights[i][j] = w;
        }
        Ok(Diagram { n, weights })
    }

    pub fn of_matrix(b: &ExchangeMatrix) -> Self {
        let n = b.n();
        let weights = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if b.entry(i, j).is_positive() {
                            (b.entry(i, j) * b.entry(j, i)).abs().to_u64().unwrap_or(u64::MAX)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Diagram { n, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i][j]
    }

    /// Weighted edges `(from, to, weight)` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.weights[i][j] > 0 {
                    out.push((i, j, self.weights[i][j]));
                }
            }
        }
        out
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph diagram {\n");
        for v in 0..self.n {
            s.push_str(&format!("  {};\n", v + 1));
        }
        for (i, j, w) in self.edges() {
            s.push_str(&format!("  {} -> {} [label=\"{w}\"];\n", i + 1, j + 1));
        }
        s.push_str("}\n");
        s
    }

    fn signed(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.weights[i][j] as i64 - self.weights[j][i] as i64).collect())
            .collect()
    }

    pub fn canonical_form(&self) -> CanonicalDiagram {
        canonical_form(&self.signed())
    }

    /// A skew-symmetrizable matrix with this diagram.
    pub fn realize(&self) -> Result<ExchangeMatrix, GraphError> {
        realize(self)
    }
}

fn divisors(w: u64) -> Vec<u64> {
    (1..=w).filter(|a| w.is_multiple_of(*a)).collect()
}

fn realize(d: &Diagram) -> Result<ExchangeMatrix, GraphError> {
    let n = d.n;
    // Edges in breadth-first order so that every edge after the first of a
    // component touches a vertex whose symmetrizer entry is already fixed.
    let mut adjacency = vec![Vec::new(); n];
    for (i, j, w) in d.edges() {
        adjacency[i].push((i, j, w));
        adjacency[j].push((i, j, w));
    }
    let mut seen_vertex = vec![false; n];
    let mut seen_edge = HashSet::new();
    let mut ordered = Vec::new();
    for root in 0..n {
        if seen_vertex[root] {
            continue;
        }
        seen_vertex[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(i, j, w) in &adjacency[v] {
                if seen_edge.insert((i, j)) {
                    ordered.push((i, j, w));
                }
                let other = if i == v { j } else { i };
                if !seen_vertex[other] {
                    seen_vertex[other] = true;
                    queue.push_back(other);
                }
            }
        }
    }
    let mut sym: Vec<Option<BigRational>> = vec![None; n];
    let mut choice = vec![0u64; ordered.len()];
    if !assign(&ordered, 0, &mut sym, &mut choice) {
        return Err(GraphError::UnrealizableDiagram);
    }
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    for (&(i, j, w), &a) in ordered.iter().zip(&choice) {
        rows[i][j] = BigInt::from(a);
        rows[j][i] = -BigInt::from(w / a);
    }
    Ok(ExchangeMatrix::square(rows)?)
}

/// Chooses `b_ij = a`, `b_ji = -w/a` edge by edge so that `d_j / d_i = a^2 / w`
/// stays consistent.
fn assign(edges: &[(usize, usize, u64)], at: usize, sym: &mut Vec<Option<BigRational>>, choice: &mut [u64]) -> bool {
    let Some(&(i, j, w)) = edges.get(at) else {
        return true;
    };
    for a in divisors(w) {
        let ratio = BigRational::new(BigInt::from(a * a), BigInt::from(w));
        let saved = (sym[i].clone(), sym[j].clone());
        let ok = match (&sym[i], &sym[j]) {
            (Some(di), Some(dj)) => dj == &(di * &ratio),
            (Some(di), None) => {
                sym[j] = Some(di * &ratio);
                true
            }
            (None, Some(dj)) => {
                sym[i] = Some(dj / &ratio);
                true
            }
            (None, None) => {
                sym[i] = Some(BigRational::from_integer(1.into()));
                sym[j] = Some(ratio.clone());
                true
            }
        };
        if ok {
            choice[at] = a;
            if assign(edges, at + 1, sym, choice) {
                return true;
            }
        }
        sym[i] = saved.0;
        sym[j] = saved.1;
    }
    false
}

/// Diagram of the mutated matrix, computed through a realizing matrix.
pub fn diagram_mutate(d: &Diagram, k: usize) -> Result<Diagram, GraphError> {
    if k >= d.n {
        return Err(GraphError::VertexOutOfRange { vertex: k, n: d.n });
    }
    Ok(Diagram::of_matrix(&d.realize()?.mutate(k)?))
}

/// Isomorphism-invariant encoding of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalDiagram(Vec<i64>);

/// Stable coloring under neighborhood refinement; colors are canonical ranks.
fn refine(s: &[Vec<i64>], mut colors: Vec<usize>) -> Vec<usize> {
    let n = s.len();
    let mut classes = colors.iter().collect::<HashSet<_>>().len();
    loop {
        let sigs: Vec<(usize, Vec<(usize, i64)>)> = (0..n)
            .map(|i| {
                let mut nb: Vec<(usize, i64)> =
                    (0..n).filter(|&j| s[i][j] != 0).map(|j| (colors[j], s[i][j])).collect();
                nb.sort_unstable();
                (colors[i], nb)
            })
            .collect();
        let mut sorted: Vec<&(usize, Vec<(usize, i64)>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        colors = sigs.iter().map(|sig| sorted.binary_search(&sig).unwrap()).collect();
        if sorted.len() == classes {
            return colors;
        }
        classes = sorted.len();
    }
}

fn are_twins(s: &[Vec<i64>], u: usize, v: usize) -> bool {
    s[u][v] == 0 && (0..s.len()).all(|k| k == u || k == v || s[u][k] == s[v][k])
}

fn canonical_search(s: &[Vec<i64>], colors: Vec<usize>, best: &mut Option<Vec<i64>>) {
    let n = s.len();
    let colors = refine(s, colors);
    let mut counts = vec![0usize; n];
    for &c in &colors {
        counts[c] += 1;
    }
    let Some(cell) = (0..n).find(|&c| counts[c] > 1) else {
        let mut perm = vec![0; n];
        for (v, &c) in colors.iter().enumerate() {
            perm[c] = v;
        }
        let code: Vec<i64> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| s[perm[a]][perm[b]])
            .collect();
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return;
    };
    let members: Vec<usize> = (0..n).filter(|&v| colors[v] == cell).collect();
    let mut reps: Vec<usize> = Vec::new();
    for &v in &members {
        if !reps.iter().any(|&r| are_twins(s, r, v)) {
            reps.push(v);
        }
    }
    for v in reps {
        let split: Vec<usize> = (0..n)
            .map(|u| 2 * colors[u] + usize::from(colors[u] == cell && u != v))
            .collect();
        canonical_search(s, split, best);
    }
}

fn canonical_form(s: &[Vec<i64>]) -> CanonicalDiagram {
    let n = s.len();
    let mut best = None;
    canonical_search(s, vec![0; n], &mut best);
    let mut code = vec![n as i64];
    code.extend(best.unwrap_or_default());
    CanonicalDiagram(code)
}

/// Outcome of exploring a mutation class of diagrams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Classification {
    Finite { dynkin: String, class_size: usize },
    Infinite {
        witness: Diagram,
        depth: usize,
        #[serde(rename = "witness_weight")]
        weight: u64,
    },
    Inconclusive { explored: usize, depth: usize },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Finite { dynkin, class_size } => write!(f, "finite type {dynkin} ({class_size} diagrams)"),
            Classification::Infinite { depth, weight, .. } => write!(f, "infinite type (weight {weight} at depth {depth})"),
            Classification::Inconclusive { explored, depth } => write!(f, "inconclusive after {explored} diagrams (depth {depth})"),
        }
    }
}

/// Breadth-first search of the mutation class of `b` up to diagram isomorphism.
pub fn classify_finite_type(b: &ExchangeMatrix, node_cap: usize) -> Result<Classification, GraphError> {
    let start = ExchangeMatrix::square(b.principal())?;
    let d0 = Diagram::of_matrix(&start);
    if d0.max_weight() >= 4 {
        return Ok(Classification::Infinite { weight: d0.max_weight(), witness: d0, depth: 0 });
    }
    let n = start.n();
    let mut seen: HashMap<CanonicalDiagram, ()> = HashMap::new();
    seen.insert(d0.canonical_form(), ());
    let mut members = vec![start.clone()];
    let mut frontier = vec![start];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let children: Vec<Vec<(ExchangeMatrix, Diagram, CanonicalDiagram)>> = frontier
            .par_iter()
            .map(|m| {
                (0..n)
                    .map(|k| {
                        let mk = m.mutate(k)?;
                        let d = Diagram::of_matrix(&mk);
                        let c = d.canonical_form();
                        Ok((mk, d, c))
                    })
                    .collect::<Result<Vec<_>, SeedError>>()
            })
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for (m, d, c) in children.into_iter().flatten() {
            if d.max_weight() >= 4 {
                return Ok(Classification::Infinite { weight: d.max_weight(), witness: d, depth });
            }
            if seen.insert(c, ()).is_none() {
                if seen.len() > node_cap {
                    return Ok(Classification::Inconclusive { explored: seen.len() - 1, depth });
                }
                members.push(m.clone());
                next.push(m);
            }
        }
        frontier = next;
    }
    let dynkin = members.iter().find_map(|m| dynkin_name(&Diagram::of_matrix(m)));
    Ok(match dynkin {
        Some(dynkin) => Classification::Finite { dynkin, class_size: members.len() },
        None => Classification::Inconclusive { explored: members.len(), depth },
    })
}

/// Names a diagram whose underlying weighted graph is a disjoint union of
/// Dynkin trees, e.g. `D4`, `A1^2`, `A1 x B2`.
pub fn dynkin_name(d: &Diagram) -> Option<String> {
    let n = d.n;
    let mut adjacency: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    for (i, j, w) in d.edges() {
        adjacency[i].push((j, w));
        adjacency[j].push((i, w));
    }
    let mut seen = vec![false; n];
    let mut names: Vec<(char, usize)> = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        let mut comp = vec![root];
        seen[root] = true;
        let mut at = 0;
        while at < comp.len() {
            for &(u, _) in &adjacency[comp[at]] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            at += 1;
        }
        names.push(name_tree(&comp, &adjacency)?);
    }
    names.sort();
    let mut grouped: BTreeMap<(char, usize), usize> = BTreeMap::new();
    for nm in names {
        *grouped.entry(nm).or_default() += 1;
    }
    let parts: Vec<String> = grouped
        .into_iter()
        .map(|((c, r), mult)| if mult > 1 { format!("{c}{r}^{mult}") } else { format!("{c}{r}") })
        .collect();
    Some(parts.join(" x "))
}

fn name_tree(comp: &[usize], adjacency: &[Vec<(usize, u64)>]) -> Option<(char, usize)> {
    let r = comp.len();
    let edges: Vec<(usize, usize, u64)> = comp
        .iter()
        .flat_map(|&v| adjacency[v].iter().filter(move |&&(u, _)| u > v).map(move |&(u, w)| (v, u, w)))
        .collect();
    if edges.len() + 1 != r {
        return None;
    }
    let degree = |v: usize| adjacency[v].len();
    let heavy: Vec<&(usize, usize, u64)> = edges.iter().filter(|e| e.2 > 1).collect();
    let max_degree = comp.iter().map(|&v| degree(v)).max().unwrap_or(0);
    match heavy.as_slice() {
        [] if max_degree <= 2 => Some(('A', r)),
        [] if max_degree == 3 => {
            let branches: Vec<usize> = comp.iter().copied().filter(|&v| degree(v) == 3).collect();
            let [centre] = branches.as_slice() else { return None };
            let mut arms: Vec<usize> = adjacency[*centre].iter().map(|&(u, _)| arm_length(*centre, u, adjacency)).collect();
            arms.sort_unstable();
            match arms.as_slice() {
                [1, 1, k] => Some(('D', k + 3)),
                [1, 2, k @ 2..=4] => Some(('E', k + 4)),
                _ => None,
            }
        }
        [&(a, b, w)] if max_degree <= 2 => match (w, r) {
            (3, 2) => Some(('G', 2)),
            (2, _) if degree(a) == 1 || degree(b) == 1 => Some(('B', r)),
            (2, 4) => Some(('F', 4)),
            _ => None,
        },
        _ => None,
    }
}

/// Number of vertices on the path starting at `next` and leading away from `from`.
fn arm_length(from: usize, next: usize, adjacency: &[Vec<(usize, u64)>]) -> usize {
    let (mut prev, mut cur, mut len) = (from, next, 1);
    while let Some(&(u, _)) = adjacency[cur].iter().find(|&&(u, _)| u != prev) {
        if adjacency[cur].len() > 2 {
            break;
        }
        prev = cur;
        cur = u;
        len += 1;
    }
    len
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplorationReport {
    pub seeds: usize,
    pub clusters: usize,
    pub cluster_variables: usize,
    pub exhausted: bool,
    pub max_depth: usize,
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub report: ExplorationReport,
    /// Discovered seeds in breadth-first order.
    pub seeds: Vec<Seed>,
}

/// Breadth-first search of the exchange graph, identifying seeds with equal
/// clusters. Every exchange is an exact Laurent division.
pub fn explore_exchange_graph(seed: &Seed, max_seeds: usize) -> Result<Exploration, GraphError> {
    let n = seed.n();
    let mut keys: HashSet<Vec<LaurentPoly>> = HashSet::new();
    let mut variables: HashSet<LaurentPoly> = seed.cluster().iter().cloned().collect();
    keys.insert(seed.cluster_key());
    let mut seeds = vec![seed.clone()];
    let mut frontier = vec![seed.clone()];
    let mut depth = 0;
    let mut exhausted = true;
    'outer: while !frontier.is_empty() {
        let children: Vec<Vec<Seed>> = frontier
            .par_iter()
            .map(|s| (0..n).map(|k| s.mutate(k)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for child in children.into_iter().flatten() {
            if keys.insert(child.cluster_key()) {
                if seeds.len() == max_seeds {
                    exhausted = false;
                    break 'outer;
                }
                variables.extend(child.cluster().iter().cloned());
                seeds.push(child.clone());
                next.push(child);
            }
        }
        if !next.is_empty() {
            depth += 1;
        }
        frontier = next;
    }
    let report = ExplorationReport {
        seeds: seeds.len(),
        clusters: seeds.len(),
        cluster_variables: variables.len(),
        exhausted,
        max_depth: depth,
    };
    Ok(Exploration { report, seeds })
}

/// Convenience for integer matrices given row by row.
pub fn square(rows: &[Vec<i64>]) -> Result<ExchangeMatrix, SeedError> {
    let m: Matrix = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    ExchangeMatrix::square(m)
}
