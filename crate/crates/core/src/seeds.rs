//! Extended exchange matrices and seeds of geometric type.
//!
//! Directions and row indices are 0-based. The first `n` rows of an
//! [`ExchangeMatrix`] form the square principal part; the remaining rows are
//! frozen and carry the coefficients.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::poly::{Context, LaurentPoly, PolyError, PolyJson};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error("malformed matrix: {0}")]
    Shape(String),
    #[error("principal part is not sign-skew-symmetric")]
    NotSignSkewSymmetric,
    #[error("mutation in direction {direction} breaks sign-skew-symmetry")]
    SignSkewSymmetryLost { direction: usize },
    #[error("direction {direction} out of range for rank {n}")]
    DirectionOutOfRange { direction: usize, n: usize },
    #[error("exchange in direction {direction} is not an exact Laurent division")]
    NotDivisible { direction: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("bad seed description: {0}")]
    Format(String),
}

pub type Matrix = Vec<Vec<BigInt>>;

/// Converts a small integer table into a big-integer matrix.
pub fn int_matrix<R: AsRef<[i64]>>(rows: &[R]) -> Matrix {
    rows.iter()
        .map(|r| r.as_ref().iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    n: usize,
    rows: Matrix,
    labels: Vec<String>,
}

impl ExchangeMatrix {
    /// Builds an `m x n` matrix; `labels` name the rows, the first `n` also name the columns.
    pub fn new(n: usize, rows: Matrix, labels: Vec<String>) -> Result<Self, SeedError> {
        if rows.len() < n {
            return Err(SeedError::Shape(format!("{} rows for {} columns", rows.len(), n)));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(SeedError::Shape(format!("row of length {} in a {}-column matrix", r.len(), n)));
        }
        if labels.len() != rows.len() {
            return Err(SeedError::Shape(format!("{} labels for {} rows", labels.len(), rows.len())));
        }
        if !is_sign_skew_symmetric(&rows[..n]) {
            return Err(SeedError::NotSignSkewSymmetric);
        }
        Ok(ExchangeMatrix { n, rows, labels })
    }

    /// Matrix with default labels `x1..xm`.
    pub fn with_default_labels(n: usize, rows: Matrix) -> Result<Self, SeedError> {
        let labels = (1..=rows.len()).map(|i| format!("x{i}")).collect();
        Self::new(n, rows, labels)
    }

    /// Square matrix without frozen rows.
    pub fn square(rows: Matrix) -> Result<Self, SeedError> {
        let n = rows.len();
        Self::with_default_labels(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn principal(&self) -> Matrix {
        self.rows[..self.n].to_vec()
    }

    /// Matrix mutation in direction `k`, applied to all `m` rows.
    pub fn mutate(&self, k: usize) -> Result<Self, SeedError> {
        if k >= self.n {
            return Err(SeedError::DirectionOutOfRange { direction: k, n: self.n });
        }
        let b = &self.rows;
        let rows: Matrix = (0..self.m())
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        if i == k || j == k {
                            -&b[i][j]
                        } else {
                            let (bik, bkj) = (&b[i][k], &b[k][j]);
                            &b[i][j] + (bik.abs() * bkj + bik * bkj.abs()) / 2
                        }
                    })
                    .collect()
            })
            .collect();
        if !is_sign_skew_symmetric(&rows[..self.n]) {
            return Err(SeedError::SignSkewSymmetryLost { direction: k });
        }
        Ok(ExchangeMatrix { n: self.n, rows, labels: self.labels.clone() })
    }

    /// Applies mutations left to right.
    pub fn mutate_sequence(&self, dirs: &[usize]) -> Result<Self, SeedError> {
        dirs.iter().try_fold(self.clone(), |b, &k| b.mutate(k))
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.rows)
    }

    /// False iff two columns are proportional with a ratio of two odd integers.
    pub fn is_coprime(&self) -> bool {
        let col = |j: usize| -> Vec<&BigInt> { self.rows.iter().map(|r| &r[j]).collect() };
        for a in 0..self.n {
            for b in a + 1..self.n {
                if odd_ratio_proportional(&col(a), &col(b)) {
                    return false;
                }
            }
        }
        true
    }

    /// Same matrix with rows and columns of the principal part permuted: new index `i` is old `order[i]`.
    pub fn relabel(&self, order: &[usize]) -> Self {
        let n = self.n;
        let row_map: Vec<usize> = order.iter().copied().chain(n..self.m()).collect();
        let rows = row_map
            .iter()
            .map(|&i| order.iter().map(|&j| self.rows[i][j].clone()).collect())
            .collect();
        let labels = row_map.iter().map(|&i| self.labels[i].clone()).collect();
        ExchangeMatrix { n, rows, labels }
    }
}

/// Two columns `u`, `v` satisfy `v = (p/q) u` with `p`, `q` odd.
fn odd_ratio_proportional(u: &[&BigInt], v: &[&BigInt]) -> bool {
    let uz = u.iter().all(|x| x.is_zero());
    let vz = v.iter().all(|x| x.is_zero());
    if uz || vz {
        // The ratio 1 applies when both vanish; a single zero column only admits ratio 0.
        return uz && vz;
    }
    let Some(i) = u.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let ratio = BigRational::new(v[i].clone(), u[i].clone());
    let proportional = u
        .iter()
        .zip(v)
        .all(|(a, b)| BigRational::from_integer((*b).clone()) == &ratio * BigRational::from_integer((*a).clone()));
    proportional && ratio.numer().is_odd() && ratio.denom().is_odd()
}

/// Either `b_ij = b_ji = 0` or `b_ij b_ji < 0` for every pair, and a zero diagonal.
pub fn is_sign_skew_symmetric(b: &[Vec<BigInt>]) -> bool {
    let n = b.len();
    if b.iter().any(|r| r.len() < n) {
        return false;
    }
    for i in 0..n {
        if !b[i][i].is_zero() {
            return false;
        }
        for j in i + 1..n {
            let (x, y) = (&b[i][j], &b[j][i]);
            let ok = (x.is_zero() && y.is_zero()) || (x * y).is_negative();
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Positive integers `d_i` with `d_i b_ij = -d_j b_ji`, normalized to be coprime
/// within each connected component; `None` when no such diagonal exists.
pub fn skew_symmetrizer(b: &[Vec<BigInt>]) -> Option<Vec<BigInt>> {
    let n = b.len();
    if !is_sign_skew_symmetric(b) {
        return None;
    }
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    let mut component = vec![usize::MAX; n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(BigRational::one());
        component[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if b[i][j].is_zero() || d[j].is_some() {
                    continue;
                }
                // d_j = d_i |b_ij| / |b_ji|
                let dj = d[i].as_ref().unwrap() * BigRational::new(b[i][j].abs(), b[j][i].abs());
                d[j] = Some(dj);
                component[j] = root;
                queue.push_back(j);
            }
        }
    }
    let d: Vec<BigRational> = d.into_iter().map(Option::unwrap).collect();
    for i in 0..n {
        for j in 0..n {
            let lhs = &d[i] * BigRational::from_integer(b[i][j].clone());
            let rhs = -(&d[j] * BigRational::from_integer(b[j][i].clone()));
            if lhs != rhs {
                return None;
            }
        }
    }
    let mut out = vec![BigInt::zero(); n];
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| component[i] == root).collect();
        if members.is_empty() {
            continue;
        }
        let lcm = members
            .iter()
            .fold(BigInt::one(), |acc, &i| acc.lcm(d[i].denom()));
        let scaled: Vec<BigInt> = members
            .iter()
            .map(|&i| (&d[i] * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = linalg::gcd_all(scaled.iter());
        for (&i, v) in members.iter().zip(scaled) {
            out[i] = v / &g;
        }
    }
    Some(out)
}

/// A seed of geometric type: exchange matrix plus cluster variables written as
/// Laurent polynomials in the initial extended cluster.
#[derive(Clone, Debug)]
pub struct Seed {
    matrix: ExchangeMatrix,
    ctx: Arc<Context>,
    cluster: Vec<LaurentPoly>,
    history: Vec<usize>,
}

impl Seed {
    /// Initial seed whose extended cluster is named by the matrix row labels.
    pub fn initial(matrix: ExchangeMatrix) -> Self {
        let ctx = Context::new(matrix.labels().iter().cloned());
        let cluster = (0..matrix.n()).map(|i| LaurentPoly::var(&ctx, i)).collect();
        Seed { matrix, ctx, cluster, history: Vec::new() }
    }

    /// Seed with formal coefficients `p_j^+`, `p_j^-` realized as `2n` frozen
    /// variables; intended for computations at this single seed.
    pub fn with_generic_coefficients(principal: Matrix) -> Result<Self, SeedError> {
        let n = principal.len();
        let mut rows = principal;
        let mut labels: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        for j in 0..n {
            for (sign, tag) in [(1, "+"), (-1, "-")] {
                let mut row = vec![BigInt::zero(); n];
                row[j] = BigInt::from(sign);
                rows.push(row);
                labels.push(format!("p{}{}", j + 1, tag));
            }
        }
        Ok(Seed::initial(ExchangeMatrix::new(n, rows, labels)?))
    }

    /// Resumes a seed from stored cluster expressions.
    pub fn from_parts(matrix: ExchangeMatrix, cluster: Vec<LaurentPoly>, history: Vec<usize>) -> Result<Self, SeedError> {
        if cluster.len() != matrix.n() {
            return Err(SeedError::Format(format!("{} cluster expressions for rank {}", cluster.len(), matrix.n())));
        }
        let ctx = Context::new(matrix.labels().iter().cloned());
        let cluster = cluster
            .iter()
            .map(|p| p.with_context(&ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Seed { matrix, ctx, cluster, history })
    }

    pub fn matrix(&self) -> &ExchangeMatrix {
        &self.matrix
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    /// Mutation path from the initial seed, with immediate backtracks cancelled.
    pub fn history(&self) -> &[usize] {
        &self.history
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn m(&self) -> usize {
        self.matrix.m()
    }

    /// Exchange polynomial `P_j` in this seed's own extended cluster, where
    /// variable `i` stands for the `i`-th cluster or frozen variable of the seed.
    pub fn exchange_polynomial(&self, j: usize) -> LaurentPoly {
        let m = self.m();
        let mut plus = vec![0i64; m];
        let mut minus = vec![0i64; m];
        for i in 0..m {
            let b = self.matrix.entry(i, j).to_i64().expect("exchange matrix entry fits in i64");
            if b > 0 {
                plus[i] = b;
            } else {
                minus[i] = -b;
            }
        }
        &LaurentPoly::monomial(&self.ctx, plus, 1) + &LaurentPoly::monomial(&self.ctx, minus, 1)
    }

    /// Values of the seed's extended cluster in the initial extended cluster.
    pub fn extended_cluster(&self) -> Vec<LaurentPoly> {
        let mut all = self.cluster.clone();
        all.extend((self.n()..self.m()).map(|i| LaurentPoly::var(&self.ctx, i)));
        all
    }

    /// `P_j` written in the initial extended cluster.
    pub fn exchange_polynomial_initial(&self, j: usize) -> LaurentPoly {
        self.exchange_polynomial(j)
            .substitute(&self.extended_cluster())
            .expect("exchange polynomials have non-negative exponents")
    }

    /// Seed mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Seed, SeedError> {
        let matrix = self.matrix.mutate(k)?;
        let p = self.exchange_polynomial_initial(k);
        let fresh = p
            .divide_exact(&self.cluster[k])
            .map_err(|_| SeedError::NotDivisible { direction: k })?;
        let mut cluster = self.cluster.clone();
        cluster[k] = fresh;
        let mut history = self.history.clone();
        if history.last() == Some(&k) {
            history.pop();
        } else {
            history.push(k);
        }
        Ok(Seed { matrix, ctx: self.ctx.clone(), cluster, history })
    }

    pub fn mutate_sequence(&self, dirs: &[usize]) -> Result<Seed, SeedError> {
        dirs.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// The cluster as an unordered set, in canonical order.
    pub fn cluster_key(&self) -> Vec<LaurentPoly> {
        let mut key = self.cluster.clone();
        key.sort();
        key
    }

    /// Fresh seed whose initial cluster is this seed's cluster.
    pub fn recentered(&self) -> Seed {
        Seed::initial(self.matrix.clone())
    }

    pub fn to_json(&self) -> SeedJson {
        let mut j = SeedJson::from_matrix(&self.matrix);
        if !self.history.is_empty() || self.cluster.iter().enumerate().any(|(i, p)| *p != LaurentPoly::var(&self.ctx, i)) {
            j.cluster = Some(self.cluster.iter().map(LaurentPoly::to_json).collect());
            j.history = Some(self.history.clone());
        }
        j
    }

    pub fn from_json(j: &SeedJson) -> Result<Seed, SeedError> {
        let matrix = j.to_matrix()?;
        match &j.cluster {
            None => Ok(Seed::initial(matrix)),
            Some(c) => {
                let polys = c
                    .iter()
                    .map(|p| LaurentPoly::from_json(p, None))
                    .collect::<Result<Vec<_>, _>>()?;
                Seed::from_parts(matrix, polys, j.history.clone().unwrap_or_default())
            }
        }
    }
}

/// JSON form `{"n", "m", "labels", "btilde"}` with optional stored cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedJson {
    pub n: usize,
    pub m: usize,
    pub labels: Vec<String>,
    pub btilde: Vec<Vec<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<PolyJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<usize>>,
}

/// Entry as a JSON number when it fits in `i64`, else as a decimal string.
pub fn int_to_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::String(v.to_string()),
    }
}

pub fn int_from_json(v: &serde_json::Value) -> Result<BigInt, SeedError> {
    match v {
        serde_json::Value::Number(x) if x.is_i64() || x.is_u64() => Ok(x.to_string().parse().unwrap()),
        serde_json::Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| SeedError::Format(format!("bad integer `{s}`"))),
        other => Err(SeedError::Format(format!("expected an integer, found {other}"))),
    }
}

pub fn matrix_to_json(rows: &Matrix) -> Vec<Vec<serde_json::Value>> {
    rows.iter().map(|r| r.iter().map(int_to_json).collect()).collect()
}

pub fn matrix_from_json(rows: &[Vec<serde_json::Value>]) -> Result<Matrix, SeedError> {
    rows.iter()
        .map(|r| r.iter().map(int_from_json).collect())
        .collect()
}

impl SeedJson {
    pub fn from_matrix(b: &ExchangeMatrix) -> Self {
        SeedJson {
            n: b.n(),
            m: b.m(),
            labels: b.labels().to_vec(),
            btilde: matrix_to_json(b.rows()),
            cluster: None,
            history: None,
        }
    }

    pub fn to_matrix(&self) -> Result<ExchangeMatrix, SeedError> {
        let rows = matrix_from_json(&self.btilde)?;
        if rows.len() != self.m {
            return Err(SeedError::Shape(format!("m = {} but {} rows given", self.m, rows.len())));
        }
        ExchangeMatrix::new(self.n, rows, self.labels.clone())
    }
}
