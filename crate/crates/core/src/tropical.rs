//! Min-plus valuations of Laurent polynomials, their propagation over the
//! 3-regular tree of rank-3 mutations, and finite-radius certificates built
//! from them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::poly::{LaurentPoly, PolyError};
use crate::seeds::{ExchangeMatrix, Seed, SeedError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error("valuation of the zero polynomial")]
    ZeroPolynomial,
    #[error("{expected} weights needed, {got} given")]
    WeightCount { expected: usize, got: usize },
    #[error("rank 3 required, got {0}")]
    RankNotThree(usize),
    #[error("seed at `{path}` has no oriented 3-cycle")]
    NotCyclicEverywhere { path: String },
    #[error("acyclic seed found at `{path}`")]
    AcyclicSeedFound { path: String },
    #[error("matrix is not skew-symmetrizable")]
    NotSkewSymmetrizable,
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Rational weights on the variables of a context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Valuation {
    #[serde(serialize_with = "ser_rationals")]
    weights: Vec<BigRational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(|q| q.to_string()).collect::<Vec<_>>().serialize(s)
}

impl Valuation {
    pub fn new(weights: Vec<BigRational>) -> Self {
        Valuation { weights }
    }

    pub fn from_integers(weights: &[i64]) -> Self {
        Valuation::new(weights.iter().map(|&w| BigRational::from_integer(w.into())).collect())
    }

    /// Given weights on the cluster variables of a seed, zero on frozen ones.
    pub fn on_cluster(seed: &Seed, cluster: &[BigRational]) -> Result<Self, TropicalError> {
        if cluster.len() != seed.n() {
            return Err(TropicalError::WeightCount { expected: seed.n(), got: cluster.len() });
        }
        let mut w = cluster.to_vec();
        w.resize(seed.m(), BigRational::zero());
        Ok(Valuation::new(w))
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight_of(&self, exp: &[i64]) -> BigRational {
        exp.iter()
            .zip(&self.weights)
            .fold(BigRational::zero(), |acc, (&e, w)| acc + w * BigRational::from_integer(e.into()))
    }
}

/// Minimum of the weight over the support, which equals the minimum over the Newton polytope.
pub fn valuate(y: &LaurentPoly, v: &Valuation) -> Result<BigRational, TropicalError> {
    if v.weights.len() != y.nvars() {
        return Err(TropicalError::WeightCount { expected: y.nvars(), got: v.weights.len() });
    }
    y.terms().map(|(e, _)| v.weight_of(e)).min().ok_or(TropicalError::ZeroPolynomial)
}

type Small = [[i64; 3]; 3];

fn small_matrix(b: &ExchangeMatrix) -> Small {
    let mut m = [[0i64; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = b.entry(i, j).to_i64().expect("entry fits in i64");
        }
    }
    m
}

fn mutate_small(b: &Small, k: usize) -> Small {
    let mut out = *b;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

/// `1 -> 2 -> 3 -> 1` or its reverse.
fn is_cyclic(b: &Small) -> bool {
    let s = (b[0][1].signum(), b[1][2].signum(), b[2][0].signum());
    s == (1, 1, 1) || s == (-1, -1, -1)
}

fn path_key(path: &[usize]) -> String {
    path.iter().map(|d| char::from(b'1' + *d as u8)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeVertex {
    /// Directions (0-based) from the root; no two consecutive entries agree.
    pub path: Vec<usize>,
    pub matrix: Small,
    #[serde(serialize_with = "ser_rationals")]
    pub values: Vec<BigRational>,
}

impl TreeVertex {
    /// Path written with 1-based digits, e.g. `"121"`; the root is `""`.
    pub fn key(&self) -> String {
        path_key(&self.path)
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

/// Triples of values at the vertices of the 3-regular tree, in breadth-first order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeAssignment {
    pub vertices: Vec<TreeVertex>,
}

impl TreeAssignment {
    pub fn get(&self, key: &str) -> Option<&TreeVertex> {
        self.vertices.iter().find(|v| v.key() == key)
    }

    pub fn to_json_map(&self) -> BTreeMap<String, Vec<String>> {
        self.vertices
            .iter()
            .map(|v| (v.key(), v.values.iter().map(|q| q.to_string()).collect()))
            .collect()
    }
}

fn grow_tree(
    root: Small,
    values: Vec<BigRational>,
    depth: usize,
    mut step: impl FnMut(&TreeVertex, usize, &Small) -> Result<BigRational, TropicalError>,
) -> Result<TreeAssignment, TropicalError> {
    let mut vertices = vec![TreeVertex { path: vec![], matrix: root, values }];
    let mut level = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &at in &level {
            let parent = vertices[at].clone();
            for j in 0..3 {
                if parent.path.last() == Some(&j) {
                    continue;
                }
                let matrix = mutate_small(&parent.matrix, j);
                let mut values = parent.values.clone();
                values[j] = step(&parent, j, &matrix)?;
                let mut path = parent.path.clone();
                path.push(j);
                next.push(vertices.len());
                vertices.push(TreeVertex { path, matrix, values });
            }
        }
        level = next;
    }
    Ok(TreeAssignment { vertices })
}

fn others(j: usize) -> (usize, usize) {
    ((j + 1) % 3, (j + 2) % 3)
}

/// Tropical exchange `nu_j(t) + nu_j(t') = min(|b_ij| nu_i, |b_kj| nu_k)` over the tree,
/// starting from cluster values `nu0` at the seed's principal part.
pub fn propagate_valuation(seed: &Seed, nu0: &[BigRational], depth: usize) -> Result<TreeAssignment, TropicalError> {
    if seed.n() != 3 {
        return Err(TropicalError::RankNotThree(seed.n()));
    }
    if nu0.len() != 3 {
        return Err(TropicalError::WeightCount { expected: 3, got: nu0.len() });
    }
    let root = small_matrix(&ExchangeMatrix::square(seed.matrix().principal())?);
    let check = |v: &TreeVertex| {
        if is_cyclic(&v.matrix) {
            Ok(())
        } else {
            Err(TropicalError::NotCyclicEverywhere { path: v.key() })
        }
    };
    let tree = grow_tree(root, nu0.to_vec(), depth, |parent, j, _| {
        check(parent)?;
        let (i, k) = others(j);
        let b = &parent.matrix;
        let a = BigRational::from_integer(b[i][j].abs().into()) * &parent.values[i];
        let c = BigRational::from_integer(b[k][j].abs().into()) * &parent.values[k];
        Ok(a.min(c) - &parent.values[j])
    })?;
    for v in &tree.vertices {
        check(v)?;
    }
    Ok(tree)
}

/// Normalized values and the data showing they turn negative just outside radius `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaWitness {
    /// Values shifted by the radius-`r` minimum, up to depth `r + 1`.
    pub assignment: TreeAssignment,
    /// Unshifted minima over each depth `0..=r+1`.
    #[serde(serialize_with = "ser_rationals")]
    pub minima: Vec<BigRational>,
    pub strictly_decreasing: bool,
    /// Vertex key and 0-based index of a negative shifted value at depth `r + 1`.
    pub negative_at: (String, usize),
    /// Squared edge parameters `|b_ij b_ji|` at the root, indexed by the opposite vertex.
    pub root_weights: [i64; 3],
}

/// `|b_ij b_ji|` indexed by the vertex not in `{i, j}`.
fn opposite_weights(b: &Small) -> [i64; 3] {
    let w = |i: usize, j: usize| (b[i][j] * b[j][i]).abs();
    [w(1, 2), w(0, 2), w(0, 1)]
}

/// `u_j(t) = s_j(t) / (s_i(t) s_k(t))` with `s^2` the opposite weights; rational
/// because the product of the three weights is a square.
fn edge_parameter(b: &Small, j: usize) -> Result<BigRational, TropicalError> {
    let w = opposite_weights(b);
    let (i, k) = others(j);
    let product = BigInt::from(w[0]) * w[1] * w[2];
    let root = product.sqrt();
    if &root * &root != product || product.is_zero() {
        return Err(TropicalError::NotSkewSymmetrizable);
    }
    Ok(BigRational::new(root, BigInt::from(w[i] * w[k])))
}

/// Values `delta` on the tree satisfying
/// `u_j(t) delta_j(t) + u_j(t') delta_j(t') = min(delta_i(t), delta_k(t))`,
/// started at `delta0`, computed to depth `r + 1` and shifted so that they are
/// non-negative within radius `r` and negative somewhere at radius `r + 1`.
pub fn delta_witness(b: &ExchangeMatrix, r: usize, delta0: &[BigRational]) -> Result<DeltaWitness, TropicalError> {
    if b.n() != 3 {
        return Err(TropicalError::RankNotThree(b.n()));
    }
    if crate::seeds::skew_symmetrizer(&b.principal()).is_none() {
        return Err(TropicalError::NotSkewSymmetrizable);
    }
    let root = small_matrix(&ExchangeMatrix::square(b.principal())?);
    let check = |m: &Small, path: &[usize]| {
        if is_cyclic(m) {
            Ok(())
        } else {
            Err(TropicalError::AcyclicSeedFound { path: path_key(path) })
        }
    };
    let tree = grow_tree(root, delta0.to_vec(), r + 1, |parent, j, child| {
        check(&parent.matrix, &parent.path)?;
        let mut child_path = parent.path.clone();
        child_path.push(j);
        check(child, &child_path)?;
        let (i, k) = others(j);
        let u = edge_parameter(&parent.matrix, j)?;
        let u_next = edge_parameter(child, j)?;
        if &u + &u_next != BigRational::one() {
            return Err(TropicalError::NotSkewSymmetrizable);
        }
        let m = parent.values[i].clone().min(parent.values[k].clone());
        Ok((m - u * &parent.values[j]) / u_next)
    })?;
    let mut minima = vec![None::<BigRational>; r + 2];
    for v in &tree.vertices {
        let low = v.values.iter().min().unwrap().clone();
        let slot = &mut minima[v.depth()];
        if slot.as_ref().is_none_or(|m| &low < m) {
            *slot = Some(low);
        }
    }
    let minima: Vec<BigRational> = minima.into_iter().map(|m| m.expect("every depth is populated")).collect();
    let shift = minima[r].clone();
    let shifted = TreeAssignment {
        vertices: tree
            .vertices
            .into_iter()
            .map(|mut v| {
                v.values.iter_mut().for_each(|x| *x -= &shift);
                v
            })
            .collect(),
    };
    let inside_ok = shifted.vertices.iter().filter(|v| v.depth() <= r).all(|v| v.values.iter().all(|x| !x.is_negative()));
    let negative_at = shifted
        .vertices
        .iter()
        .filter(|v| v.depth() == r + 1)
        .find_map(|v| v.values.iter().position(|x| x.is_negative()).map(|i| (v.key(), i)));
    let Some(negative_at) = negative_at.filter(|_| inside_ok) else {
        return Err(TropicalError::CertificateInvalid("no sign change at the boundary".into()));
    };
    let strictly_decreasing = minima.windows(2).all(|w| w[1] < w[0]);
    Ok(DeltaWitness { assignment: shifted, minima, strictly_decreasing, negative_at, root_weights: opposite_weights(&root) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundCertificate {
    pub valuation: Valuation,
    /// Values at `x_1..x_n` followed by `x'_1..x'_n`.
    #[serde(serialize_with = "ser_rationals")]
    pub generator_values: Vec<BigRational>,
    #[serde(serialize_with = "ser_rationals_one")]
    pub value: BigRational,
    /// A term of the element that no combination of generator monomials can produce.
    pub witness_exponent: Vec<i64>,
}

fn ser_rationals_one<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    v.to_string().serialize(s)
}

/// Certifies that `y` is not a polynomial in the generators `x_j, x'_j` over
/// the frozen Laurent ring. Every generator has non-negative value, so each
/// generator monomial only has terms of weight at least its value; a term of
/// `y` of negative weight, or of weight below the smallest positive generator
/// value that is not a frozen monomial, cannot occur.
pub fn not_in_lower_bound_certificate(y: &LaurentPoly, seed: &Seed, v: &Valuation) -> Result<LowerBoundCertificate, TropicalError> {
    let n = seed.n();
    let w = v.weights();
    if w.len() != seed.m() {
        return Err(TropicalError::WeightCount { expected: seed.m(), got: w.len() });
    }
    if w[n..].iter().any(|x| !x.is_zero()) {
        return Err(TropicalError::CertificateInvalid("frozen variables must have value 0".into()));
    }
    if w[..n].iter().any(|x| !x.is_positive()) {
        return Err(TropicalError::CertificateInvalid("cluster variables must have positive value".into()));
    }
    let mut generator_values = w[..n].to_vec();
    for j in 0..n {
        generator_values.push(valuate(&seed.exchange_polynomial(j), v)? - &w[j]);
    }
    if generator_values.iter().any(|x| x.is_negative()) {
        return Err(TropicalError::CertificateInvalid("a generator has negative value".into()));
    }
    let value = valuate(y, v)?;
    let floor = generator_values.iter().filter(|x| x.is_positive()).min().cloned();
    let witness = y.terms().find(|(e, _)| {
        let weight = v.weight_of(e);
        weight.is_negative() || floor.as_ref().is_some_and(|f| &weight < f && e[..n].iter().any(|&k| k != 0))
    });
    let Some((exp, _)) = witness else {
        return Err(TropicalError::CertificateInvalid(format!("every term of weight below the generators is a frozen monomial (value {value})")));
    };
    Ok(LowerBoundCertificate { valuation: v.clone(), generator_values, value, witness_exponent: exp.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::markov_degree_zero_element;
    use crate::seeds::int_matrix;
    use proptest::prelude::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn markov() -> Seed {
        Seed::with_generic_coefficients(int_matrix(&[[0, 2, -2], [-2, 0, 2], [2, -2, 0]])).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let ctx = crate::poly::Context::new(["x1", "x2", "x3"]);
        let y = &LaurentPoly::monomial(&ctx, vec![2, 1, 0], 1) + &LaurentPoly::var(&ctx, 2);
        assert_eq!(valuate(&y, &Valuation::from_integers(&[1, 1, 1])).unwrap(), q(1));
        assert_eq!(valuate(&LaurentPoly::zero(&ctx), &Valuation::from_integers(&[1, 1, 1])), Err(TropicalError::ZeroPolynomial));
        let s = markov();
        let v = Valuation::on_cluster(&s, &[q(1), q(1), q(1)]).unwrap();
        assert_eq!(valuate(&LaurentPoly::var(s.context(), 4), &v).unwrap(), q(0));
        assert_eq!(valuate(&markov_degree_zero_element(&s), &v).unwrap(), q(0));
    }

    #[test]
    fn constant_valuation_propagates() {
        let s = markov();
        let t = propagate_valuation(&s, &[q(1), q(1), q(1)], 5).unwrap();
        assert_eq!(t.vertices.len(), 1 + 3 + 6 + 12 + 24 + 48);
        assert!(t.vertices.iter().all(|v| v.values.iter().all(|x| *x == q(1))));
        let root = propagate_valuation(&s, &[q(1), q(2), q(3)], 0).unwrap();
        assert_eq!(root.vertices[0].values, vec![q(1), q(2), q(3)]);
    }

    fn hand_recursion(b: [[i64; 3]; 3], nu: [i64; 3], path: &[usize]) -> [i64; 3] {
        let (mut b, mut nu) = (b, nu);
        for &j in path {
            let (i, k) = ((j + 1) % 3, (j + 2) % 3);
            nu[j] = (b[i][j].abs() * nu[i]).min(b[k][j].abs() * nu[k]) - nu[j];
            b = mutate_small(&b, j);
        }
        nu
    }

    #[test]
    fn propagation_matches_hand_recursion() {
        let s = markov();
        let t = propagate_valuation(&s, &[q(1), q(1), q(2)], 3).unwrap();
        let b = [[0, 2, -2], [-2, 0, 2], [2, -2, 0]];
        for v in &t.vertices {
            let expect = hand_recursion(b, [1, 1, 2], &v.path);
            assert_eq!(v.values, expect.iter().map(|&x| q(x)).collect::<Vec<_>>(), "{}", v.key());
        }
    }

    #[test]
    fn acyclic_seed_is_rejected() {
        let s = Seed::with_generic_coefficients(int_matrix(&[[0, 1, 0], [-1, 0, 1], [0, -1, 0]])).unwrap();
        assert!(matches!(propagate_valuation(&s, &[q(1), q(1), q(1)], 1), Err(TropicalError::NotCyclicEverywhere { .. })));
        let b = ExchangeMatrix::square(int_matrix(&[[0, 1, -1], [-1, 0, 1], [1, -1, 0]])).unwrap();
        assert!(matches!(delta_witness(&b, 2, &[q(0), q(0), q(1)]), Err(TropicalError::AcyclicSeedFound { .. })));
    }

    #[test]
    fn delta_minima_decrease() {
        let b = ExchangeMatrix::square(int_matrix(&[[0, 2, -2], [-2, 0, 2], [2, -2, 0]])).unwrap();
        let w = delta_witness(&b, 6, &[q(0), q(0), q(1)]).unwrap();
        assert!(w.strictly_decreasing);
        assert_eq!(w.minima.len(), 8);
        assert_eq!(w.root_weights, [4, 4, 4]);
        let zero = delta_witness(&b, 0, &[q(0), q(0), q(1)]).unwrap();
        assert!(zero.assignment.vertices[0].values.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn delta_agrees_with_valuation_when_weights_are_equal() {
        // With all |b_ij| = 2 the values nu = 2 delta satisfy the plain tropical exchange.
        let s = markov();
        let b = ExchangeMatrix::square(s.matrix().principal()).unwrap();
        let w = delta_witness(&b, 4, &[q(0), q(0), q(1)]).unwrap();
        let shift = w.minima[4].clone();
        let nu = propagate_valuation(&s, &[q(0), q(0), q(2)], 5).unwrap();
        for v in &w.assignment.vertices {
            let expect: Vec<BigRational> = v.values.iter().map(|d| (d + &shift) * q(2)).collect();
            assert_eq!(nu.get(&v.key()).unwrap().values, expect);
        }
    }

    #[test]
    fn skew_symmetrizable_delta() {
        let b = ExchangeMatrix::square(int_matrix(&[[0, 4, -2], [-2, 0, 2], [2, -4, 0]])).unwrap();
        assert!(crate::seeds::skew_symmetrizer(&b.principal()).is_some());
        let w = delta_witness(&b, 3, &[q(0), q(0), q(1)]).unwrap();
        assert!(w.strictly_decreasing);
    }

    #[test]
    fn lower_bound_certificates() {
        let s = markov();
        let v = Valuation::on_cluster(&s, &[q(1), q(1), q(1)]).unwrap();
        let c = not_in_lower_bound_certificate(&markov_degree_zero_element(&s), &s, &v).unwrap();
        assert_eq!(c.value, q(0));
        assert!(c.generator_values.iter().all(|x| *x == q(1)));
        let x1 = LaurentPoly::var(s.context(), 0);
        assert!(matches!(not_in_lower_bound_certificate(&x1, &s, &v), Err(TropicalError::CertificateInvalid(_))));
        let three = LaurentPoly::constant(s.context(), 3);
        assert!(matches!(not_in_lower_bound_certificate(&three, &s, &v), Err(TropicalError::CertificateInvalid(_))));
    }

    fn arb_poly() -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
        proptest::collection::vec((proptest::collection::vec(-3i64..=3, 3), 1i64..=5), 1..5)
    }

    proptest! {
        #[test]
        fn valuation_axioms(a in arb_poly(), b in arb_poly(), w in proptest::collection::vec(-3i64..=3, 3), flip in any::<bool>()) {
            let ctx = crate::poly::Context::new(["x1", "x2", "x3"]);
            let sign = if flip { -1 } else { 1 };
            let x = LaurentPoly::from_terms(&ctx, a.into_iter().map(|(e, c)| (e, BigInt::from(c))));
            let y = LaurentPoly::from_terms(&ctx, b.into_iter().map(|(e, c)| (e, BigInt::from(c))));
            let v = Valuation::from_integers(&w);
            let (vx, vy) = (valuate(&x, &v).unwrap(), valuate(&y, &v).unwrap());
            prop_assert_eq!(valuate(&(&x * &y), &v).unwrap(), &vx + &vy);
            prop_assert_eq!(valuate(&(&x + &y), &v).unwrap(), vx.clone().min(vy.clone()));
            let mixed = &x + &y.scale(&BigInt::from(sign));
            if !mixed.is_zero() {
                prop_assert!(valuate(&mixed, &v).unwrap() >= vx.min(vy));
            }
        }
    }
}
