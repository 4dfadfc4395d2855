//! Lower and upper bounds of a seed: polynomials in the cluster variables and
//! their single-step exchanges, straightening to standard monomials, linear
//! independence, and membership in the upper bound.
//!
//! Every computation treats the given seed as initial: its extended cluster
//! variables are the variables of its context.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graphs;
use crate::poly::{Context, LaurentPoly, PolyError, PolyJson, RatFunc};
use crate::seeds::Seed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("the seed has an oriented cycle")]
    NotAcyclic,
    #[error("expression is not a polynomial in the cluster variables")]
    NotPolynomial,
    #[error("cycle relation failed to verify: {0}")]
    RelationFailed(String),
    #[error("the element is not over the seed's variables")]
    ContextMismatch,
}

/// The ring generated by `x_1, x'_1, ..., x_n, x'_n` over the Laurent
/// polynomials in the frozen variables. Variables are the cluster labels,
/// the same labels with a trailing `'`, then the frozen labels.
#[derive(Debug, Clone)]
pub struct Generators {
    seed: Seed,
    ctx: Arc<Context>,
    exchange: Vec<GeneratorPoly>,
}

/// Element of the generator ring; exponents of `x_j` and `x'_j` are non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorPoly(LaurentPoly);

impl GeneratorPoly {
    pub fn poly(&self) -> &LaurentPoly {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_json(&self) -> PolyJson {
        self.0.to_json()
    }
}

impl std::fmt::Display for GeneratorPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl Generators {
    pub fn new(seed: &Seed) -> Self {
        let n = seed.n();
        let labels = seed.matrix().labels();
        let names: Vec<String> = labels[..n]
            .iter()
            .cloned()
            .chain(labels[..n].iter().map(|l| format!("{l}'")))
            .chain(labels[n..].iter().cloned())
            .collect();
        let ctx = Context::new(names);
        let mut gens = Generators { seed: seed.clone(), ctx, exchange: Vec::new() };
        gens.exchange = (0..n)
            .map(|j| gens.lift(&seed.exchange_polynomial(j)).expect("exchange polynomials are polynomials"))
            .collect();
        gens
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    fn n(&self) -> usize {
        self.seed.n()
    }

    pub fn x(&self, j: usize) -> GeneratorPoly {
        GeneratorPoly(LaurentPoly::var(&self.ctx, j))
    }

    pub fn x_prime(&self, j: usize) -> GeneratorPoly {
        GeneratorPoly(LaurentPoly::var(&self.ctx, self.n() + j))
    }

    pub fn constant(&self, c: impl Into<BigInt>) -> GeneratorPoly {
        GeneratorPoly(LaurentPoly::constant(&self.ctx, c))
    }

    /// Product of `x^a x'^b` with a frozen Laurent monomial coefficient.
    pub fn monomial(&self, unprimed: &[i64], primed: &[i64], frozen: &[i64], coef: impl Into<BigInt>) -> GeneratorPoly {
        let exp: Vec<i64> = unprimed.iter().chain(primed).chain(frozen).copied().collect();
        GeneratorPoly(LaurentPoly::monomial(&self.ctx, exp, coef))
    }

    pub fn from_poly(&self, p: LaurentPoly) -> Result<GeneratorPoly, BoundsError> {
        if p.context().names() != self.ctx.names() {
            return Err(BoundsError::ContextMismatch);
        }
        let n2 = 2 * self.n();
        if p.terms().any(|(e, _)| e[..n2].iter().any(|&k| k < 0)) {
            return Err(BoundsError::NotPolynomial);
        }
        Ok(GeneratorPoly(p))
    }

    pub fn from_json(&self, json: &PolyJson) -> Result<GeneratorPoly, BoundsError> {
        let p = LaurentPoly::from_json(json, Some(&self.ctx))?;
        self.from_poly(p)
    }

    /// Rewrites a seed-context polynomial (non-negative in cluster variables)
    /// in the generator ring without primed symbols.
    pub fn lift(&self, p: &LaurentPoly) -> Result<GeneratorPoly, BoundsError> {
        let n = self.n();
        let m = self.seed.m();
        let mut terms = Vec::with_capacity(p.len());
        for (e, c) in p.terms() {
            if e[..n].iter().any(|&k| k < 0) {
                return Err(BoundsError::NotPolynomial);
            }
            let mut g = vec![0i64; n + m];
            g[..n].copy_from_slice(&e[..n]);
            g[2 * n..].copy_from_slice(&e[n..]);
            terms.push((g, c.clone()));
        }
        Ok(GeneratorPoly(LaurentPoly::from_terms(&self.ctx, terms)))
    }

    /// Value in the seed's Laurent ring, with `x'_j = P_j / x_j`.
    pub fn to_laurent(&self, p: &GeneratorPoly) -> LaurentPoly {
        let n = self.n();
        let ctx = self.seed.context();
        let mut images: Vec<LaurentPoly> = (0..n).map(|j| LaurentPoly::var(ctx, j)).collect();
        for j in 0..n {
            let mut inv = vec![0i64; self.seed.m()];
            inv[j] = -1;
            images.push(&self.seed.exchange_polynomial(j) * &LaurentPoly::monomial(ctx, inv, 1));
        }
        images.extend((n..self.seed.m()).map(|i| LaurentPoly::var(ctx, i)));
        p.0.substitute(&images).expect("frozen images are unit monomials")
    }

    /// Replaces every `x_j x'_j` by `P_j` until no such product remains.
    pub fn straighten(&self, p: &GeneratorPoly) -> GeneratorPoly {
        let n = self.n();
        let mut current = p.0.clone();
        loop {
            let mut changed = false;
            let mut next = LaurentPoly::zero(&self.ctx);
            for (e, c) in current.terms() {
                match (0..n).find(|&j| e[j] > 0 && e[n + j] > 0) {
                    None => next = &next + &LaurentPoly::monomial(&self.ctx, e.clone(), c.clone()),
                    Some(j) => {
                        changed = true;
                        let t = e[j].min(e[n + j]);
                        let mut rest = e.clone();
                        rest[j] -= t;
                        rest[n + j] -= t;
                        let mono = LaurentPoly::monomial(&self.ctx, rest, c.clone());
                        next = &next + &(&mono * &self.exchange[j].0.pow(t as u32));
                    }
                }
            }
            current = next;
            if !changed {
                return GeneratorPoly(current);
            }
        }
    }

    pub fn is_standard(&self, p: &GeneratorPoly) -> bool {
        let n = self.n();
        p.0.terms().all(|(e, _)| (0..n).all(|j| e[j] == 0 || e[n + j] == 0))
    }
}

/// Standard monomials of an acyclic seed, relabeled so that `b_ij >= 0` for `i > j`.
#[derive(Debug, Clone)]
pub struct StandardMonomialBasis {
    order: Vec<usize>,
    seed: Seed,
}

impl StandardMonomialBasis {
    pub fn new(seed: &Seed) -> Result<Self, BoundsError> {
        let order = graphs::acyclic_order(seed.matrix()).ok_or(BoundsError::NotAcyclic)?;
        Ok(StandardMonomialBasis { seed: Seed::initial(seed.matrix().relabel(&order)), order })
    }

    /// New position `i` holds old variable `order[i]`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    /// `prod_j x_j^{m_j}` for `m_j >= 0` and `(x'_j)^{-m_j}` otherwise, as a Laurent polynomial.
    pub fn to_laurent(&self, m: &[i64]) -> LaurentPoly {
        let ctx = self.seed.context();
        let width = self.seed.m();
        let mut out = LaurentPoly::one(ctx);
        for (j, &mj) in m.iter().enumerate() {
            let mut e = vec![0i64; width];
            if mj >= 0 {
                e[j] = mj;
                out = &out * &LaurentPoly::monomial(ctx, e, 1);
            } else {
                e[j] = mj;
                let p = self.seed.exchange_polynomial(j).pow((-mj) as u32);
                out = &(&out * &p) * &LaurentPoly::monomial(ctx, e, 1);
            }
        }
        out
    }

    /// Lexicographically first exponent in the cluster variables.
    pub fn leading_exponent(&self, m: &[i64]) -> Vec<i64> {
        let n = self.seed.n();
        let p = self.to_laurent(m);
        p.terms().map(|(e, _)| e[..n].to_vec()).min().expect("standard monomials are nonzero")
    }
}

/// All integer vectors in `[-b, b]^n`, lexicographically.
pub fn box_points(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-b..=b).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome")]
pub enum Independence {
    /// Leading exponents of all standard monomials in the box are distinct.
    Independent { monomials: usize },
    /// Two standard monomials share a leading exponent.
    Collision { first: Vec<i64>, second: Vec<i64> },
    /// A nonzero combination of standard monomials vanishing in the Laurent ring,
    /// `prod_{i in cycle} x'_i - relation`.
    Dependent {
        cycle: Vec<usize>,
        #[serde(serialize_with = "ser_gen")]
        relation: GeneratorPoly,
    },
}

fn ser_gen<S: serde::Serializer>(g: &GeneratorPoly, s: S) -> Result<S::Ok, S::Error> {
    g.to_json().serialize(s)
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent { .. })
    }
}

/// For an acyclic seed, compares leading exponents over the box; otherwise
/// produces the linear dependency coming from a shortest oriented cycle.
pub fn check_independence(seed: &Seed, bound: i64) -> Result<Independence, BoundsError> {
    match StandardMonomialBasis::new(seed) {
        Ok(basis) => {
            let points = box_points(seed.n(), bound);
            let mut leads: Vec<(Vec<i64>, Vec<i64>)> =
                points.par_iter().map(|m| (basis.leading_exponent(m), m.clone())).collect();
            leads.sort();
            if let Some(w) = leads.windows(2).find(|w| w[0].0 == w[1].0) {
                return Ok(Independence::Collision { first: w[0].1.clone(), second: w[1].1.clone() });
            }
            Ok(Independence::Independent { monomials: points.len() })
        }
        Err(BoundsError::NotAcyclic) => {
            let cycle = shortest_cycle(seed).ok_or(BoundsError::NotAcyclic)?;
            let gens = Generators::new(seed);
            let relation = gens.straighten(&cycle_relation(&gens, &cycle)?);
            let product = cycle.iter().fold(gens.constant(1), |acc, &i| GeneratorPoly(&acc.0 * &gens.x_prime(i).0));
            let difference = GeneratorPoly(&product.0 - &relation.0);
            if !gens.is_standard(&product) || !gens.is_standard(&difference) {
                return Err(BoundsError::RelationFailed("not standard".into()));
            }
            if difference.is_zero() || !gens.to_laurent(&difference).is_zero() {
                return Err(BoundsError::RelationFailed("values differ".into()));
            }
            Ok(Independence::Dependent { cycle, relation })
        }
        Err(e) => Err(e),
    }
}

/// A shortest oriented cycle `c_0 -> c_1 -> ... -> c_0`.
pub fn shortest_cycle(seed: &Seed) -> Option<Vec<usize>> {
    let g = graphs::gamma(seed.matrix());
    let n = g.n;
    let mut succ = vec![Vec::new(); n];
    for &(i, j) in &g.edges {
        succ[i].push(j);
    }
    let mut best: Option<Vec<usize>> = None;
    for start in 0..n {
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([start]);
        let mut found = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for &w in &succ[v] {
                if w == start {
                    found = Some(v);
                    break 'bfs;
                }
                if parent[w] == usize::MAX && w != start {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if let Some(mut v) = found {
            let mut path = vec![v];
            while v != start {
                v = parent[v];
                path.push(v);
            }
            path.reverse();
            if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                best = Some(path);
            }
        }
    }
    best
}

/// Right side of `prod_{i in I} x'_i = sum_{K subset of I, K != I} f_K prod_{k in K} x'_k`
/// for an oriented cycle `I`, built from the alternating sum over subsets `J`
/// with `J` disjoint from its cyclic shift.
pub fn cycle_relation(gens: &Generators, cycle: &[usize]) -> Result<GeneratorPoly, BoundsError> {
    let seed = gens.seed();
    let ctx = seed.context();
    let l = cycle.len();
    let m = seed.m();
    let halves = |j: usize| {
        let mut plus = vec![0i64; m];
        let mut minus = vec![0i64; m];
        for i in 0..m {
            let b = seed.matrix().entry(i, j).to_i64().expect("small entries");
            if b > 0 {
                plus[i] = b;
            } else {
                minus[i] = -b;
            }
        }
        plus[j] -= 1;
        minus[j] -= 1;
        (LaurentPoly::monomial(ctx, minus, 1), LaurentPoly::monomial(ctx, plus, 1))
    };
    let uv: Vec<(LaurentPoly, LaurentPoly)> = cycle.iter().map(|&j| halves(j)).collect();
    let prod_u = uv.iter().fold(LaurentPoly::one(ctx), |acc, (u, _)| &acc * u);
    let prod_v = uv.iter().fold(LaurentPoly::one(ctx), |acc, (_, v)| &acc * v);
    let mut rhs = GeneratorPoly(&gens.lift(&prod_u)?.0 + &gens.lift(&prod_v)?.0);
    for mask in 1u32..(1 << l) {
        let shifted = ((mask << 1) | (mask >> (l - 1))) & ((1 << l) - 1);
        if mask & shifted != 0 {
            continue;
        }
        let covered = mask | shifted;
        let mut term = gens.constant(if mask.count_ones() % 2 == 1 { 1 } else { -1 });
        for k in 0..l {
            if mask & (1 << k) != 0 {
                let pair = &uv[k].0 * &uv[(k + 1) % l].1;
                term = GeneratorPoly(&term.0 * &gens.lift(&pair)?.0);
            } else if covered & (1 << k) == 0 {
                term = GeneratorPoly(&term.0 * &gens.x_prime(cycle[k]).0);
            }
        }
        rhs = GeneratorPoly(&rhs.0 + &term.0);
    }
    Ok(rhs)
}

/// Left side of the alternating-sum identity over a cyclically ordered set of
/// `size` elements, in variables `u_1..u_size, v_1..v_size`.
pub fn diffcomb_lhs(size: usize) -> LaurentPoly {
    let ctx = diffcomb_context(size);
    let u = |i: usize| LaurentPoly::var(&ctx, i);
    let v = |i: usize| LaurentPoly::var(&ctx, size + i);
    let succ = |i: usize| (i + 1) % size;
    let mut total = LaurentPoly::zero(&ctx);
    for mask in 0u64..(1 << size) {
        let in_j = |i: usize| mask & (1 << i) != 0;
        let in_shift = |i: usize| (0..size).any(|k| in_j(k) && succ(k) == i);
        if (0..size).any(|i| in_j(i) && in_shift(i)) {
            continue;
        }
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        let mut term = LaurentPoly::constant(&ctx, sign);
        for i in 0..size {
            if in_j(i) {
                term = &term * &(&u(i) * &v(succ(i)));
            } else if !in_shift(i) {
                term = &term * &(&u(i) + &v(i));
            }
        }
        total = &total + &term;
    }
    total
}

fn diffcomb_context(size: usize) -> Arc<Context> {
    Context::new((1..=size).map(|i| format!("u{i}")).chain((1..=size).map(|i| format!("v{i}"))))
}

/// Checks the identity `lhs = prod u_i + prod v_i` by exact expansion.
pub fn diffcomb_check(size: usize) -> bool {
    if size == 0 {
        return false;
    }
    let ctx = diffcomb_context(size);
    let rhs = &LaurentPoly::monomial(&ctx, (0..2 * size).map(|i| i64::from(i < size)).collect(), 1)
        + &LaurentPoly::monomial(&ctx, (0..2 * size).map(|i| i64::from(i >= size)).collect(), 1);
    diffcomb_lhs(size) == rhs
}

/// `c_{-m} = P_j^m * quotient` in the expansion in `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityCertificate {
    pub direction: usize,
    pub power: i64,
    pub quotient: LaurentPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperMembership {
    pub member: bool,
    /// Why membership fails, if it does.
    pub reason: Option<String>,
    pub certificates: Vec<DivisibilityCertificate>,
}

/// Membership in the upper bound: the element is a Laurent polynomial in the
/// cluster, and for each direction `j` every coefficient `c_{-m}` of `x_j^{-m}`
/// is divisible by `P_j^m`.
pub fn upper_bound_member(y: &RatFunc, seed: &Seed) -> Result<UpperMembership, BoundsError> {
    if y.numerator().context().names() != seed.context().names() {
        return Err(BoundsError::ContextMismatch);
    }
    let Some(laurent) = y.to_laurent() else {
        return Ok(UpperMembership {
            member: false,
            reason: Some("not a Laurent polynomial in the cluster".into()),
            certificates: Vec::new(),
        });
    };
    let per_direction: Vec<Result<Vec<DivisibilityCertificate>, (usize, i64)>> = (0..seed.n())
        .into_par_iter()
        .map(|j| {
            let p = seed.exchange_polynomial(j);
            let mut certs = Vec::new();
            for (power, coeff) in laurent.expand_in_variable(j) {
                if power >= 0 {
                    continue;
                }
                let m = -power;
                let q = coeff.divide_exact(&p.pow(m as u32)).map_err(|_| (j, m))?;
                certs.push(DivisibilityCertificate { direction: j, power: m, quotient: q });
            }
            certs.reverse();
            Ok(certs)
        })
        .collect();
    let mut certificates = Vec::new();
    for r in per_direction {
        match r {
            Ok(c) => certificates.extend(c),
            Err((j, m)) => {
                return Ok(UpperMembership {
                    member: false,
                    reason: Some(format!("coefficient of x{}^-{m} is not divisible by P{}^{m}", j + 1, j + 1)),
                    certificates,
                })
            }
        }
    }
    Ok(UpperMembership { member: true, reason: None, certificates })
}

/// The three-variable element of degree zero for the seed with exchange matrix
/// `[[0,2,-2],[-2,0,2],[2,-2,0]]` and generic coefficients.
pub fn markov_degree_zero_element(seed: &Seed) -> LaurentPoly {
    let ctx = seed.context();
    let idx = |name: &str| ctx.index_of(name).expect("generic coefficient labels");
    let term = |x: &str, p: &[&str]| {
        let mut e = vec![0i64; ctx.len()];
        e[idx(x)] += 2;
        for q in p {
            e[idx(q)] += 1;
        }
        e[idx("x1")] -= 1;
        e[idx("x2")] -= 1;
        LaurentPoly::monomial(ctx, e, BigInt::one())
    };
    &(&term("x1", &["p1+", "p2+"]) + &term("x2", &["p1-", "p2-"])) + &term("x3", &["p1+", "p2-"])
}
