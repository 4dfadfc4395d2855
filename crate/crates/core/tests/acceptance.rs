//! The twelve acceptance criteria, each run against its time budget.
//!
//! Run with `cargo test --release -p clusterforge --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clusterforge::bounds::{
    check_independence, diffcomb_check, markov_degree_zero_element, upper_bound_member, Generators, Independence,
};
use clusterforge::coxeter::CartanData;
use clusterforge::double_bruhat::{
    all_minors_positive, btilde_direct, build_btilde, coxeter_closed_forms, coxeter_word, sample_cell, sample_positive,
    sl3_closed_forms, tp_criterion_check, verify_cell_identities, CellSample, DoubleWord, IndexedWord,
};
use clusterforge::graphs::{classify_finite_type, explore_exchange_graph, is_acyclic, Classification};
use clusterforge::poly::{LaurentPoly, RatFunc};
use clusterforge::seeds::{int_matrix, ExchangeMatrix, Matrix, Seed};
use clusterforge::tropical::{delta_witness, not_in_lower_bound_certificate, propagate_valuation, Valuation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Outcome {
    passed: bool,
    soft: bool,
}

fn criterion(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Check) -> Outcome {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) if elapsed <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over budget {budget:?}")),
        Err(e) => (false, e),
    };
    let soft = detail.starts_with("WARN");
    println!("{} [{id:>2}] {title} ({elapsed:.2?}): {detail}", if passed { "PASS" } else { "FAIL" });
    Outcome { passed, soft }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn det(m: &[Vec<BigRational>]) -> BigRational {
    let mut a = m.to_vec();
    let n = a.len();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let (top, rest) = a.split_at_mut(c + 1);
        for row in rest {
            let f = &row[c] / &top[c][c];
            for (x, y) in row[c..].iter_mut().zip(&top[c][c..]) {
                *x -= &f * y;
            }
        }
    }
    d
}

/// Minor of `g` on 1-based row and column sets.
fn minor(g: &CellSample, rows: &[usize], cols: &[usize]) -> BigRational {
    let m = g.matrix();
    det(&rows.iter().map(|&i| cols.iter().map(|&j| m[i - 1][j - 1].clone()).collect()).collect::<Vec<_>>())
}

fn golden_sl3() -> Matrix {
    int_matrix(&[
        [-1, 1, 0, 0],
        [1, 0, 0, 0],
        [0, -1, 1, 0],
        [1, 0, -1, 1],
        [-1, 1, 0, -1],
        [0, -1, 1, 0],
        [0, 1, 0, -1],
        [0, 0, 0, 1],
    ])
}

fn cartan(t: &str) -> CartanData {
    CartanData::from_type(t).unwrap()
}

fn word(letters: &[i32]) -> DoubleWord {
    DoubleWord::new(letters.to_vec())
}

fn sl3() -> (IndexedWord, CartanData) {
    let a2 = cartan("A2");
    (IndexedWord::new(&word(&[1, 2, 1, -1, -2, -1]), &a2).unwrap(), a2)
}

fn b_of(letters: &[i32], t: &str) -> ExchangeMatrix {
    let c = cartan(t);
    let iw = IndexedWord::new(&word(letters), &c).unwrap();
    ExchangeMatrix::square(build_btilde(&iw, &c).principal()).unwrap()
}

fn example_b() -> ExchangeMatrix {
    ExchangeMatrix::square(int_matrix(&[[0, -1, 1, 0], [1, 0, -1, 1], [-1, 1, 0, -1], [0, -1, 1, 0]])).unwrap()
}

fn markov_matrix() -> Matrix {
    int_matrix(&[[0, 2, -2], [-2, 0, 2], [2, -2, 0]])
}

fn c1() -> Check {
    let (iw, a2) = sl3();
    let built = build_btilde(&iw, &a2);
    let direct = btilde_direct(&iw, &a2);
    ensure(built.entries == golden_sl3(), "edge construction differs from the golden matrix")?;
    ensure(direct.entries == golden_sl3(), "closed formula differs from the golden matrix")?;
    ensure(built.rows == vec![-2, -1, 1, 2, 3, 4, 5, 6] && built.cols == vec![1, 2, 3, 4], "row or column labels")?;
    Ok("both constructions give the 8x4 golden matrix".into())
}

fn shuffles(a: &[i32], b: &[i32]) -> Vec<Vec<i32>> {
    if a.is_empty() || b.is_empty() {
        return vec![a.iter().chain(b).copied().collect()];
    }
    let mut out = Vec::new();
    for mut rest in shuffles(&a[1..], b) {
        rest.insert(0, a[0]);
        out.push(rest);
    }
    for mut rest in shuffles(a, &b[1..]) {
        rest.insert(0, b[0]);
        out.push(rest);
    }
    out
}

fn random_reduced(c: &CartanData, rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut w = Vec::new();
    for _ in 0..4 * len {
        if w.len() == len {
            break;
        }
        let mut cand = w.clone();
        cand.push(rng.gen_range(1..=c.rank()));
        if c.is_reduced(&cand).unwrap() {
            w = cand;
        }
    }
    w
}

fn c2() -> Check {
    let a2 = cartan("A2");
    let mut count = 0;
    for u in [[1, 2, 1], [2, 1, 2]] {
        for v in [[1, 2, 1], [2, 1, 2]] {
            let neg: Vec<i32> = u.iter().map(|&x| -x).collect();
            for letters in shuffles(&neg, &v) {
                let iw = IndexedWord::new(&word(&letters), &a2).map_err(|e| e.to_string())?;
                ensure(build_btilde(&iw, &a2) == btilde_direct(&iw, &a2), format!("mismatch on {letters:?}"))?;
                count += 1;
            }
        }
    }
    ensure(count == 80, format!("{count} A2 words"))?;
    let a3 = cartan("A3");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (lu, lv) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        let u: Vec<i32> = random_reduced(&a3, &mut rng, lu).iter().map(|&x| -(x as i32)).collect();
        let v: Vec<i32> = random_reduced(&a3, &mut rng, lv).iter().map(|&x| x as i32).collect();
        let mut letters = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < u.len() || j < v.len() {
            if j == v.len() || (i < u.len() && rng.gen_bool(0.5)) {
                letters.push(u[i]);
                i += 1;
            } else {
                letters.push(v[j]);
                j += 1;
            }
        }
        let iw = IndexedWord::new(&word(&letters), &a3).map_err(|e| e.to_string())?;
        ensure(build_btilde(&iw, &a3) == btilde_direct(&iw, &a3), format!("mismatch on {letters:?}"))?;
    }
    Ok("80 A2 words and 200 random A3 words agree".into())
}

fn mutation_walk(b: &ExchangeMatrix, steps: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let rank = b.rank();
    let mut cur = b.clone();
    for _ in 0..steps {
        let k = rng.gen_range(0..cur.n());
        let next = cur.mutate(k).map_err(|e| e.to_string())?;
        ensure(next.mutate(k).map_err(|e| e.to_string())? == cur, "mutation is not an involution")?;
        ensure(next.rank() == rank, "rank changed")?;
        cur = next;
    }
    Ok(())
}

fn c3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (iw, a2) = sl3();
    let fig = build_btilde(&iw, &a2).to_exchange_matrix().map_err(|e| e.to_string())?;
    ensure(fig.rank() == 4, "golden matrix should have full rank")?;
    mutation_walk(&fig, 1000, &mut rng)?;
    for _ in 0..100 {
        let d: Vec<i64> = (0..5).map(|_| rng.gen_range(1..=2)).collect();
        let mut rows = vec![vec![0i64; 5]; 8];
        for i in 0..5 {
            for j in i + 1..5 {
                let s = rng.gen_range(-2..=2);
                rows[i][j] = s * d[j];
                rows[j][i] = -s * d[i];
            }
        }
        for row in rows.iter_mut().skip(5) {
            row.iter_mut().for_each(|x| *x = rng.gen_range(-2..=2));
        }
        let b = ExchangeMatrix::with_default_labels(5, int_matrix(&rows)).map_err(|e| e.to_string())?;
        mutation_walk(&b, 10, &mut rng)?;
    }
    Ok("1000 mutations of the golden matrix and 100 random 8x5 matrices".into())
}

fn c4() -> Check {
    let (iw, a2) = sl3();
    let seed = build_btilde(&iw, &a2).seed().map_err(|e| e.to_string())?;
    let r = explore_exchange_graph(&seed, 10_000).map_err(|e| e.to_string())?.report;
    ensure(r.exhausted, "exploration did not close")?;
    ensure(r.clusters == 50 && r.cluster_variables == 16, format!("{} clusters, {} variables", r.clusters, r.cluster_variables))?;
    Ok("50 clusters, 16 cluster variables, all exchanges exact".into())
}

fn expect_finite(b: &ExchangeMatrix, name: &str) -> Result<(), String> {
    match classify_finite_type(b, 100_000).map_err(|e| e.to_string())? {
        Classification::Finite { dynkin, .. } if dynkin == name => Ok(()),
        other => Err(format!("expected {name}, got {other}")),
    }
}

fn c5() -> Check {
    let start = Instant::now();
    expect_finite(&example_b(), "D4")?;
    expect_finite(&ExchangeMatrix::square(int_matrix(&[[0, 0], [0, 0]])).unwrap(), "A1^2")?;
    expect_finite(&ExchangeMatrix::square(int_matrix(&[[0; 3]; 3])).unwrap(), "A1^3")?;
    expect_finite(&b_of(&[-1, -2, -3, 3, 2, 1], "A3"), "A3")?;
    expect_finite(&b_of(&[1, 2, 1], "A2"), "A1")?;
    expect_finite(&b_of(&[1, 3, 2, 1, 3, 2], "A3"), "A3")?;
    let a4 = cartan("A4");
    let w: Vec<i32> = a4.bipartite_longest_word().unwrap().iter().map(|&x| x as i32).collect();
    expect_finite(&b_of(&w, "A4"), "D6")?;
    expect_finite(&b_of(&[1, 2, 1, 2], "B2"), "B2")?;
    ensure(start.elapsed() < Duration::from_secs(120), "a classification exceeded its budget")?;
    Ok("D4, A1^2, A1^3, A3, A1, A3, D6, B2".into())
}

fn c6() -> Check {
    let markov = ExchangeMatrix::square(markov_matrix()).unwrap();
    match classify_finite_type(&markov, 100_000).map_err(|e| e.to_string())? {
        Classification::Infinite { depth: 0, weight: 4, .. } => {}
        other => return Err(format!("3-cycle of double arrows: {other}")),
    }
    let mut warnings = Vec::new();
    let a5: Vec<i32> = [1, 3, 5, 2, 4].repeat(3);
    let open = [-1, -3, -2, -1, -3, -2, 1, 3, 2, 1, 3, 2];
    for (name, b) in [("A5 base affine", b_of(&a5, "A5")), ("A3 open cell", b_of(&open, "A3"))] {
        match classify_finite_type(&b, 100_000).map_err(|e| e.to_string())? {
            Classification::Infinite { .. } => {}
            Classification::Inconclusive { explored, .. } => warnings.push(format!("{name} inconclusive after {explored}")),
            Classification::Finite { dynkin, .. } => return Err(format!("{name} classified as {dynkin}")),
        }
    }
    if warnings.is_empty() {
        Ok("all three infinite within the cap".into())
    } else {
        Ok(format!("WARN {}", warnings.join("; ")))
    }
}

fn c7() -> Check {
    for k in 1..=5 {
        ensure(diffcomb_check(k), format!("identity fails for |I| = {k}"))?;
    }
    Ok("identity holds for |I| = 1..5".into())
}

fn c8() -> Check {
    let acyclic = example_b().mutate(1).unwrap();
    ensure(is_acyclic(&acyclic), "mutated matrix should be acyclic")?;
    let seed = Seed::with_generic_coefficients(acyclic.principal()).unwrap();
    match check_independence(&seed, 2).map_err(|e| e.to_string())? {
        Independence::Independent { monomials: 625 } => {}
        other => return Err(format!("acyclic seed: {other:?}")),
    }
    let markov = Seed::with_generic_coefficients(markov_matrix()).unwrap();
    let Independence::Dependent { cycle, relation } = check_independence(&markov, 1).map_err(|e| e.to_string())? else {
        return Err("no dependency on the cyclic seed".into());
    };
    let g = Generators::new(&markov);
    let triple = g.monomial(&[0, 0, 0], &[1, 1, 1], &[0; 6], 1);
    let difference = g.from_poly(triple.poly() - relation.poly()).map_err(|e| e.to_string())?;
    ensure(!difference.is_zero() && g.to_laurent(&difference).is_zero(), "x'1x'2x'3 relation")?;
    ensure(g.is_standard(&relation) && cycle.len() == 3, "relation is not in standard form")?;
    Ok("625 distinct leading exponents; x'1x'2x'3 dependency exhibited".into())
}

fn c9() -> Check {
    let markov = Seed::with_generic_coefficients(markov_matrix()).unwrap();
    let y = markov_degree_zero_element(&markov);
    let m = upper_bound_member(&RatFunc::from_laurent(y.clone()), &markov).map_err(|e| e.to_string())?;
    ensure(m.member, "y should lie in the upper bound")?;
    let mut vacuous = Vec::new();
    for j in 0..3 {
        let negative: Vec<(i64, LaurentPoly)> = y.expand_in_variable(j).into_iter().filter(|(p, _)| *p < 0).collect();
        if negative.is_empty() {
            vacuous.push(j + 1);
        }
        for (p, coeff) in negative {
            let c = m
                .certificates
                .iter()
                .find(|c| c.direction == j && c.power == -p)
                .ok_or(format!("no certificate for x{}^{p}", j + 1))?;
            ensure(&markov.exchange_polynomial(j).pow(c.power as u32) * &c.quotient == coeff, "certificate does not multiply back")?;
        }
    }
    let ctx = markov.context();
    let inverse = RatFunc::new(LaurentPoly::one(ctx), LaurentPoly::var(ctx, 0)).unwrap();
    ensure(!upper_bound_member(&inverse, &markov).unwrap().member, "1/x1 accepted")?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let seeds = [
        Seed::with_generic_coefficients(int_matrix(&[[0, 2], [-3, 0]])).unwrap(),
        Seed::with_generic_coefficients(int_matrix(&[[0, 1, 1], [-1, 0, 1], [-1, -1, 0]])).unwrap(),
    ];
    for i in 0..50 {
        let s = &seeds[i % 2];
        let g = Generators::new(s);
        let (n, f) = (s.n(), s.m() - s.n());
        let mut p = LaurentPoly::zero(g.context());
        for _ in 0..rng.gen_range(1..4) {
            let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let b: Vec<i64> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let c: Vec<i64> = (0..f).map(|_| rng.gen_range(-1..2)).collect();
            p = &p + g.monomial(&a, &b, &c, rng.gen_range(-3i64..=3)).poly();
        }
        let p = g.from_poly(p).unwrap();
        let y = RatFunc::from_laurent(g.to_laurent(&p));
        ensure(upper_bound_member(&y, s).unwrap().member, format!("lower-bound element {p} rejected"))?;
    }
    Ok(format!(
        "y certified in every direction ({} negative powers, none in direction {vacuous:?}); 1/x1 rejected; 50 lower-bound elements accepted",
        m.certificates.len()
    ))
}

fn c10() -> Check {
    let markov = Seed::with_generic_coefficients(markov_matrix()).unwrap();
    let tree = propagate_valuation(&markov, &[q(1), q(1), q(1)], 5).map_err(|e| e.to_string())?;
    ensure(tree.vertices.len() == 94, "tree of depth 5 has 94 vertices")?;
    ensure(tree.vertices.iter().all(|v| v.values.iter().all(|x| *x == q(1))), "valuation not constant")?;
    let v = Valuation::on_cluster(&markov, &[q(1), q(1), q(1)]).unwrap();
    let y = markov_degree_zero_element(&markov);
    let cert = not_in_lower_bound_certificate(&y, &markov, &v).map_err(|e| e.to_string())?;
    ensure(cert.value == q(0), "y should have value 0")?;
    let w = delta_witness(markov.matrix(), 6, &[q(0), q(0), q(1)]).map_err(|e| e.to_string())?;
    ensure(w.minima.len() == 8 && w.strictly_decreasing, "minima not strictly decreasing")?;
    let shown: Vec<String> = w.minima[..7].iter().map(ToString::to_string).collect();
    Ok(format!("constant valuation to depth 5; certificate valid; delta minima {}", shown.join(" > ")))
}

/// `w(S)` for a permutation given by images of `1..=n` and a set `S`.
fn act(perm: &[usize], set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&k| perm[k - 1]).collect();
    out.sort_unstable();
    out
}

/// The permutation `s_1 s_2 ... s_r` of `1..=r+1`.
fn coxeter_permutation(r: usize) -> Vec<usize> {
    (1..=r + 1)
        .map(|k| {
            let mut x = k;
            for i in (1..=r).rev() {
                if x == i {
                    x = i + 1;
                } else if x == i + 1 {
                    x = i;
                }
            }
            x
        })
        .collect()
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p - 1] = i + 1;
    }
    inv
}

/// Exchange relations `D_l D'_l = prod D_k^{b_kl, +} + prod D_k^{b_kl, -}` on the
/// golden matrix with chamber minors and mutated variables written out by hand.
fn sl3_relations_hold(g: &CellSample) -> Result<(), String> {
    let chamber: [(i64, &[usize], &[usize]); 8] = [
        (-2, &[1, 2], &[2, 3]),
        (-1, &[1], &[3]),
        (1, &[1], &[2]),
        (2, &[1, 2], &[1, 2]),
        (3, &[1], &[1]),
        (4, &[2], &[1]),
        (5, &[2, 3], &[1, 2]),
        (6, &[3], &[1]),
    ];
    let d: Vec<BigRational> = chamber.iter().map(|(_, r, c)| minor(g, r, c)).collect();
    let x = |i: usize, j: usize| g.matrix()[i - 1][j - 1].clone();
    let quartic = x(1, 2) * x(2, 1) * x(3, 3) - x(1, 2) * x(2, 3) * x(3, 1) - x(1, 3) * x(2, 1) * x(3, 2) + x(1, 3) * x(2, 2) * x(3, 1);
    let mutated = [minor(g, &[1, 2], &[1, 3]), quartic, x(2, 2), minor(g, &[1, 3], &[1, 2])];
    let b = golden_sl3();
    for (l, new) in mutated.iter().enumerate() {
        let (mut plus, mut minus) = (BigRational::one(), BigRational::one());
        for (k, row) in b.iter().enumerate() {
            let e = &row[l];
            let p = num_traits::pow(d[k].clone(), num_traits::ToPrimitive::to_usize(&num_traits::Signed::abs(e)).unwrap());
            if *e > BigInt::zero() {
                plus *= p;
            } else if *e < BigInt::zero() {
                minus *= p;
            }
        }
        ensure(&d[l + 2] * new == plus + minus, format!("relation at position {}", l + 1))?;
    }
    Ok(())
}

/// Relations for `(c, c)` in type `A_r`, with `D'_j` the leading principal minor.
fn coxeter_relations_hold(g: &CellSample, r: usize) -> Result<(), String> {
    let c = coxeter_permutation(r);
    let ci = inverse(&c);
    let id: Vec<usize> = (1..=r + 1).collect();
    let delta = |u: &[usize], v: &[usize], j: usize| {
        let base: Vec<usize> = (1..=j).collect();
        minor(g, &act(u, &base), &act(v, &base))
    };
    for j in 1..=r {
        let lhs = delta(&c, &ci, j) * delta(&id, &id, j);
        let mut second = BigRational::one();
        if j < r {
            second *= delta(&id, &ci, j + 1);
        }
        if j > 1 {
            second *= delta(&c, &id, j - 1);
        }
        let rhs = delta(&id, &ci, j) * delta(&c, &id, j) + second;
        ensure(lhs == rhs, format!("(c,c) relation at j = {j} in rank {r}"))?;
    }
    Ok(())
}

fn c11() -> Check {
    let (iw, a2) = sl3();
    let report = verify_cell_identities(&iw, &a2, 100, 11, &sl3_closed_forms()).map_err(|e| e.to_string())?;
    ensure(report.closed_forms_checked == 400, format!("{} closed forms checked", report.closed_forms_checked))?;
    for s in 0..100u64 {
        let g = sample_cell(&iw, &a2, 11 * 1_000_003 + s).map_err(|e| e.to_string())?;
        sl3_relations_hold(&g)?;
    }
    for rank in [2, 3] {
        let t = cartan(&format!("A{rank}"));
        let cw = IndexedWord::new(&coxeter_word(rank), &t).unwrap();
        verify_cell_identities(&cw, &t, 100, 12, &coxeter_closed_forms(rank)).map_err(|e| e.to_string())?;
        for s in 0..100u64 {
            let g = sample_cell(&cw, &t, 12 * 1_000_003 + s).map_err(|e| e.to_string())?;
            coxeter_relations_hold(&g, rank)?;
        }
    }
    Ok("100 SL3 samples: relations and closed forms exact; (c,c) relations in A2 and A3".into())
}

fn c12() -> Check {
    let (iw, a2) = sl3();
    let seed = build_btilde(&iw, &a2).seed().map_err(|e| e.to_string())?;
    let clusters = explore_exchange_graph(&seed, 10).map_err(|e| e.to_string())?.seeds;
    ensure(clusters.len() == 10, "fewer than 10 clusters")?;
    let report = tp_criterion_check(&iw, &a2, 50, 12, &clusters).map_err(|e| e.to_string())?;
    for s in 0..50u64 {
        let g = sample_positive(&iw, &a2, 12 * 1_000_003 + s).map_err(|e| e.to_string())?;
        ensure(all_minors_positive(&g), format!("sample {s} is not totally positive"))?;
    }
    Ok(format!("50 samples, {} minors and {} cluster checks positive", report.minors_checked, report.clusters_checked))
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let outcomes = [
        criterion(1, "golden extended exchange matrix", Duration::from_millis(10), c1),
        criterion(2, "edge construction matches closed formula", secs(5), c2),
        criterion(3, "mutation is an involution preserving rank", secs(5), c3),
        criterion(4, "exchange graph census", secs(60), c4),
        criterion(5, "finite-type classification", secs(8 * 120), c5),
        criterion(6, "infinite-type witnesses", secs(3 * 120), c6),
        criterion(7, "alternating subset identity", secs(2), c7),
        criterion(8, "standard monomials", secs(10), c8),
        criterion(9, "upper-bound membership", secs(10), c9),
        criterion(10, "tropical certificates", secs(5), c10),
        criterion(11, "double-cell relations", secs(30), c11),
        criterion(12, "total positivity", secs(30), c12),
    ];
    let soft = outcomes.iter().filter(|o| o.soft).count();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed, {soft} soft", outcomes.len() - failed);
    assert_eq!(failed, 0);
}
