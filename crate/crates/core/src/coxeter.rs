//! Finite root systems and Weyl groups from Cartan matrices.
//!
//! Conventions: `a[i][j] = <alpha_i^vee, alpha_j>`, simple reflections act by
//! `s_i(beta) = beta - <alpha_i^vee, beta> alpha_i`, and Weyl words use
//! 1-based letters. Labels follow Bourbaki (`B_r` has `alpha_r` short, `D_r`
//! branches at `r-2`).

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::seeds::{int_matrix, skew_symmetrizer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("unknown Cartan type `{0}`")]
    UnknownType(String),
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("root closure exceeded {0} roots; not of finite type")]
    NotFiniteType(usize),
    #[error("the Dynkin graph is not a connected tree")]
    NotBipartiteTree,
    #[error("subset description of weights exists only in type A")]
    SubsetFormOnlyTypeA,
    #[error("letter {letter} out of range for rank {rank}")]
    LetterOutOfRange { letter: usize, rank: usize },
}

const ROOT_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    name: String,
    a: Vec<Vec<i64>>,
    d: Vec<i64>,
    roots: Vec<Vec<i64>>,
    type_a: bool,
}

fn type_a_matrix(r: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0; r]; r];
    for i in 0..r {
        a[i][i] = 2;
        if i + 1 < r {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

fn link(a: &mut [Vec<i64>], i: usize, j: usize) {
    a[i][j] = -1;
    a[j][i] = -1;
}

impl CartanData {
    /// Parses descriptors such as `A2`, `B3`, `C3`, `D4`, `E6`, `F4`, `G2`.
    pub fn from_type(desc: &str) -> Result<Self, CoxeterError> {
        let unknown = || CoxeterError::UnknownType(desc.to_string());
        let desc = desc.trim();
        let mut chars = desc.chars();
        let family = chars.next().ok_or_else(unknown)?.to_ascii_uppercase();
        let r: usize = chars.as_str().parse().map_err(|_| unknown())?;
        let mut a = type_a_matrix(r);
        match (family, r) {
            ('A', 1..) => {}
            ('B', 2..) => a[r - 1][r - 2] = -2,
            ('C', 2..) => a[r - 2][r - 1] = -2,
            ('D', 4..) => {
                a[r - 2][r - 1] = 0;
                a[r - 1][r - 2] = 0;
                link(&mut a, r - 3, r - 1);
            }
            ('E', 6..=8) => {
                // Bourbaki: 1-3-4-5-...-r with 2 attached to 4.
                a = type_a_matrix(r);
                for i in 0..r - 1 {
                    a[i][i + 1] = 0;
                    a[i + 1][i] = 0;
                }
                link(&mut a, 0, 2);
                link(&mut a, 1, 3);
                for i in 2..r - 1 {
                    link(&mut a, i, i + 1);
                }
            }
            ('F', 4) => a[2][1] = -2,
            ('G', 2) => a[0][1] = -3,
            _ => return Err(unknown()),
        }
        let mut c = Self::from_matrix(a)?;
        c.name = format!("{family}{r}");
        Ok(c)
    }

    pub fn from_matrix(a: Vec<Vec<i64>>) -> Result<Self, CoxeterError> {
        let r = a.len();
        let bad = |m: &str| Err(CoxeterError::InvalidCartan(m.to_string()));
        if r == 0 || a.iter().any(|row| row.len() != r) {
            return bad("matrix must be square and nonempty");
        }
        for i in 0..r {
            if a[i][i] != 2 {
                return bad("diagonal entries must be 2");
            }
            for j in 0..r {
                if i != j && (a[i][j] > 0 || (a[i][j] == 0) != (a[j][i] == 0)) {
                    return bad("off-diagonal entries must be non-positive with a symmetric zero pattern");
                }
            }
        }
        // d_i a_ij = d_j a_ji is skew-symmetrizability of the sign-adjusted off-diagonal part.
        let signed: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => a[i][j],
                        std::cmp::Ordering::Greater => -a[i][j],
                        std::cmp::Ordering::Equal => 0,
                    })
                    .collect()
            })
            .collect();
        let d = skew_symmetrizer(&int_matrix(&signed))
            .ok_or_else(|| CoxeterError::InvalidCartan("not symmetrizable".into()))?
            .iter()
            .map(|v| i64::try_from(v).expect("small symmetrizer"))
            .collect();
        let type_a = a == type_a_matrix(r);
        let mut c = CartanData {
            name: format!("rank{r}"),
            a,
            d,
            roots: Vec::new(),
            type_a,
        };
        c.roots = c.generate_roots()?;
        Ok(c)
    }

    fn generate_roots(&self) -> Result<Vec<Vec<i64>>, CoxeterError> {
        let r = self.rank();
        let simple: Vec<Vec<i64>> = (0..r).map(|i| unit(r, i)).collect();
        let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
        let mut order = simple.clone();
        let mut queue: VecDeque<Vec<i64>> = simple.into();
        while let Some(beta) = queue.pop_front() {
            for i in 0..r {
                let gamma = self.reflect(i, &beta);
                if gamma.iter().all(|&c| c >= 0) && seen.insert(gamma.clone()) {
                    if seen.len() > ROOT_CAP {
                        return Err(CoxeterError::NotFiniteType(ROOT_CAP));
                    }
                    order.push(gamma.clone());
                    queue.push_back(gamma);
                }
            }
        }
        order.sort_by_key(|b| (b.iter().sum::<i64>(), b.clone()));
        Ok(order)
    }

    /// `s_i(beta)` in simple-root coordinates (0-based `i`).
    fn reflect(&self, i: usize, beta: &[i64]) -> Vec<i64> {
        let pairing: i64 = (0..self.rank()).map(|j| self.a[i][j] * beta[j]).sum();
        let mut out = beta.to_vec();
        out[i] -= pairing;
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    /// `a_ij` for 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.a[i - 1][j - 1]
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.d
    }

    /// Positive roots ordered by height.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn is_type_a(&self) -> bool {
        self.type_a
    }

    pub fn identity(&self) -> WeylElement {
        let r = self.rank();
        WeylElement {
            matrix: (0..r).map(|i| unit(r, i)).collect(),
            perm: self.type_a.then(|| (0..=r).collect()),
            length: 0,
        }
    }

    fn check_letter(&self, letter: usize) -> Result<(), CoxeterError> {
        if letter == 0 || letter > self.rank() {
            Err(CoxeterError::LetterOutOfRange { letter, rank: self.rank() })
        } else {
            Ok(())
        }
    }

    /// `w * s_i` for a 1-based letter.
    pub fn times_reflection(&self, w: &WeylElement, letter: usize) -> Result<WeylElement, CoxeterError> {
        self.check_letter(letter)?;
        let i = letter - 1;
        let r = self.rank();
        // Column j of w*s_i is w(s_i(alpha_j)) = w(alpha_j) - a_ij w(alpha_i).
        let mut matrix = w.matrix.clone();
        for j in 0..r {
            let f = self.a[i][j];
            if f != 0 {
                for row in 0..r {
                    matrix[row][j] = w.matrix[row][j] - f * w.matrix[row][i];
                }
            }
        }
        let perm = w.perm.as_ref().map(|p| {
            let mut p = p.clone();
            p.swap(i, i + 1);
            p
        });
        let ascent = w.matrix.iter().all(|row| row[i] >= 0);
        let length = if ascent { w.length + 1 } else { w.length - 1 };
        Ok(WeylElement { matrix, perm, length })
    }

    /// Product `s_{w_1} s_{w_2} ...` of a word.
    pub fn element(&self, word: &[usize]) -> Result<WeylElement, CoxeterError> {
        word.iter()
            .try_fold(self.identity(), |w, &l| self.times_reflection(&w, l))
    }

    pub fn multiply(&self, u: &WeylElement, v: &WeylElement) -> WeylElement {
        let r = self.rank();
        let matrix: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| (0..r).map(|k| u.matrix[i][k] * v.matrix[k][j]).sum()).collect())
            .collect();
        let perm = match (&u.perm, &v.perm) {
            (Some(p), Some(q)) => Some(q.iter().map(|&x| p[x]).collect()),
            _ => None,
        };
        self.element_unchecked(matrix, perm)
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        let mut word = self.reduced_word(w);
        word.reverse();
        self.element(&word).expect("valid letters")
    }

    fn element_unchecked(&self, matrix: Vec<Vec<i64>>, perm: Option<Vec<usize>>) -> WeylElement {
        let length = self
            .roots
            .iter()
            .filter(|beta| apply(&matrix, beta).iter().all(|&c| c <= 0))
            .count();
        WeylElement { matrix, perm, length }
    }

    /// One reduced word, by repeatedly stripping right descents.
    pub fn reduced_word(&self, w: &WeylElement) -> Vec<usize> {
        let mut cur = w.clone();
        let mut word = Vec::new();
        while cur.length > 0 {
            let i = (0..self.rank())
                .find(|&i| cur.matrix.iter().all(|row| row[i] <= 0))
                .expect("nonidentity element has a right descent");
            cur = self.times_reflection(&cur, i + 1).expect("valid letter");
            word.push(i + 1);
        }
        word.reverse();
        word
    }

    pub fn is_reduced(&self, word: &[usize]) -> Result<bool, CoxeterError> {
        Ok(self.element(word)?.length == word.len())
    }

    /// Longest element by greedy ascent, with the reduced word found along the way.
    pub fn longest_element(&self) -> (WeylElement, Vec<usize>) {
        let mut w = self.identity();
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank()).find(|&i| w.matrix.iter().all(|row| row[i] >= 0)) {
            w = self.times_reflection(&w, i + 1).expect("valid letter");
            word.push(i + 1);
        }
        (w, word)
    }

    /// Product of all simple reflections in the given 1-based order.
    pub fn coxeter_element(&self, ordering: &[usize]) -> Result<WeylElement, CoxeterError> {
        let mut sorted = ordering.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=self.rank()).collect::<Vec<_>>() {
            return Err(CoxeterError::InvalidCartan("ordering must list every index once".into()));
        }
        self.element(ordering)
    }

    /// Multiplicative order of `s_1 s_2 ... s_r`.
    pub fn coxeter_number(&self) -> usize {
        let order: Vec<usize> = (1..=self.rank()).collect();
        let c = self.coxeter_element(&order).expect("full ordering");
        let id = self.identity();
        let mut p = c.clone();
        let mut h = 1;
        while p.matrix != id.matrix {
            p = self.multiply(&p, &c);
            h += 1;
        }
        h
    }

    /// The reduced word `i_- i_+ i_- ...` with `h` segments for the longest element,
    /// where `i_-` holds the side of the bipartition containing vertex 1.
    pub fn bipartite_longest_word(&self) -> Result<Vec<usize>, CoxeterError> {
        let r = self.rank();
        let adjacent = |i: usize, j: usize| i != j && self.a[i][j] != 0;
        let edges = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).filter(|&(i, j)| adjacent(i, j)).count();
        let mut color: Vec<Option<bool>> = vec![None; r];
        color[0] = Some(false);
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for j in 0..r {
                if adjacent(i, j) && color[j].is_none() {
                    color[j] = Some(!color[i].unwrap());
                    queue.push_back(j);
                }
            }
        }
        if edges + 1 != r || color.iter().any(Option::is_none) {
            return Err(CoxeterError::NotBipartiteTree);
        }
        let minus: Vec<usize> = (0..r).filter(|&i| color[i] == Some(false)).map(|i| i + 1).collect();
        let plus: Vec<usize> = (0..r).filter(|&i| color[i] == Some(true)).map(|i| i + 1).collect();
        let h = self.coxeter_number();
        let word: Vec<usize> = (0..h)
            .flat_map(|s| if s % 2 == 0 { minus.clone() } else { plus.clone() })
            .collect();
        debug_assert!(self.is_reduced(&word).unwrap_or(false));
        debug_assert_eq!(word.len(), self.roots.len());
        Ok(word)
    }

    /// The set `w([1,i])` for type A, 1-based and sorted.
    pub fn apply_to_fundamental(&self, w: &WeylElement, i: usize) -> Result<Vec<usize>, CoxeterError> {
        let perm = w.perm.as_ref().ok_or(CoxeterError::SubsetFormOnlyTypeA)?;
        self.check_letter(i)?;
        let mut s: Vec<usize> = perm[..i].iter().map(|&x| x + 1).collect();
        s.sort_unstable();
        Ok(s)
    }
}

fn unit(r: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; r];
    v[i] = 1;
    v
}

fn apply(matrix: &[Vec<i64>], beta: &[i64]) -> Vec<i64> {
    matrix
        .iter()
        .map(|row| row.iter().zip(beta).map(|(a, b)| a * b).sum())
        .collect()
}

/// A Weyl group element as its matrix on simple-root coordinates (column `j`
/// holds `w(alpha_j)`), with a permutation view in type A.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    matrix: Vec<Vec<i64>>,
    perm: Option<Vec<usize>>,
    length: usize,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// 0-based images `w(0), ..., w(r)` in type A.
    pub fn permutation(&self) -> Option<&[usize]> {
        self.perm.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// Image of a vector in simple-root coordinates.
    pub fn apply(&self, beta: &[i64]) -> Vec<i64> {
        apply(&self.matrix, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cartan(s: &str) -> CartanData {
        CartanData::from_type(s).unwrap()
    }

    #[test]
    fn root_counts_by_closure() {
        for (t, n) in [("A1", 1), ("A2", 3), ("A3", 6), ("B2", 4), ("C3", 9), ("B3", 9), ("D4", 12), ("G2", 6), ("F4", 24), ("E6", 36), ("E7", 63), ("E8", 120)] {
            assert_eq!(cartan(t).positive_roots().len(), n, "{t}");
        }
    }

    #[test]
    fn b2_conventions() {
        let b2 = cartan("B2");
        assert_eq!(b2.matrix(), &[vec![2, -1], vec![-2, 2]]);
        assert_eq!(b2.symmetrizer(), &[2, 1]);
        assert_eq!(cartan("G2").symmetrizer(), &[1, 3]);
    }

    #[test]
    fn affine_matrix_is_not_finite() {
        let affine = vec![vec![2, -2], vec![-2, 2]];
        assert_eq!(CartanData::from_matrix(affine), Err(CoxeterError::NotFiniteType(ROOT_CAP)));
        assert!(CartanData::from_type("D3").is_err());
        assert!(CartanData::from_matrix(vec![vec![2, -1], vec![0, 2]]).is_err());
    }

    #[test]
    fn reducedness_and_longest_elements() {
        let a2 = cartan("A2");
        assert!(a2.is_reduced(&[1, 2, 1]).unwrap());
        assert!(!a2.is_reduced(&[1, 1]).unwrap());
        let (w0, word) = a2.longest_element();
        assert_eq!(w0.length(), 3);
        assert_eq!(a2.element(&[1, 2, 1]).unwrap(), a2.element(&[2, 1, 2]).unwrap());
        assert_eq!(a2.element(&word).unwrap(), w0);
        for t in ["A4", "B3", "D4", "G2", "F4", "E6"] {
            let c = cartan(t);
            let (w0, word) = c.longest_element();
            assert_eq!(w0.length(), c.positive_roots().len());
            assert_eq!(word.len(), w0.length());
            assert!(c.multiply(&w0, &w0).is_identity());
        }
    }

    #[test]
    fn coxeter_numbers() {
        for (t, h) in [("A2", 3), ("A3", 4), ("A4", 5), ("B2", 4), ("D4", 6), ("G2", 6), ("E8", 30)] {
            assert_eq!(cartan(t).coxeter_number(), h, "{t}");
        }
    }

    #[test]
    fn bipartite_words() {
        assert_eq!(cartan("A4").bipartite_longest_word().unwrap(), vec![1, 3, 2, 4, 1, 3, 2, 4, 1, 3]);
        assert_eq!(
            cartan("A5").bipartite_longest_word().unwrap(),
            vec![1, 3, 5, 2, 4, 1, 3, 5, 2, 4, 1, 3, 5, 2, 4]
        );
        assert_eq!(
            cartan("D4").bipartite_longest_word().unwrap(),
            vec![1, 3, 4, 2, 1, 3, 4, 2, 1, 3, 4, 2]
        );
        for t in ["B3", "C4", "E6", "F4", "G2", "A6"] {
            let c = cartan(t);
            let w = c.bipartite_longest_word().unwrap();
            assert!(c.is_reduced(&w).unwrap());
            assert_eq!(w.len(), c.positive_roots().len());
        }
    }

    #[test]
    fn fundamental_subsets_in_type_a() {
        let a2 = cartan("A2");
        assert_eq!(a2.apply_to_fundamental(&a2.identity(), 2).unwrap(), vec![1, 2]);
        assert_eq!(a2.apply_to_fundamental(&a2.longest_element().0, 1).unwrap(), vec![3]);
        assert_eq!(a2.apply_to_fundamental(&a2.element(&[1, 2]).unwrap(), 2).unwrap(), vec![2, 3]);
        let b2 = cartan("B2");
        assert_eq!(b2.apply_to_fundamental(&b2.identity(), 1), Err(CoxeterError::SubsetFormOnlyTypeA));
    }

    #[test]
    fn inverse_and_reduced_word() {
        let c = cartan("B3");
        let w = c.element(&[1, 2, 3, 2, 1, 3]).unwrap();
        let inv = c.inverse(&w);
        assert!(c.multiply(&w, &inv).is_identity());
        assert_eq!(c.element(&c.reduced_word(&w)).unwrap(), w);
    }

    fn inversions(p: &[usize]) -> usize {
        (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn permutation_and_matrix_lengths_agree(word in prop::collection::vec(1usize..5, 0..14)) {
            let c = cartan("A4");
            let w = c.element(&word).unwrap();
            prop_assert_eq!(w.length(), inversions(w.permutation().unwrap()));
        }
    }

    proptest! {
        #[test]
        fn lengths_are_subadditive(u in prop::collection::vec(1usize..4, 0..8), v in prop::collection::vec(1usize..4, 0..8)) {
            let c = cartan("C3");
            let (x, y) = (c.element(&u).unwrap(), c.element(&v).unwrap());
            let xy = c.multiply(&x, &y);
            prop_assert!(xy.length() <= x.length() + y.length());
            let ru = c.reduced_word(&x);
            let rv = c.reduced_word(&y);
            let joined: Vec<usize> = ru.iter().chain(&rv).copied().collect();
            prop_assert_eq!(xy.length() == x.length() + y.length(), c.is_reduced(&joined).unwrap());
            prop_assert_eq!(c.element(&joined).unwrap(), xy);
        }
    }
}
