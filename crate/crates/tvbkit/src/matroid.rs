//! Matroids of linear ideals and their tropical combinatorics.
//!
//! A linear ideal is given by the coefficient matrix of a minimal generating
//! set of linear forms in `m` variables. Its matroid declares a subset of
//! variables independent when no nonzero form of the ideal is supported
//! inside it. On top of that sit circuits, flats, flags of flats, tropical
//! membership, apartments, and initial matroids for weight vectors.

use crate::exact::{QMatrix, Rat, ZMatrix};
use itertools::Itertools;
use num_traits::Zero;

/// Coefficient matrix of a minimal generating set of a linear ideal:
/// `(m - r)` rows, `m` columns.
#[derive(Clone, Debug)]
pub struct LinearIdealMatrix {
    pub coeffs: QMatrix,
}

impl LinearIdealMatrix {
    pub fn new(coeffs: QMatrix) -> Result<Self, String> {
        for i in 0..coeffs.rows {
            if coeffs.row(i).iter().all(|x| x.is_zero()) {
                return Err(format!("generator row {i} is zero"));
            }
        }
        if coeffs.rank() != coeffs.rows {
            return Err("generator rows are linearly dependent".into());
        }
        Ok(LinearIdealMatrix { coeffs })
    }

    pub fn num_vars(&self) -> usize {
        self.coeffs.cols
    }
}

/// A circuit: a minimal-support nonzero vector of the row space, with its
/// coefficient vector normalized so the first nonzero entry is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub support: Vec<usize>,
    pub coefficients: Vec<Rat>,
}

/// A flat, stored as a sorted element list.
pub type Flat = Vec<usize>;

/// A maximal flag of flats, stored largest-first; `chain[0]` is the full
/// ground set and the chain has length equal to the matroid rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagOfFlats {
    pub chain: Vec<Flat>,
}

#[derive(Clone, Debug)]
pub struct Matroid {
    pub ground_size: usize,
    pub rank: usize,
    pub backing: LinearIdealMatrix,
    circuits: Vec<Circuit>,
}

pub fn matroid_from_coefficients(backing: LinearIdealMatrix) -> Matroid {
    let m = backing.num_vars();
    let rank = m - backing.coeffs.rows;
    let mut matroid = Matroid { ground_size: m, rank, backing, circuits: Vec::new() };
    matroid.circuits = matroid.compute_circuits();
    matroid
}

impl Matroid {
    /// Rank of a subset of the ground set.
    ///
    /// The forms supported inside `s` are the row-space vectors vanishing on
    /// the complement, so `rank(s) = |s| - (corank - rank of the complement
    /// columns)`.
    pub fn subset_rank(&self, s: &[usize]) -> usize {
        let corank = self.backing.coeffs.rows;
        let comp: Vec<usize> = (0..self.ground_size).filter(|i| !s.contains(i)).collect();
        let comp_rank = self.backing.coeffs.submatrix_cols(&comp).rank();
        s.len() - (corank - comp_rank)
    }

    pub fn is_independent(&self, s: &[usize]) -> bool {
        self.subset_rank(s) == s.len()
    }

    pub fn is_basis(&self, s: &[usize]) -> bool {
        s.len() == self.rank && self.is_independent(s)
    }

    fn compute_circuits(&self) -> Vec<Circuit> {
        let m = self.ground_size;
        let mut circuits = Vec::new();
        let mut supports: Vec<Vec<usize>> = Vec::new();
        // Circuits have at most rank + 1 elements.
        for size in 1..=(self.rank + 1).min(m) {
            for s in (0..m).combinations(size) {
                if self.is_independent(&s) {
                    continue;
                }
                if supports.iter().any(|c| c.iter().all(|e| s.contains(e))) {
                    continue;
                }
                supports.push(s.clone());
                circuits.push(self.circuit_on_support(&s));
            }
        }
        circuits
    }

    /// The (unique up to scale) row-space vector supported on a circuit.
    fn circuit_on_support(&self, s: &[usize]) -> Circuit {
        let comp: Vec<usize> = (0..self.ground_size).filter(|i| !s.contains(i)).collect();
        // x^T C vanishes on the complement columns iff x is in the kernel of
        // the transposed complement submatrix.
        let k = self.backing.coeffs.submatrix_cols(&comp).transpose().kernel_basis();
        assert_eq!(k.rows, 1, "support {s:?} is not a circuit");
        let v = QMatrix::from_rows(vec![k.row(0).to_vec()]).mul(&self.backing.coeffs);
        let mut coeffs = v.row(0).to_vec();
        let lead = coeffs.iter().find(|x| !x.is_zero()).unwrap().clone();
        for c in coeffs.iter_mut() {
            *c = &*c / &lead;
        }
        let support: Vec<usize> =
            (0..self.ground_size).filter(|&j| !coeffs[j].is_zero()).collect();
        assert_eq!(support, s, "circuit support mismatch");
        Circuit { support: s.to_vec(), coefficients: coeffs }
    }

    pub fn circuits(&self) -> &[Circuit] {
        &self.circuits
    }

    pub fn closure(&self, s: &[usize]) -> Flat {
        let base = self.subset_rank(s);
        let mut flat: Vec<usize> = s.to_vec();
        for e in 0..self.ground_size {
            if flat.contains(&e) {
                continue;
            }
            let mut t = s.to_vec();
            t.push(e);
            if self.subset_rank(&t) == base {
                flat.push(e);
            }
        }
        flat.sort();
        flat
    }

    /// All flats of rank `rank - 1` (hyperplanes).
    pub fn maximal_proper_flats(&self) -> Vec<Flat> {
        assert!(self.rank >= 1, "rank-0 matroid has no proper flats");
        let non_loops: Vec<usize> =
            (0..self.ground_size).filter(|&e| !self.is_loop(e)).collect();
        let mut out: Vec<Flat> = Vec::new();
        for s in non_loops.iter().copied().combinations(self.rank - 1) {
            if !self.is_independent(&s) {
                continue;
            }
            let f = self.closure(&s);
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out.sort();
        out
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.subset_rank(&[e]) == 0
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        let rest: Vec<usize> = (0..self.ground_size).filter(|&i| i != e).collect();
        self.subset_rank(&rest) == self.rank - 1
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.ground_size).filter(|&e| self.is_loop(e)).collect()
    }

    pub fn coloops(&self) -> Vec<usize> {
        (0..self.ground_size).filter(|&e| self.is_coloop(e)).collect()
    }

    pub fn is_uniform(&self) -> bool {
        (0..self.ground_size)
            .combinations(self.rank)
            .all(|s| self.is_independent(&s))
    }

    pub fn has_unique_basis(&self) -> bool {
        (0..self.ground_size).all(|e| self.is_loop(e) || self.is_coloop(e))
    }

    /// Whether `w` lies on the tropicalized linear space: every circuit
    /// attains its minimum weight over the support at least twice.
    pub fn trop_membership(&self, w: &[Rat]) -> bool {
        assert_eq!(w.len(), self.ground_size);
        self.circuits.iter().all(|c| {
            let min = c.support.iter().map(|&j| &w[j]).min().unwrap();
            c.support.iter().filter(|&&j| &w[j] == min).count() >= 2
        })
    }

    /// The fundamental circuit of `e` with respect to basis `b` (the unique
    /// circuit inside `b ∪ {e}`), for `e` not in `b`.
    pub fn fundamental_circuit(&self, b: &[usize], e: usize) -> &Circuit {
        self.circuits
            .iter()
            .find(|c| c.support.contains(&e) && c.support.iter().all(|j| *j == e || b.contains(j)))
            .expect("no fundamental circuit: not a basis")
    }

    /// Whether `w` lies in the apartment of basis `b`: each non-basis
    /// coordinate equals the minimum over the basis support of its
    /// fundamental-circuit expression.
    pub fn apartment_membership(&self, b: &[usize], w: &[Rat]) -> Result<bool, String> {
        if !self.is_basis(b) {
            return Err(format!("{b:?} is not a basis"));
        }
        for e in 0..self.ground_size {
            if b.contains(&e) {
                continue;
            }
            let c = self.fundamental_circuit(b, e);
            let others: Vec<&Rat> =
                c.support.iter().filter(|&&j| j != e).map(|&j| &w[j]).collect();
            let Some(min) = others.into_iter().min() else {
                // A loop has the empty expression; no coordinate can match.
                return Ok(false);
            };
            if &w[e] != min {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Matroid of the initial ideal at weight `w`, computed from the initial
    /// forms of the circuits (a universal Gröbner basis).
    pub fn initial_matroid(&self, w: &[Rat]) -> Matroid {
        assert_eq!(w.len(), self.ground_size);
        let mut rows = Vec::new();
        for c in &self.circuits {
            let min = c.support.iter().map(|&j| &w[j]).min().unwrap().clone();
            let row: Vec<Rat> = (0..self.ground_size)
                .map(|j| {
                    if c.support.contains(&j) && w[j] == min {
                        c.coefficients[j].clone()
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            rows.push(row);
        }
        let basis = QMatrix::from_rows(rows).row_space_basis();
        matroid_from_coefficients(LinearIdealMatrix::new(basis).expect("initial span basis"))
    }

    /// The flag of closures of prefixes of an ordered basis, largest-first.
    pub fn flag_from_order(&self, order: &[usize]) -> Result<FlagOfFlats, String> {
        if !self.is_basis(order) {
            return Err(format!("{order:?} is not a basis"));
        }
        let mut chain = vec![(0..self.ground_size).collect::<Vec<_>>()];
        for k in (1..self.rank).rev() {
            chain.push(self.closure(&order[..k]));
        }
        Ok(FlagOfFlats { chain })
    }

    /// If the descending level sets of `w` close up to a strictly nested
    /// chain of exactly `rank` flats, return that flag.
    pub fn row_in_open_maximal_face(&self, w: &[Rat]) -> Option<FlagOfFlats> {
        let mut values: Vec<&Rat> = w.iter().collect();
        values.sort();
        values.dedup();
        values.reverse();
        let mut chain: Vec<Flat> = Vec::new();
        for v in values {
            let level: Vec<usize> = (0..self.ground_size).filter(|&i| &w[i] >= v).collect();
            let f = self.closure(&level);
            if chain.last() != Some(&f) {
                chain.push(f);
            }
        }
        if chain.len() != self.rank {
            return None;
        }
        if chain.last().map(|f| f.len()) != Some(self.ground_size) {
            return None;
        }
        chain.reverse();
        Some(FlagOfFlats { chain })
    }
}

impl FlagOfFlats {
    /// 0/1 matrix with row `k` the indicator vector of the `k`-th flat in
    /// the chain (largest first, so row 0 is all ones).
    pub fn indicator_matrix(&self, m: usize) -> ZMatrix {
        let rows = self
            .chain
            .iter()
            .map(|f| {
                (0..m)
                    .map(|j| if f.contains(&j) { 1.into() } else { 0.into() })
                    .collect()
            })
            .collect();
        ZMatrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    fn hyperplane3() -> Matroid {
        matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[1, 1, 1]])).unwrap(),
        )
    }

    fn q(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn hyperplane_matroid_basics() {
        let m = hyperplane3();
        assert_eq!(m.rank, 2);
        for s in (0..3).combinations(2) {
            assert!(m.is_independent(&s));
        }
        assert!(!m.is_independent(&[0, 1, 2]));
        assert!(m.loops().is_empty());
        assert!(m.coloops().is_empty());
        assert!(m.is_uniform());
        assert!(!m.has_unique_basis());
    }

    #[test]
    fn identity_ideal_all_loops() {
        let m = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::identity(3)).unwrap(),
        );
        assert_eq!(m.rank, 0);
        assert_eq!(m.loops(), vec![0, 1, 2]);
    }

    #[test]
    fn circuits_hyperplane_and_split() {
        let m = hyperplane3();
        assert_eq!(m.circuits().len(), 1);
        assert_eq!(m.circuits()[0].support, vec![0, 1, 2]);
        assert_eq!(m.circuits()[0].coefficients, q(&[1, 1, 1]));

        let split = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[1, 0, 1, 0], &[0, 1, 0, 1]])).unwrap(),
        );
        let supports: Vec<_> = split.circuits().iter().map(|c| c.support.clone()).collect();
        assert_eq!(supports, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn uniform_u24_circuits() {
        let m = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[1, 1, 1, 1], &[1, 2, 3, 4]])).unwrap(),
        );
        assert!(m.is_uniform());
        let supports: Vec<_> = m.circuits().iter().map(|c| c.support.len()).collect();
        assert_eq!(m.circuits().len(), 4);
        assert!(supports.iter().all(|&s| s == 3));
    }

    #[test]
    fn closure_cases() {
        let m = hyperplane3();
        assert_eq!(m.closure(&[]), Vec::<usize>::new());
        assert_eq!(m.closure(&[0]), vec![0]);
        // ⟨y_2 + y_3⟩ on three variables: closing {1} picks up 2.
        let m2 = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[0, 1, 1]])).unwrap(),
        );
        assert_eq!(m2.closure(&[1]), vec![1, 2]);
        assert_eq!(m2.maximal_proper_flats(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn maximal_proper_flats_uniform() {
        let m = hyperplane3();
        assert_eq!(m.maximal_proper_flats(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn coloop_and_unique_basis() {
        let m2 = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[0, 1, 1]])).unwrap(),
        );
        assert_eq!(m2.coloops(), vec![0]);
        assert!(!m2.has_unique_basis());
        // Monomial initial ideal ⟨y_2⟩: loop {1}, coloops {0, 2}.
        let m3 = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[0, 1, 0]])).unwrap(),
        );
        assert_eq!(m3.loops(), vec![1]);
        assert!(m3.has_unique_basis());
    }

    #[test]
    fn trop_membership_cases() {
        let m = hyperplane3();
        assert!(m.trop_membership(&q(&[3, 0, 0])));
        assert!(!m.trop_membership(&q(&[0, 1, 2])));
        assert!(m.trop_membership(&q(&[5, 5, 5])));
    }

    #[test]
    fn apartment_cases() {
        let m = hyperplane3();
        assert_eq!(m.apartment_membership(&[0, 1], &q(&[0, 0, 0])), Ok(true));
        assert_eq!(m.apartment_membership(&[0, 1], &q(&[3, 0, 0])), Ok(true));
        assert_eq!(m.apartment_membership(&[1, 2], &q(&[3, 0, 0])), Ok(false));
        assert!(m.apartment_membership(&[0, 1, 2], &q(&[0, 0, 0])).is_err());
    }

    #[test]
    fn initial_matroid_cases() {
        let m = hyperplane3();
        // Trivial weight keeps the full circuit.
        let m0 = m.initial_matroid(&q(&[0, 0, 0]));
        assert_eq!(m0.circuits().len(), 1);
        assert_eq!(m0.circuits()[0].support, vec![0, 1, 2]);
        // Weight (9, 0, 0): initial form is y_2 + y_3.
        let m1 = m.initial_matroid(&q(&[9, 0, 0]));
        assert_eq!(m1.rank, 2);
        assert_eq!(m1.circuits()[0].support, vec![1, 2]);
        // Unique minimum gives a variable (a loop).
        let m2 = m.initial_matroid(&q(&[1, 1, 0]));
        assert_eq!(m2.loops(), vec![2]);
        assert_eq!(m2.rank, 2);
    }

    #[test]
    fn flags_and_indicators() {
        let m = hyperplane3();
        let f = m.flag_from_order(&[0, 1]).unwrap();
        assert_eq!(f.chain, vec![vec![0, 1, 2], vec![0]]);
        let e = f.indicator_matrix(3);
        assert_eq!(e.row_vecs(), ZMatrix::from_i64(&[&[1, 1, 1], &[1, 0, 0]]).row_vecs());
        assert!(m.flag_from_order(&[0]).is_err());
    }

    #[test]
    fn open_face_detection() {
        let m = hyperplane3();
        let f = m.row_in_open_maximal_face(&q(&[1, 0, 0])).unwrap();
        assert_eq!(f.chain, vec![vec![0, 1, 2], vec![0]]);
        assert!(m.row_in_open_maximal_face(&q(&[0, 0, 0])).is_none());
        let f2 = m.row_in_open_maximal_face(&q(&[2, 0, 0])).unwrap();
        assert_eq!(f2.chain.len(), 2);
    }

    #[test]
    fn closure_idempotent() {
        let m = matroid_from_coefficients(
            LinearIdealMatrix::new(QMatrix::from_i64(&[&[1, 1, 1, 0], &[0, 1, 2, 3]])).unwrap(),
        );
        for s in (0..4).powerset() {
            let c = m.closure(&s);
            assert_eq!(m.closure(&c), c);
            assert!(s.iter().all(|e| c.contains(e)));
        }
    }
}
