//! Exact rational and integer linear algebra.
//!
//! Everything downstream (matroids, cones, lattice points, class groups)
//! reduces to the primitives here: rank and kernels over the rationals,
//! Hermite and Smith normal forms over the integers, and exact solving of
//! integer linear systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        QMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn submatrix_cols(&self, cols: &[usize]) -> Self {
        let rows = (0..self.rows)
            .map(|i| cols.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        QMatrix::from_rows(rows)
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(r, j, b);
                    m.set(p, j, a);
                }
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per row of the result.
    pub fn kernel_basis(&self) -> QMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::new();
        for &f in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(k, f).clone();
            }
            rows.push(v);
        }
        if rows.is_empty() {
            QMatrix { rows: 0, cols: self.cols, data: vec![] }
        } else {
            QMatrix::from_rows(rows)
        }
    }

    /// Basis of the row space (rows of the rref restricted to nonzero rows).
    pub fn row_space_basis(&self) -> QMatrix {
        let (r, pivots) = self.rref();
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        QMatrix::from_rows(rows)
    }

    /// A particular solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut aug = QMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r.get(k, self.cols).clone();
        }
        Some(x)
    }
}

/// Dense row-major matrix over the integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl ZMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ZMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        ZMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn to_q(&self) -> QMatrix {
        QMatrix::from_rows(
            (0..self.rows)
                .map(|i| self.row(i).iter().map(|x| Rat::from_integer(x.clone())).collect())
                .collect(),
        )
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ZMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        // Fraction-free Bareiss elimination.
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return Int::zero();
                };
                for j in 0..n {
                    let a = m.get(k, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(k, j, b);
                    m.set(p, j, a);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, Int::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }

    /// Row Hermite normal form: returns `(h, u)` with `h = u * self`,
    /// `u` unimodular, `h` in row echelon form with positive pivots and
    /// entries above each pivot reduced modulo it.
    pub fn row_hnf(&self) -> (ZMatrix, ZMatrix) {
        let mut h = self.clone();
        let mut u = ZMatrix::identity(self.rows);
        let mut r = 0;
        for c in 0..h.cols {
            if r == h.rows {
                break;
            }
            // Clear the column below row r with gcd row operations.
            loop {
                let Some(p) = (r..h.rows).filter(|&i| !h.get(i, c).is_zero()).min_by_key(|&i| h.get(i, c).abs()) else {
                    break;
                };
                if p != r {
                    h.swap_rows(p, r);
                    u.swap_rows(p, r);
                }
                let mut done = true;
                let pivot = h.get(r, c).clone();
                for i in r + 1..h.rows {
                    if h.get(i, c).is_zero() {
                        continue;
                    }
                    let q = h.get(i, c).div_floor(&pivot);
                    h.add_scaled_row(i, r, &-q.clone());
                    u.add_scaled_row(i, r, &-q);
                    if !h.get(i, c).is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h.get(r, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            let pivot = h.get(r, c).clone();
            for i in 0..r {
                let q = h.get(i, c).div_floor(&pivot);
                if !q.is_zero() {
                    h.add_scaled_row(i, r, &-q.clone());
                    u.add_scaled_row(i, r, &-q);
                }
            }
            r += 1;
        }
        (h, u)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            let x = self.get(a, j).clone();
            let y = self.get(b, j).clone();
            self.set(a, j, y);
            self.set(b, j, x);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// row[i] += f * row[k]
    fn add_scaled_row(&mut self, i: usize, k: usize, f: &Int) {
        for j in 0..self.cols {
            let v = self.get(i, j) + f * self.get(k, j);
            self.set(i, j, v);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            let x = self.get(i, a).clone();
            let y = self.get(i, b).clone();
            self.set(i, a, y);
            self.set(i, b, x);
        }
    }

    /// col[j] += f * col[k]
    fn add_scaled_col(&mut self, j: usize, k: usize, f: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, j) + f * self.get(i, k);
            self.set(i, j, v);
        }
    }

    /// Smith normal form: returns `(diag, u, v)` with `u * self * v`
    /// diagonal; `diag` holds the elementary divisors (nonneg, each
    /// dividing the next, trailing zeros dropped).
    pub fn smith(&self) -> (Vec<Int>, ZMatrix, ZMatrix) {
        let mut a = self.clone();
        let mut u = ZMatrix::identity(self.rows);
        let mut v = ZMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        let mut t = 0;
        while t < n {
            // Find a nonzero entry in the remaining block.
            let mut found = None;
            'outer: for i in t..a.rows {
                for j in t..a.cols {
                    if !a.get(i, j).is_zero() {
                        found = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((pi, pj)) = found else { break };
            if pi != t {
                a.swap_rows(pi, t);
                u.swap_rows(pi, t);
            }
            if pj != t {
                a.swap_cols(pj, t);
                v.swap_cols(pj, t);
            }
            loop {
                let mut clean = true;
                for i in t + 1..a.rows {
                    if !a.get(i, t).is_zero() {
                        let q = a.get(i, t).div_floor(a.get(t, t));
                        a.add_scaled_row(i, t, &-q.clone());
                        u.add_scaled_row(i, t, &-q);
                        if !a.get(i, t).is_zero() {
                            a.swap_rows(i, t);
                            u.swap_rows(i, t);
                            clean = false;
                        }
                    }
                }
                for j in t + 1..a.cols {
                    if !a.get(t, j).is_zero() {
                        let q = a.get(t, j).div_floor(a.get(t, t));
                        a.add_scaled_col(j, t, &-q.clone());
                        v.add_scaled_col(j, t, &-q);
                        if !a.get(t, j).is_zero() {
                            a.swap_cols(j, t);
                            v.swap_cols(j, t);
                            clean = false;
                        }
                    }
                }
                if clean {
                    break;
                }
            }
            // Ensure divisibility into the remaining block.
            let pivot = a.get(t, t).clone();
            let mut fixed = true;
            'div: for i in t + 1..a.rows {
                for j in t + 1..a.cols {
                    if !(a.get(i, j) % &pivot).is_zero() {
                        a.add_scaled_row(t, i, &Int::one());
                        u.add_scaled_row(t, i, &Int::one());
                        fixed = false;
                        break 'div;
                    }
                }
            }
            if fixed {
                if a.get(t, t).is_negative() {
                    a.negate_row(t);
                    u.negate_row(t);
                }
                t += 1;
            }
        }
        let diag: Vec<Int> = (0..t).map(|i| a.get(i, i).clone()).collect();
        (diag, u, v)
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> ZMatrix {
        assert_eq!(self.rows, self.cols);
        let q = self.to_q();
        let n = self.rows;
        let mut aug = QMatrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, q.get(i, j).clone());
            }
            aug.set(i, n + i, Rat::one());
        }
        let (r, pivots) = aug.rref();
        assert_eq!(pivots.len(), n, "matrix is singular");
        let mut out = ZMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = r.get(i, n + j);
                assert!(v.is_integer(), "matrix is not unimodular");
                out.set(i, j, v.to_integer());
            }
        }
        out
    }

    /// Basis of the lattice of integer solutions of `self * x = 0`,
    /// one vector per row of the result.
    pub fn integer_kernel(&self) -> ZMatrix {
        let (h, u) = self.transpose().row_hnf();
        let rank = (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
        let rows: Vec<Vec<Int>> = (rank..u.rows).map(|i| u.row(i).to_vec()).collect();
        if rows.is_empty() {
            ZMatrix { rows: 0, cols: self.cols, data: vec![] }
        } else {
            ZMatrix::from_rows(rows)
        }
    }

    /// A particular integer solution of `self * x = b`, if one exists.
    pub fn integer_solve(&self, b: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(self.rows, b.len());
        // x^T A^T = b^T; bring A^T to row HNF and forward-substitute.
        let (h, u) = self.transpose().row_hnf();
        let mut y = vec![Int::zero(); h.rows];
        let mut b = b.to_vec();
        for i in 0..h.rows {
            let Some(c) = h.row(i).iter().position(|x| !x.is_zero()) else {
                continue;
            };
            if b[c].is_zero() {
                continue;
            }
            let (q, r) = b[c].div_rem(h.get(i, c));
            if !r.is_zero() {
                return None;
            }
            for j in 0..h.cols {
                b[j] -= &q * h.get(i, j);
            }
            y[i] = q;
        }
        if b.iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![Int::zero(); self.cols];
        for i in 0..u.rows {
            if y[i].is_zero() {
                continue;
            }
            for j in 0..u.cols {
                x[j] += &y[i] * u.get(i, j);
            }
        }
        Some(x)
    }
}

/// Whether the rows of `v` extend to a basis of the full integer lattice
/// (all elementary divisors equal 1).
pub fn hermite_extends_to_lattice_basis(v: &ZMatrix) -> Result<bool, String> {
    if v.to_q().rank() != v.rows {
        return Err("rows are linearly dependent".into());
    }
    let (diag, _, _) = v.smith();
    Ok(diag.iter().all(|d| d.is_one()))
}

/// gcd of a slice, nonnegative; 0 for an empty or all-zero slice.
pub fn gcd_all(xs: &[Int]) -> Int {
    xs.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

/// Scale a rational vector to a primitive integer vector with the same
/// direction. Zero vectors map to zero.
pub fn primitive(v: &[Rat]) -> Vec<Int> {
    if v.iter().all(|x| x.is_zero()) {
        return vec![Int::zero(); v.len()];
    }
    let denom_lcm = v
        .iter()
        .fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * (&denom_lcm / x.denom())).collect();
    let g = gcd_all(&ints);
    ints.iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}
