//! Exact rational cones, lattice polytopes, Hilbert bases, and affine
//! monoids.
//!
//! Cones keep both a generator and a halfspace description, converted by the
//! double description method with explicit lineality handling. Polytopes are
//! given by equalities and inequalities; their lattice points are enumerated
//! after an integer parametrization of the equality system. Affine monoids
//! carry a grading that certifies membership searches terminate.

use crate::exact::{dot, dot_int, int, primitive, to_rat_vec, Int, QMatrix, Rat, ZMatrix};
use num_traits::{Signed, ToPrimitive, Zero};

/// A rational polyhedral cone with both descriptions kept consistent.
///
/// `rays` are extremal, primitive, and sorted; `lineality` is a lattice
/// basis of the lineality space; `halfspaces` are irredundant (facet
/// normals, plus paired `±h` rows when the cone is not full-dimensional).
#[derive(Clone, Debug)]
pub struct QCone {
    pub dim: usize,
    rays: Vec<Vec<Int>>,
    lineality: Vec<Vec<Int>>,
    halfspaces: Vec<Vec<Int>>,
}

fn canon_int_vec(v: &[Rat]) -> Vec<Int> {
    primitive(v)
}

fn sort_dedup(mut vs: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    vs.retain(|v| v.iter().any(|x| !x.is_zero()));
    vs.sort();
    vs.dedup();
    vs
}

/// Double description: from halfspace rows to (lineality basis, extremal
/// rays). Halfspaces are inserted in sorted order for determinism.
fn dd(dim: usize, halfspaces: &[Vec<Int>]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let hs = sort_dedup(halfspaces.to_vec());
    let mut lin: Vec<Vec<Int>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { int(1) } else { int(0) }).collect())
        .collect();
    let mut rays: Vec<Vec<Int>> = Vec::new();
    let mut processed: Vec<Vec<Int>> = Vec::new();
    for h in &hs {
        if let Some(idx) = lin.iter().position(|l| !dot_int(h, l).is_zero()) {
            // The halfspace cuts the lineality space: peel off one
            // direction and turn it into a ray.
            let mut v0 = lin.remove(idx);
            if dot_int(h, &v0).is_negative() {
                v0 = v0.iter().map(|x| -x).collect();
            }
            let a0 = dot_int(h, &v0);
            for l in lin.iter_mut() {
                let c = dot_int(h, l);
                let adj: Vec<Rat> = (0..dim)
                    .map(|j| Rat::from_integer(&a0 * &l[j] - &c * &v0[j]))
                    .collect();
                *l = canon_int_vec(&adj);
            }
            for r in rays.iter_mut() {
                let c = dot_int(h, r);
                let adj: Vec<Rat> = (0..dim)
                    .map(|j| Rat::from_integer(&a0 * &r[j] - &c * &v0[j]))
                    .collect();
                *r = canon_int_vec(&adj);
            }
            rays.push(v0);
            rays = sort_dedup(rays);
        } else {
            let sign = |r: &Vec<Int>| dot_int(h, r);
            let pos: Vec<Vec<Int>> =
                rays.iter().filter(|r| sign(r).is_positive()).cloned().collect();
            let zero: Vec<Vec<Int>> = rays.iter().filter(|r| sign(r).is_zero()).cloned().collect();
            let neg: Vec<Vec<Int>> =
                rays.iter().filter(|r| sign(r).is_negative()).cloned().collect();
            let mut next: Vec<Vec<Int>> = pos.iter().chain(zero.iter()).cloned().collect();
            let target_rank = dim as isize - lin.len() as isize - 2;
            for p in &pos {
                for n in &neg {
                    // Adjacency: the constraints tight at both span a space
                    // of corank exactly lineality + 2.
                    let tight: Vec<Vec<Rat>> = processed
                        .iter()
                        .filter(|hp| dot_int(hp, p).is_zero() && dot_int(hp, n).is_zero())
                        .map(|hp| to_rat_vec(hp))
                        .collect();
                    let rank = if tight.is_empty() {
                        0
                    } else {
                        QMatrix::from_rows(tight).rank()
                    };
                    if rank as isize != target_rank {
                        continue;
                    }
                    let (a, b) = (sign(p), sign(n));
                    let comb: Vec<Rat> = (0..dim)
                        .map(|j| Rat::from_integer(&a * &n[j] - &b * &p[j]))
                        .collect();
                    let v = canon_int_vec(&comb);
                    if v.iter().any(|x| !x.is_zero()) {
                        next.push(v);
                    }
                }
            }
            rays = sort_dedup(next);
        }
        processed.push(h.clone());
    }
    // Canonical lineality basis: the saturated integer kernel of the
    // processed constraint rows.
    let lin_out = if processed.is_empty() {
        lin
    } else {
        ZMatrix::from_rows(processed).integer_kernel().row_vecs()
    };
    (lin_out, rays)
}

impl QCone {
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Vec<Rat>>) -> QCone {
        let hs: Vec<Vec<Int>> = halfspaces.iter().map(|h| canon_int_vec(h)).collect();
        let (lineality, rays) = dd(dim, &hs);
        let cone = QCone { dim, rays, lineality, halfspaces: hs };
        cone.with_irredundant_halfspaces()
    }

    pub fn from_generators(dim: usize, generators: Vec<Vec<Rat>>) -> QCone {
        let gens: Vec<Vec<Int>> = generators.iter().map(|g| canon_int_vec(g)).collect();
        // The dual cone's generators are this cone's halfspaces.
        let (dlin, drays) = dd(dim, &gens);
        let mut hs = drays;
        for l in dlin {
            hs.push(l.iter().map(|x| -x).collect());
            hs.push(l);
        }
        let (lineality, rays) = dd(dim, &hs);
        QCone { dim, rays, lineality, halfspaces: sort_dedup(hs) }
    }

    fn with_irredundant_halfspaces(&self) -> QCone {
        let (dlin, drays) = dd(self.dim, &self.all_generators());
        let mut hs = drays;
        for l in dlin {
            hs.push(l.iter().map(|x| -x).collect());
            hs.push(l);
        }
        QCone {
            dim: self.dim,
            rays: self.rays.clone(),
            lineality: self.lineality.clone(),
            halfspaces: sort_dedup(hs),
        }
    }

    /// Extremal rays plus `±` the lineality basis.
    pub fn all_generators(&self) -> Vec<Vec<Int>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        sort_dedup(out)
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vec<Int>] {
        &self.lineality
    }

    pub fn halfspaces(&self) -> &[Vec<Int>] {
        &self.halfspaces
    }

    pub fn dualize(&self) -> QCone {
        QCone::from_halfspaces(self.dim, self.all_generators().iter().map(|g| to_rat_vec(g)).collect())
    }

    pub fn intersect(&self, other: &QCone) -> QCone {
        assert_eq!(self.dim, other.dim);
        let hs: Vec<Vec<Rat>> = self
            .halfspaces
            .iter()
            .chain(other.halfspaces.iter())
            .map(|h| to_rat_vec(h))
            .collect();
        QCone::from_halfspaces(self.dim, hs)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| !dot(&to_rat_vec(h), v).is_negative())
    }

    pub fn contains_int(&self, v: &[Int]) -> bool {
        self.halfspaces.iter().all(|h| !dot_int(h, v).is_negative())
    }

    /// Topological-interior membership: all irredundant halfspaces strict.
    /// Lower-dimensional cones have paired `±h` rows, so this is correctly
    /// empty for them.
    pub fn interior_contains(&self, v: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| dot(&to_rat_vec(h), v).is_positive())
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn cone_dim(&self) -> usize {
        let gens = self.all_generators();
        if gens.is_empty() {
            return 0;
        }
        QMatrix::from_rows(gens.iter().map(|g| to_rat_vec(g)).collect()).rank()
    }

    /// Same set of points: mutual containment of generators.
    pub fn cone_eq(&self, other: &QCone) -> bool {
        self.all_generators().iter().all(|g| other.contains_int(g))
            && other.all_generators().iter().all(|g| self.contains_int(g))
    }

    /// Pointed cone whose extremal rays are linearly independent and extend
    /// to a basis of the integer lattice.
    pub fn is_smooth_cone(&self) -> Result<bool, String> {
        if !self.is_pointed() {
            return Err("cone is not pointed".into());
        }
        let rows = ZMatrix::from_rows(self.rays.clone());
        if rows.to_q().rank() != rows.rows {
            return Ok(false);
        }
        crate::exact::hermite_extends_to_lattice_basis(&rows)
    }

    pub fn linear_image(&self, m: &ZMatrix) -> QCone {
        let gens = self
            .all_generators()
            .iter()
            .map(|g| to_rat_vec(&m.mul_vec(g)))
            .collect();
        QCone::from_generators(m.rows, gens)
    }

    /// Unique minimal generating set of the monoid of lattice points of a
    /// pointed cone: triangulate, collect fundamental-parallelepiped points,
    /// and discard reducible candidates in grading order.
    pub fn hilbert_basis(&self) -> Result<Vec<Vec<Int>>, String> {
        if !self.is_pointed() {
            return Err("Hilbert basis requires a pointed cone".into());
        }
        if self.rays.is_empty() {
            return Ok(Vec::new());
        }
        let mut candidates: Vec<Vec<Int>> = self.rays.clone();
        for simplex in triangulate(&self.rays) {
            for p in parallelepiped_points(&simplex) {
                candidates.push(p);
            }
        }
        candidates = sort_dedup(candidates);
        // Grading positive on the cone minus the origin: sum of the
        // halfspace evaluations.
        let grade = |v: &[Int]| -> Int { self.halfspaces.iter().map(|h| dot_int(h, v)).sum() };
        candidates.sort_by(|a, b| (grade(a), a.clone()).cmp(&(grade(b), b.clone())));
        let mut basis: Vec<Vec<Int>> = Vec::new();
        'cand: for c in candidates {
            for b in &basis {
                let diff: Vec<Int> = c.iter().zip(b).map(|(x, y)| x - y).collect();
                if diff.iter().any(|x| !x.is_zero()) && self.contains_int(&diff) {
                    continue 'cand;
                }
            }
            basis.push(c);
        }
        basis.sort();
        Ok(basis)
    }
}

/// Pulling triangulation of a pointed cone given by extremal rays: join the
/// first ray to the triangulations of the facets not containing it.
fn triangulate(rays: &[Vec<Int>]) -> Vec<Vec<Vec<Int>>> {
    let rank = QMatrix::from_rows(rays.iter().map(|r| to_rat_vec(r)).collect()).rank();
    if rays.len() == rank {
        return vec![rays.to_vec()];
    }
    let cone = QCone::from_generators(rays[0].len(), rays.iter().map(|r| to_rat_vec(r)).collect());
    let r0 = &rays[0];
    let mut out = Vec::new();
    for h in cone.halfspaces() {
        if !dot_int(h, r0).is_positive() {
            continue;
        }
        let facet_rays: Vec<Vec<Int>> =
            rays.iter().filter(|r| dot_int(h, r).is_zero()).cloned().collect();
        if facet_rays.is_empty() {
            continue;
        }
        for sub in triangulate(&facet_rays) {
            let mut simplex = vec![r0.clone()];
            simplex.extend(sub);
            out.push(simplex);
        }
    }
    out
}

/// Nonzero lattice points of the half-open parallelepiped
/// `{Σ λ_i b_i : 0 ≤ λ_i < 1}` of a linearly independent row set `b`,
/// enumerated via the Smith normal form (one point per coset of the row
/// lattice inside its saturation).
fn parallelepiped_points(b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let bm = ZMatrix::from_rows(b.to_vec());
    let s = bm.rows;
    let d = bm.cols;
    let (divisors, _, v) = bm.smith();
    assert_eq!(divisors.len(), s, "simplex rows dependent");
    let w = v.inverse_unimodular();
    let bt = bm.to_q().transpose();
    let mut out = Vec::new();
    let mut counter = vec![Int::zero(); s];
    loop {
        // Candidate coset representative x0 = Σ c_i w_i.
        let mut x0 = vec![Int::zero(); d];
        for i in 0..s {
            for j in 0..d {
                x0[j] += &counter[i] * w.get(i, j);
            }
        }
        // Reduce into the fundamental parallelepiped.
        let lambda = bt.solve(&to_rat_vec(&x0)).expect("representative outside span");
        let mut x = x0;
        for (i, l) in lambda.iter().enumerate() {
            let f = l.floor().to_integer();
            if !f.is_zero() {
                for j in 0..d {
                    x[j] -= &f * bm.get(i, j);
                }
            }
        }
        if x.iter().any(|t| !t.is_zero()) {
            out.push(x);
        }
        // Advance the mixed-radix counter over ℤ/e_1 × … × ℤ/e_s.
        let mut i = 0;
        loop {
            if i == s {
                return out;
            }
            counter[i] += 1;
            if counter[i] < divisors[i] {
                break;
            }
            counter[i] = Int::zero();
            i += 1;
        }
    }
}

/// A bounded rational polytope `{x : Ax = b, Gx ≥ h}` with exact lattice
/// point enumeration.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    pub dim: usize,
    eq_a: ZMatrix,
    eq_b: Vec<Int>,
    ineq_g: QMatrix,
    ineq_h: Vec<Rat>,
}

impl LatticePolytope {
    pub fn new(
        dim: usize,
        equalities: Vec<(Vec<Rat>, Rat)>,
        inequalities: Vec<(Vec<Rat>, Rat)>,
    ) -> LatticePolytope {
        // Scale each equality row to integers.
        let mut eq_rows = Vec::new();
        let mut eq_b = Vec::new();
        for (row, rhs) in &equalities {
            let mut full = row.clone();
            full.push(rhs.clone());
            let scaled = primitive(&full);
            if scaled.iter().all(|x| x.is_zero()) {
                continue;
            }
            eq_rows.push(scaled[..dim].to_vec());
            eq_b.push(scaled[dim].clone());
        }
        let eq_a = if eq_rows.is_empty() {
            ZMatrix::zero(0, dim)
        } else {
            ZMatrix::from_rows(eq_rows)
        };
        let (g_rows, h_vals): (Vec<Vec<Rat>>, Vec<Rat>) = inequalities.into_iter().unzip();
        let ineq_g = if g_rows.is_empty() {
            QMatrix::zero(0, dim)
        } else {
            QMatrix::from_rows(g_rows)
        };
        LatticePolytope { dim, eq_a, eq_b, ineq_g, ineq_h: h_vals }
    }

    pub fn contains_int(&self, x: &[Int]) -> bool {
        let xr = to_rat_vec(x);
        (0..self.eq_a.rows).all(|i| {
            dot_int(self.eq_a.row(i), x) == self.eq_b[i]
        }) && (0..self.ineq_g.rows).all(|i| dot(self.ineq_g.row(i), &xr) >= self.ineq_h[i])
    }

    /// All integer points, or an error if the polytope is unbounded.
    pub fn lattice_points(&self) -> Result<Vec<Vec<Int>>, String> {
        // Integer parametrization of the equality system.
        let (x0, kernel) = if self.eq_a.rows == 0 {
            (vec![Int::zero(); self.dim], ZMatrix::identity(self.dim))
        } else {
            match self.eq_a.integer_solve(&self.eq_b) {
                Some(x0) => (x0, self.eq_a.integer_kernel()),
                // No integer solution to the equalities: no lattice points.
                None => return Ok(Vec::new()),
            }
        };
        let t = kernel.rows;
        // Inequalities in parameter space: (G·Kᵗ)·z ≥ h − G·x0.
        let mut rows = Vec::new();
        for i in 0..self.ineq_g.rows {
            let g = self.ineq_g.row(i);
            let row: Vec<Rat> = (0..t)
                .map(|k| dot(g, &to_rat_vec(kernel.row(k))))
                .collect();
            let rhs = &self.ineq_h[i] - dot(g, &to_rat_vec(&x0));
            rows.push((row, rhs));
        }
        if t == 0 {
            let ok = rows.iter().all(|(_, rhs)| !rhs.is_positive());
            return Ok(if ok { vec![x0] } else { Vec::new() });
        }
        // Homogenize to classify feasibility/boundedness and get vertices.
        let mut hs: Vec<Vec<Rat>> = rows
            .iter()
            .map(|(row, rhs)| {
                let mut v = row.clone();
                v.push(-rhs.clone());
                v
            })
            .collect();
        let mut tau_pos = vec![Rat::zero(); t + 1];
        tau_pos[t] = Rat::from_integer(int(1));
        hs.push(tau_pos);
        let (lin, rays) = dd(t + 1, &hs.iter().map(|h| canon_int_vec(h)).collect::<Vec<_>>());
        let verts: Vec<Vec<Rat>> = rays
            .iter()
            .filter(|r| r[t].is_positive())
            .map(|r| {
                let tau = Rat::from_integer(r[t].clone());
                (0..t).map(|j| Rat::from_integer(r[j].clone()) / &tau).collect()
            })
            .collect();
        if verts.is_empty() {
            return Ok(Vec::new());
        }
        if !lin.is_empty() || rays.iter().any(|r| r[t].is_zero()) {
            return Err("polytope is unbounded".into());
        }
        // Bounding box of the vertices, then exhaustive check.
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for j in 0..t {
            let min = verts.iter().map(|v| &v[j]).min().unwrap();
            let max = verts.iter().map(|v| &v[j]).max().unwrap();
            lo.push(min.ceil().to_integer());
            hi.push(max.floor().to_integer());
        }
        let mut out = Vec::new();
        let mut z: Vec<Int> = lo.clone();
        if (0..t).any(|j| lo[j] > hi[j]) {
            return Ok(out);
        }
        loop {
            let zr = to_rat_vec(&z);
            if rows.iter().all(|(row, rhs)| &dot(row, &zr) >= rhs) {
                let mut x = x0.clone();
                for k in 0..t {
                    for j in 0..self.dim {
                        x[j] += &z[k] * kernel.get(k, j);
                    }
                }
                out.push(x);
            }
            let mut j = 0;
            loop {
                if j == t {
                    out.sort();
                    return Ok(out);
                }
                z[j] += 1;
                if z[j] <= hi[j] {
                    break;
                }
                z[j] = lo[j].clone();
                j += 1;
            }
        }
    }
}

/// Images of a point set under an integer linear map, keeping multiplicity
/// and the distinct image list.
#[derive(Clone, Debug)]
pub struct MappedPoints {
    pub images: Vec<Vec<Int>>,
    pub distinct: Vec<Vec<Int>>,
}

pub fn map_lattice_points(m: &ZMatrix, points: &[Vec<Int>]) -> MappedPoints {
    let images: Vec<Vec<Int>> = points.iter().map(|p| m.mul_vec(p)).collect();
    let mut distinct = images.clone();
    distinct.sort();
    distinct.dedup();
    MappedPoints { images, distinct }
}

/// A finitely generated submonoid of `ℤ^d` with a grading certifying that
/// membership searches are finite. Generators flagged `free` may be used
/// with coefficients of any sign.
#[derive(Clone, Debug)]
pub struct AffineMonoid {
    pub ambient: usize,
    pub gens: Vec<Vec<Int>>,
    pub free: Vec<bool>,
    pub grading: Vec<Int>,
}

impl AffineMonoid {
    pub fn new(
        ambient: usize,
        gens: Vec<Vec<Int>>,
        free: Vec<bool>,
        grading: Vec<Int>,
    ) -> Result<AffineMonoid, String> {
        assert_eq!(gens.len(), free.len());
        for (g, &f) in gens.iter().zip(&free) {
            let d = dot_int(&grading, g);
            if f && !d.is_zero() {
                return Err("free generator has nonzero grading".into());
            }
            if d.is_negative() {
                return Err("generator has negative grading".into());
            }
        }
        Ok(AffineMonoid { ambient, gens, free, grading })
    }

    pub fn cone(&self) -> QCone {
        let mut gens: Vec<Vec<Rat>> = self.gens.iter().map(|g| to_rat_vec(g)).collect();
        for (g, &f) in self.gens.iter().zip(&self.free) {
            if f {
                gens.push(to_rat_vec(&g.iter().map(|x| -x).collect::<Vec<_>>()));
            }
        }
        QCone::from_generators(self.ambient, gens)
    }

    /// Membership with a witness coefficient vector (indexed like `gens`).
    ///
    /// Strategy: enumerate nonnegative combinations of the positively graded
    /// generators matching the grading of `v`, then solve the residual in the
    /// degree-zero generators, which must be linearly independent for the
    /// search to be certified finite.
    pub fn member(&self, v: &[Int]) -> Result<Option<Vec<Int>>, String> {
        let target = dot_int(&self.grading, v);
        if target.is_negative() {
            return Ok(None);
        }
        let pos: Vec<usize> = (0..self.gens.len())
            .filter(|&i| dot_int(&self.grading, &self.gens[i]).is_positive())
            .collect();
        let zero: Vec<usize> = (0..self.gens.len())
            .filter(|&i| dot_int(&self.grading, &self.gens[i]).is_zero())
            .collect();
        let zmat = QMatrix::from_rows(
            zero.iter().map(|&i| to_rat_vec(&self.gens[i])).collect::<Vec<_>>(),
        )
        .transpose();
        if !zero.is_empty() && zmat.rank() != zero.len() {
            return Err("degree-zero generators are dependent; search not certified finite".into());
        }
        let mut coeffs = vec![Int::zero(); self.gens.len()];
        let found = self.search(v, &target, &pos, 0, &zero, &zmat, &mut coeffs);
        Ok(if found { Some(coeffs) } else { None })
    }

    fn search(
        &self,
        v: &[Int],
        remaining: &Int,
        pos: &[usize],
        k: usize,
        zero: &[usize],
        zmat: &QMatrix,
        coeffs: &mut Vec<Int>,
    ) -> bool {
        if k == pos.len() {
            if !remaining.is_zero() {
                return false;
            }
            // Residual to express in the degree-zero generators.
            let mut res = v.to_vec();
            for (i, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    for j in 0..self.ambient {
                        res[j] -= c * &self.gens[i][j];
                    }
                }
            }
            if zero.is_empty() {
                return res.iter().all(|x| x.is_zero());
            }
            let Some(sol) = zmat.solve(&to_rat_vec(&res)) else {
                return false;
            };
            for (slot, &gi) in zero.iter().enumerate() {
                let c = &sol[slot];
                if !c.is_integer() {
                    return false;
                }
                if !self.free[gi] && c.is_negative() {
                    return false;
                }
            }
            for (slot, &gi) in zero.iter().enumerate() {
                coeffs[gi] = sol[slot].to_integer();
            }
            return true;
        }
        let gi = pos[k];
        let d = dot_int(&self.grading, &self.gens[gi]);
        let max = remaining / &d;
        let mut c = Int::zero();
        while &c <= &max {
            coeffs[gi] = c.clone();
            let rem = remaining - &c * &d;
            if self.search(v, &rem, pos, k + 1, zero, zmat, coeffs) {
                return true;
            }
            coeffs[gi] = Int::zero();
            c += 1;
        }
        false
    }
}

/// Convenience: check that hi/lo conversions stay in i64 range during
/// brute-force test enumerations.
pub fn int_to_i64(x: &Int) -> i64 {
    x.to_i64().expect("coordinate out of i64 range")
}
