//! Smooth complete fans, divisor class lattices, divisor polytopes, and
//! toric positivity helpers.

use crate::exact::{dot_int, int, to_rat_vec, Int, Rat, ZMatrix};
use crate::polyhedral::{AffineMonoid, LatticePolytope, QCone};
use itertools::Itertools;
use num_traits::{Signed, Zero};

/// A fan given by primitive ray generators and maximal cones (as ray index
/// sets). Assumed smooth and complete; `validate` checks both.
#[derive(Clone, Debug)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<Vec<Int>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<Int>>, max_cones: Vec<Vec<usize>>) -> Fan {
        let max_cones = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        Fan { dim, rays, max_cones }
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    fn ray_matrix(&self, indices: &[usize]) -> ZMatrix {
        ZMatrix::from_rows(indices.iter().map(|&i| self.rays[i].clone()).collect())
    }

    /// Smoothness, completeness (ridge pairing with an opposite-side check),
    /// and ray primitivity.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errors = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != self.dim {
                errors.push(format!("ray {i} has wrong dimension"));
                continue;
            }
            if r.iter().all(|x| x.is_zero()) {
                errors.push(format!("ray {i} is zero"));
                continue;
            }
            let g = crate::exact::gcd_all(r);
            if g != int(1) {
                errors.push(format!("ray {i} is not primitive"));
            }
        }
        let mut used = vec![false; self.rays.len()];
        for (ci, cone) in self.max_cones.iter().enumerate() {
            if cone.iter().any(|&i| i >= self.rays.len()) {
                errors.push(format!("cone {ci} references a missing ray"));
                continue;
            }
            for &i in cone {
                used[i] = true;
            }
            if cone.len() != self.dim {
                errors.push(format!("cone {ci} is not full-dimensional"));
                continue;
            }
            let det = self.ray_matrix(cone).det();
            if det.abs() != int(1) {
                errors.push(format!("cone {ci} is not unimodular (det {det})"));
            }
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                errors.push(format!("ray {i} is not used by any maximal cone"));
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        // Completeness: every ridge of every maximal cone is shared with
        // exactly one other maximal cone whose extra ray lies strictly on
        // the opposite side of the ridge hyperplane.
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for &skip in cone {
                let ridge: Vec<usize> = cone.iter().copied().filter(|&i| i != skip).collect();
                let normal = self.ridge_normal(&ridge, skip);
                let mut partners = 0;
                for (cj, other) in self.max_cones.iter().enumerate() {
                    if cj == ci || !ridge.iter().all(|i| other.contains(i)) {
                        continue;
                    }
                    let extra: Vec<usize> =
                        other.iter().copied().filter(|i| !ridge.contains(i)).collect();
                    if extra.len() != 1 {
                        errors.push(format!("cones {ci} and {cj} overlap badly"));
                        continue;
                    }
                    if dot_int(&normal, &self.rays[extra[0]]).is_negative() {
                        partners += 1;
                    } else {
                        errors.push(format!(
                            "cones {ci} and {cj} lie on the same side of a shared ridge"
                        ));
                    }
                }
                if partners != 1 {
                    errors.push(format!(
                        "ridge {ridge:?} of cone {ci} is shared by {partners} partner cones (need 1)"
                    ));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// Normal of the hyperplane through `ridge`, oriented positively on ray
    /// `inside`.
    fn ridge_normal(&self, ridge: &[usize], inside: usize) -> Vec<Int> {
        let m = self.ray_matrix(ridge).to_q();
        let k = m.kernel_basis();
        assert_eq!(k.rows, 1, "ridge does not span a hyperplane");
        let mut normal = crate::exact::primitive(k.row(0));
        if dot_int(&normal, &self.rays[inside]).is_negative() {
            normal = normal.iter().map(|x| -x).collect();
        }
        normal
    }

    /// Coordinates of an arbitrary ray in the basis formed by the rays of a
    /// maximal (unimodular) cone.
    pub fn coords_in_cone_basis(&self, cone: &[usize], ray: usize) -> Vec<Int> {
        let b = self.ray_matrix(cone).transpose();
        b.integer_solve(&self.rays[ray]).expect("unimodular cone basis")
    }

    /// Whether every ray outside `cone` has all coordinates ≤ 0 in the ray
    /// basis of `cone`.
    pub fn negative_ray_test(&self, cone: &[usize]) -> bool {
        (0..self.rays.len())
            .filter(|i| !cone.contains(i))
            .all(|i| self.coords_in_cone_basis(cone, i).iter().all(|c| !c.is_positive()))
    }

    /// If the fan is the product of projective-space fans (up to lattice
    /// automorphism), return the blocks of ray indices, one per factor.
    pub fn product_of_projective_spaces(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.rays.len();
        for partition in set_partitions(n) {
            if partition.iter().any(|b| b.len() < 2) {
                continue;
            }
            let free_rank: usize = partition.iter().map(|b| b.len() - 1).sum();
            if free_rank != self.dim {
                continue;
            }
            if !partition.iter().all(|b| {
                (0..self.dim)
                    .all(|j| b.iter().map(|&i| &self.rays[i][j]).sum::<Int>().is_zero())
            }) {
                continue;
            }
            // Expected cones: drop exactly one ray from each block.
            let mut expected = product_fan_cones(&partition);
            expected.sort();
            let mut actual = self.max_cones.clone();
            actual.sort();
            if expected == actual {
                return Some(partition);
            }
        }
        None
    }
}

/// All set partitions of {0, …, n−1}, blocks and block lists sorted.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(i);
            rec(i + 1, n, current, out);
            current[b].pop();
        }
        current.push(vec![i]);
        rec(i + 1, n, current, out);
        current.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// Maximal cones of a product of projective-space fans: drop exactly one
/// ray from each block.
fn product_fan_cones(blocks: &[Vec<usize>]) -> Vec<Vec<usize>> {
    blocks
        .iter()
        .map(|b| b.iter().copied())
        .multi_cartesian_product()
        .map(|dropped| {
            let mut cone: Vec<usize> = blocks
                .iter()
                .flat_map(|b| b.iter().copied())
                .filter(|i| !dropped.contains(i))
                .collect();
            cone.sort();
            cone
        })
        .collect()
}

/// The divisor class lattice `ℤ^n / M ≅ ℤ^{n-d}`, with a fixed projection
/// and section determined by a deterministic pivot rule: the pivot rays are
/// the unimodular `d`-subset that is largest in reverse-lexicographic order,
/// so the class basis is carried by the earliest possible rays.
#[derive(Clone, Debug)]
pub struct ClassLattice {
    pub n: usize,
    pub d: usize,
    pub pivot: Vec<usize>,
    pub nonpivot: Vec<usize>,
    rays: Vec<Vec<Int>>,
    pivot_inverse: ZMatrix,
}

pub type DivClass = Vec<Int>;

impl ClassLattice {
    pub fn new(fan: &Fan) -> ClassLattice {
        let n = fan.rays.len();
        let d = fan.dim;
        let pivot = (0..n)
            .combinations(d)
            .filter(|s| fan.ray_matrix(s).det().abs() == int(1))
            .max_by_key(|s| {
                let mut k = s.clone();
                k.reverse();
                k
            })
            .expect("no unimodular ray subset; fan cannot be smooth and complete");
        let nonpivot: Vec<usize> = (0..n).filter(|i| !pivot.contains(i)).collect();
        let pivot_inverse = fan.ray_matrix(&pivot).inverse_unimodular();
        ClassLattice { n, d, pivot, nonpivot, rays: fan.rays.clone(), pivot_inverse }
    }

    pub fn rank(&self) -> usize {
        self.n - self.d
    }

    /// Class of a torus-invariant divisor `Σ a_i D_i`.
    pub fn class_of(&self, a: &[Int]) -> DivClass {
        assert_eq!(a.len(), self.n);
        // Subtract the character with ⟨u_i, m⟩ = a_i on the pivot rays.
        let ap: Vec<Int> = self.pivot.iter().map(|&i| a[i].clone()).collect();
        let m = self.pivot_inverse.mul_vec(&ap);
        self.nonpivot
            .iter()
            .map(|&i| &a[i] - dot_int(&self.rays[i], &m))
            .collect()
    }

    pub fn class_of_ray_divisor(&self, i: usize) -> DivClass {
        let mut a = vec![Int::zero(); self.n];
        a[i] = int(1);
        self.class_of(&a)
    }

    /// The fixed right inverse of `class_of`: a divisor supported on the
    /// non-pivot rays.
    pub fn section(&self, c: &DivClass) -> Vec<Int> {
        assert_eq!(c.len(), self.rank());
        let mut a = vec![Int::zero(); self.n];
        for (k, &i) in self.nonpivot.iter().enumerate() {
            a[i] = c[k].clone();
        }
        a
    }

    /// The polytope `Δ(c) = {m : ⟨u_i, m⟩ ≥ -a_i}` for the fixed
    /// representative `a = section(c)`.
    pub fn divisor_polytope(&self, c: &DivClass) -> LatticePolytope {
        let a = self.section(c);
        let ineqs = (0..self.n)
            .map(|i| {
                (
                    to_rat_vec(&self.rays[i]),
                    -Rat::from_integer(a[i].clone()),
                )
            })
            .collect();
        LatticePolytope::new(self.d, vec![], ineqs)
    }

    /// Monoid of base classes generated at a maximal cone: classes of the
    /// rays outside the cone (a lattice basis, by smoothness).
    pub fn s_sigma(&self, cone: &[usize]) -> AffineMonoid {
        let gens: Vec<Vec<Int>> = (0..self.n)
            .filter(|i| !cone.contains(i))
            .map(|i| self.class_of_ray_divisor(i))
            .collect();
        let free = vec![false; gens.len()];
        AffineMonoid::new(self.rank(), gens, free, vec![Int::zero(); self.rank()])
            .expect("zero grading is always valid")
    }

    pub fn c_sigma(&self, cone: &[usize]) -> QCone {
        let gens = (0..self.n)
            .filter(|i| !cone.contains(i))
            .map(|i| to_rat_vec(&self.class_of_ray_divisor(i)))
            .collect();
        QCone::from_generators(self.rank(), gens)
    }

    /// Class of the canonical divisor `K = -Σ D_i`.
    pub fn canonical_class(&self) -> DivClass {
        let a = vec![int(-1); self.n];
        self.class_of(&a)
    }
}

pub fn rat_class(c: &[Int]) -> Vec<Rat> {
    to_rat_vec(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    pub fn p2_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(-1), int(-1)],
            ],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
    }

    pub fn p1p1_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(-1), int(0)],
                vec![int(0), int(-1)],
            ],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
    }

    pub fn hirzebruch1_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(-1), int(1)],
                vec![int(0), int(-1)],
            ],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
    }

    pub fn hexagon_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(1), int(1)],
                vec![int(1), int(2)],
                vec![int(0), int(1)],
                vec![int(-1), int(0)],
                vec![int(0), int(-1)],
            ],
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 4],
                vec![4, 5],
                vec![5, 0],
            ],
        )
    }

    fn zc(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn validate_good_fans() {
        assert!(p2_fan().validate().is_ok());
        assert!(p1p1_fan().validate().is_ok());
        assert!(hirzebruch1_fan().validate().is_ok());
        assert!(hexagon_fan().validate().is_ok());
    }

    #[test]
    fn validate_incomplete_fan() {
        let mut f = p2_fan();
        f.max_cones.pop();
        assert!(f.validate().is_err());
    }

    #[test]
    fn validate_nonprimitive_ray() {
        let mut f = p2_fan();
        f.rays[0] = zc(&[2, 0]);
        assert!(f.validate().is_err());
    }

    #[test]
    fn p2_class_group() {
        let cl = ClassLattice::new(&p2_fan());
        assert_eq!(cl.rank(), 1);
        for i in 0..3 {
            assert_eq!(cl.class_of_ray_divisor(i), zc(&[1]));
        }
    }

    #[test]
    fn p1p1_class_group() {
        let cl = ClassLattice::new(&p1p1_fan());
        assert_eq!(cl.class_of_ray_divisor(0), zc(&[1, 0]));
        assert_eq!(cl.class_of_ray_divisor(1), zc(&[0, 1]));
        assert_eq!(cl.class_of_ray_divisor(2), zc(&[1, 0]));
        assert_eq!(cl.class_of_ray_divisor(3), zc(&[0, 1]));
    }

    #[test]
    fn hexagon_class_identification() {
        let cl = ClassLattice::new(&hexagon_fan());
        assert_eq!(cl.rank(), 4);
        for i in 0..4 {
            assert_eq!(cl.class_of_ray_divisor(i), {
                let mut e = vec![int(0); 4];
                e[i] = int(1);
                e
            });
        }
        assert_eq!(cl.class_of_ray_divisor(4), zc(&[1, 1, 1, 0]));
        assert_eq!(cl.class_of_ray_divisor(5), zc(&[0, 1, 2, 1]));
    }

    #[test]
    fn section_is_right_inverse() {
        for fan in [p2_fan(), p1p1_fan(), hexagon_fan()] {
            let cl = ClassLattice::new(&fan);
            let c: Vec<Int> = (0..cl.rank()).map(|k| int(k as i64 * 3 - 2)).collect();
            assert_eq!(cl.class_of(&cl.section(&c)), c);
        }
    }

    #[test]
    fn divisor_polytopes() {
        let cl = ClassLattice::new(&p2_fan());
        assert_eq!(cl.divisor_polytope(&zc(&[1])).lattice_points().unwrap().len(), 3);
        assert_eq!(cl.divisor_polytope(&zc(&[0])).lattice_points().unwrap().len(), 1);
        // Oracle: count a ∈ ℤ⁶₊ with class(a) = e_1 directly.
        let hx = ClassLattice::new(&hexagon_fan());
        let target = zc(&[1, 0, 0, 0]);
        let mut oracle = 0;
        for a in (0..6).map(|_| 0i64..=2).multi_cartesian_product() {
            let av: Vec<Int> = a.iter().map(|&x| int(x)).collect();
            if hx.class_of(&av) == target {
                oracle += 1;
            }
        }
        assert_eq!(
            hx.divisor_polytope(&target).lattice_points().unwrap().len(),
            oracle
        );
        assert_eq!(oracle, 1);
    }

    #[test]
    fn s_sigma_p2() {
        let fan = p2_fan();
        let cl = ClassLattice::new(&fan);
        let s = cl.s_sigma(&[0, 1]);
        assert_eq!(s.gens, vec![zc(&[1])]);
        assert_eq!(s.member(&zc(&[2])).unwrap(), Some(vec![int(2)]));
        assert_eq!(s.member(&zc(&[-1])).unwrap(), None);
    }

    #[test]
    fn nef_of_products() {
        let fan = p1p1_fan();
        let cl = ClassLattice::new(&fan);
        let mut nef: Option<QCone> = None;
        for cone in &fan.max_cones {
            let c = cl.c_sigma(cone);
            nef = Some(match nef {
                None => c,
                Some(acc) => acc.intersect(&c),
            });
        }
        let nef = nef.unwrap();
        let orthant = QCone::from_generators(
            2,
            vec![vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]],
        );
        assert!(nef.cone_eq(&orthant));
    }

    #[test]
    fn product_recognition() {
        assert_eq!(p2_fan().product_of_projective_spaces(), Some(vec![vec![0, 1, 2]]));
        assert_eq!(
            p1p1_fan().product_of_projective_spaces(),
            Some(vec![vec![0, 2], vec![1, 3]])
        );
        assert_eq!(hirzebruch1_fan().product_of_projective_spaces(), None);
    }

    #[test]
    fn p1p2_product_recognition() {
        // ℙ¹×ℙ² fan: 5 rays in ℤ³.
        let fan = Fan::new(
            3,
            vec![
                vec![int(1), int(0), int(0)],
                vec![int(-1), int(0), int(0)],
                vec![int(0), int(1), int(0)],
                vec![int(0), int(0), int(1)],
                vec![int(0), int(-1), int(-1)],
            ],
            vec![
                vec![0, 2, 3],
                vec![0, 2, 4],
                vec![0, 3, 4],
                vec![1, 2, 3],
                vec![1, 2, 4],
                vec![1, 3, 4],
            ],
        );
        assert!(fan.validate().is_ok());
        assert_eq!(
            fan.product_of_projective_spaces(),
            Some(vec![vec![0, 1], vec![2, 3, 4]])
        );
    }

    #[test]
    fn negative_ray_tests() {
        let p2 = p2_fan();
        for cone in &p2.max_cones {
            assert!(p2.negative_ray_test(cone));
        }
        let f1 = hirzebruch1_fan();
        assert!(f1.max_cones.iter().any(|c| !f1.negative_ray_test(c)));
    }

    #[test]
    fn canonical_class_p2() {
        let cl = ClassLattice::new(&p2_fan());
        assert_eq!(cl.canonical_class(), zc(&[-3]));
    }
}
