//! Anticanonical classes and the Fano/Nef classification of diagonal
//! (Kaneyama) bundles.
//!
//! For a complete-intersection bundle the anticanonical class of the
//! projectivization has a closed form in Cox-ring degrees.  For bundles whose
//! diagram is a nonnegative diagonal matrix the Nef and ample questions for
//! the anticanonical class reduce to an explicit arithmetic test on the
//! diagonal, and this module computes the answer both ways — closed form and
//! generic positivity engine — treating any disagreement as a hard error.

use crate::bundle::{PEClass, ToricVectorBundle};
use crate::exact::{int, Int, QMatrix, ZMatrix};
use crate::matroid::LinearIdealMatrix;
use crate::toric::Fan;
use num_traits::{One, Signed, Zero};

/// A bundle whose diagram is a nonnegative diagonal matrix: one variable per
/// ray, with `y_i` weighted by `diagonal[i]` along ray `i` only.
#[derive(Debug, Clone)]
pub struct KaneyamaBundle {
    pub bundle: ToricVectorBundle,
    /// Diagram diagonal, in ray order.
    pub diagonal: Vec<Int>,
}

/// Outcome of the diagonal-family positivity test for the anticanonical
/// class, with a human-readable explanation of which branch decided it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaneyamaReport {
    pub nef: bool,
    pub ample: bool,
    pub reason: String,
}

/// Anticanonical class of the projectivized bundle when the Cox ring is a
/// complete intersection: `(K_Σ + Σ_j deg(Y_j) − Σ_k deg(p_k), r)`.
pub fn ci_anticanonical(e: &ToricVectorBundle) -> Result<PEClass, String> {
    if !e.fixtures.is_empty() {
        return Err("anticanonical closed form needs an unaugmented presentation".into());
    }
    let ci = e.ci_check();
    if !ci.passed {
        return Err("the Cox ring is not a complete intersection".into());
    }
    let classes = e.class_lattice();
    let mut alpha: Vec<Int> = classes.canonical_class();
    for j in 0..e.num_vars() {
        let d = e.deg_y(j);
        for (a, b) in alpha.iter_mut().zip(d.alpha.iter()) {
            *a += b;
        }
    }
    for rel in e.relation_degrees() {
        for (a, b) in alpha.iter_mut().zip(rel.alpha.iter()) {
            *a -= b;
        }
    }
    Ok(PEClass { alpha, beta: int(e.rank() as i64) })
}

/// Check that `(Σ, L, D)` is a diagonal bundle: `D` is a square nonnegative
/// diagonal matrix, the rank equals the base dimension, and the variables of
/// every maximal cone form a basis of the matroid of `L`.
pub fn kaneyama_validate(
    fan: Fan,
    ideal: LinearIdealMatrix,
    diagram: ZMatrix,
) -> Result<KaneyamaBundle, String> {
    if diagram.rows != diagram.cols {
        return Err(format!(
            "diagonal bundle needs a square diagram, got {}×{}",
            diagram.rows, diagram.cols
        ));
    }
    for i in 0..diagram.rows {
        for j in 0..diagram.cols {
            let v = diagram.get(i, j);
            if i != j && !v.is_zero() {
                return Err(format!("diagram entry ({i}, {j}) is off-diagonal and nonzero"));
            }
            if i == j && v.is_negative() {
                return Err(format!("diagonal entry {i} is negative"));
            }
        }
    }
    let diagonal: Vec<Int> = (0..diagram.rows).map(|i| diagram.get(i, i).clone()).collect();
    let bundle = ToricVectorBundle::new(fan, ideal, diagram, Default::default())?;
    if bundle.rank() != bundle.fan.dim {
        return Err(format!(
            "rank {} does not equal the base dimension {}",
            bundle.rank(),
            bundle.fan.dim
        ));
    }
    for (ci, cone) in bundle.fan.max_cones.iter().enumerate() {
        if !bundle.matroid().is_independent(cone) {
            return Err(format!(
                "variables of maximal cone {ci} ({cone:?}) are dependent"
            ));
        }
    }
    Ok(KaneyamaBundle { bundle, diagonal })
}

/// The r×r matrix whose rows are the cone-basis coordinates of the
/// characters forced by Nef-ness of the anticanonical class on cone `σ`:
/// entry `(ℓ, i)` is `d_i − 1`, shifted by `−r·d_i` on the diagonal, where
/// `d_i` runs over the diagonal entries of the rays of `σ`.
pub fn x_sigma_matrix(e: &KaneyamaBundle, cone_index: usize) -> QMatrix {
    let cone = &e.bundle.fan.max_cones[cone_index];
    let r = cone.len();
    let mut m = QMatrix::zero(r, r);
    for (col, &ray) in cone.iter().enumerate() {
        let d = &e.diagonal[ray];
        for row in 0..r {
            let mut v = d - Int::one();
            if row == col {
                v -= int(r as i64) * d;
            }
            m.set(row, col, crate::exact::Rat::from(v));
        }
    }
    m
}

/// Whether every ray outside maximal cone `σ` has all coordinates ≤ 0 in the
/// ray basis of `σ` — the combinatorial consequence of `X_σ t ≥ 0`.
pub fn negative_orthant_test(e: &KaneyamaBundle, cone_index: usize) -> bool {
    e.bundle.fan.negative_ray_test(&e.bundle.fan.max_cones[cone_index])
}

/// Closed form of the anticanonical class for a diagonal bundle:
/// `(Σ_i (d_i − 1)·class(e_i), r)`.
pub fn kaneyama_anticanonical(e: &KaneyamaBundle) -> PEClass {
    let shifted: Vec<Int> = e.diagonal.iter().map(|d| d - Int::one()).collect();
    PEClass {
        alpha: e.bundle.class_lattice().class_of(&shifted),
        beta: int(e.bundle.rank() as i64),
    }
}

/// Decide whether the anticanonical class of the projectivization is Nef and
/// whether it is ample.
///
/// Pipeline: (i) the negative-orthant test must hold on every maximal cone,
/// otherwise the class is not Nef; (ii) the fan must then be a product of
/// projective-space fans; (iii) over a product of `ℓ > 1` factors the class
/// is Nef iff every diagonal entry is 0 or 1, and never ample; (iv) over a
/// single projective space with sorted diagonal `a_0 ≤ … ≤ a_N` (`N + 1`
/// entries) the class is Nef iff `Σ_{i≥1}(a_i − a_0) ≤ N + 1 − a_0` and
/// ample iff the inequality is strict.
///
/// The verdict is recomputed with the generic Nef-cone engine and any
/// disagreement is reported as an error.
pub fn kaneyama_classify(e: &KaneyamaBundle) -> Result<KaneyamaReport, String> {
    let closed = closed_form_classify(e);
    let mk = kaneyama_anticanonical(e);
    let engine_nef = e.bundle.nef_member(&mk)?;
    let engine_ample = e.bundle.ample(&mk)?;
    if engine_nef != closed.nef || engine_ample != closed.ample {
        return Err(format!(
            "closed form (nef={}, ample={}; {}) disagrees with the Nef-cone engine (nef={engine_nef}, ample={engine_ample})",
            closed.nef, closed.ample, closed.reason
        ));
    }
    Ok(closed)
}

fn closed_form_classify(e: &KaneyamaBundle) -> KaneyamaReport {
    let fan = &e.bundle.fan;
    for ci in 0..fan.max_cones.len() {
        if !negative_orthant_test(e, ci) {
            return KaneyamaReport {
                nef: false,
                ample: false,
                reason: format!(
                    "a ray outside maximal cone {ci} has a positive coordinate in its ray basis"
                ),
            };
        }
    }
    let blocks = match fan.product_of_projective_spaces() {
        Some(b) => b,
        None => {
            return KaneyamaReport {
                nef: false,
                ample: false,
                reason: "the fan is not a product of projective-space fans".into(),
            }
        }
    };
    if blocks.len() > 1 {
        let nef = e.diagonal.iter().all(|d| d.is_zero() || d.is_one());
        let reason = if nef {
            format!(
                "product of {} projective spaces with all diagonal entries in {{0, 1}}: Nef but never ample",
                blocks.len()
            )
        } else {
            format!(
                "product of {} projective spaces with a diagonal entry outside {{0, 1}}",
                blocks.len()
            )
        };
        return KaneyamaReport { nef, ample: false, reason };
    }
    // Single projective space: sorted diagonal a_0 ≤ … ≤ a_N, N + 1 entries.
    let mut a = e.diagonal.clone();
    a.sort();
    let count = int(a.len() as i64);
    let delta_sum: Int = a.iter().skip(1).map(|ai| ai - &a[0]).sum();
    let bound = &count - &a[0];
    let nef = delta_sum <= bound;
    let ample = delta_sum < bound;
    KaneyamaReport {
        nef,
        ample,
        reason: format!(
            "projective space: excess over the minimal entry is {delta_sum}, threshold {bound}"
        ),
    }
}

/// Tangent bundle of a smooth complete toric variety: the linear ideal is
/// generated by the relations among the integral ray generators and the
/// diagram is the identity matrix.
pub fn tangent_bundle(fan: &Fan) -> Result<ToricVectorBundle, String> {
    let n = fan.num_rays();
    let rays = ZMatrix::from_rows(fan.rays.clone());
    let kernel = rays.transpose().integer_kernel();
    if kernel.rows != n - fan.dim {
        return Err("ray generators do not span the lattice".into());
    }
    let coeffs = QMatrix::from_rows(
        (0..kernel.rows).map(|k| crate::exact::to_rat_vec(kernel.row(k))).collect(),
    );
    let ideal = LinearIdealMatrix::new(coeffs)?;
    ToricVectorBundle::new(fan.clone(), ideal, ZMatrix::identity(n), Default::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use crate::testdata::*;

    fn diagonal_p2(a: &[i64]) -> KaneyamaBundle {
        let mut d = ZMatrix::zero(3, 3);
        for (i, &x) in a.iter().enumerate() {
            d.set(i, i, int(x));
        }
        kaneyama_validate(p2_fan(), hyperplane_ideal(3), d).unwrap()
    }

    fn p1p1_fan() -> Fan {
        Fan::new(
            2,
            vec![zv(&[1, 0]), zv(&[0, 1]), zv(&[-1, 0]), zv(&[0, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
    }

    fn f1_fan() -> Fan {
        Fan::new(
            2,
            vec![zv(&[1, 0]), zv(&[0, 1]), zv(&[-1, 1]), zv(&[0, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
    }

    #[test]
    fn anticanonical_of_tangent_p2() {
        let e = tangent_p2();
        assert_eq!(ci_anticanonical(&e).unwrap(), PEClass::new(zv(&[0]), int(2)));
    }

    #[test]
    fn anticanonical_of_blowup_extension() {
        let e = blowup_extension();
        assert_eq!(ci_anticanonical(&e).unwrap(), PEClass::new(zv(&[3]), int(3)));
    }

    #[test]
    fn anticanonical_refuses_non_ci() {
        assert!(ci_anticanonical(&sym2_tangent_p2()).is_err());
    }

    #[test]
    fn diagonal_closed_form_matches_ci_anticanonical() {
        for a in [[1i64, 1, 1], [1, 1, 2], [0, 2, 3], [2, 2, 2]] {
            let kb = diagonal_p2(&a);
            assert_eq!(kaneyama_anticanonical(&kb), ci_anticanonical(&kb.bundle).unwrap());
        }
    }

    #[test]
    fn validate_rejects_dependent_cone() {
        // Two disjoint relations y0+y1 and y2+y3 make the cone {0, 1} dependent.
        let ideal = LinearIdealMatrix::new(QMatrix::from_i64(&[
            &[1, 1, 0, 0],
            &[0, 0, 1, 1],
        ]))
        .unwrap();
        let err = kaneyama_validate(p1p1_fan(), ideal, ZMatrix::identity(4)).unwrap_err();
        assert!(err.contains("dependent"), "{err}");
    }

    #[test]
    fn validate_rejects_off_diagonal_and_negative() {
        let mut d = ZMatrix::identity(3);
        d.set(0, 1, int(1));
        assert!(kaneyama_validate(p2_fan(), hyperplane_ideal(3), d).is_err());
        let mut d = ZMatrix::identity(3);
        d.set(2, 2, int(-1));
        assert!(kaneyama_validate(p2_fan(), hyperplane_ideal(3), d).is_err());
    }

    #[test]
    fn x_sigma_for_unit_diagonal() {
        let kb = diagonal_p2(&[1, 1, 1]);
        let x = x_sigma_matrix(&kb, 0);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { rat_int(-2) } else { rat_int(0) };
                assert_eq!(*x.get(i, j), want);
            }
        }
    }

    #[test]
    fn negative_orthant_p2_and_f1() {
        let kb = diagonal_p2(&[1, 1, 1]);
        for ci in 0..3 {
            assert!(negative_orthant_test(&kb, ci));
        }
        let f1 = tangent_bundle(&f1_fan()).unwrap();
        let kb = kaneyama_validate(f1_fan(), f1.ideal.clone(), ZMatrix::identity(4)).unwrap();
        assert!((0..4).any(|ci| !negative_orthant_test(&kb, ci)));
    }

    #[test]
    fn classify_tangent_p2_is_ample() {
        let report = kaneyama_classify(&diagonal_p2(&[1, 1, 1])).unwrap();
        assert!(report.nef && report.ample, "{report:?}");
    }

    #[test]
    fn classify_p2_one_one_two_is_ample() {
        // Sorted diagonal (1, 1, 2): the excess is 1, strictly below the
        // threshold 3 − 1 = 2, so the anticanonical class is ample; the
        // Nef cone over ℙ² is spanned by (−1, 0) and (1, 1) and contains
        // (1, 2) in its interior.
        let report = kaneyama_classify(&diagonal_p2(&[1, 1, 2])).unwrap();
        assert!(report.nef && report.ample, "{report:?}");
    }

    #[test]
    fn classify_p2_boundary_and_beyond() {
        // (1, 2, 2): excess 2 equals the threshold — Nef but not ample.
        let report = kaneyama_classify(&diagonal_p2(&[1, 2, 2])).unwrap();
        assert!(report.nef && !report.ample, "{report:?}");
        // (1, 3, 3): excess 4 exceeds the threshold — not Nef.
        let report = kaneyama_classify(&diagonal_p2(&[1, 3, 3])).unwrap();
        assert!(!report.nef && !report.ample, "{report:?}");
    }

    #[test]
    fn classify_product_never_ample() {
        let t = tangent_bundle(&p1p1_fan()).unwrap();
        let kb = kaneyama_validate(p1p1_fan(), t.ideal.clone(), ZMatrix::identity(4)).unwrap();
        let report = kaneyama_classify(&kb).unwrap();
        assert!(report.nef && !report.ample, "{report:?}");
        // Raising one entry to 2 breaks Nef-ness over a product.
        let mut d = ZMatrix::identity(4);
        d.set(0, 0, int(2));
        let kb = kaneyama_validate(p1p1_fan(), t.ideal.clone(), d).unwrap();
        let report = kaneyama_classify(&kb).unwrap();
        assert!(!report.nef && !report.ample, "{report:?}");
    }

    #[test]
    fn classify_f1_tangent_not_nef() {
        let t = tangent_bundle(&f1_fan()).unwrap();
        let kb = kaneyama_validate(f1_fan(), t.ideal.clone(), ZMatrix::identity(4)).unwrap();
        let report = kaneyama_classify(&kb).unwrap();
        assert!(!report.nef && !report.ample, "{report:?}");
        assert!(report.reason.contains("positive coordinate"), "{}", report.reason);
    }

    #[test]
    fn tangent_bundle_of_p2() {
        let t = tangent_bundle(&p2_fan()).unwrap();
        assert_eq!(t.ideal.coeffs.rows, 1);
        let row = t.ideal.coeffs.row(0);
        assert!(row.iter().all(|x| *x == row[0]) && !row[0].is_zero());
        assert!(t.validate().is_valid());
    }

    #[test]
    fn tangent_bundle_of_hexagon() {
        let t = tangent_bundle(&hexagon_fan()).unwrap();
        assert_eq!(t.ideal.coeffs.rows, 4);
        assert_eq!(t.num_vars(), 6);
        // Rays 0 and 4 are parallel, so the literal row e_0 sits off the
        // tropical linear space; the filtration it induces is the tropical
        // point e_0 + e_4, and validity holds in the diagonal sense.
        assert_eq!(t.normalized_row(&zv(&[1, 0, 0, 0, 0, 0])), zv(&[1, 0, 0, 0, 1, 0]));
        let kb =
            kaneyama_validate(hexagon_fan(), t.ideal.clone(), ZMatrix::identity(6)).unwrap();
        assert_eq!(kb.diagonal, zv(&[1, 1, 1, 1, 1, 1]));
        assert!(t.is_sparse());
        assert!(t.is_monomial());
        assert!(t.ci_check().passed);
    }
}
