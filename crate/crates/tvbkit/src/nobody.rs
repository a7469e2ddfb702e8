//! Newton-Okounkov machinery: the valuation matrix `M`, global bodies,
//! per-class polytopes and their marked images, Cayley polytopes, and the
//! weight quasivaluation used as an independent dimension oracle.

use itertools::Itertools;
use num_traits::{One, Zero};

use crate::bundle::{PEClass, ToricVectorBundle};
use crate::exact::{dot, rat_int, to_rat_vec, Int, QMatrix, Rat, ZMatrix};
use crate::matroid::{FlagOfFlats, LinearIdealMatrix};
use crate::polyhedral::{map_lattice_points, LatticePolytope, MappedPoints, QCone};
use crate::toric::rat_class;

/// The valuation matrix in block form `[D −I; E 0]`, where the top block has
/// one row per ray and the bottom block carries the symmetric-power degree
/// row followed by flag indicator rows (or explicitly supplied rows in
/// fixture mode). Columns are ordered `(b; a)`: the `Y` block first.
#[derive(Clone, Debug)]
pub struct NOMatrix {
    pub matrix: ZMatrix,
    pub flag: FlagOfFlats,
}

/// How the prime-cone hypothesis behind the Newton-Okounkov construction is
/// certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeConeCertificate {
    /// Sparse bundles satisfy the hypothesis for every maximal flag.
    Sparse,
    /// Some diagram row lies in the open maximal face picked by the flag.
    InteriorRow,
    /// Not certified; results are candidates only.
    Unverified,
}

/// A per-class body: the image of the class polytope under the valuation
/// matrix, with multiplicity collapsed in `points.distinct`.
#[derive(Clone, Debug)]
pub struct NOBody {
    pub matrix: ZMatrix,
    pub certificate: PrimeConeCertificate,
    pub points: MappedPoints,
}

/// Fibration of a class polytope over the dilated standard simplex: one
/// divisor polytope on the base per monomial in the `Y` block.
#[derive(Clone, Debug)]
pub struct CayleyData {
    pub beta: Int,
    /// `(b, lattice point count of the fiber over b)`.
    pub fibers: Vec<(Vec<Int>, usize)>,
    pub total: usize,
}

fn check_maximal_flag(e: &ToricVectorBundle, flag: &FlagOfFlats) -> Result<(), String> {
    let m = e.num_vars();
    let r = e.rank();
    if flag.chain.len() != r {
        return Err(format!("flag has {} flats; a maximal flag has {}", flag.chain.len(), r));
    }
    for (k, f) in flag.chain.iter().enumerate() {
        if e.matroid().closure(f) != *f {
            return Err(format!("chain entry {k} is not a flat"));
        }
        if e.matroid().subset_rank(f) != r - k {
            return Err(format!("chain entry {k} has the wrong rank"));
        }
    }
    if flag.chain[0] != (0..m).collect::<Vec<_>>() {
        return Err("flag must start at the full ground set".into());
    }
    Ok(())
}

/// Total number of `Y`-block columns, fixture columns included.
fn y_cols(e: &ToricVectorBundle) -> usize {
    e.num_vars() + e.fixtures.extra_columns.len()
}

/// Symmetric-power degree of each `Y`-block column.
fn sym_degrees(e: &ToricVectorBundle) -> Vec<Int> {
    let mut d = vec![Int::one(); e.num_vars()];
    d.extend(e.fixtures.extra_degrees.iter().map(|(_, b)| b.clone()));
    d
}

/// Assemble the valuation matrix for a maximal flag. With fixture rows
/// present, those replace the flag indicator rows verbatim.
pub fn build_m(e: &ToricVectorBundle, flag: &FlagOfFlats) -> Result<NOMatrix, String> {
    check_maximal_flag(e, flag)?;
    let n = e.num_rays();
    let m = e.num_vars();
    let total = y_cols(e);
    let width = total + n;
    let mut rows: Vec<Vec<Int>> = Vec::with_capacity(n + e.rank());
    for i in 0..n {
        let mut row: Vec<Int> = e.diagram.row(i).to_vec();
        row.extend(e.fixtures.extra_columns.iter().map(|c| c[i].clone()));
        for k in 0..n {
            row.push(if k == i { -Int::one() } else { Int::zero() });
        }
        rows.push(row);
    }
    let mut deg_row = sym_degrees(e);
    deg_row.extend(std::iter::repeat(Int::zero()).take(n));
    rows.push(deg_row);
    if e.fixtures.extra_m_rows.is_empty() {
        for f in &flag.chain[1..] {
            let mut row = vec![Int::zero(); width];
            for &j in f {
                row[j] = Int::one();
            }
            rows.push(row);
        }
    } else {
        if e.fixtures.extra_m_rows.len() != e.rank() - 1 {
            return Err(format!(
                "expected {} fixture rows, found {}",
                e.rank() - 1,
                e.fixtures.extra_m_rows.len()
            ));
        }
        for row in &e.fixtures.extra_m_rows {
            if row.len() != width {
                return Err(format!("fixture row length {} != {}", row.len(), width));
            }
            rows.push(row.clone());
        }
    }
    let _ = m;
    Ok(NOMatrix { matrix: ZMatrix::from_rows(rows), flag: flag.clone() })
}

/// Certify the prime-cone hypothesis for a flag choice.
pub fn precondition_certificate(
    e: &ToricVectorBundle,
    flag: &FlagOfFlats,
) -> PrimeConeCertificate {
    if e.is_sparse() {
        return PrimeConeCertificate::Sparse;
    }
    for i in 0..e.num_rays() {
        let w = rat_class(e.diagram.row(i));
        if e.matroid().row_in_open_maximal_face(&w).as_ref() == Some(flag) {
            return PrimeConeCertificate::InteriorRow;
        }
    }
    PrimeConeCertificate::Unverified
}

/// Cone spanned by the columns of the valuation matrix; it contains the
/// image of every monomial exponent vector.
pub fn global_body(m: &NOMatrix) -> QCone {
    let cols: Vec<Vec<Rat>> =
        (0..m.matrix.cols).map(|j| to_rat_vec(&m.matrix.col(j))).collect();
    QCone::from_generators(m.matrix.rows, cols)
}

/// The polytope of monomial exponents `(b; a)` of degree `(α, β)`: `b` over
/// the `Y` block (weighted by symmetric-power degree), `a` over the rays.
pub fn p_alpha_beta(e: &ToricVectorBundle, c: &PEClass) -> LatticePolytope {
    let n = e.num_rays();
    let total = y_cols(e);
    let dim = total + n;
    let classes = e.class_lattice();
    let rank = classes.rank();
    let mut equalities: Vec<(Vec<Rat>, Rat)> = Vec::new();
    let mut deg_row: Vec<Rat> = to_rat_vec(&sym_degrees(e));
    deg_row.extend(std::iter::repeat(Rat::zero()).take(n));
    equalities.push((deg_row, Rat::from(c.beta.clone())));
    // One row per class coordinate: Σ b_j d_j − Σ a_i [D_i] = α.
    let mut y_classes: Vec<Vec<Int>> =
        (0..e.num_vars()).map(|j| e.deg_y(j).alpha).collect();
    y_classes.extend(e.fixtures.extra_degrees.iter().map(|(a, _)| a.clone()));
    for k in 0..rank {
        let mut row: Vec<Rat> = Vec::with_capacity(dim);
        for d in &y_classes {
            row.push(Rat::from(d[k].clone()));
        }
        for i in 0..n {
            row.push(-Rat::from(classes.class_of_ray_divisor(i)[k].clone()));
        }
        equalities.push((row, Rat::from(c.alpha[k].clone())));
    }
    let inequalities: Vec<(Vec<Rat>, Rat)> = (0..dim)
        .map(|t| {
            let mut row = vec![Rat::zero(); dim];
            row[t] = Rat::one();
            (row, Rat::zero())
        })
        .collect();
    LatticePolytope::new(dim, equalities, inequalities)
}

/// The Newton-Okounkov body data of a class: the marked image of its
/// exponent polytope under the valuation matrix.
pub fn nobody_of_class(
    e: &ToricVectorBundle,
    flag: &FlagOfFlats,
    c: &PEClass,
) -> Result<NOBody, String> {
    let m = build_m(e, flag)?;
    let points = p_alpha_beta(e, c).lattice_points()?;
    let certificate = precondition_certificate(e, flag);
    Ok(NOBody { matrix: m.matrix.clone(), certificate, points: map_lattice_points(&m.matrix, &points) })
}

/// Fiber the exponent polytope over the `Y`-block simplex: for every `b`
/// with matching symmetric-power degree, count the lattice points of the
/// base divisor polytope of `Σ b_j d_j + α`. Errors when some column fails
/// the per-column effectiveness hypothesis.
pub fn cayley_polytope(e: &ToricVectorBundle, c: &PEClass) -> Result<CayleyData, String> {
    let classes = e.class_lattice();
    let rank = classes.rank();
    let bad: Vec<usize> = (0..e.num_vars())
        .filter(|&j| {
            let cls: Vec<Int> = (0..rank)
                .map(|k| &c.beta * &e.deg_y(j).alpha[k] + &c.alpha[k])
                .collect();
            classes
                .divisor_polytope(&cls)
                .lattice_points()
                .map(|pts| pts.is_empty())
                .unwrap_or(true)
        })
        .collect();
    if !bad.is_empty() {
        return Err(format!("columns {bad:?} fail the effectiveness hypothesis"));
    }
    // Enumerate the Y exponents of the right symmetric-power degree.
    let total = y_cols(e);
    let degs = sym_degrees(e);
    let eq = vec![(to_rat_vec(&degs), Rat::from(c.beta.clone()))];
    let ineqs: Vec<(Vec<Rat>, Rat)> = (0..total)
        .map(|t| {
            let mut row = vec![Rat::zero(); total];
            row[t] = Rat::one();
            (row, Rat::zero())
        })
        .collect();
    let simplex = LatticePolytope::new(total, eq, ineqs);
    let mut y_classes: Vec<Vec<Int>> =
        (0..e.num_vars()).map(|j| e.deg_y(j).alpha).collect();
    y_classes.extend(e.fixtures.extra_degrees.iter().map(|(a, _)| a.clone()));
    let mut fibers = Vec::new();
    let mut count = 0usize;
    for b in simplex.lattice_points()? {
        let cls: Vec<Int> = (0..rank)
            .map(|k| {
                let mut s = c.alpha[k].clone();
                for (j, bj) in b.iter().enumerate() {
                    s += bj * &y_classes[j][k];
                }
                s
            })
            .collect();
        let pts = classes.divisor_polytope(&cls).lattice_points()?;
        count += pts.len();
        fibers.push((b, pts.len()));
    }
    Ok(CayleyData { beta: c.beta.clone(), fibers, total: count })
}

/// A polynomial in the ideal variables: `(exponent vector, coefficient)`
/// terms, all of the same total degree.
pub type YPolynomial = Vec<(Vec<u32>, Rat)>;

const QUASIVALUATION_DEGREE_CAP: u32 = 4;

fn monomials_of_degree(m: usize, ell: u32) -> Vec<Vec<u32>> {
    (0..m)
        .combinations_with_replacement(ell as usize)
        .map(|pick| {
            let mut e = vec![0u32; m];
            for v in pick {
                e[v] += 1;
            }
            e
        })
        .collect()
}

/// Maximal `w`-weight over all representatives of `f` modulo the degree
/// piece of the ideal. `None` means `f` lies in the ideal piece (weight
/// unbounded).
pub fn weight_quasivaluation(
    ideal: &LinearIdealMatrix,
    w: &[Rat],
    f: &YPolynomial,
) -> Result<Option<Rat>, String> {
    let m = ideal.num_vars();
    if f.is_empty() {
        return Ok(None);
    }
    let ell: u32 = f[0].0.iter().sum();
    if ell > QUASIVALUATION_DEGREE_CAP {
        return Err(format!("degree {ell} exceeds the cap {QUASIVALUATION_DEGREE_CAP}"));
    }
    for (e, _) in f {
        if e.len() != m || e.iter().sum::<u32>() != ell {
            return Err("terms must share one total degree in all variables".into());
        }
    }
    let basis = monomials_of_degree(m, ell);
    let index: std::collections::HashMap<Vec<u32>, usize> =
        basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let mut fvec = vec![Rat::zero(); basis.len()];
    for (e, c) in f {
        fvec[index[e]] += c;
    }
    // The degree piece of the ideal: each generator times each monomial of
    // degree ell - 1.
    let mut ideal_rows: Vec<Vec<Rat>> = Vec::new();
    if ell >= 1 {
        for k in 0..ideal.coeffs.rows {
            for g in monomials_of_degree(m, ell - 1) {
                let mut row = vec![Rat::zero(); basis.len()];
                for j in 0..m {
                    let c = ideal.coeffs.get(k, j);
                    if !c.is_zero() {
                        let mut e = g.clone();
                        e[j] += 1;
                        row[index[&e]] += c;
                    }
                }
                ideal_rows.push(row);
            }
        }
    }
    let weights: Vec<Rat> = basis
        .iter()
        .map(|e| {
            let ev: Vec<Rat> = e.iter().map(|&x| rat_int(x as i64)).collect();
            dot(w, &ev)
        })
        .collect();
    // A representative in the ideal piece itself has unbounded weight.
    let ideal_rank = if ideal_rows.is_empty() {
        0
    } else {
        QMatrix::from_rows(ideal_rows.clone()).rank()
    };
    {
        let mut rows = ideal_rows.clone();
        rows.push(fvec.clone());
        if QMatrix::from_rows(rows).rank() == ideal_rank {
            return Ok(None);
        }
    }
    let mut levels: Vec<Rat> = weights.clone();
    levels.sort();
    levels.dedup();
    levels.reverse();
    for t in levels {
        // Span of the ideal piece plus all monomials of weight >= t.
        let mut rows = ideal_rows.clone();
        for (i, wt) in weights.iter().enumerate() {
            if *wt >= t {
                let mut row = vec![Rat::zero(); basis.len()];
                row[i] = Rat::one();
                rows.push(row);
            }
        }
        let base = QMatrix::from_rows(rows.clone());
        rows.push(fvec.clone());
        let extended = QMatrix::from_rows(rows);
        if base.rank() == extended.rank() {
            return Ok(Some(t));
        }
    }
    unreachable!("the lowest level spans the whole graded piece")
}

/// Dimension of the degree-`(α, β)` graded piece of the Cox ring presented
/// by the homogenized generators: monomials of that degree modulo the span
/// of all multiples of the relations.
pub fn section_dimension(e: &ToricVectorBundle, c: &PEClass) -> Result<usize, String> {
    let monomials = p_alpha_beta(e, c).lattice_points()?;
    if monomials.is_empty() {
        return Ok(0);
    }
    let index: std::collections::HashMap<Vec<Int>, usize> =
        monomials.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let total = y_cols(e);
    let n = e.num_rays();
    let rank = e.class_lattice().rank();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for k in 0..e.ideal.coeffs.rows {
        let shift = e.homogenization_shift(k);
        let rel_deg = e.relation_degrees()[k].clone();
        // Cofactor degree (α, β) − deg p_k.
        let cof = PEClass::new(
            (0..rank).map(|t| &c.alpha[t] - &rel_deg.alpha[t]).collect(),
            &c.beta - &rel_deg.beta,
        );
        for bg in p_alpha_beta(e, &cof).lattice_points()? {
            // Expand X^γ Y^{b'} p_k over the monomial basis.
            let mut row = vec![Rat::zero(); monomials.len()];
            for j in 0..e.num_vars() {
                let coeff = e.ideal.coeffs.get(k, j);
                if coeff.is_zero() {
                    continue;
                }
                let mut term = bg.clone();
                term[j] += Int::one();
                for i in 0..n {
                    term[total + i] += e.diagram.get(i, j) - &shift[i];
                }
                let slot = index
                    .get(&term)
                    .ok_or_else(|| "relation term escaped the graded piece".to_string())?;
                row[*slot] += coeff;
            }
            rows.push(row);
        }
    }
    let relations = if rows.is_empty() {
        0
    } else {
        QMatrix::from_rows(rows).rank()
    };
    Ok(monomials.len() - relations)
}
