//! Shared constructors for the worked examples used across unit tests.

use crate::bundle::{Fixtures, ToricVectorBundle};
use crate::exact::{int, rat_int, Int, QMatrix, ZMatrix};
use crate::matroid::LinearIdealMatrix;
use crate::toric::Fan;

pub fn zv(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

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

/// The hexagonal fan: a two-point blow-up of ℙ¹×ℙ¹ (a degree-6 del Pezzo).
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

pub fn hyperplane_ideal(m: usize) -> LinearIdealMatrix {
    LinearIdealMatrix::new(QMatrix::from_rows(vec![vec![rat_int(1); m]])).unwrap()
}

pub fn tangent_p2() -> ToricVectorBundle {
    ToricVectorBundle::new(
        p2_fan(),
        hyperplane_ideal(3),
        ZMatrix::identity(3),
        Fixtures::default(),
    )
    .unwrap()
}

/// The sparse rank-2 bundle over the hexagonal surface whose Nef cone
/// strictly contains its basepoint-free monoid.
pub fn nodland_bundle() -> ToricVectorBundle {
    let c = [3i64, 6, 9, 2, 9, 6];
    let mut d = ZMatrix::zero(6, 3);
    for i in 0..4 {
        d.set(i, 0, int(c[i]));
    }
    d.set(4, 1, int(c[4]));
    d.set(5, 2, int(c[5]));
    ToricVectorBundle::new(hexagon_fan(), hyperplane_ideal(3), d, Fixtures::default()).unwrap()
}

/// Extension of the tangent bundle of ℙ² by one column; its projectivization
/// contains the blow-up of ℙ² at the three torus-fixed points.
pub fn blowup_extension() -> ToricVectorBundle {
    let mut d = ZMatrix::zero(3, 4);
    for i in 0..3 {
        d.set(i, i, int(1));
        d.set(i, 3, int(1));
    }
    ToricVectorBundle::new(p2_fan(), hyperplane_ideal(4), d, Fixtures::default()).unwrap()
}

/// Second symmetric power of the tangent bundle of ℙ², supplied as a fixture
/// because its Cox ring needs one generator of symmetric-power degree two.
/// Variables are ordered y12, y13, y23, y11, y22, y33.
pub fn sym2_tangent_p2() -> ToricVectorBundle {
    let ideal = LinearIdealMatrix::new(QMatrix::from_i64(&[
        &[1, 1, 0, 1, 0, 0],
        &[1, 0, 1, 0, 1, 0],
        &[0, 1, 1, 0, 0, 1],
    ]))
    .unwrap();
    let diagram = ZMatrix::from_i64(&[
        &[1, 1, 0, 2, 0, 0],
        &[1, 0, 1, 0, 2, 0],
        &[0, 1, 1, 0, 0, 2],
    ]);
    let fixtures = Fixtures {
        extra_columns: vec![zv(&[2, 2, 2])],
        extra_degrees: vec![(zv(&[6]), int(2))],
        extra_m_rows: vec![
            zv(&[4, 4, 4, 4, 4, 4, 17, 0, 0, 0]),
            zv(&[10, 10, 0, 20, 0, 0, 27, 0, 0, 0]),
        ],
    };
    ToricVectorBundle::new(p2_fan(), ideal, diagram, fixtures).unwrap()
}
