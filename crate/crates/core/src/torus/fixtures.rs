//! Small tori used throughout the examples and tests.

use super::context::TorusContext;
use crate::localfield::{LocalFieldSpec, TowerSpec};
use crate::zlattice::{FiniteGroup, GammaLattice, IntMatrix};

fn m(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn ramified_quadratic_tower(c0: &str) -> TowerSpec {
    TowerSpec {
        b: vec!["0".into()],
        c: vec![vec![c0.into()], vec!["0".into()]],
    }
}

/// `G_m` over `F`.
pub fn split(field: LocalFieldSpec) -> TorusContext {
    let g = FiniteGroup::trivial();
    let x = GammaLattice::trivial(&g, 1);
    TorusContext::new(g, x, None, TowerSpec::trivial(), field).expect("split torus")
}

/// The norm-one torus of `F(sqrt(pi))`, from `c = y^2 - pi`.
pub fn norm_one_ramified(field: LocalFieldSpec) -> TorusContext {
    norm_one_with(field, "-pi")
}

/// The norm-one torus of `F[y]/(y^2 + c0)`.
pub fn norm_one_with(field: LocalFieldSpec, c0: &str) -> TorusContext {
    let g = FiniteGroup::cyclic(2, 2).expect("Z/2");
    let x = GammaLattice::new(&g, 1, vec![IntMatrix::identity(1), m(&[vec![-1]])]).expect("sign");
    TorusContext::new(g, x, None, ramified_quadratic_tower(c0), field).expect("norm-one torus")
}

/// `R_{L/F} G_m` for the unramified quadratic `L = F[x]/(x^2 - b)`, with `b`
/// a non-square unit.
pub fn unramified_induced(field: LocalFieldSpec, b: &str) -> TorusContext {
    let g = FiniteGroup::cyclic(2, 1).expect("Z/2");
    let swap = m(&[vec![0, 1], vec![1, 0]]);
    let x = GammaLattice::new(&g, 2, vec![IntMatrix::identity(2), swap]).expect("swap");
    let tower = TowerSpec {
        b: vec![format!("-({b})"), "0".into()],
        c: vec![vec!["-pi".into(), "0".into()]],
    };
    TorusContext::new(g, x, None, tower, field).expect("induced torus")
}

/// A rank-2 torus split by `F(sqrt b, sqrt pi)`: inertia acts by `-1`, the
/// unramified part swaps the coordinates.
pub fn klein_four(field: LocalFieldSpec, b: &str) -> TorusContext {
    let g = FiniteGroup::from_one_based(4, 2, &[1, 2, 3, 4, 2, 1, 4, 3, 3, 4, 1, 2, 4, 3, 2, 1])
        .expect("Klein four");
    let id = IntMatrix::identity(2);
    let swap = m(&[vec![0, 1], vec![1, 0]]);
    let x = GammaLattice::new(&g, 2, vec![id.clone(), id.scale(-1), swap.clone(), swap.scale(-1)])
        .expect("lattice");
    let tower = TowerSpec {
        b: vec![format!("-({b})"), "0".into()],
        c: vec![vec!["-pi".into(), "0".into()], vec!["0".into(), "0".into()]],
    };
    TorusContext::new(g, x, None, tower, field).expect("Klein four torus")
}

/// A rank-2 torus split by `F(pi^{1/4})`, the generator of inertia acting
/// by a quarter turn. Needs `4 | q - 1`.
pub fn quartic_rotation(field: LocalFieldSpec) -> TorusContext {
    let g = FiniteGroup::cyclic(4, 4).expect("Z/4");
    let r = m(&[vec![0, -1], vec![1, 0]]);
    let thetas = (0..4).map(|k| r.pow(k)).collect();
    let x = GammaLattice::new(&g, 2, thetas).expect("rotation");
    let tower = TowerSpec {
        b: vec!["0".into()],
        c: vec![
            vec!["-pi".into()],
            vec!["0".into()],
            vec!["0".into()],
            vec!["0".into()],
        ],
    };
    TorusContext::new(g, x, None, tower, field).expect("quartic torus")
}
