use std::fmt;

use super::group::FiniteGroup;
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{invalid, Result};

/// `Z^n` with an action of a finite group through integer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaLattice {
    rank: usize,
    theta: Vec<IntMatrix>,
}

impl GammaLattice {
    /// Validates that `theta` is a homomorphism into `GL_n(Z)`.
    ///
    /// Faithfulness is reported separately by [`GammaLattice::is_faithful`]:
    /// a non-faithful action still defines a torus (split by a smaller field).
    pub fn new(group: &FiniteGroup, rank: usize, theta: Vec<IntMatrix>) -> Result<Self> {
        if theta.len() != group.order() {
            return invalid(format!(
                "theta has {} matrices, group has {} elements",
                theta.len(),
                group.order()
            ));
        }
        for (i, t) in theta.iter().enumerate() {
            if t.shape() != (rank, rank) {
                return invalid(format!("theta({}) is not {rank}x{rank}", i + 1));
            }
            if t.det().abs() != 1 {
                return invalid(format!("theta({}) is not invertible over Z", i + 1));
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                if &theta[a] * &theta[b] != theta[group.mul(a, b)] {
                    return invalid(format!(
                        "theta is not a homomorphism at ({}, {})",
                        a + 1,
                        b + 1
                    ));
                }
            }
        }
        Ok(GammaLattice { rank, theta })
    }

    /// Whether distinct group elements act by distinct matrices.
    pub fn is_faithful(&self) -> bool {
        (0..self.theta.len())
            .all(|a| (a + 1..self.theta.len()).all(|b| self.theta[a] != self.theta[b]))
    }

    /// The trivial action on `Z^n`.
    pub fn trivial(group: &FiniteGroup, rank: usize) -> Self {
        GammaLattice {
            rank,
            theta: vec![IntMatrix::identity(rank); group.order()],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn theta(&self, g: usize) -> &IntMatrix {
        &self.theta[g]
    }

    pub fn thetas(&self) -> &[IntMatrix] {
        &self.theta
    }

    /// Restriction to the elements `idx` (which must form a subgroup).
    pub fn restrict(&self, idx: &[usize]) -> Vec<IntMatrix> {
        idx.iter().map(|&g| self.theta[g].clone()).collect()
    }

    /// Sum of `theta(g)` over `idx`.
    pub fn norm_matrix(&self, idx: &[usize]) -> IntMatrix {
        idx.iter().fold(IntMatrix::zeros(self.rank, self.rank), |acc, &g| {
            acc.add(&self.theta[g])
        })
    }
}

/// A finitely generated abelian group `Z/d_1 + ... + Z/d_k + Z^r` presented
/// as a quotient of an ambient `Z^n`, together with the projection.
///
/// Canonical coordinates: torsion coordinates first (each reduced into
/// `0..d_i`, increasing in the divisibility order), free coordinates last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAbGroup {
    torsion: Vec<i64>,
    free_rank: usize,
    /// `(k + r) x n` matrix sending ambient coordinates to canonical ones.
    projection: IntMatrix,
    /// Full unimodular basis change the projection was read off from.
    basis_change: IntMatrix,
}

impl FinAbGroup {
    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn torsion_order(&self) -> i64 {
        self.torsion.iter().product()
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    pub fn basis_change(&self) -> &IntMatrix {
        &self.basis_change
    }

    pub fn ambient_rank(&self) -> usize {
        self.projection.cols()
    }

    /// Canonical coordinates of the class of an ambient vector.
    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        let mut c = self.projection.apply(x);
        for (i, d) in self.torsion.iter().enumerate() {
            c[i] = c[i].rem_euclid(*d);
        }
        c
    }

    pub fn is_zero_class(&self, x: &[i64]) -> bool {
        self.project(x).iter().all(|&c| c == 0)
    }

    /// Reduces a vector already in canonical coordinates.
    pub fn normalize(&self, c: &[i64]) -> Vec<i64> {
        let mut c = c.to_vec();
        for (i, d) in self.torsion.iter().enumerate() {
            c[i] = c[i].rem_euclid(*d);
        }
        c
    }
}

impl fmt::Display for FinAbGroup {
    /// `Z/2 + Z`, `0` for the trivial group.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Quotient of `Z^n` by the span of the columns of `relations` (`n x k`).
pub fn quotient_by_relations(n: usize, relations: &IntMatrix) -> FinAbGroup {
    assert_eq!(relations.rows(), n);
    let snf = smith_normal_form(relations);
    let mut torsion = vec![];
    let mut torsion_rows = vec![];
    let mut free_rows = vec![];
    for i in 0..n {
        let d = snf.diag(i);
        match d {
            0 => free_rows.push(i),
            1 => {}
            _ => {
                torsion.push(d);
                torsion_rows.push(i);
            }
        }
    }
    let free_rank = free_rows.len();
    let rows: Vec<usize> = torsion_rows.into_iter().chain(free_rows).collect();
    let projection = if rows.is_empty() {
        IntMatrix::from_flat(0, n, vec![])
    } else {
        snf.u.submatrix_rows(&rows)
    };
    FinAbGroup {
        torsion,
        free_rank,
        projection,
        basis_change: snf.u,
    }
}

/// Coinvariants of `Z^n` under the matrices `actions`: the quotient by the
/// span of `(a - 1) x` over all `a` and all basis vectors `x`.
pub fn coinvariants_of(n: usize, actions: &[IntMatrix]) -> FinAbGroup {
    let id = IntMatrix::identity(n);
    let blocks: Vec<IntMatrix> = actions.iter().map(|a| a.sub(&id)).collect();
    let rel = if blocks.is_empty() {
        IntMatrix::zeros(n, 0)
    } else {
        IntMatrix::hcat(&blocks)
    };
    quotient_by_relations(n, &rel)
}

/// `X_S` for a subgroup `S` of the acting group, given by its element indices.
pub fn coinvariants(
    lattice: &GammaLattice,
    group: &FiniteGroup,
    subgroup: &[usize],
) -> Result<FinAbGroup> {
    if !group.is_subgroup(subgroup) {
        return invalid("indices do not form a subgroup");
    }
    Ok(coinvariants_of(lattice.rank(), &lattice.restrict(subgroup)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FiniteGroup {
        FiniteGroup::cyclic(2, 2).unwrap()
    }

    #[test]
    fn sign_action_coinvariants_are_z2() {
        // quotient of Z by <2x>
        let g = z2();
        let x = GammaLattice::new(
            &g,
            1,
            vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap();
        let xi = coinvariants(&x, &g, &[0, 1]).unwrap();
        assert_eq!(xi.torsion(), &[2]);
        assert_eq!(xi.free_rank(), 0);
        assert_eq!(xi.project(&[1]), vec![1]);
        assert_eq!(xi.project(&[2]), vec![0]);
        assert_eq!(xi.to_string(), "Z/2");
    }

    #[test]
    fn trivial_action_gives_identity_projection() {
        let g = z2();
        let x = GammaLattice::trivial(&g, 3);
        let xi = coinvariants(&x, &g, &[0, 1]).unwrap();
        assert_eq!(xi.free_rank(), 3);
        assert!(xi.torsion().is_empty());
        assert!(xi.projection().is_identity());
    }

    #[test]
    fn trivial_subgroup_returns_lattice_unchanged() {
        let g = z2();
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let x = GammaLattice::new(&g, 2, vec![IntMatrix::identity(2), swap]).unwrap();
        let xi = coinvariants(&x, &g, &[0]).unwrap();
        assert_eq!(xi.free_rank(), 2);
        assert!(xi.projection().is_identity());
    }

    #[test]
    fn regular_representation_coinvariants_are_z() {
        // span of (1, -1): quotient Z^2 / <(1,-1)> = Z
        let g = z2();
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let x = GammaLattice::new(&g, 2, vec![IntMatrix::identity(2), swap]).unwrap();
        let xi = coinvariants(&x, &g, &[0, 1]).unwrap();
        assert_eq!(xi.free_rank(), 1);
        assert!(xi.torsion().is_empty());
        assert_eq!(xi.project(&[1, 0]), xi.project(&[0, 1]));
        assert_ne!(xi.project(&[1, 0]), vec![0]);
    }

    #[test]
    fn rejects_non_homomorphism_and_flags_non_injective() {
        let g = z2();
        let bad = IntMatrix::from_rows(&[vec![2]]);
        assert!(GammaLattice::new(&g, 1, vec![IntMatrix::identity(1), bad]).is_err());
        let triv = GammaLattice::new(&g, 1, vec![IntMatrix::identity(1); 2]).unwrap();
        assert!(!triv.is_faithful());
    }
}
