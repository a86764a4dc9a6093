use super::group::FiniteGroup;
use super::lattice::{coinvariants_of, FinAbGroup, GammaLattice};
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{invalid, Result};

/// A surjection `Y -> X` of lattices with group action, where the group
/// permutes a basis of `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    /// `n x R` matrix of the surjection.
    surj: IntMatrix,
    /// `perm[g][b]` is the basis index `g . b`.
    perm: Vec<Vec<usize>>,
}

/// An orbit of a subgroup on the permuted basis of `Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisOrbit {
    /// Chosen representative basis vector.
    pub rep: usize,
    /// `members[k]` is `s_k . rep` for the k-th element `s_k` of the subgroup.
    pub members: Vec<usize>,
}

impl Resolution {
    /// `Y = Z[G] (x) X` with basis `delta (x) e_i` (index `delta * n + i`),
    /// `G` acting by left translation on the group-ring factor, and the
    /// surjection `delta (x) x -> theta(delta) x`.
    pub fn induced(lattice: &GammaLattice, group: &FiniteGroup) -> Self {
        let n = lattice.rank();
        let m = group.order();
        let mut surj = IntMatrix::zeros(n, m * n);
        for delta in 0..m {
            let th = lattice.theta(delta);
            for i in 0..n {
                for j in 0..n {
                    surj[(j, delta * n + i)] = th[(j, i)];
                }
            }
        }
        let perm = (0..m)
            .map(|g| {
                (0..m * n)
                    .map(|b| group.mul(g, b / n) * n + b % n)
                    .collect()
            })
            .collect();
        Resolution { surj, perm }
    }

    /// An explicitly given resolution: surjection matrix plus the action of
    /// each group element on `Y`, which must be a permutation matrix.
    pub fn explicit(
        lattice: &GammaLattice,
        group: &FiniteGroup,
        surj: IntMatrix,
        action: &[IntMatrix],
    ) -> Result<Self> {
        let n = lattice.rank();
        let r = surj.cols();
        if surj.rows() != n {
            return invalid(format!("surjection must have {n} rows"));
        }
        if action.len() != group.order() {
            return invalid("one action matrix per group element is required");
        }
        let mut perm = Vec::with_capacity(action.len());
        for (g, a) in action.iter().enumerate() {
            if a.shape() != (r, r) {
                return invalid(format!("action of element {} is not {r}x{r}", g + 1));
            }
            let mut p = vec![usize::MAX; r];
            for col in 0..r {
                let c = a.column(col);
                let ones: Vec<usize> = (0..r).filter(|&i| c[i] != 0).collect();
                if ones.len() != 1 || c[ones[0]] != 1 {
                    return invalid(format!(
                        "action of element {} does not permute the basis of Y",
                        g + 1
                    ));
                }
                p[col] = ones[0];
            }
            let mut seen = p.clone();
            seen.sort_unstable();
            if seen != (0..r).collect::<Vec<_>>() {
                return invalid(format!("action of element {} is not a permutation", g + 1));
            }
            perm.push(p);
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul(a, b);
                if (0..r).any(|x| perm[a][perm[b][x]] != perm[ab][x]) {
                    return invalid("action on Y is not a homomorphism");
                }
            }
        }
        let res = Resolution { surj, perm };
        for g in 0..group.order() {
            if &res.surj * &res.action_matrix(g) != lattice.theta(g) * &res.surj {
                return invalid(format!(
                    "surjection is not equivariant for element {}",
                    g + 1
                ));
            }
        }
        if !res.is_surjective() {
            return invalid("map Y -> X is not surjective");
        }
        Ok(res)
    }

    pub fn rank(&self) -> usize {
        self.surj.cols()
    }

    pub fn surjection(&self) -> &IntMatrix {
        &self.surj
    }

    pub fn permutation(&self, g: usize) -> &[usize] {
        &self.perm[g]
    }

    pub fn action_matrix(&self, g: usize) -> IntMatrix {
        let r = self.rank();
        let mut a = IntMatrix::zeros(r, r);
        for b in 0..r {
            a[(self.perm[g][b], b)] = 1;
        }
        a
    }

    pub fn is_equivariant(&self, lattice: &GammaLattice) -> bool {
        (0..self.perm.len())
            .all(|g| &self.surj * &self.action_matrix(g) == lattice.theta(g) * &self.surj)
    }

    /// Surjective as a map of abelian groups: every invariant factor is 1
    /// and there are as many as the rank of `X`.
    pub fn is_surjective(&self) -> bool {
        let snf = smith_normal_form(&self.surj);
        let f = snf.invariant_factors();
        f.len() == self.surj.rows() && f.iter().all(|&d| d == 1)
    }

    /// Coinvariants `Y_S` for the subgroup with element indices `subgroup`.
    pub fn coinvariants(&self, subgroup: &[usize]) -> FinAbGroup {
        let actions: Vec<IntMatrix> = subgroup.iter().map(|&g| self.action_matrix(g)).collect();
        coinvariants_of(self.rank(), &actions)
    }

    /// Orbits of `subgroup` on the basis of `Y`, in order of smallest member.
    pub fn orbits(&self, subgroup: &[usize]) -> Vec<BasisOrbit> {
        let r = self.rank();
        let mut seen = vec![false; r];
        let mut out = vec![];
        for b in 0..r {
            if seen[b] {
                continue;
            }
            let members: Vec<usize> = subgroup.iter().map(|&g| self.perm[g][b]).collect();
            for &x in &members {
                seen[x] = true;
            }
            out.push(BasisOrbit { rep: b, members });
        }
        out
    }

    /// Whether `subgroup` acts freely on the basis (every orbit is regular).
    pub fn is_free_over(&self, subgroup: &[usize]) -> bool {
        self.orbits(subgroup).iter().all(|o| {
            let mut m = o.members.clone();
            m.sort_unstable();
            m.dedup();
            m.len() == subgroup.len()
        })
    }

    /// Matrix of the induced map `Y_S -> X_S` in canonical coordinates.
    pub fn induced_coinvariant_map(
        &self,
        lattice: &GammaLattice,
        subgroup: &[usize],
    ) -> (FinAbGroup, FinAbGroup, IntMatrix) {
        let yi = self.coinvariants(subgroup);
        let xi = coinvariants_of(lattice.rank(), &lattice.restrict(subgroup));
        // canonical Y_S coordinates -> ambient Y via the inverse basis change
        let uinv = yi
            .basis_change()
            .unimodular_inverse()
            .expect("basis change is unimodular");
        let snf_rows = canonical_rows(&yi);
        let cols: Vec<Vec<i64>> = snf_rows
            .iter()
            .map(|&k| xi.project(&self.surj.apply(&uinv.column(k))))
            .collect();
        let k = xi.torsion().len() + xi.free_rank();
        let mut m = IntMatrix::zeros(k, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..k {
                m[(i, j)] = c[i];
            }
        }
        (yi, xi, m)
    }

    /// Whether `Y_S -> X_S` is onto: the image together with the torsion
    /// relations of `X_S` spans all of `Z^k`.
    pub fn coinvariant_map_is_surjective(&self, lattice: &GammaLattice, subgroup: &[usize]) -> bool {
        let (_, xi, m) = self.induced_coinvariant_map(lattice, subgroup);
        let k = m.rows();
        if k == 0 {
            return true;
        }
        let mut diag = vec![0i64; k];
        for (i, d) in xi.torsion().iter().enumerate() {
            diag[i] = *d;
        }
        let rel = IntMatrix::hcat(&[m, IntMatrix::diagonal(&diag)]);
        let snf = smith_normal_form(&rel);
        let f = snf.invariant_factors();
        f.len() == k && f.iter().all(|&d| d == 1)
    }
}

/// Rows of the SNF basis change that carry the canonical coordinates of `g`.
fn canonical_rows(g: &FinAbGroup) -> Vec<usize> {
    let u = g.basis_change();
    (0..g.projection().rows())
        .map(|i| {
            let row = g.projection().row(i);
            (0..u.rows()).find(|&k| u.row(k) == row).expect("projection row")
        })
        .collect()
}

/// `Y_I` is torsion free.
pub fn check_y_i_torsion_free(res: &Resolution, inertia: &[usize]) -> bool {
    res.coinvariants(inertia).torsion().is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> FiniteGroup {
        FiniteGroup::cyclic(2, 2).unwrap()
    }

    fn sign_lattice(g: &FiniteGroup) -> GammaLattice {
        GammaLattice::new(g, 1, vec![IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])])
            .unwrap()
    }

    #[test]
    fn trivial_action_induced_is_swap() {
        let g = z2();
        let x = GammaLattice::trivial(&g, 1);
        let r = Resolution::induced(&x, &g);
        assert_eq!(r.surjection(), &IntMatrix::from_rows(&[vec![1, 1]]));
        assert_eq!(r.action_matrix(1), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]));
        assert!(r.is_equivariant(&x));
        assert!(r.is_surjective());
    }

    #[test]
    fn sign_action_induced() {
        // theta(sigma) surj = surj swap
        let g = z2();
        let x = sign_lattice(&g);
        let r = Resolution::induced(&x, &g);
        assert_eq!(r.surjection(), &IntMatrix::from_rows(&[vec![1, -1]]));
        assert_eq!(r.action_matrix(1), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]));
        assert!(r.is_equivariant(&x));
        assert!(check_y_i_torsion_free(&r, &[0, 1]));
        assert!(r.coinvariant_map_is_surjective(&x, &[0, 1]));
    }

    #[test]
    fn trivial_group_resolution_is_identity() {
        let g = FiniteGroup::trivial();
        let x = GammaLattice::trivial(&g, 2);
        let r = Resolution::induced(&x, &g);
        assert!(r.surjection().is_identity());
        assert!(check_y_i_torsion_free(&r, &[0]));
    }

    #[test]
    fn non_induced_module_has_torsion() {
        // Y = X with the sign action is not a permutation module; its
        // coinvariants Z/2 carry torsion.
        let g = z2();
        let x = sign_lattice(&g);
        let sign = [IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])];
        assert!(Resolution::explicit(&x, &g, IntMatrix::identity(1), &sign).is_err());
        let xi = coinvariants_of(1, &sign);
        assert_eq!(xi.torsion(), &[2]);
    }

    #[test]
    fn explicit_matches_induced() {
        let g = z2();
        let x = sign_lattice(&g);
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let r = Resolution::explicit(
            &x,
            &g,
            IntMatrix::from_rows(&[vec![1, -1]]),
            &[IntMatrix::identity(2), swap],
        )
        .unwrap();
        assert_eq!(r, Resolution::induced(&x, &g));
        assert!(r.is_free_over(&[0, 1]));
    }

    #[test]
    fn rank_two_induced_invariants() {
        let g = z2();
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let x = GammaLattice::new(&g, 2, vec![IntMatrix::identity(2), swap]).unwrap();
        let r = Resolution::induced(&x, &g);
        assert_eq!(r.rank(), 4);
        assert!(r.is_equivariant(&x));
        assert!(r.is_surjective());
        assert!(check_y_i_torsion_free(&r, &[0, 1]));
        assert!(r.coinvariant_map_is_surjective(&x, &[0, 1]));
        assert_eq!(r.orbits(&[0, 1]).len(), 2);
    }
}
