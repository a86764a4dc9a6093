//! Automorphisms of `E/F` as matrices, matched against the fixed group.

use std::collections::{HashMap, VecDeque};

use super::tower::{EElem, Tower};
use crate::error::{Error, Result};
use crate::zlattice::FiniteGroup;

/// The automorphisms `sigma_1, .., sigma_m` of `E` over `F`, indexed like the
/// fixed group. Each is stored as the images of the basis `x^i y^j`.
#[derive(Clone, Debug)]
pub struct GaloisData {
    columns: Vec<Vec<EElem>>,
    x_images: Vec<EElem>,
    y_images: Vec<EElem>,
}

impl GaloisData {
    pub fn order(&self) -> usize {
        self.columns.len()
    }

    /// Matrix columns of `sigma_g`: column `k` holds `sigma_g(x^i y^j)`.
    pub fn columns(&self, g: usize) -> &[EElem] {
        &self.columns[g]
    }

    pub fn x_image(&self, g: usize) -> &EElem {
        &self.x_images[g]
    }

    pub fn y_image(&self, g: usize) -> &EElem {
        &self.y_images[g]
    }

    pub fn apply(&self, tower: &Tower, g: usize, z: &[crate::localfield::FElem]) -> EElem {
        tower.apply(&self.columns[g], z)
    }

    /// Whether `sigma_a sigma_b = sigma_{ab}` on the basis, modulo `pi^n`.
    pub fn check_group_law(&self, tower: &Tower, group: &FiniteGroup, n: i64) -> Option<bool> {
        let m = self.order();
        let mut all = Some(true);
        for a in 0..m {
            for b in 0..m {
                let ab = group.mul(a, b);
                for k in 0..tower.m() {
                    let lhs = self.apply(tower, a, &self.columns[b][k]);
                    match tower.eq_mod(&lhs, &self.columns[ab][k], n) {
                        Some(false) => return Some(false),
                        None => all = None,
                        Some(true) => {}
                    }
                }
            }
        }
        all
    }

    /// Whether `sigma_g` fixes `L`, i.e. `sigma_g(x) = x` modulo `pi^n`.
    pub fn fixes_l(&self, tower: &Tower, g: usize, n: i64) -> Option<bool> {
        tower.eq_mod(&self.x_images[g], &tower.x(), n)
    }

    /// Order of `sigma_g` restricted to `L`.
    pub fn order_on_l(&self, tower: &Tower, g: usize, n: i64) -> Option<usize> {
        let x = tower.x();
        let mut cur = x.clone();
        for k in 1..=tower.f() {
            cur = self.apply(tower, g, &cur);
            if tower.eq_mod(&cur, &x, n)? {
                return Some(k);
            }
        }
        None
    }

    /// `sigma_g(uv) = sigma_g(u) sigma_g(v)` and `sigma_g(u+v) = ..` on the
    /// given samples, and `sigma_g` fixes `F`.
    pub fn is_ring_automorphism(
        &self,
        tower: &Tower,
        g: usize,
        samples: &[EElem],
        n: i64,
    ) -> Option<bool> {
        let mut verdict = tower.eq_mod(&self.apply(tower, g, &tower.one()), &tower.one(), n)?;
        for u in samples {
            for v in samples {
                let su = self.apply(tower, g, u);
                let sv = self.apply(tower, g, v);
                let prod = self.apply(tower, g, &tower.mul(u, v));
                let sum = self.apply(tower, g, &tower.add(u, v));
                verdict &= tower.eq_mod(&prod, &tower.mul(&su, &sv), n)?;
                verdict &= tower.eq_mod(&sum, &tower.add(&su, &sv), n)?;
            }
        }
        Some(verdict)
    }
}

type Key = (u64, u64);

fn key(tower: &Tower, x_img: &[crate::localfield::FElem], y_img: &[crate::localfield::FElem]) -> Result<Key> {
    let kl = tower.residue_field();
    let xr = tower
        .l_residue(tower.block(x_img, 0))
        .ok_or_else(|| Error::InsufficientPrecision("image of x".into()))?;
    Ok((kl.encode(&xr), kl.encode(&tower.ac(y_img)?)))
}

/// Finds all automorphisms of `E/F` and labels them by the fixed group.
///
/// Roots of `b` come from Hensel lifts of the residue roots of `b`, roots of
/// each conjugate of `c` are `y w` with `w` lifted from an `e`-th root in
/// `k_L`. The labelling is a homomorphism search with `sigma_1 = 1`, the
/// inertia elements fixing `L` and `sigma_m|_L` of order `f`.
pub fn compute_automorphisms(tower: &Tower, group: &FiniteGroup) -> Result<GaloisData> {
    let (f, e, m) = (tower.f(), tower.e(), tower.m());
    if group.order() != m || group.inertia_order() != e {
        return Err(Error::Invalid(format!(
            "group of order {} with inertia {} does not match tower degrees e = {e}, f = {f}",
            group.order(),
            group.inertia_order()
        )));
    }
    let mut autos: Vec<(EElem, EElem)> = vec![];
    for xr in tower.roots_of_b()? {
        for yr in tower.roots_of_c_conjugate(&xr)? {
            autos.push((xr.clone(), yr));
        }
    }
    if autos.len() < m {
        return Err(Error::NotGalois(format!(
            "found {} automorphisms of E/F, need {m}",
            autos.len()
        )));
    }
    let columns: Vec<Vec<EElem>> = autos
        .iter()
        .map(|(xr, yr)| basis_images(tower, xr, yr))
        .collect();
    let mut index: HashMap<Key, usize> = HashMap::new();
    for (i, (xr, yr)) in autos.iter().enumerate() {
        if index.insert(key(tower, xr, yr)?, i).is_some() {
            return Err(Error::InsufficientPrecision(
                "two automorphisms have equal residue data".into(),
            ));
        }
    }
    let mut table = vec![vec![0usize; m]; m];
    for a in 0..m {
        for b in 0..m {
            let xi = tower.apply(&columns[a], &autos[b].0);
            let yi = tower.apply(&columns[a], &autos[b].1);
            table[a][b] = *index.get(&key(tower, &xi, &yi)?).ok_or_else(|| {
                Error::InsufficientPrecision("composite automorphism not recognised".into())
            })?;
        }
    }
    let id_key = key(tower, &tower.x(), &tower.y())?;
    let id = *index
        .get(&id_key)
        .ok_or_else(|| Error::InsufficientPrecision("identity not among roots".into()))?;
    let x_res = key(tower, &tower.x(), &tower.y())?.0;
    let fixes_l: Vec<bool> = autos
        .iter()
        .map(|(xr, yr)| key(tower, xr, yr).map(|k| k.0 == x_res))
        .collect::<Result<_>>()?;
    let phi = find_isomorphism(group, &table, id, &fixes_l)
        .ok_or_else(|| Error::NoIsomorphism("automorphism group does not match the table".into()))?;
    Ok(GaloisData {
        columns: phi.iter().map(|&i| columns[i].clone()).collect(),
        x_images: phi.iter().map(|&i| autos[i].0.clone()).collect(),
        y_images: phi.iter().map(|&i| autos[i].1.clone()).collect(),
    })
}

fn basis_images(tower: &Tower, xr: &EElem, yr: &EElem) -> Vec<EElem> {
    let (f, e) = (tower.f(), tower.e());
    let mut out = Vec::with_capacity(f * e);
    let mut yj = tower.one();
    for _ in 0..e {
        let mut xi = yj.clone();
        for _ in 0..f {
            out.push(xi.clone());
            xi = tower.mul(&xi, xr);
        }
        yj = tower.mul(&yj, yr);
    }
    out
}

/// Greedy generating set of the group.
fn generators(group: &FiniteGroup) -> Vec<usize> {
    let m = group.order();
    let mut gens = vec![];
    let mut span = vec![false; m];
    span[0] = true;
    for g in 1..m {
        if span[g] {
            continue;
        }
        gens.push(g);
        // close up
        let mut queue: VecDeque<usize> = (0..m).filter(|&h| span[h]).collect();
        while let Some(h) = queue.pop_front() {
            for &s in &gens {
                let k = group.mul(h, s);
                if !span[k] {
                    span[k] = true;
                    queue.push_back(k);
                }
            }
        }
    }
    gens
}

/// A bijection `phi` from group indices to automorphism indices that is a
/// homomorphism for `table`, sends the identity to `id` and the inertia
/// subgroup onto the automorphisms fixing `L`.
fn find_isomorphism(
    group: &FiniteGroup,
    table: &[Vec<usize>],
    id: usize,
    fixes_l: &[bool],
) -> Option<Vec<usize>> {
    let m = group.order();
    let e = group.inertia_order();
    let gens = generators(group);
    let mut choice = vec![0usize; gens.len()];
    loop {
        if let Some(phi) = extend(group, table, id, &gens, &choice) {
            let bijective = {
                let mut seen = phi.clone();
                seen.sort_unstable();
                seen.dedup();
                seen.len() == m
            };
            if bijective && (0..m).all(|g| fixes_l[phi[g]] == (g < e)) {
                return Some(phi);
            }
        }
        // next assignment
        let mut k = 0;
        loop {
            if k == choice.len() {
                return None;
            }
            choice[k] += 1;
            if choice[k] < m {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn extend(
    group: &FiniteGroup,
    table: &[Vec<usize>],
    id: usize,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let m = group.order();
    let mut phi = vec![usize::MAX; m];
    phi[0] = id;
    let mut queue = VecDeque::from([0usize]);
    while let Some(h) = queue.pop_front() {
        for (&s, &img) in gens.iter().zip(images) {
            let k = group.mul(h, s);
            let val = table[phi[h]][img];
            if phi[k] == usize::MAX {
                phi[k] = val;
                queue.push_back(k);
            } else if phi[k] != val {
                return None;
            }
        }
    }
    Some(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{LocalField, LocalFieldSpec};

    fn field(n: i64) -> LocalField {
        LocalField::new(LocalFieldSpec::padic(5, n)).unwrap()
    }

    #[test]
    fn ramified_quadratic_is_diag() {
        let k = field(8);
        let t = Tower::new(k.clone(), vec![k.zero()], vec![vec![k.from_int(-5)], vec![k.zero()]])
            .unwrap();
        let g = FiniteGroup::cyclic(2, 2).unwrap();
        let gal = compute_automorphisms(&t, &g).unwrap();
        assert_eq!(gal.order(), 2);
        let s = gal.columns(1);
        assert_eq!(t.eq_mod(&s[0], &t.one(), 6), Some(true));
        assert_eq!(t.eq_mod(&s[1], &t.neg(&t.y()), 6), Some(true));
        assert_eq!(gal.check_group_law(&t, &g, 6), Some(true));
        assert_eq!(gal.fixes_l(&t, 1, 6), Some(true));
    }

    #[test]
    fn trivial_group() {
        let k = field(6);
        let t = Tower::new(k.clone(), vec![k.zero()], vec![vec![k.from_int(-5)]]).unwrap();
        let gal = compute_automorphisms(&t, &FiniteGroup::trivial()).unwrap();
        assert_eq!(gal.order(), 1);
        assert_eq!(t.eq_mod(&gal.columns(0)[0], &t.one(), 6), Some(true));
    }

    #[test]
    fn cubic_is_not_galois() {
        let k = field(8);
        let c = vec![vec![k.from_int(-5)], vec![k.zero()], vec![k.zero()]];
        let t = Tower::new(k.clone(), vec![k.zero()], c).unwrap();
        let g = FiniteGroup::cyclic(3, 3).unwrap();
        assert!(matches!(compute_automorphisms(&t, &g), Err(Error::NotGalois(_))));
    }

    #[test]
    fn unramified_quadratic() {
        let k = field(8);
        let b = vec![k.from_int(-2), k.zero()];
        let t = Tower::new(k.clone(), b, vec![vec![k.from_int(-5), k.zero()]]).unwrap();
        let g = FiniteGroup::cyclic(2, 1).unwrap();
        let gal = compute_automorphisms(&t, &g).unwrap();
        assert_eq!(gal.order_on_l(&t, 1, 6), Some(2));
        assert_eq!(gal.check_group_law(&t, &g, 6), Some(true));
        let samples = vec![t.x(), t.add(&t.one(), &t.x())];
        assert_eq!(gal.is_ring_automorphism(&t, 1, &samples, 6), Some(true));
    }

    #[test]
    fn quartic_tower_over_q5() {
        // E = Q_5(sqrt 2, sqrt 5): Gamma = Z/2 x Z/2 with I = <sigma_2>
        let k = field(10);
        let b = vec![k.from_int(-2), k.zero()];
        let c = vec![vec![k.from_int(-5), k.zero()], vec![k.zero(), k.zero()]];
        let t = Tower::new(k.clone(), b, c).unwrap();
        let table = [1, 2, 3, 4, 2, 1, 4, 3, 3, 4, 1, 2, 4, 3, 2, 1];
        let g = FiniteGroup::from_one_based(4, 2, &table).unwrap();
        let gal = compute_automorphisms(&t, &g).unwrap();
        assert_eq!(gal.check_group_law(&t, &g, 8), Some(true));
        assert_eq!(gal.fixes_l(&t, 1, 8), Some(true));
        assert_eq!(gal.order_on_l(&t, 3, 8), Some(2));
    }
}
