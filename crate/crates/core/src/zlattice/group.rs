use crate::error::{invalid, Result};

/// A finite group given by its multiplication table, with a distinguished
/// normal subgroup `I` made of the first `e` elements.
///
/// Elements are opaque indices `0..m`. Index 0 is the identity and index
/// `m - 1` generates the quotient `G / I`. Externally (config files, CLI
/// output) the same elements are numbered `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    m: usize,
    e: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    /// Builds and validates a group from a row-major table of 0-based indices.
    pub fn new(m: usize, e: usize, table: Vec<usize>) -> Result<Self> {
        if m == 0 {
            return invalid("group must have at least one element");
        }
        if table.len() != m * m {
            return invalid(format!("table has {} entries, expected {}", table.len(), m * m));
        }
        if table.iter().any(|&x| x >= m) {
            return invalid("table entry out of range");
        }
        if e == 0 || e > m || m % e != 0 {
            return invalid(format!("normal subgroup size {e} does not divide {m}"));
        }
        let mul = |a: usize, b: usize| table[a * m + b];
        for a in 0..m {
            if mul(0, a) != a || mul(a, 0) != a {
                return invalid("index 1 is not the identity");
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return invalid(format!(
                            "table is not associative at ({}, {}, {})",
                            a + 1,
                            b + 1,
                            c + 1
                        ));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(m);
        for a in 0..m {
            match (0..m).find(|&b| mul(a, b) == 0 && mul(b, a) == 0) {
                Some(b) => inverses.push(b),
                None => return invalid(format!("element {} has no inverse", a + 1)),
            }
        }
        let g = FiniteGroup {
            m,
            e,
            table,
            inverses,
        };
        let inertia: Vec<usize> = (0..e).collect();
        if !g.is_subgroup(&inertia) {
            return invalid("first e elements do not form a subgroup");
        }
        for x in 0..m {
            for &i in &inertia {
                if g.conj(x, i) >= e {
                    return invalid("first e elements do not form a normal subgroup");
                }
            }
        }
        if g.coset_order(m - 1) != m / e {
            return invalid(format!("element {m} does not generate the quotient by I"));
        }
        Ok(g)
    }

    /// Builds a group from a 1-based row-major table (the external numbering).
    pub fn from_one_based(m: usize, e: usize, table: &[usize]) -> Result<Self> {
        if table.iter().any(|&x| x == 0) {
            return invalid("table entries are 1-based");
        }
        Self::new(m, e, table.iter().map(|x| x - 1).collect())
    }

    pub fn trivial() -> Self {
        Self::new(1, 1, vec![0]).expect("trivial group")
    }

    /// Cyclic group of order `m`, element `k` = generator^k, with `I` of size `e`.
    ///
    /// Only valid when `I` is then the subgroup of the first `e` indices, which
    /// for this enumeration means `e == m` or `e == 1`.
    pub fn cyclic(m: usize, e: usize) -> Result<Self> {
        let table = (0..m * m).map(|k| (k / m + k % m) % m).collect();
        Self::new(m, e, table)
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn inertia_order(&self) -> usize {
        self.e
    }

    /// `f = m / e`, the order of the quotient by `I`.
    pub fn residue_degree(&self) -> usize {
        self.m / self.e
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.m + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn conj(&self, x: usize, a: usize) -> usize {
        self.mul(self.mul(x, a), self.inv(x))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Order of the coset `aI` in `G / I`.
    pub fn coset_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x >= self.e {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_subgroup(&self, idx: &[usize]) -> bool {
        !idx.is_empty()
            && idx.contains(&0)
            && idx.iter().all(|&a| idx.contains(&self.inv(a)))
            && idx
                .iter()
                .all(|&a| idx.iter().all(|&b| idx.contains(&self.mul(a, b))))
    }

    pub fn inertia(&self) -> Vec<usize> {
        (0..self.e).collect()
    }

    /// A generator of `I` when `I` is cyclic.
    pub fn inertia_generator(&self) -> Option<usize> {
        (0..self.e).find(|&a| self.element_order(a) == self.e)
    }

    /// The subgroup `I` as a group in its own right (indices preserved).
    pub fn inertia_group(&self) -> FiniteGroup {
        let e = self.e;
        let table = (0..e * e).map(|k| self.mul(k / e, k % e)).collect();
        FiniteGroup::new(e, e, table).expect("inertia is a subgroup")
    }

    /// Whether a tamely ramified Galois extension with this group and inertia
    /// can exist: `I` cyclic, `G / I` cyclic, and some element generating
    /// `G / I` has order exactly `f`, so `G = I x| <s>`.
    pub fn tameness_possible(&self) -> bool {
        if self.inertia_generator().is_none() {
            return false;
        }
        let f = self.residue_degree();
        (0..self.m).any(|s| self.coset_order(s) == f && self.element_order(s) == f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein() -> Vec<usize> {
        // xor table on {0,1,2,3}
        (0..16).map(|k| (k / 4) ^ (k % 4)).collect()
    }

    #[test]
    fn z2_inertia_is_tame() {
        let g = FiniteGroup::cyclic(2, 2).unwrap();
        assert!(g.tameness_possible());
        assert_eq!(g.inertia_generator(), Some(1));
    }

    #[test]
    fn klein_four_full_inertia_is_not_tame() {
        let g = FiniteGroup::new(4, 4, klein()).unwrap();
        assert!(!g.tameness_possible());
    }

    #[test]
    fn trivial_is_tame() {
        assert!(FiniteGroup::trivial().tameness_possible());
    }

    #[test]
    fn z4_with_z2_inertia_is_not_split() {
        // Z/4 enumerated as 0, 2, 1, 3 so that I = {0, 2} comes first.
        let order = [0usize, 2, 1, 3];
        let pos = |x: usize| order.iter().position(|&y| y == x).unwrap();
        let table = (0..16)
            .map(|k| pos((order[k / 4] + order[k % 4]) % 4))
            .collect();
        let g = FiniteGroup::new(4, 2, table).unwrap();
        assert!(!g.tameness_possible());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::new(2, 1, vec![0, 1, 1, 1]).is_err());
        assert!(FiniteGroup::new(2, 2, vec![1, 0, 0, 1]).is_err());
        // I = first element of Z/3 fine, but m-1 must generate quotient
        assert!(FiniteGroup::cyclic(3, 1).is_ok());
        // S3 with I = {1, (12)} is not normal
        let s3 = s3_table();
        assert!(FiniteGroup::new(6, 2, s3).is_err());
    }

    fn s3_table() -> Vec<usize> {
        // permutations of {0,1,2}; order: id, (01), (12), (02), (012), (021)
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |a: &[usize; 3], b: &[usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let mut t = vec![];
        for a in &perms {
            for b in &perms {
                let c = compose(a, b);
                t.push(perms.iter().position(|p| *p == c).unwrap());
            }
        }
        t
    }
}
