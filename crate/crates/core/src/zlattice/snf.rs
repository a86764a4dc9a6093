//! Smith normal form over the integers.
//!
//! Pivot policy: the nonzero entry of smallest absolute value in the active
//! submatrix, ties broken by lowest row and then lowest column. With a fixed
//! policy the transforms `U`, `V` (and therefore every canonical coordinate
//! derived from them) are reproducible.

use super::matrix::IntMatrix;

/// `u * m * v == d`, with `u`, `v` unimodular and `d` diagonal with
/// nonnegative entries `d_0 | d_1 | ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<i64> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)]).filter(|&x| x != 0).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Diagonal entry `i`, or 0 beyond the diagonal.
    pub fn diag(&self, i: usize) -> i64 {
        if i < self.d.rows() && i < self.d.cols() {
            self.d[(i, i)]
        } else {
            0
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = find_pivot(&a, t) else {
                return SmithForm { u, d: a, v };
            };
            swap_rows(&mut a, t, pi);
            swap_rows(&mut u, t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);

            let p = a[(t, t)];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[(i, t)] / p;
                if q != 0 {
                    add_row_multiple(&mut a, i, t, -q);
                    add_row_multiple(&mut u, i, t, -q);
                }
                dirty |= a[(i, t)] != 0;
            }
            for j in t + 1..cols {
                let q = a[(t, j)] / p;
                if q != 0 {
                    add_col_multiple(&mut a, j, t, -q);
                    add_col_multiple(&mut v, j, t, -q);
                }
                dirty |= a[(t, j)] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility chain: fold an offending row into the pivot row
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| a[(i, j)] % p != 0));
            if let Some(i) = offender {
                add_row_multiple(&mut a, t, i, 1);
                add_row_multiple(&mut u, t, i, 1);
                continue;
            }
            break;
        }
        if a[(t, t)] < 0 {
            negate_row(&mut a, t);
            negate_row(&mut u, t);
        }
    }
    SmithForm { u, d: a, v }
}

fn find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a[(i, j)].abs();
            if x != 0 && best.map_or(true, |(b, _, _)| x < b) {
                best = Some((x, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn swap_rows(a: &mut IntMatrix, i: usize, j: usize) {
    if i != j {
        for c in 0..a.cols() {
            let tmp = a[(i, c)];
            a[(i, c)] = a[(j, c)];
            a[(j, c)] = tmp;
        }
    }
}

fn swap_cols(a: &mut IntMatrix, i: usize, j: usize) {
    if i != j {
        for r in 0..a.rows() {
            let tmp = a[(r, i)];
            a[(r, i)] = a[(r, j)];
            a[(r, j)] = tmp;
        }
    }
}

/// row_dst += k * row_src
fn add_row_multiple(a: &mut IntMatrix, dst: usize, src: usize, k: i64) {
    for c in 0..a.cols() {
        let s = a[(src, c)];
        a[(dst, c)] += k * s;
    }
}

/// col_dst += k * col_src
fn add_col_multiple(a: &mut IntMatrix, dst: usize, src: usize, k: i64) {
    for r in 0..a.rows() {
        let s = a[(r, src)];
        a[(r, dst)] += k * s;
    }
}

fn negate_row(a: &mut IntMatrix, i: usize) {
    for c in 0..a.cols() {
        a[(i, c)] = -a[(i, c)];
    }
}

/// Solves `m x = b` over the integers. Returns a particular solution and a
/// basis of the integer kernel of `m`, or `None` when no integer solution exists.
pub fn solve_integer(m: &IntMatrix, b: &[i64]) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    assert_eq!(b.len(), m.rows());
    let snf = smith_normal_form(m);
    // D (V^{-1} x) = U b
    let ub = snf.u.apply(b);
    let cols = m.cols();
    let mut z = vec![0i64; cols];
    for (i, &c) in ub.iter().enumerate() {
        let d = snf.diag(i);
        if d == 0 {
            if c != 0 {
                return None;
            }
        } else {
            if c % d != 0 {
                return None;
            }
            z[i] = c / d;
        }
    }
    let x = snf.v.apply(&z);
    let rank = snf.rank();
    let kernel = (rank..cols).map(|j| snf.v.column(j)).collect();
    Some((x, kernel))
}

/// Solves `m x == b (mod modulus)` componentwise. Returns a particular solution
/// together with generators of the solution module modulo `modulus`.
pub fn solve_congruence(
    m: &IntMatrix,
    b: &[i64],
    modulus: i64,
) -> Option<(Vec<i64>, Vec<Vec<i64>>)> {
    // m x + modulus * y = b
    let k = m.rows();
    let aug = IntMatrix::hcat(&[m.clone(), IntMatrix::identity(k).scale(modulus)]);
    let (sol, ker) = solve_integer(&aug, b)?;
    let n = m.cols();
    let x = sol[..n].iter().map(|v| v.rem_euclid(modulus)).collect();
    let gens = ker
        .into_iter()
        .map(|g| g[..n].iter().map(|v| v.rem_euclid(modulus)).collect::<Vec<_>>())
        .filter(|g: &Vec<i64>| g.iter().any(|&v| v != 0))
        .collect();
    Some((x, gens))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d, "U M V != D for {m:?}");
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert_eq!(w[1] % w[0], 0, "divisibility chain broken: {f:?}");
        }
        s
    }

    #[test]
    fn one_by_one() {
        let s = check(&IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(s.d, IntMatrix::from_rows(&[vec![2]]));
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntMatrix::identity(3));
        assert!(s.d.is_identity());
        assert!(s.u.is_identity());
        assert!(s.v.is_identity());
    }

    #[test]
    fn two_by_two_hand_reduction() {
        // row/column reduction by hand: pivot 2, row1 -= 3 row0 gives -4, col1 -= 2 col0
        let s = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.d, IntMatrix::diagonal(&[2, 4]));
    }

    #[test]
    fn needs_divisibility_fix() {
        let s = check(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!(s.invariant_factors(), vec![1, 6]);
    }

    #[test]
    fn rectangular_and_zero() {
        check(&IntMatrix::from_rows(&[vec![1, -1]]));
        let s = check(&IntMatrix::zeros(2, 3));
        assert!(s.invariant_factors().is_empty());
        check(&IntMatrix::from_rows(&[vec![0, 2, 4], vec![6, 0, 9], vec![3, 3, 3]]));
    }

    #[test]
    fn integer_solve() {
        let m = IntMatrix::from_rows(&[vec![2, 4]]);
        let (x, ker) = solve_integer(&m, &[6]).unwrap();
        assert_eq!(m.apply(&x), vec![6]);
        assert_eq!(ker.len(), 1);
        assert_eq!(m.apply(&ker[0]), vec![0]);
        assert!(solve_integer(&m, &[3]).is_none());
    }

    #[test]
    fn congruence_solve() {
        let m = IntMatrix::from_rows(&[vec![2]]);
        let (x, gens) = solve_congruence(&m, &[4], 6).unwrap();
        assert_eq!((2 * x[0]).rem_euclid(6), 4);
        assert!(!gens.is_empty());
        assert!(solve_congruence(&m, &[3], 6).is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn snf_identity_holds(r in 1usize..4, c in 1usize..4, seed in proptest::collection::vec(-9i64..10, 16)) {
                let data: Vec<i64> = seed.into_iter().take(r * c).collect();
                prop_assume!(data.len() == r * c);
                let m = IntMatrix::from_flat(r, c, data);
                let s = smith_normal_form(&m);
                prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
                prop_assert_eq!(s.u.det().abs(), 1);
                prop_assert_eq!(s.v.det().abs(), 1);
                let f = s.invariant_factors();
                for w in f.windows(2) {
                    prop_assert_eq!(w[1] % w[0], 0);
                }
                prop_assert!(f.iter().all(|&x| x > 0));
            }
        }
    }
}
