use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Laurent polynomial in `L` with coefficients in `R`, keyed by exponent.
pub(crate) type Laurent<R> = BTreeMap<i64, R>;

/// An element of `Z[L, L^-1, 1/(1 - L^-i) : i > 0]`, stored as a Laurent
/// polynomial over a product of factors `1 - L^-i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotivicConstant {
    num: Laurent<BigInt>,
    /// Sorted multiset of the `i` in the denominator.
    den: Vec<u32>,
}

fn trim<R: Zero>(p: &mut Laurent<R>) {
    p.retain(|_, c| !c.is_zero());
}

fn lmul<R>(a: &Laurent<R>, b: &Laurent<R>) -> Laurent<R>
where
    R: Clone + Zero + std::ops::Mul<Output = R>,
{
    let mut out: Laurent<R> = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let e = out.entry(i + j).or_insert_with(R::zero);
            *e = e.clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

fn ladd<R: Clone + Zero>(a: &Laurent<R>, b: &Laurent<R>) -> Laurent<R> {
    let mut out = a.clone();
    for (j, y) in b {
        let e = out.entry(*j).or_insert_with(R::zero);
        *e = e.clone() + y.clone();
    }
    trim(&mut out);
    out
}

/// `1 - L^-i`.
fn factor<R: One + Zero + std::ops::Neg<Output = R>>(i: u32) -> Laurent<R> {
    BTreeMap::from([(0, R::one()), (-(i as i64), -R::one())])
}

/// Exact division by `1 - L^-i`, if it divides.
pub(crate) fn divide_factor<R>(p: &Laurent<R>, i: u32) -> Option<Laurent<R>>
where
    R: Clone + Zero + std::ops::Add<Output = R>,
{
    // q (1 - L^-i) = p; solve from the top exponent down: q_k = p_k + q_{k+i}
    let (&lo, _) = p.iter().next()?;
    let (&hi, _) = p.iter().next_back()?;
    let i = i as i64;
    let mut q: Laurent<R> = BTreeMap::new();
    let mut k = hi;
    while k >= lo + i {
        let v = p.get(&k).cloned().unwrap_or_else(R::zero) + q.get(&(k + i)).cloned().unwrap_or_else(R::zero);
        if !v.is_zero() {
            q.insert(k, v);
        }
        k -= 1;
    }
    // the remaining coefficients, lo..lo+i, must match -q_{k+i}
    for k in lo..lo + i {
        let v = p.get(&k).cloned().unwrap_or_else(R::zero) + q.get(&(k + i)).cloned().unwrap_or_else(R::zero);
        if !v.is_zero() {
            return None;
        }
    }
    Some(q)
}

impl MotivicConstant {
    pub fn zero() -> Self {
        MotivicConstant {
            num: BTreeMap::new(),
            den: vec![],
        }
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: i64) -> Self {
        Self::from_parts(BTreeMap::from([(0, BigInt::from(n))]), vec![])
    }

    /// `c L^k`.
    pub fn monomial(c: i64, k: i64) -> Self {
        Self::from_parts(BTreeMap::from([(k, BigInt::from(c))]), vec![])
    }

    /// `L`.
    pub fn lefschetz() -> Self {
        Self::monomial(1, 1)
    }

    /// `1 / (1 - L^-i)`.
    pub fn inverse_factor(i: u32) -> Self {
        assert!(i > 0, "factors are 1 - L^-i with i > 0");
        Self::from_parts(BTreeMap::from([(0, BigInt::one())]), vec![i])
    }

    /// Builds and canonicalizes `num / prod (1 - L^-i)`.
    pub fn from_parts(mut num: Laurent<BigInt>, mut den: Vec<u32>) -> Self {
        trim(&mut num);
        den.sort_unstable();
        if num.is_empty() {
            den.clear();
        }
        let mut kept = vec![];
        for i in den {
            match divide_factor(&num, i) {
                Some(q) => num = q,
                None => kept.push(i),
            }
        }
        MotivicConstant { num, den: kept }
    }

    pub fn numerator(&self) -> &Laurent<BigInt> {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Substitutes `L = q`.
    pub fn specialize(&self, q: u64) -> BigRational {
        assert!(q > 1, "specialization needs q > 1");
        let q = BigRational::from_integer(BigInt::from(q));
        let pow = |k: i64| -> BigRational {
            if k >= 0 {
                num_traits::pow(q.clone(), k as usize)
            } else {
                num_traits::pow(q.recip(), (-k) as usize)
            }
        };
        let mut acc = BigRational::zero();
        for (k, c) in &self.num {
            acc += BigRational::from_integer(c.clone()) * pow(*k);
        }
        for &i in &self.den {
            acc /= BigRational::one() - pow(-(i as i64));
        }
        acc
    }

    fn lcm_den(a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut out = vec![];
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    out.push(*x);
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(*x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    out.push(*y);
                    j += 1;
                }
                (Some(x), None) => {
                    out.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    out.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    /// Numerator over the larger denominator `den` (a super-multiset).
    fn lift_to(&self, den: &[u32]) -> Laurent<BigInt> {
        let mut missing = den.to_vec();
        for i in &self.den {
            let pos = missing.iter().position(|x| x == i).expect("sub-multiset");
            missing.remove(pos);
        }
        missing
            .iter()
            .fold(self.num.clone(), |acc, &i| lmul(&acc, &factor(i)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = Self::lcm_den(&self.den, &other.den);
        Self::from_parts(ladd(&self.lift_to(&den), &other.lift_to(&den)), den)
    }

    pub fn neg(&self) -> Self {
        MotivicConstant {
            num: self.num.iter().map(|(k, c)| (*k, -c)).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.den.clone();
        den.extend(&other.den);
        Self::from_parts(lmul(&self.num, &other.num), den)
    }

    pub fn scale(&self, c: i64) -> Self {
        self.mul(&Self::integer(c))
    }

    /// Inverse in the ring, which exists when the numerator is
    /// `+-L^k prod (1 - L^-i)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Invalid("zero has no inverse".into()));
        }
        let num: Laurent<BigRational> = self
            .num
            .iter()
            .map(|(k, c)| (*k, BigRational::from_integer(c.clone())))
            .collect();
        let (c, k, factors) = split_denominator(&num).ok_or_else(|| {
            Error::Invalid(format!("{self} is not a unit of the ring of motivic constants"))
        })?;
        if !(c.is_integer() && c.numer().abs().is_one()) {
            return Err(Error::Invalid(format!("{self} is not a unit: leading constant {c}")));
        }
        let sign = c.numer().clone();
        let mut new_num = BTreeMap::from([(-k, sign)]);
        for &i in &self.den {
            new_num = lmul(&new_num, &factor(i));
        }
        Ok(Self::from_parts(new_num, factors))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Turns `p / q` with rational coefficients into a constant, when `q` is
    /// `c L^k prod (1 - L^-i)` and `p / c` has integer coefficients.
    pub fn from_rational_function(p: &Laurent<BigRational>, q: &Laurent<BigRational>) -> Option<Self> {
        let (c, k, factors) = split_denominator(q)?;
        let mut num = BTreeMap::new();
        for (e, a) in p {
            let v = a / &c;
            if !v.is_integer() {
                return None;
            }
            num.insert(e - k, v.to_integer());
        }
        Some(Self::from_parts(num, factors))
    }
}

/// Writes `q = c L^k prod_i (1 - L^-i)`, removing the largest factors first.
pub(crate) fn split_denominator(q: &Laurent<BigRational>) -> Option<(BigRational, i64, Vec<u32>)> {
    let mut q = q.clone();
    trim(&mut q);
    let mut factors = vec![];
    loop {
        let (&lo, _) = q.iter().next()?;
        let (&hi, _) = q.iter().next_back()?;
        if lo == hi {
            let c = q[&lo].clone();
            factors.sort_unstable();
            return Some((c, lo, factors));
        }
        let width = (hi - lo) as u32;
        let mut divided = false;
        for i in (1..=width).rev() {
            if let Some(d) = divide_factor(&q, i) {
                q = d;
                factors.push(i);
                divided = true;
                break;
            }
        }
        if !divided {
            return None;
        }
    }
}

fn fmt_laurent(f: &mut fmt::Formatter<'_>, p: &Laurent<BigInt>) -> fmt::Result {
    if p.is_empty() {
        return write!(f, "0");
    }
    for (n, (k, c)) in p.iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if n == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        match (*k, a.is_one()) {
            (0, _) => write!(f, "{a}")?,
            (1, true) => write!(f, "L")?,
            (1, false) => write!(f, "{a}*L")?,
            (k, true) => write!(f, "L^{k}")?,
            (k, false) => write!(f, "{a}*L^{k}")?,
        }
    }
    Ok(())
}

impl fmt::Display for MotivicConstant {
    /// `1 - L^-1`, `(L - 1)/(1 - L^-2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return fmt_laurent(f, &self.num);
        }
        if self.num.len() > 1 {
            write!(f, "(")?;
            fmt_laurent(f, &self.num)?;
            write!(f, ")")?;
        } else {
            fmt_laurent(f, &self.num)?;
        }
        for i in &self.den {
            write!(f, "/(1 - L^-{i})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn one_minus(i: u32) -> MotivicConstant {
        MotivicConstant::one().sub(&MotivicConstant::monomial(1, -(i as i64)))
    }

    #[test]
    fn specializations() {
        assert_eq!(one_minus(1).specialize(5), q(4, 5));
        assert_eq!(MotivicConstant::lefschetz().specialize(7), q(7, 1));
        let c = MotivicConstant::lefschetz()
            .sub(&MotivicConstant::one())
            .mul(&MotivicConstant::inverse_factor(2))
            .mul(&MotivicConstant::monomial(1, -2));
        assert_eq!(c.specialize(3), q(1, 4));
    }

    #[test]
    fn cancels_factors() {
        let c = one_minus(2).mul(&MotivicConstant::inverse_factor(2));
        assert_eq!(c, MotivicConstant::one());
        let d = one_minus(2).mul(&MotivicConstant::inverse_factor(1));
        assert_eq!(d.to_string(), "1 + L^-1");
        assert!(d.denominator().is_empty());
    }

    #[test]
    fn inverse_of_units() {
        let v = one_minus(1).scale(-1).mul(&MotivicConstant::monomial(1, 3));
        let inv = v.inverse().unwrap();
        assert_eq!(inv.mul(&v), MotivicConstant::one());
        assert!(MotivicConstant::integer(2).inverse().is_err());
        assert!(MotivicConstant::lefschetz().add(&MotivicConstant::one()).inverse().is_err());
    }

    #[test]
    fn display() {
        assert_eq!(one_minus(1).to_string(), "1 - L^-1");
        let c = MotivicConstant::lefschetz()
            .sub(&MotivicConstant::one())
            .mul(&MotivicConstant::inverse_factor(3));
        assert_eq!(c.to_string(), "(L - 1)/(1 - L^-3)");
        assert_eq!(MotivicConstant::zero().to_string(), "0");
    }

    #[test]
    fn rational_function_conversion() {
        // (q - 1) / q
        let p = BTreeMap::from([(1, q(1, 1)), (0, q(-1, 1))]);
        let d = BTreeMap::from([(1, q(1, 1))]);
        let c = MotivicConstant::from_rational_function(&p, &d).unwrap();
        assert_eq!(c, one_minus(1));
        // 1 / (q + 1) is not motivic in this ring
        let d2 = BTreeMap::from([(1, q(1, 1)), (0, q(1, 1))]);
        assert!(MotivicConstant::from_rational_function(&BTreeMap::from([(0, q(1, 1))]), &d2).is_none());
    }

    proptest::proptest! {
        #[test]
        fn specialize_is_a_ring_map(
            a in proptest::collection::btree_map(-3i64..4, -5i64..6, 0..4),
            b in proptest::collection::btree_map(-3i64..4, -5i64..6, 0..4),
            da in proptest::collection::vec(1u32..4, 0..3),
            db in proptest::collection::vec(1u32..4, 0..3),
            qq in 2u64..20,
        ) {
            let mk = |m: &BTreeMap<i64, i64>, d: &Vec<u32>| MotivicConstant::from_parts(
                m.iter().map(|(k, c)| (*k, BigInt::from(*c))).collect(), d.clone());
            let x = mk(&a, &da);
            let y = mk(&b, &db);
            proptest::prop_assert_eq!(x.add(&y).specialize(qq), x.specialize(qq) + y.specialize(qq));
            proptest::prop_assert_eq!(x.mul(&y).specialize(qq), x.specialize(qq) * y.specialize(qq));
        }
    }
}
