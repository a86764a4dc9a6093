//! The base local field `F` at finite absolute precision.
//!
//! Every element `x` is stored as `pi^val * unit` and is known modulo
//! `pi^prec`. The unit is an integer (p-adic backend) or a truncated power
//! series over `F_q` (Laurent backend) with `prec - val` significant digits.
//! When `val == prec` the element is zero at its precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::residue::{is_prime, Fq};
use crate::error::{invalid, Error, Result};

/// Which family of local fields the base field belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// `Q_p`, uniformizer `p`.
    Padic { p: u32 },
    /// `F_q((t))`, uniformizer `t`.
    Laurent { q: u32 },
}

/// Largest residue field accepted by the Laurent backend.
pub const MAX_LAURENT_Q: u32 = 1 << 10;

/// Backend plus working precision `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFieldSpec {
    pub backend: Backend,
    pub precision: i64,
}

impl LocalFieldSpec {
    pub fn padic(p: u32, precision: i64) -> Self {
        LocalFieldSpec {
            backend: Backend::Padic { p },
            precision,
        }
    }

    pub fn laurent(q: u32, precision: i64) -> Self {
        LocalFieldSpec {
            backend: Backend::Laurent { q },
            precision,
        }
    }

    pub fn residue_characteristic(&self) -> u32 {
        match self.backend {
            Backend::Padic { p } => p,
            Backend::Laurent { q } => super::residue::prime_power(q as u64)
                .map(|(p, _)| p as u32)
                .unwrap_or(0),
        }
    }

    pub fn residue_size(&self) -> u32 {
        match self.backend {
            Backend::Padic { p } => p,
            Backend::Laurent { q } => q,
        }
    }

    pub fn with_precision(&self, precision: i64) -> Self {
        LocalFieldSpec {
            backend: self.backend.clone(),
            precision,
        }
    }
}

impl fmt::Display for LocalFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.backend {
            Backend::Padic { p } => write!(f, "Q_{p} (precision {})", self.precision),
            Backend::Laurent { q } => write!(f, "F_{q}((t)) (precision {})", self.precision),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Digits {
    Int(BigInt),
    Series(Vec<u32>),
}

/// An element of `F` at finite absolute precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FElem {
    val: i64,
    prec: i64,
    unit: Digits,
}

impl FElem {
    /// Valuation, or `None` when the element is zero at its precision.
    pub fn ord(&self) -> Option<i64> {
        (self.val < self.prec).then_some(self.val)
    }

    /// Lower bound for the valuation (equal to it when nonzero).
    pub fn val(&self) -> i64 {
        self.val
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.val >= self.prec
    }
}

/// The base field context. All arithmetic on [`FElem`] goes through it.
#[derive(Clone, Debug)]
pub struct LocalField {
    spec: LocalFieldSpec,
    residue: Fq,
    /// `p` as a big integer (p-adic backend).
    p: BigInt,
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl LocalField {
    pub fn new(spec: LocalFieldSpec) -> Result<Self> {
        if spec.precision < 1 {
            return invalid("precision must be positive");
        }
        let residue = match spec.backend {
            Backend::Padic { p } => {
                if !is_prime(p as u64) {
                    return invalid(format!("{p} is not prime"));
                }
                Fq::new(p)?
            }
            Backend::Laurent { q } => {
                if q > MAX_LAURENT_Q {
                    return invalid(format!("Laurent backend requires q <= {MAX_LAURENT_Q}"));
                }
                Fq::new(q)?
            }
        };
        let p = BigInt::from(residue.p());
        Ok(LocalField { spec, residue, p })
    }

    pub fn spec(&self) -> &LocalFieldSpec {
        &self.spec
    }

    pub fn precision(&self) -> i64 {
        self.spec.precision
    }

    pub fn residue_field(&self) -> &Fq {
        &self.residue
    }

    /// `q`, the size of the residue field.
    pub fn q(&self) -> u32 {
        self.residue.q()
    }

    fn is_padic(&self) -> bool {
        matches!(self.spec.backend, Backend::Padic { .. })
    }

    fn pow_p(&self, k: i64) -> BigInt {
        num_traits::pow(self.p.clone(), k.max(0) as usize)
    }

    fn zero_digits(&self) -> Digits {
        if self.is_padic() {
            Digits::Int(BigInt::zero())
        } else {
            Digits::Series(vec![])
        }
    }

    /// Zero known modulo `pi^prec`.
    pub fn zero_at(&self, prec: i64) -> FElem {
        let prec = prec.min(self.precision());
        FElem {
            val: prec,
            prec,
            unit: self.zero_digits(),
        }
    }

    pub fn zero(&self) -> FElem {
        self.zero_at(self.precision())
    }

    pub fn one(&self) -> FElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FElem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FElem {
        let n_prec = self.precision();
        if self.is_padic() {
            self.normalize_int(0, n_prec, n.clone())
        } else {
            let c = self.residue.from_int((n % BigInt::from(self.residue.p())).to_i64().unwrap());
            self.normalize_series(0, n_prec, vec![c])
        }
    }

    /// `a / b` for integers (p-adic: exact rational; Laurent: prime-field constant).
    pub fn from_ratio(&self, a: &BigInt, b: &BigInt) -> Result<FElem> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_padic() {
            let vb = padic_val(b, &self.p);
            let bu = b / self.pow_p(vb);
            if a.is_zero() {
                return Ok(self.zero());
            }
            let va = padic_val(a, &self.p);
            let au = a / self.pow_p(va);
            let val = va - vb;
            let n = self.precision();
            if val >= n {
                return Ok(self.zero());
            }
            let m = self.pow_p(n - val);
            let inv = mod_inverse(&bu, &m).expect("unit");
            Ok(self.normalize_int(val, n, au * inv))
        } else {
            let pb = BigInt::from(self.residue.p());
            let bb = self.residue.from_int((b % &pb).to_i64().unwrap());
            let Some(inv) = self.residue.inv(bb) else {
                return Err(Error::DivisionByZero);
            };
            let aa = self.residue.from_int((a % &pb).to_i64().unwrap());
            Ok(self.normalize_series(0, self.precision(), vec![self.residue.mul(aa, inv)]))
        }
    }

    /// `pi^k` (full precision).
    pub fn uniformizer_pow(&self, k: i64) -> FElem {
        let n = self.precision();
        if k >= n {
            return self.zero();
        }
        FElem {
            val: k,
            prec: n,
            unit: if self.is_padic() {
                Digits::Int(BigInt::one())
            } else {
                Digits::Series(one_series((n - k) as usize))
            },
        }
    }

    pub fn uniformizer(&self) -> FElem {
        self.uniformizer_pow(1)
    }

    /// Canonical lift of a residue field element (digit in `0..p` or constant series).
    pub fn lift_residue(&self, c: u32) -> FElem {
        if self.is_padic() {
            self.normalize_int(0, self.precision(), BigInt::from(c))
        } else {
            self.normalize_series(0, self.precision(), vec![c])
        }
    }

    /// Residue of an integral element; `None` if the valuation is negative.
    pub fn residue(&self, x: &FElem) -> Option<u32> {
        if x.val < 0 {
            return None;
        }
        if x.val > 0 || x.is_zero() {
            return Some(0);
        }
        Some(match &x.unit {
            Digits::Int(u) => (u.mod_floor(&self.p)).to_u32().unwrap(),
            Digits::Series(s) => s.first().copied().unwrap_or(0),
        })
    }

    /// `x` with precision lowered to `prec`.
    pub fn truncate(&self, x: &FElem, prec: i64) -> FElem {
        if prec >= x.prec {
            return x.clone();
        }
        match &x.unit {
            Digits::Int(u) => self.normalize_int(x.val, prec, u.clone()),
            Digits::Series(s) => self.normalize_series(x.val, prec, s.clone()),
        }
    }

    /// Brings `x` to the working precision of this field (for elements built
    /// in a context of different precision).
    pub fn coerce(&self, x: &FElem) -> FElem {
        self.truncate(x, self.precision())
    }

    fn normalize_int(&self, val: i64, prec: i64, u: BigInt) -> FElem {
        let prec = prec.min(self.precision());
        if val >= prec {
            return self.zero_at(prec);
        }
        let m = self.pow_p(prec - val);
        let mut u = u.mod_floor(&m);
        if u.is_zero() {
            return self.zero_at(prec);
        }
        let mut val = val;
        while (&u % &self.p).is_zero() {
            u /= &self.p;
            val += 1;
        }
        let m = self.pow_p(prec - val);
        FElem {
            val,
            prec,
            unit: Digits::Int(u.mod_floor(&m)),
        }
    }

    fn normalize_series(&self, val: i64, prec: i64, mut s: Vec<u32>) -> FElem {
        let prec = prec.min(self.precision());
        if val >= prec {
            return self.zero_at(prec);
        }
        s.truncate((prec - val) as usize);
        let Some(lead) = s.iter().position(|&c| c != 0) else {
            return self.zero_at(prec);
        };
        let val = val + lead as i64;
        let mut s: Vec<u32> = s[lead..].to_vec();
        s.resize((prec - val) as usize, 0);
        FElem {
            val,
            prec,
            unit: Digits::Series(s),
        }
    }

    pub fn neg(&self, x: &FElem) -> FElem {
        match &x.unit {
            Digits::Int(u) => self.normalize_int(x.val, x.prec, -u),
            Digits::Series(s) => FElem {
                val: x.val,
                prec: x.prec,
                unit: Digits::Series(s.iter().map(|&c| self.residue.neg(c)).collect()),
            },
        }
    }

    pub fn add(&self, a: &FElem, b: &FElem) -> FElem {
        let prec = a.prec.min(b.prec).min(self.precision());
        let v0 = a.val.min(b.val);
        if v0 >= prec {
            return self.zero_at(prec);
        }
        match (&a.unit, &b.unit) {
            (Digits::Int(ua), Digits::Int(ub)) => {
                let s = ua * self.pow_p(a.val - v0) + ub * self.pow_p(b.val - v0);
                self.normalize_int(v0, prec, s)
            }
            (Digits::Series(sa), Digits::Series(sb)) => {
                let len = (prec - v0) as usize;
                let mut out = vec![0u32; len];
                for (x, shift) in [(sa, a.val - v0), (sb, b.val - v0)] {
                    for (i, &c) in x.iter().enumerate() {
                        let k = i + shift as usize;
                        if k < len {
                            out[k] = self.residue.add(out[k], c);
                        }
                    }
                }
                self.normalize_series(v0, prec, out)
            }
            _ => unreachable!("mixed backends"),
        }
    }

    pub fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        let prec = (a.prec + b.val).min(b.prec + a.val).min(self.precision());
        let val = a.val + b.val;
        if a.is_zero() || b.is_zero() || val >= prec {
            return self.zero_at(prec);
        }
        match (&a.unit, &b.unit) {
            (Digits::Int(ua), Digits::Int(ub)) => self.normalize_int(val, prec, ua * ub),
            (Digits::Series(sa), Digits::Series(sb)) => {
                let len = (prec - val) as usize;
                let mut out = vec![0u32; len];
                for (i, &x) in sa.iter().enumerate().take(len) {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in sb.iter().enumerate().take(len - i) {
                        out[i + j] = self.residue.add(out[i + j], self.residue.mul(x, y));
                    }
                }
                self.normalize_series(val, prec, out)
            }
            _ => unreachable!("mixed backends"),
        }
    }

    /// Multiplicative inverse. Absolute precision drops by `2 ord(x)`.
    pub fn inv(&self, x: &FElem) -> Result<FElem> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let val = -x.val;
        let prec = (x.prec - 2 * x.val).min(self.precision());
        if val >= prec {
            return Ok(self.zero_at(prec));
        }
        let rel = (prec - val) as usize;
        match &x.unit {
            Digits::Int(u) => {
                let m = self.pow_p(rel as i64);
                let inv = mod_inverse(u, &m).expect("unit is invertible");
                Ok(self.normalize_int(val, prec, inv))
            }
            Digits::Series(s) => {
                let inv = series_inverse(&self.residue, s, rel);
                Ok(self.normalize_series(val, prec, inv))
            }
        }
    }

    pub fn div(&self, a: &FElem, b: &FElem) -> Result<FElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, x: &FElem, k: i64) -> Result<FElem> {
        if k < 0 {
            return self.pow(&self.inv(x)?, -k);
        }
        let mut acc = self.one();
        let mut base = x.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplies by `pi^k` exactly (no precision loss in relative terms).
    pub fn shift(&self, x: &FElem, k: i64) -> FElem {
        if x.is_zero() {
            return self.zero_at(x.prec + k);
        }
        let mut y = x.clone();
        y.val += k;
        y.prec += k;
        match &y.unit {
            Digits::Int(u) => self.normalize_int(y.val, y.prec, u.clone()),
            Digits::Series(s) => self.normalize_series(y.val, y.prec, s.clone()),
        }
    }

    /// Equality at the joint precision of the two elements.
    pub fn eq_at_precision(&self, a: &FElem, b: &FElem) -> bool {
        self.sub(a, b).is_zero()
    }

    /// A random element with valuation at least `min_val`, full precision.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, min_val: i64) -> FElem {
        let n = self.precision();
        let len = (n - min_val).max(0) as usize;
        let digits: Vec<u32> = (0..len).map(|_| rng.gen_range(0..self.q())).collect();
        self.from_digits(min_val, &digits)
    }

    /// `sum_k d_k pi^(val + k)`, digits `d_k` residue-field elements lifted canonically.
    pub fn from_digits(&self, val: i64, digits: &[u32]) -> FElem {
        let n = self.precision();
        if self.is_padic() {
            let mut acc = BigInt::zero();
            for &d in digits.iter().rev() {
                acc = acc * &self.p + BigInt::from(d);
            }
            self.normalize_int(val, n, acc)
        } else {
            self.normalize_series(val, n, digits.to_vec())
        }
    }

    /// The first `len` digits of `x` starting at `pi^from` (canonical digits).
    pub fn digits(&self, x: &FElem, from: i64, len: usize) -> Vec<u32> {
        let mut out = vec![0u32; len];
        if x.is_zero() {
            return out;
        }
        match &x.unit {
            Digits::Int(u) => {
                let mut u = u.clone();
                for k in x.val..from + len as i64 {
                    if k >= x.prec {
                        break;
                    }
                    let (q, r) = u.div_mod_floor(&self.p);
                    if k >= from {
                        out[(k - from) as usize] = r.to_u32().unwrap();
                    }
                    u = q;
                }
            }
            Digits::Series(s) => {
                for (i, &c) in s.iter().enumerate() {
                    let k = x.val + i as i64;
                    if k >= from && k < from + len as i64 {
                        out[(k - from) as usize] = c;
                    }
                }
            }
        }
        out
    }

    /// Literal form of `x`, parseable by [`super::literal::parse_felem`].
    pub fn format(&self, x: &FElem) -> String {
        if x.is_zero() {
            return "0".into();
        }
        match &x.unit {
            Digits::Int(u) => {
                let m = self.pow_p(x.prec - x.val);
                let mut u = u.clone();
                if &u * 2 > m {
                    u -= &m;
                }
                if x.val >= 0 {
                    (u * self.pow_p(x.val)).to_string()
                } else {
                    format!("{}/{}", u, self.pow_p(-x.val))
                }
            }
            Digits::Series(s) => {
                let mut terms = vec![];
                for (i, &c) in s.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let k = x.val + i as i64;
                    let coef = super::literal::format_fq(&self.residue, c);
                    let term = match (k, coef.as_str()) {
                        (0, _) => coef.clone(),
                        (1, "1") => "t".to_string(),
                        (_, "1") => format!("t^{k}"),
                        (1, _) => format!("{coef}*t"),
                        _ => format!("{coef}*t^{k}"),
                    };
                    terms.push(term);
                }
                terms.join(" + ")
            }
        }
    }
}

impl LocalField {
    /// Sign-aware display of a valuation-free summary, used in reports.
    pub fn describe(&self, x: &FElem) -> String {
        match x.ord() {
            None => format!("O(pi^{})", x.prec),
            Some(v) => format!("{} (ord {v}, prec {})", self.format(x), x.prec),
        }
    }
}

fn padic_val(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let g = a.mod_floor(m).extended_gcd(m);
    g.gcd.is_one().then(|| g.x.mod_floor(m))
}

fn one_series(len: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    if len > 0 {
        v[0] = 1;
    }
    v
}

fn series_inverse(k: &Fq, s: &[u32], len: usize) -> Vec<u32> {
    let a0inv = k.inv(s[0]).expect("unit series");
    let mut out = vec![0u32; len];
    for i in 0..len {
        // sum_{j<=i} s_j out_{i-j} = [i == 0]
        let mut acc = if i == 0 { 1 } else { 0 };
        for j in 1..=i.min(s.len().saturating_sub(1)) {
            acc = k.sub(acc, k.mul(s[j], out[i - j]));
        }
        out[i] = k.mul(acc, a0inv);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5(n: i64) -> LocalField {
        LocalField::new(LocalFieldSpec::padic(5, n)).unwrap()
    }

    #[test]
    fn padic_basic_identities() {
        let k = q5(10);
        let p = k.from_int(5);
        let one = k.one();
        let a = k.add(&one, &p);
        let b = k.sub(&one, &p);
        let prod = k.mul(&a, &b);
        assert!(k.eq_at_precision(&prod, &k.sub(&one, &k.from_int(25))));
        assert_eq!(p.ord(), Some(1));
        assert_eq!(k.residue(&k.from_int(7)), Some(2));
    }

    #[test]
    fn inverse_of_one_plus_p_is_geometric_series() {
        let k = q5(8);
        let x = k.from_int(6);
        let inv = k.inv(&x).unwrap();
        // 1 - p + p^2 - ... truncated at p^8
        let mut expect = BigInt::zero();
        for i in 0..8 {
            let term = num_traits::pow(BigInt::from(5), i);
            if i % 2 == 0 {
                expect += term;
            } else {
                expect -= term;
            }
        }
        assert!(k.eq_at_precision(&inv, &k.from_bigint(&expect)));
        assert_eq!(inv.prec(), 8);
    }

    #[test]
    fn inverse_loses_twice_the_valuation() {
        let k = q5(10);
        let x = k.from_int(25 * 3);
        let inv = k.inv(&x).unwrap();
        assert_eq!(inv.ord(), Some(-2));
        assert_eq!(inv.prec(), 6);
        let back = k.mul(&inv, &x);
        assert!(k.eq_at_precision(&back, &k.one()));
    }

    #[test]
    fn laurent_arithmetic() {
        let k = LocalField::new(LocalFieldSpec::laurent(9, 6)).unwrap();
        let t = k.uniformizer();
        let one = k.one();
        let a = k.add(&one, &t);
        let inv = k.inv(&a).unwrap();
        assert!(k.eq_at_precision(&k.mul(&a, &inv), &one));
        let two = k.from_int(2);
        // char 3: 1 + 2 = 0
        assert!(k.add(&one, &two).is_zero());
        assert_eq!(k.format(&k.add(&one, &k.mul(&two, &t))), "1 + 2*t");
    }

    #[test]
    fn ratio_with_negative_valuation() {
        let k = q5(6);
        let x = k.from_ratio(&BigInt::from(3), &BigInt::from(25)).unwrap();
        assert_eq!(x.ord(), Some(-2));
        let y = k.mul(&x, &k.from_int(25));
        assert!(k.eq_at_precision(&y, &k.from_int(3)));
        assert_eq!(k.format(&x), "3/25");
    }

    #[test]
    fn zero_detection_follows_precision() {
        let k = q5(3);
        assert!(k.from_int(125).is_zero());
        assert!(!k.from_int(25).is_zero());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::SeedableRng;

        proptest! {
            #[test]
            fn ring_laws_at_precision(seed in any::<u64>(), laurent in any::<bool>()) {
                let k = if laurent {
                    LocalField::new(LocalFieldSpec::laurent(7, 8)).unwrap()
                } else {
                    q5(8)
                };
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let a = k.random(&mut rng, -1);
                let b = k.random(&mut rng, 0);
                let c = k.random(&mut rng, 0);
                let lhs = k.mul(&k.mul(&a, &b), &c);
                let rhs = k.mul(&a, &k.mul(&b, &c));
                prop_assert!(k.eq_at_precision(&lhs, &rhs));
                let lhs = k.mul(&a, &k.add(&b, &c));
                let rhs = k.add(&k.mul(&a, &b), &k.mul(&a, &c));
                prop_assert!(k.eq_at_precision(&lhs, &rhs));
                if let (Some(va), Some(vb)) = (a.ord(), b.ord()) {
                    let ab = k.mul(&a, &b);
                    if let Some(vab) = ab.ord() {
                        prop_assert_eq!(vab, va + vb);
                    }
                }
            }

            #[test]
            fn precision_monotonicity(seed in any::<u64>()) {
                let lo = q5(6);
                let hi = q5(10);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let a = hi.random(&mut rng, 0);
                let b = hi.random(&mut rng, 0);
                let prod_hi = hi.mul(&a, &hi.add(&a, &b));
                let (a6, b6) = (lo.coerce(&a), lo.coerce(&b));
                let prod_lo = lo.mul(&a6, &lo.add(&a6, &b6));
                prop_assert!(lo.eq_at_precision(&lo.coerce(&prod_hi), &prod_lo));
            }
        }
    }
}
