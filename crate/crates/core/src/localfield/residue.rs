//! Finite fields: the residue field `F_q` of the base field and its
//! extension `k_L = F_q[x]/(b mod pi)`.

use std::sync::OnceLock;

use crate::error::{invalid, Result};

/// `F_q` with `q = p^r`. Elements are encoded as `u32` integers whose base-`p`
/// digits are the coefficients in the basis `1, z, z^2, ...` where `z` is a
/// root of a fixed primitive polynomial (the first one in encoding order).
#[derive(Clone, Debug)]
pub struct Fq {
    p: u32,
    r: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r
    }
}
impl Eq for Fq {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `n = p^r` with `p` prime.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut r = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1 && is_prime(p)).then_some((p, r))
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Fq {
    /// Field with `q` elements; `q` must be a prime power up to `2^20`.
    pub fn new(q: u32) -> Result<Self> {
        let Some((p, r)) = prime_power(q as u64) else {
            return invalid(format!("{q} is not a prime power"));
        };
        if q > 1 << 20 {
            return invalid(format!("residue field of size {q} is too large"));
        }
        let (p, r) = (p as u32, r);
        let factors = prime_factors(q as u64 - 1);
        // candidate moduli: monic of degree r, low coefficients given by digits of c
        for c in 0..q {
            let modulus: Vec<u32> = digits(c, p, r);
            if r > 1 && modulus[0] == 0 {
                continue;
            }
            let Some(exp) = powers_of_z(p, r, &modulus, q) else {
                continue;
            };
            let order_ok = factors
                .iter()
                .all(|&l| exp[((q as u64 - 1) / l) as usize] != 1);
            if !order_ok {
                continue;
            }
            let mut log = vec![u32::MAX; q as usize];
            for (k, &x) in exp.iter().enumerate().take(q as usize - 1) {
                log[x as usize] = k as u32;
            }
            if log.iter().skip(1).any(|&l| l == u32::MAX) {
                continue;
            }
            return Ok(Fq { p, r, q, exp, log });
        }
        invalid(format!("no primitive polynomial found for q = {q}"))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> u32 {
        self.exp[1 % (self.q as usize - 1).max(1)]
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.r == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.r == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[a as usize]) % (self.q - 1);
        Some(self.exp[k as usize])
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let e = (self.log[a as usize] as u64 * k) % (self.q as u64 - 1);
        self.exp[e as usize]
    }

    /// Discrete logarithm with respect to [`Fq::generator`].
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// Image of an integer (reduced mod `p`).
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Integer in `0..p` when the element lies in the prime field.
    pub fn to_prime_field(&self, a: u32) -> Option<u32> {
        (a < self.p).then_some(a)
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

fn digits(mut c: u32, p: u32, r: u32) -> Vec<u32> {
    (0..r)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Successive powers of `z` modulo `z^r + modulus(z)`, encoded, or `None`
/// if a power becomes zero (reducible modulus).
fn powers_of_z(p: u32, r: u32, modulus: &[u32], q: u32) -> Option<Vec<u32>> {
    let mut cur = vec![0u32; r as usize];
    cur[0] = 1;
    let mut out = Vec::with_capacity(q as usize);
    for _ in 0..q {
        let enc = undigits(&cur, p);
        if enc == 0 {
            return None;
        }
        out.push(enc);
        // multiply by z
        let top = cur[r as usize - 1];
        for k in (1..r as usize).rev() {
            cur[k] = cur[k - 1];
        }
        cur[0] = 0;
        for k in 0..r as usize {
            cur[k] = (cur[k] + p - (top * modulus[k]) % p) % p;
        }
    }
    Some(out)
}

/// Polynomials over `F_q`, dense, lowest degree first, no trailing zeros.
pub mod poly {
    use super::Fq;

    pub type Poly = Vec<u32>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u32]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(k: &Fq, a: &[u32], b: &[u32]) -> Poly {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| k.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    pub fn sub(k: &Fq, a: &[u32], b: &[u32]) -> Poly {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| k.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    pub fn mul(k: &Fq, a: &[u32], b: &[u32]) -> Poly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(x, y));
            }
        }
        trim(out)
    }

    /// `(quotient, remainder)`; `b` must be nonzero.
    pub fn divrem(k: &Fq, a: &[u32], b: &[u32]) -> (Poly, Poly) {
        let db = degree(b).expect("division by zero polynomial");
        let lead_inv = k.inv(b[db]).expect("nonzero leading coefficient");
        let mut r = trim(a.to_vec());
        if r.len() <= db {
            return (vec![], r);
        }
        let mut q = vec![0; r.len() - db];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = k.mul(r[dr], lead_inv);
            q[dr - db] = c;
            for i in 0..=db {
                r[dr - db + i] = k.sub(r[dr - db + i], k.mul(c, b[i]));
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(k: &Fq, a: &[u32], b: &[u32]) -> Poly {
        divrem(k, a, b).1
    }

    pub fn monic(k: &Fq, a: &[u32]) -> Poly {
        match degree(a) {
            None => vec![],
            Some(d) => {
                let inv = k.inv(a[d]).unwrap();
                trim(a.iter().map(|&c| k.mul(c, inv)).collect())
            }
        }
    }

    pub fn gcd(k: &Fq, a: &[u32], b: &[u32]) -> Poly {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(k, &a, &b);
            a = b;
            b = r;
        }
        monic(k, &a)
    }

    pub fn mulmod(k: &Fq, a: &[u32], b: &[u32], m: &[u32]) -> Poly {
        rem(k, &mul(k, a, b), m)
    }

    pub fn powmod(k: &Fq, a: &[u32], mut e: u64, m: &[u32]) -> Poly {
        let mut base = rem(k, a, m);
        let mut acc = rem(k, &[1], m);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(k, &acc, &base, m);
            }
            base = mulmod(k, &base, &base, m);
            e >>= 1;
        }
        acc
    }

    pub fn eval(k: &Fq, a: &[u32], x: u32) -> u32 {
        a.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x), c))
    }

    /// Irreducibility over `F_q`: `gcd(x^{q^i} - x, f) = 1` for `i <= deg/2`.
    pub fn is_irreducible(k: &Fq, f: &[u32]) -> bool {
        let f = trim(f.to_vec());
        let Some(d) = degree(&f) else {
            return false;
        };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let x: Poly = vec![0, 1];
        let mut xp = x.clone();
        for _ in 1..=d / 2 {
            xp = powmod(k, &xp, k.q() as u64, &f);
            let g = gcd(k, &sub(k, &xp, &x), &f);
            if degree(&g) != Some(0) {
                return false;
            }
        }
        true
    }
}

/// `F_q[x]/(modulus)` for a monic irreducible `modulus` of degree `f`.
/// Elements are coefficient vectors of length `f` (lowest degree first).
#[derive(Clone, Debug)]
pub struct FqExt {
    base: Fq,
    /// Monic modulus, length `f + 1`.
    modulus: Vec<u32>,
    f: usize,
    log: OnceLock<(Vec<u32>, Vec<u32>)>,
}

impl FqExt {
    pub fn new(base: Fq, modulus: Vec<u32>) -> Result<Self> {
        let modulus = poly::trim(modulus);
        let Some(f) = poly::degree(&modulus) else {
            return invalid("zero modulus");
        };
        if modulus[f] != 1 {
            return invalid("modulus must be monic");
        }
        if !poly::is_irreducible(&base, &modulus) {
            return invalid("modulus is reducible");
        }
        if (base.q() as u64).pow(f as u32) > 1 << 22 {
            return invalid("residue extension too large");
        }
        Ok(FqExt {
            base,
            modulus,
            f,
            log: OnceLock::new(),
        })
    }

    pub fn base(&self) -> &Fq {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn size(&self) -> u64 {
        (self.base.q() as u64).pow(self.f as u32)
    }

    fn pad(&self, mut a: Vec<u32>) -> Vec<u32> {
        a.resize(self.f, 0);
        a
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.f]
    }

    pub fn one(&self) -> Vec<u32> {
        self.embed(1)
    }

    pub fn embed(&self, c: u32) -> Vec<u32> {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    pub fn is_zero(&self, a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.base.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.base.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| self.base.neg(x)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.pad(poly::mulmod(&self.base, a, b, &self.modulus))
    }

    pub fn pow(&self, a: &[u32], e: u64) -> Vec<u32> {
        self.pad(poly::powmod(&self.base, a, e, &self.modulus))
    }

    pub fn inv(&self, a: &[u32]) -> Option<Vec<u32>> {
        (!self.is_zero(a)).then(|| self.pow(a, self.size() - 2))
    }

    pub fn encode(&self, a: &[u32]) -> u64 {
        a.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.base.q() as u64 + c as u64)
    }

    pub fn decode(&self, mut n: u64) -> Vec<u32> {
        let q = self.base.q() as u64;
        (0..self.f)
            .map(|_| {
                let c = (n % q) as u32;
                n /= q;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.size()).map(|n| self.decode(n))
    }

    fn tables(&self) -> &(Vec<u32>, Vec<u32>) {
        self.log.get_or_init(|| {
            let size = self.size();
            let factors = prime_factors(size - 1);
            let g = (1..size)
                .map(|n| self.decode(n))
                .find(|g| {
                    factors
                        .iter()
                        .all(|&l| self.pow(g, (size - 1) / l) != self.one())
                })
                .expect("multiplicative group is cyclic");
            let mut exp = Vec::with_capacity(size as usize - 1);
            let mut log = vec![u32::MAX; size as usize];
            let mut x = self.one();
            for k in 0..size - 1 {
                let enc = self.encode(&x);
                exp.push(enc as u32);
                log[enc as usize] = k as u32;
                x = self.mul(&x, &g);
            }
            (exp, log)
        })
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> Vec<u32> {
        let (exp, _) = self.tables();
        self.decode(exp[1 % exp.len()] as u64)
    }

    /// Discrete log with respect to [`FqExt::generator`].
    pub fn log(&self, a: &[u32]) -> Option<u64> {
        if self.is_zero(a) {
            return None;
        }
        let (_, log) = self.tables();
        Some(log[self.encode(a) as usize] as u64)
    }

    pub fn exp(&self, k: u64) -> Vec<u32> {
        let (exp, _) = self.tables();
        self.decode(exp[(k % exp.len() as u64) as usize] as u64)
    }

    /// All `d`-th roots of `a`.
    pub fn roots(&self, a: &[u32], d: u64) -> Vec<Vec<u32>> {
        if self.is_zero(a) {
            return vec![self.zero()];
        }
        let order = self.size() - 1;
        let la = self.log(a).unwrap();
        // d k == la (mod order)
        let g = num_integer::gcd(d, order);
        if la % g != 0 {
            return vec![];
        }
        (0..order)
            .filter(|k| (d as u128 * *k as u128) % order as u128 == la as u128)
            .map(|k| self.exp(k))
            .collect()
    }

    /// The `q`-power Frobenius.
    pub fn frobenius(&self, a: &[u32]) -> Vec<u32> {
        self.pow(a, self.base.q() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let k = Fq::new(7).unwrap();
        assert_eq!(k.mul(3, 5), 1);
        assert_eq!(k.inv(3), Some(5));
        assert_eq!(k.add(4, 5), 2);
        assert_eq!(k.neg(2), 5);
        assert_eq!(k.pow(k.generator(), 6), 1);
        assert_eq!(k.from_int(-1), 6);
    }

    #[test]
    fn prime_power_field_laws() {
        let k = Fq::new(9).unwrap();
        for a in k.elements() {
            if a != 0 {
                assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            }
            for b in k.elements() {
                assert_eq!(k.mul(a, b), k.mul(b, a));
                for c in [0, 1, 4, 8] {
                    assert_eq!(
                        k.mul(a, k.add(b, c)),
                        k.add(k.mul(a, b), k.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn irreducibility() {
        let k = Fq::new(5).unwrap();
        // x^2 - 2: 2 is not a square mod 5
        assert!(poly::is_irreducible(&k, &[k.from_int(-2), 0, 1]));
        // x - 1
        assert!(poly::is_irreducible(&k, &[k.from_int(-1), 1]));
        // x^2 - 1 = (x-1)(x+1)
        assert!(!poly::is_irreducible(&k, &[k.from_int(-1), 0, 1]));
        // (x^2+2)(x^2+3) has no roots but is reducible
        let f = poly::mul(&k, &[2, 0, 1], &[3, 0, 1]);
        assert!(!poly::is_irreducible(&k, &f));
    }

    #[test]
    fn extension_field() {
        let k = Fq::new(5).unwrap();
        let kl = FqExt::new(k, vec![3, 0, 1]).unwrap();
        assert_eq!(kl.size(), 25);
        let x = vec![0, 1];
        assert_eq!(kl.mul(&x, &x), vec![2, 0]);
        for a in kl.elements().skip(1) {
            assert_eq!(kl.mul(&a, &kl.inv(&a).unwrap()), kl.one());
            assert_eq!(kl.exp(kl.log(&a).unwrap()), a);
        }
        assert_eq!(kl.roots(&kl.one(), 2).len(), 2);
        assert_eq!(kl.roots(&kl.one(), 3).len(), 3);
    }
}
