//! The tower `F ⊂ L = F[x]/(b) ⊂ E = L[y]/(c)`.
//!
//! Elements of `E` are coordinate vectors over `F` in the basis `x^i y^j`,
//! coordinate index `j * f + i`. The multiplication routines are generic over
//! [`CoeffRing`] so the formula emitter can run them on symbolic terms.

use std::fmt;

use super::base::{FElem, LocalField};
use super::literal::parse_felem;
use super::residue::{poly, FqExt};
use crate::error::{invalid, Error, Result};

/// A commutative ring of coefficients.
pub trait CoeffRing {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

impl CoeffRing for LocalField {
    type Elem = FElem;
    fn zero(&self) -> FElem {
        LocalField::zero(self)
    }
    fn one(&self) -> FElem {
        LocalField::one(self)
    }
    fn add(&self, a: &FElem, b: &FElem) -> FElem {
        LocalField::add(self, a, b)
    }
    fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        LocalField::sub(self, a, b)
    }
    fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        LocalField::mul(self, a, b)
    }
}

/// Product of two polynomials of degree `< d` reduced modulo the monic
/// polynomial `X^d + sum low[k] X^k`, with coefficients in `R`.
fn mul_reduce<R: CoeffRing, T: Clone>(
    r: &R,
    u: &[T],
    v: &[T],
    low: &[T],
    mul: impl Fn(&T, &T) -> T,
    add: impl Fn(&T, &T) -> T,
    sub: impl Fn(&T, &T) -> T,
    zero: T,
) -> Vec<T> {
    let _ = r;
    let d = low.len();
    if d == 0 {
        return vec![];
    }
    let mut prod = vec![zero; 2 * d - 1];
    for (i, a) in u.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            prod[i + j] = add(&prod[i + j], &mul(a, b));
        }
    }
    for k in (d..2 * d - 1).rev() {
        let top = prod[k].clone();
        for (j, c) in low.iter().enumerate() {
            prod[k - d + j] = sub(&prod[k - d + j], &mul(&top, c));
        }
    }
    prod.truncate(d);
    prod
}

/// Multiplication in `L = R[x]/(x^f + sum b_i x^i)`.
pub fn l_mul<R: CoeffRing>(r: &R, b: &[R::Elem], u: &[R::Elem], v: &[R::Elem]) -> Vec<R::Elem> {
    mul_reduce(
        r,
        u,
        v,
        b,
        |a, b| r.mul(a, b),
        |a, b| r.add(a, b),
        |a, b| r.sub(a, b),
        r.zero(),
    )
}

/// Multiplication in `E = L[y]/(y^e + sum c_j y^j)` on `F`-coordinates.
pub fn e_mul<R: CoeffRing>(
    r: &R,
    b: &[R::Elem],
    c: &[Vec<R::Elem>],
    u: &[R::Elem],
    v: &[R::Elem],
) -> Vec<R::Elem> {
    let f = b.len();
    let blocks = |z: &[R::Elem]| -> Vec<Vec<R::Elem>> { z.chunks(f).map(|s| s.to_vec()).collect() };
    let lz = vec![r.zero(); f];
    let ladd = |a: &Vec<R::Elem>, b: &Vec<R::Elem>| -> Vec<R::Elem> {
        a.iter().zip(b).map(|(x, y)| r.add(x, y)).collect()
    };
    let lsub = |a: &Vec<R::Elem>, b: &Vec<R::Elem>| -> Vec<R::Elem> {
        a.iter().zip(b).map(|(x, y)| r.sub(x, y)).collect()
    };
    let out = mul_reduce(
        r,
        &blocks(u),
        &blocks(v),
        c,
        |x, y| l_mul(r, b, x, y),
        ladd,
        lsub,
        lz,
    );
    out.into_iter().flatten().collect()
}

/// `M v` for a matrix given by its columns.
pub fn apply_columns<R: CoeffRing>(r: &R, cols: &[Vec<R::Elem>], v: &[R::Elem]) -> Vec<R::Elem> {
    let rows = cols.first().map_or(0, |c| c.len());
    let mut out = vec![r.zero(); rows];
    for (col, a) in cols.iter().zip(v) {
        for (o, m) in out.iter_mut().zip(col) {
            *o = r.add(o, &r.mul(m, a));
        }
    }
    out
}

/// An element of `E` as its `F`-coordinates.
pub type EElem = Vec<FElem>;

/// Valuation of an `E`-element, possibly only bounded below at precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EOrd {
    Finite(i64),
    AtLeast(i64),
}

impl EOrd {
    pub fn finite(self) -> Option<i64> {
        match self {
            EOrd::Finite(v) => Some(v),
            EOrd::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for EOrd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EOrd::Finite(v) => write!(f, "{v}"),
            EOrd::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Whether the reduction of the monic `x^f + sum b_i x^i` is irreducible.
pub fn check_unramified_poly(field: &LocalField, b: &[FElem]) -> Result<bool> {
    if b.is_empty() {
        return invalid("b must have degree at least 1");
    }
    let mut res = Vec::with_capacity(b.len() + 1);
    for (i, coef) in b.iter().enumerate() {
        match field.residue(coef) {
            Some(r) => res.push(r),
            None => return invalid(format!("coefficient b_{i} has negative valuation")),
        }
    }
    res.push(1);
    Ok(poly::is_irreducible(field.residue_field(), &res))
}

/// Eisenstein test over `L`: `ord_L(c_0) = 1` and `ord_L(c_i) >= 1`.
pub fn check_eisenstein(field: &LocalField, c: &[Vec<FElem>]) -> bool {
    let _ = field;
    let Some((c0, rest)) = c.split_first() else {
        return false;
    };
    let ord_l = |l: &[FElem]| l.iter().map(FElem::val).min().unwrap_or(i64::MAX);
    let c0_determined = c0.iter().any(|a| a.ord() == Some(1));
    c0_determined && ord_l(c0) == 1 && rest.iter().all(|l| ord_l(l) >= 1)
}

/// Tower parameters as literals, so the same tower can be realized at any
/// precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    /// `b_0, .., b_{f-1}`.
    pub b: Vec<String>,
    /// `c_0, .., c_{e-1}`, each as `f` coordinates over `F`.
    pub c: Vec<Vec<String>>,
}

impl TowerSpec {
    pub fn f(&self) -> usize {
        self.b.len()
    }

    pub fn e(&self) -> usize {
        self.c.len()
    }

    /// The trivial tower `E = L = F` (`b = x`, `c = y - pi`).
    pub fn trivial() -> Self {
        TowerSpec {
            b: vec!["0".into()],
            c: vec![vec!["-pi".into()]],
        }
    }

    pub fn parse_b(&self, field: &LocalField) -> Result<Vec<FElem>> {
        self.b.iter().map(|s| parse_felem(field, s)).collect()
    }

    pub fn parse_c(&self, field: &LocalField) -> Result<Vec<Vec<FElem>>> {
        self.c
            .iter()
            .map(|l| l.iter().map(|s| parse_felem(field, s)).collect())
            .collect()
    }

    pub fn build(&self, field: &LocalField) -> Result<Tower> {
        Tower::new(field.clone(), self.parse_b(field)?, self.parse_c(field)?)
    }
}

/// Arithmetic in a validated tower.
#[derive(Clone, Debug)]
pub struct Tower {
    field: LocalField,
    b: Vec<FElem>,
    c: Vec<Vec<FElem>>,
    kl: FqExt,
    /// Residue of `c_0 / pi` in `k_L`.
    wbar: Vec<u32>,
    y_inv: EElem,
}

const NEWTON_STEPS: usize = 64;

impl Tower {
    /// `b = [b_0, .., b_{f-1}]` (monic, implicit leading 1) and
    /// `c = [c_0, .., c_{e-1}]` with each `c_j` given by `f` coordinates.
    pub fn new(field: LocalField, b: Vec<FElem>, c: Vec<Vec<FElem>>) -> Result<Self> {
        let f = b.len();
        if f == 0 || c.is_empty() {
            return invalid("b and c must have degree at least 1");
        }
        if c.iter().any(|cj| cj.len() != f) {
            return invalid(format!("each coefficient of c needs {f} coordinates"));
        }
        if !check_unramified_poly(&field, &b)? {
            return invalid("reduction of b is not irreducible");
        }
        if !check_eisenstein(&field, &c) {
            return invalid("c is not Eisenstein");
        }
        let b: Vec<FElem> = b.iter().map(|x| field.coerce(x)).collect();
        let c: Vec<Vec<FElem>> = c
            .iter()
            .map(|l| l.iter().map(|x| field.coerce(x)).collect())
            .collect();
        let mut modulus: Vec<u32> = b.iter().map(|x| field.residue(x).unwrap()).collect();
        modulus.push(1);
        let kl = FqExt::new(field.residue_field().clone(), modulus)?;
        let c0_over_pi: Vec<FElem> = c[0].iter().map(|a| field.shift(a, -1)).collect();
        let wbar: Vec<u32> = c0_over_pi.iter().map(|a| field.residue(a).unwrap()).collect();
        let mut tower = Tower {
            field,
            b,
            c,
            kl,
            wbar,
            y_inv: vec![],
        };
        tower.y_inv = tower.compute_y_inv(&c0_over_pi)?;
        Ok(tower)
    }

    /// `y^{-1} = -(y^{e-1} + c_{e-1} y^{e-2} + .. + c_1) c_0^{-1}`.
    fn compute_y_inv(&self, c0_over_pi: &[FElem]) -> Result<EElem> {
        let w = self.from_l(c0_over_pi);
        let w_inv = self.unit_inverse(&w)?;
        let c0_inv: EElem = w_inv.iter().map(|a| self.field.shift(a, -1)).collect();
        let e = self.e();
        let mut poly = self.zero();
        for j in 0..e - 1 {
            self.set_block(&mut poly, j, &self.c[j + 1]);
        }
        let one_l = self.l_one();
        self.set_block(&mut poly, e - 1, &one_l);
        Ok(self.neg(&self.mul(&poly, &c0_inv)))
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn f(&self) -> usize {
        self.b.len()
    }

    pub fn e(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.e() * self.f()
    }

    pub fn b(&self) -> &[FElem] {
        &self.b
    }

    pub fn c(&self) -> &[Vec<FElem>] {
        &self.c
    }

    /// The residue field `k_L = k_E`.
    pub fn residue_field(&self) -> &FqExt {
        &self.kl
    }

    pub fn zero(&self) -> EElem {
        vec![self.field.zero(); self.m()]
    }

    pub fn one(&self) -> EElem {
        self.from_f(&self.field.one())
    }

    fn l_one(&self) -> Vec<FElem> {
        let mut v = vec![self.field.zero(); self.f()];
        v[0] = self.field.one();
        v
    }

    fn set_block(&self, z: &mut EElem, j: usize, l: &[FElem]) {
        let f = self.f();
        z[j * f..(j + 1) * f].clone_from_slice(l);
    }

    pub fn block<'a>(&self, z: &'a [FElem], j: usize) -> &'a [FElem] {
        let f = self.f();
        &z[j * f..(j + 1) * f]
    }

    pub fn from_f(&self, a: &FElem) -> EElem {
        let mut z = self.zero();
        z[0] = self.field.coerce(a);
        z
    }

    pub fn from_l(&self, l: &[FElem]) -> EElem {
        let mut z = self.zero();
        self.set_block(&mut z, 0, l);
        z
    }

    /// Basis element `x^i y^j` at coordinate `k = j f + i`.
    pub fn basis(&self, k: usize) -> EElem {
        let mut z = self.zero();
        z[k] = self.field.one();
        z
    }

    /// The generator `x` of `L` (for `f = 1` the root `-b_0` of `b`).
    pub fn x(&self) -> EElem {
        if self.f() == 1 {
            self.from_f(&self.field.neg(&self.b[0]))
        } else {
            self.basis(1)
        }
    }

    /// The uniformizer `y` of `E` (for `e = 1` the element `-c_0`).
    pub fn y(&self) -> EElem {
        if self.e() == 1 {
            self.neg(&self.from_l(&self.c[0]))
        } else {
            self.basis(self.f())
        }
    }

    pub fn y_inv(&self) -> &EElem {
        &self.y_inv
    }

    pub fn add(&self, a: &[FElem], b: &[FElem]) -> EElem {
        a.iter().zip(b).map(|(x, y)| self.field.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[FElem], b: &[FElem]) -> EElem {
        a.iter().zip(b).map(|(x, y)| self.field.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[FElem]) -> EElem {
        a.iter().map(|x| self.field.neg(x)).collect()
    }

    pub fn mul(&self, a: &[FElem], b: &[FElem]) -> EElem {
        e_mul(&self.field, &self.b, &self.c, a, b)
    }

    /// Multiplication by an element of `F`.
    pub fn scale(&self, s: &FElem, a: &[FElem]) -> EElem {
        a.iter().map(|x| self.field.mul(s, x)).collect()
    }

    /// Multiplication by `pi^k`.
    pub fn shift(&self, a: &[FElem], k: i64) -> EElem {
        a.iter().map(|x| self.field.shift(x, k)).collect()
    }

    pub fn pow(&self, a: &[FElem], k: i64) -> Result<EElem> {
        if k < 0 {
            return self.pow(&self.inv(a)?, -k);
        }
        let mut acc = self.one();
        let mut base = a.to_vec();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Normalized valuation `ord_E`.
    pub fn ord(&self, z: &[FElem]) -> EOrd {
        let f = self.f();
        let e = self.e() as i64;
        let mut finite = i64::MAX;
        let mut bound = i64::MAX;
        for (k, a) in z.iter().enumerate() {
            let j = (k / f) as i64;
            match a.ord() {
                Some(v) => finite = finite.min(e * v + j),
                None => bound = bound.min(e * a.prec() + j),
            }
        }
        if finite <= bound {
            EOrd::Finite(finite)
        } else {
            EOrd::AtLeast(bound)
        }
    }

    /// Lowest `F`-precision among the coordinates.
    pub fn precision(&self, z: &[FElem]) -> i64 {
        z.iter().map(FElem::prec).min().unwrap_or(i64::MAX)
    }

    pub fn truncate(&self, z: &[FElem], prec: i64) -> EElem {
        z.iter().map(|a| self.field.truncate(a, prec)).collect()
    }

    /// Whether all coordinates vanish modulo `pi^n`; `None` when some
    /// coordinate is not known that far.
    pub fn is_zero_mod(&self, z: &[FElem], n: i64) -> Option<bool> {
        let mut known = true;
        for a in z {
            match a.ord() {
                Some(v) if v < n => return Some(false),
                Some(_) => {}
                None if a.prec() < n => known = false,
                None => {}
            }
        }
        known.then_some(true)
    }

    pub fn eq_mod(&self, a: &[FElem], b: &[FElem], n: i64) -> Option<bool> {
        self.is_zero_mod(&self.sub(a, b), n)
    }

    /// Zero at the precision it is known to.
    pub fn is_zero(&self, z: &[FElem]) -> bool {
        z.iter().all(FElem::is_zero)
    }

    /// Residue of an integral element of `L` given by its coordinates.
    pub fn l_residue(&self, l: &[FElem]) -> Option<Vec<u32>> {
        l.iter().map(|a| self.field.residue(a)).collect()
    }

    /// Canonical lift of a `k_L` element into `L ⊂ E`.
    pub fn lift(&self, r: &[u32]) -> EElem {
        let l: Vec<FElem> = r.iter().map(|&d| self.field.lift_residue(d)).collect();
        self.from_l(&l)
    }

    /// Angular component with respect to the uniformizer `y`: the residue of
    /// `z y^{-ord z}`.
    pub fn ac(&self, z: &[FElem]) -> Result<Vec<u32>> {
        let v = match self.ord(z) {
            EOrd::Finite(v) => v,
            EOrd::AtLeast(_) => return Ok(self.kl.zero()),
        };
        let e = self.e() as i64;
        let j0 = v.rem_euclid(e);
        let s = (v - j0) / e;
        let lead: Vec<FElem> = self
            .block(z, j0 as usize)
            .iter()
            .map(|a| self.field.shift(a, -s))
            .collect();
        let r = self.l_residue(&lead).expect("leading block is integral");
        let neg_w = self.kl.neg(&self.wbar);
        let w_inv = self.kl.inv(&neg_w).expect("c_0 has valuation one");
        let corr = if s >= 0 {
            self.kl.pow(&w_inv, s as u64)
        } else {
            self.kl.pow(&neg_w, (-s) as u64)
        };
        Ok(self.kl.mul(&r, &corr))
    }

    /// Inverse of a unit by Newton iteration from the residue inverse.
    pub fn unit_inverse(&self, u: &[FElem]) -> Result<EElem> {
        if self.ord(u) != EOrd::Finite(0) {
            return Err(Error::InsufficientPrecision(
                "element is not a unit at this precision".into(),
            ));
        }
        let r = self.l_residue(self.block(u, 0)).expect("unit");
        let mut s = self.lift(&self.kl.inv(&r).expect("nonzero residue"));
        let one = self.one();
        for _ in 0..NEWTON_STEPS {
            let err = self.sub(&one, &self.mul(u, &s));
            if self.is_zero(&err) {
                let p = self.precision(u);
                return Ok(self.truncate(&s, p));
            }
            s = self.add(&s, &self.mul(&s, &err));
        }
        Err(Error::InsufficientPrecision("unit inverse did not converge".into()))
    }

    /// `z^{-1}`; precision drops by the valuation as with base-field inverses.
    pub fn inv(&self, z: &[FElem]) -> Result<EElem> {
        let v = match self.ord(z) {
            EOrd::Finite(v) => v,
            EOrd::AtLeast(_) => return Err(Error::DivisionByZero),
        };
        let e = self.e() as i64;
        let j0 = v.rem_euclid(e);
        let s = (v - j0) / e;
        let y_pow = self.pow_y_inv(j0 as usize);
        let u = self.mul(&self.shift(z, -s), &y_pow);
        let ui = self.unit_inverse(&u)?;
        Ok(self.shift(&self.mul(&ui, &y_pow), -s))
    }

    fn pow_y_inv(&self, k: usize) -> EElem {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, &self.y_inv))
    }

    pub fn div(&self, a: &[FElem], b: &[FElem]) -> Result<EElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Evaluates the polynomial `sum coeffs[k] X^k` at `z`.
    pub fn eval_poly(&self, coeffs: &[EElem], z: &[FElem]) -> EElem {
        coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, z), c))
    }

    /// Image of an element of `L` (given by coordinates) under `x -> x'`.
    pub fn substitute_x(&self, l: &[FElem], x_img: &[FElem]) -> EElem {
        let coeffs: Vec<EElem> = l.iter().map(|a| self.from_f(a)).collect();
        self.eval_poly(&coeffs, x_img)
    }

    /// Applies a linear map given by the images of the basis vectors.
    pub fn apply(&self, columns: &[EElem], z: &[FElem]) -> EElem {
        apply_columns(&self.field, columns, z)
    }

    /// Roots of `b` in `L`, lifted from `x̄, x̄^q, ..` in that order.
    pub fn roots_of_b(&self) -> Result<Vec<EElem>> {
        let f = self.f();
        let mut bpoly: Vec<EElem> = self.b.iter().map(|a| self.from_f(a)).collect();
        bpoly.push(self.one());
        let dpoly: Vec<EElem> = (1..bpoly.len())
            .map(|k| self.scale(&self.field.from_int(k as i64), &bpoly[k]))
            .collect();
        let x_res = self.l_residue(self.block(&self.x(), 0)).expect("integral");
        let mut out = Vec::with_capacity(f);
        let mut r = x_res;
        for _ in 0..f {
            let mut z = self.lift(&r);
            let mut done = false;
            for _ in 0..NEWTON_STEPS {
                let val = self.eval_poly(&bpoly, &z);
                if self.is_zero(&val) {
                    done = true;
                    break;
                }
                let d = self.eval_poly(&dpoly, &z);
                z = self.sub(&z, &self.div(&val, &d)?);
            }
            if !done {
                return Err(Error::InsufficientPrecision(
                    "Hensel lifting of a root of b did not converge".into(),
                ));
            }
            out.push(z);
            r = self.kl.frobenius(&r);
        }
        Ok(out)
    }

    /// Roots in `E` of `c` with coefficients transported by `x -> x_img`,
    /// as `y w` with `w` lifted from the residue equation `w̄^e = σ(c_0)/c_0`.
    pub fn roots_of_c_conjugate(&self, x_img: &[FElem]) -> Result<Vec<EElem>> {
        let e = self.e();
        let mut cpoly: Vec<EElem> = self.c.iter().map(|l| self.substitute_x(l, x_img)).collect();
        cpoly.push(self.one());
        let dpoly: Vec<EElem> = (1..cpoly.len())
            .map(|k| self.scale(&self.field.from_int(k as i64), &cpoly[k]))
            .collect();
        let sc0 = self.shift(&cpoly[0], -1);
        let Some(num) = self.l_residue(self.block(&sc0, 0)) else {
            return Err(Error::InsufficientPrecision("conjugate of c_0".into()));
        };
        let ratio = self
            .kl
            .mul(&num, &self.kl.inv(&self.wbar).expect("nonzero"));
        let y = self.y();
        let mut out = vec![];
        for w0 in self.kl.roots(&ratio, e as u64) {
            let mut w = self.lift(&w0);
            let mut done = false;
            for _ in 0..NEWTON_STEPS {
                let yw = self.mul(&y, &w);
                let val = self.eval_poly(&cpoly, &yw);
                if self.is_zero(&val) {
                    done = true;
                    break;
                }
                let d = self.mul(&y, &self.eval_poly(&dpoly, &yw));
                w = self.sub(&w, &self.div(&val, &d)?);
            }
            if !done {
                return Err(Error::InsufficientPrecision(
                    "Hensel lifting of a root of c did not converge".into(),
                ));
            }
            out.push(self.mul(&y, &w));
        }
        Ok(out)
    }

    /// `[a_0, a_1, ..]` in coordinate order.
    pub fn format(&self, z: &[FElem]) -> String {
        let parts: Vec<String> = z.iter().map(|a| self.field.format(a)).collect();
        format!("[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::base::LocalFieldSpec;

    fn ramified_quadratic(n: i64) -> Tower {
        let k = LocalField::new(LocalFieldSpec::padic(5, n)).unwrap();
        let b = vec![k.zero()];
        let c = vec![vec![k.from_int(-5)], vec![k.zero()]];
        Tower::new(k, b, c).unwrap()
    }

    #[test]
    fn y_squared_is_pi() {
        let t = ramified_quadratic(10);
        let y = t.y();
        let yy = t.mul(&y, &y);
        assert_eq!(t.eq_mod(&yy, &t.from_f(&t.field().from_int(5)), 10), Some(true));
        assert_eq!(t.ord(&y), EOrd::Finite(1));
        assert_eq!(t.ord(&t.from_f(&t.field().from_int(5))), EOrd::Finite(2));
    }

    #[test]
    fn inverse_of_uniformizer() {
        let t = ramified_quadratic(10);
        let y = t.y();
        let yi = t.inv(&y).unwrap();
        let prod = t.mul(&y, &yi);
        assert_eq!(t.eq_mod(&prod, &t.one(), 8), Some(true));
        assert_eq!(t.ord(&yi), EOrd::Finite(-1));
    }

    #[test]
    fn inverse_of_general_element() {
        let t = ramified_quadratic(12);
        let k = t.field().clone();
        let z = vec![k.from_int(3), k.from_int(7)];
        let zi = t.inv(&z).unwrap();
        assert_eq!(t.eq_mod(&t.mul(&z, &zi), &t.one(), 10), Some(true));
        let w = vec![k.from_int(25), k.from_int(10)];
        assert_eq!(t.ord(&w), EOrd::Finite(3));
        let wi = t.inv(&w).unwrap();
        assert_eq!(t.eq_mod(&t.mul(&w, &wi), &t.one(), 8), Some(true));
    }

    #[test]
    fn ac_of_pi_is_one_over_minus_w() {
        // y^2 = 5, so 5 = y^2 * 1 and ac(5) = 1.
        let t = ramified_quadratic(8);
        let five = t.from_f(&t.field().from_int(5));
        assert_eq!(t.ac(&five).unwrap(), vec![1]);
        let y = t.y();
        assert_eq!(t.ac(&y).unwrap(), vec![1]);
        let z = t.scale(&t.field().from_int(3), &y);
        assert_eq!(t.ac(&z).unwrap(), vec![3]);
    }

    #[test]
    fn roots_of_ramified_quadratic() {
        let t = ramified_quadratic(8);
        let roots = t.roots_of_c_conjugate(&t.x()).unwrap();
        assert_eq!(roots.len(), 2);
        let y = t.y();
        let my = t.neg(&y);
        assert!(roots.iter().any(|r| t.eq_mod(r, &y, 6) == Some(true)));
        assert!(roots.iter().any(|r| t.eq_mod(r, &my, 6) == Some(true)));
    }

    #[test]
    fn cube_root_has_single_conjugate() {
        let k = LocalField::new(LocalFieldSpec::padic(5, 8)).unwrap();
        let c = vec![vec![k.from_int(-5)], vec![k.zero()], vec![k.zero()]];
        let t = Tower::new(k.clone(), vec![k.zero()], c).unwrap();
        assert_eq!(t.roots_of_c_conjugate(&t.x()).unwrap().len(), 1);
    }

    #[test]
    fn unramified_quadratic_roots() {
        // L = Q_5(sqrt 2)
        let k = LocalField::new(LocalFieldSpec::padic(5, 8)).unwrap();
        let b = vec![k.from_int(-2), k.zero()];
        let c = vec![vec![k.from_int(-5), k.zero()]];
        let t = Tower::new(k, b, c).unwrap();
        let roots = t.roots_of_b().unwrap();
        assert_eq!(roots.len(), 2);
        let sum = t.add(&roots[0], &roots[1]);
        assert_eq!(t.is_zero_mod(&sum, 8), Some(true));
    }

    #[test]
    fn laurent_tower() {
        let k = LocalField::new(LocalFieldSpec::laurent(3, 8)).unwrap();
        let c = vec![vec![k.neg(&k.uniformizer())], vec![k.zero()]];
        let t = Tower::new(k.clone(), vec![k.zero()], c).unwrap();
        let y = t.y();
        let z = t.add(&t.one(), &y);
        let zi = t.inv(&z).unwrap();
        assert_eq!(t.eq_mod(&t.mul(&z, &zi), &t.one(), 7), Some(true));
    }

    #[test]
    fn polynomial_checks() {
        let k = LocalField::new(LocalFieldSpec::padic(5, 6)).unwrap();
        assert!(check_unramified_poly(&k, &[k.from_int(-2), k.zero()]).unwrap());
        assert!(!check_unramified_poly(&k, &[k.from_int(-1), k.zero()]).unwrap());
        assert!(check_unramified_poly(&k, &[k.from_int(-1)]).unwrap());
        let inv5 = k.inv(&k.from_int(5)).unwrap();
        assert!(check_unramified_poly(&k, &[inv5]).is_err());
        let eis = |c0: i64| vec![vec![k.from_int(c0)], vec![k.zero()]];
        assert!(check_eisenstein(&k, &eis(-5)));
        assert!(!check_eisenstein(&k, &eis(-1)));
        assert!(!check_eisenstein(&k, &eis(-25)));
    }
}
