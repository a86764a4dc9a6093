//! Bounded three-valued evaluation of formulas in a fixed local field.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use super::ast::{Formula, Quant, Sort, Term};
use super::hints::{Hensel, HintProvider, HintRequest};
use crate::localfield::{FElem, LocalField};

/// A value of one of the three sorts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    VF(FElem),
    /// A residue-field element in the encoding of [`crate::localfield::Fq`].
    RF(u32),
    ZZ(i64),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::VF(_) => Sort::VF,
            Value::RF(_) => Sort::RF,
            Value::ZZ(_) => Sort::ZZ,
        }
    }
}

pub type Assignment = BTreeMap<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn known(self) -> Option<bool> {
        match self {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Unknown => None,
        }
    }

    pub fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        })
    }
}

/// Search limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// `ZZ` quantifiers search `[-zz_window, zz_window]`.
    pub zz_window: i64,
    /// Fallback `VF` candidates are `pi^k` times lifted residues, `|k| <= vf_depth`.
    pub vf_depth: i64,
    /// Total fallback `VF` candidates tried per evaluation.
    pub vf_candidates: u64,
    /// Absolute precision at which `VF` equalities count as certified;
    /// defaults to the field precision.
    pub certify: Option<i64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            zz_window: 64,
            vf_depth: 1,
            vf_candidates: 4096,
            certify: None,
        }
    }
}

impl Budget {
    pub fn doubled(&self) -> Budget {
        Budget {
            zz_window: self.zz_window * 2,
            vf_depth: self.vf_depth * 2,
            vf_candidates: self.vf_candidates * 2,
            certify: self.certify,
        }
    }
}

pub struct Evaluator {
    field: LocalField,
    budget: Budget,
    hints: Vec<Box<dyn HintProvider>>,
    spent: Cell<u64>,
}

fn kleene_and(a: Truth, b: impl FnOnce() -> Truth) -> Truth {
    match a {
        Truth::False => Truth::False,
        Truth::True => b(),
        Truth::Unknown => match b() {
            Truth::False => Truth::False,
            _ => Truth::Unknown,
        },
    }
}

fn kleene_or(a: Truth, b: impl FnOnce() -> Truth) -> Truth {
    kleene_and(a.not(), || b().not()).not()
}

impl Evaluator {
    pub fn new(field: LocalField, budget: Budget) -> Self {
        Evaluator {
            field,
            budget,
            hints: vec![Box::new(Hensel)],
            spent: Cell::new(0),
        }
    }

    pub fn with_hint(mut self, h: Box<dyn HintProvider>) -> Self {
        self.hints.push(h);
        self
    }

    pub fn field(&self) -> &LocalField {
        &self.field
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn certify(&self) -> i64 {
        self.budget.certify.unwrap_or_else(|| self.field.precision())
    }

    /// Evaluates `phi` under `env`, which must cover its free variables.
    pub fn evaluate(&self, phi: &Formula, env: &Assignment) -> Truth {
        self.spent.set(0);
        for (name, sort) in phi.free_vars() {
            match env.get(&name) {
                Some(v) if v.sort() == sort => {}
                _ => return Truth::Unknown,
            }
        }
        let mut env = env.clone();
        self.eval(phi, &mut env)
    }

    pub fn term(&self, t: &Term, env: &Assignment) -> Option<Value> {
        let k = &self.field;
        let rf = k.residue_field();
        match t {
            Term::Var(n, _) => env.get(n).cloned(),
            Term::Int(c, Sort::VF) => Some(Value::VF(k.from_int(*c))),
            Term::Int(c, Sort::RF) => Some(Value::RF(rf.from_int(*c))),
            Term::Int(c, Sort::ZZ) => Some(Value::ZZ(*c)),
            Term::Pi => Some(Value::VF(k.uniformizer())),
            Term::Ord(a) => match self.term(a, env)? {
                Value::VF(x) => x.ord().map(Value::ZZ),
                _ => None,
            },
            Term::Ac(a) => match self.term(a, env)? {
                Value::VF(x) => {
                    let v = x.ord()?;
                    k.residue(&k.shift(&x, -v)).map(Value::RF)
                }
                _ => None,
            },
            Term::Add(v) | Term::Mul(v) => {
                let is_add = matches!(t, Term::Add(_));
                let mut vals = v.iter().map(|x| self.term(x, env));
                let mut acc = vals.next()??;
                for x in vals {
                    acc = self.binop(is_add, &acc, &x?)?;
                }
                Some(acc)
            }
            Term::Sub(a, b) => {
                let (a, b) = (self.term(a, env)?, self.term(b, env)?);
                let nb = self.negate(&b)?;
                self.binop(true, &a, &nb)
            }
            Term::Neg(a) => self.negate(&self.term(a, env)?),
            Term::Pow(a, e) => match self.term(a, env)? {
                Value::VF(x) => k.pow(&x, *e as i64).ok().map(Value::VF),
                Value::RF(x) => Some(Value::RF(rf.pow(x, *e as u64))),
                Value::ZZ(_) => None,
            },
        }
    }

    fn negate(&self, a: &Value) -> Option<Value> {
        Some(match a {
            Value::VF(x) => Value::VF(self.field.neg(x)),
            Value::RF(x) => Value::RF(self.field.residue_field().neg(*x)),
            Value::ZZ(x) => Value::ZZ(x.checked_neg()?),
        })
    }

    fn binop(&self, add: bool, a: &Value, b: &Value) -> Option<Value> {
        let k = &self.field;
        let rf = k.residue_field();
        Some(match (a, b) {
            (Value::VF(x), Value::VF(y)) => Value::VF(if add { k.add(x, y) } else { k.mul(x, y) }),
            (Value::RF(x), Value::RF(y)) => Value::RF(if add { rf.add(*x, *y) } else { rf.mul(*x, *y) }),
            (Value::ZZ(x), Value::ZZ(y)) => Value::ZZ(if add { x.checked_add(*y)? } else { x.checked_mul(*y)? }),
            _ => return None,
        })
    }

    fn equal(&self, a: &Value, b: &Value) -> Truth {
        match (a, b) {
            (Value::VF(x), Value::VF(y)) => {
                let d = self.field.sub(x, y);
                match d.ord() {
                    Some(v) if v < self.certify() => Truth::False,
                    Some(_) => Truth::True,
                    None if d.prec() >= self.certify() => Truth::True,
                    None => Truth::Unknown,
                }
            }
            (Value::RF(x), Value::RF(y)) => Truth::from_bool(x == y),
            (Value::ZZ(x), Value::ZZ(y)) => Truth::from_bool(x == y),
            _ => Truth::Unknown,
        }
    }

    fn zz(&self, t: &Term, env: &Assignment) -> Option<i64> {
        match self.term(t, env)? {
            Value::ZZ(v) => Some(v),
            _ => None,
        }
    }

    fn eval(&self, phi: &Formula, env: &mut Assignment) -> Truth {
        match phi {
            Formula::True => Truth::True,
            Formula::False => Truth::False,
            Formula::Eq(a, b) => match (self.term(a, env), self.term(b, env)) {
                (Some(x), Some(y)) => self.equal(&x, &y),
                _ => Truth::Unknown,
            },
            Formula::Cmp(c, a, b) => match (self.zz(a, env), self.zz(b, env)) {
                (Some(x), Some(y)) => Truth::from_bool(c.holds(x, y)),
                _ => Truth::Unknown,
            },
            Formula::Cong(n, a, b) => match (self.zz(a, env), self.zz(b, env)) {
                (Some(x), Some(y)) => Truth::from_bool((x as i128 - y as i128).rem_euclid(*n as i128) == 0),
                _ => Truth::Unknown,
            },
            Formula::Not(a) => self.eval(a, env).not(),
            Formula::And(v) => {
                let mut acc = Truth::True;
                for f in v {
                    acc = kleene_and(acc, || self.eval(f, env));
                    if acc == Truth::False {
                        break;
                    }
                }
                acc
            }
            Formula::Or(v) => {
                let mut acc = Truth::False;
                for f in v {
                    acc = kleene_or(acc, || self.eval(f, env));
                    if acc == Truth::True {
                        break;
                    }
                }
                acc
            }
            Formula::Implies(a, b) => {
                let x = self.eval(a, env).not();
                kleene_or(x, || self.eval(b, env))
            }
            Formula::Quant(q, vars, hint, body) => {
                if let Some(h) = hint {
                    if let Some(t) = self.hinted(*q, &h.0, vars, body, env) {
                        return t;
                    }
                }
                self.quantify(*q, vars, body, env)
            }
        }
    }

    /// Evaluates with the hint's candidates; `None` leaves the decision to
    /// the generic search.
    fn hinted(
        &self,
        q: Quant,
        name: &str,
        vars: &[(String, Sort)],
        body: &Formula,
        env: &mut Assignment,
    ) -> Option<Truth> {
        let req = HintRequest {
            name,
            vars,
            body,
            env,
            field: &self.field,
        };
        let res = self.hints.iter().find_map(|h| h.propose(&req))?;
        let target = if q == Quant::Exists { Truth::True } else { Truth::False };
        let mut unknown = false;
        for cand in &res.candidates {
            if cand.len() != vars.len() {
                continue;
            }
            let saved: Vec<Option<Value>> = vars.iter().map(|(n, _)| env.get(n).cloned()).collect();
            for ((n, _), v) in vars.iter().zip(cand) {
                env.insert(n.clone(), v.clone());
            }
            let t = self.eval(body, env);
            restore(env, vars, saved);
            if t == target {
                return Some(target);
            }
            unknown |= t == Truth::Unknown;
        }
        if res.complete {
            return Some(if unknown { Truth::Unknown } else { target.not() });
        }
        None
    }

    fn quantify(&self, q: Quant, vars: &[(String, Sort)], body: &Formula, env: &mut Assignment) -> Truth {
        let Some(((name, sort), rest)) = vars.split_first() else {
            return self.eval(body, env);
        };
        let saved = env.get(name).cloned();
        let inner = |this: &Self, env: &mut Assignment, v: Value| -> Truth {
            env.insert(name.clone(), v);
            this.quantify(q, rest, body, env)
        };
        let exists = q == Quant::Exists;
        let fold = |acc: Truth, t: Truth| if exists { kleene_or(acc, || t) } else { kleene_and(acc, || t) };
        let decided = if exists { Truth::True } else { Truth::False };
        let out = match sort {
            Sort::RF => {
                let mut acc = decided.not();
                for a in self.field.residue_field().elements() {
                    acc = fold(acc, inner(self, env, Value::RF(a)));
                    if acc == decided {
                        break;
                    }
                }
                acc
            }
            Sort::ZZ => self.quantify_zz(q, name, rest, body, env),
            Sort::VF => {
                let mut acc = decided.not();
                for c in self.vf_candidates() {
                    if self.spent.get() >= self.budget.vf_candidates {
                        break;
                    }
                    self.spent.set(self.spent.get() + 1);
                    acc = fold(acc, inner(self, env, Value::VF(c)));
                    if acc == decided {
                        break;
                    }
                }
                // the candidates never exhaust VF, so only a witness decides
                if acc == decided {
                    acc
                } else {
                    Truth::Unknown
                }
            }
        };
        match saved {
            Some(v) => env.insert(name.clone(), v),
            None => env.remove(name),
        };
        out
    }

    fn vf_candidates(&self) -> Vec<FElem> {
        let k = &self.field;
        let mut out = vec![k.zero()];
        for e in -self.budget.vf_depth..=self.budget.vf_depth {
            for a in k.residue_field().elements().filter(|&a| a != 0) {
                out.push(k.mul(&k.uniformizer_pow(e), &k.lift_residue(a)));
            }
        }
        out
    }

    fn quantify_zz(
        &self,
        q: Quant,
        name: &str,
        rest: &[(String, Sort)],
        body: &Formula,
        env: &mut Assignment,
    ) -> Truth {
        let exists = q == Quant::Exists;
        let decided = if exists { Truth::True } else { Truth::False };
        let run = |this: &Self, env: &mut Assignment, v: i64| -> Truth {
            env.insert(name.to_string(), Value::ZZ(v));
            this.quantify(q, rest, body, env)
        };
        let fold = |acc: Truth, t: Truth| if exists { kleene_or(acc, || t) } else { kleene_and(acc, || t) };

        // values forced by a defining equation, when the rest of the block
        // does not interfere
        if exists && rest.is_empty() {
            if let Some(cands) = forced_values(name, body) {
                let mut acc = Truth::False;
                for (t, guards) in cands {
                    match self.zz(t, env) {
                        Some(v) => acc = fold(acc, run(self, env, v)),
                        // an undefined candidate only matters if its branch can hold
                        None => {
                            if !guards.iter().any(|g| self.eval(g, env) == Truth::False) {
                                acc = fold(acc, Truth::Unknown);
                            }
                        }
                    }
                    if acc == decided {
                        break;
                    }
                }
                return acc;
            }
        }
        // exact answer from periodicity when the body is linear in the variable
        if rest.is_empty() {
            if let Some((threshold, period)) = self.periodicity(name, body, env) {
                let reach = threshold.saturating_add(period);
                if reach <= self.budget.zz_window.max(1) * 64 {
                    let mut acc = decided.not();
                    for v in -reach..=reach {
                        acc = fold(acc, run(self, env, v));
                        if acc == decided {
                            break;
                        }
                    }
                    return acc;
                }
            }
        }
        let w = self.budget.zz_window;
        let mut acc = decided.not();
        for v in -w..=w {
            acc = fold(acc, run(self, env, v));
            if acc == decided {
                return acc;
            }
        }
        Truth::Unknown
    }

    /// `(T, P)` such that the truth of `body` in `name` is `P`-periodic
    /// beyond `|name| > T`, from the linear atoms of a quantifier-free body.
    fn periodicity(&self, name: &str, body: &Formula, env: &Assignment) -> Option<(i64, i64)> {
        let mut thr = 0i64;
        let mut per = 1i64;
        self.scan(name, body, env, &mut thr, &mut per)?;
        Some((thr + 1, per))
    }

    fn scan(&self, name: &str, f: &Formula, env: &Assignment, thr: &mut i64, per: &mut i64) -> Option<()> {
        match f {
            Formula::True | Formula::False => Some(()),
            Formula::Eq(a, b) | Formula::Cmp(_, a, b) => {
                if !a.mentions(name) && !b.mentions(name) {
                    return Some(());
                }
                let (ca, da) = self.affine(name, a, env)?;
                let (cb, db) = self.affine(name, b, env)?;
                let c = ca - cb;
                if c != 0 {
                    *thr = (*thr).max((db - da).abs() / c.abs() + 1);
                }
                Some(())
            }
            Formula::Cong(n, a, b) => {
                if a.mentions(name) || b.mentions(name) {
                    self.affine(name, a, env)?;
                    self.affine(name, b, env)?;
                    *per = per.lcm(&(*n as i64));
                }
                Some(())
            }
            Formula::Not(a) => self.scan(name, a, env, thr, per),
            Formula::And(v) | Formula::Or(v) => v.iter().try_for_each(|x| self.scan(name, x, env, thr, per)),
            Formula::Implies(a, b) => {
                self.scan(name, a, env, thr, per)?;
                self.scan(name, b, env, thr, per)
            }
            Formula::Quant(..) => None,
        }
    }

    /// `t = c * name + d` with `c, d` evaluated under `env`.
    fn affine(&self, name: &str, t: &Term, env: &Assignment) -> Option<(i64, i64)> {
        if !t.mentions(name) {
            return Some((0, self.zz(t, env)?));
        }
        match t {
            Term::Var(n, _) if n == name => Some((1, 0)),
            Term::Add(v) => v.iter().try_fold((0i64, 0i64), |(c, d), x| {
                let (a, b) = self.affine(name, x, env)?;
                Some((c.checked_add(a)?, d.checked_add(b)?))
            }),
            Term::Sub(a, b) => {
                let (c1, d1) = self.affine(name, a, env)?;
                let (c2, d2) = self.affine(name, b, env)?;
                Some((c1 - c2, d1 - d2))
            }
            Term::Neg(a) => {
                let (c, d) = self.affine(name, a, env)?;
                Some((-c, -d))
            }
            Term::Mul(v) => {
                let mut scale = 1i64;
                let mut lin = None;
                for x in v {
                    if x.mentions(name) {
                        if lin.is_some() {
                            return None;
                        }
                        lin = Some(self.affine(name, x, env)?);
                    } else {
                        scale = scale.checked_mul(self.zz(x, env)?)?;
                    }
                }
                let (c, d) = lin?;
                Some((c.checked_mul(scale)?, d.checked_mul(scale)?))
            }
            _ => None,
        }
    }
}

fn restore(env: &mut Assignment, vars: &[(String, Sort)], saved: Vec<Option<Value>>) {
    for ((n, _), s) in vars.iter().zip(saved) {
        match s {
            Some(v) => env.insert(n.clone(), v),
            None => env.remove(n),
        };
    }
}

/// Terms `T` such that `body` implies `name = T` for one of them, each with
/// the sibling conjuncts that do not mention `name`.
fn forced_values<'a>(name: &str, body: &'a Formula) -> Option<Vec<(&'a Term, Vec<&'a Formula>)>> {
    match body {
        Formula::Eq(a, b) if a.sort() == Sort::ZZ => match (a, b) {
            (Term::Var(n, _), t) | (t, Term::Var(n, _)) if n == name && !t.mentions(name) => {
                Some(vec![(t, vec![])])
            }
            _ => None,
        },
        Formula::And(v) => v.iter().enumerate().find_map(|(i, f)| {
            let found = forced_values(name, f)?;
            let guards: Vec<&Formula> = v
                .iter()
                .enumerate()
                .filter(|&(j, g)| j != i && !g.mentions(name))
                .map(|(_, g)| g)
                .collect();
            Some(
                found
                    .into_iter()
                    .map(|(t, mut gs)| {
                        gs.extend(guards.iter().copied());
                        (t, gs)
                    })
                    .collect(),
            )
        }),
        Formula::Or(v) => {
            let mut out = vec![];
            for f in v {
                out.extend(forced_values(name, f)?);
            }
            Some(out)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;
    use crate::localfield::LocalFieldSpec;

    fn q5() -> LocalField {
        LocalField::new(LocalFieldSpec::padic(5, 10)).unwrap()
    }

    fn eval(text: &str, env: &[(&str, Value)]) -> Truth {
        let ev = Evaluator::new(q5(), Budget::default());
        let env: Assignment = env.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        ev.evaluate(&parse(text).unwrap(), &env)
    }

    #[test]
    fn ord_of_p() {
        let k = q5();
        assert_eq!(eval("(>= (ord x) 1)", &[("x", Value::VF(k.from_int(5)))]), Truth::True);
        assert_eq!(eval("(>= (ord x) 1)", &[("x", Value::VF(k.from_int(6)))]), Truth::False);
    }

    #[test]
    fn hensel_square_root() {
        let k = q5();
        let t = eval("(exists (y VF) :hint hensel (= (* y y) x))", &[("x", Value::VF(k.from_int(6)))]);
        assert_eq!(t, Truth::True);
    }

    #[test]
    fn ac_of_p_is_one() {
        let k = q5();
        assert_eq!(eval("(= (ac x) 1)", &[("x", Value::VF(k.from_int(5)))]), Truth::True);
        assert_eq!(eval("(= (ac x) 2)", &[("x", Value::VF(k.from_int(10)))]), Truth::True);
    }

    #[test]
    fn residue_quantifiers_are_exact() {
        // 2 is not a square mod 5, 4 is
        assert_eq!(eval("(exists (u RF) (= (* u u) 2))", &[]), Truth::False);
        assert_eq!(eval("(exists (u RF) (= (* u u) 4))", &[]), Truth::True);
        assert_eq!(eval("(forall (u RF) (not (= (* u u) 2)))", &[]), Truth::True);
    }

    #[test]
    fn value_group_quantifiers_close_by_periodicity() {
        assert_eq!(eval("(exists (n ZZ) (and (cong 3 n 1) (> n 1000)))", &[]), Truth::True);
        assert_eq!(eval("(exists (n ZZ) (and (cong 2 n 1) (cong 2 n 0)))", &[]), Truth::False);
        assert_eq!(eval("(forall (n ZZ) (or (cong 2 n 0) (cong 2 n 1)))", &[]), Truth::True);
        let k = q5();
        let x = Value::VF(k.from_int(25));
        assert_eq!(eval("(exists (n ZZ) (= (ord x) (* 2 n)))", &[("x", x.clone())]), Truth::True);
        assert_eq!(eval("(exists (n ZZ) (= (ord x) (+ (* 2 n) 1)))", &[("x", x)]), Truth::False);
    }

    #[test]
    fn valued_field_search_is_one_sided() {
        let k = q5();
        // no square root of 2 in Q_5: the search cannot prove that
        let t = eval("(exists (y VF) (= (* y y) x))", &[("x", Value::VF(k.from_int(2)))]);
        assert_eq!(t, Truth::Unknown);
        let t = eval("(exists (y VF) (= (* y y) x))", &[("x", Value::VF(k.from_int(4)))]);
        assert_eq!(t, Truth::True);
    }

    #[test]
    fn missing_assignment_is_unknown() {
        assert_eq!(eval("(= x 1)", &[]), Truth::Unknown);
    }
}
