//! S-expression reader for formulas.
//!
//! ```text
//! formula := true | false
//!          | (= t t) | (<= t t) | (< t t) | (>= t t) | (> t t) | (cong n t t)
//!          | (not f) | (and f*) | (or f*) | (implies f f)
//!          | (exists binders [:hint name] f) | (forall binders f)
//!          | (free ((x SORT)*) f)                        ; top level only
//! binders := (x SORT) | ((x SORT)+)
//! term    := integer | pi | x | (+ t+) | (- t) | (- t t) | (* t+) | (^ t k)
//!          | (ord t) | (ac t)
//! ```
//!
//! Sorts of free variables are inferred from use; a variable that is never
//! pinned down is taken to be `VF`. Comments run from `;` to end of line.

use std::collections::HashMap;

use super::ast::{Cmp, Formula, Quant, Sort, Term, WitnessHint};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Sx {
    Atom(String, usize),
    List(Vec<Sx>, usize),
}

impl Sx {
    fn pos(&self) -> usize {
        match self {
            Sx::Atom(_, p) | Sx::List(_, p) => *p,
        }
    }
}

fn syntax<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        pos,
        msg: msg.into(),
    })
}

fn read(text: &str) -> Result<Sx> {
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    let out = read_one(&bytes, &mut i)?;
    skip_ws(&bytes, &mut i);
    if i < bytes.len() {
        return syntax(i, "trailing input after formula");
    }
    Ok(out)
}

fn skip_ws(s: &[char], i: &mut usize) {
    while *i < s.len() {
        if s[*i].is_whitespace() {
            *i += 1;
        } else if s[*i] == ';' {
            while *i < s.len() && s[*i] != '\n' {
                *i += 1;
            }
        } else {
            break;
        }
    }
}

fn read_one(s: &[char], i: &mut usize) -> Result<Sx> {
    skip_ws(s, i);
    if *i >= s.len() {
        return syntax(*i, "unexpected end of input");
    }
    let start = *i;
    match s[*i] {
        '(' => {
            *i += 1;
            let mut items = vec![];
            loop {
                skip_ws(s, i);
                if *i >= s.len() {
                    return syntax(start, "unbalanced parenthesis");
                }
                if s[*i] == ')' {
                    *i += 1;
                    return Ok(Sx::List(items, start));
                }
                items.push(read_one(s, i)?);
            }
        }
        ')' => syntax(start, "unexpected ')'"),
        _ => {
            while *i < s.len() && !s[*i].is_whitespace() && s[*i] != '(' && s[*i] != ')' && s[*i] != ';' {
                *i += 1;
            }
            Ok(Sx::Atom(s[start..*i].iter().collect(), start))
        }
    }
}

// Untyped intermediate forms.

#[derive(Clone, Debug)]
enum RTerm {
    Var(String),
    Int(i64),
    Pi,
    Add(Vec<RTerm>),
    Sub(Box<RTerm>, Box<RTerm>),
    Neg(Box<RTerm>),
    Mul(Vec<RTerm>),
    Pow(Box<RTerm>, u32),
    Ord(Box<RTerm>),
    Ac(Box<RTerm>),
}

#[derive(Clone, Debug)]
enum RForm {
    True,
    False,
    Eq(RTerm, RTerm),
    Cmp(Cmp, RTerm, RTerm),
    Cong(u64, RTerm, RTerm),
    Not(Box<RForm>),
    And(Vec<RForm>),
    Or(Vec<RForm>),
    Implies(Box<RForm>, Box<RForm>),
    Quant(Quant, Vec<(String, Sort)>, Option<WitnessHint>, Box<RForm>),
}

fn expect_arity(head: &str, args: usize, pos: usize) -> Result<()> {
    let ok = match head {
        "=" | "<=" | "<" | ">=" | ">" | "implies" => args == 2,
        "cong" => args == 3,
        "not" | "ord" | "ac" => args == 1,
        "^" => args == 2,
        "-" => args == 1 || args == 2,
        "+" | "*" => args >= 1,
        "exists" | "forall" => args == 2 || args == 4,
        "free" => args == 2,
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        syntax(pos, format!("wrong number of arguments ({args}) for '{head}'"))
    }
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '.')
}

fn term(sx: &Sx) -> Result<RTerm> {
    match sx {
        Sx::Atom(a, pos) => {
            if let Ok(k) = a.parse::<i64>() {
                Ok(RTerm::Int(k))
            } else if a == "pi" {
                Ok(RTerm::Pi)
            } else if is_ident(a) {
                Ok(RTerm::Var(a.clone()))
            } else {
                syntax(*pos, format!("unexpected token '{a}'"))
            }
        }
        Sx::List(items, pos) => {
            let (head, args) = match items.split_first() {
                Some((Sx::Atom(h, _), rest)) => (h.as_str(), rest),
                _ => return syntax(*pos, "expected an operator"),
            };
            expect_arity(head, args.len(), *pos)?;
            let ts = || args.iter().map(term).collect::<Result<Vec<_>>>();
            match head {
                "+" => Ok(RTerm::Add(ts()?)),
                "*" => Ok(RTerm::Mul(ts()?)),
                "-" => {
                    let mut v = ts()?;
                    if v.len() == 1 {
                        Ok(RTerm::Neg(Box::new(v.pop().expect("one"))))
                    } else {
                        let b = v.pop().expect("two");
                        let a = v.pop().expect("two");
                        Ok(RTerm::Sub(Box::new(a), Box::new(b)))
                    }
                }
                "^" => {
                    let k = match &args[1] {
                        Sx::Atom(a, p) => a
                            .parse::<u32>()
                            .or_else(|_| syntax(*p, "exponent must be a natural number"))?,
                        other => return syntax(other.pos(), "exponent must be a natural number"),
                    };
                    Ok(RTerm::Pow(Box::new(term(&args[0])?), k))
                }
                "ord" => Ok(RTerm::Ord(Box::new(term(&args[0])?))),
                "ac" => Ok(RTerm::Ac(Box::new(term(&args[0])?))),
                _ => syntax(*pos, format!("unknown term operator '{head}'")),
            }
        }
    }
}

fn binders(sx: &Sx) -> Result<Vec<(String, Sort)>> {
    let one = |sx: &Sx| -> Result<(String, Sort)> {
        match sx {
            Sx::List(v, pos) if v.len() == 2 => match (&v[0], &v[1]) {
                (Sx::Atom(n, _), Sx::Atom(s, spos)) if is_ident(n) => {
                    let sort = Sort::parse(s)
                        .map_or_else(|| syntax(*spos, format!("unknown sort '{s}'")), Ok)?;
                    Ok((n.clone(), sort))
                }
                _ => syntax(*pos, "expected (name SORT)"),
            },
            other => syntax(other.pos(), "expected (name SORT)"),
        }
    };
    match sx {
        Sx::List(v, _) if v.len() == 2 && matches!(v[0], Sx::Atom(..)) => Ok(vec![one(sx)?]),
        Sx::List(v, pos) => {
            if v.is_empty() {
                return syntax(*pos, "empty binder list");
            }
            v.iter().map(one).collect()
        }
        other => syntax(other.pos(), "expected binders"),
    }
}

fn formula(sx: &Sx) -> Result<RForm> {
    match sx {
        Sx::Atom(a, pos) => match a.as_str() {
            "true" => Ok(RForm::True),
            "false" => Ok(RForm::False),
            _ => syntax(*pos, format!("expected a formula, got '{a}'")),
        },
        Sx::List(items, pos) => {
            let (head, args) = match items.split_first() {
                Some((Sx::Atom(h, _), rest)) => (h.as_str(), rest),
                _ => return syntax(*pos, "expected a connective or relation"),
            };
            expect_arity(head, args.len(), *pos)?;
            let fs = || args.iter().map(formula).collect::<Result<Vec<_>>>();
            match head {
                "=" => Ok(RForm::Eq(term(&args[0])?, term(&args[1])?)),
                "<=" | "<" | ">=" | ">" => {
                    let c = match head {
                        "<=" => Cmp::Le,
                        "<" => Cmp::Lt,
                        ">=" => Cmp::Ge,
                        _ => Cmp::Gt,
                    };
                    Ok(RForm::Cmp(c, term(&args[0])?, term(&args[1])?))
                }
                "cong" => {
                    let n = match &args[0] {
                        Sx::Atom(a, p) => match a.parse::<u64>() {
                            Ok(n) if n > 0 => n,
                            _ => return syntax(*p, "modulus must be a positive integer"),
                        },
                        other => return syntax(other.pos(), "modulus must be a positive integer"),
                    };
                    Ok(RForm::Cong(n, term(&args[1])?, term(&args[2])?))
                }
                "not" => Ok(RForm::Not(Box::new(formula(&args[0])?))),
                "and" => Ok(RForm::And(fs()?)),
                "or" => Ok(RForm::Or(fs()?)),
                "implies" => Ok(RForm::Implies(
                    Box::new(formula(&args[0])?),
                    Box::new(formula(&args[1])?),
                )),
                "exists" | "forall" => {
                    let q = if head == "exists" { Quant::Exists } else { Quant::Forall };
                    let vars = binders(&args[0])?;
                    let (hint, body) = if args.len() == 4 {
                        match (&args[1], &args[2]) {
                            (Sx::Atom(k, _), Sx::Atom(h, _)) if k == ":hint" => {
                                (Some(WitnessHint(h.clone())), &args[3])
                            }
                            _ => return syntax(args[1].pos(), "expected ':hint name'"),
                        }
                    } else {
                        (None, &args[1])
                    };
                    Ok(RForm::Quant(q, vars, hint, Box::new(formula(body)?)))
                }
                "free" => syntax(*pos, "'free' is only allowed at the top level"),
                _ => syntax(*pos, format!("unknown connective or relation '{head}'")),
            }
        }
    }
}

// Sort inference.

struct Typer {
    free: HashMap<String, Sort>,
    changed: bool,
}

fn sort_err<T>(term: impl Into<String>, msg: impl Into<String>) -> Result<T> {
    Err(Error::Sort {
        term: term.into(),
        msg: msg.into(),
    })
}

impl Typer {
    fn lookup(&self, name: &str, scope: &[(String, Sort)]) -> Option<Sort> {
        scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .or_else(|| self.free.get(name).copied())
    }

    fn synth(&self, t: &RTerm, scope: &[(String, Sort)]) -> Option<Sort> {
        match t {
            RTerm::Var(n) => self.lookup(n, scope),
            RTerm::Int(_) => None,
            RTerm::Pi => Some(Sort::VF),
            RTerm::Ord(..) => Some(Sort::ZZ),
            RTerm::Ac(..) => Some(Sort::RF),
            RTerm::Add(v) | RTerm::Mul(v) => v.iter().find_map(|x| self.synth(x, scope)),
            RTerm::Sub(a, b) => self.synth(a, scope).or_else(|| self.synth(b, scope)),
            RTerm::Neg(a) | RTerm::Pow(a, _) => self.synth(a, scope),
        }
    }

    /// Pins down sorts of free variables occurring in `t` at sort `s`.
    fn push(&mut self, t: &RTerm, s: Sort, scope: &[(String, Sort)]) -> Result<()> {
        match t {
            RTerm::Var(n) => {
                if scope.iter().any(|(m, _)| m == n) {
                    return Ok(());
                }
                match self.free.get(n) {
                    Some(_) => {}
                    None => {
                        self.free.insert(n.clone(), s);
                        self.changed = true;
                    }
                }
                Ok(())
            }
            RTerm::Int(_) | RTerm::Pi => Ok(()),
            RTerm::Ord(a) | RTerm::Ac(a) => self.push(a, Sort::VF, scope),
            RTerm::Add(v) | RTerm::Mul(v) => v.iter().try_for_each(|x| self.push(x, s, scope)),
            RTerm::Sub(a, b) => {
                self.push(a, s, scope)?;
                self.push(b, s, scope)
            }
            RTerm::Neg(a) | RTerm::Pow(a, _) => self.push(a, s, scope),
        }
    }

    fn infer(&mut self, f: &RForm, scope: &mut Vec<(String, Sort)>) -> Result<()> {
        match f {
            RForm::True | RForm::False => Ok(()),
            RForm::Eq(a, b) => {
                if let Some(s) = self.synth(a, scope).or_else(|| self.synth(b, scope)) {
                    self.push(a, s, scope)?;
                    self.push(b, s, scope)?;
                }
                Ok(())
            }
            RForm::Cmp(_, a, b) | RForm::Cong(_, a, b) => {
                self.push(a, Sort::ZZ, scope)?;
                self.push(b, Sort::ZZ, scope)
            }
            RForm::Not(a) => self.infer(a, scope),
            RForm::And(v) | RForm::Or(v) => v.iter().try_for_each(|x| self.infer(x, scope)),
            RForm::Implies(a, b) => {
                self.infer(a, scope)?;
                self.infer(b, scope)
            }
            RForm::Quant(_, vars, _, body) => {
                let k = scope.len();
                scope.extend(vars.iter().cloned());
                let r = self.infer(body, scope);
                scope.truncate(k);
                r
            }
        }
    }

    fn elab_term(&self, t: &RTerm, s: Sort, scope: &[(String, Sort)]) -> Result<Term> {
        match t {
            RTerm::Var(n) => {
                let actual = self.lookup(n, scope).unwrap_or(Sort::VF);
                if actual != s {
                    return sort_err(n, format!("has sort {actual}, expected {s}"));
                }
                Ok(Term::Var(n.clone(), s))
            }
            RTerm::Int(k) => Ok(Term::Int(*k, s)),
            RTerm::Pi => {
                if s != Sort::VF {
                    return sort_err("pi", format!("is VF, expected {s}"));
                }
                Ok(Term::Pi)
            }
            RTerm::Ord(a) => {
                if s != Sort::ZZ {
                    return sort_err(format!("(ord {})", self.show(a)), format!("is ZZ, expected {s}"));
                }
                Ok(Term::Ord(Box::new(self.elab_term(a, Sort::VF, scope)?)))
            }
            RTerm::Ac(a) => {
                if s != Sort::RF {
                    return sort_err(format!("(ac {})", self.show(a)), format!("is RF, expected {s}"));
                }
                Ok(Term::Ac(Box::new(self.elab_term(a, Sort::VF, scope)?)))
            }
            RTerm::Add(v) => Ok(Term::Add(
                v.iter().map(|x| self.elab_term(x, s, scope)).collect::<Result<_>>()?,
            )),
            RTerm::Mul(v) => {
                let parts: Vec<Term> = v.iter().map(|x| self.elab_term(x, s, scope)).collect::<Result<_>>()?;
                if s == Sort::ZZ && parts.iter().filter(|p| !matches!(p, Term::Int(..))).count() > 1 {
                    return sort_err(
                        Term::Mul(parts).to_string(),
                        "value-group multiplication needs all but one factor constant",
                    );
                }
                Ok(Term::Mul(parts))
            }
            RTerm::Sub(a, b) => Ok(Term::Sub(
                Box::new(self.elab_term(a, s, scope)?),
                Box::new(self.elab_term(b, s, scope)?),
            )),
            RTerm::Neg(a) => Ok(Term::Neg(Box::new(self.elab_term(a, s, scope)?))),
            RTerm::Pow(a, k) => {
                let inner = self.elab_term(a, s, scope)?;
                if s == Sort::ZZ {
                    return sort_err(format!("(^ {inner} {k})"), "powers are not allowed in ZZ");
                }
                Ok(Term::Pow(Box::new(inner), *k))
            }
        }
    }

    fn show(&self, t: &RTerm) -> String {
        match t {
            RTerm::Var(n) => n.clone(),
            RTerm::Int(k) => k.to_string(),
            RTerm::Pi => "pi".into(),
            _ => "...".into(),
        }
    }

    fn elab(&self, f: &RForm, scope: &mut Vec<(String, Sort)>) -> Result<Formula> {
        Ok(match f {
            RForm::True => Formula::True,
            RForm::False => Formula::False,
            RForm::Eq(a, b) => {
                let s = self
                    .synth(a, scope)
                    .or_else(|| self.synth(b, scope))
                    .unwrap_or(Sort::VF);
                Formula::Eq(self.elab_term(a, s, scope)?, self.elab_term(b, s, scope)?)
            }
            RForm::Cmp(c, a, b) => Formula::Cmp(
                *c,
                self.elab_term(a, Sort::ZZ, scope)?,
                self.elab_term(b, Sort::ZZ, scope)?,
            ),
            RForm::Cong(n, a, b) => Formula::Cong(
                *n,
                self.elab_term(a, Sort::ZZ, scope)?,
                self.elab_term(b, Sort::ZZ, scope)?,
            ),
            RForm::Not(a) => Formula::Not(Box::new(self.elab(a, scope)?)),
            RForm::And(v) => Formula::And(v.iter().map(|x| self.elab(x, scope)).collect::<Result<_>>()?),
            RForm::Or(v) => Formula::Or(v.iter().map(|x| self.elab(x, scope)).collect::<Result<_>>()?),
            RForm::Implies(a, b) => Formula::Implies(
                Box::new(self.elab(a, scope)?),
                Box::new(self.elab(b, scope)?),
            ),
            RForm::Quant(q, vars, hint, body) => {
                let k = scope.len();
                scope.extend(vars.iter().cloned());
                let b = self.elab(body, scope);
                scope.truncate(k);
                Formula::Quant(*q, vars.clone(), hint.clone(), Box::new(b?))
            }
        })
    }
}

/// Parses a formula.
pub fn parse(text: &str) -> Result<Formula> {
    let sx = read(text)?;
    let mut declared = HashMap::new();
    let body_sx = match &sx {
        Sx::List(items, pos) if matches!(items.first(), Some(Sx::Atom(h, _)) if h == "free") => {
            expect_arity("free", items.len() - 1, *pos)?;
            for (n, s) in binders(&items[1])? {
                declared.insert(n, s);
            }
            &items[2]
        }
        other => other,
    };
    let raw = formula(body_sx)?;
    let mut typer = Typer {
        free: declared,
        changed: true,
    };
    while typer.changed {
        typer.changed = false;
        typer.infer(&raw, &mut vec![])?;
    }
    typer.elab(&raw, &mut vec![])
}

/// Parses a single term of the given sort, with free variables of that sort.
pub fn parse_term(text: &str, sort: Sort) -> Result<Term> {
    let raw = term(&read(text)?)?;
    let mut typer = Typer {
        free: HashMap::new(),
        changed: true,
    };
    typer.push(&raw, sort, &[])?;
    typer.elab_term(&raw, sort, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_with_free_vf_variable() {
        let f = parse("(>= (ord x) 1)").unwrap();
        assert_eq!(f.free_vars(), vec![("x".to_string(), Sort::VF)]);
        assert!(matches!(f, Formula::Cmp(Cmp::Ge, _, _)));
    }

    #[test]
    fn quantified() {
        let f = parse("(exists (y VF) (= (* y y) x))").unwrap();
        assert_eq!(f.shape(), (1, 0, 0));
        assert_eq!(f.to_string(), "(exists (y VF) (= (* y y) x))");
    }

    #[test]
    fn arity_errors_are_syntax_errors() {
        assert!(matches!(parse("(ord)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(>= (ord) 1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(and (= x 1)"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn sort_errors() {
        assert!(matches!(parse("(= (ord x) (ac x))"), Err(Error::Sort { .. })));
        assert!(matches!(parse("(<= (* n m) 1)"), Err(Error::Sort { .. })));
        assert!(matches!(parse("(and (= (ac u) 1) (<= u 2))"), Err(Error::Sort { .. })));
    }

    #[test]
    fn inference_propagates_through_equalities() {
        let f = parse("(and (= x y) (= (ac y) u))").unwrap();
        let fv = f.free_vars();
        assert_eq!(
            fv,
            vec![
                ("x".to_string(), Sort::VF),
                ("y".to_string(), Sort::VF),
                ("u".to_string(), Sort::RF)
            ]
        );
    }

    #[test]
    fn declared_sorts_round_trip() {
        let f = parse("(free ((u RF) (v RF)) (= (* u v) 1))").unwrap();
        assert_eq!(f.shape(), (0, 2, 0));
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn hints_and_blocks() {
        let text = "(exists ((a VF) (b VF)) :hint neron-lift (and (= a b) (cong 2 (ord a) 0)))";
        let f = parse(text).unwrap();
        assert_eq!(f.to_string(), text);
    }
}
