use std::collections::BTreeMap;
use std::fmt;

/// The three sorts: valued field, residue field, value group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    VF,
    RF,
    ZZ,
}

impl Sort {
    pub fn parse(s: &str) -> Option<Sort> {
        match s {
            "VF" => Some(Sort::VF),
            "RF" => Some(Sort::RF),
            "ZZ" => Some(Sort::ZZ),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::VF => "VF",
            Sort::RF => "RF",
            Sort::ZZ => "ZZ",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String, Sort),
    Int(i64, Sort),
    /// The uniformizer.
    Pi,
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    /// In `ZZ` all but one factor are constants.
    Mul(Vec<Term>),
    Pow(Box<Term>, u32),
    Ord(Box<Term>),
    Ac(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(name.into(), sort)
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) | Term::Int(_, s) => *s,
            Term::Pi => Sort::VF,
            Term::Ord(_) => Sort::ZZ,
            Term::Ac(_) => Sort::RF,
            Term::Add(v) | Term::Mul(v) => v.first().map_or(Sort::VF, Term::sort),
            Term::Sub(a, _) | Term::Neg(a) | Term::Pow(a, _) => a.sort(),
        }
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            Term::Var(n, s) => {
                out.insert(n.clone(), *s);
            }
            Term::Int(..) | Term::Pi => {}
            Term::Add(v) | Term::Mul(v) => v.iter().for_each(|t| t.collect_vars(out)),
            Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Neg(a) | Term::Pow(a, _) | Term::Ord(a) | Term::Ac(a) => a.collect_vars(out),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        let mut m = BTreeMap::new();
        self.collect_vars(&mut m);
        m.contains_key(name)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(..) | Term::Int(..) | Term::Pi => 1,
            Term::Add(v) | Term::Mul(v) => 1 + v.iter().map(Term::size).sum::<usize>(),
            Term::Sub(a, b) => 1 + a.size() + b.size(),
            Term::Neg(a) | Term::Pow(a, _) | Term::Ord(a) | Term::Ac(a) => 1 + a.size(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Lt,
    Ge,
    Gt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Cmp::Le => a <= b,
            Cmp::Lt => a < b,
            Cmp::Ge => a >= b,
            Cmp::Gt => a > b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

/// Names a witness generator consulted before generic search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessHint(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Cmp(Cmp, Term, Term),
    /// `a = b mod n`.
    Cong(u64, Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quant, Vec<(String, Sort)>, Option<WitnessHint>, Box<Formula>),
}

impl Formula {
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        parts.retain(|p| *p != Formula::True);
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().expect("one"),
            _ => Formula::And(parts),
        }
    }

    pub fn or(mut parts: Vec<Formula>) -> Formula {
        parts.retain(|p| *p != Formula::False);
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().expect("one"),
            _ => Formula::Or(parts),
        }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(vars: Vec<(String, Sort)>, hint: Option<&str>, body: Formula) -> Formula {
        Formula::Quant(Quant::Exists, vars, hint.map(|h| WitnessHint(h.into())), Box::new(body))
    }

    pub fn forall(vars: Vec<(String, Sort)>, body: Formula) -> Formula {
        Formula::Quant(Quant::Forall, vars, None, Box::new(body))
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, Sort>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut BTreeMap<String, Sort>| {
            let mut m = BTreeMap::new();
            t.collect_vars(&mut m);
            for (k, s) in m {
                if !bound.contains(&k) {
                    out.insert(k, s);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Cmp(_, a, b) | Formula::Cong(_, a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(v) | Formula::Or(v) => v.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, vars, _, body) => {
                let k = bound.len();
                bound.extend(vars.iter().map(|(n, _)| n.clone()));
                body.collect_free(bound, out);
                bound.truncate(k);
            }
        }
    }

    /// Free variables ordered by sort (`VF`, then `RF`, then `ZZ`) and name.
    pub fn free_vars(&self) -> Vec<(String, Sort)> {
        let mut m = BTreeMap::new();
        self.collect_free(&mut vec![], &mut m);
        let mut v: Vec<(String, Sort)> = m.into_iter().collect();
        v.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        v
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.free_vars().iter().any(|(n, _)| n == name)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// `(n, m, r)`: counts of free `VF`, `RF` and `ZZ` variables.
    pub fn shape(&self) -> (usize, usize, usize) {
        let fv = self.free_vars();
        let count = |s| fv.iter().filter(|(_, t)| *t == s).count();
        (count(Sort::VF), count(Sort::RF), count(Sort::ZZ))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, v: &[&Term]| -> fmt::Result {
            write!(f, "({op}")?;
            for t in v {
                write!(f, " {t}")?;
            }
            write!(f, ")")
        };
        match self {
            Term::Var(n, _) => write!(f, "{n}"),
            Term::Int(k, _) => write!(f, "{k}"),
            Term::Pi => write!(f, "pi"),
            Term::Add(v) => list(f, "+", &v.iter().collect::<Vec<_>>()),
            Term::Mul(v) => list(f, "*", &v.iter().collect::<Vec<_>>()),
            Term::Sub(a, b) => list(f, "-", &[a, b]),
            Term::Neg(a) => list(f, "-", &[a]),
            Term::Pow(a, k) => write!(f, "(^ {a} {k})"),
            Term::Ord(a) => list(f, "ord", &[a]),
            Term::Ac(a) => list(f, "ac", &[a]),
        }
    }
}

fn write_binders(f: &mut fmt::Formatter<'_>, vars: &[(String, Sort)]) -> fmt::Result {
    if let [(n, s)] = vars {
        return write!(f, "({n} {s})");
    }
    write!(f, "(")?;
    for (i, (n, s)) in vars.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "({n} {s})")?;
    }
    write!(f, ")")
}

impl Formula {
    fn write_body(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Cmp(c, a, b) => write!(f, "({} {a} {b})", c.symbol()),
            Formula::Cong(n, a, b) => write!(f, "(cong {n} {a} {b})"),
            Formula::Not(a) => {
                write!(f, "(not ")?;
                a.write_body(f)?;
                write!(f, ")")
            }
            Formula::And(v) | Formula::Or(v) => {
                let op = if matches!(self, Formula::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for x in v {
                    write!(f, " ")?;
                    x.write_body(f)?;
                }
                write!(f, ")")
            }
            Formula::Implies(a, b) => {
                write!(f, "(implies ")?;
                a.write_body(f)?;
                write!(f, " ")?;
                b.write_body(f)?;
                write!(f, ")")
            }
            Formula::Quant(q, vars, hint, body) => {
                let kw = match q {
                    Quant::Exists => "exists",
                    Quant::Forall => "forall",
                };
                write!(f, "({kw} ")?;
                write_binders(f, vars)?;
                if let Some(WitnessHint(h)) = hint {
                    write!(f, " :hint {h}")?;
                }
                write!(f, " ")?;
                body.write_body(f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    /// Free variables of sort `RF` or `ZZ` are declared in a `(free ...)`
    /// header so that printing and parsing round-trip.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let decl: Vec<(String, Sort)> = self
            .free_vars()
            .into_iter()
            .filter(|(_, s)| *s != Sort::VF)
            .collect();
        if decl.is_empty() {
            return self.write_body(f);
        }
        write!(f, "(free ")?;
        let all: Vec<(String, Sort)> = decl;
        write!(f, "(")?;
        for (i, (n, s)) in all.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({n} {s})")?;
        }
        write!(f, ") ")?;
        self.write_body(f)?;
        write!(f, ")")
    }
}
