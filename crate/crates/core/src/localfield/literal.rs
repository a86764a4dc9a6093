//! Literal syntax for base-field elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | 'pi' | 't' | 'z' | '(' expr ')'
//! ```
//!
//! `pi` is the fixed uniformizer (`p` for `Q_p`, `t` for `F_q((t))`; `t` is
//! accepted as a synonym in both). In the Laurent backend integers denote
//! prime-field constants and `z` the fixed multiplicative generator of `F_q`.
//! Literals are exact rational expressions; the conversion to a field element
//! happens once, at the working precision.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::base::{Backend, FElem, LocalField};
use super::residue::Fq;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(text.parse().unwrap())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos: i,
                msg: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

type Series = BTreeMap<i64, u32>;

#[derive(Clone, Debug)]
enum Exact {
    Rat(BigRational),
    /// numerator and denominator Laurent polynomials
    Laur(Series, Series),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    field: &'a LocalField,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn laurent(&self) -> bool {
        matches!(self.field.spec().backend, Backend::Laurent { .. })
    }

    fn fq(&self) -> &Fq {
        self.field.residue_field()
    }

    fn constant(&self, n: &BigInt) -> Exact {
        if self.laurent() {
            let p = BigInt::from(self.fq().p());
            let c = ((n % &p + &p) % &p).try_into().unwrap_or(0u32);
            mono(0, c)
        } else {
            Exact::Rat(BigRational::from_integer(n.clone()))
        }
    }

    fn uniformizer(&self) -> Exact {
        if self.laurent() {
            mono(1, 1)
        } else {
            Exact::Rat(BigRational::from_integer(BigInt::from(self.fq().p())))
        }
    }

    fn expr(&mut self) -> Result<Exact> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' {
                self.add(&acc, &rhs)
            } else {
                let neg = self.neg(&rhs);
                self.add(&acc, &neg)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Exact> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == '*' {
                self.mul(&acc, &rhs)
            } else {
                let inv = self.inv(&rhs)?;
                self.mul(&acc, &inv)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Exact> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            let x = self.unary()?;
            return Ok(self.neg(&x));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Exact> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let negative = if let Some(Tok::Op('-')) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let Some(Tok::Num(k)) = self.peek().cloned() else {
                return self.err("expected integer exponent");
            };
            self.pos += 1;
            let k: i64 = k.try_into().map_err(|_| Error::Syntax {
                pos: self.here(),
                msg: "exponent too large".into(),
            })?;
            let mut acc = self.one();
            for _ in 0..k {
                acc = self.mul(&acc, &base);
            }
            return if negative { self.inv(&acc) } else { Ok(acc) };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Exact> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.constant(&n))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "pi" | "t" => Ok(self.uniformizer()),
                    "p" if !self.laurent() => Ok(self.uniformizer()),
                    "z" if self.laurent() => Ok(mono(0, self.fq().generator())),
                    _ => {
                        self.pos -= 1;
                        self.err(format!("unknown symbol '{id}'"))
                    }
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let x = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(x)
            }
            _ => self.err("expected a number, 'pi' or '('"),
        }
    }

    fn one(&self) -> Exact {
        self.constant(&BigInt::one())
    }

    fn padd(&self, x: &Series, y: &Series) -> Series {
        let mut out = x.clone();
        for (&k, &c) in y {
            let e = out.entry(k).or_insert(0);
            *e = self.fq().add(*e, c);
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn pmul(&self, x: &Series, y: &Series) -> Series {
        let mut out = Series::new();
        for (&i, &c) in x {
            for (&j, &d) in y {
                let e = out.entry(i + j).or_insert(0);
                *e = self.fq().add(*e, self.fq().mul(c, d));
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn add(&self, a: &Exact, b: &Exact) -> Exact {
        match (a, b) {
            (Exact::Rat(x), Exact::Rat(y)) => Exact::Rat(x + y),
            (Exact::Laur(xn, xd), Exact::Laur(yn, yd)) => {
                if xd == yd {
                    return Exact::Laur(self.padd(xn, yn), xd.clone());
                }
                let num = self.padd(&self.pmul(xn, yd), &self.pmul(yn, xd));
                Exact::Laur(num, self.pmul(xd, yd))
            }
            _ => unreachable!(),
        }
    }

    fn neg(&self, a: &Exact) -> Exact {
        match a {
            Exact::Rat(x) => Exact::Rat(-x),
            Exact::Laur(n, d) => Exact::Laur(
                n.iter().map(|(&k, &c)| (k, self.fq().neg(c))).collect(),
                d.clone(),
            ),
        }
    }

    fn mul(&self, a: &Exact, b: &Exact) -> Exact {
        match (a, b) {
            (Exact::Rat(x), Exact::Rat(y)) => Exact::Rat(x * y),
            (Exact::Laur(xn, xd), Exact::Laur(yn, yd)) => {
                Exact::Laur(self.pmul(xn, yn), self.pmul(xd, yd))
            }
            _ => unreachable!(),
        }
    }

    fn inv(&self, a: &Exact) -> Result<Exact> {
        match a {
            Exact::Rat(x) => {
                if x.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Exact::Rat(x.recip()))
            }
            Exact::Laur(n, d) => {
                if n.is_empty() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Exact::Laur(d.clone(), n.clone()))
            }
        }
    }
}

fn mono(k: i64, c: u32) -> Exact {
    let mut m = Series::new();
    if c != 0 {
        m.insert(k, c);
    }
    Exact::Laur(m, Series::from([(0, 1)]))
}

fn series_value(field: &LocalField, m: &Series) -> FElem {
    let mut acc = field.zero();
    for (&k, &c) in m {
        let term = field.mul(&field.lift_residue(c), &field.uniformizer_pow(k));
        acc = field.add(&acc, &term);
    }
    acc
}

/// Parses a base-field literal at the field's working precision.
pub fn parse_felem(field: &LocalField, text: &str) -> Result<FElem> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty literal".into(),
        });
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        field,
        end: text.len(),
    };
    let value = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.err("trailing input");
    }
    Ok(match value {
        Exact::Rat(r) => field.from_ratio(r.numer(), r.denom())?,
        Exact::Laur(n, d) => field.div(&series_value(field, &n), &series_value(field, &d))?,
    })
}

/// Prime-field elements print as integers, others as polynomials in `z`.
pub fn format_fq(k: &Fq, c: u32) -> String {
    if let Some(n) = k.to_prime_field(c) {
        return n.to_string();
    }
    // express c in the basis of powers of the generator's minimal polynomial
    // root: the encoding digits are exactly those coefficients.
    let p = k.p();
    let mut terms = vec![];
    let mut x = c;
    let mut i = 0;
    while x > 0 {
        let d = x % p;
        if d != 0 {
            terms.push(match (i, d) {
                (0, _) => d.to_string(),
                (1, 1) => "z".to_string(),
                (1, _) => format!("{d}*z"),
                (_, 1) => format!("z^{i}"),
                _ => format!("{d}*z^{i}"),
            });
        }
        x /= p;
        i += 1;
    }
    format!("({})", terms.join(" + "))
}
