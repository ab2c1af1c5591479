// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed applicative terms over K1 / K1^X, the combinators, bracket
//! abstraction and Kleene equality at bounded fuel.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::prog::{code, fst, input, num, numn, pair, q_s11, run, snd};
use crate::machine::{eval, OracleTable, Outcome};
use crate::nat::Nat;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Term {
    Elem(Nat),
    Var(String),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn elem(c: impl Into<Nat>) -> Term {
        Term::Elem(c.into())
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(s: Term, t: Term) -> Term {
        Term::App(Arc::new(s), Arc::new(t))
    }

    /// `head · a₀ · a₁ ⋯` (left-associated).
    pub fn apply_all(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Elem(_) => true,
            Term::Var(_) => false,
            Term::App(s, t) => s.is_closed() && t.is_closed(),
        }
    }

    pub fn occurs(&self, v: &str) -> bool {
        match self {
            Term::Elem(_) => false,
            Term::Var(w) => w == v,
            Term::App(s, t) => s.occurs(v) || t.occurs(v),
        }
    }

    pub fn subst(&self, v: &str, by: &Term) -> Term {
        match self {
            Term::Var(w) if w == v => by.clone(),
            Term::Elem(_) | Term::Var(_) => self.clone(),
            Term::App(s, t) => Term::app(s.subst(v, by), t.subst(v, by)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Elem(_) | Term::Var(_) => 1,
            Term::App(s, t) => 1 + s.size() + t.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Elem(c) => {
                if *c == k_code() {
                    write!(f, "K")
                } else if *c == s_code() {
                    write!(f, "S")
                } else if *c == i_code() {
                    write!(f, "I")
                } else {
                    write!(f, "#{c}")
                }
            }
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, t) => {
                write!(f, "{s} ")?;
                if matches!(**t, Term::App(..)) {
                    write!(f, "({t})")
                } else {
                    write!(f, "{t}")
                }
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("term is not closed: free variable `{0}`")]
    Open(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Which side of a comparison failed to produce a value.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    BothOutOfFuel,
    OneOutOfFuel(Side),
}

/// Bounded Kleene equality.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriVerdict {
    EqualDefined(Nat),
    DistinctDefined(Nat, Nat),
    Unknown(UnknownReason),
}

impl TriVerdict {
    pub fn from_outcomes(a: &Outcome, b: &Outcome) -> TriVerdict {
        match (a.value(), b.value()) {
            (Some(x), Some(y)) if x == y => TriVerdict::EqualDefined(x.clone()),
            (Some(x), Some(y)) => TriVerdict::DistinctDefined(x.clone(), y.clone()),
            (None, None) => TriVerdict::Unknown(UnknownReason::BothOutOfFuel),
            (None, Some(_)) => TriVerdict::Unknown(UnknownReason::OneOutOfFuel(Side::Left)),
            (Some(_), None) => TriVerdict::Unknown(UnknownReason::OneOutOfFuel(Side::Right)),
        }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, TriVerdict::Unknown(_))
    }

    /// Swaps the roles of the two sides.
    pub fn flipped(&self) -> TriVerdict {
        match self {
            TriVerdict::EqualDefined(v) => TriVerdict::EqualDefined(v.clone()),
            TriVerdict::DistinctDefined(a, b) => TriVerdict::DistinctDefined(b.clone(), a.clone()),
            TriVerdict::Unknown(UnknownReason::OneOutOfFuel(Side::Left)) => {
                TriVerdict::Unknown(UnknownReason::OneOutOfFuel(Side::Right))
            }
            TriVerdict::Unknown(UnknownReason::OneOutOfFuel(Side::Right)) => {
                TriVerdict::Unknown(UnknownReason::OneOutOfFuel(Side::Left))
            }
            v => v.clone(),
        }
    }
}

/// `k1(⟨a, b⟩) = a`.
pub fn k1_code() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| code(&fst(input()))).clone()
}

/// `K·a = s11(k1, a)`, so `K·a·b = a`.
pub fn k_code() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| code(&q_s11(numn(&k1_code()), input()))).clone()
}

/// `s2(⟨⟨a, b⟩, c⟩) = (a·c)·(b·c)`.
pub fn s2_code() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let a = fst(fst(input()));
        let b = snd(fst(input()));
        let c = snd(input());
        code(&run(run(a, c.clone()), run(b, c)))
    })
    .clone()
}

/// `s1(⟨a, b⟩) = s11(s2, ⟨a, b⟩)`.
pub fn s1_code() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| code(&q_s11(numn(&s2_code()), input()))).clone()
}

/// `S·a = s11(s1, a)`, `S·a·b = s11(s2, ⟨a, b⟩)`.
pub fn s_code() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| code(&q_s11(numn(&s1_code()), input()))).clone()
}

/// `I = S·K·K`, computed syntactically as `s11(s2, ⟨K, K⟩)`.
pub fn i_code() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| crate::machine::s11(&s2_code(), &Nat::pair(&k_code(), &k_code()))).clone()
}

/// Code that diverges on every input.
pub fn bot_code() -> Nat {
    code(&crate::machine::prog::bot())
}

/// `a · b` in K1^X.
pub fn apply(a: &Nat, b: &Nat, fuel: u64, oracles: &OracleTable) -> Outcome {
    eval(a, b, fuel, oracles)
}

/// `f · a₀ · a₁ ⋯` with one shared budget.
pub fn apply_chain(f: &Nat, args: &[Nat], fuel: u64, oracles: &OracleTable) -> Outcome {
    let mut cur = f.clone();
    let mut used = 0u64;
    for a in args {
        match eval(&cur, a, fuel - used, oracles) {
            Outcome::Defined { value, steps } => {
                used += steps;
                cur = value;
            }
            Outcome::OutOfFuel => return Outcome::OutOfFuel,
        }
    }
    Outcome::Defined { value: cur, steps: used }
}

/// Leftmost-innermost evaluation with a shared budget. Elements cost 0.
pub fn eval_term(t: &Term, fuel: u64, oracles: &OracleTable) -> Result<Outcome, TermError> {
    if let Some(v) = first_var(t) {
        return Err(TermError::Open(v));
    }
    Ok(eval_closed(t, fuel, oracles))
}

fn first_var(t: &Term) -> Option<String> {
    match t {
        Term::Elem(_) => None,
        Term::Var(v) => Some(v.clone()),
        Term::App(s, u) => first_var(s).or_else(|| first_var(u)),
    }
}

fn eval_closed(t: &Term, fuel: u64, oracles: &OracleTable) -> Outcome {
    match t {
        Term::Elem(c) => Outcome::Defined { value: c.clone(), steps: 0 },
        Term::Var(_) => unreachable!("closed term"),
        Term::App(s, u) => {
            let Outcome::Defined { value: f, steps: s1 } = eval_closed(s, fuel, oracles) else {
                return Outcome::OutOfFuel;
            };
            let Outcome::Defined { value: a, steps: s2 } = eval_closed(u, fuel - s1, oracles) else {
                return Outcome::OutOfFuel;
            };
            match eval(&f, &a, fuel - s1 - s2, oracles) {
                Outcome::Defined { value, steps } => Outcome::Defined { value, steps: s1 + s2 + steps },
                Outcome::OutOfFuel => Outcome::OutOfFuel,
            }
        }
    }
}

/// `λ*v.t`: `λ*v.v = I`, `λ*v.c = K c` for any other atom, and
/// `λ*v.(M N) = S (λ*v.M) (λ*v.N)`. The result is defined whenever its
/// free variables are instantiated, even if `t` is not.
pub fn bracket_abstract(t: &Term, v: &str) -> Term {
    match t {
        Term::Var(w) if w == v => Term::Elem(i_code()),
        Term::Elem(_) | Term::Var(_) => Term::app(Term::Elem(k_code()), t.clone()),
        Term::App(m, n) => Term::app(
            Term::app(Term::Elem(s_code()), bracket_abstract(m, v)),
            bracket_abstract(n, v),
        ),
    }
}

/// Abstracts `vars` right to left, so the result takes them in order.
pub fn bracket_abstract_all(t: &Term, vars: &[&str]) -> Term {
    vars.iter().rev().fold(t.clone(), |acc, v| bracket_abstract(&acc, v))
}

/// Compares `s` and `t`, each evaluated with its own budget of `fuel`.
pub fn kleene_eq_bounded(s: &Term, t: &Term, fuel: u64, oracles: &OracleTable) -> Result<TriVerdict, TermError> {
    let a = eval_term(s, fuel, oracles)?;
    let b = eval_term(t, fuel, oracles)?;
    Ok(TriVerdict::from_outcomes(&a, &b))
}

/// Parses `#n`, `K`, `S`, `I`, identifiers, juxtaposition and parentheses.
pub fn parse_term(src: &str) -> Result<Term, TermError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let t = p.sequence()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> TermError {
        TermError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn sequence(&mut self) -> Result<Term, TermError> {
        let mut acc: Option<Term> = None;
        loop {
            self.skip_ws();
            let Some(&c) = self.src.get(self.pos) else { break };
            if c == b')' {
                break;
            }
            let atom = self.atom()?;
            acc = Some(match acc {
                None => atom,
                Some(f) => Term::app(f, atom),
            });
        }
        acc.ok_or_else(|| self.err("expected a term"))
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        let c = self.src[self.pos];
        if c == b'(' {
            self.pos += 1;
            let t = self.sequence()?;
            self.skip_ws();
            if self.src.get(self.pos) != Some(&b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            return Ok(t);
        }
        if c == b'#' {
            self.pos += 1;
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            return Nat::parse_decimal(digits)
                .map(Term::Elem)
                .ok_or_else(|| TermError::Parse { pos: start, msg: "expected digits after `#`".into() });
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            return Ok(match word {
                "K" => Term::Elem(k_code()),
                "S" => Term::Elem(s_code()),
                "I" => Term::Elem(i_code()),
                _ => Term::var(word),
            });
        }
        Err(self.err("unexpected character"))
    }
}

/// Substitutes literal codes for every variable in `t`.
pub fn instantiate(t: &Term, env: &[(&str, Nat)]) -> Term {
    env.iter().fold(t.clone(), |acc, (v, c)| acc.subst(v, &Term::Elem(c.clone())))
}

/// Code of the constant program `Num(v)`.
pub fn const_code(v: u64) -> Nat {
    code(&num(v))
}

/// Code of the program returning `⟨a, b⟩`.
pub fn const_pair_code(a: u64, b: u64) -> Nat {
    code(&pair(num(a), num(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Nat {
        Nat::from_u64(v)
    }

    fn ev(src: &str) -> Outcome {
        eval_term(&parse_term(src).unwrap(), 100_000, &OracleTable::new()).unwrap()
    }

    #[test]
    fn combinator_examples() {
        assert_eq!(ev("K #3 #8").value(), Some(&n(3)));
        assert_eq!(ev("I #42").value(), Some(&n(42)));
        assert_eq!(ev("S K K #7").value(), Some(&n(7)));
        assert_eq!(ev("#5"), Outcome::Defined { value: n(5), steps: 0 });
    }

    #[test]
    fn undefined_application() {
        let t = Term::app(Term::Elem(bot_code()), Term::elem(0u64));
        assert_eq!(eval_term(&t, 1_000_000, &OracleTable::new()).unwrap(), Outcome::OutOfFuel);
    }

    #[test]
    fn open_terms_are_rejected() {
        let t = parse_term("K x").unwrap();
        assert_eq!(eval_term(&t, 10, &OracleTable::new()), Err(TermError::Open("x".into())));
    }

    #[test]
    fn abstraction_examples() {
        let o = OracleTable::new();
        let id = bracket_abstract(&Term::var("x"), "x");
        let r = eval_term(&Term::app(id, Term::elem(9u64)), 10_000, &o).unwrap();
        assert_eq!(r.value(), Some(&n(9)));
        let k5 = bracket_abstract(&Term::elem(5u64), "x");
        let r = eval_term(&Term::app(k5, Term::elem(123u64)), 10_000, &o).unwrap();
        assert_eq!(r.value(), Some(&n(5)));
        let xx = bracket_abstract(&parse_term("x x").unwrap(), "x");
        let lhs = Term::app(xx, Term::Elem(i_code()));
        let rhs = parse_term("I I").unwrap();
        let v = kleene_eq_bounded(&lhs, &rhs, 100_000, &o).unwrap();
        assert_eq!(v, TriVerdict::EqualDefined(i_code()));
    }

    #[test]
    fn kleene_examples() {
        let o = OracleTable::new();
        let v = kleene_eq_bounded(&parse_term("K #1 #2").unwrap(), &parse_term("#1").unwrap(), 1000, &o);
        assert_eq!(v.unwrap(), TriVerdict::EqualDefined(n(1)));
        let v = kleene_eq_bounded(&parse_term("#1").unwrap(), &parse_term("#2").unwrap(), 1000, &o);
        assert_eq!(v.unwrap(), TriVerdict::DistinctDefined(n(1), n(2)));
        let b = Term::app(Term::Elem(bot_code()), Term::elem(0u64));
        let v = kleene_eq_bounded(&b, &b, 1000, &o);
        assert_eq!(v.unwrap(), TriVerdict::Unknown(UnknownReason::BothOutOfFuel));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(parse_term("K (S"), Err(TermError::Parse { pos: 4, .. })));
        assert!(matches!(parse_term("K $"), Err(TermError::Parse { pos: 2, .. })));
        assert!(matches!(parse_term("#"), Err(TermError::Parse { pos: 1, .. })));
    }

    #[test]
    fn display_round_trips() {
        for src in ["S K K #7", "K (S #1) #2", "x (y z)"] {
            let t = parse_term(src).unwrap();
            assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
    }
}
