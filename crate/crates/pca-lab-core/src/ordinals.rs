// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Cantor-normal-form notations below ε₀, the bookkeeping functions `F` and
//! `G`, canonical fundamental sequences, and the Kleene–Brouwer order on
//! finite trees.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::machine::kit::{str_code, str_decode};
use crate::machine::{OracleFn, OracleTable};
use crate::nat::Nat;

/// `ω^{e₀}·c₀ + ⋯ + ω^{e_k}·c_k` with `e₀ > ⋯ > e_k` and every `cᵢ ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct OrdNotation {
    terms: Vec<(OrdNotation, u64)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Kind {
    Zero,
    Succ(OrdNotation),
    Limit,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdError {
    #[error("fundamental sequences exist only for limit notations, got {0}")]
    NotLimit(OrdNotation),
    #[error("ordinal literal error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl OrdNotation {
    pub fn zero() -> Self {
        OrdNotation { terms: Vec::new() }
    }

    pub fn from_u64(k: u64) -> Self {
        if k == 0 {
            Self::zero()
        } else {
            OrdNotation { terms: vec![(Self::zero(), k)] }
        }
    }

    pub fn one() -> Self {
        Self::from_u64(1)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: OrdNotation) -> Self {
        OrdNotation { terms: vec![(e, 1)] }
    }

    /// `ω^e · c` (zero when `c = 0`).
    pub fn monomial(e: OrdNotation, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            OrdNotation { terms: vec![(e, c)] }
        }
    }

    /// Builds from terms, checking the normal-form invariant.
    pub fn from_terms(terms: Vec<(OrdNotation, u64)>) -> Option<Self> {
        if terms.iter().any(|(_, c)| *c == 0) {
            return None;
        }
        if terms.windows(2).any(|w| w[0].0 <= w[1].0) {
            return None;
        }
        Some(OrdNotation { terms })
    }

    pub fn terms(&self) -> &[(OrdNotation, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    pub fn kind(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some((e, _)) if e.is_zero() => Kind::Succ(self.pred_unchecked()),
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.kind(), Kind::Limit)
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.kind(), Kind::Succ(_))
    }

    fn pred_unchecked(&self) -> OrdNotation {
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor");
        last.1 -= 1;
        if last.1 == 0 {
            terms.pop();
        }
        OrdNotation { terms }
    }

    pub fn succ(&self) -> OrdNotation {
        self.add(&Self::one())
    }

    /// `α = λ + k` with `λ` zero or a limit and `k` finite.
    pub fn split_finite(&self) -> (OrdNotation, u64) {
        match self.terms.last() {
            Some((e, c)) if e.is_zero() => {
                let mut terms = self.terms.clone();
                terms.pop();
                (OrdNotation { terms }, *c)
            }
            _ => (self.clone(), 0),
        }
    }

    /// CNF addition; lower terms of `self` are absorbed by `other`'s head.
    pub fn add(&self, other: &OrdNotation) -> OrdNotation {
        let Some((e0, c0)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(OrdNotation, u64)> = Vec::new();
        for (e, c) in &self.terms {
            match e.cmp(e0) {
                Ordering::Greater => terms.push((e.clone(), *c)),
                Ordering::Equal => {
                    terms.push((e.clone(), c + c0));
                    terms.extend(other.terms[1..].iter().cloned());
                    return OrdNotation { terms };
                }
                Ordering::Less => break,
            }
        }
        terms.extend(other.terms.iter().cloned());
        OrdNotation { terms }
    }

    /// `α · k` for finite `k`.
    pub fn mul_nat(&self, k: u64) -> OrdNotation {
        if k == 0 || self.is_zero() {
            return Self::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].1 *= k;
        OrdNotation { terms }
    }

    /// `1 + α`.
    pub fn one_plus(&self) -> OrdNotation {
        Self::one().add(self)
    }

    /// `ω · α`, computed termwise as `ω^{1+e}·c`.
    pub fn omega_times(&self) -> OrdNotation {
        OrdNotation { terms: self.terms.iter().map(|(e, c)| (e.one_plus(), *c)).collect() }
    }

    /// Inverse of [`OrdNotation::omega_times`] on zero and limits.
    pub fn div_omega(&self) -> Option<OrdNotation> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let e2 = match e.as_finite() {
                Some(0) => return None,
                Some(k) => OrdNotation::from_u64(k - 1),
                None => e.clone(),
            };
            terms.push((e2, *c));
        }
        Some(OrdNotation { terms })
    }

    /// `α[n]` for limit `α`: `(γ+ω^{β+1})[n] = γ+ω^β·(n+1)` and
    /// `(γ+ω^λ)[n] = γ+ω^{λ[n]}`.
    pub fn fund_seq(&self, n: u64) -> Result<OrdNotation, OrdError> {
        if !self.is_limit() {
            return Err(OrdError::NotLimit(self.clone()));
        }
        let mut terms = self.terms.clone();
        let (e, c) = terms.pop().expect("limit is nonzero");
        if c > 1 {
            terms.push((e.clone(), c - 1));
        }
        match e.kind() {
            Kind::Zero => unreachable!("limit has a nonzero last exponent"),
            Kind::Succ(p) => terms.push((p, n + 1)),
            Kind::Limit => terms.push((e.fund_seq(n)?, 1)),
        }
        Ok(OrdNotation { terms })
    }

    pub fn parity(&self) -> Parity {
        if self.split_finite().1 % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `G(λ + k) = ω·(λ + ⌊k/2⌋) + (k mod 2)`.
    pub fn g(&self) -> OrdNotation {
        let (lam, k) = self.split_finite();
        lam.add(&OrdNotation::from_u64(k / 2)).omega_times().add(&OrdNotation::from_u64(k % 2))
    }

    /// `F(0) = 0`, `F(λ + k) = F(λ) + 1` for `k ≥ 1`, and for a limit
    /// `λ = ω·(δ' + m)` with `δ'` zero or a limit, `F(λ) = δ' + 2m`.
    pub fn f(&self) -> OrdNotation {
        let (lam, k) = self.split_finite();
        let f_lam = if lam.is_zero() {
            OrdNotation::zero()
        } else {
            let delta = lam.div_omega().expect("limit notations are divisible by omega");
            let (dp, m) = delta.split_finite();
            dp.add(&OrdNotation::from_u64(2 * m))
        };
        if k == 0 {
            f_lam
        } else {
            f_lam.succ()
        }
    }

    /// Height of the notation tree (0 for finite ordinals).
    pub fn height(&self) -> usize {
        self.terms.first().map(|(e, _)| if e.is_zero() { 0 } else { 1 + e.height() }).unwrap_or(0)
    }
}

impl PartialOrd for OrdNotation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdNotation {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((e1, c1), (e2, c2)) in self.terms.iter().zip(&other.terms) {
            match e1.cmp(e2).then(c1.cmp(c2)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

pub fn ord_kind(a: &OrdNotation) -> Kind {
    a.kind()
}

pub fn fund_seq(a: &OrdNotation, n: u64) -> Result<OrdNotation, OrdError> {
    a.fund_seq(n)
}

pub fn ord_add(a: &OrdNotation, b: &OrdNotation) -> OrdNotation {
    a.add(b)
}

pub fn ord_cmp(a: &OrdNotation, b: &OrdNotation) -> Ordering {
    a.cmp(b)
}

pub fn parity(a: &OrdNotation) -> Parity {
    a.parity()
}

#[allow(non_snake_case)]
pub fn F(a: &OrdNotation) -> OrdNotation {
    a.f()
}

#[allow(non_snake_case)]
pub fn G(a: &OrdNotation) -> OrdNotation {
    a.g()
}

impl fmt::Display for OrdNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match e.as_finite() {
                Some(0) => {
                    write!(f, "{c}")?;
                    continue;
                }
                Some(1) => write!(f, "w")?,
                Some(k) => write!(f, "w^{k}")?,
                None if e.terms.len() == 1 && e.terms[0].1 == 1 && e.terms[0].0.as_finite() == Some(1) => {
                    write!(f, "w^w")?
                }
                None => write!(f, "w^({e})")?,
            }
            if *c > 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OrdNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for OrdNotation {
    type Err = OrdError;

    /// Grammar: `sum := term ('+' term)*`, `term := primary ('*' nat)?`,
    /// `primary := nat | w ('^' primary)? | '(' sum ')'`. `omega` and `ω`
    /// are accepted for `w`. Non-normal sums are normalized by CNF addition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = OrdParser { src: s.as_bytes(), pos: 0 };
        let v = p.sum()?;
        p.ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected input"));
        }
        Ok(v)
    }
}

struct OrdParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl OrdParser<'_> {
    fn err(&self, msg: &str) -> OrdError {
        OrdError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<OrdNotation, OrdError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<OrdNotation, OrdError> {
        let base = self.primary()?;
        if self.eat(b'*') {
            let k = self.nat()?;
            return Ok(base.mul_nat(k));
        }
        Ok(base)
    }

    fn nat(&mut self) -> Result<u64, OrdError> {
        self.ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| OrdError::Parse { pos: start, msg: "number too large".into() })
    }

    fn omega_word(&mut self) -> bool {
        self.ws();
        let rest = &self.src[self.pos..];
        for w in [&b"omega"[..], "ω".as_bytes(), b"w"] {
            if rest.starts_with(w) {
                self.pos += w.len();
                return true;
            }
        }
        false
    }

    fn primary(&mut self) -> Result<OrdNotation, OrdError> {
        if self.eat(b'(') {
            let v = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(v);
        }
        if self.omega_word() {
            if self.eat(b'^') {
                let e = self.primary()?;
                return Ok(OrdNotation::omega_pow(e));
            }
            return Ok(OrdNotation::omega());
        }
        self.ws();
        if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            return Ok(OrdNotation::from_u64(self.nat()?));
        }
        Err(self.err("expected `w`, a number or `(`"))
    }
}

impl Serialize for OrdNotation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrdNotation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `ord_code(0) = 0`; otherwise the string code of
/// `[pair2(ord_code(e₀), c₀−1), …]`.
pub fn ord_code(a: &OrdNotation) -> Nat {
    let elems: Vec<Nat> = a.terms.iter().map(|(e, c)| Nat::pair(&ord_code(e), &Nat::from_u64(c - 1))).collect();
    str_code(&elems)
}

/// Inverse of [`ord_code`]; `None` for naturals that code no normal form.
pub fn ord_decode(c: &Nat) -> Option<OrdNotation> {
    ord_decode_depth(c, 0)
}

const DECODE_DEPTH_CAP: usize = 64;

fn ord_decode_depth(c: &Nat, depth: usize) -> Option<OrdNotation> {
    if depth > DECODE_DEPTH_CAP {
        return None;
    }
    let mut terms = Vec::new();
    for el in str_decode(c) {
        let (e, k) = el.unpair();
        let k = k.as_u64()?.checked_add(1)?;
        terms.push((ord_decode_depth(&e, depth + 1)?, k));
    }
    OrdNotation::from_terms(terms)
}

/// Stable oracle ids for the notation kernel.
pub mod prim {
    /// `0` zero, `1` successor, `2` limit.
    pub const KIND: u64 = 32;
    pub const PRED: u64 = 33;
    /// `⟨a, n⟩ ↦ a[n]`
    pub const FUND: u64 = 34;
    /// `0` even, `1` odd.
    pub const PARITY: u64 = 35;
    pub const SUCC: u64 = 36;
    /// `⟨a, b⟩ ↦ 1` if `a < b`, else `0`.
    pub const LT: u64 = 37;
    pub const G: u64 = 38;
    pub const F: u64 = 39;
    /// `a ↦ ⟨λ, k⟩` where `a = λ + k`.
    pub const DECOMP: u64 = 40;
}

fn ord_fn(f: impl Fn(&Nat) -> Option<Nat> + Send + Sync + 'static) -> OracleFn {
    Arc::new(f)
}

/// The notation kernel as oracle primitives over `ord_code` values.
/// Every entry returns `None` (divergence) on naturals coding no notation.
pub fn ordinal_oracles() -> OracleTable {
    let dec = ord_decode;
    OracleTable::new()
        .with(
            prim::KIND,
            "ord_kind",
            ord_fn(move |c| {
                Some(Nat::from_u64(match dec(c)?.kind() {
                    Kind::Zero => 0,
                    Kind::Succ(_) => 1,
                    Kind::Limit => 2,
                }))
            }),
        )
        .with(
            prim::PRED,
            "ord_pred",
            ord_fn(move |c| match dec(c)?.kind() {
                Kind::Succ(p) => Some(ord_code(&p)),
                _ => None,
            }),
        )
        .with(
            prim::FUND,
            "fund_seq",
            ord_fn(move |x| {
                let (a, n) = x.unpair();
                Some(ord_code(&dec(&a)?.fund_seq(n.as_u64()?).ok()?))
            }),
        )
        .with(
            prim::PARITY,
            "parity",
            ord_fn(move |c| Some(Nat::from_u64((dec(c)?.parity() == Parity::Odd) as u64))),
        )
        .with(prim::SUCC, "ord_succ", ord_fn(move |c| Some(ord_code(&dec(c)?.succ()))))
        .with(
            prim::LT,
            "ord_lt",
            ord_fn(move |x| {
                let (a, b) = x.unpair();
                Some(Nat::from_u64((dec(&a)? < dec(&b)?) as u64))
            }),
        )
        .with(prim::G, "G", ord_fn(move |c| Some(ord_code(&dec(c)?.g()))))
        .with(prim::F, "F", ord_fn(move |c| Some(ord_code(&dec(c)?.f()))))
        .with(
            prim::DECOMP,
            "split_finite",
            ord_fn(move |c| {
                let (lam, k) = dec(c)?.split_finite();
                Some(Nat::pair(&ord_code(&lam), &Nat::from_u64(k)))
            }),
        )
}

/// All `ω^{d-1}·a_{d-1} + ⋯ + a₀` with `a_i ≤ max_coef`, plus `ω^d`,
/// in increasing order.
pub fn enumerate_polynomials(d: u32, max_coef: u64) -> Vec<OrdNotation> {
    let mut out = Vec::new();
    let base = max_coef + 1;
    for idx in 0..base.pow(d) {
        let mut terms = Vec::new();
        let mut rest = idx;
        let mut digits = Vec::new();
        for _ in 0..d {
            digits.push(rest % base);
            rest /= base;
        }
        for (exp, c) in digits.iter().enumerate().rev() {
            if *c > 0 {
                terms.push((OrdNotation::from_u64(exp as u64), *c));
            }
        }
        out.push(OrdNotation { terms });
    }
    out.push(OrdNotation::omega_pow(OrdNotation::from_u64(d as u64)));
    out.sort();
    out
}

/// `τ <_KB σ`: `τ` properly extends `σ`, or `τ` is to the left of `σ`.
pub fn kb_less<T: Ord>(tau: &[T], sigma: &[T]) -> bool {
    for (a, b) in tau.iter().zip(sigma) {
        match a.cmp(b) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    tau.len() > sigma.len()
}

/// Total order induced by `<_KB`.
pub fn kb_cmp<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    if kb_less(a, b) {
        Ordering::Less
    } else if kb_less(b, a) {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// A finite set of strings closed under initial segments.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct FiniteTree {
    nodes: BTreeSet<Vec<u64>>,
}

impl FiniteTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Downward closure of `strings`.
    pub fn closure<I: IntoIterator<Item = Vec<u64>>>(strings: I) -> Self {
        let mut nodes = BTreeSet::new();
        for s in strings {
            for k in 0..=s.len() {
                nodes.insert(s[..k].to_vec());
            }
        }
        FiniteTree { nodes }
    }

    /// `None` unless `nodes` is closed under initial segments.
    pub fn from_nodes(nodes: BTreeSet<Vec<u64>>) -> Option<Self> {
        let closed = nodes.iter().all(|s| s.is_empty() || nodes.contains(&s[..s.len() - 1]));
        closed.then_some(FiniteTree { nodes })
    }

    pub fn contains(&self, s: &[u64]) -> bool {
        self.nodes.contains(s)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.nodes.iter()
    }

    pub fn max_len(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KbRank {
    pub total: usize,
    pub rank_of: BTreeMap<Vec<u64>, usize>,
}

/// Position of every node in the `<_KB` order; `ε` is the maximum.
pub fn kb_rank(t: &FiniteTree) -> KbRank {
    let mut nodes: Vec<&Vec<u64>> = t.nodes.iter().collect();
    nodes.sort_by(|a, b| kb_cmp(a, b));
    let rank_of = nodes.iter().enumerate().map(|(i, s)| ((*s).clone(), i)).collect();
    KbRank { total: nodes.len(), rank_of }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> OrdNotation {
        s.parse().unwrap()
    }

    #[test]
    fn kinds_and_fundamental_sequences() {
        assert_eq!(o("w").kind(), Kind::Limit);
        assert_eq!(o("w").fund_seq(3).unwrap(), o("4"));
        assert_eq!(o("w^2").fund_seq(2).unwrap(), o("w*3"));
        assert_eq!(o("w^w").fund_seq(2).unwrap(), o("w^3"));
        assert_eq!(o("w*2 + 1").kind(), Kind::Succ(o("w*2")));
        assert!(o("5").fund_seq(0).is_err());
    }

    #[test]
    fn addition_and_comparison() {
        assert_eq!(o("w + 1").add(&o("w")), o("w*2"));
        assert_eq!(o("w^2").cmp(&o("w*5")), Ordering::Greater);
        assert_eq!(o("3 + w"), o("w"));
        assert_eq!(o("w^2*3 + w*1 + 4").to_string(), "w^2*3 + w + 4");
    }

    #[test]
    fn parity_examples() {
        assert_eq!(o("0").parity(), Parity::Even);
        assert_eq!(o("w + 3").parity(), Parity::Odd);
        assert_eq!(o("w^2").parity(), Parity::Even);
    }

    #[test]
    fn g_examples() {
        assert_eq!(o("2").g(), o("w"));
        assert_eq!(o("4").g(), o("w*2"));
        assert_eq!(o("1").g(), o("1"));
        assert_eq!(o("3").g(), o("w + 1"));
        assert_eq!(o("w").g(), o("w^2"));
    }

    #[test]
    fn one_plus_f_table() {
        assert_eq!(o("1").f().one_plus(), o("2"));
        assert_eq!(o("w").f().one_plus(), o("3"));
        for k in 1..=5u64 {
            let wk = OrdNotation::monomial(OrdNotation::one(), k);
            assert_eq!(wk.f(), o(&(2 * k).to_string()));
            assert_eq!(wk.f().one_plus(), OrdNotation::from_u64(2 * k + 1));
        }
    }

    #[test]
    fn ord_code_examples() {
        assert_eq!(ord_code(&o("0")), 0u64);
        assert_eq!(ord_code(&o("1")), 1u64);
        assert_eq!(ord_code(&o("2")), 6u64);
        assert_eq!(ord_code(&o("w")), 3u64);
        for a in enumerate_polynomials(3, 3) {
            assert_eq!(ord_decode(&ord_code(&a)), Some(a));
        }
    }

    #[test]
    fn literal_errors() {
        assert!(matches!("w^".parse::<OrdNotation>(), Err(OrdError::Parse { pos: 2, .. })));
        assert!("w^(w+1)*2 + w^w".parse::<OrdNotation>().is_ok());
        assert_eq!(o("omega^2"), o("ω^2"));
    }

    #[test]
    fn kb_examples() {
        assert!(kb_less(&[0u64, 1], &[0]));
        assert!(kb_less(&[1u64], &[2]));
        assert!(!kb_less(&[2u64], &[1, 5]));
        let t = FiniteTree::closure([vec![0], vec![1]]);
        let r = kb_rank(&t);
        assert_eq!(r.total, 3);
        assert_eq!(r.rank_of[&vec![0]], 0);
        assert_eq!(r.rank_of[&vec![1]], 1);
        assert_eq!(r.rank_of[&vec![]], 2);
    }
}
