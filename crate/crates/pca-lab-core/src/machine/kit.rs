// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Coded strings and fixed-arity tuples.
//!
//! `str_code(ε) = 0` and `str_code(σ⌢x) = pair2(str_code σ, x) + 1`, so the
//! last element sits at the top of the code. `⟨x⟩₁ = x` and
//! `⟨x₀, …, x_{n-1}⟩_n = pair2(x₀, ⟨x₁, …⟩_{n-1})`.

use crate::nat::Nat;

pub fn str_code(elems: &[Nat]) -> Nat {
    elems.iter().fold(Nat::zero(), |acc, x| Nat::pair(&acc, x).succ())
}

pub fn str_code_u64(elems: &[u64]) -> Nat {
    elems.iter().fold(Nat::zero(), |acc, &x| Nat::pair(&acc, &Nat::from_u64(x)).succ())
}

/// Total: every natural is the code of exactly one string.
pub fn str_decode(code: &Nat) -> Vec<Nat> {
    let mut out = Vec::new();
    let mut cur = code.clone();
    while !cur.is_zero() {
        let (prefix, last) = cur.pred().unpair();
        out.push(last);
        cur = prefix;
    }
    out.reverse();
    out
}

pub fn str_append(code: &Nat, x: &Nat) -> Nat {
    Nat::pair(code, x).succ()
}

pub fn str_len(code: &Nat) -> usize {
    let mut n = 0;
    let mut cur = code.clone();
    while !cur.is_zero() {
        cur = cur.pred().unpair().0;
        n += 1;
    }
    n
}

/// Element `i` of the coded string, if in range.
pub fn str_at(code: &Nat, i: &Nat) -> Option<Nat> {
    let i = usize::try_from(i.as_u64()?).ok()?;
    let elems = str_decode(code);
    elems.get(i).cloned()
}

/// First `n` elements (all of them when `n` exceeds the length).
pub fn str_take(code: &Nat, n: usize) -> Nat {
    let elems = str_decode(code);
    str_code(&elems[..n.min(elems.len())])
}

pub fn tuple_code(xs: &[Nat]) -> Nat {
    assert!(!xs.is_empty(), "tuples have arity at least 1");
    let mut acc = xs[xs.len() - 1].clone();
    for x in xs[..xs.len() - 1].iter().rev() {
        acc = Nat::pair(x, &acc);
    }
    acc
}

pub fn tuple_decode(v: &Nat, n: usize) -> Vec<Nat> {
    assert!(n >= 1, "tuples have arity at least 1");
    let mut out = Vec::with_capacity(n);
    let mut cur = v.clone();
    for _ in 1..n {
        let (x, rest) = cur.unpair();
        out.push(x);
        cur = rest;
    }
    out.push(cur);
    out
}

/// `σ ⊑ τ` on coded strings.
pub fn str_is_prefix(sigma: &[Nat], tau: &[Nat]) -> bool {
    sigma.len() <= tau.len() && sigma.iter().zip(tau).all(|(a, b)| a == b)
}
