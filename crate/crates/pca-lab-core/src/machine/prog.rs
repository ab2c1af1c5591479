// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! AST builders, the syntactic S-m-n / padding / fixed-point constructors,
//! and run-time quoting helpers for programs that emit program codes.
//!
//! Conventions used by every self-referential program in the crate:
//! a program `R` written in *self-passing* style expects input
//! `⟨self, args⟩` with `self = code(R)`; its entry point is `s11(R, R)`.

use std::sync::Arc;

use super::{encode_ast, Ast, TAG_NUM, TAG_PAD, TAG_PAIR, TAG_RUN};
use crate::nat::Nat;

pub type P = Arc<Ast>;

pub fn code(a: &Ast) -> Nat {
    encode_ast(a)
}

pub fn input() -> P {
    Arc::new(Ast::Input)
}

pub fn num(k: u64) -> P {
    Arc::new(Ast::Num(Nat::from_u64(k)))
}

pub fn numn(k: &Nat) -> P {
    Arc::new(Ast::Num(k.clone()))
}

pub fn pair(a: P, b: P) -> P {
    Arc::new(Ast::Pair(a, b))
}

pub fn fst(a: P) -> P {
    Arc::new(Ast::Fst(a))
}

pub fn snd(a: P) -> P {
    Arc::new(Ast::Snd(a))
}

pub fn if_eq(a: P, b: P, t: P, e: P) -> P {
    Arc::new(Ast::IfEq(a, b, t, e))
}

pub fn run(c: P, x: P) -> P {
    Arc::new(Ast::Run(c, x))
}

pub fn prim(id: u64, a: P) -> P {
    Arc::new(Ast::Prim(Nat::from_u64(id), a))
}

pub fn pad_node(i: u64, a: P) -> P {
    Arc::new(Ast::Pad(Nat::from_u64(i), a))
}

pub fn bot() -> P {
    Arc::new(Ast::Bot)
}

pub fn len(a: P) -> P {
    Arc::new(Ast::Len(a))
}

pub fn at(a: P, i: P) -> P {
    Arc::new(Ast::At(a, i))
}

pub fn append(a: P, x: P) -> P {
    Arc::new(Ast::AppendElem(a, x))
}

/// `input.0`, `input.1.0`, ... : component `i` of an `n`-tuple expression.
pub fn proj(e: P, n: usize, i: usize) -> P {
    assert!(i < n);
    let mut cur = e;
    for _ in 0..i {
        cur = snd(cur);
    }
    if i + 1 < n {
        fst(cur)
    } else {
        cur
    }
}

/// Right-nested tuple expression `⟨a₀, …, a_{n-1}⟩_n`.
pub fn tuple(parts: Vec<P>) -> P {
    let mut it = parts.into_iter().rev();
    let mut acc = it.next().expect("tuples have arity at least 1");
    for p in it {
        acc = pair(p, acc);
    }
    acc
}

/// Evaluates `body` with input `⟨v, input⟩`.
pub fn let_(v: P, body: &P) -> P {
    run(numn(&code(body)), pair(v, input()))
}

/// `x ∸ 1`, `x + 1`, `x + y` and friends as AST sugar.
pub fn succ(a: P) -> P {
    prim(super::builtin::SUCC, a)
}

pub fn pred(a: P) -> P {
    prim(super::builtin::PRED, a)
}

pub fn lt(a: P, b: P) -> P {
    prim(super::builtin::LT, pair(a, b))
}

// Run-time quoting: expressions whose value is the code of a program.

/// Code of `Num(k)` for the run-time value `k`.
pub fn q_num(k: P) -> P {
    pair(num(TAG_NUM), k)
}

/// Code of `Pair(a, b)` from run-time codes `a`, `b`.
pub fn q_pair(a: P, b: P) -> P {
    pair(num(TAG_PAIR), pair(a, b))
}

/// Code of `Run(c, x)` from run-time codes.
pub fn q_run(c: P, x: P) -> P {
    pair(num(TAG_RUN), pair(c, x))
}

/// Run-time `s11(e, y)`.
pub fn q_s11(e: P, y: P) -> P {
    q_run(q_num(e), q_pair(q_num(y), num(0)))
}

/// Run-time `pad(e, i)`.
pub fn q_pad(e: P, i: P) -> P {
    pair(num(TAG_PAD), pair(i, q_run(q_num(e), num(0))))
}

/// `code(Run(Num e, Pair(Num y, Input)))`: on input `z` it runs `e` on
/// `pair2(y, z)`. Injective; every output has root tag `Run`.
pub fn s11(e: &Nat, y: &Nat) -> Nat {
    code(&run(numn(e), pair(numn(y), input())))
}

/// `code(Pad(i, Run(Num e, Input)))`. Injective in `(e, i)`, never equal
/// to `e`, and the only constructor producing root tag `Pad`.
pub fn pad(e: &Nat, i: &Nat) -> Nat {
    code(&Arc::new(Ast::Pad(i.clone(), run(numn(e), input()))))
}

/// Fuel spent by `s11(e, y)` before control reaches `e`.
pub const S11_OVERHEAD: u64 = 5;
/// Fuel spent by `pad(e, i)` before control reaches `e`.
pub const PAD_OVERHEAD: u64 = 4;

/// The diagonal program of the classic fixed-point construction:
/// `d(⟨y, x⟩) = Φ_{Φ_t(s11(y, y))}(x)`.
pub fn fix_diag(t: &Nat) -> Nat {
    let me = fst(input());
    code(&run(run(numn(t), q_s11(me.clone(), me)), snd(input())))
}

/// `n = s11(d, d)` with `d = fix_diag(t)`, so `Φ_n(x) ≃ Φ_{Φ_t(n)}(x)`.
/// Pure syntax: nothing is evaluated.
pub fn fix(t: &Nat) -> Nat {
    let d = fix_diag(t);
    s11(&d, &d)
}

/// Padded fixed point: `n = pad(s11(d, d), i)` and `Φ_n(x) ≃ Φ_{Φ_t(n)}(x)`.
/// Distinct `i` give distinct fixed points of the same template.
pub fn fix_padded(t: &Nat, i: u64) -> Nat {
    let me = fst(input());
    let d = code(&run(run(numn(t), q_pad(q_s11(me.clone(), me), num(i))), snd(input())));
    pad(&s11(&d, &d), &Nat::from_u64(i))
}

/// Entry point of a self-passing program: `s11(r, r)`.
pub fn self_entry(r: &Nat) -> Nat {
    s11(r, r)
}

/// Inside a self-passing program: `self`.
pub fn me() -> P {
    fst(input())
}

/// Inside a self-passing program: its argument.
pub fn arg() -> P {
    snd(input())
}

/// Inside a self-passing program: recursive call on `args`.
pub fn recurse(args: P) -> P {
    run(me(), pair(me(), args))
}

/// Template whose fixed point returns itself on every input.
pub fn const_self_template() -> Nat {
    code(&q_num(input()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{run as exec, Outcome};

    fn n(v: u64) -> Nat {
        Nat::from_u64(v)
    }

    #[test]
    fn s11_curries() {
        let e = code(&fst(input()));
        assert_eq!(exec(&s11(&e, &n(5)), &n(99), 1000).value(), Some(&n(5)));
        assert_ne!(s11(&e, &n(1)), s11(&e, &n(2)));
        let add = code(&prim(super::super::builtin::ADD, input()));
        assert_eq!(exec(&s11(&add, &n(3)), &n(4), 1000).value(), Some(&n(7)));
    }

    #[test]
    fn s11_overhead_is_exact() {
        let e = code(&input());
        let direct = exec(&e, &Nat::pair(&n(2), &n(3)), 100).steps().unwrap();
        let curried = exec(&s11(&e, &n(2)), &n(3), 100).steps().unwrap();
        assert_eq!(curried, direct + S11_OVERHEAD);
    }

    #[test]
    fn pad_is_transparent_and_injective() {
        let e = code(&num(7));
        let codes: Vec<Nat> = (0..4).map(|i| pad(&e, &n(i))).collect();
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(codes[i], codes[j]);
            }
            assert_ne!(codes[i], e);
        }
        assert_eq!(exec(&pad(&e, &n(5)), &n(0), 1000).value(), Some(&n(7)));
        assert_eq!(
            exec(&pad(&e, &n(5)), &n(0), 1000).steps(),
            exec(&e, &n(0), 1000).steps().map(|s| s + PAD_OVERHEAD)
        );
    }

    #[test]
    fn fix_constant_template() {
        let t = code(&num(code(&num(9)).as_u64().unwrap()));
        assert_eq!(exec(&fix(&t), &n(4), 10_000).value(), Some(&n(9)));
    }

    #[test]
    fn fix_quine() {
        let t = const_self_template();
        let q = fix(&t);
        assert_eq!(exec(&q, &n(0), 10_000).value(), Some(&q));
        let p0 = fix_padded(&t, 0);
        let p1 = fix_padded(&t, 1);
        assert_ne!(p0, p1);
        assert_eq!(exec(&p0, &n(3), 10_000).value(), Some(&p0));
        assert_eq!(exec(&p1, &p1, 10_000).value(), Some(&p1));
    }

    #[test]
    fn quoting_matches_host_constructors() {
        let e = n(1234);
        let y = n(77);
        let prog = code(&q_s11(fst(input()), snd(input())));
        assert_eq!(exec(&prog, &Nat::pair(&e, &y), 1000).value(), Some(&s11(&e, &y)));
        let prog = code(&q_pad(fst(input()), snd(input())));
        assert_eq!(exec(&prog, &Nat::pair(&e, &y), 1000).value(), Some(&pad(&e, &y)));
        assert_eq!(
            exec(&code(&q_num(input())), &e, 100),
            Outcome::Defined { value: code(&numn(&e)), steps: 3 }
        );
    }
}
