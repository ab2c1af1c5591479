// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Frozen codes for the formats documented in `docs/encoding.md`. The
//! expected numbers were computed by a separate Cantor-pairing script, not
//! by this crate; changing any of them breaks stored certificates.

use pca_lab::hierarchy::DistinguishCert;
use pca_lab::machine::kit::{str_code_u64, tuple_code};
use pca_lab::machine::prog::*;
use pca_lab::machine::{builtin, eval, pad, s11, OracleTable, Outcome};
use pca_lab::ordinals::{ord_code, OrdNotation};
use pca_lab::Nat;

fn n(v: u64) -> Nat {
    Nat::from_u64(v)
}

#[test]
fn pairing() {
    assert_eq!(Nat::pair(&n(0), &n(0)), 0u64);
    assert_eq!(Nat::pair(&n(1), &n(0)), 1u64);
    assert_eq!(Nat::pair(&n(0), &n(1)), 2u64);
    assert_eq!(Nat::pair(&n(2), &n(3)), 18u64);
    assert_eq!(tuple_code(&[n(1), n(2), n(3)]), Nat::pair(&n(1), &Nat::pair(&n(2), &n(3))));
}

#[test]
fn ast_codes() {
    assert_eq!(code(&input()), 0u64);
    assert_eq!(code(&num(7)), 43u64);
    assert_eq!(code(&succ(input())), 28u64);
    assert_eq!(code(&pair(input(), num(3))), 5775u64);
    assert_eq!(code(&fst(input())), 6u64);
    assert_eq!(code(&snd(input())), 10u64);
    assert_eq!(code(&if_eq(input(), num(0), num(1), num(2))), 8_034_030u64);
    assert_eq!(code(&bot()), 45u64);
    assert_eq!(s11(&n(5), &n(3)), 50_780_880_291_998u64);
    assert_eq!(pad(&n(5), &n(2)), 2_131_107_292_874_336_211u64);
}

#[test]
fn string_and_ordinal_codes() {
    assert_eq!(str_code_u64(&[]), 0u64);
    assert_eq!(str_code_u64(&[1, 2, 3]), 235u64);
    let o = |s: &str| s.parse::<OrdNotation>().unwrap();
    assert_eq!(ord_code(&o("w")), 3u64);
    assert_eq!(ord_code(&o("w^w")), 28u64);
    assert_eq!(ord_code(&o("w^2*3 + w + 4")), 46_629_235_663u64);
}

#[test]
fn step_costs() {
    let none = OracleTable::new();
    // one step per node visited, one more per primitive call
    let cost = |p: P, x: u64| eval(&code(&p), &n(x), 1_000, &none).steps().unwrap();
    assert_eq!(cost(input(), 0), 1);
    assert_eq!(cost(pair(input(), num(3)), 0), 3);
    assert_eq!(cost(succ(input()), 4), 3);
    assert_eq!(cost(prim(builtin::ADD, pair(num(2), num(3))), 0), 5);
    assert_eq!(eval(&s11(&code(&input()), &n(9)), &n(1), 1_000, &none), Outcome::Defined {
        value: Nat::pair(&n(9), &n(1)),
        steps: S11_OVERHEAD + 1,
    });
    // out-of-range tags and Bot never yield a value
    assert_eq!(eval(&Nat::pair(&n(13), &n(0)), &n(0), 1_000, &none), Outcome::OutOfFuel);
    assert_eq!(eval(&code(&bot()), &n(0), 1_000, &none), Outcome::OutOfFuel);
}

#[test]
fn certificate_json() {
    let leaf = DistinguishCert::Leaf0 { fuel: 10, v1: n(1), v2: n(2) };
    let c = DistinguishCert::drop_to("w+1".parse().unwrap(), DistinguishCert::step(3u64, leaf));
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(
        text,
        r#"{"kind":"drop","beta":"w + 1","inner":{"kind":"step","x":3,"inner":{"kind":"leaf0","fuel":10,"v1":1,"v2":2}}}"#
    );
    assert_eq!(DistinguishCert::from_json(&text).unwrap(), c);
    // naturals from 2^62 up serialize as their pair, recursively
    let big = Nat::pair(&n(u64::MAX), &n(1));
    assert_eq!(serde_json::to_string(&n(u64::MAX)).unwrap(), "[3327948884,2746052115]");
    assert_eq!(serde_json::to_string(&big).unwrap(), "[[3327948884,2746052115],1]");
    assert_eq!(serde_json::from_str::<Nat>("[[3327948884,2746052115],1]").unwrap(), big);
}
