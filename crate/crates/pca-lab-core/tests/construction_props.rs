// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use pca_lab::embeddings::{embed_k1_rel, find_collision, EmbeddingSpec};
use pca_lab::hierarchy::{cstar, estar, kernel_oracles};
use pca_lab::k2::{embed_k1_to_k2, K2Approx};
use pca_lab::machine::prog::*;
use pca_lab::machine::OracleTable;
use pca_lab::pca::{apply_chain, k_code};
use pca_lab::reductions::{check_monotone, combine2, combine_omega, monotonize, FormulaFin};
use pca_lab::Nat;
use proptest::prelude::*;

fn n(v: u64) -> Nat {
    Nat::from_u64(v)
}

/// Hereditarily total elements: constants, `K` and combinations of them.
fn total() -> impl Strategy<Value = Nat> {
    let leaf = prop_oneof![Just(estar()), Just(cstar()), Just(k_code())];
    leaf.prop_recursive(2, 8, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| combine2(&a, &b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn combine2_stays_total(a in total(), b in total(), args in prop::collection::vec(0u64..50, 1..5)) {
        let w = combine2(&a, &b);
        let args: Vec<Nat> = args.iter().map(|&u| Nat::pair(&n(u), &n(u + 1))).collect();
        prop_assert!(apply_chain(&w, &args, 200_000, kernel_oracles()).is_defined());
    }

    #[test]
    fn combine_omega_stays_total(c in 0u64..3, args in prop::collection::vec(0u64..20, 1..4)) {
        // the sequence n ↦ c_* or K or e_* by residue
        let seq = code(&if_eq(
            numn(&n(c)),
            num(0),
            numn(&cstar()),
            if_eq(numn(&n(c)), num(1), numn(&k_code()), numn(&estar())),
        ));
        let w = combine_omega(&seq);
        let args: Vec<Nat> = args.iter().map(|&u| n(u)).collect();
        prop_assert!(apply_chain(&w, &args, 200_000, kernel_oracles()).is_defined());
    }

    #[test]
    fn construction_is_syntax_only(z in 0u64..100) {
        // builders never evaluate the matrix, so a divergent one is fine
        let looping = code(&run(input(), input()));
        let phi: FormulaFin = format!("E a A b E c . matrix=#{looping}").parse().unwrap();
        prop_assert!(pca_lab::reductions::hard_sigma3(&phi, &n(z)).is_ok());
    }

    #[test]
    fn embedding_is_injective(start in 0u64..100_000) {
        let emb = embed_k1_rel(EmbeddingSpec::empty());
        prop_assert!(find_collision(|a| emb.map(a), (start..start + 200).map(n)).is_none());
    }

    #[test]
    fn k2_approx_rejects_non_monotone_extensions(
        sigma in prop::collection::vec(0u64..3, 0..3),
        x in 0u64..3,
        tau in prop::collection::vec(0u64..3, 1..3),
    ) {
        let s: Vec<Nat> = sigma.iter().map(|&v| n(v)).collect();
        let t: Vec<Nat> = tau.iter().map(|&v| n(v)).collect();
        let mut a = K2Approx::new();
        a.insert(s.clone(), t.clone()).unwrap();
        let mut longer = s;
        longer.push(n(x));
        // an extension must map to an extension of the image
        let mut bad = t.clone();
        bad[0] = n(tau[0] + 1);
        prop_assert!(a.clone().insert(longer.clone(), bad).is_err());
        let mut good = t;
        good.push(n(0));
        prop_assert!(a.insert(longer, good).is_ok());
    }
}

#[test]
fn monotonized_matrices_are_monotone() {
    let none = OracleTable::new();
    let x = input();
    // θ(z, p, u, m) = [m > u + p] and [z even], and an unconditional one
    let thetas = [
        code(&lt(add2(proj(x.clone(), 4, 2), proj(x.clone(), 4, 1)), proj(x.clone(), 4, 3))),
        code(&if_eq(proj(x.clone(), 4, 1), num(2), num(1), num(0))),
        code(&num(0)),
    ];
    for theta in &thetas {
        assert_eq!(check_monotone(&monotonize(theta), 4, 200_000, &none), Ok(()));
    }
}

fn add2(a: P, b: P) -> P {
    prim(pca_lab::machine::builtin::ADD, pair(a, b))
}

#[test]
fn k2_stage_tables_validate() {
    let table = Arc::new(embed_k1_to_k2(24, 24, &OracleTable::new()));
    assert_eq!(table.validate(), Ok(25 * 25));
}
