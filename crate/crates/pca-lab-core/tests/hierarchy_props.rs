// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

use pca_lab::hierarchy::{
    addk_cert, addk_lift, addk_uncert, check_cert, default_pool, distinguishing_tree, kernel_oracles, probe_sim,
    refute_sim, witness_pair, CertVerdict, DistinguishCert, ProbeConfig, RefuteBudget,
};
use pca_lab::machine::prog::{code, num};
use pca_lab::ordinals::OrdNotation;
use pca_lab::pca::{i_code, k_code, s_code, Term};
use pca_lab::selftest::random_program;
use pca_lab::Nat;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FUEL: u64 = 20_000;

fn el(x: &Nat) -> Term {
    Term::Elem(x.clone())
}

fn element() -> impl Strategy<Value = Nat> {
    prop_oneof![
        Just(k_code()),
        Just(s_code()),
        Just(i_code()),
        (0u64..1000).prop_map(|v| code(&num(v))),
        any::<u64>().prop_map(|s| random_program(&mut ChaCha8Rng::seed_from_u64(s))),
    ]
}

fn level() -> impl Strategy<Value = OrdNotation> {
    prop_oneof![
        (0u64..3).prop_map(OrdNotation::from_u64),
        Just(OrdNotation::omega()),
        Just("w+1".parse().unwrap()),
    ]
}

fn budget() -> RefuteBudget {
    let mut b = RefuteBudget::new(1, default_pool(2), FUEL);
    b.max_nodes = 5_000;
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refute_sim_is_sound(s in element(), t in element(), a in level()) {
        let o = kernel_oracles();
        if let Some(c) = refute_sim(&el(&s), &el(&t), &a, &budget(), o) {
            let v = check_cert(&el(&s), &el(&t), &a, &c, FUEL, o);
            prop_assert!(v.is_valid(), "{:?}", v);
            if v == CertVerdict::Holds {
                prop_assert_eq!(check_cert(&el(&s), &el(&t), &a, &c, FUEL * 10, o), CertVerdict::Holds);
            }
        }
    }

    #[test]
    fn nothing_refutes_reflexivity(s in element(), a in level()) {
        prop_assert!(refute_sim(&el(&s), &el(&s), &a, &budget(), kernel_oracles()).is_none());
    }

    #[test]
    fn step_certificates_peel(s in element(), t in element(), k in 0u64..3) {
        // a Step(x, c) cert at k+1 means c certifies s x ≁_k t x
        let o = kernel_oracles();
        let a = OrdNotation::from_u64(k + 1);
        if let Some(DistinguishCert::Step { x, inner }) = refute_sim(&el(&s), &el(&t), &a, &budget(), o) {
            let (sx, tx) = (Term::app(el(&s), el(&x)), Term::app(el(&t), el(&x)));
            prop_assert!(check_cert(&sx, &tx, &OrdNotation::from_u64(k), &inner, FUEL, o).is_valid());
        }
    }

    #[test]
    fn drop_lifts_to_limits(j in 0u64..4) {
        // a cert at a finite level β lifts through Drop(β, ·) to ω and ω·2
        let o = kernel_oracles();
        let beta = OrdNotation::from_u64(j);
        let (s, t) = witness_pair(&beta).unwrap();
        let c = refute_sim(&el(&s), &el(&t), &beta, &budget(), o).unwrap();
        let lifted = DistinguishCert::drop_to(beta, c);
        for limit in [OrdNotation::omega(), "w*2".parse().unwrap()] {
            prop_assert!(check_cert(&el(&s), &el(&t), &limit, &lifted, FUEL, o).is_valid());
        }
    }

    #[test]
    fn addk_transfer_both_ways(k in 0u64..3, x0 in 0u64..1000) {
        let o = kernel_oracles();
        let a = OrdNotation::from_u64(k);
        let (f, g) = witness_pair(&a).unwrap();
        let c = refute_sim(&el(&f), &el(&g), &a, &budget(), o).unwrap();
        let (kf, kg) = addk_lift(&f, &g);
        let lifted = addk_cert(c.clone(), Nat::from_u64(x0));
        prop_assert_eq!(check_cert(&el(&kf), &el(&kg), &a.succ(), &lifted, FUEL, o), CertVerdict::Holds);
        prop_assert_eq!(addk_uncert(&lifted), Some(c));
    }
}

#[test]
fn omega_chain_up_to_four() {
    let o = kernel_oracles();
    for k in 0..=4u64 {
        let a = OrdNotation::from_u64(k);
        let (f, g) = witness_pair(&a).unwrap();
        let b = RefuteBudget::new(1, default_pool(2), FUEL);
        let c = refute_sim(&el(&f), &el(&g), &a, &b, o).expect("refuted at its level");
        assert_eq!(check_cert(&el(&f), &el(&g), &a, &c, FUEL, o), CertVerdict::Holds);
        let rep = probe_sim(&el(&f), &el(&g), &a.succ(), &ProbeConfig::new(500, FUEL, default_pool(8), k), o);
        assert_eq!(rep.counterexamples_found, 0, "level {k}");
    }
}

#[test]
fn tree_bound_agrees_with_search() {
    let o = kernel_oracles();
    for k in 0..3u64 {
        let (f, g) = witness_pair(&OrdNotation::from_u64(k)).unwrap();
        let d = distinguishing_tree(&el(&f), &el(&g), k as usize + 2, 3, FUEL, o);
        let bound = d.bound.expect("complete exploration");
        assert!(d.complete);
        for below in 0..bound {
            let a = OrdNotation::from_u64(below);
            assert!(refute_sim(&el(&f), &el(&g), &a, &budget(), o).is_some(), "level {below}");
        }
        let at = OrdNotation::from_u64(bound);
        assert!(refute_sim(&el(&f), &el(&g), &at, &budget(), o).is_none());
    }
}
