// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use pca_lab::machine::prog::*;
use pca_lab::machine::{eval, fix, pad, s11, OracleTable, Outcome};
use pca_lab::selftest::random_program;
use pca_lab::Nat;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn program(seed: u64) -> Nat {
    random_program(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn n(v: u64) -> Nat {
    Nat::from_u64(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eval_is_deterministic(seed in any::<u64>(), x in 0u64..1000, fuel in 1u64..5000) {
        let (e, none) = (program(seed), OracleTable::new());
        prop_assert_eq!(eval(&e, &n(x), fuel, &none), eval(&e, &n(x), fuel, &none));
    }

    #[test]
    fn fuel_is_monotone(seed in any::<u64>(), x in 0u64..1000, f1 in 1u64..3000, extra in 0u64..3000) {
        let (e, none) = (program(seed), OracleTable::new());
        let first = eval(&e, &n(x), f1, &none);
        if first.is_defined() {
            prop_assert_eq!(eval(&e, &n(x), f1 + extra, &none), first);
        }
    }

    #[test]
    fn pad_is_transparent(seed in any::<u64>(), i in 0u64..50, x in 0u64..200) {
        let (e, none) = (program(seed), OracleTable::new());
        let (a, b) = (eval(&e, &n(x), 20_000, &none), eval(&pad(&e, &n(i)), &n(x), 20_000, &none));
        if let (Some(u), Some(v)) = (a.value(), b.value()) {
            prop_assert_eq!(u, v);
        }
    }

    #[test]
    fn pad_is_injective(s1 in any::<u64>(), s2 in any::<u64>(), i in 0u64..20, j in 0u64..20) {
        let (e1, e2) = (program(s1), program(s2));
        if pad(&e1, &n(i)) == pad(&e2, &n(j)) {
            prop_assert!(e1 == e2 && i == j);
        }
    }

    #[test]
    fn s11_law(seed in any::<u64>(), y in 0u64..500, z in 0u64..500) {
        let (e, none) = (program(seed), OracleTable::new());
        let direct = eval(&e, &Nat::pair(&n(y), &n(z)), 100_000, &none);
        let curried = eval(&s11(&e, &n(y)), &n(z), 100_000 + S11_OVERHEAD, &none);
        match direct {
            Outcome::Defined { value, steps } => {
                prop_assert_eq!(curried, Outcome::Defined { value, steps: steps + S11_OVERHEAD })
            }
            Outcome::OutOfFuel => prop_assert_eq!(curried, Outcome::OutOfFuel),
        }
    }

    #[test]
    fn fix_law(k in 0u64..1000, x in 0u64..100) {
        // template t ↦ s11(id-ish, k): Φ_{fix t}(x) ≃ Φ_{Φ_t(fix t)}(x)
        let none = OracleTable::new();
        let t = code(&q_s11(input(), num(k)));
        let f = fix(&t);
        let m = eval(&t, &f, 100_000, &none).value().cloned().expect("template is total");
        let lhs = eval(&f, &n(x), 100_000, &none);
        let rhs = eval(&m, &n(x), 100_000, &none);
        prop_assert_eq!(lhs.value(), rhs.value());
    }

    #[test]
    fn unused_oracles_change_nothing(seed in any::<u64>(), x in 0u64..1000) {
        let e = program(seed);
        let extra = OracleTable::new().with(40, "const", Arc::new(|_: &Nat| Some(Nat::from_u64(7))));
        // random programs only call built-ins, so id 40 is never used
        prop_assert_eq!(eval(&e, &n(x), 5_000, &OracleTable::new()), eval(&e, &n(x), 5_000, &extra));
    }
}
