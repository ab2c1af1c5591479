// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;

use pca_lab::ordinals::{kb_cmp, kb_less, ord_cmp, ord_code, ord_decode, OrdNotation};
use proptest::prelude::*;

/// Notations below ω^ω^2 with small coefficients.
fn notation() -> impl Strategy<Value = OrdNotation> {
    let exponent = prop::collection::vec((0u64..3, 1u64..4), 0..3).prop_map(build);
    prop::collection::vec((exponent, 1u64..4), 0..4).prop_map(|terms| {
        terms.into_iter().fold(OrdNotation::zero(), |acc, (e, c)| acc.add(&OrdNotation::monomial(e, c)))
    })
}

fn build(terms: Vec<(u64, u64)>) -> OrdNotation {
    terms.into_iter().fold(OrdNotation::zero(), |acc, (e, c)| {
        acc.add(&OrdNotation::monomial(OrdNotation::from_u64(e), c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn f_inverts_g(a in notation()) {
        prop_assert_eq!(a.g().f(), a);
    }

    #[test]
    fn f_and_g_are_monotone(a in notation(), b in notation()) {
        if ord_cmp(&b, &a) == Ordering::Less {
            prop_assert!(ord_cmp(&b.f(), &a.f()).is_le());
            prop_assert_eq!(ord_cmp(&b.g(), &a.g()), Ordering::Less);
        }
    }

    #[test]
    fn literal_round_trip(a in notation()) {
        prop_assert_eq!(a.to_string().parse::<OrdNotation>().unwrap(), a.clone());
        prop_assert_eq!(ord_decode(&ord_code(&a)), Some(a));
    }

    #[test]
    fn fundamental_sequences_increase_below(a in notation(), k in 0u64..50) {
        if a.is_limit() {
            let (x, y) = (a.fund_seq(k).unwrap(), a.fund_seq(k + 1).unwrap());
            prop_assert_eq!(ord_cmp(&x, &y), Ordering::Less);
            prop_assert_eq!(ord_cmp(&y, &a), Ordering::Less);
        }
    }

    #[test]
    fn kb_is_a_strict_total_order(
        a in prop::collection::vec(0u8..3, 0..5),
        b in prop::collection::vec(0u8..3, 0..5),
        c in prop::collection::vec(0u8..3, 0..5),
    ) {
        prop_assert!(!kb_less(&a, &a));
        if a != b {
            prop_assert!(kb_less(&a, &b) ^ kb_less(&b, &a));
        }
        if kb_less(&a, &b) && kb_less(&b, &c) {
            prop_assert!(kb_less(&a, &c));
        }
        prop_assert_eq!(kb_cmp(&a, &b) == Ordering::Less, kb_less(&a, &b));
    }
}
