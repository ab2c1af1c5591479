// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact naturals stored in Cantor-pair normal form.
//!
//! Gödel codes built by S-m-n and padding nest Cantor pairs, and every level
//! of nesting squares the magnitude. A natural at or above [`SMALL_LIMIT`] is
//! therefore kept as the unique pair `(x, y)` with `pair2(x, y)` equal to it,
//! which makes pairing and unpairing constant time no matter how large the
//! value is. Below the limit the value is a plain `u64`.
//!
//! The representation is canonical, so structural equality is numeric
//! equality.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// Values strictly below this bound are stored inline.
pub const SMALL_LIMIT: u64 = 1 << 62;

/// Decimal rendering is used up to this many (estimated) bits.
const DECIMAL_DISPLAY_BITS: u64 = 1 << 14;

#[derive(Clone)]
pub struct Nat(Repr);

#[derive(Clone)]
enum Repr {
    Small(u64),
    Pair(Arc<PairNode>),
}

struct PairNode {
    x: Nat,
    y: Nat,
    hash: u64,
    // upper bound on the bit length of the value
    bits: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tri(s: u128) -> u128 {
    s * (s + 1) / 2
}

fn unpair_u128(n: u128) -> (u128, u128) {
    // w = floor((sqrt(8n+1) - 1) / 2), computed without overflow for n < 2^124
    let mut w = ((8.0 * n as f64 + 1.0).sqrt() as u128).saturating_sub(1) / 2;
    while tri(w + 1) <= n {
        w += 1;
    }
    while tri(w) > n {
        w -= 1;
    }
    let y = n - tri(w);
    (w - y, y)
}

impl Nat {
    pub const fn zero() -> Nat {
        Nat(Repr::Small(0))
    }

    pub fn from_u64(v: u64) -> Nat {
        if v < SMALL_LIMIT {
            Nat(Repr::Small(v))
        } else {
            Nat::from_u128(v as u128)
        }
    }

    pub fn from_u128(v: u128) -> Nat {
        if v < SMALL_LIMIT as u128 {
            return Nat(Repr::Small(v as u64));
        }
        let (x, y) = unpair_u128(v);
        Nat::make_pair(Nat::from_u128(x), Nat::from_u128(y))
    }

    fn make_pair(x: Nat, y: Nat) -> Nat {
        let hash = mix(x.hash64() ^ mix(y.hash64()).rotate_left(17));
        let bits = x.bits_upper().max(y.bits_upper()).saturating_mul(2).saturating_add(2);
        Nat(Repr::Pair(Arc::new(PairNode { x, y, hash, bits })))
    }

    /// Cantor pairing `(x+y)(x+y+1)/2 + y`.
    pub fn pair(x: &Nat, y: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&x.0, &y.0) {
            let s = *a as u128 + *b as u128;
            let v = tri(s) + *b as u128;
            if v < SMALL_LIMIT as u128 {
                return Nat(Repr::Small(v as u64));
            }
        }
        Nat::make_pair(x.clone(), y.clone())
    }

    /// Inverse of [`Nat::pair`].
    pub fn unpair(&self) -> (Nat, Nat) {
        match &self.0 {
            Repr::Small(v) => {
                let (x, y) = unpair_u128(*v as u128);
                (Nat::from_u128(x), Nat::from_u128(y))
            }
            Repr::Pair(p) => (p.x.clone(), p.y.clone()),
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Pair(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(_))
    }

    /// Upper bound on the bit length.
    pub fn bits_upper(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => 64 - v.leading_zeros() as u64,
            Repr::Pair(p) => p.bits,
        }
    }

    fn hash64(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => mix(*v),
            Repr::Pair(p) => p.hash,
        }
    }

    /// Number of pair nodes above the inline leaves.
    pub fn pair_depth(&self) -> usize {
        match &self.0 {
            Repr::Small(_) => 0,
            Repr::Pair(p) => 1 + p.x.pair_depth().max(p.y.pair_depth()),
        }
    }

    pub fn succ(&self) -> Nat {
        match &self.0 {
            Repr::Small(v) => Nat::from_u128(*v as u128 + 1),
            // pair(x,y)+1 walks along the diagonal x+y
            Repr::Pair(p) => {
                if p.x.is_zero() {
                    Nat::pair(&p.y.succ(), &Nat::zero())
                } else {
                    Nat::pair(&p.x.pred(), &p.y.succ())
                }
            }
        }
    }

    /// Predecessor, with `pred(0) = 0`.
    pub fn pred(&self) -> Nat {
        match &self.0 {
            Repr::Small(v) => Nat(Repr::Small(v.saturating_sub(1))),
            Repr::Pair(p) => {
                if p.y.is_zero() {
                    Nat::pair(&Nat::zero(), &p.x.pred())
                } else {
                    Nat::pair(&p.x.succ(), &p.y.pred())
                }
            }
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(v) => BigUint::from(*v),
            Repr::Pair(p) => {
                let x = p.x.to_biguint();
                let y = p.y.to_biguint();
                let s = &x + &y;
                (&s * (&s + 1u32)) / 2u32 + y
            }
        }
    }

    pub fn from_biguint(n: &BigUint) -> Nat {
        if let Some(v) = n.to_u64() {
            return Nat::from_u64(v);
        }
        let w: BigUint = (((n * 8u32) + 1u32).sqrt() - 1u32) / 2u32;
        let t = (&w * (&w + 1u32)) / 2u32;
        let y = n - t;
        let x = &w - &y;
        Nat::make_pair(Nat::from_biguint(&x), Nat::from_biguint(&y))
    }

    /// Exact comparison; falls back to big-integer arithmetic for large values.
    pub fn cmp_exact(&self, other: &Nat) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Pair(_)) => Less,
            (Repr::Pair(_), Repr::Small(_)) => Greater,
            (Repr::Pair(_), Repr::Pair(_)) => {
                if self == other {
                    Equal
                } else {
                    self.to_biguint().cmp(&other.to_biguint())
                }
            }
        }
    }

    pub fn add(&self, other: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            return Nat::from_u128(*a as u128 + *b as u128);
        }
        Nat::from_biguint(&(self.to_biguint() + other.to_biguint()))
    }

    /// Truncated subtraction.
    pub fn monus(&self, other: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            return Nat::from_u64(a.saturating_sub(*b));
        }
        let (a, b) = (self.to_biguint(), other.to_biguint());
        if a <= b {
            Nat::zero()
        } else {
            Nat::from_biguint(&(a - b))
        }
    }

    pub fn mul(&self, other: &Nat) -> Nat {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            return Nat::from_u128(*a as u128 * *b as u128);
        }
        Nat::from_biguint(&(self.to_biguint() * other.to_biguint()))
    }

    /// Parses a decimal literal of any length.
    pub fn parse_decimal(s: &str) -> Option<Nat> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        BigUint::parse_bytes(s.as_bytes(), 10).map(|b| Nat::from_biguint(&b))
    }
}

impl Default for Nat {
    fn default() -> Self {
        Nat::zero()
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat::from_u64(v)
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Self {
        Nat::from_u64(v as u64)
    }
}

impl From<usize> for Nat {
    fn from(v: usize) -> Self {
        Nat::from_u64(v as u64)
    }
}

impl PartialEq for Nat {
    fn eq(&self, other: &Nat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Pair(p), Repr::Pair(q)) => {
                Arc::ptr_eq(p, q) || (p.hash == q.hash && p.bits == q.bits && p.x == q.x && p.y == q.y)
            }
            _ => false,
        }
    }
}

impl Eq for Nat {}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Nat) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Nat) -> std::cmp::Ordering {
        self.cmp_exact(other)
    }
}

impl Hash for Nat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash64());
    }
}

impl PartialEq<u64> for Nat {
    fn eq(&self, other: &u64) -> bool {
        self.as_u64() == Some(*other) || (*other >= SMALL_LIMIT && *self == Nat::from_u64(*other))
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Pair(p) => {
                if p.bits <= DECIMAL_DISPLAY_BITS {
                    write!(f, "{}", self.to_biguint())
                } else {
                    write!(f, "[{},{}]", p.x, p.y)
                }
            }
        }
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a JSON integer below [`SMALL_LIMIT`], otherwise as the
/// two-element array `[x, y]` denoting `pair2(x, y)`. Decimal strings are
/// accepted on input.
impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Small(v) => serializer.serialize_u64(*v),
            Repr::Pair(p) => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&p.x)?;
                seq.serialize_element(&p.y)?;
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Nat, D::Error> {
        struct NatVisitor;
        impl<'de> Visitor<'de> for NatVisitor {
            type Value = Nat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a natural: integer, decimal string, or [x, y] pair")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Nat, E> {
                Ok(Nat::from_u64(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Nat, E> {
                u64::try_from(v).map(Nat::from_u64).map_err(|_| E::custom("negative natural"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Nat, E> {
                Nat::parse_decimal(v).ok_or_else(|| E::custom("bad decimal natural"))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Nat, A::Error> {
                let x: Nat = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let y: Nat = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Nat::pair(&x, &y))
            }
        }
        deserializer.deserialize_any(NatVisitor)
    }
}

/// Cantor pairing on naturals.
pub fn pair2(x: &Nat, y: &Nat) -> Nat {
    Nat::pair(x, y)
}

/// Inverse Cantor pairing.
pub fn unpair2(n: &Nat) -> (Nat, Nat) {
    n.unpair()
}

/// `pair2` on machine words, for tests and tables.
pub fn pair_u64(x: u64, y: u64) -> Nat {
    Nat::pair(&Nat::from_u64(x), &Nat::from_u64(y))
}

impl Zero for Nat {
    fn zero() -> Self {
        Nat::zero()
    }
    fn is_zero(&self) -> bool {
        Nat::is_zero(self)
    }
}

impl std::ops::Add for Nat {
    type Output = Nat;
    fn add(self, rhs: Nat) -> Nat {
        Nat::add(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: &Nat) -> BigUint {
        n.to_biguint()
    }

    #[test]
    fn small_pairing_matches_formula() {
        for x in 0..40u64 {
            for y in 0..40u64 {
                let p = pair_u64(x, y);
                assert_eq!(p.as_u64(), Some((x + y) * (x + y + 1) / 2 + y));
                assert_eq!(p.unpair(), (Nat::from(x), Nat::from(y)));
            }
        }
    }

    #[test]
    fn crossing_the_limit_is_canonical() {
        let below = Nat::from_u64(SMALL_LIMIT - 1);
        let at = below.succ();
        assert!(!at.is_small());
        assert_eq!(big(&at), BigUint::from(SMALL_LIMIT));
        assert_eq!(at.pred(), below);
        assert_eq!(Nat::from_biguint(&BigUint::from(SMALL_LIMIT)), at);
    }

    #[test]
    fn succ_pred_on_pair_form() {
        let a = Nat::pair(&Nat::from_u64(SMALL_LIMIT - 3), &Nat::from_u64(12345));
        let b = a.succ();
        assert_eq!(big(&b), big(&a) + 1u32);
        assert_eq!(b.pred(), a);
        let c = Nat::pair(&Nat::zero(), &a);
        assert_eq!(big(&c.succ()), big(&c) + 1u32);
        assert_eq!(c.succ().pred(), c);
    }

    #[test]
    fn nested_pairs_round_trip_through_biguint() {
        let mut n = Nat::from_u64(7);
        for i in 0..6u64 {
            n = Nat::pair(&n, &Nat::from_u64(i));
        }
        assert_eq!(Nat::from_biguint(&n.to_biguint()), n);
    }

    #[test]
    fn json_forms() {
        let n = Nat::pair(&Nat::from_u64(SMALL_LIMIT), &Nat::from_u64(1));
        let s = serde_json::to_string(&n).unwrap();
        let back: Nat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, n);
        let d: Nat = serde_json::from_str(&format!("\"{}\"", n.to_biguint())).unwrap();
        assert_eq!(d, n);
    }
}
