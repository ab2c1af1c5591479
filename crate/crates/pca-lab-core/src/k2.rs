// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Kleene's second model at finite precision.
//!
//! An element is read as a monotone map on finite strings, known through
//! stages: stage `s` is a finite [`K2Approx`] and later stages extend
//! earlier ones. `f·g` is the union of the images of the prefixes of `g`.
//!
//! [`K1K2Table`] is the stagewise embedding of the first model: `f_n`
//! starts with `n`, and at stage `s+1` every new string `τ ⊒ ⟨b⟩` in the
//! domain of `f_a` is sent to the current string of `f_c` when `a·b = c`
//! has halted within `s` steps with `c ≤ s`, and to `ε` otherwise.
//!
//! The string of `f_n` is `n` followed by one entry per map entry,
//! `pair2(str_code τ, image_code(image))`, in the order entries were
//! added. Entries are only ever appended, so the strings of `f_n` grow by
//! extension from stage to stage.
//!
//! [`image_code`] uses pairing only. Images are strings of other `f_c`,
//! whose entries hold image codes again, so the values are deep symbolic
//! naturals; the successor in `str_code` would walk them every time.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::kit::{str_decode, str_is_prefix};
use crate::machine::{eval, OracleFn, OracleTable, Outcome};
use crate::nat::Nat;

pub type Str = Vec<Nat>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum K2Error {
    #[error("monotonicity violated between a domain string and its extension")]
    NonMonotone { shorter: Str, longer: Str },
    #[error("string is already in the domain")]
    Duplicate(Str),
}

/// A finite map on strings with `σ₀ ⊑ σ₁ ⇒ image(σ₀) ⊑ image(σ₁)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct K2Approx {
    map: BTreeMap<Str, Str>,
}

impl K2Approx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, sigma: &[Nat]) -> Option<&Str> {
        self.map.get(sigma)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Str, &Str)> {
        self.map.iter()
    }

    /// Adds `σ ↦ τ`, refusing anything that breaks monotonicity against
    /// the prefixes and extensions of `σ` already present.
    pub fn insert(&mut self, sigma: Str, tau: Str) -> Result<(), K2Error> {
        if self.map.contains_key(&sigma) {
            return Err(K2Error::Duplicate(sigma));
        }
        for k in 0..sigma.len() {
            if let Some(img) = self.map.get(&sigma[..k]) {
                if !str_is_prefix(img, &tau) {
                    return Err(K2Error::NonMonotone { shorter: sigma[..k].to_vec(), longer: sigma });
                }
            }
        }
        // extensions of σ form a contiguous block starting at σ
        for (k, img) in self.map.range(sigma.clone()..) {
            if !str_is_prefix(&sigma, k) {
                break;
            }
            if !str_is_prefix(&tau, img) {
                return Err(K2Error::NonMonotone { shorter: sigma, longer: k.clone() });
            }
        }
        self.map.insert(sigma, tau);
        Ok(())
    }

    /// Checks the monotonicity invariant over the whole domain.
    pub fn validate(&self) -> Result<(), K2Error> {
        for (sigma, img) in &self.map {
            for k in 0..sigma.len() {
                if let Some(short) = self.map.get(&sigma[..k]) {
                    if !str_is_prefix(short, img) {
                        return Err(K2Error::NonMonotone { shorter: sigma[..k].to_vec(), longer: sigma.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    /// Longest image of a prefix of `g` in the domain.
    pub fn image_along(&self, g: &dyn Fn(usize) -> Nat) -> Str {
        let max_len = self.map.keys().map(Vec::len).max().unwrap_or(0);
        let mut prefix: Str = Vec::with_capacity(max_len);
        let mut best: &[Nat] = &[];
        for k in 0..=max_len {
            if let Some(img) = self.map.get(&prefix) {
                if img.len() > best.len() {
                    best = img;
                }
            }
            if k < max_len {
                prefix.push(g(k));
            }
        }
        best.to_vec()
    }
}

/// An element of the second model given by its stages.
#[derive(Clone)]
pub struct K2Elem {
    stages: Arc<dyn Fn(usize) -> K2Approx + Send + Sync>,
}

impl K2Elem {
    pub fn new(stages: impl Fn(usize) -> K2Approx + Send + Sync + 'static) -> Self {
        K2Elem { stages: Arc::new(stages) }
    }

    pub fn stage(&self, s: usize) -> K2Approx {
        (self.stages)(s)
    }

    /// Stage `s` maps every string with code `≤ s` to itself.
    pub fn identity() -> Self {
        Self::new(|s| {
            let mut m = K2Approx::new();
            for t in 0..=s as u64 {
                let sigma = str_decode(&Nat::from_u64(t));
                m.insert(sigma.clone(), sigma).expect("identity is monotone");
            }
            m
        })
    }

    /// Stage `s` maps every string with code `≤ s` to `ε`.
    pub fn undefined() -> Self {
        Self::new(|s| {
            let mut m = K2Approx::new();
            for t in 0..=s as u64 {
                m.insert(str_decode(&Nat::from_u64(t)), Vec::new()).expect("constant ε is monotone");
            }
            m
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K2Output {
    pub out: Str,
    /// Fewer than the requested number of entries were produced.
    pub undefined_at_budget: bool,
}

/// `f·g` truncated to `out_len`, using stage `stage_budget` of `f`.
/// Monotone in both budgets because stages only extend.
pub fn apply_k2(f: &K2Elem, g: &dyn Fn(usize) -> Nat, out_len: usize, stage_budget: usize) -> K2Output {
    let mut out = f.stage(stage_budget).image_along(g);
    out.truncate(out_len);
    let undefined_at_budget = out.len() < out_len;
    K2Output { out, undefined_at_budget }
}

#[derive(Clone, Debug)]
struct TableEntry {
    sigma: Str,
    image: Str,
    stage: usize,
}

/// `pair2(|σ|, L(σ))` with `L(ε) = 0` and `L(σ⌢x) = pair2(L(σ), x)`.
/// Injective, and `L` of a prefix is a subterm of `L` of the string.
pub fn image_code(sigma: &[Nat]) -> Nat {
    let l = sigma.iter().fold(Nat::zero(), |acc, x| Nat::pair(&acc, x));
    Nat::pair(&Nat::from_u64(sigma.len() as u64), &l)
}

/// The stagewise embedding of the first model into the second, for
/// indices `n ≤ N` and stages `s ≤ S`.
#[derive(Clone, Debug)]
pub struct K1K2Table {
    pub n: usize,
    pub stages: usize,
    entries: Vec<Vec<TableEntry>>,
    seqs: Vec<Str>,
    // seq_len[n][s] = length of the string of f_{n,s}
    seq_len: Vec<Vec<usize>>,
}

/// Builds `f_{n,s}` exactly per the construction, with `fuel_s = s`.
///
/// `a·b` is evaluated once at fuel `S`; by determinism and fuel
/// monotonicity it halts within `s` steps iff the recorded step count is
/// at most `s`. Values `c > N` are never reachable as table indices and
/// are treated as not yet halted.
pub fn embed_k1_to_k2(n_bound: usize, stage_bound: usize, oracles: &OracleTable) -> K1K2Table {
    let mut seqs: Vec<Str> = (0..=n_bound).map(|n| vec![Nat::from_u64(n as u64)]).collect();
    // L of every prefix of every sequence, see `image_code`
    let mut prefix_l: Vec<Vec<Nat>> =
        seqs.iter().map(|s| vec![Nat::zero(), Nat::pair(&Nat::zero(), &s[0])]).collect();
    let mut maps: Vec<K2Approx> = vec![K2Approx::new(); n_bound + 1];
    let mut entries: Vec<Vec<TableEntry>> = vec![Vec::new(); n_bound + 1];
    let mut seq_len: Vec<Vec<usize>> = vec![vec![1]; n_bound + 1];

    let mut halts: BTreeMap<(usize, u64), Option<(u64, usize)>> = BTreeMap::new();
    let mut halted = |a: usize, b: u64| -> Option<(u64, usize)> {
        *halts.entry((a, b)).or_insert_with(|| {
            match eval(&Nat::from_u64(a as u64), &Nat::from_u64(b), stage_bound as u64, oracles) {
                Outcome::Defined { value, steps } => {
                    let c = value.as_u64().filter(|&c| c as usize <= n_bound)?;
                    Some((steps, c as usize))
                }
                Outcome::OutOfFuel => None,
            }
        })
    };

    for s in 0..stage_bound {
        let snapshot: Vec<usize> = seqs.iter().map(Vec::len).collect();
        for a in 0..=s.min(n_bound) {
            for t in 0..=s as u64 {
                let tau = str_decode(&Nat::from_u64(t));
                if maps[a].get(&tau).is_some() {
                    continue;
                }
                let target = tau.first().and_then(Nat::as_u64).filter(|&b| b <= s as u64).and_then(|b| {
                    let (steps, c) = halted(a, b)?;
                    (steps <= s as u64 && c <= s).then_some(c)
                });
                let image: Str = match target {
                    Some(c) => seqs[c][..snapshot[c]].to_vec(),
                    None => Vec::new(),
                };
                let img_code = match target {
                    Some(c) => Nat::pair(&Nat::from_u64(snapshot[c] as u64), &prefix_l[c][snapshot[c]]),
                    None => image_code(&[]),
                };
                maps[a].insert(tau.clone(), image.clone()).expect("the construction is monotone");
                let entry = Nat::pair(&Nat::from_u64(t), &img_code);
                let last = prefix_l[a].last().expect("nonempty").clone();
                prefix_l[a].push(Nat::pair(&last, &entry));
                seqs[a].push(entry);
                entries[a].push(TableEntry { sigma: tau, image, stage: s + 1 });
            }
        }
        for (n, lens) in seq_len.iter_mut().enumerate() {
            lens.push(seqs[n].len());
        }
    }
    K1K2Table { n: n_bound, stages: stage_bound, entries, seqs, seq_len }
}

impl K1K2Table {
    /// Stage `s` of the map of `f_n` (stages past the bound repeat it).
    pub fn approx(&self, n: usize, s: usize) -> K2Approx {
        let mut m = K2Approx::new();
        for e in self.entries[n].iter().take_while(|e| e.stage <= s) {
            m.map.insert(e.sigma.clone(), e.image.clone());
        }
        m
    }

    /// The string `f_{n,s}`.
    pub fn string(&self, n: usize, s: usize) -> &[Nat] {
        &self.seqs[n][..self.seq_len[n][s.min(self.stages)]]
    }

    pub fn elem(self: &Arc<Self>, n: usize) -> K2Elem {
        let t = Arc::clone(self);
        K2Elem::new(move |s| t.approx(n, s))
    }

    /// Validates every stage of every element, and that each stage
    /// extends the previous one. Returns the number of approximations
    /// checked.
    pub fn validate(&self) -> Result<usize, (usize, usize, K2Error)> {
        let mut checked = 0;
        for n in 0..=self.n {
            for s in 0..=self.stages {
                self.approx(n, s).validate().map_err(|e| (n, s, e))?;
                if s > 0 && !str_is_prefix(self.string(n, s - 1), self.string(n, s)) {
                    let short = self.string(n, s - 1).to_vec();
                    let long = self.string(n, s).to_vec();
                    return Err((n, s, K2Error::NonMonotone { shorter: short, longer: long }));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
}

/// How `a·b` behaves relative to the table's budgets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceStatus {
    /// Halted with value `c` by the first stage that examines `⟨b⟩`.
    Defined { c: u64 },
    /// Out of fuel at the stage bound, or a value beyond the table.
    Divergent,
    /// Halts, but only after `⟨b⟩` was examined; neither implication
    /// applies at these budgets.
    Late,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreservationCheck {
    pub a: u64,
    pub b: u64,
    pub status: SourceStatus,
    pub inputs: usize,
    pub failures: usize,
}

/// Status of `a·b` for `table`, using the same evaluation rule as the
/// construction.
pub fn source_status(table: &K1K2Table, a: u64, b: u64, oracles: &OracleTable) -> SourceStatus {
    let s = table.stages as u64;
    let first = a.max(image_code_of_singleton(b));
    match eval(&Nat::from_u64(a), &Nat::from_u64(b), s, oracles) {
        Outcome::Defined { value, steps } => match value.as_u64() {
            Some(c) if c as usize <= table.n => {
                if a as usize <= table.n && first < s && steps <= first && c <= first {
                    SourceStatus::Defined { c }
                } else {
                    SourceStatus::Late
                }
            }
            _ => SourceStatus::Divergent,
        },
        Outcome::OutOfFuel => SourceStatus::Divergent,
    }
}

// str_code(⟨b⟩) = pair2(0, b) + 1
fn image_code_of_singleton(b: u64) -> u64 {
    b.saturating_mul(b.saturating_add(1)) / 2 + b + 1
}

/// Checks the two preservation implications for `a·b` on inputs `g ⊒ ⟨b⟩`:
/// a defined `a·b = c` must give a nonempty prefix of `f_c`, a divergent
/// one must give `ε` with the undefined flag.
pub fn check_preservation(
    table: &Arc<K1K2Table>,
    a: u64,
    b: u64,
    tails: &[Vec<u64>],
    oracles: &OracleTable,
) -> PreservationCheck {
    if a as usize > table.n {
        return PreservationCheck { a, b, status: SourceStatus::Late, inputs: 0, failures: 0 };
    }
    let status = source_status(table, a, b, oracles);
    let fa = table.elem(a as usize);
    let mut failures = 0;
    for tail in tails {
        let tail = tail.clone();
        let g = move |i: usize| {
            if i == 0 {
                Nat::from_u64(b)
            } else {
                Nat::from_u64(tail.get(i - 1).copied().unwrap_or(0))
            }
        };
        let out = apply_k2(&fa, &g, usize::MAX, table.stages);
        let ok = match status {
            SourceStatus::Defined { c } => {
                !out.out.is_empty() && str_is_prefix(&out.out, table.string(c as usize, table.stages))
            }
            SourceStatus::Divergent => out.out.is_empty() && out.undefined_at_budget,
            SourceStatus::Late => true,
        };
        failures += usize::from(!ok);
    }
    PreservationCheck { a, b, status, inputs: tails.len(), failures }
}

/// The join `f ⊕ g`: even points read `f`, odd points read `g`.
pub const JOIN_ORACLE_ID: u64 = 100;

pub type Provider = Arc<dyn Fn(&Nat) -> Nat + Send + Sync>;

/// `(f·g)(x) = Φ^{f⊕g}_{f(0)}(x)`, pointwise. Whether the result is total,
/// which the alternative coding requires of a defined application, is not
/// certified.
pub fn apply_alt(f: &Provider, g: &Provider, x: &Nat, fuel: u64) -> Outcome {
    let (f2, g2) = (f.clone(), g.clone());
    let join: OracleFn = Arc::new(move |y: &Nat| {
        let half = Nat::from_biguint(&(y.to_biguint() >> 1u32));
        Some(if y.to_biguint().bit(0) { g2(&half) } else { f2(&half) })
    });
    let table = OracleTable::new().with(JOIN_ORACLE_ID, "join", join);
    eval(&f(&Nat::zero()), x, fuel, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::prog::{code, input, num, pair as pr, prim, succ};
    use crate::machine::builtin;

    fn n(v: u64) -> Nat {
        Nat::from_u64(v)
    }

    #[test]
    fn undefined_element_gives_flag() {
        let out = apply_k2(&K2Elem::undefined(), &|_| n(3), 4, 200);
        assert!(out.out.is_empty());
        assert!(out.undefined_at_budget);
    }

    #[test]
    fn identity_coding_copies_input() {
        let out = apply_k2(&K2Elem::identity(), &|_| n(5), 2, 400);
        assert_eq!(out.out, vec![n(5), n(5)]);
        assert!(!out.undefined_at_budget);
    }

    #[test]
    fn budget_monotone() {
        let g = |i: usize| n((i % 3) as u64);
        for s in [5usize, 20, 60] {
            let small = apply_k2(&K2Elem::identity(), &g, 8, s);
            let big = apply_k2(&K2Elem::identity(), &g, 16, 2 * s);
            assert!(str_is_prefix(&small.out, &big.out), "s = {s}");
        }
    }

    #[test]
    fn approx_rejects_non_monotone() {
        let mut m = K2Approx::new();
        m.insert(vec![n(1)], vec![n(7)]).unwrap();
        assert!(matches!(m.insert(vec![n(1), n(2)], vec![n(8)]), Err(K2Error::NonMonotone { .. })));
        m.insert(vec![n(1), n(2)], vec![n(7), n(0)]).unwrap();
        assert!(matches!(m.insert(vec![], vec![n(9)]), Err(K2Error::NonMonotone { .. })));
        assert!(matches!(m.insert(vec![n(1)], vec![]), Err(K2Error::Duplicate(_))));
    }

    #[test]
    fn small_table_heads_and_preservation() {
        let t = Arc::new(embed_k1_to_k2(20, 20, &OracleTable::new()));
        assert_eq!(t.validate().unwrap(), 21 * 21);
        for k in 0..=20 {
            assert_eq!(t.string(k, 0), &[n(k as u64)]);
            assert_eq!(t.string(k, 20)[0], n(k as u64));
        }
        // code 0 is Input, so 0·b = b; ⟨b⟩ has code b(b+1)/2 + 1
        for b in 0..=4u64 {
            let g = move |i: usize| if i == 0 { n(b) } else { n(i as u64) };
            let out = apply_k2(&t.elem(0), &g, 64, 20);
            assert!(!out.out.is_empty());
            assert!(str_is_prefix(&out.out, t.string(b as usize, 20)), "b = {b}");
        }
    }

    #[test]
    fn entries_code_their_images() {
        let t = embed_k1_to_k2(12, 12, &OracleTable::new());
        for k in 0..=12 {
            let seq = t.string(k, 12);
            assert_eq!(seq.len(), 1 + t.entries[k].len());
            for (e, x) in t.entries[k].iter().zip(&seq[1..]) {
                assert_eq!(x.unpair().1, image_code(&e.image));
            }
        }
    }

    #[test]
    fn full_size_table_validates() {
        let t = embed_k1_to_k2(64, 64, &OracleTable::new());
        assert_eq!(t.validate().unwrap(), 65 * 65);
    }

    #[test]
    fn preservation_on_full_table() {
        let none = OracleTable::new();
        let t = Arc::new(embed_k1_to_k2(64, 64, &none));
        let tails = vec![vec![], vec![0, 0, 0], vec![1, 2, 3], vec![7; 5]];
        let (mut defined, mut divergent) = (0, 0);
        for a in 0..64 {
            for b in 0..=10 {
                let r = check_preservation(&t, a, b, &tails, &none);
                assert_eq!(r.failures, 0, "{r:?}");
                match r.status {
                    SourceStatus::Defined { .. } => defined += 1,
                    SourceStatus::Divergent => divergent += 1,
                    SourceStatus::Late => {}
                }
            }
        }
        assert!(defined >= 50, "{defined}");
        assert!(divergent >= 10, "{divergent}");
    }

    #[test]
    fn alt_coding_reads_oracle() {
        // f(0) computes g(x) by querying the join at 2x+1
        let prog = code(&prim(JOIN_ORACLE_ID, succ(prim(builtin::MUL, pr(num(2), input())))));
        let f: Provider = Arc::new(move |_| prog.clone());
        let g: Provider = Arc::new(|x| x.clone());
        for x in 0..10 {
            assert_eq!(apply_alt(&f, &g, &n(x), 1000).value(), Some(&n(x)));
        }
        // tag 13 is not a node
        let bad: Provider = Arc::new(|_| Nat::pair(&n(crate::machine::TAG_LIMIT), &n(0)));
        for x in 0..5 {
            assert_eq!(apply_alt(&bad, &g, &n(x), 1000), Outcome::OutOfFuel);
        }
    }
}
