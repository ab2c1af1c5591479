// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Embeddings between relativized machines.
//!
//! A source machine `K1^X` calls the oracle primitives of `X`; a target
//! machine `K1^Y` calls those of `Y`. Given, for every source primitive, a
//! program over the target primitives computing it, [`embed_k1_rel`] builds
//! `F(a) = s11(e, a)` where `e` simulates source programs on the target:
//! `F(a)·F(b)` translates `a` at run time, runs the translation on `b`, and
//! wraps the result back into the range of `F`.
//!
//! The translation is a code-to-code program, not a host function, because
//! source programs build and run codes of their own. Every `Run(c, x)` is
//! rewritten to translate `c` when it is reached.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::prog::*;
use crate::machine::{builtin, eval, s11, OracleFn, OracleTable, Outcome, FIRST_ORACLE_ID};
use crate::machine::{TAG_APPEND, TAG_AT, TAG_FST, TAG_IFEQ, TAG_LEN, TAG_PAD, TAG_PAIR, TAG_PRIM, TAG_RUN, TAG_SND};
use crate::nat::Nat;
use crate::par;
use crate::pca::{apply, bot_code, i_code};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("unknown oracle primitive {0:?}")]
    UnknownPrim(String),
    #[error("oracle id {0} is reserved for kernel built-ins")]
    ReservedId(u64),
    #[error("no translator for source primitive {0}")]
    MissingTranslator(u64),
    #[error("translator for primitive {id} disagrees with it or diverges at input {input}")]
    TranslatorMismatch { id: u64, input: u64 },
}

/// Host functions that may be bound to oracle ids by name.
pub fn named_oracle(name: &str) -> Option<OracleFn> {
    let f: OracleFn = match name {
        "parity" => Arc::new(|x: &Nat| Some(Nat::from_u64(low_bit(x)))),
        "succ" => Arc::new(|x: &Nat| Some(x.succ())),
        "double" => Arc::new(|x: &Nat| Some(x.add(x))),
        "half" => Arc::new(|x: &Nat| {
            let v = x.to_biguint() >> 1u32;
            Some(Nat::from_biguint(&v))
        }),
        _ => return None,
    };
    Some(f)
}

fn low_bit(x: &Nat) -> u64 {
    match x.as_u64() {
        Some(v) => v & 1,
        None => x.to_biguint().bit(0) as u64,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedPrim {
    pub id: u64,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatorEntry {
    pub id: u64,
    /// Program over the target primitives.
    pub program: Nat,
}

/// The JSON form of an [`EmbeddingSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub source: Vec<NamedPrim>,
    pub target: Vec<NamedPrim>,
    pub translators: Vec<TranslatorEntry>,
}

fn resolve_table(prims: &[NamedPrim]) -> Result<OracleTable, EmbeddingError> {
    let mut t = OracleTable::new();
    for p in prims {
        if p.id < FIRST_ORACLE_ID {
            return Err(EmbeddingError::ReservedId(p.id));
        }
        let f = named_oracle(&p.name).ok_or_else(|| EmbeddingError::UnknownPrim(p.name.clone()))?;
        t.insert(p.id, &p.name, f);
    }
    Ok(t)
}

#[derive(Clone, Debug)]
pub struct EmbeddingSpec {
    pub source: OracleTable,
    pub target: OracleTable,
    /// Source primitive id to a program over the target computing it.
    pub translators: BTreeMap<u64, Nat>,
}

impl EmbeddingSpec {
    pub fn from_config(cfg: &EmbeddingConfig) -> Result<Self, EmbeddingError> {
        let source = resolve_table(&cfg.source)?;
        let target = resolve_table(&cfg.target)?;
        let translators: BTreeMap<u64, Nat> = cfg.translators.iter().map(|t| (t.id, t.program.clone())).collect();
        for id in source.ids() {
            if !translators.contains_key(&id) {
                return Err(EmbeddingError::MissingTranslator(id));
            }
        }
        Ok(EmbeddingSpec { source, target, translators })
    }

    pub fn from_json(s: &str) -> Result<Self, String> {
        let cfg: EmbeddingConfig = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Self::from_config(&cfg).map_err(|e| e.to_string())
    }

    /// Both machines without oracles.
    pub fn empty() -> Self {
        EmbeddingSpec { source: OracleTable::new(), target: OracleTable::new(), translators: BTreeMap::new() }
    }

    /// `X` = parity at id 64, `Y` = parity at 64 and successor at 65.
    pub fn parity_into_parity_succ() -> Self {
        let cfg = EmbeddingConfig {
            source: vec![NamedPrim { id: 64, name: "parity".into() }],
            target: vec![NamedPrim { id: 64, name: "parity".into() }, NamedPrim { id: 65, name: "succ".into() }],
            translators: vec![TranslatorEntry { id: 64, program: code(&prim(64, input())) }],
        };
        Self::from_config(&cfg).expect("built-in spec resolves")
    }

    /// `X` = successor oracle at 65, `Y` = no oracle: the translator is
    /// the kernel's own successor.
    pub fn succ_into_plain() -> Self {
        let cfg = EmbeddingConfig {
            source: vec![NamedPrim { id: 65, name: "succ".into() }],
            target: vec![],
            translators: vec![TranslatorEntry { id: 65, program: code(&succ(input())) }],
        };
        Self::from_config(&cfg).expect("built-in spec resolves")
    }

    /// Checks every translator against its primitive on `0..probe`. This is
    /// the desk-scale witness of `X ≤_T Y`.
    pub fn validate(&self, probe: u64, fuel: u64) -> Result<(), EmbeddingError> {
        for (&id, prog) in &self.translators {
            for x in 0..probe {
                let xn = Nat::from_u64(x);
                let want = self.source.call(id, &xn);
                let got = eval(prog, &xn, fuel, &self.target);
                if want.is_none() || got.value() != want.as_ref() {
                    return Err(EmbeddingError::TranslatorMismatch { id, input: x });
                }
            }
        }
        Ok(())
    }
}

/// Self-passing code rewriter: maps a source code to a target code with
/// the same behavior, given translators for the source primitives.
///
/// Kernel built-ins are kept, known source primitives become a `Run` of
/// their translator, unknown oracle ids become `Bot` and invalid tags are
/// kept (they stay invalid). `Run(c, x)` becomes `Run(Run(T, c'), x')` so
/// that codes computed at run time are translated before they run.
pub fn translate_program(translators: &BTreeMap<u64, Nat>) -> Nat {
    let c = arg();
    let tag = fst(c.clone());
    let p = snd(c.clone());
    let tr = |e: P| recurse(e);
    let entry = q_s11(me(), me());

    let unary = |t: u64| pair(num(t), tr(p.clone()));
    let binary = |t: u64| pair(num(t), pair(tr(fst(p.clone())), tr(snd(p.clone()))));
    let ifeq = pair(
        num(TAG_IFEQ),
        pair(
            pair(tr(fst(fst(p.clone()))), tr(snd(fst(p.clone())))),
            pair(tr(fst(snd(p.clone()))), tr(snd(snd(p.clone())))),
        ),
    );
    let run_node = q_run(q_run(q_num(entry), tr(fst(p.clone()))), tr(snd(p.clone())));

    let k = fst(p.clone());
    let a = snd(p.clone());
    let mut oracle_case = numn(&bot_code());
    for (id, prog) in translators.iter().rev() {
        oracle_case = if_eq(k.clone(), num(*id), q_run(q_num(numn(prog)), tr(a.clone())), oracle_case);
    }
    let prim_node = if_eq(
        lt(k.clone(), num(builtin::COUNT)),
        num(1),
        pair(num(TAG_PRIM), pair(k, tr(a.clone()))),
        oracle_case,
    );
    let pad_node = pair(num(TAG_PAD), pair(fst(p.clone()), tr(snd(p.clone()))));

    let cases: Vec<(u64, P)> = vec![
        (TAG_PAIR, binary(TAG_PAIR)),
        (TAG_FST, unary(TAG_FST)),
        (TAG_SND, unary(TAG_SND)),
        (TAG_IFEQ, ifeq),
        (TAG_RUN, run_node),
        (TAG_PRIM, prim_node),
        (TAG_PAD, pad_node),
        (TAG_LEN, unary(TAG_LEN)),
        (TAG_AT, binary(TAG_AT)),
        (TAG_APPEND, binary(TAG_APPEND)),
    ];
    // Input, Num, Bot and invalid tags are copied.
    let mut body = c;
    for (t, e) in cases.into_iter().rev() {
        body = if_eq(tag.clone(), num(t), e, body);
    }
    code(&body)
}

/// The computable embedding `K1^X → K1^Y` of a spec.
#[derive(Clone, Debug)]
pub struct K1RelEmbedding {
    pub spec: EmbeddingSpec,
    /// Entry point of the translator.
    pub translator: Nat,
    /// `e` with `F(a) = s11(e, a)`.
    pub simulator: Nat,
}

impl K1RelEmbedding {
    pub fn map(&self, a: &Nat) -> Nat {
        s11(&self.simulator, a)
    }

    /// Host-side translation of `a`, for inspection.
    pub fn translate(&self, a: &Nat, fuel: u64) -> Outcome {
        eval(&self.translator, a, fuel, &self.spec.target)
    }
}

/// Builds `F(a) = s11(e, a)` for `e = s11(R, R)`, where on `⟨a, x⟩` the
/// simulator `R` checks `x = s11(e, b)` for the `b` read off `x`, then
/// returns `s11(e, T(a)·b)`. Off the range of `F` it diverges.
pub fn embed_k1_rel(spec: EmbeddingSpec) -> K1RelEmbedding {
    let tr = translate_program(&spec.translators);
    let translator = s11(&tr, &tr);

    let a = fst(arg());
    let x = snd(arg());
    let e_rt = q_s11(me(), me());
    // x = code(Run(Num e, Pair(Num b, Input)))
    let b = snd(fst(snd(snd(snd(x.clone())))));
    let body = if_eq(
        x,
        q_s11(e_rt.clone(), b.clone()),
        q_s11(e_rt, run(run(numn(&translator), a), b)),
        bot(),
    );
    let r = code(&body);
    K1RelEmbedding { spec, translator, simulator: s11(&r, &r) }
}

/// Target fuel granted per unit of source fuel when checking an embedding.
/// Translation walks every code that is run, so the overhead is
/// proportional to code size; the factor is generous for sampled programs.
pub const FUEL_FACTOR: u64 = 200;
pub const FUEL_SLACK: u64 = 200_000;

pub fn target_fuel(fuel: u64) -> u64 {
    fuel.saturating_mul(FUEL_FACTOR).saturating_add(FUEL_SLACK)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingFailure {
    pub a: Nat,
    pub b: Nat,
    pub source_value: Nat,
    pub target: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub checked: usize,
    pub passed: usize,
    /// Source application out of fuel. The divergence clause can only be
    /// "not refuted at fuel", so these pairs are set aside.
    pub untestable: usize,
    pub failures: Vec<EmbeddingFailure>,
}

impl EmbeddingReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `a·b = c ⟹ F(a)·F(b) = F(c)` on every sample.
pub fn check_embedding<F>(
    f: F,
    source: &OracleTable,
    target: &OracleTable,
    pairs: &[(Nat, Nat)],
    fuel: u64,
    target_fuel: u64,
) -> EmbeddingReport
where
    F: Fn(&Nat) -> Nat + Sync + Send,
{
    enum R {
        Pass,
        Untestable,
        Fail(EmbeddingFailure),
    }
    let results = par::map_indexed(pairs.len(), |i| {
        let (a, b) = &pairs[i];
        let Outcome::Defined { value: c, .. } = apply(a, b, fuel, source) else {
            return R::Untestable;
        };
        let got = apply(&f(a), &f(b), target_fuel, target);
        if got.value() == Some(&f(&c)) {
            R::Pass
        } else {
            R::Fail(EmbeddingFailure { a: a.clone(), b: b.clone(), source_value: c, target: got })
        }
    });
    let mut rep = EmbeddingReport { checked: pairs.len(), passed: 0, untestable: 0, failures: Vec::new() };
    for r in results {
        match r {
            R::Pass => rep.passed += 1,
            R::Untestable => rep.untestable += 1,
            R::Fail(x) => rep.failures.push(x),
        }
    }
    rep
}

/// First collision of `f` on `codes`, if any.
pub fn find_collision<F: Fn(&Nat) -> Nat>(f: F, codes: impl IntoIterator<Item = Nat>) -> Option<(Nat, Nat)> {
    let mut seen: HashMap<Nat, Nat> = HashMap::new();
    for c in codes {
        let img = f(&c);
        if let Some(prev) = seen.get(&img) {
            return Some((prev.clone(), c));
        }
        seen.insert(img, c);
    }
    None
}

/// `e ≠ 0` with `eⁿ·0 = n` for every `n`, where `e⁰ = I` and
/// `e^{n+1} = eⁿ·e`.
///
/// `f(n) = s11(d, n)` for `d = s11(D, D)` and `D` answering `n` on `0` and
/// `f(n+1)` on anything else. No `s11` code is `0`, so `f(n)·f(1) = f(n+1)`
/// and `e = f(1)`.
pub fn iterator_index() -> Nat {
    let n = fst(arg());
    let x = snd(arg());
    let d_prog = code(&if_eq(x, num(0), n.clone(), q_s11(q_s11(me(), me()), succ(n))));
    let d = s11(&d_prog, &d_prog);
    s11(&d, &Nat::from_u64(1))
}

/// `eⁿ·0`, or `None` if some application runs out of fuel.
pub fn iterate_at_zero(e: &Nat, n: u64, fuel: u64, oracles: &OracleTable) -> Option<Nat> {
    let mut acc = i_code();
    for k in 0..n {
        acc = if k == 0 { e.clone() } else { apply(&acc, e, fuel, oracles).value()?.clone() };
    }
    apply(&acc, &Nat::zero(), fuel, oracles).value().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::{k_code, s_code};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n(v: u64) -> Nat {
        Nat::from_u64(v)
    }

    fn sample_pairs(extra: &[Nat], count: usize, seed: u64) -> Vec<(Nat, Nat)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<Nat> = extra.to_vec();
        pool.extend([k_code(), s_code(), i_code()]);
        (0..count)
            .map(|_| {
                let a = if rng.gen_bool(0.5) { pool[rng.gen_range(0..pool.len())].clone() } else { n(rng.gen_range(0..5000)) };
                (a, n(rng.gen_range(0..200)))
            })
            .collect()
    }

    #[test]
    fn iterator_law() {
        let e = iterator_index();
        assert!(!e.is_zero());
        let none = OracleTable::new();
        for k in 0..=25 {
            assert_eq!(iterate_at_zero(&e, k, 1_000_000, &none), Some(n(k)), "n = {k}");
        }
    }

    #[test]
    fn translation_preserves_behavior() {
        let emb = embed_k1_rel(EmbeddingSpec::succ_into_plain());
        let src = code(&if_eq(prim(65, input()), num(4), num(1), run(num(code(&prim(65, input())).as_u64().unwrap()), input())));
        let t = emb.translate(&src, 100_000).value().unwrap().clone();
        let none = OracleTable::new();
        for x in 0..8 {
            let want = eval(&src, &n(x), 10_000, &emb.spec.source);
            assert_eq!(eval(&t, &n(x), 100_000, &none).value(), want.value(), "x = {x}");
        }
    }

    #[test]
    fn unknown_oracle_becomes_bot() {
        let emb = embed_k1_rel(EmbeddingSpec::empty());
        let t = emb.translate(&code(&prim(40, input())), 10_000).value().unwrap().clone();
        assert_eq!(eval(&t, &n(3), 10_000, &OracleTable::new()), Outcome::OutOfFuel);
    }

    #[test]
    fn empty_oracle_embedding_preserves_application() {
        let emb = embed_k1_rel(EmbeddingSpec::empty());
        let pairs = sample_pairs(&[], 80, 7);
        let none = OracleTable::new();
        let rep = check_embedding(|a| emb.map(a), &none, &none, &pairs, 2_000, target_fuel(2_000));
        assert!(rep.ok(), "{:?}", rep.failures);
        assert!(rep.passed >= 40, "{rep:?}");
    }

    #[test]
    fn parity_embedding_preserves_application() {
        let spec = EmbeddingSpec::parity_into_parity_succ();
        spec.validate(64, 1000).unwrap();
        let progs = [
            code(&prim(64, input())),
            code(&if_eq(prim(64, input()), num(1), succ(input()), num(0))),
            code(&run(num(code(&prim(64, input())).as_u64().unwrap()), succ(input()))),
        ];
        let emb = embed_k1_rel(spec);
        let pairs = sample_pairs(&progs, 60, 11);
        let rep = check_embedding(|a| emb.map(a), &emb.spec.source, &emb.spec.target, &pairs, 2_000, target_fuel(2_000));
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn identity_and_corrupted_maps() {
        let none = OracleTable::new();
        let pairs: Vec<(Nat, Nat)> = vec![(code(&succ(input())), n(4)), (code(&num(9)), n(1)), (code(&input()), n(3))];
        let rep = check_embedding(|a| a.clone(), &none, &none, &pairs, 100, 100);
        assert_eq!(rep.passed, 3);
        let emb = embed_k1_rel(EmbeddingSpec::empty());
        let bad = |c: &Nat| if *c == n(5) { emb.map(c).succ() } else { emb.map(c) };
        let rep = check_embedding(bad, &none, &none, &pairs, 100, target_fuel(100));
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.failures[0].source_value, n(5));
    }

    #[test]
    fn divergent_sources_are_untestable() {
        let none = OracleTable::new();
        let pairs = vec![(bot_code(), n(0))];
        let rep = check_embedding(|a| a.clone(), &none, &none, &pairs, 100, 100);
        assert_eq!(rep.untestable, 1);
    }

    #[test]
    fn injective_on_small_codes() {
        let emb = embed_k1_rel(EmbeddingSpec::empty());
        assert_eq!(find_collision(|a| emb.map(a), (0..2000).map(n)), None);
    }

    #[test]
    fn config_round_trip_and_errors() {
        let cfg = EmbeddingConfig {
            source: vec![NamedPrim { id: 64, name: "parity".into() }],
            target: vec![NamedPrim { id: 66, name: "half".into() }],
            translators: vec![],
        };
        let js = serde_json::to_string(&cfg).unwrap();
        assert_eq!(EmbeddingSpec::from_json(&js).unwrap_err(), EmbeddingError::MissingTranslator(64).to_string());
        let bad = EmbeddingConfig { source: vec![NamedPrim { id: 3, name: "succ".into() }], ..cfg.clone() };
        assert_eq!(EmbeddingSpec::from_config(&bad).unwrap_err(), EmbeddingError::ReservedId(3));
        // a translator that is wrong on odd inputs
        let wrong = EmbeddingConfig { translators: vec![TranslatorEntry { id: 64, program: code(&num(0)) }], ..cfg };
        let spec = EmbeddingSpec::from_config(&wrong).unwrap();
        assert_eq!(spec.validate(8, 100), Err(EmbeddingError::TranslatorMismatch { id: 64, input: 1 }));
    }
}
