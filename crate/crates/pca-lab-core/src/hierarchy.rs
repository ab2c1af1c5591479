// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! The extensionality relations `∼_α` as bounded procedures.
//!
//! `s ∼₀ t` is Kleene equality, `s ∼_{α+1} t` means `s·x ∼_α t·x` for
//! every `x`, and at a limit `λ`, `s ∼_λ t` means `s ∼_β t` for some
//! `β < λ`. The relations ascend with `α`, so only the refutable direction
//! (`≁_α`) has finite evidence; everything here is either a checkable
//! certificate or sampled evidence.
//!
//! A refutation at a limit level `λ` would need `s ≁_β t` for every
//! `β < λ`, which no finite object witnesses. A `Drop(β, c)` node therefore
//! certifies `s ≁_β t` for the one recorded `β`; [`check_cert`] reports such
//! certificates as [`CertVerdict::HoldsModuloCofinality`]. Families of drops
//! along a fundamental sequence are produced by [`witness_cert`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::prog::{
    append, arg, code, const_self_template, fst, if_eq, input, me, num, numn, pair, prim, q_num, q_pair, q_run, q_s11,
    recurse, run, snd,
};
use crate::machine::{fix_padded, pad, s11, OracleTable, Outcome};
use crate::nat::Nat;
use crate::ordinals::{self, kb_rank, ord_code, FiniteTree, Kind, KbRank, OrdNotation};
use crate::par;
use crate::pca::{eval_term, k1_code, Term, TriVerdict, UnknownReason};

/// Oracle table every hierarchy construction evaluates against: the
/// notation kernel, needed by limit-level witness programs.
pub fn kernel_oracles() -> &'static OracleTable {
    static T: OnceLock<OracleTable> = OnceLock::new();
    T.get_or_init(ordinals::ordinal_oracles)
}

/// Finite refutation of `s ∼_α t`. Serialized with a `kind` tag; naturals
/// use the [`Nat`] JSON form and ordinals the literal syntax.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistinguishCert {
    /// Both sides defined at `fuel`, with distinct values.
    Leaf0 { fuel: u64, v1: Nat, v2: Nat },
    /// Side `side` (1 or 2) out of fuel, the other defined with `v_other`.
    LeafDiv { side: u8, fuel: u64, v_other: Nat },
    /// Successor level: apply both sides to `x`.
    Step { x: Nat, inner: Box<DistinguishCert> },
    /// Limit level: descend to `beta`.
    Drop { beta: OrdNotation, inner: Box<DistinguishCert> },
}

impl DistinguishCert {
    pub fn step(x: impl Into<Nat>, inner: DistinguishCert) -> Self {
        DistinguishCert::Step { x: x.into(), inner: Box::new(inner) }
    }

    pub fn drop_to(beta: OrdNotation, inner: DistinguishCert) -> Self {
        DistinguishCert::Drop { beta, inner: Box::new(inner) }
    }

    /// Number of `Step` nodes on the (unique) path.
    pub fn steps(&self) -> usize {
        match self {
            DistinguishCert::Step { inner, .. } => 1 + inner.steps(),
            DistinguishCert::Drop { inner, .. } => inner.steps(),
            _ => 0,
        }
    }

    /// The argument string fed to both sides.
    pub fn arguments(&self) -> Vec<Nat> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                DistinguishCert::Step { x, inner } => {
                    out.push(x.clone());
                    cur = inner;
                }
                DistinguishCert::Drop { inner, .. } => cur = inner,
                _ => return out,
            }
        }
    }

    pub fn has_drop(&self) -> bool {
        match self {
            DistinguishCert::Step { inner, .. } => inner.has_drop(),
            DistinguishCert::Drop { .. } => true,
            _ => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertVerdict {
    /// Every leaf is a re-verified `Leaf0` and no limit level was crossed.
    Holds,
    /// Valid under the divergence claims of its `LeafDiv` leaves.
    HoldsModuloDivergence,
    /// Valid, but crosses a limit level through a single `Drop`: the
    /// statement certified there is `≁_β` for the recorded `β`.
    HoldsModuloCofinality { divergence: bool },
    Fails(String),
}

impl CertVerdict {
    pub fn is_valid(&self) -> bool {
        !matches!(self, CertVerdict::Fails(_))
    }
}

#[derive(Default)]
struct CertFlags {
    divergence: bool,
    cofinality: bool,
}

fn apply_term(t: &Term, x: &Nat) -> Term {
    Term::app(t.clone(), Term::Elem(x.clone()))
}

fn eval_closed(t: &Term, fuel: u64, oracles: &OracleTable) -> Outcome {
    eval_term(t, fuel, oracles).expect("hierarchy only evaluates closed terms")
}

/// Re-evaluates every leaf of `cert` with fuel at most `fuel_cap`.
pub fn check_cert(
    s: &Term,
    t: &Term,
    alpha: &OrdNotation,
    cert: &DistinguishCert,
    fuel_cap: u64,
    oracles: &OracleTable,
) -> CertVerdict {
    if !s.is_closed() || !t.is_closed() {
        return CertVerdict::Fails("open term".into());
    }
    let mut flags = CertFlags::default();
    match check_rec(s.clone(), t.clone(), alpha, cert, fuel_cap, oracles, &mut flags) {
        Err(reason) => CertVerdict::Fails(reason),
        Ok(()) if flags.cofinality => CertVerdict::HoldsModuloCofinality { divergence: flags.divergence },
        Ok(()) if flags.divergence => CertVerdict::HoldsModuloDivergence,
        Ok(()) => CertVerdict::Holds,
    }
}

fn check_rec(
    s: Term,
    t: Term,
    alpha: &OrdNotation,
    cert: &DistinguishCert,
    cap: u64,
    oracles: &OracleTable,
    flags: &mut CertFlags,
) -> Result<(), String> {
    use DistinguishCert::*;
    match (cert, alpha.kind()) {
        (Leaf0 { fuel, v1, v2 }, Kind::Zero) => {
            if *fuel > cap {
                return Err(format!("leaf fuel {fuel} exceeds cap {cap}"));
            }
            if v1 == v2 {
                return Err("leaf claims equal values".into());
            }
            let a = eval_closed(&s, *fuel, oracles);
            let b = eval_closed(&t, *fuel, oracles);
            match (a.value(), b.value()) {
                (Some(x), Some(y)) if x == v1 && y == v2 => Ok(()),
                (Some(x), Some(y)) => Err(format!("leaf values are {x} and {y}, not {v1} and {v2}")),
                _ => Err(format!("a side is undefined at fuel {fuel}")),
            }
        }
        (LeafDiv { side, fuel, v_other }, Kind::Zero) => {
            if *fuel > cap {
                return Err(format!("leaf fuel {fuel} exceeds cap {cap}"));
            }
            let (div, other) = match side {
                1 => (&s, &t),
                2 => (&t, &s),
                _ => return Err(format!("side must be 1 or 2, got {side}")),
            };
            if eval_closed(other, *fuel, oracles).value() != Some(v_other) {
                return Err(format!("side {} is not defined with value {v_other} at fuel {fuel}", 3 - side));
            }
            // The divergence claim is checked at the cap, the strongest budget allowed.
            if eval_closed(div, cap, oracles).is_defined() {
                return Err(format!("side {side} converges within fuel {cap}"));
            }
            flags.divergence = true;
            Ok(())
        }
        (Step { x, inner }, Kind::Succ(p)) => check_rec(apply_term(&s, x), apply_term(&t, x), &p, inner, cap, oracles, flags),
        (Drop { beta, inner }, Kind::Limit) => {
            if beta >= alpha {
                return Err(format!("drop target {beta} is not below {alpha}"));
            }
            flags.cofinality = true;
            check_rec(s, t, beta, inner, cap, oracles, flags)
        }
        (c, k) => Err(format!("shape: {} node at a {} level {alpha}", node_name(c), kind_name(&k))),
    }
}

fn node_name(c: &DistinguishCert) -> &'static str {
    match c {
        DistinguishCert::Leaf0 { .. } => "leaf0",
        DistinguishCert::LeafDiv { .. } => "leaf_div",
        DistinguishCert::Step { .. } => "step",
        DistinguishCert::Drop { .. } => "drop",
    }
}

fn kind_name(k: &Kind) -> &'static str {
    match k {
        Kind::Zero => "zero",
        Kind::Succ(_) => "successor",
        Kind::Limit => "limit",
    }
}

/// The leaf certifying `s ≁₀ t` at `fuel`, if the outcomes provide one.
pub fn leaf_for(a: &Outcome, b: &Outcome, fuel: u64) -> Option<DistinguishCert> {
    match TriVerdict::from_outcomes(a, b) {
        TriVerdict::DistinctDefined(v1, v2) => Some(DistinguishCert::Leaf0 { fuel, v1, v2 }),
        TriVerdict::Unknown(UnknownReason::OneOutOfFuel(side)) => {
            let (side, v_other) = match side {
                crate::pca::Side::Left => (1, b.value()?.clone()),
                crate::pca::Side::Right => (2, a.value()?.clone()),
            };
            Some(DistinguishCert::LeafDiv { side, fuel, v_other })
        }
        _ => None,
    }
}

/// Search budget for [`refute_sim`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefuteBudget {
    /// Fundamental-sequence indices tried at each limit level.
    pub depth_budget: u64,
    pub pool: Vec<Nat>,
    pub fuel: u64,
    /// Hard cap on explored nodes; the search gives up beyond it.
    pub max_nodes: usize,
    /// When set, every limit `λ` is entered only through `λ[j]` for this
    /// `j`. A family of such searches over `j < N` is the finite evidence
    /// for `≁` at a limit.
    #[serde(default)]
    pub limit_index: Option<u64>,
}

impl RefuteBudget {
    pub fn new(depth_budget: u64, pool: Vec<Nat>, fuel: u64) -> Self {
        RefuteBudget { depth_budget, pool, fuel, max_nodes: 200_000, limit_index: None }
    }

    pub fn forced(mut self, j: u64) -> Self {
        self.limit_index = Some(j);
        self
    }
}

/// Bounded search for a certificate of `s ≁_α t`. Sound but incomplete: a
/// returned certificate always passes [`check_cert`] at `budget.fuel`.
///
/// Subtrees where both sides are defined and equal, or both out of fuel, are
/// pruned: every extension agrees (respectively diverges) as well.
pub fn refute_sim(
    s: &Term,
    t: &Term,
    alpha: &OrdNotation,
    budget: &RefuteBudget,
    oracles: &OracleTable,
) -> Option<DistinguishCert> {
    assert!(!budget.pool.is_empty(), "refute_sim needs a nonempty pool");
    let mut nodes = 0usize;
    refute_rec(s, t, alpha, budget, oracles, &mut nodes)
}

fn refute_rec(
    s: &Term,
    t: &Term,
    alpha: &OrdNotation,
    b: &RefuteBudget,
    oracles: &OracleTable,
    nodes: &mut usize,
) -> Option<DistinguishCert> {
    *nodes += 1;
    if *nodes > b.max_nodes {
        return None;
    }
    let oa = eval_closed(s, b.fuel, oracles);
    let ob = eval_closed(t, b.fuel, oracles);
    match TriVerdict::from_outcomes(&oa, &ob) {
        TriVerdict::EqualDefined(_) | TriVerdict::Unknown(UnknownReason::BothOutOfFuel) => return None,
        _ => {}
    }
    match alpha.kind() {
        Kind::Zero => leaf_for(&oa, &ob, b.fuel),
        Kind::Succ(p) => {
            // Once a side is defined its value is all later applications see.
            let s_red = oa.value().map(|v| Term::Elem(v.clone()));
            let t_red = ob.value().map(|v| Term::Elem(v.clone()));
            for x in &b.pool {
                let sx = apply_term(s_red.as_ref().unwrap_or(s), x);
                let tx = apply_term(t_red.as_ref().unwrap_or(t), x);
                if refute_rec(&sx, &tx, &p, b, oracles, nodes).is_some() {
                    // Re-run on the unreduced terms so leaf fuel matches check_cert.
                    let c = refute_rec(&apply_term(s, x), &apply_term(t, x), &p, b, oracles, nodes)?;
                    return Some(DistinguishCert::step(x.clone(), c));
                }
                if *nodes > b.max_nodes {
                    return None;
                }
            }
            None
        }
        Kind::Limit => {
            let range = match b.limit_index {
                Some(j) => j..j + 1,
                None => 0..b.depth_budget,
            };
            for n in range {
                let beta = alpha.fund_seq(n).expect("limit");
                if let Some(c) = refute_rec(s, t, &beta, b, oracles, nodes) {
                    return Some(DistinguishCert::drop_to(beta, c));
                }
                if *nodes > b.max_nodes {
                    return None;
                }
            }
            None
        }
    }
}

/// Outcome counts of [`probe_sim`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    /// Tuples on which both sides are defined with distinct values.
    pub counterexamples_found: u64,
    pub tuples_tried: u64,
    /// Tuples on which exactly one side is defined at the fuel.
    pub asymmetric: u64,
    /// Tuples on which both sides ran out of fuel.
    pub both_out_of_fuel: u64,
    pub first_counterexample: Option<Vec<Nat>>,
}

/// Parameters of [`probe_sim`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub samples: u64,
    pub fuel: u64,
    pub pool: Vec<Nat>,
    pub seed: u64,
    /// Least fundamental-sequence index used at limit levels.
    pub limit_floor: u64,
    pub max_tuple_len: usize,
}

impl ProbeConfig {
    pub fn new(samples: u64, fuel: u64, pool: Vec<Nat>, seed: u64) -> Self {
        ProbeConfig { samples, fuel, pool, seed, limit_floor: 2, max_tuple_len: 4096 }
    }
}

/// Samples argument tuples implied by `s ∼_α t` and compares the results.
///
/// Walking down from `α`: a successor level consumes one random pool element;
/// a limit level `λ` is replaced by `λ[J]` with `J` one more than the largest
/// small argument drawn so far (and at least `limit_floor`). At level 0 the
/// two sides are compared. A counterexample refutes `s ∼_β t` for the levels
/// actually chosen, which is evidence against, not a refutation of, `∼_α`
/// whenever a limit was crossed.
pub fn probe_sim(s: &Term, t: &Term, alpha: &OrdNotation, cfg: &ProbeConfig, oracles: &OracleTable) -> ProbeReport {
    let results = par::map_indexed(cfg.samples as usize, |i| probe_one(s, t, alpha, cfg, oracles, i as u64));
    aggregate(results)
}

/// Sequential twin of [`probe_sim`], used as the benchmark baseline.
pub fn probe_sim_seq(s: &Term, t: &Term, alpha: &OrdNotation, cfg: &ProbeConfig, oracles: &OracleTable) -> ProbeReport {
    let results = par::map_indexed_seq(cfg.samples as usize, |i| probe_one(s, t, alpha, cfg, oracles, i as u64));
    aggregate(results)
}

enum ProbeResult {
    Equal,
    Counter(Vec<Nat>),
    Asymmetric,
    BothOut,
}

fn aggregate(results: Vec<ProbeResult>) -> ProbeReport {
    let mut r = ProbeReport::default();
    for res in results {
        r.tuples_tried += 1;
        match res {
            ProbeResult::Equal => {}
            ProbeResult::Counter(args) => {
                r.counterexamples_found += 1;
                if r.first_counterexample.is_none() {
                    r.first_counterexample = Some(args);
                }
            }
            ProbeResult::Asymmetric => r.asymmetric += 1,
            ProbeResult::BothOut => r.both_out_of_fuel += 1,
        }
    }
    r
}

/// Per-sample generator: independent of thread scheduling.
fn sample_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// The argument tuple sample `i` feeds to both sides.
pub fn probe_tuple(alpha: &OrdNotation, cfg: &ProbeConfig, i: u64) -> Vec<Nat> {
    let mut rng = sample_rng(cfg.seed, i);
    let mut level = alpha.clone();
    let mut args: Vec<Nat> = Vec::new();
    let mut max_small = 0u64;
    while args.len() < cfg.max_tuple_len {
        match level.kind() {
            Kind::Zero => break,
            Kind::Succ(p) => {
                let x = cfg.pool[rng.gen_range(0..cfg.pool.len())].clone();
                if let Some(v) = x.as_u64().filter(|v| *v < 1 << 20) {
                    max_small = max_small.max(v);
                }
                args.push(x);
                level = p;
            }
            Kind::Limit => {
                let j = cfg.limit_floor.max(max_small + 1);
                level = level.fund_seq(j).expect("limit");
            }
        }
    }
    args
}

fn probe_one(s: &Term, t: &Term, alpha: &OrdNotation, cfg: &ProbeConfig, oracles: &OracleTable, i: u64) -> ProbeResult {
    let args = probe_tuple(alpha, cfg, i);
    let sa = Term::apply_all(s.clone(), args.iter().map(|x| Term::Elem(x.clone())));
    let ta = Term::apply_all(t.clone(), args.iter().map(|x| Term::Elem(x.clone())));
    let a = eval_closed(&sa, cfg.fuel, oracles);
    let b = eval_closed(&ta, cfg.fuel, oracles);
    match TriVerdict::from_outcomes(&a, &b) {
        TriVerdict::EqualDefined(_) => ProbeResult::Equal,
        TriVerdict::DistinctDefined(_, _) => ProbeResult::Counter(args),
        TriVerdict::Unknown(UnknownReason::BothOutOfFuel) => ProbeResult::BothOut,
        TriVerdict::Unknown(_) => ProbeResult::Asymmetric,
    }
}

/// `e_*` with `e_*·x = e_*`: the padded fixed point (pad index 0) of the
/// template returning the code it is given.
pub fn estar() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| fix_padded(&const_self_template(), 0)).clone()
}

/// `c_* ≠ e_*` with `c_*·x = c_*`: same template, pad index 1.
pub fn cstar() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| fix_padded(&const_self_template(), 1)).clone()
}

/// Default argument pool: `0..=b` together with `e_*` and `c_*`.
pub fn default_pool(b: u64) -> Vec<Nat> {
    let mut p: Vec<Nat> = (0..=b).map(Nat::from_u64).collect();
    p.push(estar());
    p.push(cstar());
    p
}

/// `(e_*, pad(e_*, 1))`: distinct codes of one hereditarily total function.
pub fn nonext_pair() -> (Nat, Nat) {
    let e = estar();
    let g = pad(&e, &Nat::from_u64(1));
    (e, g)
}

/// `K·a`, computed syntactically: `K` returns `s11(k1, a)`.
pub fn k_lift(a: &Nat) -> Nat {
    s11(&k1_code(), a)
}

/// `(K·f, K·g)`.
pub fn addk_lift(f: &Nat, g: &Nat) -> (Nat, Nat) {
    (k_lift(f), k_lift(g))
}

/// Certificate transfer for the `K`-lift: `c` for `f ≁_α g` becomes
/// `Step(x0, c)` for `K·f ≁_{α+1} K·g`.
pub fn addk_cert(c: DistinguishCert, x0: Nat) -> DistinguishCert {
    DistinguishCert::Step { x: x0, inner: Box::new(c) }
}

/// Inverse of [`addk_cert`] (`None` unless the root is a `Step`).
pub fn addk_uncert(c: &DistinguishCert) -> Option<DistinguishCert> {
    match c {
        DistinguishCert::Step { inner, .. } => Some((**inner).clone()),
        _ => None,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("notation {0} is not below the configured bound {1}")]
    OutOfRange(OrdNotation, OrdNotation),
}

/// Witness pairs are built for notations below `ω^ω`.
pub fn notation_bound() -> OrdNotation {
    OrdNotation::omega_pow(OrdNotation::omega())
}

/// The witness program, in self-passing style. Input `⟨self, ⟨mode, p⟩⟩`:
/// mode 0 with `p = ⟨a, side⟩` returns the code of `f_a` (side 0) or `g_a`
/// (side 1); mode 1 with `p = ⟨⟨a, side⟩, n⟩` returns mode 0 on `a[n]`.
pub fn witness_program() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        use ordinals::prim as op;
        let (f0, g0) = nonext_pair();
        let mode = fst(arg());
        let payload = snd(arg());
        let a = fst(payload.clone());
        let side = snd(payload.clone());
        let kind = prim(op::KIND, a.clone());
        let base = if_eq(side.clone(), num(0), numn(&f0), numn(&g0));
        let succ_case = q_s11(numn(&k1_code()), recurse(pair(num(0), pair(prim(op::PRED, a), side))));
        let entry1 = q_run(q_num(me()), q_pair(q_num(me()), q_pair(q_num(num(1)), num(0))));
        let limit_case = q_s11(entry1, payload.clone());
        let mode0 = if_eq(kind.clone(), num(0), base, if_eq(kind, num(1), succ_case, limit_case));
        let an = fst(payload.clone());
        let n = snd(payload);
        let mode1 = recurse(pair(num(0), pair(prim(op::FUND, pair(fst(an.clone()), n)), snd(an))));
        code(&if_eq(mode, num(0), mode0, mode1))
    })
    .clone()
}

/// `code(Run(Num R, Pair(Num R, Pair(Num 1, Input))))` for the witness
/// program `R`: on `⟨⟨a, side⟩, n⟩` it yields the `a[n]`-witness.
pub fn witness_limit_entry() -> Nat {
    let r = witness_program();
    code(&run(numn(&r), pair(numn(&r), pair(num(1), input()))))
}

/// `(f_α, g_α)` with `f_α ≁_α g_α` and `f_α ∼_{α+1} g_α`.
///
/// Zero gives [`nonext_pair`], successors [`addk_lift`], and a limit `α`
/// gives `s11(entry, ⟨ord_code(α), side⟩)`, a program sending `n` to the
/// `α[n]`-witness. The host recursion produces exactly the codes the witness
/// program computes, so `f_α·n` equals `witness_pair(α[n]).0` as a natural.
/// Evaluate with [`kernel_oracles`].
pub fn witness_pair(alpha: &OrdNotation) -> Result<(Nat, Nat), HierarchyError> {
    let bound = notation_bound();
    if alpha >= &bound {
        return Err(HierarchyError::OutOfRange(alpha.clone(), bound));
    }
    Ok(witness_unchecked(alpha))
}

fn witness_unchecked(alpha: &OrdNotation) -> (Nat, Nat) {
    match alpha.kind() {
        Kind::Zero => nonext_pair(),
        Kind::Succ(p) => {
            let (f, g) = witness_unchecked(&p);
            addk_lift(&f, &g)
        }
        Kind::Limit => {
            let entry = witness_limit_entry();
            let a = ord_code(alpha);
            (s11(&entry, &Nat::pair(&a, &Nat::zero())), s11(&entry, &Nat::pair(&a, &Nat::from_u64(1))))
        }
    }
}

/// The certificate for `f_α ≁_α g_α` that at each limit `λ` on the way
/// down uses `Drop(λ[n]+1, Step(n, ·))`, and `Step(0, ·)` at successors.
pub fn witness_cert(alpha: &OrdNotation, n: u64, fuel: u64) -> Option<DistinguishCert> {
    let (f, g) = witness_pair(alpha).ok()?;
    let mut path = Vec::new();
    let mut level = alpha.clone();
    loop {
        match level.kind() {
            Kind::Zero => break,
            Kind::Succ(p) => {
                path.push(PathNode::Step(Nat::zero()));
                level = p;
            }
            Kind::Limit => {
                let b = level.fund_seq(n).expect("limit");
                path.push(PathNode::Drop(b.succ()));
                path.push(PathNode::Step(Nat::from_u64(n)));
                level = b;
            }
        }
    }
    cert_along(&Term::Elem(f), &Term::Elem(g), &path, fuel, kernel_oracles())
}

/// One node of a certificate skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathNode {
    Step(Nat),
    Drop(OrdNotation),
}

/// The skeleton of a certificate: its steps and drops, leaf removed.
pub fn cert_path(c: &DistinguishCert) -> Vec<PathNode> {
    let mut out = Vec::new();
    let mut cur = c;
    loop {
        match cur {
            DistinguishCert::Step { x, inner } => {
                out.push(PathNode::Step(x.clone()));
                cur = inner;
            }
            DistinguishCert::Drop { beta, inner } => {
                out.push(PathNode::Drop(beta.clone()));
                cur = inner;
            }
            _ => return out,
        }
    }
}

/// Fills in the leaf of a certificate skeleton by evaluating both sides.
pub fn cert_along(s: &Term, t: &Term, path: &[PathNode], fuel: u64, oracles: &OracleTable) -> Option<DistinguishCert> {
    let args: Vec<Term> = path
        .iter()
        .filter_map(|p| match p {
            PathNode::Step(x) => Some(Term::Elem(x.clone())),
            PathNode::Drop(_) => None,
        })
        .collect();
    let a = eval_closed(&Term::apply_all(s.clone(), args.clone()), fuel, oracles);
    let b = eval_closed(&Term::apply_all(t.clone(), args), fuel, oracles);
    let mut cert = leaf_for(&a, &b, fuel)?;
    for p in path.iter().rev() {
        cert = match p {
            PathNode::Step(x) => DistinguishCert::step(x.clone(), cert),
            PathNode::Drop(b) => DistinguishCert::drop_to(b.clone(), cert),
        };
    }
    Some(cert)
}

/// `(e_*, c_*)`: distinct, hereditarily total, each constant on itself, so
/// they are separated at every level.
pub fn selfrep_pair() -> (Nat, Nat) {
    (estar(), cstar())
}

/// Self-passing program `R` of the well-foundedness reduction. On
/// `⟨self, ⟨e, σ⟩⟩` it returns `e_*` when `Φ_e(σ) ≠ 1` (σ outside the
/// tree) and otherwise `g(self, e, σ) = s11(G, ⟨self, ⟨e, σ⟩⟩)`, whose
/// application to `x` continues with `σ⌢x`. Every `g`-value has root tag
/// `Run` while `e_*` has root tag `Pad`, so `e_*` is not in the range of `g`.
pub fn wf_program() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let e = fst(arg());
        let sigma = snd(arg());
        let g = q_s11(numn(&extend_program()), pair(me(), arg()));
        code(&if_eq(run(e, sigma), num(1), g, numn(&estar())))
    })
    .clone()
}

/// `G(⟨⟨r, ⟨e, σ⟩⟩, x⟩) = Φ_r(⟨r, ⟨e, σ⌢x⟩⟩)`: the string-extending step
/// shared by the tree-walking programs, so `s11(G, ⟨r, ⟨e, σ⟩⟩)·x` continues
/// the self-passing program `r` on `σ⌢x`.
pub fn extend_program() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let st = fst(input());
        let r = fst(st.clone());
        let e = fst(snd(st.clone()));
        let sigma = snd(snd(st));
        let x = snd(input());
        code(&run(r.clone(), pair(r, pair(e, append(sigma, x)))))
    })
    .clone()
}

/// `f(e, σ)`, evaluated at `fuel`; `None` if the decider does not answer.
pub fn wf_node(decider: &Nat, sigma: &Nat, fuel: u64, oracles: &OracleTable) -> Option<Nat> {
    let r = wf_program();
    crate::machine::eval(&s11(&r, &r), &Nat::pair(decider, sigma), fuel, oracles).value().cloned()
}

/// `f(e, ε)`: `≈ e_*` exactly when the tree decided by `decider` is
/// well-founded.
pub fn wf_reduction(decider: &Nat, fuel: u64, oracles: &OracleTable) -> Option<Nat> {
    wf_node(decider, &Nat::zero(), fuel, oracles)
}

/// Deciders for trees, as machine programs on string codes.
pub mod deciders {
    use super::*;
    use crate::machine::kit::str_code_u64;

    /// Returns 1 on codes of members of `t` and 0 elsewhere.
    pub fn finite_tree_decider(t: &FiniteTree) -> Nat {
        let mut body = num(0);
        for s in t.nodes() {
            body = if_eq(input(), numn(&str_code_u64(s)), num(1), body);
        }
        code(&body)
    }

    /// Self-passing recursion: 1 on `0ⁿ`, 0 on every other string.
    pub fn zero_spine_program() -> Nat {
        // arg = σ; σ = 0 is ε; otherwise σ - 1 = ⟨σ', x⟩.
        let sigma = arg();
        let prev = prim(crate::machine::builtin::PRED, sigma.clone());
        let rec = recurse(fst(prev.clone()));
        code(&if_eq(sigma, num(0), num(1), if_eq(snd(prev), num(0), rec, num(0))))
    }

    /// Decider for the ill-founded tree `{0ⁿ : n ∈ ω}`.
    pub fn zero_spine_decider() -> Nat {
        let p = zero_spine_program();
        s11(&p, &p)
    }
}

/// Exploration result of [`distinguishing_tree`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistTree {
    /// Verdict for every explored string.
    pub labels: BTreeMap<Vec<u64>, TriVerdict>,
    /// Strings labeled `DistinctDefined`: the approximation of `T_{s,t}`.
    pub distinct: FiniteTree,
    /// No unknown labels, and every distinct node has all its children
    /// explored.
    pub complete: bool,
    pub kb: Option<KbRank>,
    /// `ρ(ε) + 1` where `ρ` is the well-founded rank; `s ∼_bound t` when the
    /// exploration is exhaustive. Zero when `s ≃ t`.
    pub bound: Option<u64>,
    /// The Kleene–Brouwer order type `|T| = α_ε + 1`, also an upper bound.
    pub kb_bound: Option<u64>,
}

/// Explores `s σ` against `t σ` for `|σ| ≤ depth`, entries `< width`.
/// Children of equal-labeled nodes are skipped: their labels are implied.
pub fn distinguishing_tree(s: &Term, t: &Term, depth: usize, width: u64, fuel: u64, oracles: &OracleTable) -> DistTree {
    let mut labels = BTreeMap::new();
    let mut frontier: Vec<(Vec<u64>, Term, Term)> = vec![(Vec::new(), s.clone(), t.clone())];
    let mut complete = true;
    while let Some((sigma, a, b)) = frontier.pop() {
        let oa = eval_closed(&a, fuel, oracles);
        let ob = eval_closed(&b, fuel, oracles);
        let v = TriVerdict::from_outcomes(&oa, &ob);
        let distinct = matches!(v, TriVerdict::DistinctDefined(..));
        if !v.is_definite() {
            complete = false;
        }
        if distinct {
            if sigma.len() >= depth {
                complete = false;
            } else {
                let (ra, rb) = (Term::Elem(oa.value().unwrap().clone()), Term::Elem(ob.value().unwrap().clone()));
                for x in 0..width {
                    let mut child = sigma.clone();
                    child.push(x);
                    frontier.push((child, apply_term(&ra, &Nat::from_u64(x)), apply_term(&rb, &Nat::from_u64(x))));
                }
            }
        }
        labels.insert(sigma, v);
    }
    let distinct = FiniteTree::closure(
        labels.iter().filter(|(_, v)| matches!(v, TriVerdict::DistinctDefined(..))).map(|(k, _)| k.clone()),
    );
    let kb = complete.then(|| kb_rank(&distinct));
    let bound = complete.then(|| if distinct.is_empty() { 0 } else { distinct.max_len() as u64 + 1 });
    let kb_bound = complete.then(|| distinct.len() as u64);
    DistTree { labels, distinct, complete, kb, bound, kb_bound }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::kit::{str_code_u64};
    use crate::pca::apply;

    fn o(s: &str) -> OrdNotation {
        s.parse().unwrap()
    }

    fn el(n: &Nat) -> Term {
        Term::Elem(n.clone())
    }

    #[test]
    fn constants_are_self_reproducing() {
        let (e, c) = (estar(), cstar());
        assert_ne!(e, c);
        for x in [0u64, 17, 100] {
            assert_eq!(apply(&e, &Nat::from_u64(x), 10_000, &OracleTable::new()).value(), Some(&e));
            assert_eq!(apply(&c, &Nat::from_u64(x), 10_000, &OracleTable::new()).value(), Some(&c));
        }
    }

    #[test]
    fn trivial_leaf_cert() {
        let c = DistinguishCert::Leaf0 { fuel: 10, v1: 1u64.into(), v2: 2u64.into() };
        let v = check_cert(&Term::elem(1u64), &Term::elem(2u64), &o("0"), &c, 100, &OracleTable::new());
        assert_eq!(v, CertVerdict::Holds);
        let bad = check_cert(&Term::elem(1u64), &Term::elem(2u64), &o("1"), &c, 100, &OracleTable::new());
        assert!(matches!(bad, CertVerdict::Fails(ref m) if m.starts_with("shape")));
    }

    #[test]
    fn k_lift_matches_k_application() {
        let k = crate::pca::k_code();
        let (f, _) = nonext_pair();
        assert_eq!(apply(&k, &f, 1000, &OracleTable::new()).value(), Some(&k_lift(&f)));
    }

    #[test]
    fn finite_witnesses_refute_at_their_level() {
        let b = RefuteBudget::new(4, default_pool(3), 20_000);
        for n in 0..4u64 {
            let a = OrdNotation::from_u64(n);
            let (f, g) = witness_pair(&a).unwrap();
            let c = refute_sim(&el(&f), &el(&g), &a, &b, kernel_oracles()).expect("refutable");
            assert_eq!(check_cert(&el(&f), &el(&g), &a, &c, 20_000, kernel_oracles()), CertVerdict::Holds);
            assert!(refute_sim(&el(&f), &el(&g), &a.succ(), &b, kernel_oracles()).is_none());
        }
    }

    #[test]
    fn limit_witness_threads_fundamental_sequence() {
        let w = o("w");
        let (f, g) = witness_pair(&w).unwrap();
        for n in 0..4u64 {
            let (fb, gb) = witness_pair(&w.fund_seq(n).unwrap()).unwrap();
            assert_eq!(apply(&f, &Nat::from_u64(n), 100_000, kernel_oracles()).value(), Some(&fb));
            assert_eq!(apply(&g, &Nat::from_u64(n), 100_000, kernel_oracles()).value(), Some(&gb));
        }
        let c = witness_cert(&w, 2, 100_000).unwrap();
        assert_eq!(
            check_cert(&el(&f), &el(&g), &w, &c, 100_000, kernel_oracles()),
            CertVerdict::HoldsModuloCofinality { divergence: false }
        );
    }

    #[test]
    fn cert_json_round_trip() {
        let c = DistinguishCert::drop_to(
            o("w + 1"),
            DistinguishCert::step(estar(), DistinguishCert::LeafDiv { side: 2, fuel: 9, v_other: 4u64.into() }),
        );
        assert_eq!(DistinguishCert::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn wf_reduction_singleton_tree() {
        let t = FiniteTree::closure([vec![]]);
        let d = deciders::finite_tree_decider(&t);
        let f = wf_reduction(&d, 100_000, &OracleTable::new()).unwrap();
        assert_ne!(f, estar());
        for x in 0..5u64 {
            assert_eq!(apply(&f, &Nat::from_u64(x), 100_000, &OracleTable::new()).value(), Some(&estar()));
        }
    }

    #[test]
    fn zero_spine_decider_decides() {
        let d = deciders::zero_spine_decider();
        let ot = OracleTable::new();
        for (s, want) in [(vec![], 1u64), (vec![0, 0, 0], 1), (vec![0, 1], 0), (vec![2], 0)] {
            assert_eq!(crate::machine::eval(&d, &str_code_u64(&s), 10_000, &ot).value(), Some(&Nat::from_u64(want)));
        }
    }

    #[test]
    fn distinguishing_tree_of_nonext_pair() {
        let (f, g) = nonext_pair();
        let d = distinguishing_tree(&el(&f), &el(&g), 3, 3, 10_000, &OracleTable::new());
        assert!(d.complete);
        assert_eq!(d.distinct.len(), 1);
        assert_eq!(d.bound, Some(1));
    }
}
