// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! The acceptance suite as library code, so the `acceptance` test target
//! and `pca-lab selftest` run exactly the same checks.
//!
//! Every criterion returns a [`CriterionResult`]; budgets and tolerances
//! are the constants at the top of each function. All randomness is drawn
//! from ChaCha streams seeded per criterion.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embeddings::{self, embed_k1_rel, iterate_at_zero, iterator_index, EmbeddingSpec};
use crate::hierarchy::{
    self, addk_cert, addk_lift, addk_uncert, check_cert, cstar, default_pool, deciders, distinguishing_tree, estar,
    kernel_oracles, probe_sim, refute_sim, witness_cert, witness_pair, CertVerdict, DistinguishCert, ProbeConfig,
    RefuteBudget,
};
use crate::k2::{self, apply_alt, check_preservation, embed_k1_to_k2, Provider, SourceStatus};
use crate::machine::kit::tuple_code;
use crate::machine::prog::*;
use crate::machine::{builtin, eval, fix, s11, OracleTable, Outcome, TAG_LIMIT};
use crate::nat::Nat;
use crate::ordinals::{enumerate_polynomials, kb_less, kb_rank, FiniteTree, Kind, OrdNotation};
use crate::par;
use crate::pca::{
    apply, apply_chain, bracket_abstract, i_code, k_code, kleene_eq_bounded, s_code, Term, TriVerdict,
};
use crate::reductions::{
    combine2, combine_omega, combine_omega_node, defining_formula, eval_rel, hard_omega_k, hard_omega_k_plus1,
    hard_pi2, hard_sigma3, hardness_helper, FormulaFin, FormulaInf, Quant, Truth,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

type Check = fn() -> Result<String, String>;

/// Every criterion, in order.
pub fn criteria() -> Vec<(u32, &'static str, Check)> {
    vec![
        (1, "machine laws", c01_machine as Check),
        (2, "combinator laws and bracket abstraction", c02_combinators),
        (3, "fixed constants", c03_constants),
        (4, "K-lift certificate transfer", c04_addk),
        (5, "witness pairs", c05_witnesses),
        (6, "F and G", c06_fg),
        (7, "Kleene-Brouwer machinery", c07_kb),
        (8, "well-foundedness reduction", c08_wf),
        (9, "hardness reductions", c09_reductions),
        (10, "combiners", c10_combiners),
        (11, "hardness helper", c11_helper),
        (12, "K1 embeddings", c12_embeddings),
        (13, "K1 into K2", c13_k2),
        (14, "defining formula at level 1", c14_defining),
    ]
}

pub fn run_one(id: u32) -> Option<CriterionResult> {
    criteria().into_iter().find(|c| c.0 == id).map(|(id, name, f)| {
        let t = Instant::now();
        let r = f();
        let millis = t.elapsed().as_millis();
        match r {
            Ok(detail) => CriterionResult { id, name: name.into(), pass: true, detail, millis },
            Err(detail) => CriterionResult { id, name: name.into(), pass: false, detail, millis },
        }
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    criteria().iter().filter_map(|c| run_one(c.0)).collect()
}

/// `PASS [ 1] machine laws: …`. Timing is left out so the line is
/// reproducible.
pub fn format_line(r: &CriterionResult) -> String {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    format!("{verdict} [{:>2}] {}: {}", r.id, r.name, r.detail)
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    r.set_stream(stream);
    r
}

fn n(v: u64) -> Nat {
    Nat::from_u64(v)
}

fn el(x: &Nat) -> Term {
    Term::Elem(x.clone())
}

fn ord(s: &str) -> OrdNotation {
    s.parse().expect("literal")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// A random program: random small codes half the time, random ASTs over
/// the kernel built-ins otherwise.
pub fn random_program(r: &mut ChaCha8Rng) -> Nat {
    if r.gen_bool(0.4) {
        n(r.gen_range(0..10_000))
    } else {
        code(&random_ast(r, 4))
    }
}

fn random_ast(r: &mut ChaCha8Rng, depth: u32) -> P {
    if depth == 0 {
        return if r.gen_bool(0.5) { input() } else { num(r.gen_range(0..20)) };
    }
    let d = depth - 1;
    match r.gen_range(0..12) {
        0 => input(),
        1 => num(r.gen_range(0..50)),
        2 => pair(random_ast(r, d), random_ast(r, d)),
        3 => fst(random_ast(r, d)),
        4 => snd(random_ast(r, d)),
        5 => if_eq(random_ast(r, d), random_ast(r, d), random_ast(r, d), random_ast(r, d)),
        6 => run(random_ast(r, d), random_ast(r, d)),
        7 => prim(r.gen_range(0..builtin::COUNT), random_ast(r, d)),
        8 => pad_node(r.gen_range(0..3), random_ast(r, d)),
        9 => len(random_ast(r, d)),
        10 => at(random_ast(r, d), random_ast(r, d)),
        _ => append(random_ast(r, d), random_ast(r, d)),
    }
}

// ---------------------------------------------------------------------------

fn c01_machine() -> Result<String, String> {
    const SAMPLES: usize = 1_000;
    const FUELS: [u64; 3] = [100, 1_000, 10_000];
    let none = OracleTable::new();
    let mut r = rng(1);
    let jobs: Vec<(Nat, Nat)> = (0..SAMPLES).map(|_| (random_program(&mut r), n(r.gen_range(0..1_000)))).collect();
    let bad = par::map_indexed(jobs.len(), |i| {
        let (e, x) = &jobs[i];
        let outs: Vec<Outcome> = FUELS.iter().map(|&f| eval(e, x, f, &none)).collect();
        if FUELS.iter().zip(&outs).any(|(&f, o)| &eval(e, x, f, &none) != o) {
            return Some(format!("nondeterministic on ({e}, {x})"));
        }
        for w in outs.windows(2) {
            let ok = match (&w[0], &w[1]) {
                (Outcome::Defined { .. }, later) => later == &w[0],
                (Outcome::OutOfFuel, _) => true,
            };
            if !ok {
                return Some(format!("fuel monotonicity fails on ({e}, {x})"));
            }
        }
        None
    });
    if let Some(m) = bad.into_iter().flatten().next() {
        return Err(m);
    }
    let mut defined = 0;
    for i in 0..100u64 {
        let e = random_program(&mut r);
        let (y, z) = (n(r.gen_range(0..100)), n(i));
        let direct = eval(&e, &Nat::pair(&y, &z), 10_000, &none);
        let curried = eval(&s11(&e, &y), &z, 10_000 + S11_OVERHEAD, &none);
        let want = match &direct {
            Outcome::Defined { value, steps } => {
                defined += 1;
                Outcome::Defined { value: value.clone(), steps: steps + S11_OVERHEAD }
            }
            Outcome::OutOfFuel => Outcome::OutOfFuel,
        };
        ensure(curried == want, || format!("s11 law fails for e = {e}"))?;
    }
    // fix law: Φ_{fix t}(x) ≃ Φ_{Φ_t(fix t)}(x)
    let mut fixed = 0;
    for i in 0..100u64 {
        let t = match i % 4 {
            0 => code(&num(r.gen_range(0..500))),
            1 => const_self_template(),
            2 => code(&q_s11(input(), num(r.gen_range(0..9)))),
            _ => random_program(&mut r),
        };
        let nfix = fix(&t);
        let x = n(r.gen_range(0..50));
        let via = eval(&t, &nfix, 10_000, &none);
        let lhs = eval(&nfix, &x, 100_000, &none);
        match via {
            Outcome::Defined { value: m, .. } => {
                let rhs = eval(&m, &x, 100_000, &none);
                if let (Some(a), Some(b)) = (lhs.value(), rhs.value()) {
                    ensure(a == b, || format!("fix law: distinct values for t = {t}"))?;
                    fixed += 1;
                } else {
                    ensure(!lhs.is_defined(), || format!("fix law: left defined, right not, t = {t}"))?;
                }
            }
            Outcome::OutOfFuel => ensure(!lhs.is_defined(), || format!("fix law: template diverges, t = {t}"))?,
        }
    }
    Ok(format!(
        "{SAMPLES} programs x fuels {FUELS:?} deterministic and monotone; s11 100/100 ({defined} defined); fix 100/100 ({fixed} defined)"
    ))
}

fn c02_combinators() -> Result<String, String> {
    const TRIPLES: usize = 200;
    const TERMS: usize = 100;
    const FUEL: u64 = 100_000;
    let o = kernel_oracles();
    let mut r = rng(2);
    let mut pool: Vec<Nat> = vec![k_code(), s_code(), i_code(), estar(), cstar()];
    pool.extend((0..20).map(|_| random_program(&mut r)));
    let pick = |r: &mut ChaCha8Rng| -> Term {
        if r.gen_bool(0.3) {
            Term::Elem(n(r.gen_range(0..100)))
        } else {
            el(&pool[r.gen_range(0..pool.len())])
        }
    };
    let (mut k_eq, mut s_eq) = (0, 0);
    for _ in 0..TRIPLES {
        let (a, b, c) = (pick(&mut r), pick(&mut r), pick(&mut r));
        let k = Term::apply_all(el(&k_code()), [a.clone(), b.clone()]);
        let v = kleene_eq_bounded(&k, &a, FUEL, o).map_err(|e| e.to_string())?;
        ensure(matches!(v, TriVerdict::EqualDefined(_)), || format!("K law: {v:?}"))?;
        k_eq += 1;
        let lhs = Term::apply_all(el(&s_code()), [a.clone(), b.clone(), c.clone()]);
        let rhs = Term::app(Term::app(a, c.clone()), Term::app(b, c));
        let v = kleene_eq_bounded(&lhs, &rhs, FUEL, o).map_err(|e| e.to_string())?;
        ensure(!matches!(v, TriVerdict::DistinctDefined(..)), || format!("S law: {v:?}"))?;
        s_eq += usize::from(matches!(v, TriVerdict::EqualDefined(_)));
    }
    let mut beta_eq = 0;
    for _ in 0..TERMS {
        let t = random_term(&mut r, 4);
        let v = n(r.gen_range(0..50));
        let lhs = Term::app(bracket_abstract(&t, "x"), el(&v));
        let rhs = t.subst("x", &el(&v));
        let verdict = kleene_eq_bounded(&lhs, &rhs, FUEL, o).map_err(|e| e.to_string())?;
        ensure(!matches!(verdict, TriVerdict::DistinctDefined(..)), || format!("beta law on {t}: {verdict:?}"))?;
        beta_eq += usize::from(matches!(verdict, TriVerdict::EqualDefined(_)));
    }
    Ok(format!(
        "K {k_eq}/{TRIPLES} equal; S {TRIPLES}/{TRIPLES} agree ({s_eq} both defined); beta {TERMS}/{TERMS} agree ({beta_eq} both defined)"
    ))
}

fn random_term(r: &mut ChaCha8Rng, depth: u32) -> Term {
    if depth == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..5) {
            0 => el(&k_code()),
            1 => el(&s_code()),
            2 => el(&i_code()),
            3 => el(&n(r.gen_range(0..30))),
            _ => Term::var("x"),
        };
    }
    Term::app(random_term(r, depth - 1), random_term(r, depth - 1))
}

fn c03_constants() -> Result<String, String> {
    const FUEL: u64 = 100_000;
    let none = OracleTable::new();
    let (e, c) = (estar(), cstar());
    ensure(e != c, || "c_* = e_*".into())?;
    for k in [&e, &c] {
        for x in 0..=100u64 {
            let v = apply(k, &n(x), FUEL, &none);
            ensure(v.value() == Some(k), || format!("constant fails at x = {x}"))?;
            let it = apply_chain(k, &[n(x), n(x + 1), n(x + 2)], FUEL, &none);
            ensure(it.value() == Some(k), || format!("3-fold iterate fails at x = {x}"))?;
        }
    }
    Ok("e_*·x = e_*, c_*·x = c_* for x ≤ 100 and 3-fold iterates; c_* ≠ e_*".into())
}

fn certified_pairs(count: usize) -> Vec<(Nat, Nat, OrdNotation, DistinguishCert)> {
    // Witness pairs at 0..3 and K-lifts of random-argument variants.
    let budget = RefuteBudget::new(2, default_pool(3), 20_000);
    let mut out = Vec::new();
    let mut r = rng(4);
    let mut seeds: Vec<(Nat, Nat)> = Vec::new();
    for a in 0..4u64 {
        seeds.push(witness_pair(&OrdNotation::from_u64(a)).expect("finite"));
    }
    while seeds.len() < count {
        // (K^j·x, K^j·y) for distinct small x, y: refuted at level j
        let (x, y) = (r.gen_range(0..1000u64), r.gen_range(1000..2000u64));
        let mut p = (code(&num(x)), code(&num(y)));
        for _ in 0..r.gen_range(0..3) {
            p = addk_lift(&p.0, &p.1);
        }
        seeds.push(p);
    }
    for (f, g) in seeds.into_iter().take(count) {
        // distinct codes are always apart at level 0; keep the highest level
        for a in (0..4u64).rev() {
            let alpha = OrdNotation::from_u64(a);
            if let Some(c) = refute_sim(&el(&f), &el(&g), &alpha, &budget, kernel_oracles()) {
                out.push((f, g, alpha, c));
                break;
            }
        }
    }
    out
}

fn c04_addk() -> Result<String, String> {
    const PAIRS: usize = 50;
    const FUEL: u64 = 20_000;
    let o = kernel_oracles();
    let pairs = certified_pairs(PAIRS);
    ensure(pairs.len() == PAIRS, || format!("only {} certified pairs", pairs.len()))?;
    let mut modulo = 0;
    for (i, (f, g, alpha, c)) in pairs.iter().enumerate() {
        // divergence leaves are legitimate above level 0; the verdict must survive the transfer
        let source = check_cert(&el(f), &el(g), alpha, c, FUEL, o);
        ensure(matches!(source, CertVerdict::Holds | CertVerdict::HoldsModuloDivergence), || format!("source {i}: {source:?}"))?;
        modulo += usize::from(source == CertVerdict::HoldsModuloDivergence);
        let (lf, lg) = addk_lift(f, g);
        let lifted = addk_cert(c.clone(), n(i as u64));
        let v = check_cert(&el(&lf), &el(&lg), &alpha.succ(), &lifted, FUEL, o);
        ensure(v == source, || format!("lift {i}: {v:?}, source {source:?}"))?;
        let back = addk_uncert(&lifted).ok_or("un-lift failed")?;
        ensure(&back == c, || format!("un-lift {i} changed the certificate"))?;
        let v = check_cert(&el(f), &el(g), alpha, &back, FUEL, o);
        ensure(v == source, || format!("un-lift {i}: {v:?}, source {source:?}"))?;
    }
    let mut levels = [0usize; 4];
    for (_, _, alpha, _) in &pairs {
        levels[alpha.as_finite().expect("finite") as usize] += 1;
    }
    Ok(format!("{PAIRS}/{PAIRS} lifted and un-lifted certificates hold; source levels 0..3: {levels:?}, {modulo} modulo divergence"))
}

fn c05_witnesses() -> Result<String, String> {
    const PROBES: u64 = 500;
    const FAMILY: u64 = 3;
    const FUEL: u64 = 200_000;
    let o = kernel_oracles();
    let mut notes = Vec::new();
    for lit in ["0", "1", "2", "3", "w", "w+1", "w*2", "w^2", "w^2+w"] {
        let alpha = ord(lit);
        let (f, g) = witness_pair(&alpha).map_err(|e| e.to_string())?;
        let (sf, sg) = (el(&f), el(&g));
        let flag = if alpha.is_finite() {
            let b = RefuteBudget::new(1, default_pool(3), FUEL);
            let c = refute_sim(&sf, &sg, &alpha, &b, o).ok_or_else(|| format!("no certificate at {alpha}"))?;
            let v = check_cert(&sf, &sg, &alpha, &c, FUEL, o);
            ensure(matches!(v, CertVerdict::Holds | CertVerdict::HoldsModuloDivergence), || format!("{alpha}: {v:?}"))?;
            if v == CertVerdict::Holds { "holds" } else { "holds mod divergence" }
        } else {
            for j in 0..FAMILY {
                let c = witness_cert(&alpha, j, FUEL).ok_or_else(|| format!("no certificate at {alpha}[{j}]"))?;
                let v = check_cert(&sf, &sg, &alpha, &c, FUEL, o);
                ensure(v.is_valid(), || format!("{alpha}[{j}]: {v:?}"))?;
            }
            "holds mod cofinality"
        };
        let cfg = ProbeConfig::new(PROBES, FUEL, default_pool(8), 5);
        let rep = probe_sim(&sf, &sg, &alpha.succ(), &cfg, o);
        ensure(rep.counterexamples_found == 0, || format!("{alpha}+1: {rep:?}"))?;
        ensure(rep.tuples_tried >= PROBES, || "too few probes".into())?;
        notes.push(format!("{alpha}: {flag}"));
    }
    Ok(format!("{}; 0 counterexamples at α+1 over {PROBES} tuples each", notes.join(", ")))
}

fn c06_fg() -> Result<String, String> {
    let set = enumerate_polynomials(3, 3);
    for a in &set {
        ensure(&a.g().f() == a, || format!("F(G({a})) = {}", a.g().f()))?;
        let g = a.g();
        let shape = match g.kind() {
            Kind::Zero | Kind::Limit => true,
            Kind::Succ(p) => p.is_zero() || p.is_limit(),
        };
        ensure(shape, || format!("G({a}) = {g} is not 0, 1, a limit or a limit plus one"))?;
    }
    for k in 0..=5u64 {
        for m in 0..=5u64 {
            let a = OrdNotation::monomial(OrdNotation::one(), k).add(&OrdNotation::from_u64(m));
            let want = if m == 0 { 2 * k + 1 } else { 2 * k + 2 };
            ensure(a.f().one_plus() == OrdNotation::from_u64(want), || format!("1+F({a}) = {}", a.f().one_plus()))?;
        }
    }
    Ok(format!("F∘G = id and G-range shape on {} notations; 1+F table for k, n ≤ 5", set.len()))
}

fn random_tree(r: &mut ChaCha8Rng, max_nodes: usize) -> FiniteTree {
    let target = r.gen_range(1..=max_nodes);
    let mut nodes: BTreeSet<Vec<u64>> = BTreeSet::from([vec![]]);
    while nodes.len() < target {
        let list: Vec<&Vec<u64>> = nodes.iter().collect();
        let mut child = list[r.gen_range(0..list.len())].clone();
        child.push(r.gen_range(0..4));
        nodes.insert(child);
    }
    FiniteTree::from_nodes(nodes).expect("closed by construction")
}

fn c07_kb() -> Result<String, String> {
    const TREES: usize = 100;
    let mut r = rng(7);
    for i in 0..TREES {
        let t = random_tree(&mut r, 40);
        let rank = kb_rank(&t);
        let nodes: Vec<&Vec<u64>> = t.nodes().collect();
        for s in &nodes {
            let brute = nodes.iter().filter(|u| kb_less(u, s)).count();
            ensure(rank.rank_of[*s] == brute, || format!("tree {i}: rank of {s:?}"))?;
        }
    }
    const WIDTH: u64 = 3;
    for len in 1..=3usize {
        let (f, g) = witness_pair(&OrdNotation::from_u64(len as u64 - 1)).expect("finite");
        let d = distinguishing_tree(&el(&f), &el(&g), len + 1, WIDTH, 20_000, kernel_oracles());
        let want = FiniteTree::closure(all_strings(len - 1, WIDTH));
        ensure(d.distinct == want, || format!("chain {len}: tree {:?}", d.distinct))?;
        ensure(d.bound == Some(len as u64), || format!("chain {len}: bound {:?}", d.bound))?;
    }
    Ok(format!("kb_rank matches brute force on {TREES} trees; chains 1..3 give full trees and bound ∼_n"))
}

fn all_strings(len: usize, width: u64) -> Vec<Vec<u64>> {
    let mut level: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..len {
        level = level.iter().flat_map(|s| (0..width).map(move |x| [s.clone(), vec![x]].concat())).collect();
    }
    level
}

fn c08_wf() -> Result<String, String> {
    const TREES: usize = 20;
    const FUEL: u64 = 200_000;
    let none = OracleTable::new();
    let e = estar();
    let mut r = rng(8);
    let mut paths = 0;
    for i in 0..TREES {
        let mut t = random_tree(&mut r, 12);
        while t.max_len() > 4 {
            t = random_tree(&mut r, 12);
        }
        let d = deciders::finite_tree_decider(&t);
        let f = hierarchy::wf_reduction(&d, FUEL, &none).ok_or("wf_reduction out of fuel")?;
        // walk every node of T and every first exit from it
        for s in t.nodes() {
            let v = apply_chain(&f, &s.iter().map(|&x| n(x)).collect::<Vec<_>>(), FUEL, &none);
            ensure(v.value().is_some_and(|v| v != &e), || format!("tree {i}: value at {s:?} inside T"))?;
            for x in 0..4u64 {
                let child = [s.clone(), vec![x]].concat();
                if t.contains(&child) {
                    continue;
                }
                paths += 1;
                let v = apply_chain(&f, &child.iter().map(|&x| n(x)).collect::<Vec<_>>(), FUEL, &none);
                ensure(v.value() == Some(&e), || format!("tree {i}: value at exit {child:?}"))?;
            }
        }
    }
    let spine = deciders::zero_spine_decider();
    let f = hierarchy::wf_reduction(&spine, FUEL, &none).ok_or("spine out of fuel")?;
    let mut cur = f;
    for k in 0..10 {
        cur = apply(&cur, &n(0), FUEL, &none).value().cloned().ok_or("spine step out of fuel")?;
        ensure(cur != e, || format!("spine reaches e_* at step {k}"))?;
    }
    Ok(format!("{TREES} trees, {paths} exits land on e_* exactly; spine avoids e_* for 10 steps"))
}

// ---------------------------------------------------------------------------
// Criterion 9

fn prefix(s: &str) -> Vec<Quant> {
    s.chars().map(|c| if c == 'E' { Quant::Exists } else { Quant::Forall }).collect()
}

fn const_decider(v: u64) -> Nat {
    code(&num(v))
}

fn probe_clean(f: &Nat, g: &Nat, level: &OrdNotation, samples: u64, fuel: u64, seed: u64) -> Result<u64, String> {
    let cfg = ProbeConfig::new(samples, fuel, default_pool(6), seed);
    let rep = probe_sim(&el(f), &el(g), level, &cfg, kernel_oracles());
    ensure(rep.counterexamples_found == 0, || format!("probe at {level}: {rep:?}"))?;
    Ok(rep.tuples_tried)
}

/// Certificates for every forced index `j < count` at `level`.
fn family(f: &Nat, g: &Nat, level: &OrdNotation, count: u64, pool: &[Nat], fuel: u64) -> Vec<Option<CertVerdict>> {
    let o = kernel_oracles();
    (0..count)
        .map(|j| {
            let b = RefuteBudget::new(1, pool.to_vec(), fuel).forced(j);
            refute_sim(&el(f), &el(g), level, &b, o).map(|c| check_cert(&el(f), &el(g), level, &c, fuel, o))
        })
        .collect()
}

fn c09_reductions() -> Result<String, String> {
    const PROBES: u64 = 300;
    const FAMILY: u64 = 3;
    let o = kernel_oracles();
    let pool: Vec<Nat> = (0..4).map(n).collect();
    let mut notes = Vec::new();

    // Π⁰₂: ∀n ∃m [m ≥ n] is true, ∀n ∃m [0 = 1] false.
    let x = input();
    let ge = code(&if_eq(lt(proj(x.clone(), 3, 2), proj(x, 3, 1)), num(1), num(0), num(1)));
    const ELL: u64 = 2;
    let ell = OrdNotation::from_u64(ELL);
    for (psi, truth) in [(ge, true), (const_decider(0), false)] {
        let (f, g) = hard_pi2(&psi, &n(0), ELL).map_err(|e| e.to_string())?;
        let b = RefuteBudget::new(1, pool.clone(), 5_000);
        let at = refute_sim(&el(&f), &el(&g), &ell, &b, o);
        ensure(at.is_some() != truth, || format!("pi2 (truth {truth}): certificate at {ell}: {}", at.is_some()))?;
        if let Some(c) = &at {
            let v = check_cert(&el(&f), &el(&g), &ell, c, 5_000, o);
            ensure(v.is_valid(), || format!("pi2 certificate: {v:?}"))?;
        }
        let above = refute_sim(&el(&f), &el(&g), &ell.succ(), &b, o);
        ensure(above.is_none(), || "pi2: certificate above the stated level".into())?;
        probe_clean(&f, &g, &ell.succ(), PROBES, 20_000, 9)?;
    }
    notes.push("pi2 ok".to_string());

    // Σ⁰₃ over EAE: matrix 1 is true, matrix 0 false.
    let omega = OrdNotation::omega();
    for (m, truth) in [(1, true), (0, false)] {
        let phi = FormulaFin::new(prefix("EAE"), const_decider(m));
        let (f, g) = hard_sigma3(&phi, &n(7)).map_err(|e| e.to_string())?;
        let fam = family(&f, &g, &omega, FAMILY, &pool, 4_000);
        let full = fam.iter().all(|v| v.as_ref().is_some_and(CertVerdict::is_valid));
        ensure(full != truth, || format!("sigma3 (truth {truth}): family at ω {fam:?}"))?;
        probe_clean(&f, &g, &omega.succ(), PROBES, 20_000, 19)?;
    }
    notes.push("sigma3 ok".to_string());

    // Σ⁰₅ over EAEAE at k = 2.
    for (m, truth) in [(1, true), (0, false)] {
        let phi = FormulaFin::new(prefix("EAEAE"), const_decider(m));
        let (f, g) = hard_omega_k(&phi, &n(3), 2).map_err(|e| e.to_string())?;
        if !truth {
            for k in 0..=2u64 {
                // f ≁_{ω+k+1} g: one step to branch k, then the ω family
                let level = omega.add(&OrdNotation::from_u64(k + 1));
                let fam = family(&f, &g, &level, FAMILY, &pool, 20_000);
                ensure(fam.iter().all(|v| v.as_ref().is_some_and(CertVerdict::is_valid)), || {
                    format!("omega_k false: family at {level}: {fam:?}")
                })?;
            }
        }
        probe_clean(&f, &g, &ord("w*2+1"), PROBES, 50_000, 29)?;
    }
    notes.push("omega_k ok".to_string());

    // Π⁰₄ over AEAE at k = 1.
    for (m, truth) in [(1, true), (0, false)] {
        let phi = FormulaFin::new(prefix("AEAE"), const_decider(m));
        let (f, g) = hard_omega_k_plus1(&phi, &n(3), 1).map_err(|e| e.to_string())?;
        let level = omega.succ();
        let fam = family(&f, &g, &level, FAMILY, &pool, 20_000);
        let full = fam.iter().all(|v| v.as_ref().is_some_and(CertVerdict::is_valid));
        ensure(full != truth, || format!("omega_k+1 (truth {truth}): family at {level}: {fam:?}"))?;
        probe_clean(&f, &g, &ord("w+2"), PROBES, 50_000, 39)?;
    }
    notes.push("omega_k+1 ok".to_string());
    Ok(format!("{}; {PROBES} clean probes per instance at the safe levels", notes.join(", ")))
}

fn c10_combiners() -> Result<String, String> {
    const FUEL: u64 = 100_000;
    let o = kernel_oracles();
    let (e, c) = (estar(), cstar());
    let mut r = rng(10);
    // 1
    ensure(combine2(&e, &c) == e, || "combine2(e_*, c_*) ≠ e_*".into())?;
    // 2
    let w = combine2(&c, &c);
    ensure(w != e, || "combine2(c_*, c_*) = e_*".into())?;
    let b0 = RefuteBudget::new(1, vec![n(0)], FUEL);
    let cert = refute_sim(&el(&w), &el(&e), &OrdNotation::zero(), &b0, o).ok_or("no level-0 certificate")?;
    ensure(check_cert(&el(&w), &el(&e), &OrdNotation::zero(), &cert, FUEL, o) == CertVerdict::Holds, || {
        "combine2 level-0 certificate rejected".into()
    })?;
    // 3: f(a, b)·⟨u, v⟩ = f(a·u, b·v)
    let codes = [code(&input()), c.clone(), e.clone(), code(&succ(input()))];
    for _ in 0..20 {
        let a = &codes[r.gen_range(0..codes.len())];
        let b = &codes[r.gen_range(0..codes.len())];
        let (u, v) = (n(r.gen_range(0..50)), n(r.gen_range(0..50)));
        let au = apply(a, &u, FUEL, o).value().cloned().ok_or("a·u undefined")?;
        let bv = apply(b, &v, FUEL, o).value().cloned().ok_or("b·v undefined")?;
        let got = apply(&combine2(a, b), &Nat::pair(&u, &v), FUEL, o);
        ensure(got.value() == Some(&combine2(&au, &bv)), || format!("combine2 threading at ({u}, {v})"))?;
    }
    // 4
    let all_e = combine_omega(&code(&numn(&e)));
    for u in 0..20 {
        ensure(apply(&all_e, &n(u), FUEL, o).value() == Some(&e), || format!("all-e_* combiner at {u}"))?;
    }
    // 5
    let seq_c = code(&numn(&c));
    let wc = combine_omega(&seq_c);
    ensure(wc != e, || "all-c_* combiner equals e_*".into())?;
    let cert = refute_sim(&el(&wc), &el(&e), &OrdNotation::zero(), &b0, o).ok_or("no level-0 certificate")?;
    ensure(check_cert(&el(&wc), &el(&e), &OrdNotation::zero(), &cert, FUEL, o) == CertVerdict::Holds, || {
        "combine_omega level-0 certificate rejected".into()
    })?;
    // 6: w·v₀·v₁ = h(e, ⟨a₀u¹₀, a₁⟩) with v₁ = ⟨u¹₀⟩₁, and one more step
    let seq = code(&if_eq(input(), num(0), numn(&c), numn(&k_code())));
    let w = combine_omega(&seq);
    let a0 = c.clone();
    let a1 = k_code();
    for u in 0..10u64 {
        let got = apply_chain(&w, &[n(5), n(u)], FUEL, o);
        let a0u = apply(&a0, &n(u), FUEL, o).value().cloned().ok_or("a₀u undefined")?;
        ensure(got.value() == Some(&combine_omega_node(&seq, &[a0u.clone(), a1.clone()])), || {
            format!("threading at u = {u}")
        })?;
        // v₂ = ⟨u²₀, u²₁⟩₂ feeds a₀u¹₀ and a₁
        let v2 = tuple_code(&[n(u), n(u + 1)]);
        let got = apply_chain(&w, &[n(5), n(u), v2], FUEL, o);
        let a0uu = apply(&a0u, &n(u), FUEL, o).value().cloned().ok_or("undefined")?;
        let a1u = apply(&a1, &n(u + 1), FUEL, o).value().cloned().ok_or("undefined")?;
        let a2 = apply(&seq, &n(2), FUEL, o).value().cloned().ok_or("undefined")?;
        ensure(got.value() == Some(&combine_omega_node(&seq, &[a0uu, a1u, a2])), || format!("3-step threading at u = {u}"))?;
    }
    Ok("six combiner examples exact, including 2- and 3-step threading".into())
}

/// Formulas of level 1, 2, 3 that hold at `z` iff `z < 5`.
pub fn helper_formula(level: u64) -> FormulaInf {
    let one = OrdNotation::one;
    match level {
        1 => {
            let d = code(&if_eq(snd(input()), num(3), lt(fst(input()), num(5)), num(0)));
            FormulaInf::disj(one(), vec![FormulaInf::atom(d)])
        }
        2 => {
            let d = code(&lt(fst(fst(input())), num(5)));
            FormulaInf::disj(OrdNotation::from_u64(2), vec![FormulaInf::conj(one(), vec![FormulaInf::atom(d)])])
        }
        _ => {
            let d = code(&lt(fst(fst(fst(input()))), num(5)));
            FormulaInf::disj(
                OrdNotation::from_u64(3),
                vec![FormulaInf::conj(OrdNotation::from_u64(2), vec![FormulaInf::disj(one(), vec![FormulaInf::atom(d)])])],
            )
        }
    }
}

fn c11_helper() -> Result<String, String> {
    const INSTANCES: u64 = 10;
    const FAMILY: u64 = 3;
    let o = kernel_oracles();
    let e = el(&estar());
    let mut counts = [0usize; 3];
    for level in 1..=3u64 {
        let phi = helper_formula(level);
        for z in 0..INSTANCES {
            let truth = z < 5;
            let p = el(&hardness_helper(&phi, &n(z)).map_err(|e| e.to_string())?);
            let certified = match level {
                1 => {
                    let b = RefuteBudget::new(1, (0..12).map(n).collect(), 50_000);
                    refute_sim(&p, &e, &OrdNotation::one(), &b, o).is_some()
                }
                2 => (0..FAMILY).all(|j| {
                    let b = RefuteBudget::new(1, vec![n(0), n(1)], 200_000).forced(j);
                    refute_sim(&p, &e, &OrdNotation::omega(), &b, o).is_some()
                }),
                _ => (0..FAMILY).all(|j| {
                    let b = RefuteBudget::new(1, vec![n(0), n(1)], 400_000).forced(j);
                    refute_sim(&p, &e, &OrdNotation::omega().succ(), &b, o).is_some()
                }),
            };
            // level 2 certifies the false side, levels 1 and 3 the true side
            let want = if level == 2 { !truth } else { truth };
            ensure(certified == want, || format!("level {level}, z = {z}: certificate {certified}, truth {truth}"))?;
            counts[level as usize - 1] += 1;
        }
    }
    Ok(format!("levels 1/2/3: {}/{}/{} instances match truth", counts[0], counts[1], counts[2]))
}

fn c12_embeddings() -> Result<String, String> {
    const PAIRS: usize = 200;
    const FUEL: u64 = 5_000;
    let none = OracleTable::new();
    let it = iterator_index();
    ensure(!it.is_zero(), || "iterator index is 0".into())?;
    for k in 0..=25u64 {
        let v = iterate_at_zero(&it, k, 1_000_000, &none);
        ensure(v == Some(n(k)), || format!("e^{k}·0 = {v:?}"))?;
    }
    let emb = embed_k1_rel(EmbeddingSpec::empty());
    let mut r = rng(12);
    let mut pairs = Vec::new();
    let pool = [k_code(), s_code(), i_code(), estar(), cstar()];
    while pairs.len() < PAIRS {
        let a = if r.gen_bool(0.3) { pool[r.gen_range(0..pool.len())].clone() } else { random_program(&mut r) };
        let b = n(r.gen_range(0..500));
        if apply(&a, &b, FUEL, &none).is_defined() {
            pairs.push((a, b));
        }
    }
    let rep = embeddings::check_embedding(|a| emb.map(a), &none, &none, &pairs, FUEL, embeddings::target_fuel(FUEL));
    ensure(rep.ok() && rep.passed == PAIRS, || format!("{} failures, {} passed", rep.failures.len(), rep.passed))?;
    let par_spec = EmbeddingSpec::parity_into_parity_succ();
    par_spec.validate(100, 1_000).map_err(|e| e.to_string())?;
    let pemb = embed_k1_rel(par_spec);
    let pprogs = [code(&prim(64, input())), code(&if_eq(prim(64, input()), num(1), succ(input()), num(0)))];
    let ppairs: Vec<(Nat, Nat)> = (0..50u64).map(|i| (pprogs[(i % 2) as usize].clone(), n(i))).collect();
    let prep = embeddings::check_embedding(
        |a| pemb.map(a),
        &pemb.spec.source,
        &pemb.spec.target,
        &ppairs,
        FUEL,
        embeddings::target_fuel(FUEL),
    );
    ensure(prep.ok(), || format!("parity embedding: {:?}", prep.failures))?;
    let collision = embeddings::find_collision(|a| emb.map(a), (0..10_000).map(n));
    ensure(collision.is_none(), || format!("collision {collision:?}"))?;
    Ok(format!(
        "e^n·0 = n for n ≤ 25; {PAIRS}/{PAIRS} defined pairs preserved; parity spec 50/50; injective below 10^4"
    ))
}

fn c13_k2() -> Result<String, String> {
    const N: usize = 64;
    const TRIPLES: usize = 50;
    const INPUTS: usize = 5;
    const ALT_POINTS: u64 = 100;
    let none = OracleTable::new();
    let table = Arc::new(embed_k1_to_k2(N, N, &none));
    let approx = table.validate().map_err(|(n, s, e)| format!("f_{{{n},{s}}}: {e}"))?;
    let mut r = rng(13);
    let mut defined = Vec::new();
    let mut divergent = Vec::new();
    for a in 0..N as u64 {
        for b in 0..=10u64 {
            match k2::source_status(&table, a, b, &none) {
                SourceStatus::Defined { .. } => defined.push((a, b)),
                SourceStatus::Divergent => divergent.push((a, b)),
                SourceStatus::Late => {}
            }
        }
    }
    ensure(defined.len() >= TRIPLES, || format!("only {} defined triples", defined.len()))?;
    let pick = |r: &mut ChaCha8Rng, v: &mut Vec<(u64, u64)>| -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        while out.len() < TRIPLES.min(v.len()) {
            out.push(v.swap_remove(r.gen_range(0..v.len())));
        }
        out
    };
    let chosen_def = pick(&mut r, &mut defined);
    let chosen_div = pick(&mut r, &mut divergent);
    let mut checked = 0;
    for (a, b) in chosen_def.iter().chain(&chosen_div) {
        let tails: Vec<Vec<u64>> =
            (0..INPUTS).map(|_| (0..r.gen_range(0..6)).map(|_| r.gen_range(0..4)).collect()).collect();
        let rep = check_preservation(&table, *a, *b, &tails, &none);
        ensure(rep.failures == 0, || format!("preservation fails: {rep:?}"))?;
        checked += rep.inputs;
    }
    // apply_alt against direct evaluation, at embedded indices
    let g: Provider = Arc::new(|x: &Nat| x.clone());
    for i in 0..ALT_POINTS {
        let a = n(r.gen_range(0..N as u64));
        let x = n(i);
        let a2 = a.clone();
        let f: Provider = Arc::new(move |y: &Nat| if y.is_zero() { a2.clone() } else { Nat::zero() });
        let alt = apply_alt(&f, &g, &x, 10_000);
        ensure(alt == eval(&a, &x, 10_000, &none), || format!("apply_alt at ({a}, {x})"))?;
    }
    let bad: Provider = Arc::new(|_| Nat::pair(&n(TAG_LIMIT), &Nat::zero()));
    ensure(apply_alt(&bad, &g, &n(0), 10_000) == Outcome::OutOfFuel, || "invalid index defined".into())?;
    Ok(format!(
        "{approx} stage maps monotone; {} defined and {} divergent pairs x {INPUTS} inputs ({checked} checks) preserved; apply_alt agrees on {ALT_POINTS} points",
        chosen_def.len(),
        chosen_div.len()
    ))
}

fn c14_defining() -> Result<String, String> {
    const PAIRS: usize = 50;
    const BOUND: u64 = 8;
    const FUEL: u64 = 2_000;
    let o = kernel_oracles();
    let phi = defining_formula(&OrdNotation::one()).map_err(|e| e.to_string())?;
    let mut r = rng(14);
    let mut tally = [0usize; 3];
    for i in 0..PAIRS {
        let (s, t) = match i % 5 {
            0 => {
                let a = n(r.gen_range(0..2_000));
                (a.clone(), crate::machine::pad(&a, &n(r.gen_range(0..3))))
            }
            1 => (random_program(&mut r), random_program(&mut r)),
            2 => {
                let (x, y) = (n(r.gen_range(0..5)), n(r.gen_range(0..5)));
                (hierarchy::k_lift(&x), hierarchy::k_lift(&y))
            }
            3 => (code(&succ(input())), code(&prim(builtin::ADD, pair(input(), num(r.gen_range(0..2)))))),
            _ => (estar(), cstar()),
        };
        let v = eval_rel(&phi, &el(&s), &el(&t), BOUND, FUEL, o);
        // Evidence: s·x against t·x for x < BOUND at a larger fuel.
        let ev: Vec<TriVerdict> = (0..BOUND)
            .map(|x| {
                kleene_eq_bounded(&Term::app(el(&s), el(&n(x))), &Term::app(el(&t), el(&n(x))), FUEL * 10, o)
                    .expect("closed")
            })
            .collect();
        let distinct = ev.iter().any(|v| matches!(v, TriVerdict::DistinctDefined(..)));
        let all_equal = ev.iter().all(|v| matches!(v, TriVerdict::EqualDefined(_)));
        let contradiction = match v {
            Truth::True => distinct,
            Truth::False => all_equal,
            Truth::Unknown => false,
        };
        ensure(!contradiction, || format!("pair {i}: formula says {v:?}, evidence {ev:?}"))?;
        tally[match v {
            Truth::True => 0,
            Truth::False => 1,
            Truth::Unknown => 2,
        }] += 1;
    }
    Ok(format!("{PAIRS} pairs, no contradiction (true {}, false {}, unknown {})", tally[0], tally[1], tally[2]))
}
