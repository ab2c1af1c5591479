// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Arithmetical and computable-infinitary formulas, and the index builders
//! that reduce their truth to the relations `∼_α`.
//!
//! Every builder here is pure syntax: it assembles codes and never runs
//! them. Where a construction has to be repeated inside the machine (a
//! program that produces a code at run time), the host function and the
//! run-time producer are written side by side and the tests check that
//! they agree as naturals.
//!
//! Matrices of finitary formulas are 0/1 deciders on the right-nested tuple
//! `⟨z, x₁, …, x_k⟩` of the parameter and the bound variables.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::{cert_path, cert_along, cstar, estar, extend_program, k_lift, DistinguishCert, PathNode};
use crate::machine::builtin;
use crate::machine::kit::{str_code, tuple_code};
use crate::machine::prog::*;
use crate::machine::{eval, s11, OracleTable, Outcome};
use crate::nat::Nat;
use crate::ordinals::{self, ord_code, ord_decode, Kind, OrdNotation, Parity};
use crate::pca::{bot_code, k1_code, kleene_eq_bounded, Term, TriVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("quantifier prefix {got} does not have the shape {expected}")]
    Prefix { expected: String, got: String },
    #[error("level must be at least {min}, got {got}")]
    Level { min: u64, got: u64 },
    #[error("k = {0} is outside the supported range")]
    Depth(u64),
    #[error("malformed level stratification: {0}")]
    Stratification(String),
    #[error("term is not closed")]
    OpenTerm,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Three-valued truth of a formula under bounded evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn from_decider(o: &Outcome) -> Truth {
        match o.value().and_then(Nat::as_u64) {
            Some(1) => Truth::True,
            Some(0) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    pub fn is_definite(self) -> bool {
        self != Truth::Unknown
    }
}

// Bounded quantifiers. An existential search that finds a witness is
// definite; one that runs out of candidates is not, since a witness may lie
// beyond the bound. Dually a universal is definitely false on a
// counterexample and true-within-bounds otherwise.
fn exists_over(it: impl Iterator<Item = Truth>) -> Truth {
    for t in it {
        if t == Truth::True {
            return Truth::True;
        }
    }
    Truth::Unknown
}

fn forall_over(it: impl Iterator<Item = Truth>) -> Truth {
    let mut all = true;
    for t in it {
        match t {
            Truth::False => return Truth::False,
            Truth::Unknown => all = false,
            Truth::True => {}
        }
    }
    if all {
        Truth::True
    } else {
        Truth::Unknown
    }
}

// ---------------------------------------------------------------------------
// Finitary formulas

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quant {
    #[serde(rename = "A")]
    Forall,
    #[serde(rename = "E")]
    Exists,
}

impl Quant {
    fn letter(self) -> char {
        match self {
            Quant::Forall => 'A',
            Quant::Exists => 'E',
        }
    }
}

/// `Q₁x₁ ⋯ Q_kx_k. θ(z, x₁, …, x_k) = 1` with `θ` a machine code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaFin {
    pub prefix: Vec<Quant>,
    pub matrix: Nat,
}

impl FormulaFin {
    pub fn new(prefix: Vec<Quant>, matrix: Nat) -> Self {
        FormulaFin { prefix, matrix }
    }

    pub fn prefix_string(&self) -> String {
        self.prefix.iter().map(|q| q.letter()).collect()
    }

    fn expect_prefix(&self, expected: &str) -> Result<(), ReductionError> {
        if self.prefix_string() == expected {
            Ok(())
        } else {
            Err(ReductionError::Prefix { expected: expected.into(), got: self.prefix_string() })
        }
    }
}

impl fmt::Display for FormulaFin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.prefix.iter().enumerate() {
            write!(f, "{} x{} ", q.letter(), i + 1)?;
        }
        write!(f, ". matrix=#{}", self.matrix)
    }
}

/// Surface syntax `A n E m . matrix=#<code>`: quantifier letters each
/// followed by a variable name, a dot, then the matrix code.
impl FromStr for FormulaFin {
    type Err = ReductionError;

    fn from_str(src: &str) -> Result<Self, ReductionError> {
        let err = |pos: usize, msg: &str| ReductionError::Parse { pos, msg: msg.into() };
        let mut prefix = Vec::new();
        let mut toks = Vec::new();
        let mut pos = 0;
        for piece in src.split_inclusive(char::is_whitespace) {
            let t = piece.trim();
            if !t.is_empty() {
                toks.push((pos + piece.find(t).unwrap_or(0), t));
            }
            pos += piece.len();
        }
        let mut i = 0;
        while i < toks.len() {
            let (p, t) = toks[i];
            match t {
                "A" | "E" => {
                    let q = if t == "A" { Quant::Forall } else { Quant::Exists };
                    let Some(&(vp, v)) = toks.get(i + 1) else {
                        return Err(err(src.len(), "expected a variable name"));
                    };
                    if !v.chars().all(|c| c.is_alphanumeric() || c == '_') || v.is_empty() {
                        return Err(err(vp, "expected a variable name"));
                    }
                    prefix.push(q);
                    i += 2;
                }
                "." => {
                    let Some(&(mp, m)) = toks.get(i + 1) else {
                        return Err(err(src.len(), "expected matrix=#<code>"));
                    };
                    let Some(num) = m.strip_prefix("matrix=#") else {
                        return Err(err(mp, "expected matrix=#<code>"));
                    };
                    let matrix = Nat::parse_decimal(num).ok_or_else(|| err(mp + 8, "expected a decimal code"))?;
                    if let Some(&(xp, _)) = toks.get(i + 2) {
                        return Err(err(xp, "trailing input"));
                    }
                    return Ok(FormulaFin { prefix, matrix });
                }
                _ => return Err(err(p, "expected A, E or '.'")),
            }
        }
        Err(err(src.len(), "missing '. matrix=#<code>'"))
    }
}

/// Evaluates a finitary formula at parameter `z`.
///
/// Universal variables range over `[0, bound)`. An existential search at
/// a point where the largest value bound so far is `v` tries `[0, bound + v]`,
/// so `∀n ∃m (m = n + 1)` is settled within bound 10.
pub fn eval_fin(phi: &FormulaFin, z: &Nat, bound: u64, fuel: u64, oracles: &OracleTable) -> Truth {
    let mut vals = vec![z.clone()];
    eval_fin_rec(phi, &mut vals, 0, bound, fuel, oracles)
}

fn eval_fin_rec(phi: &FormulaFin, vals: &mut Vec<Nat>, top: u64, bound: u64, fuel: u64, oracles: &OracleTable) -> Truth {
    let i = vals.len() - 1;
    if i == phi.prefix.len() {
        return Truth::from_decider(&eval(&phi.matrix, &tuple_code(vals), fuel, oracles));
    }
    let branch = |x: u64, vals: &mut Vec<Nat>| {
        vals.push(Nat::from_u64(x));
        let r = eval_fin_rec(phi, vals, top.max(x), bound, fuel, oracles);
        vals.pop();
        r
    };
    match phi.prefix[i] {
        Quant::Exists => {
            let hi = bound.saturating_add(top);
            let mut out = Truth::Unknown;
            for x in 0..=hi {
                if branch(x, vals) == Truth::True {
                    out = Truth::True;
                    break;
                }
            }
            out
        }
        Quant::Forall => {
            let mut res = Vec::new();
            for x in 0..bound {
                let r = branch(x, vals);
                if r == Truth::False {
                    return Truth::False;
                }
                res.push(r);
            }
            forall_over(res.into_iter())
        }
    }
}

// ---------------------------------------------------------------------------
// Small program kit

fn self_passing(body: P) -> Nat {
    code(&body)
}

/// Entry of self-passing `r` with the argument `⟨input, start⟩`.
fn entry_with(r: &Nat, start: P) -> P {
    run(numn(r), pair(numn(r), pair(input(), start)))
}

/// Bounded quantifier program: on `⟨b, c⟩` it returns 1 iff `[Q j < b]`
/// `Φ_body(⟨c, j⟩) = 1`, and 0 otherwise.
pub fn bounded_quantifier(q: Quant, body: &Nat) -> Nat {
    let bc = fst(arg());
    let j = snd(arg());
    let b = fst(bc.clone());
    let c = snd(bc.clone());
    let r = run(numn(body), pair(c, j.clone()));
    let next = recurse(pair(bc, succ(j.clone())));
    let (empty, step) = match q {
        Quant::Exists => (0, if_eq(r, num(1), num(1), next)),
        Quant::Forall => (1, if_eq(r, num(1), next, num(0))),
    };
    let l = self_passing(if_eq(j, b, num(empty), step));
    code(&entry_with(&l, num(0)))
}

/// Program that reads `⟨⟨p₀, …, p_{k-1}⟩_k, rest⟩` and runs `theta` on the
/// flattened tuple `⟨p₀, …, p_{k-1}, rest⟩`.
pub fn flatten_head(theta: &Nat, k: usize) -> Nat {
    assert!(k >= 1);
    let head = fst(input());
    let mut acc = snd(input());
    for i in (0..k).rev() {
        acc = pair(proj(head.clone(), k, i), acc);
    }
    code(&run(numn(theta), acc))
}

/// The monotone rewrite of a `Σ⁰₃` matrix. For `θ` on `⟨z, n, u, m⟩` it
/// returns `θ'` on `⟨z, n, w, M⟩` with
/// `θ'(z, n, w, M) = ∃p < n ∀u ≤ w ∃m ≤ M θ(z, p, u, m)`.
///
/// `∀w ∃M θ'(z, n, w, M)` is equivalent to `∃p < n ∀u ∃m θ(z, p, u, m)`
/// (collection for the bounded `∀u`), which implies its own instance at
/// `n + 1`. The matrix itself is monotone in `n`.
pub fn monotonize(theta: &Nat) -> Nat {
    // body3(⟨⟨z, ⟨p, u⟩⟩, m⟩) = θ(⟨z, ⟨p, ⟨u, m⟩⟩⟩)
    let c3 = fst(input());
    let m = snd(input());
    let body3 = code(&run(
        numn(theta),
        tuple(vec![fst(c3.clone()), fst(snd(c3.clone())), snd(snd(c3)), m]),
    ));
    let q3 = bounded_quantifier(Quant::Exists, &body3);
    // body2(⟨⟨⟨z, p⟩, M⟩, u⟩) = q3(⟨M + 1, ⟨z, ⟨p, u⟩⟩⟩)
    let c2 = fst(input());
    let u = snd(input());
    let zp = fst(c2.clone());
    let body2 = code(&run(
        numn(&q3),
        pair(succ(snd(c2)), tuple(vec![fst(zp.clone()), snd(zp), u])),
    ));
    let q2 = bounded_quantifier(Quant::Forall, &body2);
    // body1(⟨⟨z, ⟨w, M⟩⟩, p⟩) = q2(⟨w + 1, ⟨⟨z, p⟩, M⟩⟩)
    let c1 = fst(input());
    let p = snd(input());
    let z = fst(c1.clone());
    let wm = snd(c1);
    let body1 = code(&run(
        numn(&q2),
        pair(succ(fst(wm.clone())), pair(pair(z, p), snd(wm))),
    ));
    let q1 = bounded_quantifier(Quant::Exists, &body1);
    // θ'(⟨z, ⟨n, ⟨w, M⟩⟩⟩) = q1(⟨n, ⟨z, ⟨w, M⟩⟩⟩)
    let z = proj(input(), 4, 0);
    let n = proj(input(), 4, 1);
    let w = proj(input(), 4, 2);
    let mm = proj(input(), 4, 3);
    code(&run(numn(&q1), pair(n, pair(z, pair(w, mm)))))
}

/// Checks `θ'(z, n, w, M) = 1 ⟹ θ'(z, n+1, w, M) = 1` on the grid
/// `[0, b)⁴`. Returns the first violation.
pub fn check_monotone(theta_m: &Nat, b: u64, fuel: u64, oracles: &OracleTable) -> Result<(), [u64; 4]> {
    for z in 0..b {
        for n in 0..b {
            for w in 0..b {
                for m in 0..b {
                    let at = |n: u64| {
                        let x = tuple_code(&[z, n, w, m].map(Nat::from_u64));
                        Truth::from_decider(&eval(theta_m, &x, fuel, oracles))
                    };
                    if at(n) == Truth::True && at(n + 1) != Truth::True {
                        return Err([z, n, w, m]);
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ∼_{α+1} versus ∼_{α+2}

fn term_program(t: &Term) -> Result<P, ReductionError> {
    match t {
        Term::Elem(c) => Ok(numn(c)),
        Term::Var(_) => Err(ReductionError::OpenTerm),
        Term::App(a, b) => Ok(run(term_program(a)?, term_program(b)?)),
    }
}

/// Codes `f ≃ K s`, `g ≃ K t` in the sense of `∼₁`: `f·x ≃ s` for every `x`.
/// Elements use `K·a` itself.
pub fn lift_pair(s: &Term, t: &Term) -> Result<(Nat, Nat), ReductionError> {
    let one = |u: &Term| -> Result<Nat, ReductionError> {
        match u {
            Term::Elem(a) => Ok(k_lift(a)),
            _ => Ok(code(&*term_program(u)?)),
        }
    };
    Ok((one(s)?, one(t)?))
}

/// `(f, g)` with `f·⟨a, b⟩₂ ≃ s·a·b` and `g·⟨a, b⟩₂ ≃ t·a·b`.
pub fn collapse_pair(s: &Term, t: &Term) -> Result<(Nat, Nat), ReductionError> {
    let one = |u: &Term| -> Result<Nat, ReductionError> {
        Ok(code(&run(run(term_program(u)?, fst(input())), snd(input()))))
    };
    Ok((one(s)?, one(t)?))
}

/// Maps a certificate for `s ≁_{α+2} t` that starts with two steps `a`, `b`
/// to the certificate for the collapsed pair that starts with `⟨a, b⟩`.
pub fn collapse_cert(
    s: &Term,
    t: &Term,
    cert: &DistinguishCert,
    fuel: u64,
    oracles: &OracleTable,
) -> Option<DistinguishCert> {
    let path = cert_path(cert);
    let (PathNode::Step(a), PathNode::Step(b)) = (path.first()?, path.get(1)?) else {
        return None;
    };
    let mut out = vec![PathNode::Step(Nat::pair(a, b))];
    out.extend(path[2..].iter().cloned());
    let (f, g) = collapse_pair(s, t).ok()?;
    cert_along(&Term::Elem(f), &Term::Elem(g), &out, fuel, oracles)
}

// ---------------------------------------------------------------------------
// Π⁰₂ and Σ⁰₃

/// `d₀ = c` (nowhere defined) and `d_{k+1} = K·d_k`.
pub fn d_chain(k: u64) -> Nat {
    (0..k).fold(bot_code(), |d, _| k_lift(&d))
}

/// Self-passing program computing `d_k` from `k`.
fn d_program() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let k = arg();
        self_passing(if_eq(
            k.clone(),
            num(0),
            numn(&bot_code()),
            q_s11(numn(&k1_code()), recurse(pred(k))),
        ))
    })
    .clone()
}

/// Run-time `d_k` for the value of `k`.
fn d_at(k: P) -> P {
    let r = d_program();
    run(numn(&r), pair(numn(&r), k))
}

/// The body of `f` in the `Π⁰₂` reduction. On `⟨⟨ψ, ⟨z, r⟩⟩, n⟩` it searches
/// `m = 0, 1, …` for `Φ_ψ(⟨z, ⟨n, m⟩⟩) = 1` and returns `r` when found.
fn pi2_search_entry() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let st = fst(arg());
        let nm = snd(arg());
        let psi = fst(st.clone());
        let z = fst(snd(st.clone()));
        let r = snd(snd(st.clone()));
        let n = fst(nm.clone());
        let m = snd(nm);
        let hit = run(psi, pair(z, pair(n.clone(), m.clone())));
        let s = self_passing(if_eq(hit, num(1), r, recurse(pair(st, pair(n, succ(m))))));
        code(&run(numn(&s), pair(numn(&s), pair(fst(input()), pair(snd(input()), num(0))))))
    })
    .clone()
}

/// `(f, g)` for `∀n ∃m ψ(z, n, m)` with `ψ` a decider on `⟨z, ⟨n, m⟩⟩`:
/// `g = d_ℓ`, and `f·n` is `d_{ℓ-1}` once a witness `m` is found.
///
/// `f ∼₁ g` when the formula holds, `f ≁_ℓ g` when it fails, and
/// `f ∼_{ℓ+1} g` always.
pub fn hard_pi2(psi: &Nat, z: &Nat, ell: u64) -> Result<(Nat, Nat), ReductionError> {
    if ell == 0 {
        return Err(ReductionError::Level { min: 1, got: 0 });
    }
    Ok(pi2_pair(psi, z, ell))
}

fn pi2_pair(psi: &Nat, z: &Nat, ell: u64) -> (Nat, Nat) {
    let f = s11(&pi2_search_entry(), &Nat::pair(psi, &Nat::pair(z, &d_chain(ell - 1))));
    (f, d_chain(ell))
}

/// A family of index pairs indexed by a parameter, given both as host
/// codes and as run-time producer programs `z ↦ code`.
#[derive(Clone, Debug)]
struct Family {
    prod_f: Nat,
    prod_g: Nat,
    kind: FamilyKind,
}

#[derive(Clone, Debug)]
enum FamilyKind {
    /// `f(z) = s11(F3, z)`, `g(z) = s11(G3, z)`.
    Sigma3 { f_body: Nat, g_body: Nat },
    /// Spine over `e_a(z) = s11(seq_f, z)`, `e_b(z) = s11(seq_g, z)`.
    Spine { seq_f: Nat, seq_g: Nat },
}

impl Family {
    fn host(&self, z: &Nat) -> (Nat, Nat) {
        match &self.kind {
            FamilyKind::Sigma3 { f_body, g_body } => (s11(f_body, z), s11(g_body, z)),
            FamilyKind::Spine { seq_f, seq_g } => (spine_index(&s11(seq_f, z)), spine_index(&s11(seq_g, z))),
        }
    }
}

/// `Σ⁰₃` family for a matrix `θ` on `⟨z, n, u, m⟩` (before monotonization).
fn sigma3_family(theta: &Nat) -> Family {
    let psi = flatten_head(&monotonize(theta), 2);
    // F3(⟨z, n⟩) = s11(E, ⟨ψ, ⟨⟨z, n⟩, d_n⟩⟩), the Π⁰₂ pair at ℓ = n + 1.
    let n = snd(input());
    let f_body = code(&q_s11(
        numn(&pi2_search_entry()),
        pair(numn(&psi), pair(input(), d_at(n.clone()))),
    ));
    let g_body = code(&d_at(succ(n)));
    Family {
        prod_f: code(&q_s11(numn(&f_body), input())),
        prod_g: code(&q_s11(numn(&g_body), input())),
        kind: FamilyKind::Sigma3 { f_body, g_body },
    }
}

/// `(f, g)` for `∃n ∀u ∃m θ(z, n, u, m)`, prefix `EAE`. The matrix is first
/// rewritten by [`monotonize`]; then `f·n`, `g·n` is the `Π⁰₂` pair of the
/// `n`-th instance at `ℓ = n + 1`.
///
/// `f ∼_ω g` iff the formula holds, and `f ∼_{ω+1} g` always.
pub fn hard_sigma3(phi: &FormulaFin, z: &Nat) -> Result<(Nat, Nat), ReductionError> {
    phi.expect_prefix("EAE")?;
    Ok(sigma3_family(&phi.matrix).host(z))
}

/// The `Π⁰₂` pair that `hard_sigma3` places at branch `n`.
pub fn sigma3_branch(phi: &FormulaFin, z: &Nat, n: u64) -> Result<(Nat, Nat), ReductionError> {
    phi.expect_prefix("EAE")?;
    let psi = flatten_head(&monotonize(&phi.matrix), 2);
    Ok(pi2_pair(&psi, &Nat::pair(z, &Nat::from_u64(n)), n + 1))
}

// ---------------------------------------------------------------------------
// Spines

/// Checks that every entry of `σ` after the first is 0. Input `⟨σ, |σ|⟩`.
fn zero_tail_entry() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let sl = fst(arg());
        let i = snd(arg());
        let sigma = fst(sl.clone());
        let l = snd(sl.clone());
        let body = if_eq(
            i.clone(),
            l,
            num(1),
            if_eq(at(sigma, i.clone()), num(0), recurse(pair(sl, succ(i))), num(0)),
        );
        let r = self_passing(body);
        code(&entry_with(&r, num(1)))
    })
    .clone()
}

/// Self-passing spine program. On `⟨self, ⟨e, σ⟩⟩` with `σ(0) = ⟨n, m⟩₂`:
/// `σ = σ_{n,m} = ⟨n, m⟩₂⌢0ⁿ` gives `Φ_e(⟨n, m⟩)`, a proper prefix of it
/// gives the extension code, anything else diverges.
pub fn spine_program() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        let e = fst(arg());
        let sigma = snd(arg());
        let g = q_s11(numn(&extend_program()), pair(me(), arg()));
        let l = len(sigma.clone());
        let k = pred(l.clone());
        let first = at(sigma.clone(), num(0));
        let n = fst(first.clone());
        let zeros = run(numn(&zero_tail_entry()), pair(sigma.clone(), l));
        let on_spine = if_eq(
            k.clone(),
            n.clone(),
            run(e, first),
            if_eq(lt(k, n), num(1), g.clone(), bot()),
        );
        self_passing(if_eq(sigma, num(0), g, if_eq(zeros, num(1), on_spine, bot())))
    })
    .clone()
}

/// `f` with `f·σ_{n,m} = Φ_e(⟨n, m⟩₂)` along the spine strings
/// `σ_{n,m} = ⟨n, m⟩₂⌢0ⁿ`, and `f·τ` divergent for `τ` incomparable with
/// every spine string.
pub fn spine_index(e: &Nat) -> Nat {
    let r = spine_program();
    s11(&extend_program(), &Nat::pair(&r, &Nat::pair(e, &Nat::zero())))
}

fn spine_producer(seq: P) -> P {
    q_s11(numn(&extend_program()), pair(numn(&spine_program()), pair(seq, num(0))))
}

/// Family for `∃n ∀m ψ(z, n, m)` with `ψ` of prefix length `2k - 1`, `k ≥ 2`.
fn spine_family(theta: &Nat, k: u64) -> Family {
    let inner = omega_family(&flatten_head(theta, 3), k - 1);
    // seq(⟨z, ⟨n, m⟩⟩) runs the inner producer on ⟨z, ⟨n, m⟩⟩ itself.
    let seq_f = code(&run(numn(&inner.prod_f), input()));
    let seq_g = code(&run(numn(&inner.prod_g), input()));
    Family {
        prod_f: code(&spine_producer(q_s11(numn(&seq_f), input()))),
        prod_g: code(&spine_producer(q_s11(numn(&seq_g), input()))),
        kind: FamilyKind::Spine { seq_f, seq_g },
    }
}

fn omega_family(theta: &Nat, k: u64) -> Family {
    if k == 1 {
        sigma3_family(theta)
    } else {
        spine_family(theta, k)
    }
}

/// Supported depth of the `ωk` reductions.
pub const MAX_OMEGA_K: u64 = 2;

fn sigma_prefix(k: u64) -> String {
    // Σ⁰_{2k+1}: E A E for k = 1, E A E A E for k = 2, ...
    let mut s = String::from("E");
    for _ in 0..k {
        s.push_str("AE");
    }
    s
}

/// `(f, g)` with `f ∼_{ωk} g` iff `φ(z)` holds and `f ∼_{ωk+1} g` always,
/// for `φ = ∃n ∀m ψ(z, n, m)` of prefix `E(AE)^k`.
///
/// At `k = 1` this is [`hard_sigma3`]. At `k = 2` the caller must supply a
/// matrix with `∀m ψ(z, n, m) ⟹ ∀m ψ(z, n+1, m)`; the inner `Σ⁰₃` layers
/// are monotonized automatically.
pub fn hard_omega_k(phi: &FormulaFin, z: &Nat, k: u64) -> Result<(Nat, Nat), ReductionError> {
    if k == 0 || k > MAX_OMEGA_K {
        return Err(ReductionError::Depth(k));
    }
    phi.expect_prefix(&sigma_prefix(k))?;
    Ok(omega_family(&phi.matrix, k).host(z))
}

/// `(f, g)` with `f·n`, `g·n` the `hard_omega_k` pair of `ψ(z, n)` for
/// `φ = ∀n ψ(z, n)`, prefix `A E(AE)^k`. Then `f ∼_{ωk+1} g` iff `φ(z)`,
/// and `f ∼_{ωk+2} g` always. At `k = 0` this is [`hard_pi2`] with `ℓ = 1`.
pub fn hard_omega_k_plus1(phi: &FormulaFin, z: &Nat, k: u64) -> Result<(Nat, Nat), ReductionError> {
    if k > MAX_OMEGA_K {
        return Err(ReductionError::Depth(k));
    }
    if k == 0 {
        phi.expect_prefix("AE")?;
        return hard_pi2(&phi.matrix, z, 1);
    }
    phi.expect_prefix(&format!("A{}", sigma_prefix(k)))?;
    let inner = omega_family(&flatten_head(&phi.matrix, 2), k);
    let pf = code(&run(numn(&inner.prod_f), input()));
    let pg = code(&run(numn(&inner.prod_g), input()));
    Ok((s11(&pf, z), s11(&pg, z)))
}

/// The pair `hard_omega_k_plus1` places at branch `n`.
pub fn omega_k_plus1_branch(phi: &FormulaFin, z: &Nat, k: u64, n: u64) -> Result<(Nat, Nat), ReductionError> {
    if k == 0 || k > MAX_OMEGA_K {
        return Err(ReductionError::Depth(k));
    }
    phi.expect_prefix(&format!("A{}", sigma_prefix(k)))?;
    let inner = omega_family(&flatten_head(&phi.matrix, 2), k);
    Ok(inner.host(&Nat::pair(z, &Nat::from_u64(n))))
}

// ---------------------------------------------------------------------------
// Combiners

/// Self-passing `R₂`: on `⟨self, ⟨x, y⟩⟩` returns `e_*` if either side is
/// `e_*`, else `s11(G₂, ⟨self, ⟨x, y⟩⟩)` with `G₂`'s application to
/// `⟨u, v⟩₂` continuing on `⟨x·u, y·v⟩`. Outputs of the second branch have
/// root tag `Run`, and `e_*` has root tag `Pad`.
fn combine2_programs() -> &'static (Nat, Nat) {
    static C: OnceLock<(Nat, Nat)> = OnceLock::new();
    C.get_or_init(|| {
        let st = fst(input());
        let i = fst(st.clone());
        let xy = snd(st);
        let w = snd(input());
        let g2 = code(&run(
            i.clone(),
            pair(i, pair(run(fst(xy.clone()), fst(w.clone())), run(snd(xy), snd(w)))),
        ));
        let e = estar();
        let x = fst(arg());
        let y = snd(arg());
        let g = q_s11(numn(&g2), pair(me(), arg()));
        let r2 = self_passing(if_eq(x, numn(&e), numn(&e), if_eq(y, numn(&e), numn(&e), g)));
        (r2, g2)
    })
}

/// `f(a, b)` with `f(a, b) ∼_α e_*` iff `a ∼_α e_*` or `b ∼_α e_*`, for
/// hereditarily total `a`, `b`.
pub fn combine2(a: &Nat, b: &Nat) -> Nat {
    let e = estar();
    if a == &e || b == &e {
        return e;
    }
    let (r2, g2) = combine2_programs();
    s11(g2, &Nat::pair(r2, &Nat::pair(a, b)))
}

/// Programs of the `ω`-combiner: `(R_ω, G_ω)`.
///
/// `R_ω(⟨self, ⟨e, ⟨x₀, …, x_{n-1}⟩⟩⟩)` returns `e_*` if some `x_ℓ = e_*`
/// and `s11(G_ω, ⟨self, ⟨e, ⟨x⃗⟩⟩⟩)` otherwise. `G_ω` on `v` decodes `v` as an
/// `n`-tuple `⟨u₀, …, u_{n-1}⟩_n` and continues on
/// `⟨x₀·u₀, …, x_{n-1}·u_{n-1}, Φ_e(n)⟩`; for `n = 0` it ignores `v`.
fn combine_omega_programs() -> &'static (Nat, Nat) {
    static C: OnceLock<(Nat, Nat)> = OnceLock::new();
    C.get_or_init(|| {
        let e_star = estar();
        // scan(⟨σ, L⟩): 1 iff some σ(i) = e_* for i < L.
        let scan = {
            let sl = fst(arg());
            let i = snd(arg());
            let sigma = fst(sl.clone());
            let l = snd(sl.clone());
            let r = self_passing(if_eq(
                i.clone(),
                l,
                num(0),
                if_eq(at(sigma, i.clone()), numn(&e_star), num(1), recurse(pair(sl, succ(i)))),
            ));
            code(&entry_with(&r, num(0)))
        };
        // step(⟨⟨xs, ⟨v, n⟩⟩, ⟨j, acc⟩⟩): appends x_j·u_j for j < n.
        let step = {
            let st = fst(arg());
            let ja = snd(arg());
            let xs = fst(st.clone());
            let v = fst(snd(st.clone()));
            let n = snd(snd(st.clone()));
            let j = fst(ja.clone());
            let acc = snd(ja);
            let u = prim(builtin::TUPLE_GET, pair(v, pair(n.clone(), j.clone())));
            let r = self_passing(if_eq(
                j.clone(),
                n,
                acc.clone(),
                recurse(pair(st, pair(succ(j.clone()), append(acc, run(at(xs, j), u))))),
            ));
            code(&entry_with(&r, pair(num(0), num(0))))
        };
        let g_omega = {
            let st = fst(input());
            let v = snd(input());
            let i = fst(st.clone());
            let e = fst(snd(st.clone()));
            let xs = snd(snd(st));
            let n = len(xs.clone());
            let ys = run(numn(&step), pair(xs, pair(v, n.clone())));
            let ys = append(ys, run(e.clone(), n));
            code(&run(i.clone(), pair(i, pair(e, ys))))
        };
        let xs = snd(arg());
        let found = run(numn(&scan), pair(xs.clone(), len(xs)));
        let g = q_s11(numn(&g_omega), pair(me(), arg()));
        let r = self_passing(if_eq(found, num(1), numn(&e_star), g));
        (r, g_omega)
    })
}

/// `h(e, ⟨x₀, …, x_{n-1}⟩)` of the `ω`-combiner, computed on the host.
pub fn combine_omega_node(seq: &Nat, xs: &[Nat]) -> Nat {
    let e = estar();
    if xs.iter().any(|x| x == &e) {
        return e;
    }
    let (r, g) = combine_omega_programs();
    s11(g, &Nat::pair(r, &Nat::pair(seq, &str_code(xs))))
}

/// `w = h(e, ε)` for the sequence index `seq` (`a_n = Φ_seq(n)`): if some
/// `a_n ∼_α e_*` then `w ∼_{α+n+1} e_*`, and if no `a_n` is `≈ e_*` then
/// neither is `w`.
pub fn combine_omega(seq: &Nat) -> Nat {
    combine_omega_node(seq, &[])
}

fn combine_omega_q(seq: P) -> P {
    let (r, g) = combine_omega_programs();
    q_s11(numn(g), pair(numn(r), pair(seq, num(0))))
}

// ---------------------------------------------------------------------------
// Computable infinitary formulas

/// Subformula enumeration of a [`FormulaInf`] node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parts {
    /// A machine code `ℓ ↦ code of the ℓ-th subformula`.
    Code(Nat),
    /// A finite list; index `ℓ ≥ len` repeats the last entry.
    List(Vec<FormulaInf>),
}

/// A computable infinitary formula with one free parameter `z`.
///
/// - `Atom`: `Φ_decider(z) = 1` (or its negation).
/// - `Disj(α, parts)`: `⋁_ℓ ∃n parts(ℓ)(⟨z, n⟩)`, a `Σ⁰_α` formula.
/// - `Conj(α, parts)`: `⋀_ℓ ∀n parts(ℓ)(⟨z, n⟩)`, a `Π⁰_α` formula.
///
/// Machine form: `⟨0, ⟨decider, polarity⟩⟩`, `⟨1, ⟨ord_code α, parts⟩⟩`,
/// `⟨2, ⟨ord_code α, parts⟩⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormulaInf {
    Atom { decider: Nat, positive: bool },
    Disj { level: OrdNotation, parts: Parts },
    Conj { level: OrdNotation, parts: Parts },
}

impl FormulaInf {
    pub fn atom(decider: Nat) -> Self {
        FormulaInf::Atom { decider, positive: true }
    }

    pub fn disj(level: OrdNotation, parts: Vec<FormulaInf>) -> Self {
        FormulaInf::Disj { level, parts: Parts::List(parts) }
    }

    pub fn conj(level: OrdNotation, parts: Vec<FormulaInf>) -> Self {
        FormulaInf::Conj { level, parts: Parts::List(parts) }
    }

    pub fn level(&self) -> Option<&OrdNotation> {
        match self {
            FormulaInf::Atom { .. } => None,
            FormulaInf::Disj { level, .. } | FormulaInf::Conj { level, .. } => Some(level),
        }
    }

    pub fn code(&self) -> Nat {
        let node = |tag: u64, level: &OrdNotation, parts: &Parts| {
            Nat::pair(&Nat::from_u64(tag), &Nat::pair(&ord_code(level), &parts_code(parts)))
        };
        match self {
            FormulaInf::Atom { decider, positive } => {
                Nat::pair(&Nat::zero(), &Nat::pair(decider, &Nat::from_u64(*positive as u64)))
            }
            FormulaInf::Disj { level, parts } => node(1, level, parts),
            FormulaInf::Conj { level, parts } => node(2, level, parts),
        }
    }

    /// Level stratification, checked wherever the parts are a finite list:
    /// a node at level 1 has atom parts; a node at level `α > 1` has parts
    /// of the opposite kind at levels `β < α` of the opposite parity.
    pub fn validate(&self) -> Result<(), ReductionError> {
        let (level, parts, kind) = match self {
            FormulaInf::Atom { .. } => return Ok(()),
            FormulaInf::Disj { level, parts } => (level, parts, 1),
            FormulaInf::Conj { level, parts } => (level, parts, 2),
        };
        let bad = |m: String| Err(ReductionError::Stratification(m));
        if level.is_zero() {
            return bad("node at level 0".into());
        }
        let Parts::List(list) = parts else { return Ok(()) };
        if list.is_empty() {
            return bad(format!("empty part list at level {level}"));
        }
        for p in list {
            match (p, level.as_finite() == Some(1)) {
                (FormulaInf::Atom { .. }, true) => {}
                (FormulaInf::Atom { .. }, false) => return bad(format!("atom directly under level {level}")),
                (_, true) => return bad("level 1 node with a non-atom part".into()),
                (FormulaInf::Disj { level: b, .. }, false) | (FormulaInf::Conj { level: b, .. }, false) => {
                    let sub_kind = if matches!(p, FormulaInf::Disj { .. }) { 1 } else { 2 };
                    if sub_kind == kind {
                        return bad(format!("part of the same kind under level {level}"));
                    }
                    if b >= level {
                        return bad(format!("part level {b} not below {level}"));
                    }
                    if b.parity() == level.parity() {
                        return bad(format!("part level {b} has the parity of {level}"));
                    }
                    p.validate()?;
                }
            }
        }
        Ok(())
    }
}

fn parts_code(parts: &Parts) -> Nat {
    match parts {
        Parts::Code(c) => c.clone(),
        Parts::List(list) => {
            let codes: Vec<Nat> = list.iter().map(FormulaInf::code).collect();
            let Some(last) = codes.last() else { return bot_code() };
            let mut body = numn(last);
            for (i, c) in codes.iter().enumerate().rev().skip(1) {
                body = if_eq(input(), num(i as u64), numn(c), body);
            }
            code(&body)
        }
    }
}

/// Evaluates a machine-form formula at `z`: `ℓ < bound`, `n ≤ bound` for
/// disjunctions and `n < bound` for conjunctions.
pub fn eval_inf(phi: &FormulaInf, z: &Nat, bound: u64, fuel: u64, oracles: &OracleTable) -> Truth {
    eval_inf_code(&phi.code(), z, bound, fuel, oracles)
}

pub fn eval_inf_code(phi: &Nat, z: &Nat, bound: u64, fuel: u64, oracles: &OracleTable) -> Truth {
    let (tag, body) = phi.unpair();
    let (a, b) = body.unpair();
    match tag.as_u64() {
        Some(0) => {
            let t = Truth::from_decider(&eval(&a, z, fuel, oracles));
            match (b.as_u64(), t) {
                (Some(1), t) => t,
                (_, Truth::True) => Truth::False,
                (_, Truth::False) => Truth::True,
                (_, Truth::Unknown) => Truth::Unknown,
            }
        }
        Some(tag @ (1 | 2)) => {
            let sub = move |l: u64, n: u64| -> Truth {
                match eval(&b, &Nat::from_u64(l), fuel, oracles).value() {
                    Some(c) => eval_inf_code(c, &Nat::pair(z, &Nat::from_u64(n)), bound, fuel, oracles),
                    None => Truth::Unknown,
                }
            };
            if tag == 1 {
                exists_over((0..bound).flat_map(|l| (0..=bound).map(move |n| (l, n))).map(|(l, n)| sub(l, n)))
            } else {
                forall_over((0..bound).flat_map(|l| (0..bound).map(move |n| (l, n))).map(|(l, n)| sub(l, n)))
            }
        }
        _ => Truth::Unknown,
    }
}

/// Evaluates a finitary or infinitary formula within bounds.
pub enum AnyFormula<'a> {
    Fin(&'a FormulaFin),
    Inf(&'a FormulaInf),
}

pub fn eval_formula_bounded(phi: AnyFormula<'_>, z: &Nat, bound: u64, fuel: u64, oracles: &OracleTable) -> Truth {
    match phi {
        AnyFormula::Fin(f) => eval_fin(f, z, bound, fuel, oracles),
        AnyFormula::Inf(f) => eval_inf(f, z, bound, fuel, oracles),
    }
}

// ---------------------------------------------------------------------------
// The hardness helper

/// Self-passing program of [`hardness_helper`]. Input `⟨self, ⟨mode, p⟩⟩`:
///
/// - mode 0, `p = ⟨φ, z⟩` with `φ` a disjunction at level `α`: the index
///   `p_z`. Level 1 gives `s11(entry 3, p)`, odd levels `s11(entry 1, p)`,
///   even levels the `ω`-combiner over the sequence `s11(entry 1, p)`.
/// - mode 1, `p = ⟨⟨φ, z⟩, ⟨ℓ, n⟩⟩`: mode 0 on `¬ψ_ℓ` at `⟨z, n⟩`, where
///   `ψ_ℓ` is the `ℓ`-th part; requires its level below `α` and of the
///   other parity.
/// - mode 3, same `p`: `c_*` if the `ℓ`-th atom holds at `⟨z, n⟩`, else `e_*`.
/// - mode 4, `p = φ`: the negation of `φ`, computed lazily on parts.
/// - mode 5, `p = ⟨parts, ℓ⟩`: mode 4 on the `ℓ`-th part.
///
/// Malformed inputs diverge.
pub fn helper_program() -> Nat {
    static C: OnceLock<Nat> = OnceLock::new();
    C.get_or_init(|| {
        use ordinals::prim as op;
        let entry = |m: u64| q_run(q_num(me()), q_pair(q_num(me()), q_pair(q_num(num(m)), num(0))));
        let mode = fst(arg());
        let p = snd(arg());

        let mode0 = {
            let phi = fst(p.clone());
            let lvl = fst(snd(phi.clone()));
            let base = q_s11(entry(3), p.clone());
            let odd = q_s11(entry(1), p.clone());
            let even = combine_omega_q(q_s11(entry(1), p.clone()));
            let by_level = if_eq(
                lvl.clone(),
                numn(&ord_code(&OrdNotation::one())),
                base,
                if_eq(prim(op::PARITY, lvl), num(1), odd, even),
            );
            if_eq(fst(phi), num(1), by_level, bot())
        };

        let phi = fst(fst(p.clone()));
        let z = snd(fst(p.clone()));
        let ln = snd(p.clone());
        let parts = snd(snd(phi.clone()));
        let part = run(parts, fst(ln.clone()));
        let n = snd(ln);

        let mode1 = {
            let alpha = fst(snd(phi.clone()));
            let beta = fst(snd(part.clone()));
            let chi = recurse(pair(num(4), part.clone()));
            let call = recurse(pair(num(0), pair(chi, pair(z.clone(), n.clone()))));
            let parity_ok = if_eq(prim(op::PARITY, beta.clone()), prim(op::PARITY, alpha.clone()), bot(), call);
            if_eq(prim(op::LT, pair(beta, alpha)), num(1), parity_ok, bot())
        };

        let mode3 = {
            let d = fst(snd(part.clone()));
            let pol = snd(snd(part.clone()));
            let val = if_eq(run(d, pair(z, n)), pol, numn(&cstar()), numn(&estar()));
            if_eq(fst(part), num(0), val, bot())
        };

        let mode4 = {
            let kind = fst(p.clone());
            let body = snd(p.clone());
            let neg_atom = pair(num(0), pair(fst(body.clone()), if_eq(snd(body.clone()), num(1), num(0), num(1))));
            let flipped = pair(fst(body.clone()), q_s11(entry(5), snd(body)));
            if_eq(
                kind.clone(),
                num(0),
                neg_atom,
                if_eq(
                    kind.clone(),
                    num(1),
                    pair(num(2), flipped.clone()),
                    if_eq(kind, num(2), pair(num(1), flipped), bot()),
                ),
            )
        };

        let mode5 = recurse(pair(num(4), run(fst(p.clone()), snd(p))));

        let dispatch = [(1, mode1), (3, mode3), (4, mode4), (5, mode5)]
            .into_iter()
            .rev()
            .fold(bot(), |acc, (m, body)| if_eq(mode.clone(), num(m), body, acc));
        self_passing(if_eq(mode, num(0), mode0, dispatch))
    })
    .clone()
}

/// `code(Run(Num R, Pair(Num R, Pair(Num mode, Input))))` for the helper `R`.
pub fn helper_entry(mode: u64) -> Nat {
    let r = helper_program();
    code(&run(numn(&r), pair(numn(&r), pair(num(mode), input()))))
}

/// The hereditarily total index `p_z` for a `Σ⁰_α` disjunction `φ`:
/// for odd `α`, `p_z ≈ e_*` iff `φ(z)` fails, and `p_z ≁_{G(α)} e_*` when it
/// holds; for even `α`, `p_z ∼_{G(α)} e_*` iff `φ(z)` holds.
///
/// Evaluate the result with `kernel_oracles()`: parity and comparison of
/// levels are notation-kernel primitives.
pub fn hardness_helper(phi: &FormulaInf, z: &Nat) -> Result<Nat, ReductionError> {
    let FormulaInf::Disj { level, .. } = phi else {
        return Err(ReductionError::Stratification("the helper takes a disjunction".into()));
    };
    phi.validate()?;
    let p = Nat::pair(&phi.code(), z);
    Ok(if level.as_finite() == Some(1) {
        s11(&helper_entry(3), &p)
    } else if level.parity() == Parity::Odd {
        s11(&helper_entry(1), &p)
    } else {
        combine_omega(&s11(&helper_entry(1), &p))
    })
}

// ---------------------------------------------------------------------------
// Defining formulas for ∼_α

/// A formula `φ(u, v)` in two element variables, as emitted by
/// [`defining_formula_g`] and [`defining_formula`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelFormula {
    /// `∀x (u·x ≃ v·x)`: the `Π⁰₂` base, `≃` read over bounded-halting atoms.
    ForallKleeneEq,
    /// `∀x₀ ⋯ x_{d-1} body(u x⃗, v x⃗)` (`Π⁰_level`).
    Forall { level: OrdNotation, arity: u64, body: Box<RelFormula> },
    /// `⋁_n ∀x₀ ⋯ x_{n-1} body(u x⃗, v x⃗)` (`Σ⁰_level`).
    DisjTuples { level: OrdNotation, body: Box<RelFormula> },
    /// `⋁_n defining_formula_g(β_n)(u, v)` with `β_n` the odd adjustment of
    /// `alpha[n]` (`Σ⁰_level`). Parts are expanded on demand.
    DisjLimit { level: OrdNotation, alpha: OrdNotation },
}

impl RelFormula {
    /// The `Σ`/`Π` level annotation.
    pub fn level(&self) -> OrdNotation {
        match self {
            RelFormula::ForallKleeneEq => OrdNotation::from_u64(2),
            RelFormula::Forall { level, .. } | RelFormula::DisjTuples { level, .. } | RelFormula::DisjLimit { level, .. } => {
                level.clone()
            }
        }
    }

    pub fn is_sigma(&self) -> bool {
        matches!(self, RelFormula::DisjTuples { .. } | RelFormula::DisjLimit { .. })
    }

    /// Structural code: `⟨0, 0⟩`, `⟨1, ⟨lvl, ⟨d, body⟩⟩⟩`, `⟨2, ⟨lvl, body⟩⟩`,
    /// `⟨3, ⟨lvl, ord_code α⟩⟩`.
    pub fn code(&self) -> Nat {
        let t = |k: u64, rest: Nat| Nat::pair(&Nat::from_u64(k), &rest);
        match self {
            RelFormula::ForallKleeneEq => t(0, Nat::zero()),
            RelFormula::Forall { level, arity, body } => {
                t(1, Nat::pair(&ord_code(level), &Nat::pair(&Nat::from_u64(*arity), &body.code())))
            }
            RelFormula::DisjTuples { level, body } => t(2, Nat::pair(&ord_code(level), &body.code())),
            RelFormula::DisjLimit { level, alpha } => t(3, Nat::pair(&ord_code(level), &ord_code(alpha))),
        }
    }
}

fn make_odd(b: OrdNotation) -> OrdNotation {
    if b.parity() == Parity::Even {
        b.succ()
    } else {
        b
    }
}

/// The formula defining `∼_{G(α)}`: `Σ⁰_{1+α}` for even `α`, `Π⁰_{1+α}`
/// for odd `α`.
pub fn defining_formula_g(alpha: &OrdNotation) -> Result<RelFormula, ReductionError> {
    if alpha.is_zero() {
        return Err(ReductionError::Level { min: 1, got: 0 });
    }
    let level = alpha.one_plus();
    Ok(match alpha.kind() {
        Kind::Succ(beta) if beta.is_zero() => RelFormula::ForallKleeneEq,
        Kind::Succ(beta) => {
            let body = Box::new(defining_formula_g(&beta)?);
            if beta.parity() == Parity::Even {
                RelFormula::Forall { level, arity: 1, body }
            } else {
                RelFormula::DisjTuples { level, body }
            }
        }
        Kind::Limit => RelFormula::DisjLimit { level, alpha: alpha.clone() },
        Kind::Zero => unreachable!(),
    })
}

/// The formula defining `∼_α`: `Π⁰_{1+F(α)}` at successors,
/// `Σ⁰_{1+F(α)}` at limits.
pub fn defining_formula(alpha: &OrdNotation) -> Result<RelFormula, ReductionError> {
    if alpha.is_zero() {
        return Err(ReductionError::Level { min: 1, got: 0 });
    }
    let beta = alpha.f();
    let base = defining_formula_g(&beta)?;
    match alpha.kind() {
        Kind::Limit => Ok(base),
        _ => {
            // α = γ + 1 + d with γ zero or a limit.
            let (_, k) = alpha.split_finite();
            let d = k - 1;
            if d == 0 {
                Ok(base)
            } else {
                Ok(RelFormula::Forall { level: beta.one_plus(), arity: d, body: Box::new(base) })
            }
        }
    }
}

fn app_all(t: &Term, xs: &[u64]) -> Term {
    Term::apply_all(t.clone(), xs.iter().map(|&x| Term::Elem(Nat::from_u64(x))))
}

fn tuples(arity: u64, bound: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..bound).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Evaluates `φ(s, t)` within bounds: argument entries `< bound`, disjunct
/// indices `< bound`. `u ≃ v` is three-valued: equal values are true,
/// unequal values false, and any side out of fuel unknown.
pub fn eval_rel(phi: &RelFormula, s: &Term, t: &Term, bound: u64, fuel: u64, oracles: &OracleTable) -> Truth {
    match phi {
        RelFormula::ForallKleeneEq => forall_over((0..bound).map(|x| {
            match kleene_eq_bounded(&app_all(s, &[x]), &app_all(t, &[x]), fuel, oracles) {
                Ok(TriVerdict::EqualDefined(_)) => Truth::True,
                Ok(TriVerdict::DistinctDefined(..)) => Truth::False,
                _ => Truth::Unknown,
            }
        })),
        RelFormula::Forall { arity, body, .. } => forall_over(
            tuples(*arity, bound)
                .into_iter()
                .map(|xs| eval_rel(body, &app_all(s, &xs), &app_all(t, &xs), bound, fuel, oracles)),
        ),
        RelFormula::DisjTuples { level, body } => exists_over((0..bound).map(|n| {
            let inner = RelFormula::Forall { level: level.clone(), arity: n, body: body.clone() };
            eval_rel(&inner, s, t, bound, fuel, oracles)
        })),
        RelFormula::DisjLimit { alpha, .. } => exists_over((0..bound).map(|n| {
            let b = make_odd(alpha.fund_seq(n).expect("limit"));
            match defining_formula_g(&b) {
                Ok(f) => eval_rel(&f, s, t, bound, fuel, oracles),
                Err(_) => Truth::Unknown,
            }
        })),
    }
}

/// Decodes a machine-form formula node tag, for diagnostics.
pub fn formula_kind(code: &Nat) -> Option<&'static str> {
    match code.unpair().0.as_u64()? {
        0 => Some("atom"),
        1 => Some("disj"),
        2 => Some("conj"),
        _ => None,
    }
}

/// Reads the level annotation of a machine-form node.
pub fn formula_level(code: &Nat) -> Option<OrdNotation> {
    let (tag, body) = code.unpair();
    match tag.as_u64()? {
        1 | 2 => ord_decode(&body.unpair().0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{check_cert, kernel_oracles, refute_sim, RefuteBudget};
    use crate::machine::kit::tuple_decode;
    use crate::pca::apply_chain;

    fn n(v: u64) -> Nat {
        Nat::from_u64(v)
    }

    fn ev(f: &Nat, args: &[Nat], fuel: u64) -> Outcome {
        apply_chain(f, args, fuel, kernel_oracles())
    }

    fn const_decider(v: u64) -> Nat {
        code(&num(v))
    }

    #[test]
    fn finitary_examples() {
        let o = kernel_oracles();
        // m > z ∧ m < z
        let never = code(&num(0));
        let phi = FormulaFin::new(vec![Quant::Exists], never);
        assert_eq!(eval_fin(&phi, &n(3), 20, 1000, o), Truth::Unknown);
        // ∀n ∃m (m = n + 1) on ⟨z, ⟨n, m⟩⟩
        let nm = snd(input());
        let succ_m = code(&if_eq(snd(nm.clone()), succ(fst(nm)), num(1), num(0)));
        let phi = FormulaFin::new(vec![Quant::Forall, Quant::Exists], succ_m);
        assert_eq!(eval_fin(&phi, &n(0), 10, 1000, o), Truth::True);
        let parsed: FormulaFin = "A n E m . matrix=#17".parse().unwrap();
        assert_eq!(parsed.prefix, vec![Quant::Forall, Quant::Exists]);
        assert_eq!(parsed.matrix, n(17));
        assert!(matches!("A n E . matrix=#1".parse::<FormulaFin>(), Err(ReductionError::Parse { .. })));
    }

    #[test]
    fn monotonized_matrix_is_monotone() {
        let o = kernel_oracles();
        // θ(z, n, u, m) = [m = n + u]
        let x = input();
        let theta = code(&if_eq(
            proj(x.clone(), 4, 3),
            prim(builtin::ADD, pair(proj(x.clone(), 4, 1), proj(x, 4, 2))),
            num(1),
            num(0),
        ));
        let tm = monotonize(&theta);
        assert_eq!(check_monotone(&tm, 4, 100_000, o), Ok(()));
        // θ'(0, 2, 1, 3): p = 0 or 1 < 2, u ≤ 1, m ≤ 3 covers m = p + u.
        let v = eval(&tm, &tuple_code(&[n(0), n(2), n(1), n(3)]), 100_000, o);
        assert_eq!(v.value(), Some(&n(1)));
        let v = eval(&tm, &tuple_code(&[n(0), n(0), n(1), n(3)]), 100_000, o);
        assert_eq!(v.value(), Some(&n(0)));
    }

    #[test]
    fn pi2_examples() {
        let o = kernel_oracles();
        // ψ(z, n, m) = [m ≥ n]
        let x = input();
        let ge = code(&if_eq(lt(proj(x.clone(), 3, 2), proj(x, 3, 1)), num(1), num(0), num(1)));
        let (f, g) = hard_pi2(&ge, &n(0), 2).unwrap();
        for k in 0..=20 {
            assert_eq!(ev(&f, &[n(k)], 10_000).value(), ev(&g, &[n(k)], 10_000).value());
        }
        let (f, g) = hard_pi2(&const_decider(0), &n(0), 2).unwrap();
        let budget = RefuteBudget::new(1, vec![n(0)], 5_000);
        let cert = refute_sim(&Term::Elem(f.clone()), &Term::Elem(g.clone()), &n(2).into_ord(), &budget, o).unwrap();
        assert!(check_cert(&Term::Elem(f.clone()), &Term::Elem(g.clone()), &n(2).into_ord(), &cert, 5_000, o).is_valid());
        assert!(refute_sim(&Term::Elem(f), &Term::Elem(g), &n(3).into_ord(), &budget, o).is_none());
    }

    trait IntoOrd {
        fn into_ord(self) -> OrdNotation;
    }
    impl IntoOrd for Nat {
        fn into_ord(self) -> OrdNotation {
            OrdNotation::from_u64(self.as_u64().unwrap())
        }
    }

    #[test]
    fn sigma3_branches_match_pi2() {
        let o = kernel_oracles();
        let phi = FormulaFin::new(vec![Quant::Exists, Quant::Forall, Quant::Exists], const_decider(0));
        let (f, g) = hard_sigma3(&phi, &n(7)).unwrap();
        for k in 0..3 {
            let (a, b) = sigma3_branch(&phi, &n(7), k).unwrap();
            assert_eq!(ev(&f, &[n(k)], 50_000).value(), Some(&a));
            assert_eq!(ev(&g, &[n(k)], 50_000).value(), Some(&b));
        }
        let omega = OrdNotation::omega();
        for j in 0..3 {
            let b = RefuteBudget::new(1, (0..4).map(n).collect(), 4_000).forced(j);
            let c = refute_sim(&Term::Elem(f.clone()), &Term::Elem(g.clone()), &omega, &b, o);
            assert!(c.is_some(), "family member {j}");
        }
    }

    #[test]
    fn spine_examples() {
        let o = kernel_oracles();
        let e = code(&num(9));
        let f = spine_index(&e);
        assert_eq!(ev(&f, &[Nat::pair(&n(0), &n(0))], 10_000).value(), Some(&n(9)));
        assert_eq!(ev(&f, &[Nat::pair(&n(1), &n(0)), n(1)], 10_000), Outcome::OutOfFuel);
        // a_{n,m} = ⟨n, m⟩ itself
        let f = spine_index(&code(&input()));
        let nm = Nat::pair(&n(2), &n(5));
        assert_eq!(ev(&f, &[nm.clone(), n(0), n(0)], 10_000).value(), Some(&nm));
        let _ = o;
    }

    #[test]
    fn omega_k_producers_agree_with_host() {
        let o = kernel_oracles();
        let phi = FormulaFin::new("EAEAE".chars().map(|c| if c == 'E' { Quant::Exists } else { Quant::Forall }).collect(), const_decider(1));
        let fam = omega_family(&phi.matrix, 2);
        let z = n(4);
        let (hf, hg) = fam.host(&z);
        assert_eq!(eval(&fam.prod_f, &z, 100_000, o).value(), Some(&hf));
        assert_eq!(eval(&fam.prod_g, &z, 100_000, o).value(), Some(&hg));
        let (f, _) = hard_omega_k(&phi, &z, 2).unwrap();
        // f·σ_{1,3} is the inner Σ⁰₃ pair at ⟨z, ⟨1, 3⟩⟩.
        let inner = sigma3_family(&flatten_head(&phi.matrix, 3));
        let want = inner.host(&tuple_code(&[z.clone(), n(1), n(3)])).0;
        assert_eq!(ev(&f, &[Nat::pair(&n(1), &n(3)), n(0)], 100_000).value(), Some(&want));
    }

    #[test]
    fn combine2_examples() {
        let o = kernel_oracles();
        let (e, c) = (estar(), cstar());
        assert_eq!(combine2(&e, &c), e);
        let w = combine2(&c, &c);
        assert_ne!(w, e);
        // a = identity-ish code: a·u = u
        let a = code(&input());
        let b = c.clone();
        let f = combine2(&a, &b);
        for (u, v) in [(3, 4), (0, 0), (7, 1)] {
            let got = ev(&f, &[Nat::pair(&n(u), &n(v))], 50_000);
            assert_eq!(got.value(), Some(&combine2(&n(u), &c)));
        }
        let _ = o;
    }

    #[test]
    fn combine_omega_examples() {
        let (e, c) = (estar(), cstar());
        let all_e = combine_omega(&code(&numn(&e)));
        for u in 0..5 {
            assert_eq!(ev(&all_e, &[n(u)], 50_000).value(), Some(&e));
        }
        let seq = code(&numn(&c));
        let w = combine_omega(&seq);
        assert_ne!(w, e);
        let v0 = n(5);
        let v1 = n(8);
        let got = ev(&w, &[v0, v1], 100_000);
        assert_eq!(got.value(), Some(&combine_omega_node(&seq, &[c.clone(), c.clone()])));
        // three steps: v₂ decodes as a 2-tuple
        let v2 = tuple_code(&[n(1), n(2)]);
        assert_eq!(tuple_decode(&v2, 2), vec![n(1), n(2)]);
        let got = ev(&w, &[n(0), n(0), v2], 100_000);
        assert_eq!(got.value(), Some(&combine_omega_node(&seq, &[c.clone(), c.clone(), c])));
    }

    fn lt5() -> Nat {
        // [z < 5] on ⟨z, n⟩, for z at the bottom of the nesting.
        code(&lt(fst(input()), num(5)))
    }

    fn helper_formula(level: u64) -> FormulaInf {
        let one = OrdNotation::one;
        match level {
            1 => {
                // ∃n [n = 3 ∧ z < 5]
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
                    vec![FormulaInf::conj(
                        OrdNotation::from_u64(2),
                        vec![FormulaInf::disj(one(), vec![FormulaInf::atom(d)])],
                    )],
                )
            }
        }
    }

    #[test]
    fn helper_level1() {
        let o = kernel_oracles();
        let phi = helper_formula(1);
        let p = hardness_helper(&phi, &n(2)).unwrap();
        assert_eq!(ev(&p, &[Nat::pair(&n(0), &n(3))], 50_000).value(), Some(&cstar()));
        assert_eq!(ev(&p, &[Nat::pair(&n(0), &n(2))], 50_000).value(), Some(&estar()));
        let p = hardness_helper(&phi, &n(7)).unwrap();
        assert_eq!(ev(&p, &[Nat::pair(&n(0), &n(3))], 50_000).value(), Some(&estar()));
        let _ = lt5();
        let _ = o;
    }

    #[test]
    fn helper_runtime_matches_host() {
        let o = kernel_oracles();
        for lvl in 1..=3 {
            let phi = helper_formula(lvl);
            let z = n(3);
            let host = hardness_helper(&phi, &z).unwrap();
            let r = helper_program();
            let rt = eval(&s11(&r, &r), &Nat::pair(&n(0), &Nat::pair(&phi.code(), &z)), 100_000, o);
            assert_eq!(rt.value(), Some(&host), "level {lvl}");
        }
    }

    #[test]
    fn helper_level2_family() {
        let o = kernel_oracles();
        let phi = helper_formula(2);
        let omega = OrdNotation::omega();
        let e = Term::Elem(estar());
        for (z, truth) in [(2u64, true), (7, false)] {
            let p = Term::Elem(hardness_helper(&phi, &n(z)).unwrap());
            let found: Vec<bool> = (0..3)
                .map(|j| {
                    let b = RefuteBudget::new(1, vec![n(0), n(1)], 200_000).forced(j);
                    refute_sim(&p, &e, &omega, &b, o).is_some()
                })
                .collect();
            assert_eq!(found.iter().all(|&x| x), !truth, "z = {z}: {found:?}");
        }
    }

    #[test]
    fn stratification_errors() {
        let one = OrdNotation::one();
        let bad = FormulaInf::disj(OrdNotation::from_u64(2), vec![FormulaInf::conj(OrdNotation::from_u64(2), vec![])]);
        assert!(matches!(bad.validate(), Err(ReductionError::Stratification(_))));
        let bad = FormulaInf::disj(OrdNotation::from_u64(3), vec![FormulaInf::conj(one, vec![FormulaInf::atom(n(0))])]);
        assert!(hardness_helper(&bad, &n(0)).is_err());
    }

    #[test]
    fn defining_formula_levels() {
        for a in ["1", "2", "3", "w", "w+1", "w*2", "w^2"] {
            let a: OrdNotation = a.parse().unwrap();
            assert_eq!(defining_formula_g(&a).unwrap().level(), a.one_plus());
            assert_eq!(defining_formula(&a).unwrap().level(), a.f().one_plus());
        }
    }

    #[test]
    fn defining_formula_base() {
        let o = kernel_oracles();
        let phi = defining_formula(&OrdNotation::one()).unwrap();
        let one = Term::Elem(n(1));
        let padded = Term::Elem(crate::machine::pad(&n(1), &n(1)));
        assert_eq!(eval_rel(&phi, &one, &padded, 8, 1_000, o), Truth::True);
        assert_eq!(eval_rel(&phi, &Term::Elem(n(1)), &Term::Elem(n(2)), 8, 1_000, o), Truth::False);
    }

    #[test]
    fn collapse_and_lift() {
        let o = kernel_oracles();
        let k = Term::Elem(crate::pca::k_code());
        let (f, _) = collapse_pair(&k, &k).unwrap();
        for (a, b) in [(3, 4), (0, 9)] {
            assert_eq!(ev(&f, &[Nat::pair(&n(a), &n(b))], 10_000).value(), Some(&n(a)));
        }
        let (s, t) = crate::hierarchy::nonext_pair();
        let (ls, lt_) = lift_pair(&Term::Elem(s), &Term::Elem(t)).unwrap();
        let b = RefuteBudget::new(1, vec![n(0)], 1_000);
        let c = refute_sim(&Term::Elem(ls.clone()), &Term::Elem(lt_.clone()), &OrdNotation::one(), &b, o).unwrap();
        assert!(check_cert(&Term::Elem(ls), &Term::Elem(lt_), &OrdNotation::one(), &c, 1_000, o).is_valid());
    }
}
