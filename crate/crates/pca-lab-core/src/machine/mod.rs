// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! The fuel-bounded programming system behind `Φ_e` and `Φ^X_e`.
//!
//! Programs are ASTs Gödel-coded as `pair(tag, payload)`; see
//! `docs/encoding.md` for the frozen tag table and cost table. Every natural
//! is a code: naturals that decode to no AST denote the everywhere-undefined
//! function.

pub mod kit;
pub mod prog;

pub use prog::{fix, fix_padded, pad, s11};

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::nat::Nat;

/// Program syntax. Children are shared so decoded programs clone cheaply.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Ast {
    Input,
    Num(Nat),
    Pair(Arc<Ast>, Arc<Ast>),
    Fst(Arc<Ast>),
    Snd(Arc<Ast>),
    IfEq(Arc<Ast>, Arc<Ast>, Arc<Ast>, Arc<Ast>),
    Run(Arc<Ast>, Arc<Ast>),
    Prim(Nat, Arc<Ast>),
    Pad(Nat, Arc<Ast>),
    Bot,
    Len(Arc<Ast>),
    At(Arc<Ast>, Arc<Ast>),
    AppendElem(Arc<Ast>, Arc<Ast>),
}

pub const TAG_INPUT: u64 = 0;
pub const TAG_NUM: u64 = 1;
pub const TAG_PAIR: u64 = 2;
pub const TAG_FST: u64 = 3;
pub const TAG_SND: u64 = 4;
pub const TAG_IFEQ: u64 = 5;
pub const TAG_RUN: u64 = 6;
pub const TAG_PRIM: u64 = 7;
pub const TAG_PAD: u64 = 8;
pub const TAG_BOT: u64 = 9;
pub const TAG_LEN: u64 = 10;
pub const TAG_AT: u64 = 11;
pub const TAG_APPEND: u64 = 12;
/// Tags at or above this value are invalid.
pub const TAG_LIMIT: u64 = 13;

fn p(x: &Nat, y: &Nat) -> Nat {
    Nat::pair(x, y)
}

fn tagged(tag: u64, payload: &Nat) -> Nat {
    p(&Nat::from_u64(tag), payload)
}

/// Gödel number of an AST. Injective.
pub fn encode_ast(a: &Ast) -> Nat {
    match a {
        Ast::Input => tagged(TAG_INPUT, &Nat::zero()),
        Ast::Num(k) => tagged(TAG_NUM, k),
        Ast::Pair(a, b) => tagged(TAG_PAIR, &p(&encode_ast(a), &encode_ast(b))),
        Ast::Fst(a) => tagged(TAG_FST, &encode_ast(a)),
        Ast::Snd(a) => tagged(TAG_SND, &encode_ast(a)),
        Ast::IfEq(a, b, t, e) => tagged(
            TAG_IFEQ,
            &p(&p(&encode_ast(a), &encode_ast(b)), &p(&encode_ast(t), &encode_ast(e))),
        ),
        Ast::Run(c, x) => tagged(TAG_RUN, &p(&encode_ast(c), &encode_ast(x))),
        Ast::Prim(k, a) => tagged(TAG_PRIM, &p(k, &encode_ast(a))),
        Ast::Pad(i, a) => tagged(TAG_PAD, &p(i, &encode_ast(a))),
        Ast::Bot => tagged(TAG_BOT, &Nat::zero()),
        Ast::Len(a) => tagged(TAG_LEN, &encode_ast(a)),
        Ast::At(a, i) => tagged(TAG_AT, &p(&encode_ast(a), &encode_ast(i))),
        Ast::AppendElem(a, x) => tagged(TAG_APPEND, &p(&encode_ast(a), &encode_ast(x))),
    }
}

/// Decodes a code. `None` is the invalid marker. The payload of the nullary
/// tags `Input` and `Bot` is ignored, so those nodes have many codes.
pub fn decode_ast(c: &Nat) -> Option<Arc<Ast>> {
    let (tag, payload) = c.unpair();
    let tag = tag.as_u64()?;
    let d = |n: &Nat| decode_ast(n);
    let ast = match tag {
        TAG_INPUT => Ast::Input,
        TAG_NUM => Ast::Num(payload),
        TAG_PAIR => {
            let (a, b) = payload.unpair();
            Ast::Pair(d(&a)?, d(&b)?)
        }
        TAG_FST => Ast::Fst(d(&payload)?),
        TAG_SND => Ast::Snd(d(&payload)?),
        TAG_IFEQ => {
            let (ab, te) = payload.unpair();
            let (a, b) = ab.unpair();
            let (t, e) = te.unpair();
            Ast::IfEq(d(&a)?, d(&b)?, d(&t)?, d(&e)?)
        }
        TAG_RUN => {
            let (c, x) = payload.unpair();
            Ast::Run(d(&c)?, d(&x)?)
        }
        TAG_PRIM => {
            let (k, a) = payload.unpair();
            Ast::Prim(k, d(&a)?)
        }
        TAG_PAD => {
            let (i, a) = payload.unpair();
            Ast::Pad(i, d(&a)?)
        }
        TAG_BOT => Ast::Bot,
        TAG_LEN => Ast::Len(d(&payload)?),
        TAG_AT => {
            let (a, i) = payload.unpair();
            Ast::At(d(&a)?, d(&i)?)
        }
        TAG_APPEND => {
            let (a, x) = payload.unpair();
            Ast::AppendElem(d(&a)?, d(&x)?)
        }
        _ => return None,
    };
    Some(Arc::new(ast))
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Input => write!(f, "in"),
            Ast::Num(k) => write!(f, "{k}"),
            Ast::Pair(a, b) => write!(f, "<{a}, {b}>"),
            Ast::Fst(a) => write!(f, "fst({a})"),
            Ast::Snd(a) => write!(f, "snd({a})"),
            Ast::IfEq(a, b, t, e) => write!(f, "if {a} == {b} then {t} else {e}"),
            Ast::Run(c, x) => write!(f, "run({c}, {x})"),
            Ast::Prim(k, a) => write!(f, "prim{k}({a})"),
            Ast::Pad(i, a) => write!(f, "pad{i}({a})"),
            Ast::Bot => write!(f, "bot"),
            Ast::Len(a) => write!(f, "len({a})"),
            Ast::At(a, i) => write!(f, "at({a}, {i})"),
            Ast::AppendElem(a, x) => write!(f, "append({a}, {x})"),
        }
    }
}

/// Result of a bounded evaluation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Defined { value: Nat, steps: u64 },
    OutOfFuel,
}

impl Outcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            Outcome::Defined { value, .. } => Some(value),
            Outcome::OutOfFuel => None,
        }
    }

    pub fn steps(&self) -> Option<u64> {
        match self {
            Outcome::Defined { steps, .. } => Some(*steps),
            Outcome::OutOfFuel => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Outcome::Defined { .. })
    }
}

/// A total host function exposed to programs. `None` marks an argument
/// outside the function's domain; the machine treats it as divergence.
pub type OracleFn = Arc<dyn Fn(&Nat) -> Option<Nat> + Send + Sync>;

/// Oracle primitives keyed by stable id. Ids below [`FIRST_ORACLE_ID`]
/// belong to the kernel built-ins and cannot be overridden.
#[derive(Clone, Default)]
pub struct OracleTable {
    entries: BTreeMap<u64, (String, OracleFn)>,
}

pub const FIRST_ORACLE_ID: u64 = 32;

impl OracleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, id: u64, name: &str, f: OracleFn) -> Self {
        self.insert(id, name, f);
        self
    }

    pub fn insert(&mut self, id: u64, name: &str, f: OracleFn) {
        assert!(id >= FIRST_ORACLE_ID, "oracle ids below {FIRST_ORACLE_ID} are reserved");
        self.entries.insert(id, (name.to_string(), f));
    }

    /// Adds every entry of `other`; entries of `self` win on id clashes.
    pub fn merged(mut self, other: &OracleTable) -> Self {
        for (id, (name, f)) in &other.entries {
            self.entries.entry(*id).or_insert_with(|| (name.clone(), f.clone()));
        }
        self
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn name(&self, id: u64) -> Option<&str> {
        self.entries.get(&id).map(|(n, _)| n.as_str())
    }

    pub fn contains(&self, id: u64) -> bool {
        self.entries.contains_key(&id)
    }

    pub fn call(&self, id: u64, x: &Nat) -> Option<Nat> {
        self.entries.get(&id).and_then(|(_, f)| f(x))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Debug for OracleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter().map(|(k, (n, _))| (k, n))).finish()
    }
}

/// Kernel built-in primitive ids.
pub mod builtin {
    pub const SUCC: u64 = 0;
    pub const PRED: u64 = 1;
    /// `⟨x, y⟩ ↦ x + y`
    pub const ADD: u64 = 2;
    /// `⟨x, y⟩ ↦ x ∸ y`
    pub const MONUS: u64 = 3;
    /// `⟨x, y⟩ ↦ 1` if `x < y`, else `0`
    pub const LT: u64 = 4;
    pub const MUL: u64 = 5;
    /// `⟨σ, n⟩ ↦` the first `n` elements of `σ`
    pub const STR_TAKE: u64 = 6;
    /// `⟨v, ⟨n, i⟩⟩ ↦` component `i` of `v` read as an `n`-tuple
    pub const TUPLE_GET: u64 = 7;
    /// `⟨x, y⟩ ↦ pair2(x, y)` as a number (identity on the coded pair)
    pub const ID: u64 = 8;
    pub const COUNT: u64 = 9;
}

/// Operands wider than this many bits make arithmetic built-ins diverge.
pub const ARITH_BITS_CAP: u64 = 1 << 16;

fn call_builtin(id: u64, x: &Nat) -> Option<Nat> {
    use builtin::*;
    let binary = |f: &dyn Fn(&Nat, &Nat) -> Nat| -> Option<Nat> {
        let (a, b) = x.unpair();
        if a.bits_upper() > ARITH_BITS_CAP || b.bits_upper() > ARITH_BITS_CAP {
            return None;
        }
        Some(f(&a, &b))
    };
    match id {
        SUCC => Some(x.succ()),
        PRED => Some(x.pred()),
        ADD => binary(&|a, b| a.add(b)),
        MONUS => binary(&|a, b| a.monus(b)),
        LT => binary(&|a, b| Nat::from_u64((a.cmp_exact(b) == std::cmp::Ordering::Less) as u64)),
        MUL => binary(&|a, b| a.mul(b)),
        STR_TAKE => {
            let (s, n) = x.unpair();
            let n = usize::try_from(n.as_u64()?).ok()?;
            Some(kit::str_take(&s, n))
        }
        TUPLE_GET => {
            let (v, ni) = x.unpair();
            let (n, i) = ni.unpair();
            let n = usize::try_from(n.as_u64()?).ok()?;
            let i = usize::try_from(i.as_u64()?).ok()?;
            if n == 0 || i >= n || n > 1 << 16 {
                return None;
            }
            Some(kit::tuple_decode(&v, n).swap_remove(i))
        }
        ID => Some(x.clone()),
        _ => None,
    }
}

const DECODE_CACHE_CAP: usize = 1 << 15;

thread_local! {
    static DECODE_CACHE: RefCell<HashMap<Nat, Option<Arc<Ast>>>> = RefCell::new(HashMap::new());
}

/// `decode_ast` behind a per-thread memo table. Pure: the cache only ever
/// stores what `decode_ast` returns.
pub fn decode_cached(c: &Nat) -> Option<Arc<Ast>> {
    if let Some(hit) = DECODE_CACHE.with(|m| m.borrow().get(c).cloned()) {
        return hit;
    }
    let res = decode_ast(c);
    DECODE_CACHE.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() >= DECODE_CACHE_CAP {
            m.clear();
        }
        m.insert(c.clone(), res.clone());
    });
    res
}

enum Instr {
    Eval(Arc<Ast>, Nat),
    MakePair,
    Fst,
    Snd,
    Branch(Arc<Ast>, Arc<Ast>, Nat),
    Run,
    Prim(Nat),
    Len,
    At,
    Append,
}

/// Evaluates program `e` on input `x` with at most `fuel` steps.
///
/// Cost table: entering any AST node costs 1; a primitive call costs 1 more;
/// `Len` and `At` additionally cost 1 per string element walked. Decoding a
/// code for `Run` is free. Invalid codes and `Bot` never produce a value.
pub fn eval(e: &Nat, x: &Nat, fuel: u64, oracles: &OracleTable) -> Outcome {
    match decode_cached(e) {
        Some(ast) => eval_ast(&ast, x, fuel, oracles),
        None => Outcome::OutOfFuel,
    }
}

/// Evaluates an already decoded program.
pub fn eval_ast(prog: &Arc<Ast>, x: &Nat, fuel: u64, oracles: &OracleTable) -> Outcome {
    let mut left = fuel;
    let mut work: Vec<Instr> = vec![Instr::Eval(prog.clone(), x.clone())];
    let mut vals: Vec<Nat> = Vec::new();

    macro_rules! charge {
        ($n:expr) => {{
            let n: u64 = $n;
            if left < n {
                return Outcome::OutOfFuel;
            }
            left -= n;
        }};
    }

    while let Some(instr) = work.pop() {
        match instr {
            Instr::Eval(node, input) => {
                charge!(1);
                match &*node {
                    Ast::Input => vals.push(input),
                    Ast::Num(k) => vals.push(k.clone()),
                    Ast::Pair(a, b) => {
                        work.push(Instr::MakePair);
                        work.push(Instr::Eval(b.clone(), input.clone()));
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::Fst(a) => {
                        work.push(Instr::Fst);
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::Snd(a) => {
                        work.push(Instr::Snd);
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::IfEq(a, b, t, e) => {
                        work.push(Instr::Branch(t.clone(), e.clone(), input.clone()));
                        work.push(Instr::Eval(b.clone(), input.clone()));
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::Run(c, a) => {
                        work.push(Instr::Run);
                        work.push(Instr::Eval(a.clone(), input.clone()));
                        work.push(Instr::Eval(c.clone(), input));
                    }
                    Ast::Prim(k, a) => {
                        work.push(Instr::Prim(k.clone()));
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::Pad(_, a) => work.push(Instr::Eval(a.clone(), input)),
                    Ast::Bot => return Outcome::OutOfFuel,
                    Ast::Len(a) => {
                        work.push(Instr::Len);
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::At(a, i) => {
                        work.push(Instr::At);
                        work.push(Instr::Eval(i.clone(), input.clone()));
                        work.push(Instr::Eval(a.clone(), input));
                    }
                    Ast::AppendElem(a, y) => {
                        work.push(Instr::Append);
                        work.push(Instr::Eval(y.clone(), input.clone()));
                        work.push(Instr::Eval(a.clone(), input));
                    }
                }
            }
            Instr::MakePair => {
                let b = vals.pop().expect("operand");
                let a = vals.pop().expect("operand");
                vals.push(Nat::pair(&a, &b));
            }
            Instr::Fst => {
                let v = vals.pop().expect("operand");
                vals.push(v.unpair().0);
            }
            Instr::Snd => {
                let v = vals.pop().expect("operand");
                vals.push(v.unpair().1);
            }
            Instr::Branch(t, e, input) => {
                let b = vals.pop().expect("operand");
                let a = vals.pop().expect("operand");
                work.push(Instr::Eval(if a == b { t } else { e }, input));
            }
            Instr::Run => {
                let arg = vals.pop().expect("operand");
                let code = vals.pop().expect("operand");
                match decode_cached(&code) {
                    Some(inner) => work.push(Instr::Eval(inner, arg)),
                    None => return Outcome::OutOfFuel,
                }
            }
            Instr::Prim(k) => {
                charge!(1);
                let arg = vals.pop().expect("operand");
                let res = match k.as_u64() {
                    Some(id) if id < FIRST_ORACLE_ID => call_builtin(id, &arg),
                    Some(id) => oracles.call(id, &arg),
                    None => None,
                };
                match res {
                    Some(v) => vals.push(v),
                    None => return Outcome::OutOfFuel,
                }
            }
            Instr::Len => {
                let s = vals.pop().expect("operand");
                let mut n = 0u64;
                let mut cur = s;
                while !cur.is_zero() {
                    charge!(1);
                    cur = cur.pred().unpair().0;
                    n += 1;
                }
                vals.push(Nat::from_u64(n));
            }
            Instr::At => {
                let i = vals.pop().expect("operand");
                let s = vals.pop().expect("operand");
                let mut elems = Vec::new();
                let mut cur = s;
                while !cur.is_zero() {
                    charge!(1);
                    let (rest, last) = cur.pred().unpair();
                    elems.push(last);
                    cur = rest;
                }
                elems.reverse();
                let hit = i.as_u64().and_then(|i| usize::try_from(i).ok()).and_then(|i| elems.get(i).cloned());
                match hit {
                    Some(v) => vals.push(v),
                    None => return Outcome::OutOfFuel,
                }
            }
            Instr::Append => {
                let y = vals.pop().expect("operand");
                let s = vals.pop().expect("operand");
                vals.push(kit::str_append(&s, &y));
            }
        }
    }
    let value = vals.pop().expect("result");
    debug_assert!(vals.is_empty());
    Outcome::Defined { value, steps: fuel - left }
}

/// `eval` with an empty oracle table.
pub fn run(e: &Nat, x: &Nat, fuel: u64) -> Outcome {
    eval(e, x, fuel, &OracleTable::default())
}

#[cfg(test)]
mod tests {
    use super::prog::*;
    use super::{builtin, decode_ast, encode_ast, eval, Nat, OracleTable, Outcome};
    use std::sync::Arc;

    fn n(v: u64) -> Nat {
        Nat::from_u64(v)
    }

    #[test]
    fn round_trip_small_asts() {
        let cases = vec![
            num(7),
            pair(input(), num(0)),
            if_eq(input(), num(2), num(1), num(0)),
            run(fst(input()), snd(input())),
            prim(3, pair(input(), input())),
            pad_node(4, bot()),
            len(append(input(), num(9))),
            at(input(), num(0)),
        ];
        for a in cases {
            let c = encode_ast(&a);
            assert_eq!(decode_ast(&c).as_deref(), Some(&*a));
        }
    }

    #[test]
    fn invalid_tags_are_undefined() {
        let c = Nat::pair(&n(13), &n(0));
        assert!(decode_ast(&c).is_none());
        assert_eq!(super::run(&c, &n(0), 1_000_000), Outcome::OutOfFuel);
    }

    #[test]
    fn spec_examples() {
        assert_eq!(super::run(&code(&num(7)), &n(3), 100).value(), Some(&n(7)));
        assert_eq!(super::run(&code(&bot()), &n(0), 1_000_000), Outcome::OutOfFuel);
        let ifeq = code(&if_eq(input(), num(2), num(1), num(0)));
        // Hand-stepped: IfEq, Input, Num(2), then Num(1): 4 node entries.
        assert_eq!(super::run(&ifeq, &n(2), 100), Outcome::Defined { value: n(1), steps: 4 });
    }

    #[test]
    fn out_of_fuel_is_exact() {
        let c = code(&pair(num(1), num(2)));
        assert!(super::run(&c, &n(0), 3).is_defined());
        assert_eq!(super::run(&c, &n(0), 2), Outcome::OutOfFuel);
    }

    #[test]
    fn prim_costs_two() {
        let c = code(&prim(builtin::SUCC, input()));
        assert_eq!(super::run(&c, &n(4), 3), Outcome::Defined { value: n(5), steps: 3 });
        assert_eq!(super::run(&c, &n(4), 2), Outcome::OutOfFuel);
    }

    #[test]
    fn unknown_oracle_diverges() {
        let c = code(&prim(40, input()));
        assert_eq!(super::run(&c, &n(4), 100), Outcome::OutOfFuel);
        let t = OracleTable::new().with(40, "double", Arc::new(|x: &Nat| Some(x.add(x))));
        assert_eq!(eval(&c, &n(4), 100, &t).value(), Some(&n(8)));
    }
}
