// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration and the small argument grammars shared by subcommands.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pca_lab::hierarchy::{cstar, estar};
use pca_lab::ordinals::{FiniteTree, OrdNotation};
use pca_lab::pca::{bot_code, i_code, instantiate, k_code, parse_term, s_code, Term};
use pca_lab::Nat;
use serde::{Deserialize, Serialize};

/// Budgets shared by every subcommand. A config file supplies a base;
/// command-line flags override field by field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub fuel: u64,
    /// Fundamental-sequence indices tried per limit in certificate search.
    pub depth: u64,
    /// Argument range `0..width` for distinguishing-tree exploration.
    pub width: u64,
    /// Argument pool, see [`parse_pool`].
    pub pool: String,
    /// Notations above this are rejected.
    pub notation_bound: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fuel: 100_000,
            depth: 2,
            width: 3,
            pool: "0..4".into(),
            notation_bound: "w^w".into(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("fuel", self.fuel), ("depth", self.depth), ("width", self.width)] {
            if v == 0 {
                bail!("{name} must be positive");
            }
        }
        if self.pool()?.is_empty() {
            bail!("pool must be nonempty");
        }
        self.bound()?;
        Ok(())
    }

    pub fn pool(&self) -> Result<Vec<Nat>> {
        parse_pool(&self.pool)
    }

    pub fn bound(&self) -> Result<OrdNotation> {
        parse_ordinal(&self.notation_bound).context("in notation bound")
    }

    /// Parses `src` and rejects notations at or above the bound.
    pub fn ordinal(&self, src: &str) -> Result<OrdNotation> {
        let a = parse_ordinal(src)?;
        let bound = self.bound()?;
        if pca_lab::ordinals::ord_cmp(&a, &bound).is_ge() {
            bail!("{a} is not below the notation bound {bound}");
        }
        Ok(a)
    }
}

pub fn parse_ordinal(src: &str) -> Result<OrdNotation> {
    src.parse().map_err(|e| anyhow!("ordinal `{src}`: {e}"))
}

/// Named elements usable as identifiers in terms.
pub fn named_elements() -> Vec<(&'static str, Nat)> {
    vec![("estar", estar()), ("cstar", cstar()), ("bot", bot_code())]
}

/// A closed term. Identifiers `estar`, `cstar` and `bot` name the fixed
/// constants; any other identifier is a free variable.
pub fn parse_closed(src: &str) -> Result<Term> {
    let t = parse_open(src)?;
    if !t.is_closed() {
        bail!("term `{src}` has free variables");
    }
    Ok(t)
}

pub fn parse_open(src: &str) -> Result<Term> {
    let t = parse_term(src).map_err(|e| anyhow!("term `{src}`: {e}"))?;
    let env = named_elements();
    let env: Vec<(&str, Nat)> = env.iter().map(|(k, v)| (*k, v.clone())).collect();
    Ok(instantiate(&t, &env))
}

/// Comma-separated items: `n`, `a..b`, `a..=b`, or one of the names
/// `K S I estar cstar bot`.
pub fn parse_pool(src: &str) -> Result<Vec<Nat>> {
    let mut out = Vec::new();
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..=") {
            out.extend((num(a)?..=num(b)?).map(Nat::from_u64));
        } else if let Some((a, b)) = item.split_once("..") {
            out.extend((num(a)?..num(b)?).map(Nat::from_u64));
        } else {
            out.push(match item {
                "K" => k_code(),
                "S" => s_code(),
                "I" => i_code(),
                "estar" => estar(),
                "cstar" => cstar(),
                "bot" => bot_code(),
                n => Nat::from_u64(num(n)?),
            });
        }
    }
    Ok(out)
}

fn num(s: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| anyhow!("`{s}` is not a natural number"))
}

/// Comma-separated naturals; the empty string is the empty list.
pub fn parse_string(src: &str) -> Result<Vec<u64>> {
    src.split(',').map(str::trim).filter(|s| !s.is_empty()).map(num).collect()
}

/// Nodes separated by `;`, each a comma-separated string. The prefix
/// closure is taken, so listing the leaves is enough. `.` is the root.
pub fn parse_tree(src: &str) -> Result<FiniteTree> {
    let mut nodes = BTreeSet::new();
    for node in src.split(';').map(str::trim) {
        nodes.insert(if node == "." { Vec::new() } else { parse_string(node)? });
    }
    Ok(FiniteTree::closure(nodes))
}

pub fn show_string(s: &[u64]) -> String {
    if s.is_empty() {
        "ε".into()
    } else {
        s.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools() {
        let p = parse_pool("0..3, 7, 9..=10, K").unwrap();
        let want: Vec<Nat> = [0u64, 1, 2, 7, 9, 10].iter().map(|&v| Nat::from_u64(v)).chain([k_code()]).collect();
        assert_eq!(p, want);
        assert!(parse_pool("x").is_err());
    }

    #[test]
    fn trees_are_prefix_closed() {
        let t = parse_tree("0,1;2").unwrap();
        for s in [&[][..], &[0], &[0, 1], &[2]] {
            assert!(t.contains(s));
        }
        assert_eq!(t.len(), 4);
        assert_eq!(parse_tree(".").unwrap().len(), 1);
    }

    #[test]
    fn budgets_must_be_positive() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.width = 0;
        assert!(c.validate().is_err());
        let c = RunConfig { pool: String::new(), ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn notation_bound_is_enforced() {
        let c = RunConfig { notation_bound: "w^2".into(), ..RunConfig::default() };
        assert!(c.ordinal("w*5 + 1").is_ok());
        assert!(c.ordinal("w^2").is_err());
    }

    #[test]
    fn named_elements_resolve() {
        assert_eq!(parse_closed("estar").unwrap(), Term::Elem(estar()));
        assert!(parse_closed("y").is_err());
    }
}
