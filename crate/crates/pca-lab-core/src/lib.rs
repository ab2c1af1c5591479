// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Executable partial combinatory algebras.
//!
//! The crate is layered bottom-up: [`nat`] (symbolic naturals), [`machine`]
//! (the fuel-bounded kernel realizing Kleene's first model), [`pca`]
//! (terms, combinators, bracket abstraction), [`ordinals`] (CNF notations
//! below ε₀), [`hierarchy`] (the `∼_α` relations as certificates and
//! probes), [`reductions`] (index builders for hardness constructions),
//! [`embeddings`] and [`k2`].

pub mod nat;
pub mod machine;
pub mod pca;
pub mod ordinals;
pub mod par;
pub mod hierarchy;
pub mod reductions;
pub mod embeddings;
pub mod k2;
pub mod selftest;

pub use nat::Nat;
