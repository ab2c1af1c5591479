// Copyright 2026 the pca-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! One PASS/FAIL line per acceptance criterion. Budgets and tolerances are
//! pinned in `pca_lab::selftest`.
//!
//! `cargo test -p pca-lab-core --test acceptance -- 9 11` runs a subset.

use std::process::ExitCode;

use pca_lab::selftest;

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, _, _) in selftest::criteria() {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let r = selftest::run_one(id).expect("listed");
        println!("{} ({} ms)", selftest::format_line(&r), r.millis);
        failed += usize::from(!r.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
