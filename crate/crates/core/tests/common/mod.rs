//! Checks shared by the oracle, property and acceptance targets. Each check
//! panics on a violation.

#![allow(dead_code, clippy::int_plus_one)]

pub mod invariants;
pub mod oracle;
