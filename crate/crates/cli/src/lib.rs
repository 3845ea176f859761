//! File formats, parallel drivers and command implementations behind the
//! `qppsearch` binary.

pub mod driver;
pub mod figure;
pub mod lengths;
pub mod manifest;
pub mod progress;
pub mod records;

use qppsearch_core::Error;

/// Process exit status for an error.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::NotAPermutation { .. }) => exit::INVALID_POLYNOMIAL,
        Some(Error::EmptyClass) => exit::EMPTY_CLASS,
        Some(Error::BudgetExceeded { .. }) => exit::BUDGET_EXCEEDED,
        _ => exit::FAILURE,
    }
}

pub mod exit {
    pub const FAILURE: i32 = 1;
    /// Also used by the argument parser for usage errors.
    pub const USAGE: i32 = 2;
    pub const INVALID_POLYNOMIAL: i32 = 3;
    pub const EMPTY_CLASS: i32 = 4;
    pub const BUDGET_EXCEEDED: i32 = 5;
}
